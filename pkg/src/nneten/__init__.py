"""Neural network entropy of time series.

The entropy of a series is the classification metric a reservoir-fed
single-layer network reaches on a reference dataset after the reservoir
matrix is filled from the series.  The package also ships the
separation-analysis toolchain used to evaluate the measure: sine-map
signal generation, ANOVA F-ratios, repeated-K-fold SVM accuracy,
synergy coefficients and EEG-style preprocessing.
"""

__version__ = "0.1.0"

from .analysis import (
    FeatureTable,
    FRatioResult,
    RkfConfig,
    difference_grid,
    entropy_sweep,
    f_ratio,
    rkf_accuracy,
    svm_predict,
    svm_train,
    synergy,
)
from .chaos import SineMapConfig, bifurcation_scan, sine_map_series
from .dataset import (
    LabeledDataset,
    load_dataset,
    load_mnist,
    load_rbv1,
    normalize_input,
    subsample,
    write_synthetic_data,
)
from .engine import (
    DatasetCache,
    EntropyResult,
    NNetEnSettings,
    compute_nneten,
    nset_decode,
    nset_encode,
    nset_to_settings,
    parse_settings_string,
    settings_to_nset,
    write_log,
)
from .entropies import SampEnParams, SvdEnParams, sample_entropy, svd_entropy
from .errors import NNetEnError
from .lognnet import (
    accuracy,
    compute_sh,
    compute_sh_stats,
    normalize_sh,
    pearson_efficiency,
    pearson_single,
    r2_efficiency,
    r2_single,
    train_classifier,
)
from .reservoir import P_MAX, ReservoirMatrix, fill_reservoir, n_max
from .sigprep import (
    DwtDecomposition,
    FilterSpec,
    butterworth_bandpass,
    component_signal,
    decompose_eeg,
    dwt_db4,
    idwt_db4,
)
