"""EEG-style preprocessing: Butterworth bandpass and multilevel db4
discrete wavelet decomposition.

The bandpass is a digital Butterworth design (bilinear transform with
frequency prewarping, via scipy) applied forward-backward by default so
the result is zero-phase.  The wavelet decomposition keeps every level's
approximation and detail coefficients so any of the band components can
be fed to an entropy estimator.

Two boundary modes are provided:

* "symmetric" (default) -- whole-point reflection, level sizes
  ceil((n + 7) / 2); expansive but shift-friendly.
* "periodization" -- circular extension, level sizes ceil(n / 2);
  orthogonal, so coefficient energy equals signal energy for lengths
  that stay even through all levels.
"""

from dataclasses import dataclass

import numpy as np
from scipy import signal as _signal

from .errors import DomainError

# 8-tap db4 analysis pair; the high-pass is the alternating-sign mirror.
DB4_DEC_LO = np.array([
    -0.010597401785069032,
    0.0328830116668852,
    0.030841381835560764,
    -0.18703481171909309,
    -0.027983769416859854,
    0.6308807679298589,
    0.7148465705529157,
    0.2303778133088965,
])
_L = len(DB4_DEC_LO)
DB4_DEC_HI = np.array([(-1) ** k * DB4_DEC_LO[_L - 1 - k] for k in range(_L)])

_SELECTORS = {"RAW", "FILTERED"} | {f"A{i}" for i in range(1, 7)} | {f"D{i}" for i in range(1, 7)}


@dataclass(frozen=True)
class FilterSpec:
    order: int = 5
    low_hz: float = 0.5
    high_hz: float = 32.0
    sample_rate_hz: float = 500.0

    def __post_init__(self):
        if not 0 < self.low_hz < self.high_hz < self.sample_rate_hz / 2:
            raise DomainError(
                f"band [{self.low_hz}, {self.high_hz}] Hz invalid for fs={self.sample_rate_hz}"
            )
        if self.order < 1:
            raise DomainError("filter order must be >= 1")


def design_bandpass(spec):
    """Second-order sections of the digital Butterworth bandpass."""
    return _signal.butter(
        spec.order, [spec.low_hz, spec.high_hz], btype="bandpass",
        fs=spec.sample_rate_hz, output="sos",
    )


def filter_response(spec, freqs_hz):
    """|H(f)| of the designed (single-pass) filter at the given frequencies."""
    sos = design_bandpass(spec)
    _, h = _signal.sosfreqz(sos, worN=np.asarray(freqs_hz, dtype=np.float64), fs=spec.sample_rate_hz)
    return np.abs(h)


def butterworth_bandpass(signal, spec, zero_phase=True):
    """Bandpass a 1-D signal; forward-backward (zero-phase) by default."""
    x = np.asarray(signal, dtype=np.float64).ravel()
    if x.size <= 3 * spec.order:
        raise DomainError(f"signal of length {x.size} too short for order-{spec.order} filtering")
    sos = design_bandpass(spec)
    if not zero_phase:
        return _signal.sosfilt(sos, x)
    # pad past the slowest edge's settling time so the forward-backward
    # pass is transient-free well inside the signal
    settle = int(3 * spec.sample_rate_hz / spec.low_hz)
    padlen = min(max(3 * (2 * sos.shape[0] + 1), settle), x.size - 1)
    return _signal.sosfiltfilt(sos, x, padlen=padlen)


@dataclass(frozen=True)
class DwtDecomposition:
    """Approximation/detail coefficient arrays of every level plus the
    signals they came from."""

    approx: tuple
    detail: tuple
    levels: int
    original_length: int
    mode: str
    signal: np.ndarray
    raw: np.ndarray
    wavelet: str = "db4"
    level_lengths: tuple = ()


def _reflect_pad(x, pad):
    # whole-point symmetry: the boundary sample is not repeated
    if x.size < pad + 1:
        raise DomainError(f"signal of length {x.size} too short to reflect-pad by {pad}")
    return np.concatenate([x[pad:0:-1], x, x[-2:-pad - 2:-1]])


def _dwt_single(x, mode):
    if mode == "symmetric":
        xe = _reflect_pad(x, _L - 1)
        ca = np.correlate(xe, DB4_DEC_LO, mode="valid")[::2]
        cd = np.correlate(xe, DB4_DEC_HI, mode="valid")[::2]
        return ca, cd
    if mode == "periodization":
        n = x.size
        if n % 2:
            x = np.append(x, x[-1])
            n += 1
        idx = (np.arange(_L)[None, :] + 2 * np.arange(n // 2)[:, None]) % n
        windows = x[idx]
        return windows @ DB4_DEC_LO, windows @ DB4_DEC_HI
    raise DomainError(f"unknown mode {mode!r} (expected 'symmetric' or 'periodization')")


def _idwt_single(ca, cd, out_len, mode):
    if mode == "symmetric":
        up_a = np.zeros(2 * ca.size)
        up_a[::2] = ca
        up_d = np.zeros(2 * cd.size)
        up_d[::2] = cd
        full = np.convolve(up_a, DB4_DEC_LO) + np.convolve(up_d, DB4_DEC_HI)
        return full[_L - 1:_L - 1 + out_len]
    # circular synthesis: y[(2k + m) % n] += ca[k] * lo[m] + cd[k] * hi[m]
    n = 2 * ca.size
    out = np.zeros(n)
    k_idx = 2 * np.arange(ca.size)
    for m in range(_L):
        np.add.at(out, (k_idx + m) % n, ca * DB4_DEC_LO[m] + cd * DB4_DEC_HI[m])
    return out[:out_len]


def dwt_db4(signal, levels=6, mode="symmetric", raw=None):
    """Cascade db4 analysis keeping A1..A`levels` and D1..D`levels`."""
    x = np.asarray(signal, dtype=np.float64).ravel()
    if levels < 1:
        raise DomainError("levels must be >= 1")
    if x.size < 2 ** levels:
        raise DomainError(f"signal of length {x.size} too short for {levels}-level decomposition")
    approx, detail, lengths = [], [], []
    current = x
    for _ in range(levels):
        lengths.append(current.size)
        ca, cd = _dwt_single(current, mode)
        approx.append(ca)
        detail.append(cd)
        current = ca
    return DwtDecomposition(
        approx=tuple(approx),
        detail=tuple(detail),
        levels=levels,
        original_length=x.size,
        mode=mode,
        signal=x,
        raw=x if raw is None else np.asarray(raw, dtype=np.float64).ravel(),
        level_lengths=tuple(lengths),
    )


def idwt_db4(decomp):
    """Invert the cascade back to the decomposed signal."""
    current = decomp.approx[-1]
    for level in range(decomp.levels - 1, -1, -1):
        current = _idwt_single(current, decomp.detail[level], decomp.level_lengths[level], decomp.mode)
    return current


def component_signal(decomp, selector):
    """One of the 14 signal variants: RAW, FILTERED, A1..A6, D1..D6."""
    sel = str(selector).upper()
    if sel not in _SELECTORS:
        raise DomainError(f"unknown component selector {selector!r}")
    if sel == "RAW":
        return decomp.raw
    if sel == "FILTERED":
        return decomp.signal
    index = int(sel[1]) - 1
    if index >= decomp.levels:
        raise DomainError(f"selector {selector!r} beyond decomposition depth {decomp.levels}")
    return (decomp.approx if sel[0] == "A" else decomp.detail)[index]


def decompose_eeg(raw_signal, filter_spec=None, levels=6, mode="symmetric", zero_phase=True):
    """Filter then decompose one channel, keeping the raw signal attached
    so every selector of `component_signal` is available."""
    spec = filter_spec or FilterSpec()
    raw = np.asarray(raw_signal, dtype=np.float64).ravel()
    filtered = butterworth_bandpass(raw, spec, zero_phase=zero_phase)
    return dwt_db4(filtered, levels=levels, mode=mode, raw=raw)
