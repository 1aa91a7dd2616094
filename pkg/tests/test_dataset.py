import struct

import numpy as np
import pytest

from nneten.dataset import (
    MNIST_TEST_COUNTS,
    MNIST_TRAIN_COUNTS,
    _apportion,
    input_matrix,
    load_mnist,
    load_rbv1,
    normalize_input,
    subsample,
)
from nneten.errors import ConsistencyError, DomainError, FormatError, ParseError


def make_idx_pair(tmp_path, n=4, label_count=None):
    images = tmp_path / "imgs"
    labels = tmp_path / "labs"
    with open(images, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, n, 28, 28))
        f.write(bytes(range(n)) * 784)
    with open(labels, "wb") as f:
        count = n if label_count is None else label_count
        f.write(struct.pack(">II", 0x00000801, count))
        f.write(bytes([i % 10 for i in range(count)]))
    return str(images), str(labels)


class TestIdxLoading:
    def test_bad_magic_raises_format_error(self, tmp_path):
        imgs, labs = make_idx_pair(tmp_path)
        bad = tmp_path / "bad"
        bad.write_bytes(struct.pack(">IIII", 0x00000804, 1, 28, 28) + bytes(784))
        with pytest.raises(FormatError):
            load_mnist(str(bad), labs, imgs, labs)
        with pytest.raises(FormatError):
            load_mnist(imgs, imgs, imgs, labs)  # label file with image magic

    def test_truncated_labels_raise_consistency_error(self, tmp_path):
        imgs, labs = make_idx_pair(tmp_path)
        short = tmp_path / "short"
        # header promises 4 labels, payload has 2
        short.write_bytes(struct.pack(">II", 0x00000801, 4) + bytes([0, 1]))
        with pytest.raises(ConsistencyError):
            load_mnist(imgs, str(short), imgs, labs)

    def test_image_label_count_mismatch(self, tmp_path):
        imgs, labs = make_idx_pair(tmp_path)
        labs_more = tmp_path / "labs6"
        labs_more.write_bytes(struct.pack(">II", 0x00000801, 6) + bytes(6))
        with pytest.raises(ConsistencyError):
            load_mnist(imgs, str(labs_more), imgs, labs)

    def test_out_of_range_label_rejected(self, tmp_path):
        imgs, labs = make_idx_pair(tmp_path)
        bad = tmp_path / "labs_bad"
        bad.write_bytes(struct.pack(">II", 0x00000801, 4) + bytes([0, 1, 2, 77]))
        with pytest.raises(FormatError):
            load_mnist(imgs, str(bad), imgs, labs)

    def test_small_standin_loads(self, d1_small):
        assert d1_small.kind == "D1"
        assert d1_small.feature_count == 784
        assert d1_small.class_count == 10
        assert d1_small.train_x.dtype == np.uint8
        expected = [max(1, round(c * 0.01)) for c in MNIST_TRAIN_COUNTS]
        assert list(d1_small.class_counts("train")) == expected

    def test_loading_is_deterministic(self, mnist_small_dir):
        from nneten.dataset import load_dataset

        a = load_dataset("D1", mnist_small_dir)
        b = load_dataset("D1", mnist_small_dir)
        assert np.array_equal(a.train_x, b.train_x)
        assert np.array_equal(a.test_y, b.test_y)


class TestRbv1Loading:
    def test_full_standin(self, d2_dataset):
        assert d2_dataset.kind == "D2"
        assert len(d2_dataset.train_x) == 5296
        assert list(d2_dataset.class_counts()) == [2648, 2648]
        # the whole set serves as both splits
        assert d2_dataset.test_x is d2_dataset.train_x
        assert d2_dataset.test_y is d2_dataset.train_y

    def test_two_row_file(self, tmp_path):
        path = tmp_path / "tiny.csv"
        row0 = ",".join(["1.0"] * 51) + ",0"
        row1 = ",".join(["2.0"] * 50 + ["7.5"]) + ",1"
        path.write_text(row0 + "\n" + row1 + "\n")
        ds = load_rbv1(str(path))
        assert len(ds.train_x) == 2
        assert ds.class_count == 2
        # first 50 columns span [1, 2]; none are constant here
        assert ds.norm_params.col_min[0] == 1.0
        assert ds.norm_params.col_max[0] == 2.0

    def test_header_row_is_skipped(self, tmp_path):
        path = tmp_path / "h.csv"
        header = ",".join(f"f{i}" for i in range(51)) + ",label"
        row = ",".join(["1.5"] * 51) + ",1"
        path.write_text(header + "\n" + row + "\n" + row + "\n")
        assert len(load_rbv1(str(path)).train_x) == 2

    def test_non_numeric_cell_reports_position(self, tmp_path):
        path = tmp_path / "bad.csv"
        row = ["1.0"] * 52
        row[3] = "oops"
        path.write_text(",".join(row) + "\n")
        with pytest.raises(ParseError) as err:
            load_rbv1(str(path))
        assert err.value.row == 1
        assert err.value.column == 4

    def test_wrong_column_count(self, tmp_path):
        path = tmp_path / "short.csv"
        path.write_text(",".join(["1.0"] * 10) + "\n")
        with pytest.raises(FormatError):
            load_rbv1(str(path))


class TestSubsample:
    def test_paper_counts_at_hundredth(self):
        assert _apportion(MNIST_TRAIN_COUNTS, 0.01).sum() == 600
        assert _apportion(MNIST_TEST_COUNTS, 0.01).sum() == 100
        assert _apportion((2648, 2648), 0.01).sum() == 53

    def test_d2_hundredth(self, d2_dataset):
        sub = subsample(d2_dataset, 0.01)
        assert len(sub.train_x) == 53
        assert sub.test_x is sub.train_x

    def test_counts_proportional_within_rounding(self, d1_small):
        sub = subsample(d1_small, 0.5)
        full = d1_small.class_counts("train")
        got = sub.class_counts("train")
        assert np.all(np.abs(got - 0.5 * full) <= 1.0)

    def test_takes_first_in_file_order(self, d2_dataset):
        sub = subsample(d2_dataset, 0.1)
        first_idx = {0: None, 1: None}
        for i, lab in enumerate(d2_dataset.train_y):
            if first_idx[lab] is None:
                first_idx[lab] = i
        assert np.array_equal(sub.train_x[0], d2_dataset.train_x[min(first_idx.values())])

    def test_identity_at_mu_one(self, d2_dataset):
        assert subsample(d2_dataset, 1.0) is d2_dataset

    def test_idempotent(self, d2_dataset):
        sub = subsample(d2_dataset, 0.2)
        again = subsample(sub, 1.0)
        assert np.array_equal(sub.train_x, again.train_x)

    def test_norm_params_frozen_by_default(self, d2_dataset):
        sub = subsample(d2_dataset, 0.05)
        assert np.array_equal(sub.norm_params.col_min, d2_dataset.norm_params.col_min)
        recomputed = subsample(d2_dataset, 0.05, recompute_norm=True)
        assert recomputed.norm_params.col_min.min() >= d2_dataset.norm_params.col_min.min()

    @pytest.mark.parametrize("mu", [0.0, 0.005, 1.2, -1])
    def test_mu_domain(self, d2_dataset, mu):
        with pytest.raises(DomainError):
            subsample(d2_dataset, mu)


class TestNormalization:
    def test_d1_endpoints(self, d1_small):
        raw = np.zeros(784)
        raw[0] = 255
        y = normalize_input(raw, d1_small)
        assert y[0] == 1.0
        assert y[1] == 1.0
        assert y[2] == 0.0

    def test_d2_min_maps_to_zero(self, d2_dataset):
        y = normalize_input(d2_dataset.norm_params.col_min, d2_dataset)
        assert y[0] == 1.0
        assert np.allclose(y[1:], 0.0)

    def test_d2_constant_column_maps_to_zero(self, tmp_path):
        row = ["3.0"] * 51
        lines = [",".join(row) + ",0", ",".join(row) + ",1"]
        path = tmp_path / "const.csv"
        path.write_text("\n".join(lines) + "\n")
        ds = load_rbv1(str(path))
        y = normalize_input(ds.train_x[0], ds)
        assert np.all(y[1:] == 0.0)

    def test_monotone_and_unit_range(self, d2_dataset):
        mat = input_matrix(d2_dataset, "train")
        assert np.all(mat[:, 0] == 1.0)
        assert mat[:, 1:].min() >= 0.0
        assert mat[:, 1:].max() <= 1.0
        # monotone per feature: larger raw value, larger normalized value
        j = 5
        raw_a = d2_dataset.norm_params.col_min.copy()
        raw_b = raw_a.copy()
        raw_b[j] = d2_dataset.norm_params.col_max[j]
        assert normalize_input(raw_b, d2_dataset)[j + 1] > normalize_input(raw_a, d2_dataset)[j + 1]

    def test_matrix_matches_vector_path(self, d2_dataset):
        mat = input_matrix(d2_dataset, "train")
        for i in (0, 17, 100):
            np.testing.assert_array_equal(mat[i], normalize_input(d2_dataset.train_x[i], d2_dataset))
