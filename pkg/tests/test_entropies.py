import math

import numpy as np
import pytest

from nneten.entropies import SampEnParams, SvdEnParams, sample_entropy, svd_entropy
from nneten.errors import DomainError, UndefinedEntropyError


# ---------------------------------------------------------------------------
# independent brute-force oracles (plain loops, no shared code)
# ---------------------------------------------------------------------------

def sampen_oracle(x, m, tol):
    """O(N^2 * m) template counting straight from the definition."""
    n = len(x)
    counts = []
    for length in (m, m + 1):
        c = 0
        for i in range(n - m):
            for j in range(i + 1, n - m):
                match = True
                for k in range(length):
                    if abs(x[i + k] - x[j + k]) > tol:
                        match = False
                        break
                if match:
                    c += 1
        counts.append(c)
    b, a = counts
    if a == 0 or b == 0:
        return None
    return -math.log(a / b)


def svden_oracle_m2(x, delay=1):
    """SVDEn for m=2 via explicit 2x2 Gram eigenvalues."""
    rows = len(x) - delay
    col0 = np.array(x[:rows], dtype=float)
    col1 = np.array(x[delay:delay + rows], dtype=float)
    gram = np.array([
        [np.dot(col0, col0), np.dot(col0, col1)],
        [np.dot(col1, col0), np.dot(col1, col1)],
    ])
    eigs = np.linalg.eigvalsh(gram)
    sigma = np.sqrt(np.clip(eigs, 0.0, None))
    total = sigma.sum()
    if total == 0:
        return 0.0
    p = sigma / total
    return float(-sum(pi * math.log(pi) for pi in p if pi > 0))


# ---------------------------------------------------------------------------
# sample entropy
# ---------------------------------------------------------------------------

class TestSampleEntropy:
    def test_constant_series_is_zero(self):
        assert sample_entropy(np.full(20, 3.3), tolerance=0.5) == 0.0
        assert sample_entropy(np.full(20, 3.3)) == 0.0  # tol = 0.2 * std = 0

    def test_alternating_matches_oracle(self):
        x = np.array([0.0, 1.0] * 5)
        expected = sampen_oracle(x, 2, 0.1)
        assert expected == 0.0  # every same-parity pair matches at both lengths
        assert sample_entropy(x, m=2, tolerance=0.1) == expected

    def test_matches_oracle_on_short_seeded_series(self):
        rng = np.random.default_rng(11)
        checked = 0
        for trial in range(200):
            n = int(rng.integers(5, 13))
            if trial % 3 == 0:
                x = rng.normal(size=n)
            elif trial % 3 == 1:
                x = rng.integers(0, 4, size=n) * 0.5  # coarse grid: many matches
            else:
                x = np.cumsum(rng.normal(size=n))  # random walk
            tol = float(rng.uniform(0.2, 2.0)) * x.std(ddof=1)
            if tol == 0.0:
                tol = 0.1
            expected = sampen_oracle(x, 2, tol)
            if expected is None:
                with pytest.raises(UndefinedEntropyError):
                    sample_entropy(x, m=2, tolerance=tol)
            else:
                assert sample_entropy(x, m=2, tolerance=tol) == expected
                checked += 1
        assert checked > 50

    def test_too_short(self):
        with pytest.raises(DomainError):
            sample_entropy(np.zeros(3), m=2)

    def test_undefined_when_no_extended_matches(self):
        # one repeated m-template whose continuations diverge
        x = np.array([0.0, 1.0, 0.0, 1.0, 10.0])
        with pytest.raises(UndefinedEntropyError):
            sample_entropy(x, m=2, tolerance=0.1)

    def test_affine_invariance(self):
        rng = np.random.default_rng(12)
        x = rng.normal(size=120)
        base = sample_entropy(x)
        for a, b in ((2.0, 0.0), (-3.5, 1.2), (0.1, -40.0)):
            assert abs(sample_entropy(a * x + b) - base) < 1e-12

    def test_param_validation(self):
        with pytest.raises(DomainError):
            SampEnParams(m=0)
        with pytest.raises(DomainError):
            SampEnParams(r_factor=0.0)


# ---------------------------------------------------------------------------
# SVD entropy
# ---------------------------------------------------------------------------

class TestSvdEntropy:
    def test_constant_series_is_rank_one(self):
        assert svd_entropy(np.full(50, 2.0)) < 1e-12

    def test_all_zero_series(self):
        assert svd_entropy(np.zeros(30)) == 0.0

    def test_white_noise_near_upper_bound(self):
        rng = np.random.default_rng(13)
        x = rng.normal(size=5000)
        h = svd_entropy(x, m=2, delay=1)
        assert 0.5 < h <= math.log(2) + 1e-12

    def test_upper_bound_ln_m(self):
        rng = np.random.default_rng(14)
        for m in (2, 3, 5):
            for _ in range(20):
                x = rng.normal(size=int(rng.integers(m + 3, 60)))
                assert svd_entropy(x, m=m) <= math.log(m) + 1e-12

    def test_matches_gram_oracle(self):
        rng = np.random.default_rng(15)
        for _ in range(200):
            n = int(rng.integers(4, 13))
            x = rng.normal(size=n)
            assert abs(svd_entropy(x, m=2) - svden_oracle_m2(x)) < 1e-10

    def test_scale_invariance(self):
        rng = np.random.default_rng(16)
        x = rng.normal(size=200)
        base = svd_entropy(x)
        for a in (2.0, -0.01, 1e6):
            assert abs(svd_entropy(a * x) - base) < 1e-10

    def test_normalized_variant(self):
        rng = np.random.default_rng(17)
        x = rng.normal(size=100)
        assert svd_entropy(x, normalize=True) <= 1.0
        assert abs(svd_entropy(x, normalize=True) * math.log(2) - svd_entropy(x)) < 1e-12

    def test_too_short(self):
        with pytest.raises(DomainError):
            svd_entropy(np.zeros(1), m=2)
        with pytest.raises(DomainError):
            svd_entropy(np.zeros(5), m=3, delay=3)

    def test_param_validation(self):
        with pytest.raises(DomainError):
            SvdEnParams(m=1)
        with pytest.raises(DomainError):
            SvdEnParams(delay=0)
