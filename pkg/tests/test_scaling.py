import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from collabmetrics.scaling import (InsufficientDataError, binned_lognormal, bin_ids,
                                   decompose_exponents, fit_lognormal, fit_power_law,
                                   log_bin, ols_loglog, read_curve_csv, read_fit_csv,
                                   read_histogram_csv, size_histogram, write_histogram_csv)

GRID_C = (0.5, 1.0, 3.0)
GRID_P = (0.0, 1 / 3, 1 / 2, 2 / 3, 1.0)


def _grid_naut(n=400):
    # integer sizes spread over three decades, several per bin
    return np.unique(np.rint(np.logspace(0, 3.5, n)))


# -- log_bin -------------------------------------------------------------------

def test_single_point():
    curve = log_bin([5], [3], min_bin_count=1)
    assert len(curve) == 1
    assert curve.means[0] == curve.medians[0] == 3
    assert curve.centers[0] == pytest.approx(5)


def test_two_points_one_bin():
    curve = log_bin([5, 5.1], [2, 4], min_bin_count=1)
    assert len(curve) == 1
    assert (curve.means[0], curve.medians[0]) == (3, 3)


def test_linear_values_track_bin_centers():
    rng = np.random.default_rng(0)
    n_aut = np.floor(np.exp(rng.uniform(0, math.log(3001), 1000)))
    curve = log_bin(n_aut, 2 * n_aut, bins_per_decade=5, min_bin_count=1)
    # mean of n over a bin against its geometric mean: the two differ by
    # at most the bin width factor 10**(1/5)
    width = 10 ** (1 / 5)
    ratio = curve.means / (2 * curve.centers)
    assert np.all(ratio >= 1 - 1e-12)
    assert np.all(ratio <= width)


def test_decade_edges_in_upper_bin():
    assert bin_ids(np.array([1.0, 9.99, 10.0, 100.0, 1000.0]), 1).tolist() == [0, 0, 1, 2, 3]
    assert bin_ids(np.array([10 ** 0.2, 10 ** 0.4]), 5).tolist() == [1, 2]


def test_sparse_bins_dropped_and_all_sparse_errors():
    curve = log_bin([1, 1, 1, 50], [1, 2, 3, 4], min_bin_count=3)
    assert curve.counts.tolist() == [3]
    with pytest.raises(InsufficientDataError, match="insufficient data"):
        log_bin([1, 50], [1, 2], min_bin_count=3)


@pytest.mark.parametrize("n_aut, values", [([], []), ([0.5], [1]), ([2], [-1]),
                                           ([1, 2], [1])])
def test_log_bin_rejects_bad_input(n_aut, values):
    with pytest.raises(ValueError):
        log_bin(n_aut, values, min_bin_count=1)


def test_log_bin_order_invariant():
    rng = np.random.default_rng(4)
    n = rng.integers(1, 2000, 500).astype(float)
    v = rng.lognormal(1, 1, 500)
    perm = rng.permutation(500)
    a, b = log_bin(n, v), log_bin(n[perm], v[perm])
    for name in ("centers", "counts", "means", "medians"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


# -- fit_power_law ---------------------------------------------------------------

def test_exact_linear_fit():
    n = _grid_naut()
    curve = log_bin(n, 2 * n, min_bin_count=1)
    fit = fit_power_law(_curve_on(curve.centers, 2 * curve.centers))
    assert fit.exponent == pytest.approx(1.0, abs=1e-10)
    assert fit.amplitude == pytest.approx(2.0, abs=1e-9)
    assert fit.r_squared == 1.0


def _curve_on(x, y):
    # one point per bin: center equals the point and mean is the value
    return log_bin(x, y, bins_per_decade=50, min_bin_count=1)


def test_constant_fit():
    x = np.logspace(0, 3, 16)
    fit = fit_power_law(_curve_on(x, np.full(16, 7.0)))
    assert fit.exponent == pytest.approx(0.0, abs=1e-10)
    assert fit.amplitude == pytest.approx(7.0, rel=1e-12)


@pytest.mark.parametrize("c", GRID_C)
@pytest.mark.parametrize("p", GRID_P)
def test_grid_recovery(c, p):
    x = np.logspace(0, 3.3, 30)
    fit = fit_power_law(_curve_on(x, c * x ** p))
    assert fit.exponent == pytest.approx(p, abs=1e-8)
    assert fit.amplitude == pytest.approx(c, rel=1e-8)


@given(st.floats(1e-3, 1e3), st.floats(-1, 2))
def test_scale_equivariance(k, p):
    x = np.logspace(0, 3, 12)
    rng = np.random.default_rng(1)
    y = x ** p * rng.lognormal(0, 0.3, 12)
    a = fit_power_law(_curve_on(x, y))
    b = fit_power_law(_curve_on(x, k * y))
    assert b.exponent == pytest.approx(a.exponent, abs=1e-9)
    assert b.amplitude == pytest.approx(k * a.amplitude, rel=1e-9)


def test_median_robust_to_outlier():
    n = np.repeat(np.logspace(0, 3, 10), 5)
    v = 4 * n ** 0.5
    spiked = v.copy()
    spiked[7] *= 100
    base = fit_power_law(log_bin(n, v, bins_per_decade=3), "median")
    hit = fit_power_law(log_bin(n, spiked, bins_per_decade=3), "median")
    assert hit.exponent == base.exponent
    assert fit_power_law(log_bin(n, spiked, bins_per_decade=3), "mean").exponent \
        != base.exponent


def test_fit_needs_two_bins():
    with pytest.raises(InsufficientDataError):
        fit_power_law(log_bin([1, 1, 1], [1, 2, 3]))


def test_fit_names_nonpositive_bin():
    curve = log_bin([1, 1, 1, 100, 100, 100], [1, 2, 3, 0, 0, 0])
    with pytest.raises(ValueError, match="n_aut=100"):
        fit_power_law(curve)


def test_naut_window():
    x = np.logspace(0, 3, 20)
    y = np.where(x < 30, x, 30.0)
    fit = fit_power_law(_curve_on(x, y), naut_max=29)
    assert fit.exponent == pytest.approx(1.0, abs=1e-10)


def test_ols_stderr_and_r2():
    # residuals +-e around slope 1: closed form stderr
    x = np.exp([0.0, 1.0, 2.0, 3.0])
    y = np.exp([0.0, 1.0, 2.0, 3.0] + np.array([0.1, -0.1, -0.1, 0.1]))
    slope, intercept, stderr, r2 = ols_loglog(x, y)
    assert slope == pytest.approx(1.0, abs=1e-12)
    assert stderr == pytest.approx(math.sqrt(0.04 / 2 / 5), rel=1e-12)
    assert r2 == pytest.approx(1 - 0.04 / (5 + 0.04), rel=1e-12)
    assert math.isnan(ols_loglog([1, 10], [1, 5])[2])


# -- fit_lognormal ---------------------------------------------------------------

def test_lognormal_constant():
    fit = fit_lognormal([4.0] * 6)
    assert fit.mu_log == pytest.approx(math.log(4.0))
    assert (fit.sigma_log, fit.zero_fraction) == (0.0, 0.0)


def test_lognormal_with_zero():
    fit = fit_lognormal([0, math.e, math.e])
    assert fit.zero_fraction == pytest.approx(1 / 3)
    assert fit.mu_log == pytest.approx(1.0, abs=1e-15)
    assert fit.sigma_log == pytest.approx(0.0, abs=1e-15)


def test_lognormal_recovery():
    values = np.random.default_rng(12).lognormal(2.0, 1.2, 10_000)
    fit = fit_lognormal(values)
    assert abs(fit.mu_log - 2.0) <= 0.05
    assert abs(fit.sigma_log - 1.2) <= 0.05


def test_lognormal_errors():
    with pytest.raises(ValueError):
        fit_lognormal([0, 0, 3])
    with pytest.raises(ValueError):
        fit_lognormal([1, -1, 2])


def test_binned_lognormal_skips_thin_bins():
    n = np.array([1, 1, 1, 100, 100, 100, 1000])
    v = np.array([1.0, 2.0, 4.0, 0, 0, 5.0, 3.0])
    out = binned_lognormal(n, v, bins_per_decade=1, min_bin_count=2)
    assert len(out) == 1 and out[0][0] == pytest.approx(1.0)


# -- decompose_exponents ---------------------------------------------------------

def test_decomposition_exact_identity():
    rng = np.random.default_rng(8)
    n = np.logspace(0, 3, 25)
    pap = rng.integers(1, 50, 25).astype(float)
    cit = rng.lognormal(2, 1, 25)
    fits = [fit_power_law(_curve_on(n, v)) for v in (pap, cit, pap * cit)]
    report = decompose_exponents(*fits)
    assert abs(report.residual) <= 1e-9
    assert report.passed


def test_decomposition_mismatched_binning():
    n = np.logspace(0, 3, 40)
    a = fit_power_law(log_bin(n, n, bins_per_decade=5, min_bin_count=1))
    b = fit_power_law(log_bin(n, n, bins_per_decade=4, min_bin_count=1))
    with pytest.raises(ValueError, match="bins_per_decade"):
        decompose_exponents(a, a, b)
    m = fit_power_law(log_bin(n, n, bins_per_decade=5, min_bin_count=1), "median")
    with pytest.raises(ValueError, match="estimator"):
        decompose_exponents(a, a, m)


# -- file helpers ----------------------------------------------------------------

def test_curve_and_fit_csv_round_trip():
    n = np.logspace(0, 3, 40)
    curve = log_bin(n, 3 * n ** 0.4, min_bin_count=1)
    fit = fit_power_law(curve)
    buf = io.StringIO()
    curve.write_csv(buf)
    rows = read_curve_csv(io.StringIO(buf.getvalue()))
    assert len(rows) == len(curve)
    assert rows[0][0] == pytest.approx(curve.centers[0], rel=1e-9)
    buf = io.StringIO()
    fit.write_csv(buf)
    back = read_fit_csv(io.StringIO(buf.getvalue()))
    assert back["exponent"] == pytest.approx(fit.exponent, rel=1e-9)
    assert back["n_bins"] == fit.n_bins_used


def test_histogram():
    rows = size_histogram(np.array([1, 1, 2, 15, 150, 160]), bins_per_decade=1)
    assert [r[2] for r in rows] == [3, 1, 2]
    buf = io.StringIO()
    write_histogram_csv(rows, buf)
    assert read_histogram_csv(io.StringIO(buf.getvalue())) == rows
