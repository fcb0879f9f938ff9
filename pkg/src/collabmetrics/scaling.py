"""Power-law scaling of bibliometric indices with collaboration size.

Entities are binned logarithmically in n_aut; a straight line is fitted in
log-log space to the per-bin mean (or median), giving <N_I> = C * n_aut**p.
Natural logs are used throughout.
"""
import math
from dataclasses import dataclass

import numpy as np

ESTIMATORS = ("mean", "median")
INDEX_FAMILIES = ("pap", "cit", "totcit", "fcit", "icit")
DEFAULT_BINS_PER_DECADE = 5
DEFAULT_MIN_BIN_COUNT = 3

CURVE_HEADER = "bin_center,count,mean,median"
FIT_HEADER = "exponent,stderr,amplitude,r2,n_bins,estimator"


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BinnedCurve:
    centers: np.ndarray        # geometric mean of the member n_aut values
    counts: np.ndarray
    means: np.ndarray
    medians: np.ndarray
    bin_ids: np.ndarray        # floor(log10(n_aut) * bins_per_decade)
    bins_per_decade: int
    min_bin_count: int

    def __len__(self):
        return self.centers.shape[0]

    def values(self, estimator):
        if estimator == "mean":
            return self.means
        if estimator == "median":
            return self.medians
        raise ValueError(f"estimator must be one of {ESTIMATORS}, got {estimator!r}")

    def write_csv(self, fp):
        fp.write(CURVE_HEADER + "\n")
        for row in zip(self.centers, self.counts, self.means, self.medians):
            fp.write(f"{row[0]:.10g},{row[1]},{row[2]:.10g},{row[3]:.10g}\n")


@dataclass(frozen=True, eq=False)
class ScalingFit:
    exponent: float
    amplitude: float
    exponent_stderr: float
    r_squared: float
    n_bins_used: int
    estimator: str
    bins_per_decade: int
    min_bin_count: int
    centers: tuple

    def predict(self, n_aut):
        return self.amplitude * np.power(n_aut, self.exponent)

    def write_csv(self, fp):
        fp.write(FIT_HEADER + "\n")
        fp.write(f"{self.exponent:.10g},{self.exponent_stderr:.10g},"
                 f"{self.amplitude:.10g},{self.r_squared:.10g},"
                 f"{self.n_bins_used},{self.estimator}\n")


@dataclass(frozen=True)
class LogNormalFit:
    mu_log: float
    sigma_log: float
    zero_fraction: float
    n_positive: int

    @property
    def median(self):
        return math.exp(self.mu_log)


@dataclass(frozen=True)
class ExponentDecomposition:
    p_pap: float
    p_cit: float
    p_totcit: float
    residual: float
    tolerance: float
    passed: bool


def bin_ids(n_aut, bins_per_decade):
    # the epsilon keeps exact decade edges (10, 100, ...) in the upper bin
    return np.floor(np.log10(n_aut) * bins_per_decade + 1e-9).astype(np.int64)


def _sorted_bins(n_aut, values, bins_per_decade):
    n_aut = np.asarray(n_aut, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if n_aut.shape != values.shape or n_aut.ndim != 1:
        raise ValueError("n_aut and values must be 1-d arrays of equal length")
    if n_aut.size == 0:
        raise InsufficientDataError("insufficient data: no points")
    if int(bins_per_decade) != bins_per_decade or bins_per_decade < 1:
        raise ValueError("bins_per_decade must be a positive integer")
    if np.any(~np.isfinite(n_aut)) or np.any(n_aut < 1):
        raise ValueError("n_aut values must be finite and >= 1")
    if np.any(~np.isfinite(values)):
        raise ValueError("values must be finite")
    ids = bin_ids(n_aut, bins_per_decade)
    # full sort makes every per-bin statistic independent of input order
    order = np.lexsort((values, n_aut, ids))
    ids, n_aut, values = ids[order], n_aut[order], values[order]
    uniq, starts, counts = np.unique(ids, return_index=True, return_counts=True)
    return n_aut, values, uniq, starts, counts


def log_bin(n_aut, values, bins_per_decade=DEFAULT_BINS_PER_DECADE,
            min_bin_count=DEFAULT_MIN_BIN_COUNT):
    """Bin points (n_aut, value) logarithmically in n_aut.

    Bins with fewer than ``min_bin_count`` points are dropped; if none
    survive, :class:`InsufficientDataError` is raised.
    """
    if min_bin_count < 1:
        raise ValueError("min_bin_count must be >= 1")
    n_aut, values, uniq, starts, counts = _sorted_bins(n_aut, values, bins_per_decade)
    if np.any(values < 0):
        raise ValueError("values must be >= 0")
    rows = []
    for b, start, count in zip(uniq, starts, counts):
        if count < min_bin_count:
            continue
        sl = slice(start, start + count)
        rows.append((b, math.exp(np.mean(np.log(n_aut[sl]))), count,
                     np.mean(values[sl]), np.median(values[sl])))
    if not rows:
        raise InsufficientDataError(
            f"insufficient data: no bin holds {min_bin_count} or more points")
    ids, centers, cnt, means, medians = (np.array(col) for col in zip(*rows))
    return BinnedCurve(centers.astype(np.float64), cnt.astype(np.int64),
                       means.astype(np.float64), medians.astype(np.float64),
                       ids.astype(np.int64), int(bins_per_decade), int(min_bin_count))


def ols_loglog(x, y):
    """Least squares of log y on log x; returns (slope, intercept, stderr, r2)."""
    lx = np.log(np.asarray(x, dtype=np.float64))
    ly = np.log(np.asarray(y, dtype=np.float64))
    n = lx.shape[0]
    dx = lx - lx.mean()
    dy = ly - ly.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise InsufficientDataError("insufficient data: all bins share one n_aut")
    slope = float(dx @ dy) / sxx
    intercept = float(ly.mean() - slope * lx.mean())
    resid = ly - (intercept + slope * lx)
    ssr = float(resid @ resid)
    sst = float(dy @ dy)
    stderr = math.sqrt(ssr / (n - 2) / sxx) if n > 2 else math.nan
    if sst == 0.0 or ssr <= 1e-18:
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ssr / sst))
    return slope, intercept, stderr, r2


def fit_power_law(curve, estimator="mean", naut_min=None, naut_max=None):
    """Fit <value> = amplitude * n_aut**exponent over the curve's bins."""
    values = curve.values(estimator)
    keep = np.ones(len(curve), dtype=bool)
    if naut_min is not None:
        keep &= curve.centers >= naut_min
    if naut_max is not None:
        keep &= curve.centers <= naut_max
    if np.count_nonzero(keep) < 2:
        raise InsufficientDataError(
            f"insufficient data: need at least 2 bins, have {np.count_nonzero(keep)}")
    x, y = curve.centers[keep], values[keep]
    bad = np.flatnonzero(y <= 0)
    if bad.size:
        raise ValueError(
            f"bin at n_aut={x[bad[0]]:.6g} has {estimator} {y[bad[0]]:.6g}; "
            "log undefined")
    slope, intercept, stderr, r2 = ols_loglog(x, y)
    return ScalingFit(
        exponent=slope, amplitude=math.exp(intercept), exponent_stderr=stderr,
        r_squared=r2, n_bins_used=int(x.shape[0]), estimator=estimator,
        bins_per_decade=curve.bins_per_decade, min_bin_count=curve.min_bin_count,
        centers=tuple(float(c) for c in x),
    )


def fit_lognormal(values):
    """Sample mean and standard deviation of ln(v) over the positive values."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if np.any(v < 0):
        raise ValueError("values must be >= 0")
    positive = np.sort(v[v > 0])
    if positive.size < 2:
        raise InsufficientDataError("need at least 2 positive values")
    logs = np.log(positive)
    return LogNormalFit(
        mu_log=float(np.mean(logs)),
        sigma_log=float(np.std(logs, ddof=1)),
        zero_fraction=float((v.size - positive.size) / v.size),
        n_positive=int(positive.size),
    )


def binned_lognormal(n_aut, values, bins_per_decade=DEFAULT_BINS_PER_DECADE,
                     min_bin_count=DEFAULT_MIN_BIN_COUNT):
    """Per-bin log-normal fits; returns a list of (center, LogNormalFit).

    Bins with fewer than ``min_bin_count`` points or fewer than two positive
    values are skipped.
    """
    n_aut, values, uniq, starts, counts = _sorted_bins(n_aut, values, bins_per_decade)
    out = []
    for start, count in zip(starts, counts):
        sl = slice(start, start + count)
        if count < min_bin_count or np.count_nonzero(values[sl] > 0) < 2:
            continue
        center = math.exp(np.mean(np.log(n_aut[sl])))
        out.append((center, fit_lognormal(values[sl])))
    if not out:
        raise InsufficientDataError("insufficient data: no bin can be fitted")
    return out


def decompose_exponents(fit_pap, fit_cit, fit_totcit, tolerance=0.07):
    """Check p_totcit = p_pap + p_cit for fits over the same bins."""
    fits = (fit_pap, fit_cit, fit_totcit)
    for attr in ("bins_per_decade", "min_bin_count", "estimator", "centers"):
        if len({getattr(f, attr) for f in fits}) != 1:
            raise ValueError(f"fits disagree on {attr}; decomposition needs identical binning")
    residual = fit_totcit.exponent - (fit_cit.exponent + fit_pap.exponent)
    return ExponentDecomposition(fit_pap.exponent, fit_cit.exponent, fit_totcit.exponent,
                                 residual, tolerance, abs(residual) <= tolerance)


def index_values(profiles, family):
    """Per-entity value of one index family from a ProfileTable."""
    if family == "pap":
        return profiles.n_pap.astype(np.float64)
    if family == "cit":
        return profiles.n_totcit / profiles.n_pap
    if family == "totcit":
        return profiles.n_totcit.astype(np.float64)
    if family == "fcit":
        return profiles.n_fcit
    if family == "icit":
        return profiles.n_icit
    raise ValueError(f"unknown index family {family!r}; choose from {INDEX_FAMILIES}")


def read_curve_csv(fp):
    lines = [ln.strip() for ln in fp if ln.strip()]
    if not lines or lines[0] != CURVE_HEADER:
        raise ValueError(f"curve file must start with header {CURVE_HEADER!r}")
    rows = [ln.split(",") for ln in lines[1:]]
    return [(float(c), int(n), float(m), float(md)) for c, n, m, md in rows]


def read_fit_csv(fp):
    lines = [ln.strip() for ln in fp if ln.strip()]
    if len(lines) != 2 or lines[0] != FIT_HEADER:
        raise ValueError(f"fit file must hold header {FIT_HEADER!r} and one row")
    exp_, stderr, amp, r2, nb, est = lines[1].split(",")
    return {"exponent": float(exp_), "stderr": float(stderr), "amplitude": float(amp),
            "r2": float(r2), "n_bins": int(nb), "estimator": est}


HISTOGRAM_HEADER = "bin_low,bin_high,count"


def size_histogram(n_aut, bins_per_decade=DEFAULT_BINS_PER_DECADE):
    """Entity counts per logarithmic n_aut bin as ``(low, high, count)`` rows."""
    n_aut = np.asarray(n_aut, dtype=np.float64)
    if n_aut.size == 0:
        return []
    if np.any(n_aut < 1):
        raise ValueError("n_aut values must be >= 1")
    uniq, counts = np.unique(bin_ids(n_aut, bins_per_decade), return_counts=True)
    return [(10.0 ** (b / bins_per_decade), 10.0 ** ((b + 1) / bins_per_decade), int(c))
            for b, c in zip(uniq, counts)]


def write_histogram_csv(rows, fp):
    fp.write(HISTOGRAM_HEADER + "\n")
    for lo, hi, n in rows:
        fp.write(f"{lo:.10g},{hi:.10g},{n}\n")


def read_histogram_csv(fp):
    lines = [ln.strip() for ln in fp if ln.strip()]
    if not lines or lines[0] != HISTOGRAM_HEADER:
        raise ValueError(f"histogram file must start with header {HISTOGRAM_HEADER!r}")
    return [(float(a), float(b), int(c)) for a, b, c in (ln.split(",") for ln in lines[1:])]
