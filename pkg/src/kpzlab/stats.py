"""Cumulant estimation and the small statistical toolbox used everywhere else.

The estimators are deliberately boring: unbiased k-statistics for the first
four cumulants, a delete-one-block jackknife for their standard errors, a
Gaussian KDE with Silverman's bandwidth for density overlays, and a weighted
least-squares power-law fit for the finite-time extrapolations.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "CumulantEstimate",
    "DensityCurve",
    "MomentAccumulator",
    "PowerLawFit",
    "cumulants",
    "jackknife_error",
    "kde",
    "fit_power_law",
    "write_cumulant_csv",
]

_MAX_JACKKNIFE_BLOCKS = 200


@dataclass(frozen=True)
class CumulantEstimate:
    """First four cumulants of a sample with jackknife standard errors."""

    n: int
    k: np.ndarray  # shape (4,): k1..k4
    err: np.ndarray  # shape (4,): standard errors

    def __post_init__(self) -> None:
        if self.k.shape != (4,) or self.err.shape != (4,):
            raise ValueError("k and err must have shape (4,)")

    @property
    def mean(self) -> float:
        return float(self.k[0])

    @property
    def variance(self) -> float:
        return float(self.k[1])

    @property
    def skewness(self) -> float:
        return float(self.k[2] / self.k[1] ** 1.5)

    @property
    def excess_kurtosis(self) -> float:
        return float(self.k[3] / self.k[1] ** 2)


@dataclass(frozen=True)
class DensityCurve:
    """A probability density evaluated on a grid."""

    grid: np.ndarray
    density: np.ndarray
    bandwidth: float

    def integral(self) -> float:
        return float(np.trapezoid(self.density, self.grid))


@dataclass
class MomentAccumulator:
    """Streaming central moments up to order 4.

    Supports out-of-core accumulation: feed batches with :meth:`update` and
    combine accumulators from independent workers with :meth:`merge` (Pebay's
    pairwise update formulas).  Merging in any order agrees with a single
    pass to ~1e-12 relative.
    """

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0

    def update(self, batch: np.ndarray) -> None:
        batch = np.asarray(batch, dtype=float)
        if batch.size == 0:
            return
        other = MomentAccumulator()
        other.count = int(batch.size)
        other.mean = float(batch.mean())
        d = batch - other.mean
        other.m2 = float(np.sum(d * d))
        other.m3 = float(np.sum(d * d * d))
        other.m4 = float(np.sum(d * d * d * d))
        self.merge(other)

    def merge(self, other: "MomentAccumulator") -> None:
        na, nb = self.count, other.count
        if nb == 0:
            return
        if na == 0:
            self.count, self.mean = other.count, other.mean
            self.m2, self.m3, self.m4 = other.m2, other.m3, other.m4
            return
        n = na + nb
        d = other.mean - self.mean
        d2 = d * d
        m2 = self.m2 + other.m2 + d2 * na * nb / n
        m3 = (
            self.m3
            + other.m3
            + d * d2 * na * nb * (na - nb) / (n * n)
            + 3.0 * d * (na * other.m2 - nb * self.m2) / n
        )
        m4 = (
            self.m4
            + other.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * d * (na * other.m3 - nb * self.m3) / n
        )
        self.count = n
        self.mean += d * nb / n
        self.m2, self.m3, self.m4 = m2, m3, m4

    def central_moments(self) -> tuple[float, float, float, float]:
        """(mean, m2, m3, m4) with m_r the r-th central moment (biased)."""
        if self.count == 0:
            raise ValueError("empty accumulator")
        n = self.count
        return self.mean, self.m2 / n, self.m3 / n, self.m4 / n


def _kstats_from_power_sums(n, s1, s2, s3, s4):
    """Unbiased k-statistics from raw power sums (vectorized over blocks)."""
    mean = s1 / n
    m2 = s2 / n - mean**2
    m3 = s3 / n - 3.0 * mean * s2 / n + 2.0 * mean**3
    m4 = s4 / n - 4.0 * mean * s3 / n + 6.0 * mean**2 * s2 / n - 3.0 * mean**4
    k2 = n / (n - 1.0) * m2
    k3 = n**2 / ((n - 1.0) * (n - 2.0)) * m3
    k4 = (
        n**2
        * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2)
        / ((n - 1.0) * (n - 2.0) * (n - 3.0))
    )
    return mean, k2, k3, k4


def cumulants(samples: np.ndarray) -> CumulantEstimate:
    """Unbiased k-statistics k1..k4 with delete-one-block jackknife errors.

    The jackknife uses min(n, 200) contiguous blocks; for i.i.d. input the
    blocking is immaterial, and it stays honest if the caller hands in
    weakly ordered data.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 8:
        raise ValueError("need at least 8 samples for k1..k4 with errors")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")

    n = x.size
    # Point estimates from centered data (numerically stable).
    xc = x - x.mean()
    m2 = float(np.mean(xc**2))
    m3 = float(np.mean(xc**3))
    m4 = float(np.mean(xc**4))
    k1 = float(x.mean())
    k2 = n / (n - 1.0) * m2
    k3 = n**2 / ((n - 1.0) * (n - 2.0)) * m3
    k4 = (
        n**2
        * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2)
        / ((n - 1.0) * (n - 2.0) * (n - 3.0))
    )

    # Jackknife over blocks, computed from per-block power sums so the
    # whole thing is a single pass plus O(blocks) work.  Sums are taken on
    # centered data to keep the powers well conditioned.
    n_blocks = min(n, _MAX_JACKKNIFE_BLOCKS)
    edges = np.linspace(0, n, n_blocks + 1).astype(np.intp)
    starts = edges[:-1]
    sizes = np.diff(edges).astype(float)
    p1 = np.add.reduceat(xc, starts)
    p2 = np.add.reduceat(xc**2, starts)
    p3 = np.add.reduceat(xc**3, starts)
    p4 = np.add.reduceat(xc**4, starts)
    nc = n - sizes
    t1, t2, t3, t4 = p1.sum(), p2.sum(), p3.sum(), p4.sum()
    jk = _kstats_from_power_sums(nc, t1 - p1, t2 - p2, t3 - p3, t4 - p4)
    errs = []
    for stat in jk:
        errs.append(np.sqrt((n_blocks - 1.0) / n_blocks * np.sum((stat - stat.mean()) ** 2)))
    # k1 of centered data is shifted; the spread (hence the error) is not.
    return CumulantEstimate(n=n, k=np.array([k1, k2, k3, k4]), err=np.array(errs))


def jackknife_error(
    samples: np.ndarray,
    statistic: Callable[[np.ndarray], float],
    n_blocks: int | None = None,
) -> float:
    """Delete-one-block jackknife standard error of ``statistic``."""
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n < 2:
        raise ValueError("need at least 2 samples")
    if n_blocks is None:
        n_blocks = min(n, _MAX_JACKKNIFE_BLOCKS)
    if not 2 <= n_blocks <= n:
        raise ValueError("n_blocks must be in [2, n]")
    edges = np.linspace(0, n, n_blocks + 1).astype(np.intp)
    theta = np.empty(n_blocks)
    for i in range(n_blocks):
        rest = np.concatenate([x[: edges[i]], x[edges[i + 1] :]])
        theta[i] = statistic(rest)
    return float(np.sqrt((n_blocks - 1.0) / n_blocks * np.sum((theta - theta.mean()) ** 2)))


def _silverman_bandwidth(x: np.ndarray) -> float:
    sd = float(np.std(x))
    q75, q25 = np.percentile(x, [75.0, 25.0])
    iqr = float(q75 - q25)
    scale = min(sd, iqr / 1.34) if iqr > 0 else sd
    if scale <= 1e-12 * max(1.0, abs(float(np.mean(x)))):
        raise ValueError("degenerate sample: zero spread")
    return 0.9 * scale * x.size ** (-0.2)


def kde(
    samples: np.ndarray,
    grid: np.ndarray | None = None,
    bandwidth: float | None = None,
) -> DensityCurve:
    """Gaussian kernel density estimate on ``grid``.

    Evaluation is binned (bin width = bandwidth/8) and then convolved with
    the kernel, which is exact to well below the statistical noise for the
    sample sizes used here.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise ValueError("need at least 2 samples")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    h = _silverman_bandwidth(x) if bandwidth is None else float(bandwidth)
    if h <= 0.0:
        raise ValueError("bandwidth must be positive")
    if grid is None:
        sd = float(np.std(x))
        m = float(np.mean(x))
        grid = np.linspace(m - 6.0 * sd, m + 6.0 * sd, 1024)
    else:
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing 1-D")

    lo = min(grid[0], x.min()) - 5.0 * h
    hi = max(grid[-1], x.max()) + 5.0 * h
    width = h / 8.0
    n_bins = int(np.ceil((hi - lo) / width)) + 2
    centers = lo + width * np.arange(n_bins)
    # Linear binning: split each sample between the two neighbouring bin
    # centres so the binned first moment is exact.
    pos = (x - lo) / width
    left = np.floor(pos).astype(np.intp)
    frac = pos - left
    weights = np.zeros(n_bins)
    np.add.at(weights, left, 1.0 - frac)
    np.add.at(weights, left + 1, frac)
    half = int(np.ceil(5.0 * h / width))
    u = np.arange(-half, half + 1) * width / h
    kernel = np.exp(-0.5 * u * u) / (h * np.sqrt(2.0 * np.pi))
    smooth = np.convolve(weights / x.size, kernel, mode="same")
    density = np.interp(grid, centers, smooth)
    return DensityCurve(grid=grid, density=density, bandwidth=h)


@dataclass(frozen=True)
class PowerLawFit:
    """Result of fitting y(t) = y_inf + c * t**(-p)."""

    y_inf: float
    coeff: float
    y_inf_err: float
    coeff_err: float
    p: float

    def predict(self, t: np.ndarray) -> np.ndarray:
        return self.y_inf + self.coeff * np.asarray(t, dtype=float) ** (-self.p)


def fit_power_law(
    t: Sequence[float],
    y: Sequence[float],
    p: float,
    y_err: Sequence[float] | None = None,
) -> PowerLawFit:
    """Weighted least squares for y = y_inf + c * t**(-p), fixed exponent.

    With ``y_err`` given, parameter errors come from the usual
    (X^T W X)^{-1} covariance; without, residuals set the scale.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.ndim != 1 or t.shape != y.shape or t.size < 2:
        raise ValueError("need matching 1-D t and y with at least 2 points")
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    if np.unique(t).size < 2:
        raise ValueError("t values are degenerate")
    if p <= 0:
        raise ValueError("exponent p must be positive")

    design = np.column_stack([np.ones_like(t), t ** (-p)])
    if y_err is not None:
        w = np.asarray(y_err, dtype=float)
        if w.shape != y.shape or np.any(w <= 0):
            raise ValueError("y_err must be positive and match y")
        sw = 1.0 / w
        a = design * sw[:, None]
        b = y * sw
    else:
        a = design
        b = y
    coef, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    if rank < 2:
        raise ValueError("degenerate design matrix")
    cov = np.linalg.inv(a.T @ a)
    if y_err is None:
        dof = max(t.size - 2, 1)
        resid = b - a @ coef
        cov = cov * float(resid @ resid) / dof
    return PowerLawFit(
        y_inf=float(coef[0]),
        coeff=float(coef[1]),
        y_inf_err=float(np.sqrt(cov[0, 0])),
        coeff_err=float(np.sqrt(cov[1, 1])),
        p=float(p),
    )


def write_cumulant_csv(path, rows: Iterable[tuple]) -> None:
    """Write per-(model, sigma, t) cumulant estimates.

    Each row is (model, sigma, t, CumulantEstimate).
    """
    header = [
        "model", "sigma", "t", "n",
        "k1", "k1_err", "k2", "k2_err", "k3", "k3_err", "k4", "k4_err",
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for model, sigma, t, est in rows:
            rec = [model, repr(float(sigma)), repr(float(t)), est.n]
            for i in range(4):
                rec.append(repr(float(est.k[i])))
                rec.append(repr(float(est.err[i])))
            writer.writerow(rec)
