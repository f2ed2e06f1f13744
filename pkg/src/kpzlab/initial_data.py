"""Random initial occupancy data and the associated height function.

The particle systems in this package all start from a density-1/2 occupancy
of a finite window of the integer lattice.  The workhorse family is the
two-state Markov chain with persistence ``alpha`` (stationary marginal 1/2),
whose integrated height fluctuations have diffusion coefficient

    sigma^2 = alpha / (1 - alpha),

so one knob sweeps continuously from the flat, periodic string (alpha -> 0)
through uncorrelated Bernoulli sites (alpha = 1/2) to strongly clustered
strings (alpha -> 1).
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .stats import jackknife_error

__all__ = [
    "OccupancyString",
    "HeightProfile",
    "gen_markov_ic",
    "gen_periodic_ic",
    "gen_bernoulli_ic",
    "height_from_occupancy",
    "markov_sigma2",
    "estimate_diffusion",
]


@dataclass(frozen=True)
class OccupancyString:
    """0/1 occupancies on the window [lo, hi] (both ends included)."""

    bits: np.ndarray
    lo: int
    hi: int

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits, dtype=np.uint8)
        object.__setattr__(self, "bits", bits)
        if bits.ndim != 1 or self.hi - self.lo + 1 != bits.size:
            raise ValueError("bits length must match window [lo, hi]")
        if bits.size and bits.max() > 1:
            raise ValueError("occupancies must be 0 or 1")

    def __len__(self) -> int:
        return self.bits.size

    def site(self, j: int) -> int:
        if not self.lo <= j <= self.hi:
            raise IndexError(f"site {j} outside window [{self.lo}, {self.hi}]")
        return int(self.bits[j - self.lo])

    def density(self) -> float:
        return float(self.bits.mean())

    def particle_positions(self) -> np.ndarray:
        return np.nonzero(self.bits)[0] + self.lo

    def to_text(self) -> str:
        out = io.StringIO()
        out.write(f"window=[{self.lo},{self.hi}]\n")
        s = "".join("1" if b else "0" for b in self.bits)
        for i in range(0, len(s), 100):
            out.write(s[i : i + 100] + "\n")
        return out.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "OccupancyString":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("window=["):
            raise ValueError("missing window=[lo,hi] header")
        lo, hi = (int(v) for v in lines[0][len("window=[") : -1].split(","))
        digits = "".join(lines[1:])
        if set(digits) - {"0", "1"}:
            raise ValueError("body must be 0/1 characters")
        bits = np.frombuffer(digits.encode(), dtype=np.uint8) - ord("0")
        return cls(bits=bits, lo=lo, hi=hi)


@dataclass(frozen=True)
class HeightProfile:
    """Height h(j) on the window of an occupancy string, with h(0) = 2J."""

    h: np.ndarray
    lo: int
    hi: int

    def height(self, j: int) -> int:
        if not self.lo <= j <= self.hi:
            raise IndexError(f"site {j} outside window [{self.lo}, {self.hi}]")
        return int(self.h[j - self.lo])


def _window_ok(lo: int, hi: int) -> None:
    if hi < lo:
        raise ValueError("window must satisfy lo <= hi")
    if lo > 0 or hi < 0:
        raise ValueError("window must contain the origin")


def gen_markov_ic(lo: int, hi: int, alpha: float, rng: np.random.Generator) -> OccupancyString:
    """Occupancies from the two-state chain with persistence ``alpha``.

    P(eta_{j+1} = eta_j) = alpha; the first site is a fair coin, so every
    marginal is exactly 1/2.
    """
    _window_ok(lo, hi)
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    n = hi - lo + 1
    u = rng.random(n)
    first = np.uint8(u[0] < 0.5)
    flips = (u[1:] >= alpha).astype(np.uint8)
    bits = np.empty(n, dtype=np.uint8)
    bits[0] = first
    if n > 1:
        bits[1:] = first ^ (np.cumsum(flips, dtype=np.int64) & 1).astype(np.uint8)
    return OccupancyString(bits=bits, lo=lo, hi=hi)


def gen_periodic_ic(lo: int, hi: int) -> OccupancyString:
    """Deterministic alternating string: even sites occupied (sigma = 0)."""
    _window_ok(lo, hi)
    sites = np.arange(lo, hi + 1)
    return OccupancyString(bits=(sites % 2 == 0).astype(np.uint8), lo=lo, hi=hi)


def gen_bernoulli_ic(
    lo: int, hi: int, rng: np.random.Generator, rho: float = 0.5
) -> OccupancyString:
    """Independent sites occupied with probability ``rho`` (sigma = 1 at 1/2)."""
    _window_ok(lo, hi)
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie in (0, 1)")
    bits = (rng.random(hi - lo + 1) < rho).astype(np.uint8)
    return OccupancyString(bits=bits, lo=lo, hi=hi)


def markov_sigma2(alpha: float) -> float:
    """Diffusion coefficient of the persistence-``alpha`` chain."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    return alpha / (1.0 - alpha)


def height_from_occupancy(occ: OccupancyString, j_count: int = 0) -> HeightProfile:
    """Integrated height: h(0) = 2*j_count, increments 1 - 2*eta."""
    steps = 1 - 2 * occ.bits.astype(np.int64)
    h = np.empty(occ.bits.size, dtype=np.int64)
    i0 = -occ.lo  # index of site 0
    h[i0] = 2 * j_count
    if i0 + 1 < h.size:
        h[i0 + 1 :] = h[i0] + np.cumsum(steps[i0 + 1 :])
    if i0 > 0:
        h[:i0] = h[i0] - np.cumsum(steps[1 : i0 + 1][::-1])[::-1]
    return HeightProfile(h=h, lo=occ.lo, hi=occ.hi)


def estimate_diffusion(generator, ell: int, reps: int, rng: np.random.Generator):
    """Monte Carlo estimate of sigma^2 = Var(h(ell, 0)) / ell.

    ``generator`` is called as generator(lo, hi, rng) and must return an
    OccupancyString covering [0, ell].  Raises if the generator drifts
    (|mean h(ell)| / sqrt(ell) > 5), since the scaling theory assumes
    density 1/2.
    """
    if ell < 10:
        raise ValueError("ell too small to be meaningful")
    if reps < 100:
        raise ValueError("need at least 100 repetitions")
    h_end = np.empty(reps)
    for r in range(reps):
        occ = generator(0, ell, rng)
        if occ.lo > 0 or occ.hi < ell:
            raise ValueError("generator must cover [0, ell]")
        prof = height_from_occupancy(occ)
        h_end[r] = prof.height(ell)
    drift = abs(h_end.mean()) / np.sqrt(ell)
    if drift > 5.0:
        raise ValueError(
            f"initial data drifts (|mean h|/sqrt(ell) = {drift:.2f}); "
            "diffusion coefficient undefined at density != 1/2"
        )
    sigma2 = float(np.var(h_end, ddof=1)) / ell
    err = jackknife_error(h_end, lambda v: np.var(v, ddof=1) / ell)
    return sigma2, err
