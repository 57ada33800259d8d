"""Error variance of lattice sampling, its lower bound, and rate sweeps.

All quantities are normalized: the process variance is one, the frequency
lattice has unit cell volume (so the sampling rate is one) and the only
free parameter is the rate/bandwidth ratio.  The error variance is the
fraction of the spectral ball outside the Voronoi cell, estimated from a
radial boundary profile; the bound is closed-form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import LatticeSpec, ThresholdPair, normalized_thresholds
from .geometry import RadialProfile, _unit_ball_volume


class NoCrossoverError(ValueError):
    """The two curves never swap order on the grid interior."""


class MultipleCrossoverError(ValueError):
    """More than one sign change; all interpolated candidates attached."""

    def __init__(self, candidates: list[float]):
        super().__init__(f"expected one crossover, found {len(candidates)}: {candidates}")
        self.candidates = candidates


@dataclass(frozen=True)
class VarianceCurve:
    lattice_name: str
    dim: int
    rates: np.ndarray
    sigma_e2: np.ndarray
    sigma_lb2: np.ndarray
    gap: np.ndarray
    stderr: np.ndarray

    def __post_init__(self):
        for a in (self.rates, self.sigma_e2, self.sigma_lb2, self.gap, self.stderr):
            a.setflags(write=False)


def lower_bound(dim: int, rate_over_bandwidth: float) -> float:
    """Universal lower bound on the normalized error variance."""
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    if rate_over_bandwidth <= 0:
        raise ValueError("rate must be positive")
    return max(0.0, 1.0 - rate_over_bandwidth**dim / _unit_ball_volume(dim))


def error_variance(profile: RadialProfile, rate_over_bandwidth: float) -> tuple[float, float]:
    """Normalized error variance at one rate, with its standard error.

    With unit frequency-cell volume the bandwidth is 1/rate, and the cell
    fraction of the spectral ball is the mean of min(t * rate, 1)^d over
    the profiled directions.  Above the Nyquist-type threshold the ball
    sits inside the cell and the estimator is identically zero.
    """
    rate = float(rate_over_bandwidth)
    if rate <= 0:
        raise ValueError("rate must be positive")
    d = profile.lattice.dim
    if rate >= 1.0 / profile.lattice.packing_radius:
        return 0.0, 0.0
    x = np.minimum(profile.t_values * rate, 1.0) ** d
    lo = float(x.min())
    if lo == float(x.max()):
        # all directions hit the same boundary (e.g. d = 1): no sampling noise
        return 1.0 - lo, 0.0
    n = len(x)
    return float(1.0 - x.mean()), float(x.std(ddof=1) / np.sqrt(n))


def sweep(profile: RadialProfile, rate_grid) -> VarianceCurve:
    """Evaluate variance and bound over a rate grid, reusing one profile."""
    rates = np.asarray(rate_grid, dtype=np.float64)
    if rates.ndim != 1 or len(rates) < 1:
        raise ValueError("rate grid must be a 1-d array")
    if np.any(rates <= 0) or np.any(np.diff(rates) <= 0):
        raise ValueError("rate grid must be positive and strictly increasing")
    d = profile.lattice.dim
    se2 = np.empty(len(rates))
    err = np.empty(len(rates))
    for i, r in enumerate(rates):
        se2[i], err[i] = error_variance(profile, r)
    lb = np.array([lower_bound(d, r) for r in rates])
    return VarianceCurve(
        lattice_name=profile.lattice.name,
        dim=d,
        rates=rates.copy(),
        sigma_e2=se2,
        sigma_lb2=lb,
        gap=se2 - lb,
        stderr=err,
    )


def thresholds(spec: LatticeSpec) -> ThresholdPair:
    """Threshold rates of a sampling lattice (single facade with sweeps)."""
    return normalized_thresholds(spec)


def crossover(curve_a: VarianceCurve, curve_b: VarianceCurve) -> float:
    """Rate where the two error-variance curves swap order.

    Linear interpolation of the unique sign change of the difference;
    raises when there is no change or more than one.
    """
    if not np.array_equal(curve_a.rates, curve_b.rates):
        raise ValueError("curves must share one rate grid")
    rates = curve_a.rates
    diff = curve_a.sigma_e2 - curve_b.sigma_e2
    nz = np.nonzero(diff != 0.0)[0]
    candidates = []
    for k in range(len(nz) - 1):
        i, j = nz[k], nz[k + 1]
        if np.sign(diff[i]) != np.sign(diff[j]):
            r = rates[i] + (rates[j] - rates[i]) * diff[i] / (diff[i] - diff[j])
            candidates.append(float(r))
    if not candidates:
        raise NoCrossoverError("curves do not cross on the grid interior")
    if len(candidates) > 1:
        raise MultipleCrossoverError(candidates)
    return candidates[0]
