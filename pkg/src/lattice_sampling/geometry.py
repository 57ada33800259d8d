"""Spherical geometry and the radial Voronoi-boundary profiler.

The profiler draws uniform directions on the unit sphere and bisects the
exact cell-membership test along each ray.  Because the Voronoi cell is
convex and contains the origin, membership along a ray changes exactly
once, at the radial boundary t(u); one profile of t values then yields the
ball/cell overlap volume for every bandwidth at once.
"""

from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .catalog import LatticeSpec
from .decoders import in_voronoi_batch

#: Default bisection tolerance (absolute, unit-cell-volume scale).
DEFAULT_BISECT_TOL = 1e-10

_PROBE_EPS = 1e-6
_CHUNK = 1 << 16


class BracketViolationError(RuntimeError):
    """Membership at the bracket ends contradicts the stored radii."""


def _unit_ball_volume(d: int) -> float:
    """Volume of the unit ball, pi^{d/2} / Gamma(d/2 + 1), kept exact in
    rational-times-power-of-pi form to avoid gamma round-off."""
    if d % 2 == 0:
        k = d // 2
        return math.pi**k / math.factorial(k)
    dfact = 1
    for i in range(d, 0, -2):
        dfact *= i
    return math.pi ** ((d - 1) // 2) * 2.0 ** ((d + 1) // 2) / dfact


def ball_volume(d: int, radius: float) -> float:
    """Volume of the d-dimensional ball of the given radius."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if radius < 0:
        raise ValueError("radius must be >= 0")
    return _unit_ball_volume(d) * radius**d


@dataclass(frozen=True)
class IsotropicSpectrum:
    """Flat spectral density on a ball: amplitude inside radius ``bandwidth``,
    zero outside.  The default amplitude normalizes the process variance
    (for the given dimension) to one."""

    bandwidth: float
    amplitude: float

    @classmethod
    def unit_variance(cls, dim: int, bandwidth: float) -> "IsotropicSpectrum":
        amp = (2.0 * math.pi) ** dim / ball_volume(dim, bandwidth)
        return cls(bandwidth=bandwidth, amplitude=amp)

    def process_variance(self, dim: int) -> float:
        return self.amplitude * ball_volume(dim, self.bandwidth) / (2.0 * math.pi) ** dim


def sample_directions(dim: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n uniform points on the unit sphere, via normalized Gaussians."""
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    V = rng.standard_normal((n, dim))
    norms = np.sqrt((V**2).sum(axis=1))
    while True:
        bad = np.nonzero(norms < 1e-12)[0]
        if bad.size == 0:
            break
        V[bad] = rng.standard_normal((bad.size, dim))
        norms[bad] = np.sqrt((V[bad] ** 2).sum(axis=1))
    return V / norms[:, None]


def sample_direction(dim: int, rng: np.random.Generator) -> np.ndarray:
    return sample_directions(dim, 1, rng)[0]


def profile_directions(dim: int, n: int, seed: int) -> np.ndarray:
    """The deterministic direction sequence of a profile.

    Drawn from a counter-based generator keyed by the seed, in one pass, so
    the sequence does not depend on how the bisection work is later split
    across workers.
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    return sample_directions(dim, n, rng)


@dataclass(frozen=True)
class RadialProfile:
    """Monte-Carlo sample of a Voronoi cell's radial boundary function."""

    lattice: LatticeSpec
    t_values: np.ndarray
    seed: int
    tolerance: float

    def __post_init__(self):
        self.t_values.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.t_values)


def _bisect_chunk(spec: LatticeSpec, U: np.ndarray, tol: float, iters: int) -> np.ndarray:
    rho = spec.packing_radius
    R = spec.covering_radius
    inner = in_voronoi_batch(spec, (rho * (1.0 - _PROBE_EPS)) * U)
    if not inner.all():
        raise BracketViolationError(
            f"{spec.name}: point inside the packing radius decoded outside the cell"
        )
    outer = in_voronoi_batch(spec, (R * (1.0 + _PROBE_EPS)) * U)
    if outer.any():
        raise BracketViolationError(
            f"{spec.name}: point beyond the covering radius decoded inside the cell"
        )
    at_R = in_voronoi_batch(spec, R * U)
    lo = np.full(len(U), rho)
    hi = np.full(len(U), R)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        member = in_voronoi_batch(spec, mid[:, None] * U)
        lo = np.where(member, mid, lo)
        hi = np.where(member, hi, mid)
    t = 0.5 * (lo + hi)
    t[at_R] = R
    return t


def radial_boundary(spec: LatticeSpec, u: np.ndarray, tol: float = DEFAULT_BISECT_TOL) -> float:
    """Distance from the origin to the Voronoi boundary along unit u."""
    u = np.asarray(u, dtype=np.float64)
    if abs(math.sqrt(float((u**2).sum())) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    iters = _bisect_iterations(spec, tol)
    return float(_bisect_chunk(spec, u[None, :], tol, iters)[0])


def _bisect_iterations(spec: LatticeSpec, tol: float) -> int:
    width = spec.covering_radius - spec.packing_radius
    if width <= tol:
        return 0
    return max(0, math.ceil(math.log2(width / tol)))


def build_profile(
    spec: LatticeSpec,
    n_directions: int,
    seed: int,
    tol: float = DEFAULT_BISECT_TOL,
    threads: int | None = None,
) -> RadialProfile:
    """Bisect the radial boundary along n random directions.

    The result is a deterministic function of (seed, n_directions, tol);
    worker count only affects wall time.  The spec must be a unit-cell-
    volume frequency lattice.
    """
    if n_directions < 1:
        raise ValueError("need at least one direction")
    if abs(spec.cell_volume - 1.0) > 1e-9:
        raise ValueError("profiles are built on unit-cell-volume lattices")
    U = profile_directions(spec.dim, n_directions, seed)
    iters = _bisect_iterations(spec, tol)
    t = np.empty(n_directions)
    spans = [(a, min(a + _CHUNK, n_directions)) for a in range(0, n_directions, _CHUNK)]
    if threads is not None and threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                (a, b, pool.submit(_bisect_chunk, spec, U[a:b], tol, iters))
                for a, b in spans
            ]
            for a, b, fut in futures:
                t[a:b] = fut.result()
    else:
        for a, b in spans:
            t[a:b] = _bisect_chunk(spec, U[a:b], tol, iters)
    return RadialProfile(lattice=spec, t_values=t, seed=seed, tolerance=tol)


# ---------------------------------------------------------------------------
# disk cache


def profile_cache_path(cache_dir, lattice_name: str, n: int, seed: int, tol: float) -> Path:
    fname = f"{lattice_name}_n{n}_seed{seed}_tol{tol:.3e}.profile"
    return Path(cache_dir) / fname


def save_profile(profile: RadialProfile, path) -> None:
    """Text artifact: one metadata header line, one t value per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        f"# lattice={profile.lattice.name} dim={profile.lattice.dim} "
        f"n={profile.n} seed={profile.seed} tol={profile.tolerance!r}"
    ]
    lines.extend(f"{t:.17g}" for t in profile.t_values)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text("\n".join(lines) + "\n")
    tmp.replace(path)


_HEADER_RE = re.compile(
    r"# lattice=(\S+) dim=(\d+) n=(\d+) seed=(-?\d+) tol=(\S+)$"
)


def load_profile(path, spec: LatticeSpec) -> RadialProfile:
    """Read a cached profile back; 17 significant digits round-trip exactly."""
    text = Path(path).read_text().splitlines()
    m = _HEADER_RE.match(text[0])
    if m is None:
        raise ValueError(f"not a profile file: {path}")
    name, dim, n, seed, tol = m.groups()
    if name != spec.name or int(dim) != spec.dim:
        raise ValueError(
            f"profile lattice mismatch: file has {name} (dim {dim}), "
            f"expected {spec.name} (dim {spec.dim})"
        )
    t = np.array([float(v) for v in text[1 : 1 + int(n)]])
    return RadialProfile(lattice=spec, t_values=t, seed=int(seed), tolerance=float(tol))


def cached_build_profile(
    spec: LatticeSpec,
    cache_key_name: str,
    n_directions: int,
    seed: int,
    tol: float = DEFAULT_BISECT_TOL,
    cache_dir=None,
    threads: int | None = None,
) -> RadialProfile:
    """build_profile with an optional text-file cache keyed by
    (lattice name, n, seed, tol)."""
    if cache_dir is None:
        return build_profile(spec, n_directions, seed, tol, threads)
    path = profile_cache_path(cache_dir, cache_key_name, n_directions, seed, tol)
    if path.exists():
        prof = load_profile(path, spec)
        if prof.n == n_directions and prof.seed == seed and prof.tolerance == tol:
            return prof
    prof = build_profile(spec, n_directions, seed, tol, threads)
    save_profile(prof, path)
    return prof
