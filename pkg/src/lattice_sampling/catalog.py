"""Catalog of sampling lattices and their frequency-domain duals.

Each entry carries a square generator matrix (rows are basis vectors), the
cell volume, and closed-form packing/covering radii.  The root-lattice
families A_n and A_n* are realized in their native zero-sum embedding in
R^{n+1} and mapped to ambient R^n through an orthonormal hyperplane basis;
the map is stored on the spec so the decoders can work in the embedding.

Duals here are unit duals (generator inverse-transpose); the 2*pi factor of
the frequency-domain convention is absorbed into the normalized sampling
rate, so every reported quantity depends only on rate/bandwidth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np


class UnknownLatticeError(KeyError):
    """Requested name is not in the catalog."""


class SingularGeneratorError(ValueError):
    """Generator matrix is not invertible."""


class ThresholdPair(NamedTuple):
    """The two normalized rates bracketing where the error variance
    deviates from its universal lower bound."""

    low: float
    high: float


@dataclass(frozen=True)
class LatticeSpec:
    """A lattice with generator, geometric constants and decoder metadata.

    Immutable after construction and safe to share across workers.

    ``family`` selects the exact nearest-point algorithm.  For the zero-sum
    families, ``embed_map`` is a dim x (dim+1) semi-orthogonal matrix U and
    points map to the embedding as y = (x @ U) / embed_scale; for the other
    families the embedding is the ambient space itself (embed_map is None
    unless the spec was rotated).
    """

    name: str
    family: str
    dim: int
    generator: np.ndarray
    cell_volume: float
    packing_radius: float
    covering_radius: float
    embed_scale: float
    embed_map: np.ndarray | None
    dual_name: str
    scale: float = 1.0
    rotation: np.ndarray | None = None

    def __post_init__(self):
        self.generator.setflags(write=False)
        if self.embed_map is not None:
            self.embed_map.setflags(write=False)
        if self.rotation is not None:
            self.rotation.setflags(write=False)

    @property
    def n_native(self) -> int:
        """Width of the decoder's native coordinate system."""
        if self.embed_map is not None:
            return self.embed_map.shape[1]
        return self.dim


def _helmert(n: int) -> np.ndarray:
    """Orthonormal basis (n rows) of the zero-sum hyperplane in R^{n+1}."""
    H = np.zeros((n, n + 1))
    for k in range(1, n + 1):
        H[k - 1, :k] = 1.0
        H[k - 1, k] = -float(k)
        H[k - 1] /= math.sqrt(k * (k + 1))
    return H


def _chain_basis(n: int) -> np.ndarray:
    """Rows e_i - e_{i+1}: the standard basis of A_n in R^{n+1}."""
    E = np.zeros((n, n + 1))
    for i in range(n):
        E[i, i] = 1.0
        E[i, i + 1] = -1.0
    return E


# Basis of short vectors for E8 in the even coordinate system.  Rows are
# minimal vectors and so is the dual basis, which keeps nearest-point
# coefficients small for queries near the origin.
_E8_GENERATOR = np.array(
    [
        [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0],
        [0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        [0.5, -0.5, 0.5, 0.5, 0.5, -0.5, 0.5, 0.5],
        [0.5, 0.5, 0.5, 0.5, 0.5, -0.5, -0.5, 0.5],
        [0.5, -0.5, -0.5, 0.5, 0.5, 0.5, 0.5, 0.5],
        [0.5, -0.5, -0.5, -0.5, -0.5, 0.5, 0.5, 0.5],
    ]
)

_D4_GENERATOR = np.array(
    [
        [1.0, 1.0, 0.0, 0.0],
        [1.0, -1.0, 0.0, 0.0],
        [0.0, 1.0, -1.0, 0.0],
        [0.0, 0.0, 1.0, -1.0],
    ]
)


def _an_covering_radius(n: int) -> float:
    # Deep hole of A_n sits at the glue point [a], a = floor((n+1)/2).
    a = (n + 1) // 2
    b = (n + 1) - a
    return math.sqrt(a * b / (n + 1))


def _an_star_covering_radius(n: int) -> float:
    # Vertices of the permutohedron, all equivalent.
    return math.sqrt(n * (n + 2) / (12.0 * (n + 1)))


def _make_zn(d: int) -> LatticeSpec:
    return LatticeSpec(
        name=f"Z{d}",
        family="integer",
        dim=d,
        generator=np.eye(d),
        cell_volume=1.0,
        packing_radius=0.5,
        covering_radius=math.sqrt(d) / 2.0,
        embed_scale=1.0,
        embed_map=None,
        dual_name=f"Z{d}",
    )


def _make_an(n: int) -> LatticeSpec:
    U = _helmert(n)
    if n == 2:
        # Conventional unit-edge hexagonal generator; same lattice as the
        # zero-sum embedding scaled by 1/sqrt(2).
        G = np.array([[1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])
        s = 1.0 / math.sqrt(2.0)
        E = np.array([[1.0, -1.0, 0.0], [1.0, 0.0, -1.0]])
        U = np.linalg.inv(G) @ E * s
    else:
        s = 1.0
        G = _chain_basis(n) @ U.T
    return LatticeSpec(
        name=f"A{n}",
        family="a_zero_sum",
        dim=n,
        generator=G,
        cell_volume=math.sqrt(n + 1) * s**n,
        packing_radius=s * math.sqrt(2.0) / 2.0,
        covering_radius=s * _an_covering_radius(n),
        embed_scale=s,
        embed_map=U,
        dual_name=f"A{n}_dual",
    )


def _make_an_dual(n: int, primal: LatticeSpec) -> LatticeSpec:
    # Exact point-set dual of the catalog A_n entry: generator is the
    # inverse-transpose, giving reciprocal cell volume by construction.
    G = np.linalg.inv(primal.generator).T
    s = 1.0 / primal.embed_scale
    return LatticeSpec(
        name=f"A{n}_dual",
        family="a_star_zero_sum",
        dim=n,
        generator=G,
        cell_volume=1.0 / primal.cell_volume,
        packing_radius=s * 0.5 * math.sqrt(n / (n + 1)),
        covering_radius=s * _an_star_covering_radius(n),
        embed_scale=s,
        embed_map=primal.embed_map.copy(),
        dual_name=f"A{n}",
    )


def _build_catalog() -> dict[str, LatticeSpec]:
    cat: dict[str, LatticeSpec] = {}
    for d in (1, 2, 3, 4, 8):
        cat[f"Z{d}"] = _make_zn(d)
    for n in (2, 3, 4, 8):
        an = _make_an(n)
        cat[f"A{n}"] = an
        cat[f"A{n}_dual"] = _make_an_dual(n, an)
    cat["D4"] = LatticeSpec(
        name="D4",
        family="d_even_sum",
        dim=4,
        generator=_D4_GENERATOR,
        cell_volume=2.0,
        packing_radius=math.sqrt(2.0) / 2.0,
        covering_radius=1.0,
        embed_scale=1.0,
        embed_map=None,
        dual_name="D4_dual",
    )
    cat["D4_dual"] = LatticeSpec(
        name="D4_dual",
        family="d4_star",
        dim=4,
        generator=np.linalg.inv(_D4_GENERATOR).T,
        cell_volume=0.5,
        packing_radius=0.5,
        covering_radius=math.sqrt(2.0) / 2.0,
        embed_scale=1.0,
        embed_map=None,
        dual_name="D4",
    )
    cat["E8"] = LatticeSpec(
        name="E8",
        family="e8",
        dim=8,
        generator=_E8_GENERATOR,
        cell_volume=1.0,
        packing_radius=math.sqrt(2.0) / 2.0,
        covering_radius=1.0,
        embed_scale=1.0,
        embed_map=None,
        dual_name="E8",
    )
    return cat


_CATALOG = _build_catalog()

#: All catalog names, duals included.
CATALOG_NAMES = tuple(sorted(_CATALOG))

#: The twelve sampling lattices of the threshold table, in table order.
TABLE1_NAMES = (
    "Z1",
    "Z2",
    "A2",
    "Z3",
    "A3_dual",
    "A3",
    "Z4",
    "D4",
    "A4",
    "Z8",
    "E8",
    "A8",
)


def get_lattice(name: str) -> LatticeSpec:
    """Look up a catalog lattice by name."""
    try:
        return _CATALOG[name]
    except KeyError:
        raise UnknownLatticeError(
            f"unknown lattice {name!r}; available: {', '.join(CATALOG_NAMES)}"
        ) from None


def dual_lattice(spec: LatticeSpec) -> LatticeSpec:
    """Unit dual of a catalog (possibly scaled/rotated) lattice.

    The returned generator G' satisfies G' @ G.T == I; the geometric
    constants come from the dual's closed forms, rescaled to match.
    """
    if abs(np.linalg.det(spec.generator)) < 1e-300:
        raise SingularGeneratorError(f"generator of {spec.name} is singular")
    base = get_lattice(spec.dual_name)
    k = 1.0 / spec.scale
    dual = replace(
        base,
        generator=np.linalg.inv(spec.generator).T,
        cell_volume=1.0 / spec.cell_volume,
        packing_radius=base.packing_radius * k,
        covering_radius=base.covering_radius * k,
        embed_scale=base.embed_scale * k,
        scale=k,
        rotation=None if spec.rotation is None else spec.rotation.copy(),
    )
    if spec.rotation is not None:
        dual = replace(dual, embed_map=_rotate_embed(base.embed_map, base.dim, spec.rotation))
    return dual


def _rotate_embed(embed: np.ndarray | None, dim: int, Q: np.ndarray) -> np.ndarray:
    if embed is None:
        return Q.T.copy()
    return Q.T @ embed


def scaled(spec: LatticeSpec, k: float) -> LatticeSpec:
    """The same lattice with all lengths multiplied by k > 0."""
    if k <= 0:
        raise ValueError("scale factor must be positive")
    return replace(
        spec,
        generator=spec.generator * k,
        cell_volume=spec.cell_volume * k**spec.dim,
        packing_radius=spec.packing_radius * k,
        covering_radius=spec.covering_radius * k,
        embed_scale=spec.embed_scale * k,
        scale=spec.scale * k,
    )


def rotated(spec: LatticeSpec, Q: np.ndarray) -> LatticeSpec:
    """Apply an orthogonal matrix Q to the lattice (rows of the generator)."""
    if not np.allclose(Q @ Q.T, np.eye(spec.dim), atol=1e-12):
        raise ValueError("Q must be orthogonal")
    rot = Q if spec.rotation is None else spec.rotation @ Q
    return replace(
        spec,
        generator=spec.generator @ Q,
        embed_map=_rotate_embed(spec.embed_map, spec.dim, Q),
        rotation=rot,
    )


def unit_dual(spec: LatticeSpec) -> LatticeSpec:
    """Dual lattice rescaled to unit cell volume (the profiling frame)."""
    dual = dual_lattice(spec)
    return scaled(dual, dual.cell_volume ** (-1.0 / dual.dim))


def normalized_thresholds(spec: LatticeSpec) -> ThresholdPair:
    """The two scale-invariant threshold rates of a sampling lattice.

    Both are read off the unit-volume dual: the low threshold is the
    reciprocal covering radius (below it the lower bound is exact again),
    the high one the reciprocal packing radius (the Nyquist-type rate).
    """
    du = unit_dual(spec)
    return ThresholdPair(1.0 / du.covering_radius, 1.0 / du.packing_radius)
