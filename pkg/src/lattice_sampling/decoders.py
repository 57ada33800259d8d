"""Exact nearest-lattice-point algorithms for the catalog lattices.

Each family has a closed-form decoder (coordinate rounding for Z^n, parity
repair for D_n, sorted residue correction for A_n, coset search for A_n*
and E_8), applied in the family's native coordinate system.  A boxed
exhaustive search doubles as an independent testing oracle.

All decoders are vectorized over batches of query points; the batch entry
points are what the Voronoi profiling hot loop uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .catalog import LatticeSpec

#: Relative tolerance deciding when two candidate points tie for nearest.
TIE_REL_TOL = 1e-9


class BoxTooSmallError(RuntimeError):
    """The boxed exhaustive search hit its boundary; enlarge radius_bound."""


@dataclass(frozen=True)
class DecodeResult:
    point: np.ndarray
    coeffs: np.ndarray
    dist2: float
    tie: bool


# ---------------------------------------------------------------------------
# native-coordinate decoders


def _decode_integer(Y: np.ndarray) -> np.ndarray:
    return np.rint(Y)


def _decode_d_even(Y: np.ndarray) -> np.ndarray:
    """Nearest point of D_n = {v in Z^n : sum(v) even}.

    Round each coordinate; when the parity comes out odd, re-round the
    coordinate that was farthest from an integer the other way.
    """
    F = np.rint(Y)
    wrong = np.nonzero(F.sum(axis=1) % 2.0 != 0.0)[0]
    if wrong.size:
        delta = Y[wrong] - F[wrong]
        k = np.abs(delta).argmax(axis=1)
        rows = np.arange(wrong.size)
        step = np.where(delta[rows, k] >= 0.0, 1.0, -1.0)
        F[wrong, k] += step
    return F


def _decode_half_coset_pair(Y: np.ndarray, base) -> np.ndarray:
    """Best of base(Y) and base(Y - 1/2) + 1/2 by squared distance."""
    A = base(Y)
    B = base(Y - 0.5) + 0.5
    da = ((Y - A) ** 2).sum(axis=1)
    db = ((Y - B) ** 2).sum(axis=1)
    take_b = db < da
    A[take_b] = B[take_b]
    return A


def _decode_d4_star(Y: np.ndarray) -> np.ndarray:
    return _decode_half_coset_pair(Y, _decode_integer)


def _decode_e8(Y: np.ndarray) -> np.ndarray:
    return _decode_half_coset_pair(Y, _decode_d_even)


def _decode_a_zero_sum(Y: np.ndarray) -> np.ndarray:
    """Nearest point of A_n = {v in Z^{n+1} : sum(v) = 0}.

    Round, then fix the rounded sum by stepping the coordinates whose
    rounding error makes the step cheapest (sorted residues).
    """
    F = np.rint(Y)
    total = F.sum(axis=1)
    rows = np.nonzero(total != 0.0)[0]
    if rows.size == 0:
        return F
    m = Y.shape[1]
    deficit = total[rows].astype(np.int64)
    delta = Y[rows] - F[rows]
    order = np.argsort(delta, axis=1, kind="stable")
    ranks = np.empty_like(order)
    np.put_along_axis(
        ranks, order, np.broadcast_to(np.arange(m), order.shape), axis=1
    )
    pos = deficit > 0
    sub = pos[:, None] & (ranks < deficit[:, None])
    add = (~pos[:, None]) & (ranks >= m + deficit[:, None])
    F[rows] += add.astype(np.float64) - sub.astype(np.float64)
    return F


@lru_cache(maxsize=None)
def _glue_vectors(n: int) -> np.ndarray:
    """Coset representatives [i] of A_n* over A_n in the zero-sum frame."""
    m = n + 1
    G = np.zeros((m, m))
    for i in range(m):
        G[i, : m - i] = i / m
        G[i, m - i :] = i / m - 1.0
    G.setflags(write=False)
    return G

def _decode_a_star(Y: np.ndarray) -> np.ndarray:
    """Nearest point of A_n*: best A_n decode over the n+1 glue cosets."""
    n = Y.shape[1] - 1
    glue = _glue_vectors(n)
    best = _decode_a_zero_sum(Y)
    best_d = ((Y - best) ** 2).sum(axis=1)
    for i in range(1, n + 1):
        K = _decode_a_zero_sum(Y - glue[i]) + glue[i]
        d = ((Y - K) ** 2).sum(axis=1)
        better = d < best_d
        best[better] = K[better]
        best_d[better] = d[better]
    return best


_FAMILY_DECODERS = {
    "integer": _decode_integer,
    "d_even_sum": _decode_d_even,
    "d4_star": _decode_d4_star,
    "e8": _decode_e8,
    "a_zero_sum": _decode_a_zero_sum,
    "a_star_zero_sum": _decode_a_star,
}


# ---------------------------------------------------------------------------
# ambient <-> native and the public decode surface


def _to_native(spec: LatticeSpec, X: np.ndarray) -> np.ndarray:
    Y = X @ spec.embed_map if spec.embed_map is not None else X
    if spec.embed_scale != 1.0:
        Y = Y / spec.embed_scale
    return Y


def _from_native(spec: LatticeSpec, K: np.ndarray) -> np.ndarray:
    P = K @ spec.embed_map.T if spec.embed_map is not None else K
    if spec.embed_scale != 1.0:
        P = P * spec.embed_scale
    return P


def decode_batch(spec: LatticeSpec, X: np.ndarray) -> np.ndarray:
    """Nearest lattice points for a batch of queries, shape (m, dim)."""
    Y = _to_native(spec, np.asarray(X, dtype=np.float64))
    K = _FAMILY_DECODERS[spec.family](Y)
    return _from_native(spec, K)


def in_voronoi_batch(spec: LatticeSpec, X: np.ndarray) -> np.ndarray:
    """Membership of each query in the Voronoi cell of the origin.

    Boundary ties count as inside (measure-zero set; keeps the radial
    bisection well defined).
    """
    X = np.asarray(X, dtype=np.float64)
    P = decode_batch(spec, X)
    d2 = ((X - P) ** 2).sum(axis=1)
    o2 = (X**2).sum(axis=1)
    return o2 - d2 <= TIE_REL_TOL * np.maximum(1.0, d2)


def in_voronoi(spec: LatticeSpec, x: np.ndarray) -> bool:
    return bool(in_voronoi_batch(spec, np.asarray(x, dtype=np.float64)[None, :])[0])


def _coeffs_of(spec: LatticeSpec, P: np.ndarray) -> np.ndarray:
    c = np.linalg.solve(spec.generator.T, P.T).T
    return np.rint(c).astype(np.int64)


def nearest_point(spec: LatticeSpec, x: np.ndarray) -> DecodeResult:
    """Exact nearest lattice point of a single query vector."""
    x = np.asarray(x, dtype=np.float64)
    y = _to_native(spec, x[None, :])
    k = _FAMILY_DECODERS[spec.family](y)
    p = _from_native(spec, k)[0]
    d2 = float(((x - p) ** 2).sum())
    # second-best search over a shell wide enough to contain any near-tie
    shell = _neighbor_shell(spec)
    diff = y[0] - (k[0] + shell)
    second_nat = float((diff**2).sum(axis=1).min())
    d2_second = second_nat * spec.embed_scale**2
    tie = d2_second - d2 <= TIE_REL_TOL * max(1.0, d2)
    return DecodeResult(point=p, coeffs=_coeffs_of(spec, p[None, :])[0], dist2=d2, tie=tie)


# ---------------------------------------------------------------------------
# neighbor shells (all lattice vectors with norm <= 2 R, native frame)


def _int_box(ranges: list[np.ndarray]) -> np.ndarray:
    grids = np.meshgrid(*ranges, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1).astype(np.float64)


def _ball_points(offset: np.ndarray, r: float, keep) -> np.ndarray:
    """Integer-plus-offset vectors v with ||v|| <= r and keep(v) true."""
    rng = [np.arange(math.ceil(-r - o), math.floor(r - o) + 1) for o in offset]
    V = _int_box(rng) + offset
    V = V[(V**2).sum(axis=1) <= r * r + 1e-9]
    if keep is not None:
        V = V[keep(V)]
    return V


def _shell_for(family: str, m: int, r: float) -> np.ndarray:
    zero = np.zeros(m)
    even_sum = lambda W: np.rint(W.sum(axis=1)) % 2 == 0
    if family == "integer":
        V = _ball_points(zero, r, None)
    elif family == "d_even_sum":
        V = _ball_points(zero, r, even_sum)
    elif family == "d4_star":
        V = np.vstack(
            [
                _ball_points(zero, r, None),
                _ball_points(np.full(m, 0.5), r, None),
            ]
        )
    elif family == "e8":
        V = np.vstack(
            [
                _ball_points(zero, r, even_sum),
                _ball_points(
                    np.full(m, 0.5), r, lambda W: np.rint((W - 0.5).sum(axis=1)) % 2 == 0
                ),
            ]
        )
    elif family == "a_zero_sum":
        V = _ball_points(zero, r, lambda W: np.rint(W.sum(axis=1)) == 0)
    elif family == "a_star_zero_sum":
        glue = _glue_vectors(m - 1)
        parts = [
            _ball_points(g, r, lambda W: np.abs(W.sum(axis=1)) < 1e-9)
            for g in np.asarray(glue)
        ]
        V = np.vstack(parts)
    else:
        raise ValueError(f"unknown family {family!r}")
    V = V[(V**2).sum(axis=1) > 1e-12]
    V.setflags(write=False)
    return V


_SHELL_CACHE: dict[tuple, np.ndarray] = {}


def _neighbor_shell(spec: LatticeSpec) -> np.ndarray:
    """Native lattice vectors with norm <= 2 * covering radius.

    Any lattice point that can tie with the decoded nearest point differs
    from it by a vector in this set, so the tie flag computed over it is
    exact.  The set also contains every Voronoi-relevant vector.
    """
    r_native = 2.0 * spec.covering_radius / spec.embed_scale
    key = (spec.family, spec.n_native, round(r_native, 9))
    shell = _SHELL_CACHE.get(key)
    if shell is None:
        shell = _shell_for(spec.family, spec.n_native, r_native * (1.0 + 1e-9) + 1e-9)
        _SHELL_CACHE[key] = shell
    return shell


# ---------------------------------------------------------------------------
# boxed exhaustive search (testing oracle)


_BOX_CACHE: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def _box_candidates(spec: LatticeSpec, bound: int) -> tuple[np.ndarray, np.ndarray]:
    """All coefficient vectors in [-bound, bound]^d, sorted by point norm."""
    key = (hash(spec.generator.tobytes()), spec.dim, bound)
    cached = _BOX_CACHE.get(key)
    if cached is not None:
        return cached
    d = spec.dim
    rng = np.arange(-bound, bound + 1, dtype=np.int8)
    coeffs = _int_box([rng] * d).astype(np.int8)
    norms = np.empty(len(coeffs))
    step = 1 << 18
    for a in range(0, len(coeffs), step):
        pts = coeffs[a : a + step].astype(np.float64) @ spec.generator
        norms[a : a + step] = np.sqrt((pts**2).sum(axis=1))
    order = np.argsort(norms, kind="stable")
    out = (coeffs[order], norms[order])
    _BOX_CACHE[key] = out
    return out


def _top2_over_candidates(X: np.ndarray, C: np.ndarray, G: np.ndarray):
    """Running (best, argbest, second) squared distances over candidate chunks."""
    nq = len(X)
    best = np.full(nq, np.inf)
    second = np.full(nq, np.inf)
    arg = np.zeros(nq, dtype=np.int64)
    o2 = (X**2).sum(axis=1)
    step = max(1, (1 << 22) // max(1, nq))
    for a in range(0, len(C), step):
        P = C[a : a + step].astype(np.float64) @ G
        pn2 = (P**2).sum(axis=1)
        D = o2[:, None] - 2.0 * (X @ P.T) + pn2[None, :]
        a1 = D.argmin(axis=1)
        rows = np.arange(nq)
        m1 = D[rows, a1]
        D[rows, a1] = np.inf
        m2 = D.min(axis=1) if D.shape[1] > 1 else np.full(nq, np.inf)
        new_second = np.minimum(np.minimum(second, m2), np.maximum(best, m1))
        take = m1 < best
        arg = np.where(take, a + a1, arg)
        new_best = np.minimum(best, m1)
        best, second = new_best, new_second
    return best, arg, second


def _brute_force_batch(spec: LatticeSpec, X: np.ndarray, radius_bound: int):
    """Boxed exhaustive nearest points for a batch of queries.

    Only candidates that can provably beat the origin candidate are
    scanned (the box minimizer p obeys ||p|| <= 2 ||x||), so the result is
    identical to the full box scan.
    """
    if radius_bound < 2:
        raise ValueError("radius_bound must be >= 2")
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    coeffs, norms = _box_candidates(spec, radius_bound)
    # the box minimizer p for query x satisfies ||p|| <= 2 ||x|| (the origin
    # is always a candidate), so group queries by norm and scan only the
    # matching prefix of the norm-sorted candidate list
    qnorm = np.sqrt((X**2).sum(axis=1))
    order = np.argsort(qnorm, kind="stable")
    best = np.empty(len(X))
    arg = np.empty(len(X), dtype=np.int64)
    second = np.empty(len(X))
    group = 1024
    for a in range(0, len(order), group):
        idx = order[a : a + group]
        r_need = 2.0 * float(qnorm[idx].max()) + 1e-3
        keep = int(np.searchsorted(norms, r_need, side="right"))
        b, g, s2 = _top2_over_candidates(X[idx], coeffs[:keep], spec.generator)
        best[idx], arg[idx], second[idx] = b, g, s2
    cbest = coeffs[arg].astype(np.int64)
    if np.any(np.abs(cbest) >= radius_bound):
        raise BoxTooSmallError(
            f"nearest point of {spec.name} hit the coefficient box boundary "
            f"(radius_bound={radius_bound})"
        )
    points = cbest.astype(np.float64) @ spec.generator
    # recompute the winning distances directly; the scan's expanded form
    # loses a few ulp to cancellation
    dist2 = ((X - points) ** 2).sum(axis=1)
    tie = (second - dist2) <= TIE_REL_TOL * np.maximum(1.0, dist2)
    return points, cbest, dist2, tie


def brute_force_nearest(spec: LatticeSpec, x: np.ndarray, radius_bound: int) -> DecodeResult:
    """Exhaustive minimization over coefficients in [-radius_bound, radius_bound]^d.

    Exact within the box; raises BoxTooSmallError when the minimizer lands
    on the box boundary, signalling the caller to enlarge the box or reduce
    the query modulo the lattice first.
    """
    points, cbest, dist2, tie = _brute_force_batch(spec, np.asarray(x, dtype=np.float64)[None, :], radius_bound)
    return DecodeResult(point=points[0], coeffs=cbest[0], dist2=float(dist2[0]), tie=bool(tie[0]))


def shortest_vector_norm(spec: LatticeSpec, radius_bound: int = 3) -> float:
    """Norm of the shortest nonzero vector, by exhaustive box search."""
    _, norms = _box_candidates(spec, radius_bound)
    nonzero = norms[norms > 1e-12]
    return float(nonzero.min())


def reduce_to_fundamental_cell(spec: LatticeSpec, X: np.ndarray) -> np.ndarray:
    """Shift queries by lattice points (rounded coefficients) to near the origin."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    c = np.rint(np.linalg.solve(spec.generator.T, X.T).T)
    return X - c @ spec.generator
