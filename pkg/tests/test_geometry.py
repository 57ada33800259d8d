import math
from dataclasses import replace

import numpy as np
import pytest

from lattice_sampling import (
    CATALOG_NAMES,
    BracketViolationError,
    IsotropicSpectrum,
    ball_volume,
    build_profile,
    get_lattice,
    load_profile,
    profile_directions,
    radial_boundary,
    rotated,
    sample_direction,
    sample_directions,
    save_profile,
    unit_dual,
)
from lattice_sampling.decoders import _neighbor_shell
from lattice_sampling.geometry import profile_cache_path

from conftest import TEST_SEED


# ---------------------------------------------------------------------------
# ball volume and spectrum


def test_ball_volume_interval():
    for w in (0.25, 1.0, 3.5):
        assert ball_volume(1, w) == 2.0 * w


def test_ball_volume_disk():
    assert abs(ball_volume(2, 1.0) - math.pi) < 1e-15


def test_ball_volume_dim8():
    assert abs(ball_volume(8, 1.0) - math.pi**4 / 24.0) < 1e-15


def test_ball_volume_validation():
    with pytest.raises(ValueError):
        ball_volume(0, 1.0)
    with pytest.raises(ValueError):
        ball_volume(3, -1.0)


@pytest.mark.parametrize("dim", [1, 2, 3, 4, 8])
def test_spectrum_unit_variance(dim):
    spec = IsotropicSpectrum.unit_variance(dim, bandwidth=1.7)
    assert abs(spec.process_variance(dim) - 1.0) < 1e-12


# ---------------------------------------------------------------------------
# direction sampling


def test_directions_one_dimensional():
    rng = np.random.default_rng(TEST_SEED)
    U = sample_directions(1, 10**4, rng)
    assert set(np.unique(U)) == {-1.0, 1.0}
    frac = (U > 0).mean()
    assert abs(frac - 0.5) < 4 / math.sqrt(10**4)


def test_directions_unit_norm_and_mean():
    rng = np.random.default_rng(TEST_SEED)
    n = 10**6
    U = sample_directions(3, n, rng)
    norms = np.sqrt((U**2).sum(axis=1))
    assert np.abs(norms - 1.0).max() < 1e-12
    assert np.abs(U.mean(axis=0)).max() < 4 / math.sqrt(n)


def test_directions_isotropic_covariance():
    rng = np.random.default_rng(TEST_SEED)
    n = 10**6
    U = sample_directions(4, n, rng)
    cov = U.T @ U / n
    assert np.abs(cov - np.eye(4) / 4).max() < 5e-3


def test_single_direction():
    rng = np.random.default_rng(TEST_SEED)
    u = sample_direction(5, rng)
    assert abs(np.linalg.norm(u) - 1.0) < 1e-12


# ---------------------------------------------------------------------------
# radial boundary


def test_radial_boundary_cubic_facet():
    for d in (2, 3, 4):
        spec = unit_dual(get_lattice(f"Z{d}"))
        u = np.zeros(d)
        u[0] = 1.0
        t = radial_boundary(spec, u, tol=1e-10)
        assert abs(t - 0.5) < 1e-8


def test_radial_boundary_square_corner_is_exact():
    spec = unit_dual(get_lattice("Z2"))
    t = radial_boundary(spec, np.array([1.0, 1.0]) / math.sqrt(2.0))
    assert t == spec.covering_radius


def test_radial_boundary_hexagon_vertex_is_exact():
    spec = unit_dual(get_lattice("A2"))
    w = (np.arange(3)[::-1] - 1.0) / 3.0  # permutohedron vertex, zero-sum frame
    h = (w @ spec.embed_map.T) * spec.embed_scale
    u = h / np.linalg.norm(h)
    assert radial_boundary(spec, u) == spec.covering_radius


def test_radial_boundary_validates_input():
    spec = unit_dual(get_lattice("Z2"))
    with pytest.raises(ValueError):
        radial_boundary(spec, np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        radial_boundary(spec, np.array([1.0, 0.0]), tol=0.0)


@pytest.mark.parametrize("name", ["Z2", "A2", "A3", "A3_dual", "D4", "E8"])
def test_radial_boundary_matches_facet_formula(name):
    # Independent oracle: t(u) = min over lattice vectors v of
    # |v|^2 / (2 u.v), using the full shell of norm <= 2R vectors, which
    # contains every facet vector of the Voronoi cell.
    spec = unit_dual(get_lattice(name))
    shell = _neighbor_shell(spec)
    rng = np.random.default_rng(TEST_SEED + 8)
    U = sample_directions(spec.dim, 100, rng)
    for u in U:
        u_nat = u @ spec.embed_map if spec.embed_map is not None else u
        proj = shell @ u_nat
        pos = proj > 1e-12
        t_true = spec.embed_scale * float(
            ((shell[pos] ** 2).sum(axis=1) / (2.0 * proj[pos])).min()
        )
        t = radial_boundary(spec, u, tol=1e-10)
        assert abs(t - t_true) < 2e-8


# ---------------------------------------------------------------------------
# profiles


def test_profile_z1_all_half():
    prof = build_profile(unit_dual(get_lattice("Z1")), 100, seed=TEST_SEED)
    assert np.all(prof.t_values == 0.5)


def test_profile_bounds_and_volume_identity_z2(profile_factory):
    prof = profile_factory("Z2", 10**5)
    spec = prof.lattice
    t = prof.t_values
    assert t.min() >= spec.packing_radius - prof.tolerance
    assert t.max() <= spec.covering_radius + prof.tolerance
    t2 = t**2
    dev = abs(t2.mean() * math.pi - 1.0)
    se = t2.std(ddof=1) * math.pi / math.sqrt(len(t2))
    assert dev <= 4 * se


def test_profile_e8_bounds_example():
    spec = unit_dual(get_lattice("E8"))
    prof = build_profile(spec, 10**4, seed=TEST_SEED)
    assert prof.t_values.min() >= math.sqrt(2.0) / 2.0 - prof.tolerance
    assert prof.t_values.max() <= 1.0 + prof.tolerance


# Cell vertices subtend tiny solid angles in dimension 8, so the profile
# maximum approaches the covering radius more slowly there.
_MAX_T_FLOOR = {"Z2": 1e-2, "Z3": 1e-2, "A2": 1e-2, "A3": 1e-2, "A3_dual": 1e-2, "D4": 1e-2, "E8": 6e-2}


@pytest.mark.parametrize("name", sorted(_MAX_T_FLOOR))
def test_profile_max_reaches_covering_radius(name, profile_factory):
    # Deep holes are reachable by random directions at N = 10^6.
    prof = profile_factory(name, 10**6)
    assert prof.t_values.max() >= prof.lattice.covering_radius * (1.0 - _MAX_T_FLOOR[name])


def test_profile_determinism_and_thread_independence():
    spec = unit_dual(get_lattice("A3"))
    a = build_profile(spec, 3000, seed=42)
    b = build_profile(spec, 3000, seed=42)
    c = build_profile(spec, 3000, seed=42, threads=3)
    assert np.array_equal(a.t_values, b.t_values)
    assert np.array_equal(a.t_values, c.t_values)
    d = build_profile(spec, 3000, seed=43)
    assert not np.array_equal(a.t_values, d.t_values)


def test_profile_directions_deterministic():
    a = profile_directions(3, 1000, seed=7)
    b = profile_directions(3, 1000, seed=7)
    assert np.array_equal(a, b)


def test_profile_rejects_non_unit_volume():
    with pytest.raises(ValueError):
        build_profile(get_lattice("A3"), 10, seed=1)


def test_bracket_violation_on_corrupted_radii():
    spec = unit_dual(get_lattice("Z2"))
    too_small_R = replace(spec, covering_radius=spec.covering_radius * 0.9)
    with pytest.raises(BracketViolationError):
        build_profile(too_small_R, 500, seed=TEST_SEED)
    too_big_rho = replace(spec, packing_radius=spec.packing_radius * 1.1)
    with pytest.raises(BracketViolationError):
        build_profile(too_big_rho, 500, seed=TEST_SEED)


def test_rotation_invariance_of_profile_quantiles(profile_factory):
    # Rotating the lattice only reparameterizes the direction sample; the
    # distribution of t is unchanged.  Compare deciles against their
    # order-statistic noise.
    n = 10**5
    base = profile_factory("A3", n)
    spec = base.lattice
    rng = np.random.default_rng(TEST_SEED + 9)
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    rot = build_profile(rotated(spec, Q), n, seed=TEST_SEED + 10)
    ps = np.arange(0.1, 0.91, 0.1)
    qa = np.quantile(base.t_values, ps)
    qb = np.quantile(rot.t_values, ps)
    # quantile density estimated by finite differences
    eps = 0.01
    dens = (2 * eps) / (
        np.quantile(base.t_values, ps + eps) - np.quantile(base.t_values, ps - eps)
    )
    se = np.sqrt(ps * (1 - ps) / n) / dens
    assert np.all(np.abs(qa - qb) <= 4 * math.sqrt(2.0) * se)


def test_profile_cache_roundtrip(tmp_path):
    spec = unit_dual(get_lattice("A2"))
    prof = build_profile(spec, 2000, seed=TEST_SEED)
    path = profile_cache_path(tmp_path, "A2", 2000, TEST_SEED, prof.tolerance)
    save_profile(prof, path)
    back = load_profile(path, spec)
    assert np.array_equal(back.t_values, prof.t_values)
    assert back.seed == prof.seed and back.tolerance == prof.tolerance


def test_profile_cache_rejects_wrong_lattice(tmp_path):
    spec = unit_dual(get_lattice("A2"))
    prof = build_profile(spec, 100, seed=TEST_SEED)
    path = tmp_path / "x.profile"
    save_profile(prof, path)
    with pytest.raises(ValueError):
        load_profile(path, unit_dual(get_lattice("Z2")))
