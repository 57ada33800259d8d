"""Command-line front end.

Subcommands: ``list`` (catalog constants), ``thresholds`` (the two
normalized threshold rates per lattice), ``curve`` (rate sweeps to CSV or
JSON), ``crossover`` (where two lattices swap order) and ``verify``
(self-checks against independent oracles).

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.
Output is a deterministic function of the run configuration; radial
profiles can be cached on disk (``--cache-dir`` or LATTICE_SAMPLER_CACHE).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import catalog, decoders, geometry, variance

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_IO = 3

DEFAULT_SEED = 20260809
DEFAULT_TOL = geometry.DEFAULT_BISECT_TOL
DEFAULT_RATE_MIN = 0.5
DEFAULT_RATE_MAX = 2.05
DEFAULT_RATE_STEPS = 601

CSV_HEADER = "lattice,dim,rate,sigma_e2,sigma_lb2,gap,stderr"


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    lattice_names: list[str]
    n_directions: int | None
    seed: int
    bisect_tol: float
    rate_min: float
    rate_max: float
    rate_steps: int
    output_path: str
    output_format: str
    cache_dir: str | None
    threads: int | None

    def validate(self) -> None:
        for name in self.lattice_names:
            catalog.get_lattice(name)
        if self.n_directions is not None and self.n_directions < 1:
            raise UsageError("--n must be >= 1")
        if self.bisect_tol <= 0:
            raise UsageError("--tol must be positive")
        if not (0 < self.rate_min < self.rate_max):
            raise UsageError("need 0 < --rate-min < --rate-max")
        if self.rate_steps < 2:
            raise UsageError("--steps must be >= 2")
        if self.output_format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")

    @property
    def rate_grid(self) -> np.ndarray:
        return np.linspace(self.rate_min, self.rate_max, self.rate_steps)


def default_directions(dim: int) -> int:
    """Direction count keeping full sweeps fast: decode cost grows with dim."""
    return 10**6 if dim <= 4 else 10**5


def profile_for(
    name: str,
    n: int | None,
    seed: int,
    tol: float,
    cache_dir: str | None = None,
    threads: int | None = None,
) -> geometry.RadialProfile:
    """Radial profile of the unit-volume frequency lattice of a sampling
    lattice, cached on disk when a cache directory is configured."""
    spec = catalog.get_lattice(name)
    dual = catalog.unit_dual(spec)
    n_eff = n if n is not None else default_directions(spec.dim)
    return geometry.cached_build_profile(
        dual, name, n_eff, seed, tol, cache_dir=cache_dir, threads=threads
    )


# ---------------------------------------------------------------------------
# argument plumbing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_profile_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=None, help="directions per profile")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="bisection tolerance")
    p.add_argument("--cache-dir", default=os.environ.get("LATTICE_SAMPLER_CACHE"))
    p.add_argument("--threads", type=int, default=os.cpu_count())


def _add_grid_flags(p: argparse.ArgumentParser, with_defaults: bool = True) -> None:
    p.add_argument("--rate-min", type=float, default=DEFAULT_RATE_MIN if with_defaults else None)
    p.add_argument("--rate-max", type=float, default=DEFAULT_RATE_MAX if with_defaults else None)
    p.add_argument("--steps", type=int, default=DEFAULT_RATE_STEPS if with_defaults else None)


def build_parser() -> _Parser:
    parser = _Parser(prog="lattice-sampler", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="catalog lattices and their constants")

    p_thr = sub.add_parser("thresholds", help="normalized threshold rates")
    p_thr.add_argument("--lattices", default=",".join(catalog.TABLE1_NAMES))

    p_curve = sub.add_parser("curve", help="rate sweep of variance and bound")
    p_curve.add_argument("--lattices", required=True, help="comma-separated names")
    _add_profile_flags(p_curve)
    _add_grid_flags(p_curve)
    p_curve.add_argument("--out", default="-", help="output path ('-' = stdout)")
    p_curve.add_argument("--format", choices=("csv", "json"), default="csv")

    p_x = sub.add_parser("crossover", help="rate where two lattices swap order")
    p_x.add_argument("lattice_a")
    p_x.add_argument("lattice_b")
    _add_profile_flags(p_x)
    _add_grid_flags(p_x, with_defaults=False)
    p_x.add_argument("--out", default="-")

    p_ver = sub.add_parser("verify", help="run the oracle self-checks")
    _add_profile_flags(p_ver)

    return parser


# ---------------------------------------------------------------------------
# commands


def cmd_list(args) -> int:
    print(f"{'name':10s} {'dim':>3s} {'packing':>12s} {'covering':>12s} {'volume':>12s}")
    for name in catalog.CATALOG_NAMES:
        s = catalog.get_lattice(name)
        print(
            f"{name:10s} {s.dim:3d} {s.packing_radius:12.6f} "
            f"{s.covering_radius:12.6f} {s.cell_volume:12.6f}"
        )
    return EXIT_OK


def cmd_thresholds(args) -> int:
    names = [n.strip() for n in args.lattices.split(",") if n.strip()]
    print(f"{'lattice':10s} {'dim':>3s} {'low':>10s} {'high':>10s}")
    for name in names:
        spec = catalog.get_lattice(name)
        pair = catalog.normalized_thresholds(spec)
        print(f"{name:10s} {spec.dim:3d} {pair.low:10.6f} {pair.high:10.6f}")
    return EXIT_OK


def _curve_rows(config: RunConfig) -> list[dict]:
    rows = []
    for name in config.lattice_names:
        prof = profile_for(
            name,
            config.n_directions,
            config.seed,
            config.bisect_tol,
            config.cache_dir,
            config.threads,
        )
        curve = variance.sweep(prof, config.rate_grid)
        for i, rate in enumerate(curve.rates):
            rows.append(
                {
                    "lattice": name,
                    "dim": curve.dim,
                    "rate": float(rate),
                    "sigma_e2": float(curve.sigma_e2[i]),
                    "sigma_lb2": float(curve.sigma_lb2[i]),
                    "gap": float(curve.gap[i]),
                    "stderr": float(curve.stderr[i]),
                }
            )
    return rows


def _format_rows(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r['lattice']},{r['dim']},{r['rate']:.17g},{r['sigma_e2']:.17g},"
            f"{r['sigma_lb2']:.17g},{r['gap']:.17g},{r['stderr']:.17g}"
        )
    return "\n".join(lines) + "\n"


def _write_output(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_curve(args) -> int:
    config = RunConfig(
        lattice_names=[n.strip() for n in args.lattices.split(",") if n.strip()],
        n_directions=args.n,
        seed=args.seed,
        bisect_tol=args.tol,
        rate_min=args.rate_min,
        rate_max=args.rate_max,
        rate_steps=args.steps,
        output_path=args.out,
        output_format=args.format,
        cache_dir=args.cache_dir,
        threads=args.threads,
    )
    config.validate()
    rows = _curve_rows(config)
    _write_output(_format_rows(rows, config.output_format), config.output_path)
    return EXIT_OK


def cmd_crossover(args) -> int:
    spec_a = catalog.get_lattice(args.lattice_a)
    spec_b = catalog.get_lattice(args.lattice_b)
    thr_a = catalog.normalized_thresholds(spec_a)
    thr_b = catalog.normalized_thresholds(spec_b)
    # default grid: the interior of the window where both gaps can be
    # nonzero, trimmed 1% at each end
    lo = max(thr_a.low, thr_b.low)
    hi = min(thr_a.high, thr_b.high)
    span = hi - lo
    rate_min = args.rate_min if args.rate_min is not None else lo + 0.01 * span
    rate_max = args.rate_max if args.rate_max is not None else hi - 0.01 * span
    steps = args.steps if args.steps is not None else 301
    if span <= 0 and args.rate_min is None:
        result = {
            "lattice_a": args.lattice_a,
            "lattice_b": args.lattice_b,
            "crossover_rate": None,
            "reason": "threshold windows do not overlap",
        }
        _write_output(json.dumps(result, indent=1) + "\n", args.out)
        return EXIT_OK
    config = RunConfig(
        lattice_names=[args.lattice_a, args.lattice_b],
        n_directions=args.n,
        seed=args.seed,
        bisect_tol=args.tol,
        rate_min=rate_min,
        rate_max=rate_max,
        rate_steps=steps,
        output_path=args.out,
        output_format="json",
        cache_dir=args.cache_dir,
        threads=args.threads,
    )
    config.validate()
    curves = []
    for name in (args.lattice_a, args.lattice_b):
        prof = profile_for(name, config.n_directions, config.seed, config.bisect_tol,
                           config.cache_dir, config.threads)
        curves.append(variance.sweep(prof, config.rate_grid))
    result = {
        "lattice_a": args.lattice_a,
        "lattice_b": args.lattice_b,
        "rate_min": rate_min,
        "rate_max": rate_max,
        "steps": steps,
    }
    try:
        rate = variance.crossover(curves[0], curves[1])
        grid = config.rate_grid
        j = int(np.searchsorted(grid, rate))
        i = max(0, j - 1)
        j = min(len(grid) - 1, j)
        result.update(
            {
                "crossover_rate": rate,
                "bracket": {
                    "rates": [float(grid[i]), float(grid[j])],
                    "gap_a": [float(curves[0].gap[i]), float(curves[0].gap[j])],
                    "gap_b": [float(curves[1].gap[i]), float(curves[1].gap[j])],
                },
            }
        )
    except variance.NoCrossoverError:
        result.update({"crossover_rate": None, "reason": "no sign change"})
    except variance.MultipleCrossoverError as exc:
        result.update(
            {
                "crossover_rate": None,
                "reason": "multiple sign changes",
                "candidates": exc.candidates,
            }
        )
    _write_output(json.dumps(result, indent=1) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify

# Closed-form threshold table (low, high) used as an independent check.
THRESHOLD_TABLE = {
    "Z1": (2.0, 2.0),
    "Z2": (math.sqrt(2.0), 2.0),
    "A2": (3.0**0.75 / math.sqrt(2.0), 3.0**0.25 * math.sqrt(2.0)),
    "Z3": (2.0 / math.sqrt(3.0), 2.0),
    "A3_dual": (2.0 ** (1.0 / 3.0), 2.0 ** (5.0 / 6.0)),
    "A3": (2.0 ** (5.0 / 3.0) / math.sqrt(5.0), 2.0 ** (5.0 / 3.0) / math.sqrt(3.0)),
    "Z4": (1.0, 2.0),
    "D4": (2.0**0.25, 2.0**0.75),
    "A4": (5.0**0.375 / math.sqrt(2.0), 5.0**0.375),
    "Z8": (1.0 / math.sqrt(2.0), 2.0),
    "E8": (1.0, math.sqrt(2.0)),
    "A8": (3.0**1.375 / math.sqrt(20.0), 3.0**0.875 / math.sqrt(2.0)),
}

ORACLE_BOX_BOUNDS = {"Z8": 2, "E8": 2, "A8_dual": 2}


def _check_threshold_table() -> tuple[bool, str]:
    worst = 0.0
    for name, (lo, hi) in THRESHOLD_TABLE.items():
        got = catalog.normalized_thresholds(catalog.get_lattice(name))
        worst = max(worst, abs(got.low / lo - 1.0), abs(got.high / hi - 1.0))
    return worst <= 1e-9, f"max_rel_err={worst:.2e} over 24 numbers (tol 1e-9)"


def _check_decoder_oracle(queries: int, seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for name in catalog.CATALOG_NAMES:
        spec = catalog.get_lattice(name)
        X = rng.uniform(-2.0, 2.0, size=(queries, spec.dim))
        X = decoders.reduce_to_fundamental_cell(spec, X)
        bound = ORACLE_BOX_BOUNDS.get(name, 3)
        _, _, brute_d2, _ = decoders._brute_force_batch(spec, X, bound)
        P = decoders.decode_batch(spec, X)
        fast_d2 = ((X - P) ** 2).sum(axis=1)
        worst = max(worst, float(np.abs(fast_d2 - brute_d2).max()))
    n_lat = len(catalog.CATALOG_NAMES)
    return worst <= 1e-12, (
        f"max_dist2_diff={worst:.2e} over {n_lat} lattices x {queries} queries (tol 1e-12)"
    )


def _check_cell_volume(profiles: dict[str, geometry.RadialProfile]) -> tuple[bool, str]:
    worst_z = 0.0
    for name, prof in profiles.items():
        d = prof.lattice.dim
        vd = geometry.ball_volume(d, 1.0)
        td = prof.t_values**d
        dev = abs(float(td.mean()) * vd - 1.0)
        se = float(td.std(ddof=1)) * vd / math.sqrt(prof.n)
        if se > 0:
            worst_z = max(worst_z, dev / se)
    return worst_z <= 4.0, f"max_z={worst_z:.2f} across dual cells (tol 4 standard errors)"


def _check_bound_dominance(profiles: dict[str, geometry.RadialProfile]) -> tuple[bool, str]:
    grid = np.linspace(DEFAULT_RATE_MIN, DEFAULT_RATE_MAX, DEFAULT_RATE_STEPS)
    failures = []
    for name, prof in profiles.items():
        curve = variance.sweep(prof, grid)
        thr = catalog.normalized_thresholds(catalog.get_lattice(name))
        if np.any(curve.gap < -3.0 * curve.stderr):
            failures.append(f"{name}: bound violated")
        hi_zone = grid >= thr.high
        if np.any(curve.sigma_e2[hi_zone] != 0.0):
            failures.append(f"{name}: nonzero variance above the high threshold")
        lo_zone = grid <= thr.low
        if np.any(np.abs(curve.gap[lo_zone]) > 3.0 * np.maximum(curve.stderr[lo_zone], 1e-300)):
            failures.append(f"{name}: gap beyond noise below the low threshold")
    if failures:
        return False, "; ".join(failures)
    return True, f"all {len(profiles)} lattices on the {DEFAULT_RATE_STEPS}-point grid"


def cmd_verify(args) -> int:
    n_profile = args.n if args.n is not None else 10**5
    queries = 10**4
    checks: list[tuple[str, bool, str]] = []

    ok, detail = _check_threshold_table()
    checks.append(("threshold-table", ok, detail))

    ok, detail = _check_decoder_oracle(queries, args.seed)
    checks.append(("decoder-oracle", ok, detail))

    profiles = {
        name: profile_for(name, n_profile, args.seed, args.tol, args.cache_dir, args.threads)
        for name in catalog.CATALOG_NAMES
    }
    ok, detail = _check_cell_volume(profiles)
    checks.append(("cell-volume-identity", ok, detail))

    ok, detail = _check_bound_dominance(profiles)
    checks.append(("bound-dominance", ok, detail))

    failed = 0
    for name, ok, detail in checks:
        tag = "PASS" if ok else "FAIL"
        print(f"[{tag}] {name:22s} {detail}")
        failed += 0 if ok else 1
    return EXIT_OK if failed == 0 else EXIT_VERIFY


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    dispatch = {
        "list": cmd_list,
        "thresholds": cmd_thresholds,
        "curve": cmd_curve,
        "crossover": cmd_crossover,
        "verify": cmd_verify,
    }
    try:
        return dispatch[args.command](args)
    except (UsageError, catalog.UnknownLatticeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
