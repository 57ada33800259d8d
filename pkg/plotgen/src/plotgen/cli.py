"""Command line for rendering curve CSV files into figures.

Exit codes: 0 success, 1 usage error, 2 bad or empty input data, 3 I/O.
"""

from __future__ import annotations

import argparse
import sys

from .figures import EmptySelectionError, FigureSpec, SchemaError, render

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IO = 3


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    p = _Parser(prog="plotgen", description=__doc__)
    p.add_argument("--csv", required=True, help="curve CSV produced by lattice-sampler")
    p.add_argument("--style", choices=("variance", "gap"), default="variance")
    p.add_argument("--dims", default="2,3,4,8", help="comma-separated panel dimensions")
    p.add_argument("--out", required=True, help="output image (.svg or .png)")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        dims = tuple(int(v) for v in args.dims.split(",") if v.strip())
        if not dims:
            raise UsageError("--dims must name at least one dimension")
        spec = FigureSpec(
            input_csv=args.csv, panel_dims=dims, style=args.style, output_path=args.out
        )
    except (UsageError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        out = render(spec)
    except (SchemaError, EmptySelectionError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(out)
    return EXIT_OK


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
