"""Figure rendering for lattice-sampling curve CSV files."""

from .figures import (
    EXPECTED_HEADER,
    THRESHOLDS,
    EmptySelectionError,
    FigureSpec,
    SchemaError,
    build_figure,
    read_curves,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "EXPECTED_HEADER",
    "THRESHOLDS",
    "EmptySelectionError",
    "FigureSpec",
    "SchemaError",
    "build_figure",
    "read_curves",
    "render",
    "__version__",
]
