"""Reconstruction-error variance of lattice sampling for isotropically
bandlimited processes: exact decoders, radial Voronoi profiling, the
closed-form lower bound and the per-lattice threshold rates."""

from .catalog import (
    CATALOG_NAMES,
    TABLE1_NAMES,
    LatticeSpec,
    SingularGeneratorError,
    ThresholdPair,
    UnknownLatticeError,
    dual_lattice,
    get_lattice,
    normalized_thresholds,
    rotated,
    scaled,
    unit_dual,
)
from .decoders import (
    BoxTooSmallError,
    DecodeResult,
    brute_force_nearest,
    decode_batch,
    in_voronoi,
    in_voronoi_batch,
    nearest_point,
    reduce_to_fundamental_cell,
    shortest_vector_norm,
)
from .geometry import (
    BracketViolationError,
    IsotropicSpectrum,
    RadialProfile,
    ball_volume,
    build_profile,
    load_profile,
    profile_directions,
    radial_boundary,
    sample_direction,
    sample_directions,
    save_profile,
)
from .variance import (
    MultipleCrossoverError,
    NoCrossoverError,
    VarianceCurve,
    crossover,
    error_variance,
    lower_bound,
    sweep,
    thresholds,
)

__version__ = "0.1.0"

__all__ = [
    "CATALOG_NAMES",
    "TABLE1_NAMES",
    "LatticeSpec",
    "ThresholdPair",
    "UnknownLatticeError",
    "SingularGeneratorError",
    "get_lattice",
    "dual_lattice",
    "normalized_thresholds",
    "scaled",
    "rotated",
    "unit_dual",
    "DecodeResult",
    "BoxTooSmallError",
    "nearest_point",
    "brute_force_nearest",
    "decode_batch",
    "in_voronoi",
    "in_voronoi_batch",
    "reduce_to_fundamental_cell",
    "shortest_vector_norm",
    "IsotropicSpectrum",
    "RadialProfile",
    "BracketViolationError",
    "ball_volume",
    "sample_direction",
    "sample_directions",
    "profile_directions",
    "radial_boundary",
    "build_profile",
    "save_profile",
    "load_profile",
    "VarianceCurve",
    "NoCrossoverError",
    "MultipleCrossoverError",
    "error_variance",
    "lower_bound",
    "sweep",
    "crossover",
    "thresholds",
    "__version__",
]
