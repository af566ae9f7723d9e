"""scatterkit: exact finite-order scattering diagrams from skew-symmetric seeds,
theta functions via broken lines, mirror-algebra structure constants, a toric
curve-class mode, and an independent cluster-mutation oracle.
"""

from .errors import (
    ConstraintConflict,
    DimensionMismatch,
    InconsistentFan,
    InexactDivision,
    NonGenericEndpoint,
    NonTransversalPath,
    OrderMismatch,
    ParseError,
    ScatterKitError,
    UnsupportedRank,
)
from .lattice import NOT_IN_P, GenericPoint, Seed, SkewForm, degree, generic_point, pair
from .series import TruncatedMonoidSeries, WallFunction, multiply as series_multiply, power
from .scattering import (
    CrossingEvent,
    ScatteringDiagram,
    StraightPath,
    Support,
    Wall,
    complete,
    cross,
    cwall_supports,
    initial_diagram,
    is_incoming,
    path_ordered_product,
)
from .brokenlines import (
    BrokenLine,
    ThetaFunction,
    enumerate_broken_lines,
    theta,
    theta_consistency_check,
)
from .mirror import (
    StructureConstantTable,
    ThetaExpansion,
    gram_matrix,
    multiply,
    pairing,
    structure_constants,
    trace,
)
from .toric import (
    CurveClass,
    DirectedSegment,
    Fan,
    PLFunctionWithKinks,
    SpineTree,
    WeightVector,
    build_phi,
    builtin_fan,
    segment_class,
    straight_count,
    toric_product,
    tree_class,
    weight,
    weight_class,
)
from .cluster import (
    ClusterSeed,
    LaurentPolynomial,
    compare_exchange,
    mutate_matrix,
    mutate_variable,
)

__version__ = "0.1.0"

__all__ = [
    "BrokenLine",
    "ClusterSeed",
    "ConstraintConflict",
    "CrossingEvent",
    "CurveClass",
    "DimensionMismatch",
    "DirectedSegment",
    "Fan",
    "GenericPoint",
    "InconsistentFan",
    "InexactDivision",
    "LaurentPolynomial",
    "NOT_IN_P",
    "NonGenericEndpoint",
    "NonTransversalPath",
    "OrderMismatch",
    "PLFunctionWithKinks",
    "ParseError",
    "ScatterKitError",
    "ScatteringDiagram",
    "Seed",
    "SkewForm",
    "SpineTree",
    "StraightPath",
    "StructureConstantTable",
    "Support",
    "ThetaExpansion",
    "ThetaFunction",
    "TruncatedMonoidSeries",
    "UnsupportedRank",
    "Wall",
    "WallFunction",
    "WeightVector",
    "build_phi",
    "builtin_fan",
    "compare_exchange",
    "complete",
    "cross",
    "cwall_supports",
    "degree",
    "enumerate_broken_lines",
    "generic_point",
    "gram_matrix",
    "initial_diagram",
    "is_incoming",
    "multiply",
    "mutate_matrix",
    "mutate_variable",
    "pair",
    "pairing",
    "path_ordered_product",
    "power",
    "segment_class",
    "series_multiply",
    "straight_count",
    "structure_constants",
    "theta",
    "theta_consistency_check",
    "toric_product",
    "trace",
    "tree_class",
    "weight",
    "weight_class",
]
