"""Exact operator calculus on the cone of positive definite matrices
crossed with a block of row vectors.

The pieces fit together like this: ``polynomials`` and ``matrices`` supply
exact arithmetic, ``weyl`` the differential operator algebra, ``grouplie``
the group, its Lie algebra and the invariant polynomial families,
``constructors`` the named operator families, ``theta`` the correspondence
from invariant polynomials to invariant operators, ``geometry`` the metric,
volume, Laplacian and geodesics, and ``reporting`` the batch check suite
behind the ``minkeuclid`` command line tool.
"""

from .constructors import OPERATOR_FAMILIES, build_operator, parse_operator_spec
from .geometry import (
    GeodesicParams,
    distance,
    geodesic_eval,
    laplace_beltrami,
    metric_matrix,
    path_length,
    volume_density,
)
from .grouplie import (
    AlgebraElement,
    GroupElement,
    InvariantPolynomial,
    Point,
    action_of,
    invariant_poly_build,
    sample_group_element,
)
from .matrices import Mat
from .polynomials import (
    Polynomial,
    RationalFunction,
    algebra_table,
    coordinate_table,
)
from .reporting import Config, Report, report_suite
from .theta import conjecture_check, theta_closed, theta_local
from .weyl import (
    DiffOperator,
    invariance_check,
    op_commutator,
    op_compose,
    op_equal,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement",
    "Config",
    "DiffOperator",
    "GeodesicParams",
    "GroupElement",
    "InvariantPolynomial",
    "Mat",
    "OPERATOR_FAMILIES",
    "Point",
    "Polynomial",
    "RationalFunction",
    "Report",
    "action_of",
    "algebra_table",
    "build_operator",
    "conjecture_check",
    "coordinate_table",
    "distance",
    "geodesic_eval",
    "invariance_check",
    "invariant_poly_build",
    "laplace_beltrami",
    "metric_matrix",
    "op_commutator",
    "op_compose",
    "op_equal",
    "parse_operator_spec",
    "path_length",
    "report_suite",
    "sample_group_element",
    "theta_closed",
    "theta_local",
    "volume_density",
    "__version__",
]
