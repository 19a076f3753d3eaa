"""Star products on the dual of a Lie algebra, with exact arithmetic."""

__version__ = "1.0.0"

from .algebra import (
    AntisymmetryViolation,
    JacobiViolation,
    LieAlgebra,
    PoissonTensor,
    algebra_from_brackets,
    catalog,
    catalog_names,
    load_algebra,
    poisson_tensor,
    save_algebra,
    trace_operator,
    validate_algebra,
)
from .enveloping import gutt_linear_cochain, gutt_product, symmetrize, unsymmetrize
from .graphs import (
    Graph,
    GraphClass,
    GraphKind,
    canonicalize,
    classify,
    decompose,
    enumerate_graphs,
    parse_graph,
    wheel1_graph,
    wheel2_graph,
)
from .operators import BiDiffOperator, DiffOperator
from .poly import HSeries, Polynomial, parse_poly
from .star import (
    EquivalenceOperator,
    GuttStarProduct,
    StarProduct,
    assemble_kontsevich,
    associator_defect,
    covariance_defect,
    eta_from_bidiff,
    kontsevich_gutt_rho,
    verify_equivalence,
    weyl_defect,
    weyl_normalize,
)
from .weights import (
    WeightEstimate,
    WeightTable,
    estimate_weight,
    factorized_weight,
    integrand,
    known_weight,
    phi,
    phi_gradient,
    seed_table,
)
