"""Algebra of bipartite no-signaling boxes and their CHSH limits.

The package has four layers:

- ``boxmodel``: behavior boxes, correlators, CHSH values, canonical
  boxes, and local-polytope membership (facet test + LP cross-check).
- ``wiring``: sequential composition of boxes, chains, and an audit of
  how local stages interact with non-local ones.
- ``semiring``: idempotent model labels, their Boolean scalar action,
  lifts with real powers, the max-times semifield, and the sup-valued
  (idempotent) integral.
- ``deform``: the entropy-weighted combination integral Z, the bound
  equation Z(2, X) = 4, and the solver that locates its root just below
  the Tsirelson bound.
"""

from .boxmodel import (
    LOCAL_BOUND,
    NO_SIGNALING_BOUND,
    TSIRELSON_BOUND,
    BehaviorBox,
    CorrelatorTable,
    LocalityReport,
    NoSignalingReport,
    box_from_correlators,
    box_from_dict,
    box_to_dict,
    check_no_signaling,
    chsh_canonical,
    chsh_max,
    convex_mix,
    correlators,
    deterministic_box,
    is_local_facets,
    is_local_lp,
    isotropic_box,
    pr_box,
    random_correlator_box,
    tsirelson_box,
    uniform_box,
)
from .deform import (
    CombineResult,
    DeformationParams,
    SolveResult,
    SweepRow,
    binary_entropy,
    combine_integrand,
    combined_chsh,
    idempotent_combined_chsh,
    omega,
    solve_xmax,
    sweep_T,
    tsirelson_gap,
)
from .errors import (
    BoxAlgebraError,
    BracketError,
    NumericError,
    UndefinedProductError,
    ValidationError,
)
from .semiring import (
    BOTTOM,
    TROP_ONE,
    TROP_ZERO,
    LiftValue,
    ModelLabel,
    TropicalValue,
    idempotent_integral,
    label_add,
    label_mul,
    lift,
    lift_mul,
    power,
    scalar_act,
    trop_add,
    trop_mul,
)
from .wiring import (
    AbsorptionReport,
    AuditEntry,
    WiringChain,
    absorption_audit,
    cancellativity_probe,
    chain_from_dict,
    chain_to_dict,
    compose_chain,
    sequential_compose,
)

__version__ = "0.1.0"
