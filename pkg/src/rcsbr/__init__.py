"""Exact-arithmetic analysis of finite dynamic games under rationality
and common strong belief in rationality, including misaligned-belief
separating structures."""

from .beliefs import (
    CPS,
    LPS,
    Measure,
    conditionally_believes,
    expected_payoff,
    find_justifying_cps,
    iter_justifying_cps,
    lps_to_cps,
    sequential_best_replies,
    strongly_believes,
    validate_cps,
)
from .concepts import (
    JustificationCertificate,
    MisalignmentCertificate,
    SetFamily,
    correlated_rationalizability,
    enumerate_fbrs,
    enumerate_fsbrs,
    enumerate_mfsbrs,
    is_fbrs,
    is_fsbrs,
    is_mfsbrs,
    player_specific_fsbrs,
    player_specific_mfsbrs,
    strong_rationalizability,
)
from .epistemic import (
    TheoremReport,
    TypeStructure,
    bel,
    check_theorem_bf,
    construct_structure_for_fsbrs,
    csb,
    csb_sequence,
    first_order_cps,
    project_profile,
    rat,
    rcbr,
    rcbr_sequence,
    rcsbr,
    sb,
    validate_type_structure,
)
from .game import (
    DynamicGame,
    Infoset,
    ProductSet,
    StandardStrategy,
    Strategy,
    conditioning_family,
    enumerate_standard_strategies,
    is_static,
    payoff,
    reachable_infosets,
    reduce_strategies,
    strategies_allowing,
    validate_game,
)
from .separating import (
    Closure,
    SeparatingStructure,
    StateSpace,
    Taxonomy,
    classify,
    construct_prop2,
    induce_separating_structure,
    is_belief_closed,
    is_non_belief_closed,
    minimal_closure,
    real_csb_i,
    real_rcsbr_i,
    real_rcsbr_profile,
    verify_prop1,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
