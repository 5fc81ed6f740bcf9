"""Consistency algorithms and solvability deciders for CSPs over finite
relational structures."""

from .algebra import (
    AlgebraView,
    FiniteOperation,
    almost_trivial_decomposition,
    congruences,
    induced_digraph,
    is_2semilattice,
    is_conservative,
    is_ideal,
    is_majority,
    is_polymorphism,
    is_polymorphism_via_power,
    is_simple,
    is_subdirect,
    maximal_scc,
    strongly_connected_components,
    subalgebra_closure,
    verify_almost_trivial,
)
from .consistency import (
    ACCEPT,
    REJECT,
    UNKNOWN,
    ConsistencyOutcome,
    arc_consistency,
    arc_consistency_fullsweep,
    is_strong_strategy,
    is_weak_strategy,
    laac,
    pac,
    sac,
)
from .errors import (
    BudgetError,
    SchemaError,
    SimilarityError,
    SizeGuardError,
    ToolkitError,
    UnknownFixtureError,
)
from .homs import enumerate_homs, find_hom, has_all_constants, is_hom
from .solvability import (
    INCONCLUSIVE,
    NOT_SOLVABLE,
    SOLVABLE,
    SolvabilityVerdict,
    ac_solves,
    has_k_strategy,
    laac_solves,
    pac_solves_up_to,
    sac_solves_up_to,
    strategy_relation,
)
from .structures import (
    Instance,
    Signature,
    Structure,
    element_label,
    expand,
    induced_substructure,
    parse_instance,
    parse_structure,
    power,
    power_membership,
    power_structure,
    product,
    realize_pins,
    serialize_instance,
    serialize_structure,
    similar,
    sing_structure,
    unionsing_structure,
)

__all__ = [name for name in dir() if not name.startswith("_")]
