"""Gate-preserving anti-unification and interaction-model composition."""

from .terms import (
    App,
    ConflictReport,
    InvalidPositionError,
    Position,
    Signature,
    Substitution,
    Symbol,
    SymbolKind,
    Term,
    Var,
    apply_substitution,
    conflict_positions,
    positions,
    renaming_equivalent,
    size,
    special_constants,
    subterm_at,
)
from .theory import (
    Attributes,
    Theory,
    TheoryNotScPreservingError,
    eq_modulo,
    mutate_commutative,
    normalize,
    validate_sc_preserving,
)
from .matching import BudgetExhausted, match_modulo, subsumes
from .engine import (
    AUT,
    Bottom,
    Configuration,
    EngineStats,
    Failure,
    GenOptions,
    GenResult,
    Solution,
    Solutions,
    Timeout,
    generalize,
    initial_config,
    measure,
    successors,
)
from .interactions import (
    INTERACTION_THEORY,
    Composition,
    CompositionError,
    GateMapping,
    Tagging,
    TagEntry,
    abstract_with_gates,
    check_composition_sound,
    compose,
    derive_tagging,
    lifelines_of,
    project,
    validate_tagging,
)

__all__ = [name for name in dir() if not name.startswith("_")]
