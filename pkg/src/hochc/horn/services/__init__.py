"""Services: background theories, resolution, canonical models and transformations."""

from .base import EmitFormatHandler
from .fragment_service import (
    DecisionSat,
    DecisionUnsat,
    FlatProblem,
    FragmentError,
    SimpleAtom,
    check_hobhc_sla,
    datalog_structures,
    decide_bsr_sla,
    decide_datalog,
    decide_structures,
    desugar_sla,
    enumerate_flat_structures,
    flatten,
    require_hobhc_sla,
)
from .lia_service import (
    LiaSolverError,
    LinearAtom,
    LinearExpr,
    LinearizationError,
    Sat,
    Unsat,
    lia_conjunction_sat,
    lia_terms_sat,
    linear_atom,
    linearize,
)
from .lifting_service import LiftResult, lift
from .model_service import (
    Expansion,
    FiniteFrame,
    FrameBudgetExceededError,
    ModelSat,
    ModelUnsat,
    StructureOutcome,
    canonical_structure,
    decide_finite,
    dump_expansion,
    eval_term,
    immediate_consequence,
    model_check,
)
from .native_format import NativeFormatHandler
from .problem_service import ParseError, parse, print_problem, theory_handle
from .registry import format_registry
from .replay_service import ReplayMismatchError, replay
from .resolution_service import (
    Budget,
    BudgetExhausted,
    ClauseSet,
    DerivationTrace,
    HeadMismatchError,
    NotARedexError,
    Refuted,
    RenamingError,
    Saturated,
    Step,
    beta_rule,
    constraint_refute,
    resolve,
    saturate,
)
from .smtlib_format import SmtLibFormatHandler
from .structure_service import (
    Finite,
    FiniteStructure,
    LiaStandard,
    PreconditionViolatedError,
    UnboundValuationError,
    eval_background,
    family_refutes,
)
from .translation_service import (
    FOHornClause,
    LambdaPresentError,
    Translation,
    TranslationError,
    comprehension_axiom,
    floor_clause,
    floor_term,
    translate,
)

__all__ = [
    # Background theories
    "Finite",
    "FiniteStructure",
    "LiaStandard",
    "PreconditionViolatedError",
    "UnboundValuationError",
    "eval_background",
    "family_refutes",
    "LiaSolverError",
    "LinearAtom",
    "LinearExpr",
    "LinearizationError",
    "Sat",
    "Unsat",
    "lia_conjunction_sat",
    "lia_terms_sat",
    "linear_atom",
    "linearize",
    # Resolution
    "Budget",
    "BudgetExhausted",
    "ClauseSet",
    "DerivationTrace",
    "HeadMismatchError",
    "NotARedexError",
    "Refuted",
    "RenamingError",
    "Saturated",
    "Step",
    "beta_rule",
    "constraint_refute",
    "resolve",
    "saturate",
    "ReplayMismatchError",
    "replay",
    # Canonical models
    "Expansion",
    "FiniteFrame",
    "FrameBudgetExceededError",
    "ModelSat",
    "ModelUnsat",
    "StructureOutcome",
    "canonical_structure",
    "decide_finite",
    "dump_expansion",
    "eval_term",
    "immediate_consequence",
    "model_check",
    # Transformations
    "LiftResult",
    "lift",
    "FOHornClause",
    "LambdaPresentError",
    "Translation",
    "TranslationError",
    "comprehension_axiom",
    "floor_clause",
    "floor_term",
    "translate",
    # Format handlers
    "EmitFormatHandler",
    "NativeFormatHandler",
    "SmtLibFormatHandler",
    "format_registry",
    # Decidable fragments
    "DecisionSat",
    "DecisionUnsat",
    "FlatProblem",
    "FragmentError",
    "SimpleAtom",
    "check_hobhc_sla",
    "datalog_structures",
    "decide_bsr_sla",
    "decide_datalog",
    "decide_structures",
    "desugar_sla",
    "enumerate_flat_structures",
    "flatten",
    "require_hobhc_sla",
    # Problem files
    "ParseError",
    "parse",
    "print_problem",
    "theory_handle",
]
