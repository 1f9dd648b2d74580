"""Types, terms, signatures and the typing judgement."""

from .errors import HochcError, SignatureError, TypingError, UnboundNameError
from .signature import (
    EQUALITY_RELATIONS,
    LIA_FUNCTIONS,
    LIA_RELATIONS,
    LOGICAL_NAMES,
    Signature,
    TypeEnv,
    check_type,
    equality_background,
    infer_type,
    is_formula,
    lia_background,
)
from .substitution import beta_normal_form, beta_reduce_head, fresh_name, rename, substitute
from .terms import (
    And,
    App,
    Exists,
    Lam,
    Neg,
    Or,
    Sym,
    Term,
    Var,
    apply,
    conj,
    contains_lambda,
    contains_logical,
    disj,
    exists,
    is_numeral,
    is_positive_existential,
    lambdas,
    neg,
    numeral,
    ordered_free_vars,
    show,
    size,
    spine,
    subterms,
    symbols,
)
from .types import BOOL, INT, Arrow, Base, Bool, Type, TypeKind, arrow, classify, order, uncurry

__all__ = [
    # Errors
    "HochcError",
    "SignatureError",
    "TypingError",
    "UnboundNameError",
    # Types
    "Arrow",
    "BOOL",
    "Base",
    "Bool",
    "INT",
    "Type",
    "TypeKind",
    "arrow",
    "classify",
    "order",
    "uncurry",
    # Terms
    "And",
    "App",
    "Exists",
    "Lam",
    "Neg",
    "Or",
    "Sym",
    "Term",
    "Var",
    "apply",
    "conj",
    "contains_lambda",
    "contains_logical",
    "disj",
    "exists",
    "is_numeral",
    "is_positive_existential",
    "lambdas",
    "neg",
    "numeral",
    "ordered_free_vars",
    "show",
    "size",
    "spine",
    "subterms",
    "symbols",
    # Signatures and typing
    "EQUALITY_RELATIONS",
    "LIA_FUNCTIONS",
    "LIA_RELATIONS",
    "LOGICAL_NAMES",
    "Signature",
    "TypeEnv",
    "check_type",
    "equality_background",
    "infer_type",
    "is_formula",
    "lia_background",
    # Substitution
    "beta_normal_form",
    "beta_reduce_head",
    "fresh_name",
    "rename",
    "substitute",
]
