"""Decision procedures for two decidable fragments.

HoBHC(SLA): clauses whose background atoms are simple linear atoms
``x <= M``, ``M <= x`` or ``x <= y`` (``M`` closed) over LIA with
uninterpreted constants. Only the order between the closed terms matters, so
the problem is flattened to a finite family of structures over those terms.

Higher-order Datalog: a background of constants with equality and
disequality only, decided over one quotient structure per partition of the
constants.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from enum import Enum
from typing import TypeAlias

from ...config import settings
from ..clauses import Clause, DefiniteClause, GoalClause, clause_atoms, is_background_atom
from ..syntax import (
    BOOL,
    EQUALITY_RELATIONS,
    INT,
    App,
    HochcError,
    Signature,
    Sym,
    Term,
    Var,
    apply,
    arrow,
    contains_lambda,
    fresh_name,
    numeral,
    show,
    spine,
    subterms,
)
from .lia_service import LinearAtom, Relation, Sat, lia_conjunction_sat, linearize
from .lifting_service import lift
from .model_service import StructureOutcome, decide_finite
from .structure_service import FiniteStructure

logger = logging.getLogger(__name__)

FLAT_PREFIX = "_g"


class FragmentError(HochcError):
    """Raised when a clause lies outside the fragment a procedure decides."""

    def __init__(self, clause: Clause, reason: str) -> None:
        super().__init__(f"{reason}: {clause}")
        self.clause = clause
        self.reason = reason


class SimpleShape(Enum):
    VAR_LE_CONST = "x <= M"
    CONST_LE_VAR = "M <= x"
    VAR_LE_VAR = "x <= y"


@dataclass(frozen=True)
class SimpleAtom:
    """A simple atom; ``left <= right`` with at least one side a variable and the other closed or a variable."""

    shape: SimpleShape
    left: Term
    right: Term

    @property
    def ground(self) -> Term | None:
        match self.shape:
            case SimpleShape.VAR_LE_CONST:
                return self.right
            case SimpleShape.CONST_LE_VAR:
                return self.left
        return None


def _is_int_var(m: Term) -> bool:
    return isinstance(m, Var) and m.type == INT


def _is_closed(m: Term) -> bool:
    return not m.free_vars


def simple_atom(sig: Signature, a: Term) -> SimpleAtom | None:
    """The simple-atom reading of ``a``, or None if ``a`` is not simple."""
    if not is_background_atom(sig, a):
        return None
    head, args = spine(a)
    if not (isinstance(head, Sym) and head.name == "<=" and len(args) == 2):
        return None
    left, right = args
    if _is_int_var(left) and _is_int_var(right):
        return SimpleAtom(SimpleShape.VAR_LE_VAR, left, right)
    if _is_int_var(left) and _is_closed(right):
        return SimpleAtom(SimpleShape.VAR_LE_CONST, left, right)
    if _is_closed(left) and _is_int_var(right):
        return SimpleAtom(SimpleShape.CONST_LE_VAR, left, right)
    return None


def fragment_violation(sig: Signature, clause: Clause) -> str | None:
    """Why ``clause`` is not a HoBHC(SLA), or None if it is one."""
    for atom in clause_atoms(clause):
        if is_background_atom(sig, atom):
            if simple_atom(sig, atom) is None:
                return f"background atom {show(atom)} is not simple"
        elif any(isinstance(t, Sym) and sig.is_background(t.name) for t in subterms(atom)):
            return f"foreground atom {show(atom)} mentions a background symbol"
    return None


def check_hobhc_sla(sig: Signature, clause: Clause) -> bool:
    """True iff every background atom is simple and no other atom mentions a background symbol."""
    return fragment_violation(sig, clause) is None


# Extended atoms are rewritten into alternatives (disjunction) of conjunctions of ``a <= b`` pairs.
_Pairs: TypeAlias = list[tuple[Term, Term]]


def _plus(m: Term, k: int) -> Term:
    return apply(Sym("+" if k > 0 else "-"), [m, numeral(abs(k))])


def _strict(left: Term, right: Term) -> _Pairs | None:
    """``left < right`` as a single ``<=`` pair, shifting the closed side by one."""
    if _is_closed(right):
        return [(left, _plus(right, -1))]
    if _is_closed(left):
        return [(_plus(left, 1), right)]
    return None


def _alternatives(sig: Signature, atom: Term) -> list[_Pairs] | None:
    head, args = spine(atom)
    if not (isinstance(head, Sym) and len(args) == 2 and is_background_atom(sig, atom)):
        return None
    left, right = args
    match head.name:
        case "<=":
            return [[(left, right)]]
        case ">=":
            return [[(right, left)]]
        case "<":
            strict = _strict(left, right)
            return [strict] if strict is not None else None
        case ">":
            strict = _strict(right, left)
            return [strict] if strict is not None else None
        case "=":
            return [[(left, right), (right, left)]]
        case "!=":
            below, above = _strict(left, right), _strict(right, left)
            return [below, above] if below is not None and above is not None else None
    return None


def _pair_atoms(pairs: _Pairs, taken: set[str]) -> list[Term] | None:
    atoms: list[Term] = []
    for left, right in pairs:
        le = Sym("<=")
        if _is_int_var(left) or _is_int_var(right):
            if not ((_is_int_var(left) or _is_closed(left)) and (_is_int_var(right) or _is_closed(right))):
                return None
            atoms.append(apply(le, [left, right]))
        elif _is_closed(left) and _is_closed(right):
            z = Var(fresh_name("z", taken), INT)
            taken.add(z.name)
            atoms.extend([apply(le, [left, z]), apply(le, [z, right])])
        else:
            return None
    return atoms


def desugar_sla(sig: Signature, clause: Clause) -> list[Clause]:
    """
    Rewrite extended linear atoms into simple ones.

    Strict bounds shift the closed side by one, ``=`` becomes two
    inequalities, ``!=`` splits the clause in two and an atom between two
    closed terms gets a fresh Int variable in between. Atoms that cannot be
    rewritten are left unchanged, so that ``check_hobhc_sla`` reports them.
    """
    body = clause.atoms if isinstance(clause, GoalClause) else clause.body
    taken = {v.name for v in clause.free_vars}
    choices: list[list[list[Term]]] = []
    for atom in body:
        options = _alternatives(sig, atom) if simple_atom(sig, atom) is None else None
        rewritten = [_pair_atoms(pairs, taken) for pairs in options] if options is not None else None
        if rewritten is None or any(r is None for r in rewritten):
            choices.append([[atom]])
        else:
            choices.append([r for r in rewritten if r is not None])
    result: list[Clause] = []
    for combination in itertools.product(*choices):
        atoms = tuple(a for part in combination for a in part)
        if isinstance(clause, GoalClause):
            result.append(GoalClause(atoms, clause.span))
        else:
            result.append(DefiniteClause(atoms, clause.head_rel, clause.head_args, clause.span))
    return result


def require_hobhc_sla(sig: Signature, clauses: Sequence[Clause]) -> list[Clause]:
    """
    Desugar every clause and check that the result lies in HoBHC(SLA).

    Raises:
        FragmentError: Citing the first clause outside the fragment
    """
    result: list[Clause] = []
    for clause in clauses:
        for rewritten in desugar_sla(sig, clause):
            reason = fragment_violation(sig, rewritten)
            if reason is not None:
                logger.warning(f"Not in HoBHC(SLA): {reason}")
                raise FragmentError(clause, reason)
            result.append(rewritten)
    return result


@dataclass(frozen=True)
class FlatProblem:
    """A HoBHC(SLA) set with every closed term replaced by a constant over the carrier of closed terms."""

    ground_terms: tuple[Term, ...]
    constants: tuple[str, ...]
    signature: Signature
    clauses: tuple[Clause, ...]

    def sharp(self, m: Term) -> Term:
        """Replace every flat constant by the closed term it stands for."""
        closed = dict(zip(self.constants, self.ground_terms, strict=True))
        match m:
            case Sym(name=name) if name in closed:
                return closed[name]
            case App(fn=fn, arg=arg):
                return App(self.sharp(fn), self.sharp(arg))
        return m

    def sharp_clause(self, clause: Clause) -> Clause:
        if isinstance(clause, GoalClause):
            return GoalClause(tuple(self.sharp(a) for a in clause.atoms), clause.span)
        return DefiniteClause(tuple(self.sharp(a) for a in clause.body), clause.head_rel, clause.head_args, clause.span)

    def structures(self) -> list[FiniteStructure]:
        return enumerate_flat_structures(self.ground_terms, self.constants)


def ground_terms(sig: Signature, clauses: Sequence[Clause]) -> list[Term]:
    """Closed sides of the simple atoms in source order, without duplicates; ``0`` if there are none."""
    seen: dict[Term, None] = {}
    for clause in clauses:
        for atom in clause_atoms(clause):
            simple = simple_atom(sig, atom)
            if simple is not None and simple.ground is not None:
                seen.setdefault(simple.ground, None)
    return list(seen) or [numeral(0)]


def flatten(sig: Signature, clauses: Sequence[Clause]) -> FlatProblem:
    """
    Replace the closed side ``M`` of every simple atom by a constant ``_g<k>``.

    Args:
        sig: Signature of the clause set
        clauses: HoBHC(SLA) clauses

    Returns:
        The flat problem over the signature of ``<=`` and the new constants
    """
    terms = ground_terms(sig, clauses)
    names: list[str] = []
    for k in range(len(terms)):
        name = f"{FLAT_PREFIX}{k}"
        while sig.type_of(name) is not None:
            name += "'"
        names.append(name)
    constant_of = dict(zip(terms, names, strict=True))

    def flat(atom: Term) -> Term:
        simple = simple_atom(sig, atom)
        if simple is None or simple.ground is None:
            return atom
        c = Sym(constant_of[simple.ground])
        if simple.shape is SimpleShape.VAR_LE_CONST:
            return apply(Sym("<="), [simple.left, c])
        return apply(Sym("<="), [c, simple.right])

    flat_clauses: list[Clause] = []
    for clause in clauses:
        if isinstance(clause, GoalClause):
            flat_clauses.append(GoalClause(tuple(flat(a) for a in clause.atoms), clause.span))
        else:
            body = tuple(flat(a) for a in clause.body)
            flat_clauses.append(DefiniteClause(body, clause.head_rel, clause.head_args, clause.span))
    background = {rel: arrow(INT, INT, BOOL) for rel in ("<=", *EQUALITY_RELATIONS)}
    background.update({name: INT for name in names})
    flat_sig = Signature(background, sig.foreground)
    logger.info(f"Flattened {len(clauses)} clauses over {len(terms)} ground terms")
    return FlatProblem(tuple(terms), tuple(names), flat_sig, tuple(flat_clauses))


def _order_constraint(left: Term, right: Term, bit: int) -> LinearAtom:
    relation = Relation.LE if bit else Relation.GT
    return LinearAtom(linearize(left), relation, linearize(right))


def enumerate_flat_structures(terms: Sequence[Term], constants: Sequence[str] | None = None) -> list[FiniteStructure]:
    """
    All ``<=``-tables over ``terms`` realisable by an integer assignment to the constants.

    Bits of the table are chosen depth first, row by row, ``0`` before ``1``;
    a partial table is abandoned as soon as its constraints are unsatisfiable.
    Every structure carries the witness assignment found for its table.

    Args:
        terms: Closed linear terms, the carrier in this order
        constants: Names of the flat constants; ``_g<k>`` by default

    Returns:
        The structures in enumeration order
    """
    names = list(constants) if constants is not None else [f"{FLAT_PREFIX}{k}" for k in range(len(terms))]
    carrier = tuple(show(m) for m in terms)
    pairs = list(itertools.product(range(len(terms)), repeat=2))
    structures: list[FiniteStructure] = []

    def emit(bits: list[int], witness: dict[str, int]) -> None:
        table = {(carrier[i], carrier[j]): bool(b) for (i, j), b in zip(pairs, bits, strict=True)}
        structures.append(
            FiniteStructure(
                carrier,
                functions={name: {(): element} for name, element in zip(names, carrier, strict=True)},
                relations={"<=": table},
                name=f"flat{len(structures)}",
                witness=witness,
            )
        )

    def search(bits: list[int], constraints: list[LinearAtom], witness: dict[str, int]) -> None:
        if len(bits) == len(pairs):
            emit(bits, witness)
            return
        i, j = pairs[len(bits)]
        for bit in (0, 1):
            extended = [*constraints, _order_constraint(terms[i], terms[j], bit)]
            result = lia_conjunction_sat(extended)
            if isinstance(result, Sat):
                search([*bits, bit], extended, result.witness)
            else:
                logger.debug(f"Pruned {show(terms[i])} <= {show(terms[j])} = {bit}")

    search([], [], {})
    logger.info(f"{len(structures)} realisable orderings of {len(terms)} ground terms")
    return structures


@dataclass(frozen=True)
class DecisionSat:
    """The first structure (in enumeration order) over which the canonical model satisfies every clause."""

    outcome: StructureOutcome
    tried: int
    signature: Signature


@dataclass(frozen=True)
class DecisionUnsat:
    """Every structure of the family falsifies some clause; one outcome per structure."""

    outcomes: tuple[StructureOutcome, ...]


Decision: TypeAlias = DecisionSat | DecisionUnsat


def decide_structures(
    sig: Signature, clauses: Sequence[Clause], structures: Sequence[FiniteStructure], cell_budget: int
) -> Decision:
    """Decide over each structure in order, stopping at the first one that admits a model."""
    outcomes = decide_finite(sig, clauses, structures, cell_budget)
    if outcomes and outcomes[-1].is_sat:
        return DecisionSat(outcomes[-1], len(outcomes), sig)
    return DecisionUnsat(tuple(outcomes))


def decide_bsr_sla(sig: Signature, clauses: Sequence[Clause], cell_budget: int | None = None) -> Decision:
    """
    Decide a finite set of HoBHC(SLA) over all expansions of LIA by its constants.

    Lambdas are lifted first and extended atoms desugared; the flat problem is
    then decided structure by structure.

    Raises:
        FragmentError: If a clause is not in HoBHC(SLA)
        FrameBudgetExceededError: If a frame is too large to enumerate
    """
    if any(contains_lambda(a) for c in clauses for a in clause_atoms(c)):
        lifted = lift(sig, clauses)
        sig, clauses = lifted.signature, lifted.clauses
    problem = flatten(sig, require_hobhc_sla(sig, clauses))
    budget = cell_budget if cell_budget is not None else settings.FRAME_CELL_BUDGET
    return decide_structures(problem.signature, problem.clauses, problem.structures(), budget)


def set_partitions(items: Sequence[str]) -> Iterator[list[list[str]]]:
    """Partitions of ``items`` by restricted growth strings, in lexicographic order."""
    n = len(items)
    if n == 0:
        yield []
        return

    def grow(prefix: list[int], blocks: int) -> Iterator[list[int]]:
        if len(prefix) == n:
            yield prefix
            return
        for b in range(blocks + 1):
            yield from grow([*prefix, b], max(blocks, b + 1))

    for code in grow([0], 1):
        partition: list[list[str]] = [[] for _ in range(max(code) + 1)]
        for item, block in zip(items, code, strict=True):
            partition[block].append(item)
        yield partition


def datalog_structures(constants: Sequence[str]) -> list[FiniteStructure]:
    """
    One quotient structure per equivalence relation on the constants.

    The carrier holds the first constant of each class; every constant denotes
    the representative of its class and ``=``, ``!=`` are identity and difference.
    """
    if not constants:
        return [FiniteStructure(("*",), name="{}")]
    structures: list[FiniteStructure] = []
    for partition in set_partitions(constants):
        representative = {c: block[0] for block in partition for c in block}
        label = "".join("{" + ",".join(block) + "}" for block in partition)
        functions = {c: {(): r} for c, r in representative.items()}
        structures.append(FiniteStructure(tuple(b[0] for b in partition), functions=functions, name=label))
    logger.info(f"{len(structures)} partitions of {len(constants)} constants")
    return structures


def decide_datalog(sig: Signature, clauses: Sequence[Clause], cell_budget: int | None = None) -> Decision:
    """
    Decide a higher-order Datalog clause set over its constants with (dis)equality.

    Raises:
        FrameBudgetExceededError: If a frame is too large to enumerate
    """
    budget = cell_budget if cell_budget is not None else settings.FRAME_CELL_BUDGET
    return decide_structures(sig, clauses, datalog_structures(sig.constants()), budget)
