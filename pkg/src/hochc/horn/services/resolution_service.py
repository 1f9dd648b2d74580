"""The resolution calculus and its fair saturation loop.

Three rules act on goal clauses: Resolution against a definite clause,
beta reduction of an atom with a lambda head, and constraint refutation,
which derives the empty clause from goals whose foreground atoms all have
variable heads and whose background atoms are satisfiable. Over a finite
family of structures the refutation may use several goals, one per
structure.
"""

from __future__ import annotations

import logging
import re
from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from typing import TypeAlias

from ...config import settings
from ..clauses import (
    Clause,
    DefiniteClause,
    GoalClause,
    has_variable_head,
    is_background_atom,
    merge_duplicates,
)
from ..syntax import HochcError, Lam, Signature, Sym, Term, Var, beta_reduce_head, show, size, spine, substitute
from .lia_service import Sat, linear_atom, lia_conjunction_sat
from .structure_service import (
    Evidence,
    Finite,
    LiaStandard,
    PreconditionViolatedError,
    TheoryHandle,
    check_background,
    satisfying_valuation,
)

logger = logging.getLogger(__name__)

_SUFFIX = re.compile(r"_\d+$")


class HeadMismatchError(HochcError):
    """Raised when a goal atom and a definite clause head disagree on symbol or arity."""


class RenamingError(HochcError):
    """Raised when a prescribed renaming does not rename the definite clause apart from the goal."""


class NotARedexError(HochcError):
    """Raised when the beta rule is applied to an atom whose head is not a lambda."""


class Rule(Enum):
    RESOLUTION = "Resolution"
    BETA = "BetaReduction"
    CONSTRAINT = "ConstraintRefutation"


@dataclass(frozen=True)
class Budget:
    """Resource limits of one saturation run."""

    max_steps: int = settings.MAX_STEPS
    max_clauses: int = settings.MAX_CLAUSES
    max_term_size: int = settings.MAX_TERM_SIZE
    frame_budget: int = settings.FRAME_CELL_BUDGET


@dataclass(frozen=True)
class ClauseSet:
    """Input clauses numbered from 1 in source order."""

    signature: Signature
    clauses: tuple[Clause, ...]

    @property
    def definites(self) -> list[tuple[int, DefiniteClause]]:
        return [(i, c) for i, c in enumerate(self.clauses, start=1) if isinstance(c, DefiniteClause)]

    @property
    def goals(self) -> list[tuple[int, GoalClause]]:
        return [(i, c) for i, c in enumerate(self.clauses, start=1) if isinstance(c, GoalClause)]


@dataclass(frozen=True)
class Step:
    """One rule application; ``conclusion`` is the stable index of the derived clause."""

    rule: Rule
    premises: tuple[int, ...]
    conclusion: int
    clause: GoalClause
    subst: tuple[tuple[str, Term], ...] = ()
    witness: tuple[tuple[str, int], ...] = ()
    evidence: tuple[Evidence, ...] = ()

    def render(self, k: int) -> str:
        if self.rule is Rule.CONSTRAINT:
            payload = ",".join(f"{v}:={n}" for v, n in self.witness)
        else:
            payload = ",".join(f"{v}:={show(m)}" for v, m in self.subst)
        premises = ",".join(str(p) for p in self.premises)
        line = (
            f"step {k}: {self.rule.value} premises=[{premises}] subst={{{payload}}}"
            f" => clause {self.conclusion}: {self.clause}"
        )
        if self.evidence:
            line += " evidence=[" + ", ".join(str(e) for e in self.evidence) + "]"
        return line


@dataclass(frozen=True)
class DerivationTrace:
    steps: tuple[Step, ...]

    def lines(self) -> list[str]:
        rendered = [step.render(k) for k, step in enumerate(self.steps, start=1)]
        if self.steps and self.steps[-1].clause.is_empty:
            rendered.append("QED")
        return rendered

    def __str__(self) -> str:
        return "\n".join(self.lines())


@dataclass(frozen=True)
class Stats:
    steps: int
    clauses: int
    generations: int
    truncated: bool = False

    def __str__(self) -> str:
        note = ", oversized clauses discarded" if self.truncated else ""
        return f"{self.steps} steps, {self.clauses} clauses, {self.generations} generations{note}"


@dataclass(frozen=True)
class Refuted:
    trace: DerivationTrace
    stats: Stats


@dataclass(frozen=True)
class Saturated:
    stats: Stats


@dataclass(frozen=True)
class BudgetExhausted:
    stats: Stats


Verdict: TypeAlias = Refuted | Saturated | BudgetExhausted


class NameSupply:
    """Monotone supply of fresh variable names ``stem_k``."""

    def __init__(self) -> None:
        self.counter = 0

    def fresh(self, base: str, avoid: set[str]) -> str:
        stem = _SUFFIX.sub("", base)
        while True:
            self.counter += 1
            name = f"{stem}_{self.counter}"
            if name not in avoid:
                return name


def resolve(
    goal: GoalClause,
    atom_index: int,
    definite: DefiniteClause,
    supply: NameSupply | None = None,
    renaming: Mapping[str, str] | None = None,
) -> tuple[GoalClause, tuple[tuple[str, Term], ...]]:
    """
    Resolve the selected goal atom ``R Ms`` against ``G' or R xs``.

    The definite clause's non-head variables that clash with the goal's free
    variables are renamed apart first, with fresh names from ``supply`` or
    exactly as ``renaming`` prescribes; the new atoms take the place of the
    resolved atom.

    Args:
        goal: The goal clause
        atom_index: Position of the selected atom in ``goal``
        definite: The definite clause
        supply: Fresh-name supply used for renaming apart
        renaming: Old to new names of the clashing variables, replacing ``supply``

    Returns:
        The resolvent and the substitution applied to the definite clause: the
        head bindings ``x := M`` in head order, then the renamings ``y := y_k``

    Raises:
        HeadMismatchError: If relation symbols or arities differ
        RenamingError: If ``renaming`` misses a clashing variable, renames a
            variable that does not clash, or introduces a name already in use
    """
    head, args = spine(goal.atoms[atom_index])
    if not isinstance(head, Sym) or head.name != definite.head_rel:
        raise HeadMismatchError(f"atom {show(goal.atoms[atom_index])} does not match head {show(definite.head)}")
    if len(args) != len(definite.head_args):
        raise HeadMismatchError(
            f"arity mismatch: {len(args)} arguments against {len(definite.head_args)} head variables of {head.name}"
        )
    supply = supply or NameSupply()
    goal_names = {v.name for v in goal.free_vars}
    avoid = goal_names | {v.name for v in definite.free_vars}
    bindings: dict[Var, Term] = dict(zip(definite.head_args, args, strict=True))
    renamed: list[tuple[str, Term]] = []
    for v in sorted(definite.free_vars - set(definite.head_args), key=lambda v: v.name):
        if v.name not in goal_names:
            continue
        if renaming is None:
            name = supply.fresh(v.name, avoid)
        else:
            name = renaming.get(v.name, "")
            if not name or name in avoid:
                raise RenamingError(f"{v.name} must be renamed to a name not in use, got {name or 'nothing'}")
        avoid.add(name)
        bindings[v] = Var(name, v.type)
        renamed.append((v.name, bindings[v]))
    if renaming is not None and set(renaming) != {old for old, _ in renamed}:
        extra = sorted(set(renaming) - {old for old, _ in renamed})
        raise RenamingError(f"renaming of {', '.join(extra)}, which do not clash with the goal")
    new_atoms = [substitute(a, bindings) for a in definite.body]
    atoms = (*goal.atoms[:atom_index], *new_atoms, *goal.atoms[atom_index + 1 :])
    subst = (*((x.name, m) for x, m in zip(definite.head_args, args, strict=True)), *renamed)
    return GoalClause(merge_duplicates(atoms)), subst


def beta_rule(goal: GoalClause, atom_index: int) -> tuple[GoalClause, tuple[tuple[str, Term], ...]]:
    """
    One head beta step on the selected atom.

    Raises:
        NotARedexError: If the atom's head is not a lambda abstraction applied to an argument
    """
    atom = goal.atoms[atom_index]
    head, args = spine(atom)
    reduced = beta_reduce_head(atom)
    if reduced is None or not isinstance(head, Lam):
        raise NotARedexError(f"not a beta redex: {show(atom)}")
    atoms = (*goal.atoms[:atom_index], reduced, *goal.atoms[atom_index + 1 :])
    return GoalClause(merge_duplicates(atoms)), ((head.param, args[0]),)


def is_constraint_goal(sig: Signature, goal: GoalClause) -> bool:
    """True iff every foreground atom of ``goal`` has a variable head."""
    return all(is_background_atom(sig, a) or has_variable_head(a) for a in goal.atoms)


def background_part(sig: Signature, goal: GoalClause) -> GoalClause:
    return GoalClause(tuple(a for a in goal.atoms if is_background_atom(sig, a)))


def constraint_refute(
    theory: TheoryHandle,
    sig: Signature,
    goals: Sequence[tuple[int, GoalClause]],
    conclusion: int = 0,
) -> Step | None:
    """
    Try the constraint refutation rule on the given numbered goals.

    Over LIA the rule fires on the first eligible goal whose background atoms
    are satisfiable, recording the witness. Over a finite family it fires
    when every structure satisfies the background atoms of some eligible goal.

    Returns:
        The step deriving the empty clause, or None when the rule does not apply

    Raises:
        PreconditionViolatedError: Over LIA, if a background atom mentions an uninterpreted constant
    """
    eligible = [(i, g) for i, g in goals if is_constraint_goal(sig, g)]
    match theory:
        case LiaStandard():
            for index, g in eligible:
                atoms = background_part(sig, g).atoms
                for a in atoms:
                    check_background(theory, a)
                result = lia_conjunction_sat([linear_atom(a) for a in atoms])
                if isinstance(result, Sat):
                    witness = tuple(result.witness.items())
                    return Step(Rule.CONSTRAINT, (index,), conclusion, GoalClause(()), witness=witness)
            return None
        case Finite():
            coverage = _FamilyCoverage(theory, sig)
            for index, g in eligible:
                if coverage.add(index, g):
                    return coverage.step(conclusion)
            return None
    raise TypeError(f"unknown theory {theory!r}")


class _FamilyCoverage:
    """Tracks, per structure of a finite family, the first goal satisfied in it."""

    def __init__(self, theory: Finite, sig: Signature) -> None:
        self.theory = theory
        self.sig = sig
        self.covered: dict[int, Evidence] = {}

    def add(self, index: int, goal: GoalClause) -> bool:
        atoms = background_part(self.sig, goal).atoms
        for s_index, struct in enumerate(self.theory.structures):
            if s_index in self.covered:
                continue
            valuation = satisfying_valuation(struct, atoms)
            if valuation is not None:
                self.covered[s_index] = Evidence(index, valuation, s_index)
        return len(self.covered) == len(self.theory.structures)

    def step(self, conclusion: int) -> Step:
        evidence = tuple(self.covered[i] for i in range(len(self.theory.structures)))
        premises = tuple(sorted({e.goal for e in evidence}))
        return Step(Rule.CONSTRAINT, premises, conclusion, GoalClause(()), evidence=evidence)


class _Saturation:
    """State of one saturation run."""

    def __init__(self, theory: TheoryHandle, clause_set: ClauseSet, budget: Budget) -> None:
        self.theory = theory
        self.sig = clause_set.signature
        self.budget = budget
        self.clauses: dict[int, Clause] = dict(enumerate(clause_set.clauses, start=1))
        self.definites = clause_set.definites
        self.keys = {c.key for c in clause_set.clauses}
        self.steps: dict[int, Step] = {}
        self.supply = NameSupply()
        self.applications = 0
        self.generations = 0
        self.truncated = False
        self.coverage = _FamilyCoverage(theory, self.sig) if isinstance(theory, Finite) else None

    def stats(self) -> Stats:
        return Stats(self.applications, len(self.clauses), self.generations, self.truncated)

    def refute(self, index: int, goal: GoalClause) -> Step | None:
        if not is_constraint_goal(self.sig, goal):
            return None
        conclusion = len(self.clauses) + 1
        if self.coverage is not None:
            return self.coverage.step(conclusion) if self.coverage.add(index, goal) else None
        return constraint_refute(self.theory, self.sig, [(index, goal)], conclusion)

    def add(self, step_rule: Rule, premises: tuple[int, ...], derived: GoalClause, subst: tuple) -> int | None:
        """Store a derived goal unless it is a duplicate or oversized; returns its index."""
        if any(size(a) > self.budget.max_term_size for a in derived.atoms):
            logger.debug(f"Discarding oversized clause from premises {premises}")
            self.truncated = True
            return None
        if derived.key in self.keys:
            return None
        self.keys.add(derived.key)
        index = len(self.clauses) + 1
        self.clauses[index] = derived
        self.steps[index] = Step(step_rule, premises, index, derived, subst=subst)
        logger.debug(f"clause {index} by {step_rule.value} from {list(premises)}: {derived}")
        return index

    def successors(self, g_index: int) -> Iterable[tuple[Rule, tuple[int, ...], GoalClause, tuple]]:
        goal = self.clauses[g_index]
        assert isinstance(goal, GoalClause)  # noqa: S101
        for d_index, definite in self.definites:
            for atom_index, atom in enumerate(goal.atoms):
                head, _ = spine(atom)
                if isinstance(head, Sym) and head.name == definite.head_rel:
                    derived, subst = resolve(goal, atom_index, definite, self.supply)
                    yield Rule.RESOLUTION, (g_index, d_index), derived, subst
        for atom_index, atom in enumerate(goal.atoms):
            head, args = spine(atom)
            if isinstance(head, Lam) and args:
                derived, subst = beta_rule(goal, atom_index)
                yield Rule.BETA, (g_index,), derived, subst

    def run(self) -> Verdict:
        frontier = [i for i, c in self.clauses.items() if isinstance(c, GoalClause)]
        for index in frontier:
            step = self.refute(index, self.clauses[index])  # type: ignore[arg-type]
            if step is not None:
                return self.finish(step)
        while frontier:
            self.generations += 1
            next_frontier: list[int] = []
            for g_index in frontier:
                for rule, premises, derived, subst in self.successors(g_index):
                    self.applications += 1
                    if self.applications > self.budget.max_steps:
                        logger.info(f"Step budget exhausted after {self.generations} generations")
                        return BudgetExhausted(self.stats())
                    index = self.add(rule, premises, derived, subst)
                    if index is None:
                        continue
                    if len(self.clauses) > self.budget.max_clauses:
                        logger.info(f"Clause budget exhausted after {self.generations} generations")
                        return BudgetExhausted(self.stats())
                    next_frontier.append(index)
                    step = self.refute(index, derived)
                    if step is not None:
                        return self.finish(step)
            frontier = next_frontier
        if self.truncated:
            logger.info(f"Saturation ended with oversized clauses discarded ({self.stats()})")
            return BudgetExhausted(self.stats())
        logger.info(f"Clause set saturated ({self.stats()})")
        return Saturated(self.stats())

    def finish(self, final: Step) -> Refuted:
        self.clauses[final.conclusion] = final.clause
        self.steps[final.conclusion] = final
        trace = extract_trace(self.steps, final.conclusion)
        logger.info(f"Refutation found: {len(trace.steps)} steps in the proof ({self.stats()})")
        return Refuted(trace, self.stats())


def extract_trace(steps: dict[int, Step], conclusion: int) -> DerivationTrace:
    """The steps from which ``conclusion`` is reachable, in derivation order."""
    needed: set[int] = set()
    pending = deque([conclusion])
    while pending:
        index = pending.popleft()
        if index in needed or index not in steps:
            continue
        needed.add(index)
        pending.extend(steps[index].premises)
    return DerivationTrace(tuple(steps[i] for i in sorted(needed)))


def saturate(theory: TheoryHandle, clause_set: ClauseSet, budget: Budget | None = None) -> Verdict:
    """
    Fair breadth-first saturation.

    All rule applications on goals of generation ``d`` happen before those of
    generation ``d + 1``; within a generation goals are taken by index, then
    definite premises by index, then atoms by position. Constraint refutation
    is tried on the input goals first and on every new goal.

    Args:
        theory: Background theory
        clause_set: Validated input clauses
        budget: Resource limits (defaults from settings)

    Returns:
        ``Refuted`` with a proof trace, ``Saturated``, or ``BudgetExhausted``

    Raises:
        PreconditionViolatedError: If the clauses declare constants and ``theory``
            is the standard model of LIA, which does not interpret them
    """
    budget = budget or Budget()
    constants = clause_set.signature.constants()
    if isinstance(theory, LiaStandard) and constants:
        raise PreconditionViolatedError(
            f"constants {', '.join(constants)} are not interpreted by the standard model of LIA; flatten first"
        )
    logger.info(f"Saturating {len(clause_set.clauses)} clauses over {theory}")
    return _Saturation(theory, clause_set, budget).run()
