"""Independent re-checking of refutation traces."""

from __future__ import annotations

import logging

from ..clauses import Clause, DefiniteClause, GoalClause
from ..syntax import HochcError, Lam, Sym, Var, spine
from .lia_service import linear_atom
from .resolution_service import (
    ClauseSet,
    DerivationTrace,
    HeadMismatchError,
    RenamingError,
    Rule,
    Step,
    background_part,
    beta_rule,
    is_constraint_goal,
    resolve,
)
from .structure_service import (
    Finite,
    LiaStandard,
    PreconditionViolatedError,
    TheoryHandle,
    check_background,
    eval_background,
)

logger = logging.getLogger(__name__)


class ReplayMismatchError(HochcError):
    """Raised when a trace step cannot be re-derived from its premises."""

    def __init__(self, step: int, reason: str) -> None:
        super().__init__(f"step {step}: {reason}")
        self.step = step
        self.reason = reason


def _premise(clauses: dict[int, Clause], k: int, index: int) -> Clause:
    if index not in clauses:
        raise ReplayMismatchError(k, f"premise {index} is not available")
    return clauses[index]


def _goal_premise(clauses: dict[int, Clause], k: int, index: int) -> GoalClause:
    clause = _premise(clauses, k, index)
    if not isinstance(clause, GoalClause):
        raise ReplayMismatchError(k, f"premise {index} is not a goal clause")
    return clause


def _subst_text(subst: tuple) -> list[tuple[str, str]]:
    return [(v, str(m)) for v, m in subst]


def _replay_resolution(clauses: dict[int, Clause], k: int, step: Step) -> None:
    if len(step.premises) != 2:
        raise ReplayMismatchError(k, "resolution needs a goal and a definite premise")
    goal = _goal_premise(clauses, k, step.premises[0])
    definite = _premise(clauses, k, step.premises[1])
    if not isinstance(definite, DefiniteClause):
        raise ReplayMismatchError(k, f"premise {step.premises[1]} is not a definite clause")
    renaming: dict[str, str] = {}
    for old, new in step.subst[len(definite.head_args) :]:
        if not isinstance(new, Var) or old in renaming:
            raise ReplayMismatchError(k, f"{old} := {new} is not a renaming")
        renaming[old] = new.name
    for atom_index, atom in enumerate(goal.atoms):
        head, _ = spine(atom)
        if not (isinstance(head, Sym) and head.name == definite.head_rel):
            continue
        try:
            derived, subst = resolve(goal, atom_index, definite, renaming=renaming)
        except (HeadMismatchError, RenamingError) as e:
            logger.debug(f"step {k}: atom {atom_index} does not re-derive: {e}")
            continue
        if derived == step.clause and _subst_text(subst) == _subst_text(step.subst):
            return
    raise ReplayMismatchError(k, f"no atom of clause {step.premises[0]} resolves to the recorded conclusion")


def _replay_beta(clauses: dict[int, Clause], k: int, step: Step) -> None:
    if len(step.premises) != 1:
        raise ReplayMismatchError(k, "beta reduction has exactly one premise")
    goal = _goal_premise(clauses, k, step.premises[0])
    for atom_index, atom in enumerate(goal.atoms):
        head, args = spine(atom)
        if not (isinstance(head, Lam) and args):
            continue
        derived, subst = beta_rule(goal, atom_index)
        if derived.key == step.clause.key and _subst_text(subst) == _subst_text(step.subst):
            return
    raise ReplayMismatchError(k, f"no redex of clause {step.premises[0]} reduces to the recorded conclusion")


def _replay_constraint(
    theory: TheoryHandle, clause_set: ClauseSet, clauses: dict[int, Clause], k: int, step: Step
) -> None:
    sig = clause_set.signature
    if not step.clause.is_empty:
        raise ReplayMismatchError(k, "constraint refutation must conclude the empty clause")
    goals = [_goal_premise(clauses, k, i) for i in step.premises]
    for index, goal in zip(step.premises, goals, strict=True):
        if not is_constraint_goal(sig, goal):
            raise ReplayMismatchError(k, f"clause {index} has a foreground atom with a non-variable head")
    match theory:
        case LiaStandard():
            if len(goals) != 1:
                raise ReplayMismatchError(k, "over LIA constraint refutation uses a single goal")
            witness = dict(step.witness)
            for atom in background_part(sig, goals[0]).atoms:
                try:
                    check_background(theory, atom)
                except PreconditionViolatedError as e:
                    raise ReplayMismatchError(k, str(e)) from e
                if not linear_atom(atom).holds(witness):
                    raise ReplayMismatchError(k, f"witness {witness} violates {atom}")
        case Finite(structures=structures):
            covered = {e.structure for e in step.evidence}
            if covered != set(range(len(structures))):
                raise ReplayMismatchError(k, "evidence does not cover every structure of the family")
            for e in step.evidence:
                if e.goal not in step.premises:
                    raise ReplayMismatchError(k, f"evidence names clause {e.goal}, which is not a premise")
                assert e.structure is not None  # noqa: S101
                struct = structures[e.structure]
                goal = _goal_premise(clauses, k, e.goal)
                for atom in background_part(sig, goal).atoms:
                    if not eval_background(struct, atom, e.valuation):  # type: ignore[arg-type]
                        reason = f"valuation {e.valuation} violates {atom} in structure {e.structure}"
                        raise ReplayMismatchError(k, reason)


def replay(theory: TheoryHandle, clause_set: ClauseSet, trace: DerivationTrace) -> bool:
    """
    Re-derive every step of ``trace`` from the input clauses.

    Args:
        theory: Background theory the trace was produced for
        clause_set: The input clauses, numbered from 1
        trace: The trace to check

    Returns:
        True when every step re-derives and the last one concludes the empty clause

    Raises:
        ReplayMismatchError: Describing the first step that does not re-derive
    """
    clauses: dict[int, Clause] = dict(enumerate(clause_set.clauses, start=1))
    for k, step in enumerate(trace.steps, start=1):
        if step.conclusion in clauses:
            raise ReplayMismatchError(k, f"conclusion index {step.conclusion} is already taken")
        match step.rule:
            case Rule.RESOLUTION:
                _replay_resolution(clauses, k, step)
            case Rule.BETA:
                _replay_beta(clauses, k, step)
            case Rule.CONSTRAINT:
                _replay_constraint(theory, clause_set, clauses, k, step)
        clauses[step.conclusion] = step.clause
    if not trace.steps or not trace.steps[-1].clause.is_empty:
        raise ReplayMismatchError(len(trace.steps), "trace does not end with the empty clause")
    logger.debug(f"Replayed {len(trace.steps)} steps")
    return True
