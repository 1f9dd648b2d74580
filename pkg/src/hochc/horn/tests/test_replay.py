"""Tests for independent replay of refutation traces."""

from __future__ import annotations

import dataclasses
from unittest import TestCase

from ..clauses import DefiniteClause, GoalClause
from ..services import (
    ClauseSet,
    DerivationTrace,
    LiaStandard,
    Refuted,
    ReplayMismatchError,
    replay,
    saturate,
    theory_handle,
)
from ..syntax import BOOL, INT, Sym, Var, arrow
from .helpers import clause_set, iv, lia_signature, load, op


class ReplayTestCase(TestCase):
    """Test cases for replay."""

    def setUp(self) -> None:
        self.problem = load("iter.hochc")
        self.clauses = clause_set(self.problem)
        verdict = saturate(LiaStandard(), self.clauses)
        assert isinstance(verdict, Refuted)
        self.trace = verdict.trace

    def tampered(self, k: int, **changes: object) -> DerivationTrace:
        steps = list(self.trace.steps)
        steps[k] = dataclasses.replace(steps[k], **changes)
        return DerivationTrace(tuple(steps))

    def test_iter_trace_replays(self) -> None:
        self.assertTrue(replay(LiaStandard(), self.clauses, self.trace))

    def test_tampered_substitution(self) -> None:
        subst = tuple((v, Sym("0") if v == "s" else m) for v, m in self.trace.steps[0].subst)
        with self.assertRaises(ReplayMismatchError) as ctx:
            replay(LiaStandard(), self.clauses, self.tampered(0, subst=subst))
        self.assertEqual(ctx.exception.step, 1)

    def test_witness_violating_an_atom(self) -> None:
        witness = (("n", 1), ("x", 3), ("y", 1))
        with self.assertRaises(ReplayMismatchError) as ctx:
            replay(LiaStandard(), self.clauses, self.tampered(3, witness=witness))
        self.assertEqual(ctx.exception.step, 4)

    def test_wrong_premise(self) -> None:
        with self.assertRaises(ReplayMismatchError):
            replay(LiaStandard(), self.clauses, self.tampered(1, premises=(6, 2)))

    def test_truncated_trace(self) -> None:
        with self.assertRaises(ReplayMismatchError):
            replay(LiaStandard(), self.clauses, DerivationTrace(self.trace.steps[:3]))

    def test_family_trace_replays(self) -> None:
        problem = load("iter_finite.hochc")
        theory = theory_handle(problem.theory)
        clauses = clause_set(problem)
        verdict = saturate(theory, clauses)
        assert isinstance(verdict, Refuted)
        self.assertTrue(replay(theory, clauses, verdict.trace))
        self.assertTrue(verdict.trace.steps[-1].evidence)


class RenamingReplayTestCase(TestCase):
    """Resolution steps that rename the definite clause apart from the goal."""

    def setUp(self) -> None:
        sig = lia_signature({"Q": arrow(INT, BOOL), "R": arrow(INT, BOOL)})
        x, y = iv("x"), iv("y")
        self.clauses = ClauseSet(
            sig,
            (
                DefiniteClause((op(">=", x, 5),), "Q", (x,)),
                DefiniteClause((op("Q", y), op("<=", y, x)), "R", (x,)),
                GoalClause((op("R", y), op(">=", y, 7))),
            ),
        )
        verdict = saturate(LiaStandard(), self.clauses)
        assert isinstance(verdict, Refuted)
        self.trace = verdict.trace

    def with_subst(self, subst: tuple) -> DerivationTrace:
        steps = list(self.trace.steps)
        steps[0] = dataclasses.replace(steps[0], subst=subst)
        return DerivationTrace(tuple(steps))

    def test_renaming_is_recorded(self) -> None:
        first = self.trace.steps[0]
        self.assertEqual(first.premises, (3, 2))
        self.assertEqual([(v, str(m)) for v, m in first.subst], [("x", "y"), ("y", "y_1")])
        self.assertEqual(str(first.clause), "(goal (Q y_1) (<= y_1 y) (>= y 7))")
        self.assertTrue(replay(LiaStandard(), self.clauses, self.trace))

    def test_renaming_onto_a_goal_variable(self) -> None:
        with self.assertRaises(ReplayMismatchError) as ctx:
            replay(LiaStandard(), self.clauses, self.with_subst((("x", iv("y")), ("y", iv("y")))))
        self.assertEqual(ctx.exception.step, 1)

    def test_renaming_that_disagrees_with_the_conclusion(self) -> None:
        with self.assertRaises(ReplayMismatchError) as ctx:
            replay(LiaStandard(), self.clauses, self.with_subst((("x", iv("y")), ("y", iv("w")))))
        self.assertEqual(ctx.exception.step, 1)

    def test_missing_renaming(self) -> None:
        with self.assertRaises(ReplayMismatchError) as ctx:
            replay(LiaStandard(), self.clauses, self.with_subst((("x", iv("y")),)))
        self.assertEqual(ctx.exception.step, 1)

    def test_renaming_to_a_term(self) -> None:
        with self.assertRaises(ReplayMismatchError):
            replay(LiaStandard(), self.clauses, self.with_subst((("x", iv("y")), ("y", Sym("0")))))

    def test_renaming_keeps_the_type(self) -> None:
        renamed = self.trace.steps[0].subst[1][1]
        self.assertEqual(renamed, Var("y_1", INT))
