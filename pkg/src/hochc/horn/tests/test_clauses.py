"""Tests for clause classification, posex and program extraction."""

from __future__ import annotations

from unittest import TestCase

from ..clauses import (
    AtomKind,
    DefiniteClause,
    GoalClause,
    NotAnAtomError,
    canonical_false,
    canonical_true,
    classify_atom,
    merge_duplicates,
    posex,
    program_of,
)
from ..syntax import BOOL, INT, App, Signature, Sym, Var, arrow, equality_background, neg, show
from .helpers import iv, lia_signature, load, op


class AtomTestCase(TestCase):
    """Test cases for background and foreground atoms."""

    def setUp(self) -> None:
        self.sig = lia_signature({"R": arrow(INT, BOOL)})

    def test_classification(self) -> None:
        self.assertEqual(classify_atom(self.sig, op("<=", iv("x"), 0)).kind, AtomKind.BACKGROUND)
        self.assertEqual(classify_atom(self.sig, App(Sym("R"), iv("x"))).kind, AtomKind.FOREGROUND)
        f = Var("f", arrow(INT, BOOL))
        self.assertEqual(classify_atom(self.sig, App(f, iv("x"))).kind, AtomKind.FOREGROUND)

    def test_logical_symbols_are_not_atoms(self) -> None:
        with self.assertRaises(NotAnAtomError):
            classify_atom(self.sig, neg(op("<=", iv("x"), 0)))

    def test_non_formulas_are_not_atoms(self) -> None:
        with self.assertRaises(NotAnAtomError):
            classify_atom(self.sig, op("+", iv("x"), 1))


class ClauseTestCase(TestCase):
    """Test cases for clause identity and printing."""

    def test_keys_identify_renamed_clauses(self) -> None:
        left = GoalClause((op("<=", iv("x"), iv("y")),))
        right = GoalClause((op("<=", iv("a"), iv("b")),))
        swapped = GoalClause((op("<=", iv("y"), iv("x")),))
        self.assertEqual(left.key, right.key)
        self.assertEqual(left.key, swapped.key)
        self.assertNotEqual(left.key, GoalClause((op("<=", iv("x"), iv("x")),)).key)

    def test_merge_duplicates_keeps_first_occurrence(self) -> None:
        a, b = op("<=", iv("x"), 0), op(">=", iv("x"), 1)
        self.assertEqual(merge_duplicates([a, b, a]), (a, b))

    def test_printing(self) -> None:
        goal = GoalClause((op(">=", iv("n"), 1), op("<=", iv("x"), 2)))
        self.assertEqual(str(goal), "(goal (>= n 1) (<= x 2))")
        self.assertEqual(str(GoalClause(())), "false")
        fact = DefiniteClause((), "R", (iv("x"),))
        self.assertEqual(str(fact), "(rule (R x))")
        rule = DefiniteClause((op(">=", iv("x"), 5),), "R", (iv("x"),))
        self.assertEqual(str(rule), "(rule (=> (>= x 5) (R x)))")


class ProgramTestCase(TestCase):
    """Test cases for positive existential formulas and programs."""

    def test_posex_of_goal(self) -> None:
        problem = load("iter.hochc")
        goal = problem.goals[0]
        self.assertEqual(
            show(posex(problem.signature, goal)),
            "(exists ((n Int) (x Int)) (and (>= n 1) (Iter Add n n x) (<= x (+ n n))))",
        )

    def test_posex_of_empty_clause_is_true(self) -> None:
        sig = lia_signature()
        self.assertEqual(posex(sig, GoalClause(())), canonical_true(sig))

    def test_program_of_iter(self) -> None:
        problem = load("iter.hochc")
        program = program_of(problem.signature, problem.rules)
        self.assertEqual([v.name for v in program.params["Iter"]], ["f", "s", "n", "x"])
        self.assertEqual(
            show(program.bodies["Iter"]),
            "(or (and (<= n 0) (= s x)) (exists ((y Int)) (and (> n 0) (Iter f s (- n 1) y) (f n y x))))",
        )
        self.assertEqual(show(program.bodies["Add"]), "(= z (+ x y))")

    def test_later_clauses_are_renamed_onto_parameters(self) -> None:
        sig = lia_signature({"R": arrow(INT, BOOL)})
        first = DefiniteClause((op(">=", iv("x"), 5),), "R", (iv("x"),))
        second = DefiniteClause((App(Sym("R"), op("-", iv("y"), 5)),), "R", (iv("y"),))
        program = program_of(sig, [first, second])
        self.assertEqual(show(program.bodies["R"]), "(or (>= x 5) (R (- x 5)))")

    def test_undefined_symbol_gets_canonical_false(self) -> None:
        sig = lia_signature({"R": arrow(INT, BOOL)})
        program = program_of(sig, [])
        self.assertEqual(program.bodies["R"], canonical_false(sig))
        self.assertEqual(show(program.abstraction("R")), "(lambda ((x1 Int)) (= 0 1))")

    def test_canonical_false_without_numerals(self) -> None:
        sig = Signature(equality_background(["a"]))
        self.assertEqual(show(canonical_false(sig)), "(!= a a)")
