"""Tests for the first-order translation."""

from __future__ import annotations

from unittest import TestCase

from ..services import (
    LambdaPresentError,
    NativeFormatHandler,
    comprehension_axiom,
    floor_clause,
    floor_term,
    lift,
    translate,
)
from ..services.translation_service import type_code
from ..syntax import BOOL, INT, App, Lam, Sym, Var, arrow
from .helpers import ITER_TYPE, iv, load, op

ITER_RULE = (
    "(clause ((n Int) (f R_iiio) (s Int) (y Int) (x Int))"
    " (=> (and (> n 0)"
    " (H (app_io (app_iio (app_iiio (app_LiiioJiiio c_Iter f) s) (- n 1)) y))"
    " (H (app_io (app_iio (app_iiio f n) y) x)))"
    " (H (app_io (app_iio (app_iiio (app_LiiioJiiio c_Iter f) s) n) x))))"
)

ITER_COMPREHENSION = "(clause ((x1 Int) (x2 Int) (x3 Int)) (H (app_io (app_iio (app_iiio comp_iiio x1) x2) x3)))"


class TypeCodeTestCase(TestCase):
    """Test cases for mangled type names."""

    def test_codes(self) -> None:
        self.assertEqual(type_code(INT), "i")
        self.assertEqual(type_code(BOOL), "o")
        self.assertEqual(type_code(ITER_TYPE), "iiio")
        self.assertEqual(type_code(arrow(ITER_TYPE, INT, INT, INT, BOOL)), "LiiioJiiio")


class TranslateTestCase(TestCase):
    """Test cases for translate."""

    def setUp(self) -> None:
        problem = load("iter.hochc")
        self.translation = translate(problem.signature, list(problem.clauses))
        self.lines = NativeFormatHandler().emit(self.translation).splitlines()

    def test_sorts_in_order_of_first_use(self) -> None:
        self.assertEqual(self.translation.sorts, ("R_iiio", "R_LiiioJiiio", "R_o", "R_iio", "R_io"))

    def test_declarations(self) -> None:
        self.assertEqual(
            [line for line in self.lines if line.startswith("(fun ")],
            [
                "(fun c_Add () R_iiio)",
                "(fun c_Iter () R_LiiioJiiio)",
                "(fun H (R_o) Bool)",
                "(fun app_iiio (R_iiio Int) R_iio)",
                "(fun app_iio (R_iio Int) R_io)",
                "(fun app_io (R_io Int) R_o)",
                "(fun app_LiiioJiiio (R_LiiioJiiio R_iiio) R_iiio)",
                "(fun comp_iiio () R_iiio)",
            ],
        )

    def test_recursive_rule(self) -> None:
        self.assertIn(ITER_RULE, self.lines)

    def test_comprehension_axiom_comes_last(self) -> None:
        self.assertEqual(self.translation.comprehension_types, (ITER_TYPE,))
        self.assertEqual(self.lines[-1], ITER_COMPREHENSION)
        self.assertEqual(len(self.translation.clauses), 5)

    def test_goal_has_no_positive_literal(self) -> None:
        goal = self.translation.clauses[3]
        self.assertIsNone(goal.positive)
        self.assertEqual(str(goal).split(" (not ")[0], "(not (>= n 1))")


class FloorTestCase(TestCase):
    """Test cases for translating single terms."""

    def test_background_term_is_kept(self) -> None:
        problem = load("iter.hochc")
        m = op("<=", iv("x"), op("+", iv("n"), iv("n")))
        self.assertEqual(floor_term(problem.signature, m), m)

    def test_relational_variable(self) -> None:
        problem = load("iter.hochc")
        f = Var("f", ITER_TYPE)
        m = App(App(App(f, iv("n")), iv("y")), iv("x"))
        self.assertEqual(str(floor_term(problem.signature, m)), "(app_io (app_iio (app_iiio f n) y) x)")

    def test_definite_clause(self) -> None:
        problem = load("iter.hochc")
        self.assertEqual(
            str(floor_clause(problem.signature, problem.clauses[1])),
            "(not (<= n 0)) (not (= s x)) (H (app_io (app_iio (app_iiio (app_LiiioJiiio c_Iter f) s) n) x))",
        )

    def test_lambda_is_rejected(self) -> None:
        problem = load("bsr_example.hochc")
        with self.assertRaises(LambdaPresentError):
            translate(problem.signature, list(problem.clauses))
        with self.assertRaises(LambdaPresentError):
            floor_term(problem.signature, App(Sym("U"), Lam("z", INT, op("R", iv("z")))))

    def test_lifted_problem_translates(self) -> None:
        problem = load("bsr_example.hochc")
        lifted = lift(problem.signature, list(problem.clauses))
        translation = translate(lifted.signature, list(lifted.clauses))
        self.assertEqual(translation.comprehension_types, (arrow(INT, BOOL),))
        self.assertIn("c__lam0", translation.signature.background)

    def test_comprehension_axiom_of_predicate(self) -> None:
        problem = load("bsr_example.hochc")
        axiom = comprehension_axiom(problem.signature, arrow(INT, BOOL))
        self.assertEqual(str(axiom), "(H (app_io comp_io x1))")
