"""Tests for the linear integer arithmetic decision procedure."""

from __future__ import annotations

import itertools
import random
from unittest import TestCase

from ..services import (
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
from ..services.lia_service import Relation
from ..syntax import Sym
from .helpers import iv, op

VARIABLES = ("a", "b", "c", "d")


def random_atom(rng: random.Random, variables: tuple[str, ...]) -> LinearAtom:
    coeffs = {v: rng.randint(-5, 5) for v in variables if rng.random() < 0.7}
    lhs = LinearExpr.of(coeffs, rng.randint(-6, 6))
    return LinearAtom(lhs, rng.choice(list(Relation)), LinearExpr.of({}, rng.randint(-6, 6)))


def ceil_div(p: int, q: int) -> int:
    return -(-p // q)


# a*x + r REL 0 as upper bounds s*a*x + s*r + k <= 0, one (s, k) per bound
UPPER_BOUNDS = {
    Relation.LE: [(1, 0)],
    Relation.LT: [(1, 1)],
    Relation.GE: [(-1, 0)],
    Relation.GT: [(-1, 1)],
    Relation.EQ: [(1, 0), (-1, 0)],
    Relation.NE: [],
}


def brute_force(atoms: list[LinearAtom], variables: tuple[str, ...], bound: int) -> dict[str, int] | None:
    """Exhaustive search over [-bound, bound]^k that solves for the last variable directly."""
    *prefix, last = variables
    rows: list[tuple[int, list[tuple[int, int]], int, Relation]] = []
    for atom in atoms:
        diff = atom.lhs.as_dict()
        for v, a in atom.rhs.as_dict().items():
            diff[v] = diff.get(v, 0) - a
        others = [(prefix.index(v), a) for v, a in diff.items() if v != last]
        rows.append((diff.get(last, 0), others, atom.lhs.const - atom.rhs.const, atom.rel))
    for values in itertools.product(range(-bound, bound + 1), repeat=len(prefix)):
        lo, hi = -bound, bound
        excluded: set[int] = set()
        for a, others, const, rel in rows:
            r = const + sum(c * values[i] for i, c in others)
            for s, k in UPPER_BOUNDS[rel]:
                ua, ur = s * a, s * r + k
                if ua > 0:
                    hi = min(hi, -ur // ua)
                elif ua < 0:
                    lo = max(lo, ceil_div(ur, -ua))
                elif ur > 0:
                    lo, hi = 1, 0
            if rel is Relation.NE:
                if a == 0 and r == 0:
                    lo, hi = 1, 0
                elif a != 0 and r % a == 0:
                    excluded.add(-r // a)
        for x in range(lo, hi + 1):
            if x not in excluded:
                return {**dict(zip(prefix, values, strict=True)), last: x}
    return None


class LinearizeTestCase(TestCase):
    """Test cases for reading terms as linear expressions."""

    def test_sum_and_difference(self) -> None:
        expr = linearize(op("-", op("+", iv("x"), iv("x")), op("+", Sym("c"), 3)))
        self.assertEqual(expr.as_dict(), {"x": 2, "c": -1})
        self.assertEqual(expr.const, -3)

    def test_scaling_by_a_numeral(self) -> None:
        self.assertEqual(linearize(op("*", 3, iv("x"))).as_dict(), {"x": 3})
        self.assertEqual(linearize(op("*", iv("x"), -2)).as_dict(), {"x": -2})

    def test_non_linear_product(self) -> None:
        with self.assertRaises(LinearizationError):
            linearize(op("*", iv("x"), iv("y")))

    def test_not_a_literal(self) -> None:
        with self.assertRaises(LinearizationError):
            linear_atom(op("+", iv("x"), 1))


class ConjunctionTestCase(TestCase):
    """Test cases for lia_conjunction_sat on hand-picked conjunctions."""

    def test_refutation_constraint(self) -> None:
        n, x, y = iv("n"), iv("x"), iv("y")
        atoms = [
            op(">=", n, 1),
            op(">", n, 0),
            op("<=", op("-", n, 1), 0),
            op("=", n, y),
            op("=", x, op("+", n, y)),
            op("<=", x, op("+", n, n)),
        ]
        self.assertEqual(lia_terms_sat(atoms), Sat({"n": 1, "x": 2, "y": 1}))

    def test_empty_conjunction(self) -> None:
        self.assertEqual(lia_conjunction_sat([]), Sat({}))

    def test_parity(self) -> None:
        self.assertIsInstance(lia_terms_sat([op("=", op("*", 2, iv("x")), 1)]), Unsat)

    def test_no_integer_between_bounds(self) -> None:
        atoms = [op(">=", op("*", 3, iv("x")), 1), op("<=", op("*", 3, iv("x")), 2)]
        self.assertIsInstance(lia_terms_sat(atoms), Unsat)

    def test_dark_shadow(self) -> None:
        # rationally feasible, no integer point
        x, y = iv("x"), iv("y")
        atoms = [
            op(">=", op("-", op("*", 3, x), op("*", 2, y)), 1),
            op("<=", op("-", op("*", 3, x), op("*", 2, y)), 1),
            op(">=", op("+", op("*", 2, x), op("*", 3, y)), 5),
            op("<=", op("+", op("*", 2, x), op("*", 3, y)), 6),
        ]
        result = lia_terms_sat(atoms)
        expected = brute_force([linear_atom(a) for a in atoms], ("x", "y"), 10)
        self.assertEqual(isinstance(result, Sat), expected is not None)

    def test_disequality(self) -> None:
        x = iv("x")
        self.assertIsInstance(lia_terms_sat([op("!=", x, x)]), Unsat)
        result = lia_terms_sat([op(">=", x, 0), op("<=", x, 1), op("!=", x, 0)])
        self.assertEqual(result, Sat({"x": 1}))


class OracleTestCase(TestCase):
    """Random conjunctions checked against exhaustive search over a box."""

    def check(self, seed: int, cases: int, variables: tuple[str, ...], bound: int) -> None:
        rng = random.Random(seed)
        for case in range(cases):
            k = rng.randint(1, len(variables))
            used = variables[:k]
            atoms = [random_atom(rng, used) for _ in range(rng.randint(1, 6))]
            result = lia_conjunction_sat(atoms)
            with self.subTest(case=case, atoms=[str(a) for a in atoms]):
                if isinstance(result, Sat):
                    self.assertTrue(all(a.holds(result.witness) for a in atoms))
                else:
                    self.assertIsNone(brute_force(atoms, used, bound))

    def test_up_to_three_variables(self) -> None:
        self.check(seed=1, cases=300, variables=VARIABLES[:3], bound=20)

    def test_four_variables(self) -> None:
        self.check(seed=2, cases=200, variables=VARIABLES, bound=20)
