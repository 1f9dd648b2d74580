"""Tests for finite frames, canonical models and model checking."""

from __future__ import annotations

import itertools
import random
from unittest import TestCase

from ..clauses import Clause, DefiniteClause, GoalClause, program_of
from ..services import (
    Finite,
    FiniteFrame,
    FiniteStructure,
    FrameBudgetExceededError,
    ModelSat,
    ModelUnsat,
    UnboundValuationError,
    canonical_structure,
    decide_finite,
    dump_expansion,
    eval_term,
    immediate_consequence,
    model_check,
    theory_handle,
)
from ..services.model_service import Table, leq_expansions
from ..syntax import BOOL, INT, App, Lam, Signature, Sym, Term, Var, arrow, equality_background
from .helpers import all_expansions, iv, load, op

TWO = FiniteStructure(("a", "b"), functions={"c": {(): "a"}}, name="two")

SIG = Signature(
    equality_background(("c",)),
    {"R": arrow(INT, BOOL), "Q": arrow(INT, INT, BOOL), "W": arrow(arrow(INT, BOOL), BOOL)},
)

Atom = tuple[str, ...]


def term_of(atom: Atom) -> Term:
    match atom:
        case ("W", "R"):
            return App(Sym("W"), Sym("R"))
        case ("W", "Q", u):
            return App(Sym("W"), Lam("z", INT, op("Q", iv("z"), iv(u))))
    rel, *args = atom
    return op(rel, *(Sym(a) if a == "c" else iv(a) for a in args))


def holds(atom: Atom, valuation: dict[str, str], model: set[Atom]) -> bool:
    # the canonical W holds of exactly the predicates true at c
    match atom:
        case ("W", "R"):
            return ("R", "a") in model
        case ("W", "Q", u):
            return ("Q", "a", valuation[u]) in model
    rel, *names = atom
    args = tuple("a" if n == "c" else valuation[n] for n in names)
    if rel == "=":
        return args[0] == args[1]
    if rel == "!=":
        return args[0] != args[1]
    return (rel, *args) in model


def least_model(rules: list[tuple[Atom, list[Atom]]]) -> set[Atom]:
    """Naive bottom-up evaluation over the carrier of ``TWO``."""
    model: set[Atom] = set()
    while True:
        derived = set(model)
        for head, body in rules:
            for values in itertools.product(TWO.carrier, repeat=3):
                valuation = dict(zip("xyz", values, strict=True))
                if all(holds(a, valuation, model) for a in body):
                    derived.add((head[0], *(valuation[v] for v in head[1:])))
        if derived == model:
            return model
        model = derived


def random_atom(rng: random.Random) -> Atom:
    u, v = rng.choice("xyz"), rng.choice("xyz")
    return rng.choice([("=", u, v), ("!=", u, v), ("=", u, "c"), ("R", u), ("Q", u, v)])


def random_goal(rng: random.Random) -> list[Atom]:
    """A goal around one atom of the order-2 symbol ``W``, applied to ``R`` or to a lambda over ``Q``."""
    w: Atom = ("W", "R") if rng.random() < 0.5 else ("W", "Q", rng.choice("xyz"))
    return [w, *(random_atom(rng) for _ in range(rng.randint(0, 2)))]


class FrameTestCase(TestCase):
    """Test cases for domains of the full frame."""

    def test_domains(self) -> None:
        frame = FiniteFrame(TWO)
        self.assertEqual(frame.domain(INT), ("a", "b"))
        self.assertEqual(frame.domain(BOOL), (0, 1))
        predicates = frame.domain(arrow(INT, BOOL))
        self.assertEqual(len(predicates), 4)
        self.assertTrue(all(isinstance(p, Table) for p in predicates))
        self.assertEqual(len(frame.domain(arrow(INT, INT, BOOL))), 16)

    def test_order_is_pointwise(self) -> None:
        frame = FiniteFrame(TWO)
        ty = arrow(INT, BOOL)
        bottom = frame.bottom(ty)
        top = frame.table(INT, lambda _: 1)
        self.assertTrue(frame.leq(ty, bottom, top))
        self.assertFalse(frame.leq(ty, top, bottom))
        self.assertEqual(frame.join(ty, bottom, top), top)

    def test_budget(self) -> None:
        frame = FiniteFrame(TWO, cell_budget=10)
        with self.assertRaises(FrameBudgetExceededError):
            frame.domain(arrow(INT, INT, BOOL))


class CanonicalModelTestCase(TestCase):
    """Test cases for the canonical model of a program."""

    def test_reflexive_closure(self) -> None:
        clauses = [
            DefiniteClause((op("=", iv("x"), Sym("c")),), "R", (iv("x"),)),
            DefiniteClause((op("R", iv("x")),), "R", (iv("x"),)),
        ]
        frame = FiniteFrame(TWO)
        exp = canonical_structure(frame, SIG, program_of(SIG, clauses))
        self.assertEqual(dump_expansion(frame, SIG, exp)[:2], ["R(a) = 1", "R(b) = 0"])
        goal_ok = GoalClause((op("R", iv("x")), op("!=", iv("x"), Sym("c"))))
        goal_bad = GoalClause((op("R", Sym("c")),))
        self.assertIsInstance(model_check(frame, SIG, exp, [*clauses, goal_ok]), ModelSat)
        result = model_check(frame, SIG, exp, [*clauses, goal_ok, goal_bad])
        assert isinstance(result, ModelUnsat)
        self.assertEqual(result.clause_index, 4)
        self.assertEqual(result.valuation, {})

    def test_eval_term(self) -> None:
        clauses = [DefiniteClause((op("=", iv("x"), Sym("c")),), "R", (iv("x"),))]
        frame = FiniteFrame(TWO)
        exp = canonical_structure(frame, SIG, program_of(SIG, clauses))
        self.assertEqual(eval_term(frame, SIG, exp, App(Lam("z", INT, op("R", iv("z"))), Sym("c")), {}), 1)
        self.assertEqual(eval_term(frame, SIG, exp, op("R", iv("x")), {"x": "b"}), 0)
        with self.assertRaises(UnboundValuationError):
            eval_term(frame, SIG, exp, op("R", iv("x")), {})

    def test_higher_order_argument(self) -> None:
        sig = Signature(equality_background(("c",)), {"S": arrow(arrow(INT, BOOL), BOOL)})
        p = Var("p", arrow(INT, BOOL))
        clauses = [DefiniteClause((App(p, Sym("c")),), "S", (p,))]
        frame = FiniteFrame(TWO)
        exp = canonical_structure(frame, sig, program_of(sig, clauses))
        rows = dump_expansion(frame, sig, exp)
        self.assertEqual(len(rows), 4)
        self.assertEqual(sum(row.endswith("= 1") for row in rows), 2)

    def test_random_programs_against_brute_force(self) -> None:
        rng = random.Random(20240617)
        g = Var("g", arrow(INT, BOOL))
        frame = FiniteFrame(TWO)
        expansions = list(all_expansions(frame, SIG))
        self.assertEqual(len(expansions), 4 * 16 * 16)
        for _ in range(30):
            rules: list[tuple[Atom, list[Atom]]] = []
            clauses: list[Clause] = [DefiniteClause((App(g, Sym("c")),), "W", (g,))]
            for _ in range(rng.randint(1, 4)):
                head: Atom = rng.choice([("R", "x"), ("Q", "x", "y")])
                body = [random_atom(rng) for _ in range(rng.randint(1, 3))]
                rules.append((head, body))
                clauses.append(DefiniteClause(tuple(map(term_of, body)), head[0], tuple(iv(v) for v in head[1:])))
            prog = program_of(SIG, clauses)
            exp = canonical_structure(frame, SIG, prog)
            self.assertTrue(leq_expansions(frame, SIG, immediate_consequence(frame, SIG, prog, exp), exp))

            models = [e for e in expansions if isinstance(model_check(frame, SIG, e, clauses), ModelSat)]
            self.assertIn(exp, models)
            self.assertTrue(all(leq_expansions(frame, SIG, exp, e) for e in models))

            model = least_model(rules)
            expected = [f"R({a}) = {int(('R', a) in model)}" for a in TWO.carrier]
            expected += [
                f"Q({a}, {b}) = {int(('Q', a, b) in model)}" for a, b in itertools.product(TWO.carrier, repeat=2)
            ]
            expected += [f"W({{a:{p}, b:{q}}}) = {p}" for p, q in itertools.product((0, 1), repeat=2)]
            self.assertEqual(dump_expansion(frame, SIG, exp), expected)

            goal = random_goal(rng)
            refutable = any(
                all(holds(a, dict(zip("xyz", values, strict=True)), model) for a in goal)
                for values in itertools.product(TWO.carrier, repeat=3)
            )
            full = [*clauses, GoalClause(tuple(map(term_of, goal)))]
            with self.subTest(goal=goal):
                self.assertEqual(isinstance(model_check(frame, SIG, exp, full), ModelUnsat), refutable)
                satisfiable = any(isinstance(model_check(frame, SIG, e, full), ModelSat) for e in models)
                self.assertEqual(satisfiable, not refutable)


class DecideFiniteTestCase(TestCase):
    """Test cases for deciding over a finite family."""

    def test_iter_finite_is_unsat(self) -> None:
        problem = load("iter_finite.hochc")
        theory = theory_handle(problem.theory)
        assert isinstance(theory, Finite)
        outcomes = decide_finite(problem.signature, list(problem.clauses), theory.structures)
        self.assertEqual(len(outcomes), 1)
        self.assertFalse(outcomes[0].is_sat)
        assert isinstance(outcomes[0].result, ModelUnsat)
        self.assertEqual(outcomes[0].result.clause_index, 4)

    def test_iter_finite_without_goal(self) -> None:
        problem = load("iter_finite.hochc")
        theory = theory_handle(problem.theory)
        assert isinstance(theory, Finite)
        definites = [c for c in problem.clauses if isinstance(c, DefiniteClause)]
        outcomes = decide_finite(problem.signature, definites, theory.structures)
        self.assertTrue(outcomes[0].is_sat)
