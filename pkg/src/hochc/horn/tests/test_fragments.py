"""Tests for the HoBHC(SLA) and higher-order Datalog decision procedures."""

from __future__ import annotations

import itertools
import random
from unittest import TestCase

from ..clauses import Clause, DefiniteClause, GoalClause
from ..services import (
    Budget,
    ClauseSet,
    DecisionSat,
    DecisionUnsat,
    Finite,
    FiniteFrame,
    FiniteStructure,
    FragmentError,
    ModelSat,
    Refuted,
    Saturated,
    check_hobhc_sla,
    datalog_structures,
    decide_bsr_sla,
    decide_datalog,
    desugar_sla,
    enumerate_flat_structures,
    linear_atom,
    model_check,
    saturate,
    theory_handle,
)
from ..services.fragment_service import Decision, flatten, require_hobhc_sla, set_partitions
from ..services.resolution_service import Verdict
from ..syntax import BOOL, INT, App, Signature, Sym, Term, Var, arrow, equality_background, numeral, show
from .helpers import all_expansions, clause_set, iv, lia_signature, load, op

SIG = lia_signature({"R": arrow(INT, INT, BOOL)}, constants=("c",))


def goals(clauses: list) -> list[str]:
    return [str(c) for c in clauses]


class SimpleAtomTestCase(TestCase):
    """Test cases for recognising and desugaring simple linear atoms."""

    def test_check(self) -> None:
        x, y = iv("x"), iv("y")
        self.assertTrue(check_hobhc_sla(SIG, GoalClause((op("<=", x, Sym("c")), op("<=", x, y)))))
        self.assertTrue(check_hobhc_sla(SIG, GoalClause((op("<=", op("+", Sym("c"), 3), x),))))
        self.assertFalse(check_hobhc_sla(SIG, GoalClause((op("<=", op("+", x, 1), y),))))
        self.assertFalse(check_hobhc_sla(SIG, GoalClause((op("R", x, Sym("c")),))))

    def test_strict_bounds_shift_the_closed_side(self) -> None:
        clause = GoalClause((op("<", iv("x"), Sym("c")), op(">", iv("x"), 0)))
        self.assertEqual(goals(desugar_sla(SIG, clause)), ["(goal (<= x (- c 1)) (<= (+ 0 1) x))"])

    def test_equality_becomes_two_bounds(self) -> None:
        clause = GoalClause((op("=", iv("x"), Sym("c")),))
        self.assertEqual(goals(desugar_sla(SIG, clause)), ["(goal (<= x c) (<= c x))"])

    def test_disequality_splits_the_clause(self) -> None:
        clause = GoalClause((op("!=", iv("x"), 0), op("<=", iv("x"), Sym("c"))))
        self.assertEqual(
            goals(desugar_sla(SIG, clause)),
            ["(goal (<= x (- 0 1)) (<= x c))", "(goal (<= (+ 0 1) x) (<= x c))"],
        )

    def test_closed_comparison_gets_a_fresh_variable(self) -> None:
        clause = GoalClause((op("<=", Sym("c"), 0),))
        self.assertEqual(goals(desugar_sla(SIG, clause)), ["(goal (<= c z') (<= z' 0))"])

    def test_non_linear_atom_is_left_alone(self) -> None:
        atom = op("<=", op("+", iv("x"), 1), iv("y"))
        self.assertEqual(desugar_sla(SIG, GoalClause((atom,))), [GoalClause((atom,))])


class FlatStructureTestCase(TestCase):
    """Test cases for the enumeration of realisable orderings."""

    def test_constant_and_zero(self) -> None:
        structures = enumerate_flat_structures([Sym("c"), numeral(0)])
        self.assertEqual(len(structures), 3)
        self.assertEqual([s.witness["c"] for s in structures], [1, -1, 0])  # type: ignore[index]
        first = structures[0]
        self.assertEqual(first.carrier, ("c", "0"))
        self.assertTrue(first.holds("<=", ["0", "c"]))
        self.assertFalse(first.holds("<=", ["c", "0"]))
        self.assertEqual(first.constant("_g0"), "c")

    def test_distinct_numerals_have_one_ordering(self) -> None:
        self.assertEqual(len(enumerate_flat_structures([numeral(2), numeral(5), numeral(-1)])), 1)

    def test_flatten_names_ground_terms(self) -> None:
        problem = load("bsr_example.hochc")
        flat = flatten(problem.signature, [problem.clauses[0], problem.clauses[2]])
        self.assertEqual(flat.constants, ("_g0", "_g1", "_g2"))
        self.assertEqual([str(m) for m in flat.ground_terms], ["(- (+ c d) 5)", "c", "-1"])
        self.assertEqual(str(flat.clauses[1]), "(goal (<= _g1 x) (<= x _g2))")
        self.assertEqual(flat.sharp_clause(flat.clauses[1]), problem.clauses[2])


class BsrDecisionTestCase(TestCase):
    """Test cases for decide_bsr_sla."""

    def test_example_is_satisfiable(self) -> None:
        problem = load("bsr_example.hochc")
        decision = decide_bsr_sla(problem.signature, list(problem.clauses))
        assert isinstance(decision, DecisionSat)
        witness = decision.outcome.structure.witness
        assert witness is not None
        self.assertGreaterEqual(witness["c"], 0)
        self.assertLess(witness["d"], witness["c"] - 10)
        self.assertGreaterEqual(decision.tried, 1)

    def test_outside_the_fragment(self) -> None:
        problem = load("iter.hochc")
        with self.assertRaises(FragmentError):
            decide_bsr_sla(problem.signature, list(problem.clauses))

    def test_unsatisfiable_bounds(self) -> None:
        x = iv("x")
        clauses = [GoalClause((op("<=", Sym("c"), x), op("<=", x, Sym("c"))))]
        decision = decide_bsr_sla(SIG, clauses)
        assert isinstance(decision, DecisionUnsat)
        self.assertEqual(len(decision.outcomes), 1)


class DatalogTestCase(TestCase):
    """Test cases for higher-order Datalog."""

    def test_partitions(self) -> None:
        self.assertEqual(list(set_partitions(["a", "b"])), [[["a", "b"]], [["a"], ["b"]]])
        self.assertEqual([len(list(set_partitions("abcd"[:n]))) for n in range(5)], [1, 1, 2, 5, 15])

    def test_quotient_structures(self) -> None:
        structures = datalog_structures(["a", "b", "c"])
        self.assertEqual(
            [s.name for s in structures],
            ["{a,b,c}", "{a,b}{c}", "{a,c}{b}", "{a}{b,c}", "{a}{b}{c}"],
        )
        self.assertEqual(structures[3].carrier, ("a", "b"))
        self.assertEqual(structures[3].constant("c"), "b")

    def test_reachability_is_unsat(self) -> None:
        problem = load("datalog.hochc")
        decision = decide_datalog(problem.signature, list(problem.clauses))
        assert isinstance(decision, DecisionUnsat)
        self.assertEqual(len(decision.outcomes), 5)

    def test_agrees_with_resolution(self) -> None:
        problem = load("datalog.hochc")
        verdict = saturate(theory_handle(problem.theory), clause_set(problem))
        self.assertIsInstance(verdict, Refuted)


PRED = arrow(INT, BOOL)


def random_program(
    rng: random.Random,
    background: list[Term],
    guards: list[Term],
    relations: list[tuple[str, int]],
    max_rules: int = 3,
) -> list[Clause]:
    """
    A random clause set over ``relations`` and the order-2 relation ``U``.

    Bodies may call any relation, including the head itself, and may pass a
    unary relation to ``U``. ``U g`` holds when ``g`` holds at some ``x``
    satisfying one of the ``guards``.
    """
    names = ("x", "y")
    unary = [rel for rel, arity in relations if arity == 1]

    def foreground_atom() -> Term:
        if rng.random() < 0.25:
            return op("U", Sym(rng.choice(unary)))
        rel, arity = rng.choice(relations)
        return op(rel, *(iv(rng.choice(names)) for _ in range(arity)))

    def body_atom() -> Term:
        return foreground_atom() if rng.random() < 0.4 else rng.choice(background)

    g = Var("g", PRED)
    clauses: list[Clause] = [DefiniteClause((App(g, iv("x")), rng.choice(guards)), "U", (g,))]
    for rel, arity in relations:
        for _ in range(rng.randint(1, max_rules)):
            body = [body_atom() for _ in range(rng.randint(1, 2))]
            clauses.append(DefiniteClause(tuple(body), rel, tuple(iv(n) for n in names[:arity])))
    goal = [foreground_atom() for _ in range(rng.randint(1, 2))]
    if rng.random() < 0.5:
        goal.append(rng.choice(background))
    clauses.append(GoalClause(tuple(goal)))
    return clauses


class FlatCompletenessTestCase(TestCase):
    """The enumerated orderings are exactly those realised by small assignments."""

    def test_matches_brute_force(self) -> None:
        c, d = Sym("c"), Sym("d")
        cases: list[list[Term]] = [
            [c, numeral(0)],
            [c, d],
            [c, d, numeral(3)],
            [op("+", c, 1), d, numeral(0)],
            [op("-", c, d), numeral(-2), c],
        ]
        for terms in cases:
            with self.subTest(terms=[str(m) for m in terms]):
                names = [show(m) for m in terms]
                pairs = list(itertools.product(range(len(terms)), repeat=2))
                atoms = [linear_atom(op("<=", terms[i], terms[j])) for i, j in pairs]
                expected = set()
                for vc, vd in itertools.product(range(-20, 21), repeat=2):
                    valuation = {"c": vc, "d": vd}
                    expected.add(tuple(a.holds(valuation) for a in atoms))
                structures = enumerate_flat_structures(terms)
                found = [tuple(s.holds("<=", [names[i], names[j]]) for i, j in pairs) for s in structures]
                self.assertEqual(len(found), len(set(found)))
                self.assertEqual(set(found), expected)


class CrossOracleTestCase(TestCase):
    """
    The decision procedures against exhaustive search on generated problems.

    Every expansion of every structure of the family is model checked; the
    problem is satisfiable iff one of them satisfies all clauses. Saturation
    must agree whenever it terminates within a small budget.
    """

    budget = Budget(max_steps=400, max_clauses=400)

    def exhaustive(self, sig: Signature, clauses: list[Clause], structures: list[FiniteStructure]) -> bool:
        for structure in structures:
            frame = FiniteFrame(structure)
            for expansion in all_expansions(frame, sig):
                if isinstance(model_check(frame, sig, expansion, clauses), ModelSat):
                    return True
        return False

    def check(
        self, decision: Decision, sig: Signature, clauses: list[Clause], expected: bool, verdict: Verdict
    ) -> None:
        if isinstance(decision, DecisionSat):
            outcome = decision.outcome
            self.assertTrue(expected)
            self.assertIsInstance(model_check(outcome.frame, sig, outcome.expansion, clauses), ModelSat)
        else:
            self.assertFalse(expected)
        if isinstance(verdict, Refuted):
            self.assertFalse(expected)
        elif isinstance(verdict, Saturated):
            self.assertTrue(expected)

    def test_datalog(self) -> None:
        rng = random.Random(7)
        points: list[Term] = [iv("x"), iv("y"), Sym("a"), Sym("b")]
        background = [op(rel, u, v) for rel in ("=", "!=") for u in points for v in points if u != v]
        guards = [op(rel, iv("x"), Sym(k)) for rel in ("=", "!=") for k in ("a", "b")]
        sig = Signature(
            equality_background(("a", "b")),
            {"P": PRED, "Q": arrow(INT, INT, BOOL), "U": arrow(PRED, BOOL)},
        )
        structures = datalog_structures(["a", "b"])
        theory = Finite(tuple(structures))
        for index in range(50):
            clauses = random_program(rng, background, guards, [("P", 1), ("Q", 2)])
            with self.subTest(index=index, clauses=goals(clauses)):
                decision = decide_datalog(sig, clauses)
                verdict = saturate(theory, ClauseSet(sig, tuple(clauses)), self.budget)
                self.check(decision, sig, clauses, self.exhaustive(sig, clauses, structures), verdict)

    def test_sla(self) -> None:
        rng = random.Random(11)
        bounds: list[Term] = [Sym("c"), numeral(0)]
        x, y = iv("x"), iv("y")
        guards = [op(rel, x, k) for rel in ("<=", ">=") for k in bounds]
        background = [*guards, *(op(rel, y, k) for rel in ("<=", ">=") for k in bounds), op("<=", x, y), op("<=", y, x)]
        sig = lia_signature({"P": PRED, "S": PRED, "U": arrow(PRED, BOOL)}, constants=("c",))
        for index in range(50):
            clauses = random_program(rng, background, guards, [("P", 1), ("S", 1)])
            with self.subTest(index=index, clauses=goals(clauses)):
                decision = decide_bsr_sla(sig, clauses)
                flat = flatten(sig, require_hobhc_sla(sig, clauses))
                flat_clauses = list(flat.clauses)
                expected = self.exhaustive(flat.signature, flat_clauses, flat.structures())
                family = Finite(tuple(flat.structures()))
                verdict = saturate(family, ClauseSet(flat.signature, flat.clauses), self.budget)
                self.check(decision, flat.signature, flat_clauses, expected, verdict)
