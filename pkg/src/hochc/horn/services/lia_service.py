"""Decision procedure for conjunctions of linear integer arithmetic literals.

Literals are normalised to ``sum(a_i x_i) + c >= 0`` and ``sum(a_i x_i) + c = 0``
with gcd-reduced coefficients. Disequalities are split into two strict cases
up front. Equalities are eliminated by solving for a unit-coefficient variable,
or by the Omega test's mod-hat substitution when there is none. Inequalities
are eliminated one variable at a time: exactly when a coefficient is one,
otherwise by the real shadow, the dark shadow and, if needed, the splinters.
Witnesses are rebuilt by back-substitution, choosing for every eliminated
variable the admissible value closest to zero.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from typing import TypeAlias

from ..syntax import INT, HochcError, Sym, Term, Var, is_numeral, show, spine

logger = logging.getLogger(__name__)

FRESH_PREFIX = "_sigma"


class LinearizationError(HochcError):
    """Raised when a term is not a linear integer expression or literal."""


class LiaSolverError(HochcError):
    """Raised when a computed witness fails re-evaluation."""


class Relation(Enum):
    LT = "<"
    LE = "<="
    EQ = "="
    NE = "!="
    GE = ">="
    GT = ">"


RELATIONS = {r.value: r for r in Relation}


@dataclass(frozen=True)
class LinearExpr:
    """``sum(coeff * name) + const`` with exact integer coefficients."""

    coeffs: tuple[tuple[str, int], ...] = ()
    const: int = 0

    @classmethod
    def of(cls, coeffs: Mapping[str, int], const: int = 0) -> LinearExpr:
        return cls(tuple(sorted((v, a) for v, a in coeffs.items() if a != 0)), const)

    @classmethod
    def variable(cls, name: str) -> LinearExpr:
        return cls(((name, 1),), 0)

    @property
    def variables(self) -> list[str]:
        return [v for v, _ in self.coeffs]

    def coeff(self, name: str) -> int:
        for v, a in self.coeffs:
            if v == name:
                return a
        return 0

    def as_dict(self) -> dict[str, int]:
        return dict(self.coeffs)

    def __add__(self, other: LinearExpr) -> LinearExpr:
        merged = self.as_dict()
        for v, a in other.coeffs:
            merged[v] = merged.get(v, 0) + a
        return LinearExpr.of(merged, self.const + other.const)

    def __sub__(self, other: LinearExpr) -> LinearExpr:
        return self + other.scale(-1)

    def scale(self, k: int) -> LinearExpr:
        return LinearExpr.of({v: k * a for v, a in self.coeffs}, k * self.const)

    def shift(self, k: int) -> LinearExpr:
        return LinearExpr(self.coeffs, self.const + k)

    def substitute(self, name: str, expr: LinearExpr) -> LinearExpr:
        a = self.coeff(name)
        if a == 0:
            return self
        rest = LinearExpr.of({v: b for v, b in self.coeffs if v != name}, self.const)
        return rest + expr.scale(a)

    def evaluate(self, valuation: Mapping[str, int]) -> int:
        return self.const + sum(a * valuation.get(v, 0) for v, a in self.coeffs)

    def __str__(self) -> str:
        parts = [f"{a}*{v}" if a != 1 else v for v, a in self.coeffs]
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts)


@dataclass(frozen=True)
class LinearAtom:
    """``lhs rel rhs`` over linear expressions."""

    lhs: LinearExpr
    rel: Relation
    rhs: LinearExpr

    def holds(self, valuation: Mapping[str, int]) -> bool:
        d = self.lhs.evaluate(valuation) - self.rhs.evaluate(valuation)
        match self.rel:
            case Relation.LT:
                return d < 0
            case Relation.LE:
                return d <= 0
            case Relation.EQ:
                return d == 0
            case Relation.NE:
                return d != 0
            case Relation.GE:
                return d >= 0
            case Relation.GT:
                return d > 0

    @property
    def variables(self) -> set[str]:
        return set(self.lhs.variables) | set(self.rhs.variables)

    def __str__(self) -> str:
        return f"{self.lhs} {self.rel.value} {self.rhs}"


@dataclass(frozen=True)
class Sat:
    """Satisfiable, with a witness for every variable of the input."""

    witness: dict[str, int]


@dataclass(frozen=True)
class Unsat:
    """No integer solution."""


LiaResult: TypeAlias = Sat | Unsat


def linearize(m: Term) -> LinearExpr:
    """
    Read a background term of type Int as a linear expression.

    Variables and uninterpreted constants both become unknowns, keyed by name.

    Raises:
        LinearizationError: If the term is not linear or uses an unknown function
    """
    match m:
        case Var(name=name, type=ty):
            if ty != INT:
                raise LinearizationError(f"variable {name} of type {ty} in arithmetic")
            return LinearExpr.variable(name)
        case Sym(name=name):
            if is_numeral(name):
                return LinearExpr((), int(name))
            return LinearExpr.variable(name)
    head, args = spine(m)
    if isinstance(head, Sym) and len(args) == 2:
        if head.name == "+":
            return linearize(args[0]) + linearize(args[1])
        if head.name == "-":
            return linearize(args[0]) - linearize(args[1])
        if head.name == "*":
            left, right = linearize(args[0]), linearize(args[1])
            if not left.coeffs:
                return right.scale(left.const)
            if not right.coeffs:
                return left.scale(right.const)
            raise LinearizationError(f"non-linear product: {show(m)}")
    raise LinearizationError(f"not a linear integer term: {show(m)}")


def linear_atom(m: Term) -> LinearAtom:
    """Read a background atom ``(rel s t)`` as a linear atom."""
    head, args = spine(m)
    if isinstance(head, Sym) and head.name in RELATIONS and len(args) == 2:
        return LinearAtom(linearize(args[0]), RELATIONS[head.name], linearize(args[1]))
    raise LinearizationError(f"not a linear integer literal: {show(m)}")


def lia_conjunction_sat(atoms: Sequence[LinearAtom]) -> LiaResult:
    """
    Decide a conjunction of linear integer literals.

    Args:
        atoms: The literals; the empty list is satisfiable

    Returns:
        ``Sat`` with a witness covering every variable of ``atoms``, or ``Unsat``

    Raises:
        LiaSolverError: If the witness does not satisfy every literal
    """
    variables = sorted(set().union(*(a.variables for a in atoms))) if atoms else []
    eqs: list[LinearExpr] = []
    geqs: list[LinearExpr] = []
    splits: list[LinearExpr] = []
    for atom in atoms:
        d = atom.lhs - atom.rhs
        match atom.rel:
            case Relation.EQ:
                eqs.append(d)
            case Relation.NE:
                splits.append(d)
            case Relation.LE:
                geqs.append(d.scale(-1))
            case Relation.LT:
                geqs.append(d.scale(-1).shift(-1))
            case Relation.GE:
                geqs.append(d)
            case Relation.GT:
                geqs.append(d.shift(-1))

    # each disequality d != 0 becomes d <= -1 or d >= 1, tried in that order
    for choice in itertools.product((0, 1), repeat=len(splits)):
        branch = [d.scale(-1).shift(-1) if bit == 0 else d.shift(-1) for d, bit in zip(splits, choice, strict=True)]
        solution = _solve(list(eqs), geqs + branch, _Fresh())
        if solution is None:
            continue
        witness = {v: solution.get(v, 0) for v in variables}
        for atom in atoms:
            if not atom.holds(witness):
                logger.error(f"LIA witness {witness} violates {atom}")
                raise LiaSolverError(f"witness {witness} violates {atom}")
        logger.debug(f"LIA: {len(atoms)} literals satisfiable with {witness}")
        return Sat(witness)
    logger.debug(f"LIA: {len(atoms)} literals unsatisfiable")
    return Unsat()


def lia_terms_sat(atoms: Iterable[Term]) -> LiaResult:
    """``lia_conjunction_sat`` on background atom terms."""
    return lia_conjunction_sat([linear_atom(a) for a in atoms])


class _Fresh:
    def __init__(self) -> None:
        self.counter = 0

    def __call__(self) -> str:
        self.counter += 1
        return f"{FRESH_PREFIX}{self.counter}"


def _mod_hat(a: int, m: int) -> int:
    return a - m * ((2 * a + m) // (2 * m))


def _normalize(eqs: list[LinearExpr], geqs: list[LinearExpr]) -> tuple[list[LinearExpr], list[LinearExpr]] | None:
    """Reduce by gcd, drop trivial rows, keep the tightest of parallel rows; None if inconsistent."""
    new_eqs: list[LinearExpr] = []
    for e in eqs:
        if not e.coeffs:
            if e.const != 0:
                return None
            continue
        g = math.gcd(*(a for _, a in e.coeffs))
        if e.const % g != 0:
            return None
        new_eqs.append(LinearExpr(tuple((v, a // g) for v, a in e.coeffs), e.const // g))

    tightest: dict[tuple[tuple[str, int], ...], int] = {}
    for e in geqs:
        if not e.coeffs:
            if e.const < 0:
                return None
            continue
        g = math.gcd(*(a for _, a in e.coeffs))
        coeffs = tuple((v, a // g) for v, a in e.coeffs)
        const = e.const // g
        if coeffs not in tightest or const < tightest[coeffs]:
            tightest[coeffs] = const

    new_geqs: list[LinearExpr] = []
    for coeffs, const in tightest.items():
        opposite = tuple((v, -a) for v, a in coeffs)
        if opposite in tightest:
            total = const + tightest[opposite]
            if total < 0:
                return None
            if total == 0 and coeffs < opposite:
                new_eqs.append(LinearExpr(coeffs, const))
                continue
            if total == 0:
                continue
        new_geqs.append(LinearExpr(coeffs, const))
    return new_eqs, new_geqs


def _solve(eqs: list[LinearExpr], geqs: list[LinearExpr], fresh: _Fresh) -> dict[str, int] | None:
    normalized = _normalize(eqs, geqs)
    if normalized is None:
        return None
    eqs, geqs = normalized
    if eqs:
        return _eliminate_equality(eqs, geqs, fresh)
    if not geqs:
        return {}
    return _eliminate_inequality(geqs, fresh)


def _eliminate_equality(eqs: list[LinearExpr], geqs: list[LinearExpr], fresh: _Fresh) -> dict[str, int] | None:
    e = eqs[0]
    units = [v for v, a in e.coeffs if abs(a) == 1]
    if units:
        x = units[0]
        a = e.coeff(x)
        # a*x + rest = 0 with a = +-1 gives x = -a*rest
        rest = LinearExpr.of({v: b for v, b in e.coeffs if v != x}, e.const)
        expr = rest.scale(-a)
        rest_eqs = eqs[1:]
    else:
        x = min(e.variables, key=lambda v: (abs(e.coeff(v)), v))
        if e.coeff(x) < 0:
            e = e.scale(-1)
        m = e.coeff(x) + 1
        sigma = fresh()
        # x = -m*sigma + sum(mod_hat(a_i, m) x_i) + mod_hat(c, m)
        coeffs = {v: _mod_hat(a, m) for v, a in e.coeffs if v != x}
        coeffs[sigma] = -m
        expr = LinearExpr.of(coeffs, _mod_hat(e.const, m))
        rest_eqs = eqs
    solution = _solve(
        [q.substitute(x, expr) for q in rest_eqs],
        [q.substitute(x, expr) for q in geqs],
        fresh,
    )
    if solution is None:
        return None
    for v in expr.variables:
        solution.setdefault(v, 0)
    solution[x] = expr.evaluate(solution)
    return solution


def _bounds(x: str, geqs: list[LinearExpr]) -> tuple[list[LinearExpr], list[LinearExpr], list[LinearExpr]]:
    lower = [q for q in geqs if q.coeff(x) > 0]
    upper = [q for q in geqs if q.coeff(x) < 0]
    others = [q for q in geqs if q.coeff(x) == 0]
    return lower, upper, others


def _choose_variable(geqs: list[LinearExpr]) -> tuple[str, bool]:
    """Pick the next variable: one-sided first, then exact, then fewest combinations."""
    variables = sorted({v for q in geqs for v in q.variables})
    best: tuple[tuple[int, int, str], str, bool] | None = None
    for x in variables:
        lower, upper, _ = _bounds(x, geqs)
        if not lower or not upper:
            return x, True
        exact = all(q.coeff(x) == 1 for q in lower) or all(q.coeff(x) == -1 for q in upper)
        rank = (0 if exact else 1, len(lower) * len(upper), x)
        if best is None or rank < best[0]:
            best = (rank, x, exact)
    assert best is not None  # noqa: S101
    return best[1], best[2]


def _combine(low: LinearExpr, up: LinearExpr, x: str, dark: bool) -> LinearExpr:
    a = low.coeff(x)
    b = -up.coeff(x)
    combined = low.scale(b) + up.scale(a)
    return combined.shift(-(a - 1) * (b - 1)) if dark else combined


def _pick_value(x: str, lower: list[LinearExpr], upper: list[LinearExpr], solution: dict[str, int]) -> int | None:
    """The admissible integer for ``x`` closest to zero, given the other variables."""
    lo: int | None = None
    hi: int | None = None
    for q in lower:
        a = q.coeff(x)
        rest = q.evaluate(solution) - a * solution.get(x, 0)
        bound = -(rest // a)  # ceil(-rest / a)
        lo = bound if lo is None else max(lo, bound)
    for q in upper:
        b = -q.coeff(x)
        rest = q.evaluate(solution) + b * solution.get(x, 0)
        bound = rest // b
        hi = bound if hi is None else min(hi, bound)
    if lo is not None and hi is not None and lo > hi:
        return None
    if lo is not None and lo > 0:
        return lo
    if hi is not None and hi < 0:
        return hi
    return 0


def _complete(
    x: str, lower: list[LinearExpr], upper: list[LinearExpr], solution: dict[str, int] | None
) -> dict[str, int] | None:
    if solution is None:
        return None
    for q in (*lower, *upper):
        for v in q.variables:
            if v != x:
                solution.setdefault(v, 0)
    solution.pop(x, None)
    value = _pick_value(x, lower, upper, solution)
    if value is None:
        return None
    solution[x] = value
    return solution


def _eliminate_inequality(geqs: list[LinearExpr], fresh: _Fresh) -> dict[str, int] | None:
    x, exact = _choose_variable(geqs)
    lower, upper, others = _bounds(x, geqs)
    if not lower or not upper:
        logger.debug(f"LIA: dropping one-sided variable {x}")
        return _complete(x, lower, upper, _solve([], others, fresh))
    if exact:
        shadow = [_combine(lo, up, x, dark=False) for lo in lower for up in upper]
        return _complete(x, lower, upper, _solve([], others + shadow, fresh))

    real = [_combine(lo, up, x, dark=False) for lo in lower for up in upper]
    if _solve([], others + real, fresh) is None:
        return None
    dark = [_combine(lo, up, x, dark=True) for lo in lower for up in upper]
    solution = _complete(x, lower, upper, _solve([], others + dark, fresh))
    if solution is not None:
        return solution

    logger.debug(f"LIA: dark shadow of {x} empty, exploring splinters")
    a_max = max(-q.coeff(x) for q in upper)
    for low in lower:
        a = low.coeff(x)
        for i in range((a_max * a - a_max - a) // a_max + 1):
            solution = _solve([low.shift(-i)], geqs, fresh)
            if solution is not None:
                return solution
    return None
