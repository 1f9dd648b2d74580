"""Parsing and printing of problem files.

A problem file is a sequence of S-expressions: a ``(theory ...)`` header
followed by declarations, rules and goals. ``;`` starts a comment.
"""

from __future__ import annotations

import logging
import re
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field

from ..clauses import Clause, DefiniteClause, GoalClause, Span
from ..schemas.types import ProblemFile, TheoryKind, TheorySpec
from ..syntax import (
    BOOL,
    INT,
    LOGICAL_NAMES,
    HochcError,
    Signature,
    SignatureError,
    Sym,
    Term,
    Type,
    Var,
    apply,
    arrow,
    equality_background,
    is_numeral,
    lambdas,
    lia_background,
    numeral,
    uncurry,
)
from ..syntax.types import is_argument
from .fragment_service import datalog_structures
from .structure_service import (
    Finite,
    FiniteStructure,
    LiaStandard,
    PreconditionViolatedError,
    StructureError,
    TheoryHandle,
)

logger = logging.getLogger(__name__)

TOKEN_RE = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")
IDENTIFIER_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
RESERVED = LOGICAL_NAMES | {"->", "theory", "rule", "goal", "true", "false"}


class ParseError(HochcError):
    """Raised on malformed input, with the position where ``expected`` was expected."""

    def __init__(self, line: int, col: int, expected: str) -> None:
        super().__init__(f"{line}:{col}: expected {expected}")
        self.line = line
        self.col = col
        self.expected = expected


@dataclass(frozen=True)
class SAtom:
    text: str
    span: Span


@dataclass(frozen=True)
class SList:
    items: tuple[SExpr, ...]
    span: Span


SExpr = SAtom | SList


def _tokens(text: str) -> Iterator[tuple[str, Span]]:
    line, line_start = 1, 0
    for match in TOKEN_RE.finditer(text):
        token = match.group()
        span = Span(line, match.start() - line_start + 1)
        if "\n" in token:
            line += token.count("\n")
            line_start = match.start() + token.rindex("\n") + 1
        if token[0].isspace() or token[0] == ";":
            continue
        yield token, span


def read_sexprs(text: str) -> list[SExpr]:
    """
    Read every S-expression of ``text``.

    Raises:
        ParseError: On unbalanced parentheses
    """
    stack: list[tuple[Span, list[SExpr]]] = []
    top: list[SExpr] = []
    last = Span(1, 1)
    for token, span in _tokens(text):
        last = span
        if token == "(":
            stack.append((span, []))
        elif token == ")":
            if not stack:
                raise ParseError(span.line, span.col, "an expression, not ')'")
            start, items = stack.pop()
            node = SList(tuple(items), start)
            (stack[-1][1] if stack else top).append(node)
        else:
            (stack[-1][1] if stack else top).append(SAtom(token, span))
    if stack:
        raise ParseError(last.line, last.col, f"')' closing the list opened at {stack[-1][0]}")
    return top


def _fail(node: SExpr, expected: str) -> ParseError:
    return ParseError(node.span.line, node.span.col, expected)


def _atom_text(node: SExpr, expected: str) -> str:
    if not isinstance(node, SAtom):
        raise _fail(node, expected)
    return node.text


def _list(node: SExpr, expected: str) -> tuple[SExpr, ...]:
    if not isinstance(node, SList):
        raise _fail(node, expected)
    return node.items


def _keyword(node: SExpr) -> str | None:
    if isinstance(node, SList) and node.items and isinstance(node.items[0], SAtom):
        return node.items[0].text
    return None


@dataclass
class _Declarations:
    """Everything declared so far while reading a file."""

    kind: TheoryKind
    background: dict[str, Type] = field(default_factory=dict)
    foreground: dict[str, Type] = field(default_factory=dict)
    variables: dict[str, Type] = field(default_factory=dict)
    constants: list[str] = field(default_factory=list)
    structures: tuple[FiniteStructure, ...] = ()
    sort: str = "Int"

    def signature(self) -> Signature:
        return Signature(self.background, self.foreground, numerals=self.kind is TheoryKind.LIA)

    def is_declared(self, name: str) -> bool:
        return self.signature().type_of(name) is not None or name in self.variables


class _Parser:
    def __init__(self, forms: list[SExpr]) -> None:
        self.forms = forms
        self.decls: _Declarations | None = None
        self.clauses: list[Clause] = []

    @property
    def d(self) -> _Declarations:
        assert self.decls is not None  # noqa: S101
        return self.decls

    def parse(self) -> ProblemFile:
        if not self.forms:
            raise ParseError(1, 1, "a (theory ...) header")
        self.theory(self.forms[0])
        for form in self.forms[1:]:
            match _keyword(form):
                case "declare-const":
                    self.declare_const(form)
                case "declare-rel":
                    self.declare_rel(form)
                case "declare-var":
                    self.declare_var(form)
                case "rule":
                    self.clauses.append(self.rule(form))
                case "goal":
                    self.clauses.append(self.goal(form))
                case "theory":
                    raise _fail(form, "a single (theory ...) header")
                case _:
                    raise _fail(form, "declare-const, declare-rel, declare-var, rule or goal")
        spec = TheorySpec(self.d.kind, tuple(self.d.constants), self.d.structures, self.d.sort)
        return ProblemFile(spec, self.d.signature(), dict(self.d.variables), tuple(self.clauses))

    # Header

    def theory(self, form: SExpr) -> None:
        if _keyword(form) != "theory":
            raise _fail(form, "a (theory ...) header")
        items = _list(form, "(theory ...)")
        if len(items) < 2:
            raise _fail(form, "a theory name: lia, eqdl or finite")
        name = _atom_text(items[1], "a theory name: lia, eqdl or finite")
        match name:
            case "lia":
                if len(items) != 2:
                    raise _fail(items[2], "')' after (theory lia")
                self.decls = _Declarations(TheoryKind.LIA, background=lia_background())
            case "eqdl":
                constants: list[str] = []
                for item in items[2:]:
                    if _keyword(item) != "consts":
                        raise _fail(item, "(consts c1 ... cn)")
                    for node in _list(item, "(consts ...)")[1:]:
                        name = self.fresh_name(node)
                        if name in constants:
                            raise _fail(node, f"distinct constants, {name} is listed twice")
                        constants.append(name)
                self.decls = _Declarations(TheoryKind.EQDL, background=equality_background(constants))
                self.decls.constants = constants
            case "finite":
                self.finite(form, items[2:])
            case _:
                raise _fail(items[1], "a theory name: lia, eqdl or finite")

    def finite(self, form: SExpr, items: tuple[SExpr, ...]) -> None:
        if not items:
            raise _fail(form, "a structure: (sort ...), (fun ...), (rel ...) or (structure ...)")
        if all(_keyword(item) == "structure" for item in items):
            groups = [_list(item, "(structure ...)")[1:] for item in items]
            spans = [item.span for item in items]
        else:
            groups, spans = [items], [form.span]
        structures: list[FiniteStructure] = []
        signatures: list[tuple[str, dict[str, Type]]] = []
        for group, span in zip(groups, spans, strict=True):
            sort, background, structure = self.structure(group, span, len(structures))
            structures.append(structure)
            signatures.append((sort, background))
        sort, background = signatures[0]
        for (other_sort, other), span in zip(signatures[1:], spans[1:], strict=True):
            if other_sort != sort or other != background:
                raise ParseError(span.line, span.col, "the same sort and symbols in every structure")
        background.setdefault("=", arrow(INT, INT, BOOL))
        background.setdefault("!=", arrow(INT, INT, BOOL))
        self.decls = _Declarations(TheoryKind.FINITE, background=background, structures=tuple(structures), sort=sort)

    def structure(
        self, group: tuple[SExpr, ...], span: Span, index: int
    ) -> tuple[str, dict[str, Type], FiniteStructure]:
        sorts = [item for item in group if _keyword(item) == "sort"]
        if len(sorts) != 1:
            raise ParseError(span.line, span.col, "exactly one (sort NAME (e1 ... en))")
        sort_items = _list(sorts[0], "(sort NAME (e1 ... en))")
        if len(sort_items) != 3:
            raise _fail(sorts[0], "(sort NAME (e1 ... en))")
        sort = _atom_text(sort_items[1], "a sort name")
        carrier = tuple(_atom_text(e, "an element name") for e in _list(sort_items[2], "(e1 ... en)"))
        functions: dict[str, dict[tuple[str, ...], str]] = {}
        relations: dict[str, dict[tuple[str, ...], bool]] = {}
        background: dict[str, Type] = {}
        for item in group:
            keyword = _keyword(item)
            if keyword == "sort":
                continue
            if keyword not in ("fun", "rel"):
                raise _fail(item, "(sort ...), (fun ...) or (rel ...)")
            entries = _list(item, f"({keyword} NAME rows...)")
            if len(entries) < 2:
                raise _fail(item, "a symbol name")
            name = _atom_text(entries[1], "a symbol name")
            if name in background:
                raise _fail(entries[1], f"a symbol not yet defined, {name} is")
            rows = [self.row(row, carrier, keyword == "rel") for row in entries[2:]]
            arities = {len(args) for args, _ in rows}
            if len(arities) > 1:
                raise _fail(item, f"rows of one arity for {name}")
            arity = arities.pop() if arities else 0
            if keyword == "fun":
                functions[name] = {args: str(value) for args, value in rows}
                background[name] = arrow(*([INT] * arity), INT)
            else:
                relations[name] = {args: bool(value) for args, value in rows}
                background[name] = arrow(*([INT] * arity), BOOL)
        try:
            structure = FiniteStructure(carrier, functions, relations, name=f"A{index}")
        except StructureError as e:
            raise ParseError(span.line, span.col, f"a well-formed structure ({e})") from e
        return sort, background, structure

    @staticmethod
    def row(node: SExpr, carrier: tuple[str, ...], relational: bool) -> tuple[tuple[str, ...], str | int]:
        items = _list(node, "a row ((e1 ... en) -> value)")
        if len(items) != 3 or _atom_text(items[1], "'->'") != "->":
            raise _fail(node, "a row ((e1 ... en) -> value)")
        args = tuple(_atom_text(a, "an element") for a in _list(items[0], "(e1 ... en)"))
        for a, arg_node in zip(args, _list(items[0], "(e1 ... en)"), strict=True):
            if a not in carrier:
                raise _fail(arg_node, f"an element of the carrier, not {a}")
        value = _atom_text(items[2], "a value")
        if relational:
            if value not in ("0", "1"):
                raise _fail(items[2], "0 or 1")
            return args, int(value)
        if value not in carrier:
            raise _fail(items[2], f"an element of the carrier, not {value}")
        return args, value

    # Declarations

    def fresh_name(self, node: SExpr) -> str:
        name = _atom_text(node, "a name")
        if not IDENTIFIER_RE.fullmatch(name) or name in RESERVED:
            raise _fail(node, f"an identifier, not {name}")
        if self.decls is not None and self.d.is_declared(name):
            raise _fail(node, f"a new name, {name} is already declared")
        return name

    def type(self, node: SExpr) -> Type:
        if isinstance(node, SAtom):
            if node.text == "Int" or (self.decls is not None and node.text == self.d.sort):
                return INT
            if node.text == "Bool":
                return BOOL
            raise _fail(node, "a type: Int, Bool or (-> T1 ... Tn Bool)")
        items = node.items
        if len(items) < 2 or not isinstance(items[0], SAtom) or items[0].text != "->":
            raise _fail(node, "a type: Int, Bool or (-> T1 ... Tn Bool)")
        return arrow(*(self.type(t) for t in items[1:]))

    def declare_const(self, form: SExpr) -> None:
        items = _list(form, "(declare-const NAME Int)")
        if len(items) != 3:
            raise _fail(form, "(declare-const NAME Int)")
        if self.d.kind is TheoryKind.FINITE:
            raise _fail(form, "constants of a finite theory as nullary (fun ...) tables")
        name = self.fresh_name(items[1])
        if self.type(items[2]) != INT:
            raise _fail(items[2], "type Int for a constant")
        self.d.background[name] = INT
        self.d.constants.append(name)

    def declare_rel(self, form: SExpr) -> None:
        items = _list(form, "(declare-rel NAME (T1 ... Tn))")
        if len(items) != 3:
            raise _fail(form, "(declare-rel NAME (T1 ... Tn))")
        name = self.fresh_name(items[1])
        arg_types = [self.type(t) for t in _list(items[2], "(T1 ... Tn)")]
        for t, node in zip(arg_types, _list(items[2], "(T1 ... Tn)"), strict=True):
            if not is_argument(t):
                raise _fail(node, f"an argument type, not {t}")
        self.d.foreground[name] = arrow(*arg_types, BOOL)

    def declare_var(self, form: SExpr) -> None:
        items = _list(form, "(declare-var NAME T)")
        if len(items) != 3:
            raise _fail(form, "(declare-var NAME T)")
        name = self.fresh_name(items[1])
        ty = self.type(items[2])
        if not is_argument(ty):
            raise _fail(items[2], f"an argument type, not {ty}")
        self.d.variables[name] = ty

    # Clauses

    def goal(self, form: SExpr) -> GoalClause:
        items = _list(form, "(goal A1 ... An)")
        if len(items) < 2:
            raise _fail(form, "at least one atom in (goal ...); the empty goal is not allowed as input")
        return GoalClause(tuple(self.term(a, {}) for a in items[1:]), form.span)

    def rule(self, form: SExpr) -> DefiniteClause:
        items = _list(form, "(rule ...)")
        if len(items) != 2:
            raise _fail(form, "(rule (=> BODY HEAD)) or (rule HEAD)")
        inner = items[1]
        body: tuple[Term, ...] = ()
        if _keyword(inner) == "=>":
            parts = _list(inner, "(=> BODY HEAD)")
            if len(parts) != 3:
                raise _fail(inner, "(=> BODY HEAD)")
            body_node, inner = parts[1], parts[2]
            if _keyword(body_node) == "and":
                body = tuple(self.term(a, {}) for a in _list(body_node, "(and ...)")[1:])
            else:
                body = (self.term(body_node, {}),)
        head_items: tuple[SExpr, ...] = inner.items if isinstance(inner, SList) else (inner,)
        if not head_items:
            raise _fail(inner, "a head atom (R x1 ... xk)")
        rel = _atom_text(head_items[0], "a relation symbol")
        if self.d.signature().type_of(rel) is None:
            raise _fail(head_items[0], f"a declared relation, not {rel}")
        head_args: list[Var] = []
        for node in head_items[1:]:
            arg = self.term(node, {})
            if not isinstance(arg, Var):
                raise _fail(node, "a variable as head argument")
            head_args.append(arg)
        return DefiniteClause(body, rel, tuple(head_args), form.span)

    def term(self, node: SExpr, scope: Mapping[str, Type]) -> Term:
        if isinstance(node, SAtom):
            return self.name(node, scope)
        items = node.items
        if not items:
            raise _fail(node, "a term, not ()")
        head = items[0]
        if isinstance(head, SAtom):
            if head.text in LOGICAL_NAMES - {"lambda"}:
                raise _fail(head, "an atom without logical connectives")
            if head.text == "lambda":
                return self.abstraction(node, scope)
            if head.text == "-" and len(items) == 2 and self.d.kind is TheoryKind.LIA:
                return apply(Sym("-"), [numeral(0), self.term(items[1], scope)])
            if head.text == "+" and len(items) > 3 and self.d.kind is TheoryKind.LIA:
                result = self.term(items[1], scope)
                for item in items[2:]:
                    result = apply(Sym("+"), [result, self.term(item, scope)])
                return result
        if len(items) == 1:
            raise _fail(node, "arguments; write a nullary symbol without parentheses")
        return apply(self.term(head, scope), [self.term(a, scope) for a in items[1:]])

    def abstraction(self, node: SList, scope: Mapping[str, Type]) -> Term:
        items = node.items
        if len(items) != 3:
            raise _fail(node, "(lambda ((y T) ...) BODY)")
        params: list[Var] = []
        inner = dict(scope)
        for binder in _list(items[1], "((y T) ...)"):
            parts = _list(binder, "(y T)")
            if len(parts) != 2:
                raise _fail(binder, "(y T)")
            name = _atom_text(parts[0], "a variable name")
            if not IDENTIFIER_RE.fullmatch(name) or name in RESERVED or self.d.signature().type_of(name) is not None:
                raise _fail(parts[0], f"a bound variable name, not {name}")
            ty = self.type(parts[1])
            if not is_argument(ty):
                raise _fail(parts[1], f"an argument type, not {ty}")
            inner[name] = ty
            params.append(Var(name, ty))
        if not params:
            raise _fail(items[1], "at least one binder")
        return lambdas(params, self.term(items[2], inner))

    def name(self, node: SAtom, scope: Mapping[str, Type]) -> Term:
        text = node.text
        if text in scope:
            return Var(text, scope[text])
        if text in self.d.variables:
            return Var(text, self.d.variables[text])
        if is_numeral(text):
            if self.d.kind is not TheoryKind.LIA:
                raise _fail(node, f"a declared name; numerals like {text} need (theory lia)")
            return Sym(str(int(text)))
        if self.d.signature().type_of(text) is None:
            raise _fail(node, f"a declared name, {text} is not declared")
        return Sym(text)


def parse(text: str) -> ProblemFile:
    """
    Parse a problem file.

    Args:
        text: The file contents

    Returns:
        The problem with clauses in source order and source spans attached

    Raises:
        ParseError: On malformed input or an undeclared name
    """
    try:
        problem = _Parser(read_sexprs(text)).parse()
    except SignatureError as e:
        raise ParseError(1, 1, f"a consistent signature ({e})") from e
    logger.info(f"Parsed {len(problem.rules)} rules and {len(problem.goals)} goals ({problem.theory.kind.value})")
    return problem


def theory_handle(theory: TheorySpec) -> TheoryHandle:
    """
    The background theory a problem is checked against.

    Raises:
        PreconditionViolatedError: For LIA with constants, whose family of
            expansions only has a finite handle after flattening the clauses
    """
    match theory.kind:
        case TheoryKind.LIA:
            if theory.constants:
                raise PreconditionViolatedError(
                    f"LIA with constants {', '.join(theory.constants)} has no theory handle; flatten the clauses first"
                )
            return LiaStandard()
        case TheoryKind.EQDL:
            return Finite(tuple(datalog_structures(theory.constants)))
        case TheoryKind.FINITE:
            return Finite(theory.structures)


def _print_structure(structure: FiniteStructure, sort: str) -> list[str]:
    parts = [f"(sort {sort} ({' '.join(structure.carrier)}))"]
    for name, graph in structure.functions.items():
        rows = " ".join(f"(({' '.join(args)}) -> {value})" for args, value in graph.items())
        parts.append(f"(fun {name} {rows})")
    for name, table in structure.relations.items():
        rows = " ".join(f"(({' '.join(args)}) -> {int(value)})" for args, value in table.items())
        parts.append(f"(rel {name} {rows})")
    return parts


def print_problem(problem: ProblemFile) -> str:
    """Render ``problem`` in the surface syntax; ``parse`` reads it back to the same problem."""
    theory = problem.theory
    lines: list[str] = []
    match theory.kind:
        case TheoryKind.LIA:
            lines.append("(theory lia)")
            lines.extend(f"(declare-const {c} Int)" for c in theory.constants)
        case TheoryKind.EQDL:
            lines.append(f"(theory eqdl (consts {' '.join(theory.constants)}))")
        case TheoryKind.FINITE:
            lines.append("(theory finite")
            for structure in theory.structures:
                lines.append("  (structure " + " ".join(_print_structure(structure, theory.sort)) + ")")
            lines[-1] += ")"
    for name, ty in problem.signature.foreground.items():
        lines.append(f"(declare-rel {name} ({' '.join(str(t) for t in uncurry(ty)[0])}))")
    for name, ty in problem.variables.items():
        lines.append(f"(declare-var {name} {ty})")
    lines.extend(str(c) for c in problem.clauses)
    return "\n".join(lines) + "\n"

