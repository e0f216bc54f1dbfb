"""String-diagram terms, the textual model format, and a sum-product evaluator.

A model file declares finite objects, kernels (weight tables), states and
named diagrams.  Diagram terms combine declared generators with the
structural primitives (identity, copy, discard, swap, compare, observe)
under sequential (``;``) and parallel (``*``) composition.  Evaluation maps
terms to substochastic kernels; the value of a term is the product of its
components summed over internal wires, realised by matrix composition.

Grammar (UTF-8 text, ``#`` starts a line comment)::

    model      := stmt*
    stmt       := "object" NAME "=" "{" NAME ("," NAME)* "}"
                | "kernel" NAME ":" objExpr "->" objExpr "=" "{" row ("," row)* "}"
                | "state"  NAME ":" objExpr "=" "{" weighted ("," weighted)* "}"
                | "diagram" NAME ":" objExpr "->" objExpr "=" term
    objExpr    := "I" | NAME | objExpr "*" objExpr
    row        := labelTuple "->" "{" weighted ("," weighted)* "}"
    weighted   := labelTuple ":" NUMBER
    labelTuple := NAME | "(" ")" | "(" NAME ("," NAME)* ")"
    term       := term ";" term | term "*" term | "(" term ")"
                | "id[" objExpr "]" | "copy[" objExpr "]" | "discard[" objExpr "]"
                | "swap[" objExpr "," objExpr "]" | "compare[" objExpr "]"
                | "observe[" objExpr "=" labelTuple "]" | NAME

``*`` binds tighter than ``;``; both associate to the left.  Names must be
declared before use; ``I`` and the statement/primitive keywords are reserved.
Kernel rows omitted from a table are all-failure rows.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import kernel as K
from .kernel import FinObject, Label, SubKernel, UNIT, ValidationError

RESERVED = {
    "object", "kernel", "state", "diagram",
    "id", "copy", "discard", "swap", "compare", "observe", "I",
}


class DiagramTypeError(K.KernelError):
    """A term's boundaries do not line up."""


@dataclass(frozen=True)
class ParseIssue:
    line: int
    col: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.message}"


class ParseError(Exception):
    """One or more positioned syntax or validation errors in a model file."""

    def __init__(self, issues: list[ParseIssue]):
        self.issues = issues
        super().__init__("\n".join(str(i) for i in issues))


# --- terms -------------------------------------------------------------

class Term:
    """Base class of diagram syntax nodes."""


@dataclass(frozen=True)
class Gen(Term):
    name: str


@dataclass(frozen=True)
class Id(Term):
    obj: FinObject


@dataclass(frozen=True)
class Copy(Term):
    obj: FinObject


@dataclass(frozen=True)
class Discard(Term):
    obj: FinObject


@dataclass(frozen=True)
class Swap(Term):
    left: FinObject
    right: FinObject


@dataclass(frozen=True)
class Compare(Term):
    obj: FinObject


@dataclass(frozen=True)
class Observe(Term):
    obj: FinObject
    label: Label

    def __post_init__(self) -> None:
        if self.label not in self.obj.index:
            raise ValidationError(
                f"{K.render_label(self.label)} is not a label of {self.obj}"
            )


@dataclass(frozen=True)
class Seq(Term):
    first: Term
    second: Term


@dataclass(frozen=True)
class Par(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Model:
    """A parsed model: named objects, kernels, states and diagrams."""

    objects: dict[str, FinObject] = field(default_factory=dict)
    kernels: dict[str, SubKernel] = field(default_factory=dict)
    states: dict[str, SubKernel] = field(default_factory=dict)
    diagrams: dict[str, Term] = field(default_factory=dict)

    def generator(self, name: str) -> SubKernel:
        if name in self.kernels:
            return self.kernels[name]
        if name in self.states:
            return self.states[name]
        raise DiagramTypeError(f"unknown generator {name!r}")


def typecheck(term: Term, model: Model) -> tuple[FinObject, FinObject]:
    """Assign domain and codomain bottom-up; report boundary mismatches."""
    match term:
        case Gen(name):
            k = model.generator(name)
            return k.dom, k.cod
        case Id(obj):
            return obj, obj
        case Copy(obj):
            return obj, obj.tensor(obj)
        case Discard(obj):
            return obj, UNIT
        case Swap(left, right):
            return left.tensor(right), right.tensor(left)
        case Compare(obj):
            return obj.tensor(obj), obj
        case Observe(obj, _):
            return obj, UNIT
        case Seq(first, second):
            dom1, cod1 = typecheck(first, model)
            dom2, cod2 = typecheck(second, model)
            if cod1 != dom2:
                raise DiagramTypeError(
                    f"sequential boundary mismatch: left produces {cod1}, "
                    f"right consumes {dom2}"
                )
            return dom1, cod2
        case Par(left, right):
            dom1, cod1 = typecheck(left, model)
            dom2, cod2 = typecheck(right, model)
            return dom1.tensor(dom2), cod1.tensor(cod2)
    raise DiagramTypeError(f"unknown term node {term!r}")


def evaluate(term: Term, model: Model) -> SubKernel:
    """Interpret a term as a substochastic kernel."""
    typecheck(term, model)
    return _eval(term, model)


def _eval(term: Term, model: Model) -> SubKernel:
    match term:
        case Gen(name):
            return model.generator(name)
        case Id(obj):
            return K.identity(obj)
        case Copy(obj):
            return K.copy(obj)
        case Discard(obj):
            return K.discard(obj)
        case Swap(left, right):
            return K.swap(left, right)
        case Compare(obj):
            return K.compare(obj)
        case Observe(obj, label):
            return K.observe(obj, label)
        case Seq(first, second):
            return K.compose(_eval(first, model), _eval(second, model))
        case Par(left, right):
            return K.tensor(_eval(left, model), _eval(right, model))
    raise DiagramTypeError(f"unknown term node {term!r}")


# --- lexer -------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<ws>[ \t\r]+)
      | (?P<comment>\#[^\n]*)
      | (?P<nl>\n)
      | (?P<arrow>->)
      | (?P<number>(?:[0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)(?:[eE][+-]?[0-9]+)?)
      | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<punct>[={}(),:;*\[\]])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "name" | "number" | "punct" | "arrow" | "eof"
    text: str
    line: int
    col: int


class _Syntax(Exception):
    def __init__(self, token: _Token, message: str):
        self.issue = ParseIssue(token.line, token.col, message)
        super().__init__(str(self.issue))


def _tokenize(text: str) -> tuple[list[_Token], list[ParseIssue]]:
    tokens: list[_Token] = []
    issues: list[ParseIssue] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            issues.append(ParseIssue(line, col, f"unexpected character {text[pos]!r}"))
            pos += 1
            col += 1
            continue
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "nl":
            line += 1
            col = 1
        elif kind in ("ws", "comment"):
            col += len(lexeme)
        else:
            tokens.append(_Token(kind, lexeme, line, col))
            col += len(lexeme)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens, issues


# --- parser ------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0
        self.issues: list[ParseIssue] = []
        self.model = Model()

    # token plumbing

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            raise _Syntax(tok, f"expected {want!r}, found {tok.text or 'end of input'!r}")
        return self.next()

    def at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text == text

    def eat_punct(self, text: str) -> bool:
        if self.at_punct(text):
            self.next()
            return True
        return False

    # names and declarations

    def fresh_name(self) -> str:
        tok = self.expect("name")
        if tok.text in RESERVED:
            raise _Syntax(tok, f"{tok.text!r} is a reserved word")
        for space in (self.model.objects, self.model.kernels,
                      self.model.states, self.model.diagrams):
            if tok.text in space:
                raise _Syntax(tok, f"duplicate name {tok.text!r}")
        return tok.text

    def label_text(self) -> str:
        tok = self.peek()
        if tok.kind in ("name", "number"):
            return self.next().text
        raise _Syntax(tok, f"expected a label, found {tok.text or 'end of input'!r}")

    def label_tuple(self) -> Label:
        if self.eat_punct("("):
            if self.eat_punct(")"):
                return ()
            parts = [self.label_text()]
            while self.eat_punct(","):
                parts.append(self.label_text())
            self.expect("punct", ")")
            return tuple(parts)
        return (self.label_text(),)

    def obj_expr(self) -> FinObject:
        obj = self.obj_atom()
        while self.at_punct("*"):
            self.next()
            obj = obj.tensor(self.obj_atom())
        return obj

    def obj_atom(self) -> FinObject:
        tok = self.expect("name")
        if tok.text == "I":
            return UNIT
        if tok.text not in self.model.objects:
            raise _Syntax(tok, f"unknown object {tok.text!r}")
        return self.model.objects[tok.text]

    # statements

    def parse_model(self) -> Model:
        while self.peek().kind != "eof":
            try:
                self.statement()
            except _Syntax as err:
                self.issues.append(err.issue)
                self.resync()
        if self.issues:
            raise ParseError(self.issues)
        return self.model

    def resync(self) -> None:
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                return
            if tok.kind == "name" and tok.text in ("object", "kernel", "state", "diagram"):
                return
            self.next()

    def statement(self) -> None:
        tok = self.peek()
        if tok.kind != "name":
            raise _Syntax(tok, f"expected a statement, found {tok.text!r}")
        if tok.text == "object":
            self.next()
            self.object_stmt()
        elif tok.text == "kernel":
            self.next()
            self.kernel_stmt()
        elif tok.text == "state":
            self.next()
            self.state_stmt()
        elif tok.text == "diagram":
            self.next()
            self.diagram_stmt()
        else:
            raise _Syntax(tok, f"expected 'object', 'kernel', 'state' or 'diagram', "
                               f"found {tok.text!r}")

    def object_stmt(self) -> None:
        at = self.peek()
        name = self.fresh_name()
        self.expect("punct", "=")
        self.expect("punct", "{")
        labels = [self.label_text()]
        while self.eat_punct(","):
            labels.append(self.label_text())
        self.expect("punct", "}")
        try:
            self.model.objects[name] = FinObject.atomic(name, labels)
        except ValidationError as err:
            raise _Syntax(at, str(err)) from err

    def weighted_map(self, obj: FinObject, at: _Token) -> dict[Label, float]:
        """Parse ``labelTuple : NUMBER`` entries up to the closing brace."""
        self.expect("punct", "{")
        row: dict[Label, float] = {}
        while True:
            lab = self.label_tuple()
            if lab not in obj.index:
                raise _Syntax(at, f"{K.render_label(lab)} is not a label of {obj}")
            if lab in row:
                raise _Syntax(at, f"duplicate entry for {K.render_label(lab)}")
            self.expect("punct", ":")
            num = self.expect("number")
            row[lab] = float(num.text)
            if not self.eat_punct(","):
                break
        self.expect("punct", "}")
        return row

    def kernel_stmt(self) -> None:
        at = self.peek()
        name = self.fresh_name()
        self.expect("punct", ":")
        dom = self.obj_expr()
        self.expect("arrow")
        cod = self.obj_expr()
        self.expect("punct", "=")
        self.expect("punct", "{")
        rows: dict[Label, dict[Label, float]] = {}
        while True:
            row_at = self.peek()
            lab = self.label_tuple()
            if lab not in dom.index:
                raise _Syntax(row_at, f"{K.render_label(lab)} is not a label of {dom}")
            if lab in rows:
                raise _Syntax(row_at, f"duplicate row for input {K.render_label(lab)}")
            self.expect("arrow")
            rows[lab] = self.weighted_map(cod, row_at)
            if not self.eat_punct(","):
                break
        self.expect("punct", "}")
        try:
            self.model.kernels[name] = K.from_rows(dom, cod, rows)
        except ValidationError as err:
            raise _Syntax(at, str(err)) from err

    def state_stmt(self) -> None:
        at = self.peek()
        name = self.fresh_name()
        self.expect("punct", ":")
        obj = self.obj_expr()
        self.expect("punct", "=")
        row = self.weighted_map(obj, at)
        try:
            self.model.states[name] = K.from_rows(UNIT, obj, {(): row})
        except ValidationError as err:
            raise _Syntax(at, str(err)) from err

    def diagram_stmt(self) -> None:
        at = self.peek()
        name = self.fresh_name()
        self.expect("punct", ":")
        dom = self.obj_expr()
        self.expect("arrow")
        cod = self.obj_expr()
        self.expect("punct", "=")
        term = self.term()
        try:
            got_dom, got_cod = typecheck(term, self.model)
        except DiagramTypeError as err:
            raise _Syntax(at, str(err)) from err
        if (got_dom, got_cod) != (dom, cod):
            raise _Syntax(
                at,
                f"diagram {name!r} declared {dom} -> {cod} "
                f"but its body has type {got_dom} -> {got_cod}",
            )
        self.model.diagrams[name] = term

    # terms

    def term(self) -> Term:
        left = self.par_term()
        while self.eat_punct(";"):
            left = Seq(left, self.par_term())
        return left

    def par_term(self) -> Term:
        left = self.atom_term()
        while self.at_punct("*"):
            self.next()
            left = Par(left, self.atom_term())
        return left

    def bracketed_obj(self) -> FinObject:
        self.expect("punct", "[")
        obj = self.obj_expr()
        self.expect("punct", "]")
        return obj

    def atom_term(self) -> Term:
        tok = self.peek()
        if self.eat_punct("("):
            inner = self.term()
            self.expect("punct", ")")
            return inner
        if tok.kind != "name":
            raise _Syntax(tok, f"expected a term, found {tok.text or 'end of input'!r}")
        if tok.text == "id":
            self.next()
            return Id(self.bracketed_obj())
        if tok.text == "copy":
            self.next()
            return Copy(self.bracketed_obj())
        if tok.text == "discard":
            self.next()
            return Discard(self.bracketed_obj())
        if tok.text == "compare":
            self.next()
            return Compare(self.bracketed_obj())
        if tok.text == "swap":
            self.next()
            self.expect("punct", "[")
            left = self.obj_expr()
            self.expect("punct", ",")
            right = self.obj_expr()
            self.expect("punct", "]")
            return Swap(left, right)
        if tok.text == "observe":
            self.next()
            self.expect("punct", "[")
            obj = self.obj_expr()
            self.expect("punct", "=")
            lab = self.label_tuple()
            self.expect("punct", "]")
            try:
                return Observe(obj, lab)
            except ValidationError as err:
                raise _Syntax(tok, str(err)) from err
        if tok.text in RESERVED:
            raise _Syntax(tok, f"{tok.text!r} cannot be used as a generator name here")
        self.next()
        if tok.text in self.model.diagrams:
            return self.model.diagrams[tok.text]
        if tok.text in self.model.kernels or tok.text in self.model.states:
            return Gen(tok.text)
        raise _Syntax(tok, f"unknown name {tok.text!r}")


def parse(text: str) -> Model:
    """Parse a model file, or raise :class:`ParseError` with positioned issues."""
    tokens, lex_issues = _tokenize(text)
    parser = _Parser(tokens)
    parser.issues.extend(lex_issues)
    return parser.parse_model()
