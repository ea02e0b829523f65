"""Text format for specifications.

::

    input battery_level: Int
    output drain @battery_level := battery_level.prev(or: battery_level) - battery_level

Pacing: identifiers, ``true``, ``&``, ``|`` and parentheses (``&&``/``||`` are
accepted as synonyms).  Expressions, loosest binding first: ``||``, ``&&``,
``== < >``, ``+ -``, ``* /``, unary ``! -``.  ``//`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .model import (
    INT_MAX,
    INT_MIN,
    And,
    Atom,
    BinOp,
    Const,
    Equation,
    Expr,
    Hold,
    Not,
    Op,
    Or,
    Pacing,
    Prev,
    SourceSpan,
    Specification,
    Top,
    Var,
    validate_spec,
)

KEYWORDS = {"input", "output", "true"}


class SpecError(Exception):
    """Base class for problems found while reading a specification."""


class ParseError(SpecError):
    def __init__(self, span: SourceSpan, message: str, expected=()):
        self.span = span
        self.message = message
        self.expected = frozenset(expected)
        super().__init__(f"{span}: {message}")


class SpecValidationError(SpecError):
    def __init__(self, errors: list):
        self.errors = errors
        super().__init__("; ".join(f"{e.span or '?'}: {e}" for e in errors))


@dataclass(frozen=True)
class Token:
    kind: str  # INT, IDENT, KW, OP, EOF
    text: str
    span: SourceSpan = field(compare=False)


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[a-zA-Z_][a-zA-Z0-9_]*)
  | (?P<op>:=|&&|\|\||==|[:@().,&|<>+\-*/!])
    """,
    re.VERBOSE,
)


def _position(text: str, offset: int) -> tuple:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            line, col = _position(text, pos)
            raise ParseError(SourceSpan(line, col, 1), f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            line, col = _position(text, pos)
            span = SourceSpan(line, col, m.end() - pos)
            value = m.group()
            if kind == "int":
                tokens.append(Token("INT", value, span))
            elif kind == "ident":
                tokens.append(Token("KW" if value in KEYWORDS else "IDENT", value, span))
            else:
                tokens.append(Token("OP", value, span))
        pos = m.end()
    if text:
        line, col = _position(text, len(text) - 1)
    else:
        line, col = 1, 1
    tokens.append(Token("EOF", "", SourceSpan(line, col, 1 if text else 0)))
    return tokens


_BINARY_LEVELS = [
    {"||": Op.OR},
    {"&&": Op.AND},
    {"==": Op.EQ, "<": Op.LT, ">": Op.GT},
    {"+": Op.ADD, "-": Op.SUB},
    {"*": Op.MUL, "/": Op.DIV},
]


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def error(self, expected) -> ParseError:
        t = self.tok
        found = "end of input" if t.kind == "EOF" else repr(t.text)
        exp = sorted(expected)
        return ParseError(t.span, f"expected {' or '.join(exp)}, found {found}", exp)

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        if not self.at(kind, text):
            raise self.error({repr(text) if text else kind.lower()})
        return self.advance()

    # -- declarations -----------------------------------------------------

    def spec(self) -> Specification:
        inputs, spans, equations = [], [], []
        while not self.at("EOF"):
            if self.at("KW", "input"):
                self.advance()
                name = self.expect("IDENT")
                if self.at("OP", ":"):
                    self.advance()
                    ty = self.expect("IDENT")
                    if ty.text != "Int":
                        raise ParseError(ty.span, f"unsupported type '{ty.text}' (only Int)", {"'Int'"})
                inputs.append(name.text)
                spans.append(name.span)
            elif self.at("KW", "output"):
                equations.append(self.equation())
            else:
                raise self.error({"'input'", "'output'"})
        return Specification(tuple(inputs), tuple(equations), tuple(spans))

    def equation(self) -> Equation:
        self.expect("KW", "output")
        name = self.expect("IDENT")
        if self.at("OP", ":"):
            self.advance()
            ty = self.expect("IDENT")
            if ty.text != "Int":
                raise ParseError(ty.span, f"unsupported type '{ty.text}' (only Int)", {"'Int'"})
        if not self.at("OP", "@"):
            raise ParseError(self.tok.span, f"output '{name.text}' needs a pacing annotation '@ ...'", {"'@'"})
        self.advance()
        pacing = self.pacing_or()
        if self.at("OP", "@"):  # closing '@' as written in some listings
            self.advance()
        self.expect("OP", ":=")
        body = self.expr(0)
        return Equation(name.text, pacing, body, name.span)

    # -- pacing -----------------------------------------------------------

    def pacing_or(self) -> Pacing:
        left = self.pacing_and()
        while self.at("OP", "|") or self.at("OP", "||"):
            self.advance()
            left = Or(left, self.pacing_and())
        return left

    def pacing_and(self) -> Pacing:
        left = self.pacing_atom()
        while self.at("OP", "&") or self.at("OP", "&&"):
            self.advance()
            left = And(left, self.pacing_atom())
        return left

    def pacing_atom(self) -> Pacing:
        t = self.tok
        if t.kind == "IDENT":
            self.advance()
            return Atom(t.text, t.span)
        if t.kind == "KW" and t.text == "true":
            self.advance()
            return Top(t.span)
        if self.at("OP", "("):
            self.advance()
            inner = self.pacing_or()
            self.expect("OP", ")")
            return inner
        raise self.error({"identifier", "'true'", "'('"})

    # -- expressions ------------------------------------------------------

    def expr(self, level: int) -> Expr:
        if level == len(_BINARY_LEVELS):
            return self.unary()
        ops = _BINARY_LEVELS[level]
        left = self.expr(level + 1)
        while self.tok.kind == "OP" and self.tok.text in ops:
            op_tok = self.advance()
            right = self.expr(level + 1)
            left = BinOp(ops[op_tok.text], left, right, op_tok.span)
        return left

    def unary(self) -> Expr:
        t = self.tok
        if self.at("OP", "!"):
            self.advance()
            return Not(self.unary(), t.span)
        if self.at("OP", "-"):
            self.advance()
            if self.at("INT"):
                lit = self.advance()
                return self._const(-int(lit.text), lit, t.span)
            return BinOp(Op.SUB, Const(0, t.span), self.unary(), t.span)
        return self.primary()

    def _const(self, value: int, tok: Token, span: SourceSpan) -> Const:
        if not INT_MIN <= value <= INT_MAX:
            raise ParseError(tok.span, f"integer literal {tok.text} out of 64-bit range")
        return Const(value, span)

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "INT":
            self.advance()
            return self._const(int(t.text), t, t.span)
        if t.kind == "IDENT":
            self.advance()
            if self.at("OP", "."):
                self.advance()
                method = self.expect("IDENT")
                if method.text not in ("prev", "hold"):
                    raise ParseError(method.span, f"unknown stream access '.{method.text}'", {"'prev'", "'hold'"})
                self.expect("OP", "(")
                self.expect("IDENT", "or")
                self.expect("OP", ":")
                default = self.expr(0)
                self.expect("OP", ")")
                cls = Prev if method.text == "prev" else Hold
                return cls(t.text, default, t.span)
            return Var(t.text, t.span)
        if self.at("OP", "("):
            self.advance()
            inner = self.expr(0)
            self.expect("OP", ")")
            return inner
        raise self.error({"integer", "identifier", "'('", "'!'", "'-'"})


def parse_spec(text: str, validate: bool = True) -> Specification:
    """Parse ``text``; raises :class:`ParseError` or :class:`SpecValidationError`."""
    spec = _Parser(text).spec()
    if validate:
        errors = validate_spec(spec)
        if errors:
            raise SpecValidationError(errors)
    return spec


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr(0)
    p.expect("EOF")
    return e


def parse_pacing(text: str) -> Pacing:
    p = _Parser(text)
    tau = p.pacing_or()
    p.expect("EOF")
    return tau


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------

_PREC = {op: level + 1 for level, ops in enumerate(_BINARY_LEVELS) for op in ops.values()}
_UNARY_PREC = len(_BINARY_LEVELS) + 1
_ATOM_PREC = _UNARY_PREC + 1


def _expr_prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Not):
        return _UNARY_PREC
    return _ATOM_PREC


def format_expr(e: Expr, ctx: int = 0) -> str:
    if isinstance(e, Const):
        s = str(e.value)
    elif isinstance(e, Var):
        s = e.name
    elif isinstance(e, Prev):
        s = f"{e.target}.prev(or: {format_expr(e.default)})"
    elif isinstance(e, Hold):
        s = f"{e.target}.hold(or: {format_expr(e.default)})"
    elif isinstance(e, Not):
        s = "!" + format_expr(e.operand, _UNARY_PREC)
    elif isinstance(e, BinOp):
        p = _PREC[e.op]
        s = f"{format_expr(e.left, p)} {e.op.value} {format_expr(e.right, p + 1)}"
    else:
        raise TypeError(f"not an expression: {e!r}")
    return f"({s})" if _expr_prec(e) < ctx else s


def format_pacing(tau: Pacing, ctx: int = 0) -> str:
    if isinstance(tau, Atom):
        return tau.name
    if isinstance(tau, Top):
        return "true"
    p = 1 if isinstance(tau, Or) else 2
    sym = "|" if p == 1 else "&"
    s = f"{format_pacing(tau.left, p)} {sym} {format_pacing(tau.right, p + 1)}"
    return f"({s})" if p < ctx else s


def format_equation(eq: Equation) -> str:
    return f"output {eq.target} @{format_pacing(eq.pacing)} := {format_expr(eq.body)}"


def format_spec(spec: Specification) -> str:
    lines = [f"input {name}: Int" for name in spec.inputs]
    lines.extend(format_equation(eq) for eq in spec.equations)
    return "\n".join(lines) + ("\n" if lines else "")
