"""Plain-text system format.

A system file is a header followed by one polynomial per line::

    # unit circle meets a cubic
    variables x, y
    x^2 + y^2 - 1
    x^2 - y^3 - y - 1

An optional ``parameters a, b`` line declares parameter names.  Powers use
``^`` and may be negative, ``i`` is the imaginary unit, ``*`` may be omitted
between factors (``2x1*x2``), and parentheses nest.  Integer and rational
literals are folded exactly before being stored as binary64 complex numbers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..errors import ParseError
from .polynomial import LaurentPolynomial, LaurentSystem

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(src: str, line: int) -> list[_Tok]:
    toks, pos = [], 0
    src = src.rstrip()
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos + 1)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    toks.append(_Tok("end", "", len(src) + 1))
    return toks


def _number(text: str):
    if re.fullmatch(r"\d+", text):
        return Fraction(int(text))
    try:
        return Fraction(text)
    except ValueError:
        return float(text)


class _Parser:
    """Recursive descent; constants stay exact (Fraction) while possible."""

    def __init__(self, toks: list[_Tok], names: dict[str, int], line: int):
        self.toks, self.k, self.names, self.line = toks, 0, names, line
        self.n = len(names)

    def peek(self) -> _Tok:
        return self.toks[self.k]

    def take(self) -> _Tok:
        tok = self.toks[self.k]
        self.k += 1
        return tok

    def fail(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok.col)

    def parse(self):
        value = self.expr()
        if self.peek().kind != "end":
            self.fail(f"unexpected {self.peek().text!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            value = _add(value, rhs) if op == "+" else _add(value, _neg(rhs))
        return value

    def _starts_factor(self, tok: _Tok) -> bool:
        return tok.kind in ("num", "name") or tok.text == "("

    def term(self):
        value = self.unary()
        while True:
            tok = self.peek()
            if tok.text == "*":
                self.take()
                value = _mul(value, self.unary())
            elif tok.text == "/":
                self.take()
                rhs = self.unary()
                value = _div(value, rhs, self, tok)
            elif self._starts_factor(tok):
                value = _mul(value, self.power())
            else:
                return value

    def unary(self):
        tok = self.peek()
        if tok.text == "-":
            self.take()
            return _neg(self.unary())
        if tok.text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().text == "^":
            self.take()
            sign = 1
            paren = False
            if self.peek().text == "(":
                self.take()
                paren = True
            while self.peek().text in ("-", "+"):
                if self.take().text == "-":
                    sign = -sign
            tok = self.take()
            if tok.kind != "num" or not re.fullmatch(r"\d+", tok.text):
                self.fail("exponent must be an integer", tok)
            if paren and self.take().text != ")":
                self.fail("expected ')'")
            k = sign * int(tok.text)
            if isinstance(base, LaurentPolynomial):
                if k < 0 and len(base) != 1:
                    self.fail("negative powers need a monomial base", tok)
                return base**k
            if k < 0 and base == 0:
                self.fail("zero to a negative power", tok)
            return base**k
        return base

    def atom(self):
        tok = self.take()
        if tok.kind == "num":
            return _number(tok.text)
        if tok.kind == "name":
            if tok.text == "i":
                return 1j
            if tok.text not in self.names:
                raise ParseError(f"undeclared identifier {tok.text!r}", self.line, tok.col)
            return LaurentPolynomial.variable(self.names[tok.text], self.n)
        if tok.text == "(":
            value = self.expr()
            if self.take().text != ")":
                self.fail("expected ')'")
            return value
        self.fail(f"unexpected {tok.text or 'end of line'!r}", tok)


def _is_poly(v) -> bool:
    return isinstance(v, LaurentPolynomial)


def _add(a, b):
    if _is_poly(a) or _is_poly(b):
        return (a if _is_poly(a) else b) + (b if _is_poly(a) else a)
    return a + b


def _neg(a):
    return -a


def _mul(a, b):
    if _is_poly(a):
        return a * b
    if _is_poly(b):
        return b * a
    return a * b


def _div(a, b, parser, tok):
    if _is_poly(b):
        if len(b) != 1:
            parser.fail("division by a non-monomial", tok)
        return a / b if _is_poly(a) else LaurentPolynomial.constant(b.nvars, a) / b
    if b == 0:
        parser.fail("division by zero", tok)
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a / b
    return a * (1 / (complex(b) if not isinstance(b, Fraction) else b))


def parse_polynomial(text: str, names: Sequence[str], line: int = 1) -> LaurentPolynomial:
    index = {v: k for k, v in enumerate(names)}
    value = _Parser(_tokenize(text, line), index, line).parse()
    if not _is_poly(value):
        value = LaurentPolynomial.constant(len(names), value)
    return value


@dataclass
class ParsedSystem:
    system: LaurentSystem
    variables: tuple[str, ...]
    parameters: tuple[str, ...] = ()

    @property
    def has_parameters(self) -> bool:
        return bool(self.parameters)


def _header_names(rest: str, line: int, col: int) -> list[str]:
    rest = rest.lstrip(":").strip()
    names = [t for t in re.split(r"[,\s]+", rest) if t]
    for nm in names:
        if not _IDENT.match(nm) or nm == "i":
            raise ParseError(f"invalid identifier {nm!r}", line, col)
    return names


def parse_system(text: str) -> ParsedSystem:
    """Parse the header-plus-polynomials format into a system.

    When parameters are declared the returned system has the parameters
    appended after the variables.
    """
    variables: list[str] | None = None
    parameters: list[str] = []
    polys: list[tuple[str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        word = stripped.split(None, 1)[0].rstrip(":")
        col = body.index(stripped[0]) + 1
        if word in ("variables", "parameters") and not polys:
            names = _header_names(stripped[len(word):], lineno, col)
            if word == "variables":
                variables = names
            else:
                parameters = names
            continue
        if variables is None:
            raise ParseError("missing 'variables' header", lineno, col)
        polys.append((body, lineno))
    if variables is None:
        raise ParseError("missing 'variables' header", 1, 1)
    names = variables + parameters
    if len(set(names)) != len(names):
        raise ParseError("duplicate identifier in header", 1, 1)
    parsed = [parse_polynomial(src, names, ln) for src, ln in polys]
    return ParsedSystem(LaurentSystem(parsed, names, len(names)), tuple(variables), tuple(parameters))


def _format_real(x: float) -> str:
    if float(x).is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(float(x))


def format_coefficient(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return _format_real(c.real)
    if c.real == 0:
        return f"{_format_real(c.imag)}*i" if c.imag != 1 else "i"
    sign = "-" if c.imag < 0 else "+"
    return f"({_format_real(c.real)}{sign}{_format_real(abs(c.imag))}*i)"


def _format_monomial(e, names) -> str:
    parts = []
    for a, nm in zip(e, names):
        if a == 1:
            parts.append(nm)
        elif a:
            parts.append(f"{nm}^{a}")
    return "*".join(parts)


def format_polynomial(f: LaurentPolynomial, names: Sequence[str] | None = None) -> str:
    if names is None:
        names = [f"x{k + 1}" for k in range(f.nvars)]
    if f.is_zero():
        return "0"
    out = []
    for e, c in f.ordered_terms():
        mono = _format_monomial(e, names)
        negative = c.imag == 0 and c.real < 0
        mag = -c if negative else c
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{format_coefficient(mag)}*{mono}"
        else:
            body = format_coefficient(mag)
        if not out:
            out.append(f"-{body}" if negative else body)
        else:
            out.append(f" - {body}" if negative else f" + {body}")
    return "".join(out)


def format_system(F: LaurentSystem | ParsedSystem, parameters: Sequence[str] = ()) -> str:
    if isinstance(F, ParsedSystem):
        parameters, F = F.parameters, F.system
    nvar = F.nvars - len(parameters)
    lines = ["variables " + ", ".join(F.variables[:nvar])]
    if parameters:
        lines.append("parameters " + ", ".join(parameters))
    lines += [format_polynomial(p, F.variables) for p in F.polys]
    return "\n".join(lines) + "\n"
