"""Text format for forms and polynomials.

The grammar (ASCII only; multiplication is '*' or juxtaposition):

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := coeff | coeff mult? mono | mono
    mono   := factor (mult? factor)*
    factor := var ('^' uint)?
    var    := 'z' uint
    coeff  := decimal | decimal? 'i' | '(' ['-'] decimal ('+'|'-') decimal? 'i' ')'

Decimals may carry an exponent part (1e-05), so printed values reparse
exactly.  Complex coefficients must be parenthesized, which keeps the term
grammar unambiguous.  The expression entry point additionally accepts
parenthesized subexpressions with optional '^' powers and products, e.g.
"(z1 + 2 z2)*(z1 + 2 z2)", which is what the expand command consumes;
evaluation happens directly in the skew ring, so "z2 z1" is legal input
and comes back normally ordered.
"""

from __future__ import annotations

import re

from .ring import InputError, LinearForm, MuMatrix, QuadraticForm, SkewPoly, multiply

__all__ = ["ParseError", "parse", "to_quadratic_form", "render"]


class ParseError(InputError):
    """Syntax or validation error, carrying the 1-based column `position`."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (column {position})")
        self.position = position


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<var>z(?P<varidx>\d+)?)
  | (?P<imag>i)
  | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)


class _Token:
    __slots__ = ("kind", "text", "value", "pos")

    def __init__(self, kind: str, text: str, value, pos: int):
        self.kind = kind  # num | var | imag | op | end
        self.text = text
        self.value = value
        self.pos = pos  # 1-based column


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", i + 1)
        if m.lastgroup != "ws":
            kind = m.lastgroup
            pos = i + 1
            if kind == "num":
                tokens.append(_Token("num", m.group(), float(m.group()), pos))
            elif kind == "var":
                idx = m.group("varidx")
                if idx is None:
                    raise ParseError("generator 'z' needs an index, e.g. z1", pos)
                tokens.append(_Token("var", m.group(), int(idx), pos))
            elif kind == "imag":
                tokens.append(_Token("imag", "i", 1j, pos))
            else:
                tokens.append(_Token("op", m.group(), m.group(), pos))
        i = m.end()
    tokens.append(_Token("end", "", None, len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, mu: MuMatrix):
        self.mu = mu
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self) -> _Token:
        return self.tokens[self.k]

    def next(self) -> _Token:
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect_op(self, op: str) -> _Token:
        tok = self.next()
        if tok.kind != "op" or tok.text != op:
            what = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ParseError(f"expected {op!r}, found {what}", tok.pos)
        return tok

    def parse(self) -> SkewPoly:
        if self.peek().kind == "end":
            raise ParseError("empty input", 1)
        p = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.text!r}", tok.pos)
        return p

    def expr(self) -> SkewPoly:
        sign = 1.0
        tok = self.peek()
        if tok.kind == "op" and tok.text in "+-":
            self.next()
            sign = -1.0 if tok.text == "-" else 1.0
        acc = self.product().scaled(sign)
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.next()
                rhs = self.product()
                acc = acc + rhs.scaled(-1.0 if tok.text == "-" else 1.0)
            else:
                return acc

    def product(self) -> SkewPoly:
        acc = self.power()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text == "*":
                self.next()
                nxt = self.peek()
                if not self._starts_operand(nxt):
                    what = "end of input" if nxt.kind == "end" else repr(nxt.text)
                    raise ParseError(f"expected an operand after '*', found {what}", nxt.pos)
                acc = multiply(acc, self.power())
            elif self._starts_operand(tok):
                acc = multiply(acc, self.power())
            else:
                return acc

    @staticmethod
    def _starts_operand(tok: _Token) -> bool:
        return tok.kind in ("num", "var", "imag") or (tok.kind == "op" and tok.text == "(")

    def power(self) -> SkewPoly:
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.next()
            exp_tok = self.next()
            if exp_tok.kind != "num" or exp_tok.value != int(exp_tok.value) or exp_tok.value < 0:
                what = "end of input" if exp_tok.kind == "end" else repr(exp_tok.text)
                raise ParseError(f"exponent must be a non-negative integer, found {what}", exp_tok.pos)
            out = SkewPoly.monomial(self.mu, (0,) * self.mu.n, 1.0)
            for _ in range(int(exp_tok.value)):
                out = multiply(out, base)
            return out
        return base

    def atom(self) -> SkewPoly:
        tok = self.next()
        if tok.kind == "num":
            return SkewPoly.monomial(self.mu, (0,) * self.mu.n, tok.value)
        if tok.kind == "imag":
            return SkewPoly.monomial(self.mu, (0,) * self.mu.n, 1j)
        if tok.kind == "var":
            idx = tok.value
            if not (1 <= idx <= self.mu.n):
                raise ParseError(f"variable z{idx} out of range 1..{self.mu.n}", tok.pos)
            e = [0] * self.mu.n
            e[idx - 1] = 1
            return SkewPoly.monomial(self.mu, e, 1.0)
        if tok.kind == "op" and tok.text == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"expected a term, found {what}", tok.pos)


def parse(text: str, mu: MuMatrix) -> SkewPoly:
    """Parse an expression over z_1..z_n into its normal form."""
    return _Parser(text, mu).parse()


def to_quadratic_form(p: SkewPoly) -> QuadraticForm:
    """Read a homogeneous degree-2 polynomial off as a quadratic form.

    Raises InputError listing the offending monomials when terms of any
    other degree are present above tolerance.
    """
    scale = max(1.0, p.max_coeff())
    offenders = [
        _render_monomial(e)
        for e, c in p.terms()
        if sum(e) != 2 and abs(c) > p.mu.tol * scale
    ]
    if offenders:
        raise InputError(
            "not a homogeneous degree-2 form; offending monomials: " + ", ".join(offenders)
        )
    alpha: dict[tuple[int, int], complex] = {}
    for e, c in p.terms():
        if sum(e) != 2:
            continue
        idx = [g for g, k in enumerate(e, start=1) for _ in range(k)]
        alpha[(idx[0], idx[1])] = c
    return QuadraticForm(p.mu, alpha)


# ---------------------------------------------------------------------------
# Printing


def _format_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _format_coeff(c: complex) -> str:
    """Canonical coefficient text: plain reals, 'i' forms for imaginaries,
    parenthesized pairs otherwise."""
    re_, im = c.real, c.imag
    if im == 0:
        return _format_real(re_)
    if re_ == 0:
        if im == 1:
            return "i"
        if im == -1:
            return "-i"
        return _format_real(im) + "i"
    im_txt = "i" if abs(im) == 1 else _format_real(abs(im)) + "i"
    sign = "+" if im > 0 else "-"
    return f"({_format_real(re_)}{sign}{im_txt})"


def _render_monomial(exponents: tuple[int, ...]) -> str:
    parts = []
    for g, e in enumerate(exponents, start=1):
        if e == 1:
            parts.append(f"z{g}")
        elif e > 1:
            parts.append(f"z{g}^{e}")
    return " ".join(parts)


def _coeff_sign_split(c: complex) -> tuple[bool, complex]:
    """(negative?, magnitude-part) for real or purely imaginary coefficients;
    general complex values are never split."""
    if c.imag == 0 and c.real < 0:
        return True, -c
    if c.real == 0 and c.imag < 0:
        return True, -c
    return False, c


def _render_poly(p: SkewPoly) -> str:
    terms = p.terms()
    if not terms:
        return "0"
    parts: list[str] = []
    for e, c in terms:
        neg, mag = _coeff_sign_split(c)
        mono = _render_monomial(e)
        coeff_txt = _format_coeff(mag)
        if mono and coeff_txt == "1":
            body = mono
        elif mono:
            body = f"{coeff_txt} {mono}"
        else:
            body = coeff_txt
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(parts)


def render(value) -> str:
    """Canonical text for a SkewPoly, LinearForm, QuadraticForm or
    Factorization: monomials in descending exponent order, unit
    coefficients elided, '+0i' never printed.  Output reparses to an
    equal value."""
    from .rank import Factorization  # local import to avoid a cycle

    if isinstance(value, SkewPoly):
        return _render_poly(value)
    if isinstance(value, (LinearForm, QuadraticForm)):
        return _render_poly(value.to_poly())
    if isinstance(value, Factorization):
        if value.kind == "zero":
            return "0"
        if value.kind == "square":
            return f"({render(value.l1)})^2"
        if value.kind == "product":
            return f"({render(value.l1)})({render(value.l2)})"
        if value.kind == "sum_of_products":
            return f"({render(value.l1)})({render(value.l2)}) + ({render(value.l3)})^2"
    raise InputError(f"cannot render {type(value).__name__}")
