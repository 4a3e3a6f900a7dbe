"""A small DAE description language and signature-matrix extraction.

Example::

    var x, z, theta, tau;
    param M2, g, m;
    eq f1: M2*der(x, 2) + tau*sin(theta);
    eq f2: M2*der(der(z)) + tau*cos(theta) = m*g;

Only derivative orders are extracted; expressions are parsed for syntax but
never evaluated.  Identifiers that are not declared with ``var`` (parameters,
inputs, ``t``, function names) are opaque and contribute nothing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DaeSyntaxError, DerOfNonVariable, NonPositiveDerOrder, NonSquareModel
from .sigma import SignatureMatrix

__all__ = ["DaeModel", "parse_model", "build_signature"]

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>(?://|\#)[^\n]*)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[^\W\d]\w*)
  | (?P<op>[-+*/^(),;:=])
  | (?P<bad>.)
    """,
    re.VERBOSE,
)

_DECL = ("var", "input", "param")
_KEYWORDS = {"var", "input", "param", "eq", "der"}


@dataclass(frozen=True)
class DaeModel:
    """Parsed model: variables in column order and per-equation occurrences.

    Each occurrence is ``(variable_index, order)`` with a 1-based index into
    ``variables``.
    """

    variables: tuple[str, ...]
    equations: tuple[tuple[str, tuple[tuple[int, int], ...]], ...]
    opaque: tuple[str, ...] = ()

    @property
    def equation_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.equations)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    line, line_start = 1, 0
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        col = m.start() - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("ws", "comment"):
            pass
        elif kind == "bad":
            raise DaeSyntaxError(f"unexpected character {m.group()!r}", line, col)
        else:
            toks.append(_Tok(kind, m.group(), line, col))
    toks.append(_Tok("eof", "", line, len(text) - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0
        self.variables: list[str] = []
        self.var_index: dict[str, int] = {}
        self.opaque: list[str] = []
        self.equations: list[tuple[str, list[tuple[int, int]]]] = []

    # token helpers

    @property
    def tok(self) -> _Tok:
        return self.toks[self.pos]

    def error(self, msg: str, tok: _Tok | None = None, cls=DaeSyntaxError):
        tok = tok or self.tok
        return cls(msg, tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("op", "ident") and self.tok.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        tok = self.tok
        if not self.accept(text):
            shown = tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        return tok

    def ident(self) -> _Tok:
        tok = self.tok
        if tok.kind != "ident" or tok.text in _KEYWORDS:
            raise self.error(f"expected identifier, found {tok.text or 'end of input'!r}")
        self.pos += 1
        return tok

    # statements

    def parse(self) -> DaeModel:
        while self.tok.kind != "eof":
            tok = self.tok
            if tok.kind == "ident" and tok.text in _DECL:
                self.pos += 1
                self.declaration(tok.text)
            elif tok.kind == "ident" and tok.text == "eq":
                self.pos += 1
                self.equation()
            else:
                raise self.error(f"expected a statement, found {tok.text!r}")
        return DaeModel(
            tuple(self.variables),
            tuple((name, tuple(occ)) for name, occ in self.equations),
            tuple(self.opaque),
        )

    def declaration(self, kind: str):
        while True:
            tok = self.ident()
            name = tok.text
            if name in self.var_index or name in self.opaque:
                raise self.error(f"{name!r} declared twice", tok)
            if kind == "var":
                self.var_index[name] = len(self.variables) + 1
                self.variables.append(name)
            else:
                self.opaque.append(name)
            if not self.accept(","):
                break
        self.expect(";")

    def equation(self):
        tok = self.ident()
        if any(tok.text == name for name, _ in self.equations):
            raise self.error(f"equation {tok.text!r} defined twice", tok)
        self.expect(":")
        occ: list[tuple[int, int]] = []
        self.expr(occ)
        if self.accept("="):
            self.expr(occ)
        self.expect(";")
        self.equations.append((tok.text, occ))

    # expressions

    def expr(self, occ):
        self.term(occ)
        while self.accept("+") or self.accept("-"):
            self.term(occ)

    def term(self, occ):
        self.unary(occ)
        while self.accept("*") or self.accept("/"):
            self.unary(occ)

    def unary(self, occ):
        if self.accept("-") or self.accept("+"):
            self.unary(occ)
        else:
            self.power(occ)

    def power(self, occ):
        self.primary(occ)
        if self.accept("^"):
            self.unary(occ)

    def primary(self, occ):
        tok = self.tok
        if tok.kind == "num":
            self.pos += 1
        elif self.accept("("):
            self.expr(occ)
            self.expect(")")
        elif tok.kind == "ident" and tok.text == "der":
            var, order = self.der()
            occ.append((var, order))
        elif tok.kind == "ident" and tok.text not in _KEYWORDS:
            self.pos += 1
            if tok.text in self.var_index:
                occ.append((self.var_index[tok.text], 0))
            if self.accept("("):
                if not self.accept(")"):
                    self.expr(occ)
                    while self.accept(","):
                        self.expr(occ)
                    self.expect(")")
        else:
            raise self.error(f"unexpected {tok.text or 'end of input'!r} in expression")

    def der(self) -> tuple[int, int]:
        """``der(v)``, ``der(v, k)`` or nested ``der(der(v))``; returns (var, order)."""
        self.expect("der")
        self.expect("(")
        tok = self.tok
        if tok.kind == "ident" and tok.text == "der":
            var, inner = self.der()
        elif tok.kind == "ident" and tok.text in self.var_index:
            self.pos += 1
            var, inner = self.var_index[tok.text], 0
        else:
            what = tok.text if tok.kind == "ident" else "an expression"
            raise self.error(f"der applied to {what!r}, which is not a declared variable",
                             cls=DerOfNonVariable)
        if self.tok.kind == "op" and self.tok.text not in (",", ")"):
            raise self.error("der applied to an expression, not a variable", tok,
                             cls=DerOfNonVariable)
        order = 1
        if self.accept(","):
            neg = self.accept("-")
            ktok = self.tok
            if ktok.kind != "num" or not ktok.text.isdigit():
                raise self.error("derivative order must be an integer literal", ktok)
            self.pos += 1
            order = -int(ktok.text) if neg else int(ktok.text)
            if order < 1:
                raise self.error(f"derivative order must be >= 1, got {order}", ktok,
                                 cls=NonPositiveDerOrder)
        self.expect(")")
        return var, inner + order


def parse_model(text: str) -> DaeModel:
    """Parse DAE source text into a :class:`DaeModel`."""
    return _Parser(text).parse()


def build_signature(model: DaeModel) -> SignatureMatrix:
    """Signature matrix of ``model``: highest order of each variable in each equation."""
    n = len(model.variables)
    if len(model.equations) != n:
        raise NonSquareModel(len(model.equations), n)
    ents: dict[tuple[int, int], int] = {}
    for i, (_, occ) in enumerate(model.equations, 1):
        for j, k in occ:
            if ents.get((i, j), -1) < k:
                ents[(i, j)] = k
    return SignatureMatrix(n, ents, model.equation_names, model.variables)
