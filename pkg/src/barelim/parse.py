"""Concrete syntax for types and terms.

Grammar (whitespace-insensitive, ``#`` starts a line comment)::

    type ::= "N" | type "->" type | type "*" | type "x" type | "(" type ")"
    term ::= "fun" ident ":" type "." term | app
    app  ::= app atom | atom
    atom ::= "0" | numeral | "S" atom | "rec" "[" type "]" | ident | "(" term ")"
           | "<" term "," term ">" | "fst" atom | "snd" atom | "nil" "[" type "]"
           | "append" atom atom | "concat" atom atom | "len" atom | "hat" atom
           | "index" atom atom | "trunc" atom atom | "br" "[" type "," type "]"
           | "if0" atom atom atom | "lt" atom atom | "geq" atom atom
           | "max" atom atom | "plus" atom atom | "monus" atom atom

``->`` is right-associative, postfix ``*`` binds tightest and ``x`` binds
tighter than ``->``.  Identifiers may contain the reserved marker ``$`` so
that generated terms print back into parseable text.
"""

from __future__ import annotations

import re
from typing import Iterable, NamedTuple

from barelim import syntax as sx
from barelim.types import N, Arrow, FinType, Prod, Seq, format_type


class ParseError(SyntaxError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line = line
        self.col = col


class Token(NamedTuple):
    kind: str  # "num", "ident", "sym" or "eof"
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+|\#[^\n]*)"
    r"|(?P<num>[0-9]+)"
    r"|(?P<ident>[A-Za-z_$][A-Za-z0-9_'$]*)"
    r"|(?P<sym>->|[()\[\]<>,.:*])"
)

UNARY = {"fst": sx.Fst, "snd": sx.Snd, "len": sx.Len, "hat": sx.Hat, "S": sx.Succ}
BINARY = {
    "append": sx.Append, "concat": sx.Concat, "index": sx.Index, "trunc": sx.Truncate,
    "lt": sx.Lt, "geq": sx.Geq, "max": sx.Max, "plus": sx.Plus, "monus": sx.Monus,
}
KEYWORDS = {"fun", "rec", "nil", "br", "if0", *UNARY, *BINARY}


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        for i, ch in enumerate(m.group()):
            if ch == "\n":
                line, line_start = line + 1, pos + i + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, self.tok.line, self.tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("sym", "ident") and self.tok.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind == "eof":
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def expect_end(self) -> None:
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")

    # types

    def parse_type(self) -> FinType:
        left = self._prod_type()
        if self.accept("->"):
            return Arrow(left, self.parse_type())
        return left

    def _prod_type(self) -> FinType:
        t = self._postfix_type()
        while self.accept("x"):
            t = Prod(t, self._postfix_type())
        return t

    def _postfix_type(self) -> FinType:
        t = self._base_type()
        while self.accept("*"):
            t = Seq(t)
        return t

    def _base_type(self) -> FinType:
        if self.accept("N"):
            return N
        if self.accept("("):
            t = self.parse_type()
            self.expect(")")
            return t
        raise self.error(f"expected a type, found {self.tok.text or 'end of input'!r}")

    # terms

    def parse_term(self) -> sx.Term:
        if self.accept("fun"):
            name = self._ident()
            self.expect(":")
            ty = self.parse_type()
            self.expect(".")
            return sx.Lam(name, ty, self.parse_term())
        t = self._atom()
        while self._starts_atom():
            t = sx.App(t, self._atom())
        return t

    def _ident(self) -> str:
        if self.tok.kind != "ident" or self.tok.text in KEYWORDS:
            raise self.error(f"expected an identifier, found {self.tok.text or 'end of input'!r}")
        return self.advance().text

    def _starts_atom(self) -> bool:
        tok = self.tok
        if tok.kind == "num":
            return True
        if tok.kind == "ident":
            return tok.text != "fun"
        return tok.kind == "sym" and tok.text in ("(", "<")

    def _atom(self) -> sx.Term:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return sx.nat_lit(int(tok.text))
        if tok.kind == "sym":
            if self.accept("("):
                t = self.parse_term()
                self.expect(")")
                return t
            if self.accept("<"):
                left = self.parse_term()
                self.expect(",")
                right = self.parse_term()
                self.expect(">")
                return sx.Pair(left, right)
            raise self.error(f"unexpected {tok.text!r}")
        if tok.kind != "ident":
            raise self.error("unexpected end of input")
        word = tok.text
        if word in UNARY:
            self.advance()
            return UNARY[word](self._atom())
        if word in BINARY:
            self.advance()
            a = self._atom()
            return BINARY[word](a, self._atom())
        if word == "if0":
            self.advance()
            c = self._atom()
            a = self._atom()
            return sx.IfZero(c, a, self._atom())
        if word in ("rec", "nil"):
            self.advance()
            self.expect("[")
            ty = self.parse_type()
            self.expect("]")
            return sx.Rec(ty) if word == "rec" else sx.EmptySeq(ty)
        if word == "br":
            self.advance()
            self.expect("[")
            tau = self.parse_type()
            self.expect(",")
            sigma = self.parse_type()
            self.expect("]")
            return sx.BRConst(tau, sigma)
        return sx.Var(self._ident())


def parse(text: str) -> sx.Term:
    p = Parser(text)
    t = p.parse_term()
    p.expect_end()
    return t


# -- printing -----------------------------------------------------------------

_LAM, _APP, _ATOM = 0, 1, 2

_UNARY_NAMES = {cls: name for name, cls in UNARY.items()}
_BINARY_NAMES = {cls: name for name, cls in BINARY.items()}


class _Printer:
    def __init__(self, names: dict[int, str]):
        self.names = names

    def show(self, t: sx.Term, prec: int) -> str:
        name = self.names.get(id(t))
        if name is not None:
            return name
        s, own = self._show(t)
        return f"({s})" if own < prec else s

    def _show(self, t: sx.Term) -> tuple[str, int]:
        if isinstance(t, sx.Var):
            return t.name, _ATOM
        if isinstance(t, sx.Zero):
            return "0", _ATOM
        if isinstance(t, sx.NatLit):
            return str(t.n), _ATOM
        if isinstance(t, sx.Rec):
            return f"rec[{format_type(t.rho)}]", _ATOM
        if isinstance(t, sx.EmptySeq):
            return f"nil[{format_type(t.elem)}]", _ATOM
        if isinstance(t, sx.BRConst):
            return f"br[{format_type(t.tau)}, {format_type(t.sigma)}]", _ATOM
        if isinstance(t, sx.Pair):
            return f"<{self.show(t.left, _LAM)}, {self.show(t.right, _LAM)}>", _ATOM
        if isinstance(t, sx.Lam):
            return f"fun {t.binder}:{format_type(t.binder_type)}. {self.show(t.body, _LAM)}", _LAM
        if isinstance(t, sx.App):
            return f"{self.show(t.fun, _APP)} {self.show(t.arg, _ATOM)}", _APP
        if type(t) in _UNARY_NAMES:
            (arg,) = sx.children(t)
            return f"{_UNARY_NAMES[type(t)]} {self.show(arg, _ATOM)}", _APP
        if type(t) in _BINARY_NAMES:
            a, b = sx.children(t)
            return f"{_BINARY_NAMES[type(t)]} {self.show(a, _ATOM)} {self.show(b, _ATOM)}", _APP
        if isinstance(t, sx.IfZero):
            parts = " ".join(self.show(c, _ATOM) for c in (t.cond, t.then, t.orelse))
            return f"if0 {parts}", _APP
        raise TypeError(f"not a term: {t!r}")


def format_term(t: sx.Term) -> str:
    return _Printer({}).show(t, _LAM)


def format_program(t: sx.Term, defs: Iterable[tuple[str, sx.Term]]) -> str:
    """Print ``t`` with the given shared subterms abbreviated by name.

    Subterms are matched by identity, so only the very objects listed in
    ``defs`` are abbreviated.  Each definition is printed as a comment line
    ``# name := body`` ahead of the main term, so the text is for reading,
    not for feeding back to :func:`parse`.
    """
    defs = list(defs)
    names = {id(body): name for name, body in defs}
    lines = []
    for name, body in defs:
        printer = _Printer({k: v for k, v in names.items() if k != id(body)})
        lines.append(f"# {name} := {printer.show(body, _LAM)}")
    lines.append(_Printer(names).show(t, _LAM))
    return "\n".join(lines)
