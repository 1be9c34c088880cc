"""Query surface syntax and AST.

A query is ``SESSIONS [WHERE <session atoms>] MATCH <formula>``: the WHERE
conjunction constrains the session itself, the MATCH formula is checked
against the session's event sequence starting at its first event. Formula
operators, tightest first: NOT/X/F/G, U (right-associative), AND, OR.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime

from .errors import QuerySyntaxError, UnknownAtom
from .sessions import iso_instant, parse_instant


# ---------------------------------------------------------------------------
# Atoms


@dataclass(frozen=True)
class Atom:
    pass


@dataclass(frozen=True)
class ClassAtom(Atom):
    cls: str


@dataclass(frozen=True)
class ContentAtom(Atom):
    cls: str


@dataclass(frozen=True)
class FunctionAtom(Atom):
    cls: str


@dataclass(frozen=True)
class BaseUrlAtom(Atom):
    url: str


@dataclass(frozen=True)
class FullUrlAtom(Atom):
    url: str


@dataclass(frozen=True)
class ParamAtom(Atom):
    name: str
    value: str


@dataclass(frozen=True)
class UserAtom(Atom):
    user: str


@dataclass(frozen=True)
class StartsAfterAtom(Atom):
    bound: datetime


@dataclass(frozen=True)
class EndsBeforeAtom(Atom):
    bound: datetime


SESSION_ATOM_KINDS = (UserAtom, StartsAfterAtom, EndsBeforeAtom, ClassAtom)


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class TrueFormula(Formula):
    pass


@dataclass(frozen=True)
class FalseFormula(Formula):
    pass


@dataclass(frozen=True)
class AtomFormula(Formula):
    atom: Atom


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    operand: Formula


@dataclass(frozen=True)
class Always(Formula):
    operand: Formula


@dataclass(frozen=True)
class Query:
    session_atoms: tuple[Atom, ...]
    formula: Formula

    def __post_init__(self):
        for atom in self.session_atoms:
            if not isinstance(atom, SESSION_ATOM_KINDS):
                raise ValueError(f"{type(atom).__name__} is not a session-level atom")


def desugar(formula: Formula) -> Formula:
    """Rewrite F and G into the U/NOT core: F p = TRUE U p, G p = NOT F NOT p."""
    if isinstance(formula, (TrueFormula, FalseFormula, AtomFormula)):
        return formula
    if isinstance(formula, Not):
        return Not(desugar(formula.operand))
    if isinstance(formula, And):
        return And(desugar(formula.left), desugar(formula.right))
    if isinstance(formula, Or):
        return Or(desugar(formula.left), desugar(formula.right))
    if isinstance(formula, Next):
        return Next(desugar(formula.operand))
    if isinstance(formula, Until):
        return Until(desugar(formula.left), desugar(formula.right))
    if isinstance(formula, Eventually):
        return Until(TrueFormula(), desugar(formula.operand))
    if isinstance(formula, Always):
        return Not(Until(TrueFormula(), Not(desugar(formula.operand))))
    raise TypeError(f"not a formula node: {formula!r}")


# ---------------------------------------------------------------------------
# Lexer

_KEYWORDS = frozenset(
    {"SESSIONS", "WHERE", "MATCH", "AND", "OR", "NOT", "X", "F", "G", "U", "TRUE", "FALSE"}
)
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*")


@dataclass(frozen=True)
class _Token:
    kind: str  # KEYWORD, IDENT, STRING, LPAREN, RPAREN, COMMA, EOF
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "(":
            tokens.append(_Token("LPAREN", ch, i))
            i += 1
        elif ch == ")":
            tokens.append(_Token("RPAREN", ch, i))
            i += 1
        elif ch == ",":
            tokens.append(_Token("COMMA", ch, i))
            i += 1
        elif ch == '"':
            start = i
            i += 1
            out = []
            while i < n and text[i] != '"':
                if text[i] == "\\" and i + 1 < n:
                    out.append(text[i + 1])
                    i += 2
                else:
                    out.append(text[i])
                    i += 1
            if i >= n:
                raise QuerySyntaxError(start, "closing quote")
            i += 1
            tokens.append(_Token("STRING", "".join(out), start))
        else:
            m = _IDENT_RE.match(text, i)
            if not m:
                raise QuerySyntaxError(i, "token", repr(ch))
            word = m.group()
            kind = "KEYWORD" if word in _KEYWORDS else "IDENT"
            tokens.append(_Token(kind, word, i))
            i = m.end()
    tokens.append(_Token("EOF", "", n))
    return tokens


# ---------------------------------------------------------------------------
# Parser

_SESSION_ATOMS = ("user", "starts_after", "ends_before")
_EVENT_ATOMS = ("content", "function", "baseurl", "url", "param")
_ATOM_NAMES = _SESSION_ATOMS + _EVENT_ATOMS


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.index = 0

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, kind: str, what: str) -> _Token:
        token = self.peek()
        if token.kind != kind:
            raise QuerySyntaxError(token.pos, what, token.text or "end of input")
        return self.advance()

    def at_keyword(self, *words: str) -> bool:
        token = self.peek()
        return token.kind == "KEYWORD" and token.text in words

    def take_keyword(self, word: str, what: str) -> _Token:
        token = self.peek()
        if not (token.kind == "KEYWORD" and token.text == word):
            raise QuerySyntaxError(token.pos, what, token.text or "end of input")
        return self.advance()

    # query := SESSIONS (WHERE conj)? MATCH formula EOF
    def parse_query(self) -> Query:
        self.take_keyword("SESSIONS", "SESSIONS")
        session_atoms: list[Atom] = []
        if self.at_keyword("WHERE"):
            self.advance()
            session_atoms.append(self.parse_session_atom())
            while self.at_keyword("AND"):
                self.advance()
                session_atoms.append(self.parse_session_atom())
        self.take_keyword("MATCH", "MATCH")
        formula = self.parse_or()
        tail = self.peek()
        if tail.kind != "EOF":
            raise QuerySyntaxError(tail.pos, "end of query", tail.text)
        return Query(session_atoms=tuple(session_atoms), formula=formula)

    def parse_session_atom(self) -> Atom:
        token = self.peek()
        atom = self.parse_atom()
        if not isinstance(atom, SESSION_ATOM_KINDS):
            raise QuerySyntaxError(
                token.pos, "session atom (user, starts_after, ends_before)", token.text
            )
        return atom

    def parse_or(self) -> Formula:
        node = self.parse_and()
        while self.at_keyword("OR"):
            self.advance()
            node = Or(node, self.parse_and())
        return node

    def parse_and(self) -> Formula:
        node = self.parse_until()
        while self.at_keyword("AND"):
            self.advance()
            node = And(node, self.parse_until())
        return node

    def parse_until(self) -> Formula:
        node = self.parse_unary()
        if self.at_keyword("U"):
            self.advance()
            node = Until(node, self.parse_until())
        return node

    def parse_unary(self) -> Formula:
        if self.at_keyword("NOT", "X", "F", "G"):
            op = self.advance().text
            operand = self.parse_unary()
            return {
                "NOT": Not,
                "X": Next,
                "F": Eventually,
                "G": Always,
            }[op](operand)
        return self.parse_primary()

    def parse_primary(self) -> Formula:
        token = self.peek()
        if self.at_keyword("TRUE"):
            self.advance()
            return TrueFormula()
        if self.at_keyword("FALSE"):
            self.advance()
            return FalseFormula()
        if token.kind == "LPAREN":
            self.advance()
            node = self.parse_or()
            self.expect("RPAREN", "closing parenthesis")
            return node
        if token.kind == "IDENT":
            return AtomFormula(self.parse_atom())
        raise QuerySyntaxError(token.pos, "formula", token.text or "end of input")

    def parse_atom(self) -> Atom:
        name_token = self.expect("IDENT", "atom name")
        name = name_token.text
        if name not in _ATOM_NAMES:
            raise UnknownAtom(name, name_token.pos)
        self.expect("LPAREN", "opening parenthesis")
        atom = self._parse_atom_body(name, name_token.pos)
        self.expect("RPAREN", "closing parenthesis")
        return atom

    def _arg_string(self, what: str) -> str:
        return self.expect("STRING", what).text

    def _arg_name(self, what: str) -> str:
        token = self.peek()
        if token.kind in ("IDENT", "STRING", "KEYWORD"):
            return self.advance().text
        raise QuerySyntaxError(token.pos, what, token.text or "end of input")

    def _arg_instant(self, what: str) -> datetime:
        token = self.expect("STRING", what)
        try:
            return parse_instant(token.text)
        except ValueError:
            raise QuerySyntaxError(
                token.pos, "ISO-8601 UTC instant like 2009-07-01T00:00:00Z", token.text
            ) from None

    def _parse_atom_body(self, name: str, pos: int) -> Atom:
        if name == "user":
            return UserAtom(self._arg_string("quoted user id"))
        if name == "starts_after":
            return StartsAfterAtom(self._arg_instant("quoted instant"))
        if name == "ends_before":
            return EndsBeforeAtom(self._arg_instant("quoted instant"))
        if name == "content":
            return ContentAtom(self._arg_name("class IRI or short name"))
        if name == "function":
            return FunctionAtom(self._arg_name("function type name"))
        if name == "baseurl":
            return BaseUrlAtom(self._arg_string("quoted base URL"))
        if name == "url":
            return FullUrlAtom(self._arg_string("quoted URL"))
        if name == "param":
            pname = self._arg_name("parameter name")
            self.expect("COMMA", "comma")
            return ParamAtom(pname, self._arg_string("quoted parameter value"))
        raise UnknownAtom(name, pos)


def parse_query(text: str) -> Query:
    """Parse query text into a Query; raises QuerySyntaxError or UnknownAtom."""
    return _Parser(_tokenize(text)).parse_query()


def parse_formula(text: str) -> Formula:
    """Parse a bare formula (the part after MATCH)."""
    parser = _Parser(_tokenize(text))
    node = parser.parse_or()
    tail = parser.peek()
    if tail.kind != "EOF":
        raise QuerySyntaxError(tail.pos, "end of formula", tail.text)
    return node


# ---------------------------------------------------------------------------
# Printer

_PREC_OR = 1
_PREC_AND = 2
_PREC_UNTIL = 3
_PREC_UNARY = 4
_PREC_ATOM = 5


def _prec(formula: Formula) -> int:
    if isinstance(formula, Or):
        return _PREC_OR
    if isinstance(formula, And):
        return _PREC_AND
    if isinstance(formula, Until):
        return _PREC_UNTIL
    if isinstance(formula, (Not, Next, Eventually, Always)):
        return _PREC_UNARY
    return _PREC_ATOM


def _quoted(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _name_or_quoted(text: str) -> str:
    return text if _IDENT_RE.fullmatch(text) else _quoted(text)


def format_atom(atom: Atom) -> str:
    if isinstance(atom, UserAtom):
        return f"user({_quoted(atom.user)})"
    if isinstance(atom, StartsAfterAtom):
        return f"starts_after({_quoted(iso_instant(atom.bound))})"
    if isinstance(atom, EndsBeforeAtom):
        return f"ends_before({_quoted(iso_instant(atom.bound))})"
    if isinstance(atom, ContentAtom):
        return f"content({_name_or_quoted(atom.cls)})"
    if isinstance(atom, FunctionAtom):
        return f"function({_name_or_quoted(atom.cls)})"
    if isinstance(atom, BaseUrlAtom):
        return f"baseurl({_quoted(atom.url)})"
    if isinstance(atom, FullUrlAtom):
        return f"url({_quoted(atom.url)})"
    if isinstance(atom, ParamAtom):
        return f"param({_name_or_quoted(atom.name)}, {_quoted(atom.value)})"
    raise TypeError(f"cannot print {type(atom).__name__} (no surface syntax)")


def _wrap(child: Formula, need_parens: bool) -> str:
    text = format_formula(child)
    return f"({text})" if need_parens else text


def format_formula(formula: Formula) -> str:
    """Render a formula with the fewest parentheses that preserve its shape."""
    if isinstance(formula, TrueFormula):
        return "TRUE"
    if isinstance(formula, FalseFormula):
        return "FALSE"
    if isinstance(formula, AtomFormula):
        return format_atom(formula.atom)
    if isinstance(formula, (Not, Next, Eventually, Always)):
        op = {Not: "NOT", Next: "X", Eventually: "F", Always: "G"}[type(formula)]
        return f"{op} {_wrap(formula.operand, _prec(formula.operand) < _PREC_UNARY)}"
    if isinstance(formula, Until):
        left = _wrap(formula.left, _prec(formula.left) <= _PREC_UNTIL)
        right = _wrap(formula.right, _prec(formula.right) < _PREC_UNTIL)
        return f"{left} U {right}"
    if isinstance(formula, (And, Or)):
        op = "AND" if isinstance(formula, And) else "OR"
        prec = _prec(formula)
        left = _wrap(formula.left, _prec(formula.left) < prec)
        right = _wrap(formula.right, _prec(formula.right) <= prec)
        return f"{left} {op} {right}"
    raise TypeError(f"not a formula node: {formula!r}")


def format_query(query: Query) -> str:
    where = ""
    if query.session_atoms:
        where = " WHERE " + " AND ".join(format_atom(a) for a in query.session_atoms)
    return f"SESSIONS{where} MATCH {format_formula(query.formula)}"
