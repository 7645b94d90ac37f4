"""Basic graph pattern queries: parsing and evaluation.

Constants inside patterns are plain :mod:`kgreform.rdf` terms; variables are
:class:`Var`.  The parser accepts a small SPARQL subset::

    PREFIX dbo: <http://dbpedia.org/ontology/>
    SELECT DISTINCT ?movie WHERE { ?movie a dbo:Film . ?movie dbo:director ?d }
"""

from __future__ import annotations

import re
import time
from collections import namedtuple
from dataclasses import dataclass
from typing import Iterable, Union

from .rdf import RDF_TYPE, Blank, Graph, Iri, Literal, Term, _unescape, term_key

_VARNAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __post_init__(self):
        if not _VARNAME.match(self.name):
            raise ValueError(f"invalid variable name: {self.name!r}")

    def __str__(self):
        return f"?{self.name}"


PatternTerm = Union[Var, Iri, Blank, Literal]

Binding = dict  # variable name -> Term


def is_var(x) -> bool:
    return isinstance(x, Var)


def pattern_term_key(x: PatternTerm) -> tuple:
    if isinstance(x, Var):
        return (-1, x.name, "", "")
    return term_key(x)


_PatternBase = namedtuple("_PatternBase", "subject predicate object")


class TriplePattern(_PatternBase):
    __slots__ = ()

    def __new__(cls, subject: PatternTerm, predicate: PatternTerm, object: PatternTerm):
        if isinstance(subject, Literal):
            raise TypeError("a literal cannot be a pattern subject")
        if not isinstance(predicate, (Var, Iri)):
            raise TypeError(f"pattern predicate must be a variable or IRI, got {predicate!r}")
        for x in (subject, object):
            if not isinstance(x, (Var, Iri, Blank, Literal)):
                raise TypeError(f"not a pattern term: {x!r}")
        return super().__new__(cls, subject, predicate, object)

    def variables(self) -> list[str]:
        seen = []
        for x in self:
            if isinstance(x, Var) and x.name not in seen:
                seen.append(x.name)
        return seen

    def bound_count(self, bound: Iterable[str] = ()) -> int:
        bound = set(bound)
        return sum(1 for x in self if not isinstance(x, Var) or x.name in bound)

    def __str__(self):
        return f"{self.subject} {self.predicate} {self.object}"


def substitute(tp: TriplePattern, b: Binding) -> TriplePattern:
    """Replace every variable bound in ``b`` by its value."""
    return TriplePattern(*(b.get(x.name, x) if isinstance(x, Var) else x for x in tp))


@dataclass(frozen=True)
class BGPQuery:
    head: tuple[str, ...]
    body: tuple[TriplePattern, ...]
    distinct: bool = False

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(self.head))
        object.__setattr__(self, "body", tuple(self.body))
        present = set(self.variables())
        missing = [v for v in self.head if v not in present]
        if missing:
            raise ValueError(f"head variable(s) not in body: {', '.join('?' + v for v in missing)}")

    def variables(self) -> list[str]:
        seen = []
        for tp in self.body:
            for v in tp.variables():
                if v not in seen:
                    seen.append(v)
        return seen

    def with_body(self, body: Iterable[TriplePattern]) -> BGPQuery:
        return BGPQuery(self.head, tuple(body), self.distinct)

    def to_sparql(self) -> str:
        """Single-line SPARQL text with absolute IRIs; parses back to ``self``."""
        head = " ".join(f"?{v}" for v in self.head) if self.head else "*"
        body = " . ".join(str(tp) for tp in self.body)
        distinct = "DISTINCT " if self.distinct else ""
        return f"SELECT {distinct}{head} WHERE {{ {body} }}"

    def __str__(self):
        return self.to_sparql()


@dataclass
class SolutionSet:
    head: tuple[str, ...]
    rows: list[tuple[Term, ...]]
    time_ms: float = 0.0
    distinct: bool = False

    @property
    def answer_count(self) -> int:
        return len(self.rows)

    @property
    def answers(self) -> set[tuple[Term, ...]]:
        return set(self.rows)

    @property
    def bindings(self) -> list[Binding]:
        return [dict(zip(self.head, row)) for row in self.rows]

    def __len__(self):
        return len(self.rows)


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

class QuerySyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<iri><[^<>\s"{}|^`\\]*>)
  | (?P<var>[?$][A-Za-z_][A-Za-z0-9_]*)
  | (?P<literal>"(?:[^"\\\n\r]|\\.)*"(?:@[A-Za-z]+(?:-[A-Za-z0-9]+)*|\^\^(?:<[^<>\s]*>|[A-Za-z][\w.-]*:[\w.-]*))?)
  | (?P<blank>_:[A-Za-z0-9_](?:[A-Za-z0-9_.-]*[A-Za-z0-9_-])?)
  | (?P<pname>(?:[A-Za-z][\w.-]*)?:(?:[A-Za-z0-9_](?:[\w.-]*[\w-])?)?)
  | (?P<word>[A-Za-z]+)
  | (?P<punct>[{}.*])
""", re.VERBOSE)

_LIT_PARTS = re.compile(r'"((?:[^"\\]|\\.)*)"(?:@(.+)|\^\^(.+))?\Z', re.S)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.prefixes: dict[str, str] = {}

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def keyword(self, word: str) -> bool:
        kind, value, _ = self.peek()
        if kind == "word" and value.upper() == word:
            self.i += 1
            return True
        return False

    def expect_keyword(self, word: str):
        if not self.keyword(word):
            raise QuerySyntaxError(f"expected {word}", self.peek()[2])

    def expand(self, pname: str, pos: int) -> Iri:
        prefix, _, local = pname.partition(":")
        if prefix not in self.prefixes:
            raise QuerySyntaxError(f"undeclared prefix {prefix + ':'!r}", pos)
        return Iri(self.prefixes[prefix] + local)

    def term(self, position: str) -> PatternTerm:
        kind, value, pos = self.take()
        if kind == "var":
            return Var(value[1:])
        if kind == "iri":
            if len(value) == 2:
                raise QuerySyntaxError("empty IRI", pos)
            return Iri(value[1:-1])
        if kind == "pname":
            return self.expand(value, pos)
        if kind == "word" and value == "a" and position == "predicate":
            return Iri(RDF_TYPE)
        if kind == "blank":
            return Blank(value[2:])
        if kind == "literal":
            m = _LIT_PARTS.match(value)
            lex, lang, dt = m.group(1), m.group(2), m.group(3)
            if dt is not None:
                dt = dt[1:-1] if dt.startswith("<") else self.expand(dt, pos).value
            return Literal(_unescape(lex), dt, lang)
        raise QuerySyntaxError(f"expected a {position} term, got {value or 'end of input'!r}", pos)

    def pattern(self) -> TriplePattern:
        start = self.peek()[2]
        s = self.term("subject")
        p = self.term("predicate")
        o = self.term("object")
        try:
            return TriplePattern(s, p, o)
        except TypeError as exc:
            raise QuerySyntaxError(str(exc), start) from None

    def query(self) -> BGPQuery:
        while self.keyword("PREFIX"):
            kind, value, pos = self.take()
            if kind != "pname" or not value.endswith(":"):
                raise QuerySyntaxError("expected prefix name", pos)
            kind, iri, pos = self.take()
            if kind != "iri":
                raise QuerySyntaxError("expected prefix IRI", pos)
            self.prefixes[value[:-1]] = iri[1:-1]
        self.expect_keyword("SELECT")
        distinct = self.keyword("DISTINCT")
        head, star = [], False
        while True:
            kind, value, pos = self.peek()
            if kind == "var":
                self.take()
                head.append(value[1:])
            elif kind == "punct" and value == "*" and not head:
                self.take()
                star = True
                break
            else:
                break
        if not head and not star:
            raise QuerySyntaxError("expected projection variables", self.peek()[2])
        self.expect_keyword("WHERE")
        kind, value, pos = self.take()
        if value != "{":
            raise QuerySyntaxError("expected '{'", pos)
        body = [self.pattern()]
        while True:
            kind, value, pos = self.peek()
            if value == ".":
                self.take()
                if self.peek()[1] == "}":
                    continue
                body.append(self.pattern())
            elif value == "}":
                self.take()
                break
            else:
                raise QuerySyntaxError("expected '.' or '}'", pos)
        kind, value, pos = self.peek()
        if kind != "eof":
            raise QuerySyntaxError(f"unexpected trailing {value!r}", pos)
        if star:
            head = BGPQuery((), body).variables()
        head_pos = self.tokens[0][2]
        try:
            return BGPQuery(tuple(head), tuple(body), distinct)
        except ValueError as exc:
            raise QuerySyntaxError(str(exc), head_pos) from None


def parse_query(text: str) -> BGPQuery:
    """Parse the SPARQL subset into a :class:`BGPQuery`.

    Raises :class:`QuerySyntaxError` for syntax errors, undeclared prefixes
    and head variables that do not occur in the body.
    """
    return _Parser(text).query()


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------

def join_order(body: Iterable[TriplePattern]) -> list[int]:
    """Greedy most-bound-first ordering; ties go to the earlier pattern."""
    remaining = list(enumerate(body))
    bound: set[str] = set()
    order = []
    while remaining:
        best = max(remaining, key=lambda it: (it[1].bound_count(bound), -it[0]))
        remaining.remove(best)
        order.append(best[0])
        bound.update(best[1].variables())
    return order


def _extend(tp: TriplePattern, binding: Binding, g: Graph):
    # plain tuple: a variable bound to a literal may land in subject position
    s, p, o = (binding.get(x.name, x) if isinstance(x, Var) else x for x in tp)
    if isinstance(s, Literal) or isinstance(p, (Literal, Blank)):
        return
    for t in g.match(None if isinstance(s, Var) else s,
                     None if isinstance(p, Var) else p,
                     None if isinstance(o, Var) else o):
        new = binding
        ok = True
        for x, value in zip((s, p, o), t):
            if isinstance(x, Var):
                if new is binding:
                    new = dict(binding)
                prev = new.setdefault(x.name, value)
                if prev != value:
                    ok = False
                    break
        if ok:
            yield new


def matchings(body: Iterable[TriplePattern], g: Graph) -> list[Binding]:
    """Every total assignment of the body's variables whose image lies in ``g``."""
    body = list(body)
    bindings: list[Binding] = [{}]
    for i in join_order(body):
        tp = body[i]
        bindings = [b2 for b in bindings for b2 in _extend(tp, b, g)]
        if not bindings:
            break
    return bindings


def evaluate(q: BGPQuery, g: Graph) -> SolutionSet:
    """Evaluate ``q`` over ``g`` (normally the closed graph).

    Rows are projections of every matching onto the head, sorted by term
    order; with ``distinct`` duplicates are dropped.  An empty result is a
    failed query, not an error.
    """
    start = time.perf_counter()
    rows = [tuple(b[v] for v in q.head) for b in matchings(q.body, g)]
    if q.distinct:
        rows = list(set(rows))
    rows.sort(key=lambda r: tuple(term_key(t) for t in r))
    elapsed = (time.perf_counter() - start) * 1000.0
    return SolutionSet(q.head, rows, elapsed, q.distinct)
