"""RDF terms and N-Triples input, plus an indexed in-memory graph with RDFS closure.

A :class:`Graph` is built once from a list of triples and never mutated
afterwards; :func:`compute_closure` returns a new graph.  One nested-dict
index per leading position covers every bound/unbound combination of a
triple lookup.
"""

from __future__ import annotations

import re
from collections import namedtuple
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Iterable, Iterator, Union

import networkx as nx

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_SUBCLASSOF = "http://www.w3.org/2000/01/rdf-schema#subClassOf"
RDFS_SUBPROPERTYOF = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf"
RDFS_DOMAIN = "http://www.w3.org/2000/01/rdf-schema#domain"
RDFS_RANGE = "http://www.w3.org/2000/01/rdf-schema#range"

_WS = re.compile(r"\s")


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __post_init__(self):
        if not self.value or _WS.search(self.value) or "<" in self.value or ">" in self.value:
            raise ValueError(f"invalid IRI: {self.value!r}")

    def __str__(self):
        return f"<{self.value}>"


@dataclass(frozen=True, slots=True)
class Blank:
    label: str

    def __post_init__(self):
        if not self.label or _WS.search(self.label):
            raise ValueError(f"invalid blank node label: {self.label!r}")

    def __str__(self):
        return f"_:{self.label}"


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    datatype: str | None = None
    lang: str | None = None

    def __post_init__(self):
        if self.datatype is not None and self.lang is not None:
            raise ValueError("a literal cannot carry both a datatype and a language tag")

    def __str__(self):
        text = '"' + _escape(self.lexical) + '"'
        if self.lang:
            return f"{text}@{self.lang}"
        if self.datatype:
            return f"{text}^^<{self.datatype}>"
        return text


Term = Union[Iri, Blank, Literal]

TYPE = Iri(RDF_TYPE)
SUBCLASSOF = Iri(RDFS_SUBCLASSOF)
SUBPROPERTYOF = Iri(RDFS_SUBPROPERTYOF)
DOMAIN = Iri(RDFS_DOMAIN)
RANGE = Iri(RDFS_RANGE)

#: predicates whose triples describe the schema rather than an entity
SCHEMA_PREDICATES = frozenset({SUBCLASSOF, SUBPROPERTYOF, DOMAIN, RANGE})

_KIND_ORDER = {Iri: 0, Blank: 1, Literal: 2}


def term_key(term: Term) -> tuple:
    """Total sort key over terms: IRIs, then blank nodes, then literals."""
    if isinstance(term, Iri):
        return (0, term.value, "", "")
    if isinstance(term, Blank):
        return (1, term.label, "", "")
    return (2, term.lexical, term.datatype or "", term.lang or "")


_TripleBase = namedtuple("_TripleBase", "subject predicate object")


class Triple(_TripleBase):
    """An RDF statement; subject is an IRI or blank node, predicate an IRI."""

    __slots__ = ()

    def __new__(cls, subject: Term, predicate: Term, object: Term):
        if not isinstance(subject, (Iri, Blank)):
            raise TypeError(f"triple subject must be an IRI or blank node, got {subject!r}")
        if not isinstance(predicate, Iri):
            raise TypeError(f"triple predicate must be an IRI, got {predicate!r}")
        if not isinstance(object, (Iri, Blank, Literal)):
            raise TypeError(f"triple object must be an RDF term, got {object!r}")
        return super().__new__(cls, subject, predicate, object)

    def __str__(self):
        return f"{self.subject} {self.predicate} {self.object} ."


def triple_key(t: Triple) -> tuple:
    return (term_key(t.subject), term_key(t.predicate), term_key(t.object))


# --------------------------------------------------------------------------
# N-Triples
# --------------------------------------------------------------------------

class NTriplesError(ValueError):
    def __init__(self, message: str, line: int, text: str):
        super().__init__(f"line {line}: {message}: {text!r}")
        self.line = line
        self.text = text


_IRI_RE = re.compile(r"<([^<>\s\"{}|^`\\]*)>")
_BLANK_RE = re.compile(r"_:([A-Za-z0-9_][A-Za-z0-9_.\-]*)")
_LITERAL_RE = re.compile(r'"((?:[^"\\\n\r]|\\.)*)"(?:@([A-Za-z]+(?:-[A-Za-z0-9]+)*)|\^\^<([^<>\s]*)>)?')
_UNESCAPE_RE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|[tbnrf\"'\\])")
_SIMPLE_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _unescape(text: str) -> str:
    def repl(m):
        code = m.group(1)
        if code[0] in "uU":
            return chr(int(code[1:], 16))
        return _SIMPLE_ESCAPES[code]

    return _UNESCAPE_RE.sub(repl, text)


_ESCAPE_RE = re.compile(r'[\\"\x00-\x1f\x7f\x85\u2028\u2029]')
_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _escape(text: str) -> str:
    # control and line-separator characters go out as \uXXXX so output stays one line
    return _ESCAPE_RE.sub(lambda m: _ESCAPES.get(m.group(), f"\\u{ord(m.group()):04X}"), text)


def _read_term(line: str, pos: int, lineno: int, scope: str) -> tuple[Term, int]:
    ch = line[pos:pos + 1]
    if ch == "<":
        m = _IRI_RE.match(line, pos)
        if m and m.group(1):
            return Iri(_unescape(m.group(1))), m.end()
        raise NTriplesError("malformed IRI", lineno, line)
    if ch == "_":
        m = _BLANK_RE.match(line, pos)
        if m:
            return Blank(scope + m.group(1).rstrip(".")), pos + 2 + len(m.group(1).rstrip("."))
        raise NTriplesError("malformed blank node", lineno, line)
    if ch == '"':
        m = _LITERAL_RE.match(line, pos)
        if m:
            return Literal(_unescape(m.group(1)), m.group(3) or None, m.group(2) or None), m.end()
        raise NTriplesError("malformed literal", lineno, line)
    raise NTriplesError("expected a term", lineno, line)


def _skip_ws(line: str, pos: int) -> int:
    while pos < len(line) and line[pos] in " \t":
        pos += 1
    return pos


def parse_line(line: str, lineno: int = 1, scope: str = "") -> Triple | None:
    """Parse one N-Triples line; blank lines and comments give ``None``."""
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    pos = _skip_ws(line, 0)
    terms = []
    for _ in range(3):
        if pos >= len(line.rstrip("\r\n")):
            raise NTriplesError("missing term", lineno, stripped)
        term, pos = _read_term(line, pos, lineno, scope)
        terms.append(term)
        pos = _skip_ws(line, pos)
    rest = line[pos:].strip()
    if not rest.startswith("."):
        raise NTriplesError("missing terminating '.'", lineno, stripped)
    rest = rest[1:].strip()
    if rest and not rest.startswith("#"):
        raise NTriplesError("trailing content after '.'", lineno, stripped)
    try:
        return Triple(*terms)
    except TypeError as exc:
        raise NTriplesError(str(exc), lineno, stripped) from None


def parse_ntriples(stream: IO[str] | Iterable[str] | str, scope: str = "") -> list[Triple]:
    """Parse line-oriented N-Triples into a list of triples.

    ``stream`` may be an iterable of lines (an open file works) or a whole
    document as a string.  ``scope`` is prefixed to every blank node label so that
    labels from separately loaded files never collide.  Duplicate lines yield
    duplicate entries; :func:`build_graph` removes them.
    """
    if isinstance(stream, str):
        # only "\n" ends a line; str.splitlines would also split on \x1c-\x1e and \u2028
        stream = stream.split("\n")
    out = []
    for lineno, line in enumerate(stream, start=1):
        t = parse_line(line, lineno, scope)
        if t is not None:
            out.append(t)
    return out


def serialize_ntriples(triples: Iterable[Triple]) -> str:
    return "".join(f"{t}\n" for t in sorted(triples, key=triple_key))


# --------------------------------------------------------------------------
# Schema
# --------------------------------------------------------------------------

def _strict_reach(edges: Iterable[tuple[Term, Term]]) -> dict[Term, set[Term]]:
    """Nodes reachable from each node by a path of length >= 1."""
    g = nx.DiGraph()
    g.add_edges_from(edges)
    cond = nx.condensation(g)
    members = cond.graph["mapping"]
    reach = {}
    for node in g.nodes:
        comp = members[node]
        out = set()
        for d in nx.descendants(cond, comp):
            out.update(cond.nodes[d]["members"])
        scc = cond.nodes[comp]["members"]
        if len(scc) > 1 or g.has_edge(node, node):
            out.update(scc)
        reach[node] = out
    return reach


class _Hierarchy:
    """A sub/super relation with cycles collapsed into equivalence classes."""

    def __init__(self, edges: Iterable[tuple[Term, Term]]):
        g = nx.DiGraph()
        g.add_edges_from((a, b) for a, b in edges if a != b)
        self._cond = nx.condensation(g)
        self._scc = self._cond.graph["mapping"]
        self._reduced = nx.transitive_reduction(self._cond)

    def _members(self, comp) -> list[Term]:
        return sorted(self._cond.nodes[comp]["members"], key=term_key)

    def direct_parents(self, node: Term) -> list[Term]:
        comp = self._scc.get(node)
        if comp is None:
            return []
        out = []
        for parent in sorted(self._reduced.successors(comp)):
            out.extend(self._members(parent))
        return sorted(out, key=term_key)

    def ancestors(self, node: Term) -> set[Term]:
        """Strict ancestors, excluding members equivalent to ``node``."""
        comp = self._scc.get(node)
        if comp is None:
            return set()
        out = set()
        for d in nx.descendants(self._cond, comp):
            out.update(self._cond.nodes[d]["members"])
        return out

    def equivalents(self, node: Term) -> set[Term]:
        comp = self._scc.get(node)
        return set(self._cond.nodes[comp]["members"]) if comp is not None else {node}

    def edges(self) -> dict[Term, list[Term]]:
        return {n: self.direct_parents(n) for n in sorted(self._scc, key=term_key) if self.direct_parents(n)}


@dataclass(frozen=True)
class SchemaIndex:
    """Class and property hierarchies plus instance typing read off a graph.

    ``subclass_edges`` and ``subproperty_edges`` hold *direct* parents only:
    cycles are collapsed and the resulting DAG transitively reduced, so one
    step up the map is one step up the hierarchy even on a closed graph.
    """

    subclass_edges: dict[Term, list[Term]]
    subproperty_edges: dict[Term, list[Term]]
    type_map: dict[Term, frozenset[Term]]
    domains: dict[Term, frozenset[Term]]
    _classes: _Hierarchy = field(repr=False, compare=False)
    _properties: _Hierarchy = field(repr=False, compare=False)

    @classmethod
    def from_triples(cls, triples: Iterable[Triple]) -> SchemaIndex:
        sc, sp, types, domains = [], [], {}, {}
        for s, p, o in triples:
            if p == SUBCLASSOF:
                sc.append((s, o))
            elif p == SUBPROPERTYOF:
                sp.append((s, o))
            elif p == TYPE:
                types.setdefault(s, set()).add(o)
            elif p == DOMAIN:
                domains.setdefault(s, set()).add(o)
        classes, properties = _Hierarchy(sc), _Hierarchy(sp)
        return cls(
            subclass_edges=classes.edges(),
            subproperty_edges=properties.edges(),
            type_map={k: frozenset(v) for k, v in types.items()},
            domains={k: frozenset(v) for k, v in domains.items()},
            _classes=classes,
            _properties=properties,
        )

    def superclasses(self, c: Term) -> list[Term]:
        return self._classes.direct_parents(c)

    def superproperties(self, p: Term) -> list[Term]:
        return self._properties.direct_parents(p)

    def class_ancestors(self, c: Term) -> set[Term]:
        return self._classes.ancestors(c)

    def property_ancestors(self, p: Term) -> set[Term]:
        return self._properties.ancestors(p)

    def types_of(self, x: Term) -> frozenset[Term]:
        return self.type_map.get(x, frozenset())

    def most_specific(self, classes: Iterable[Term]) -> list[Term]:
        """Drop every class that is a strict superclass of another one in the set."""
        classes = set(classes)
        covered = set()
        for c in classes:
            covered |= self.class_ancestors(c) & classes
        return sorted(classes - covered, key=term_key)


# --------------------------------------------------------------------------
# Graph
# --------------------------------------------------------------------------

def _add(index: dict, a, b, c) -> None:
    index.setdefault(a, {}).setdefault(b, set()).add(c)


class Graph:
    """Immutable set of triples with SPO, POS and OSP indexes."""

    def __init__(self, triples: Iterable[Triple] = (), *, closure_applied: bool = False):
        self.triples = frozenset(triples)
        self.closure_applied = closure_applied
        self._spo: dict = {}
        self._pos: dict = {}
        self._osp: dict = {}
        for s, p, o in self.triples:
            _add(self._spo, s, p, o)
            _add(self._pos, p, o, s)
            _add(self._osp, o, s, p)
        self.entity_set = frozenset(s for s, p, _ in self.triples if p not in SCHEMA_PREDICATES)

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    def __contains__(self, t):
        return t in self.triples

    def __repr__(self):
        return f"<Graph {len(self)} triples, closure_applied={self.closure_applied}>"

    @cached_property
    def schema(self) -> SchemaIndex:
        return SchemaIndex.from_triples(self.triples)

    @cached_property
    def _object_counts(self) -> dict[Term, int]:
        return {o: sum(len(ps) for ps in by_s.values()) for o, by_s in self._osp.items()}

    def sorted_triples(self) -> list[Triple]:
        return sorted(self.triples, key=triple_key)

    def terms(self) -> set[Term]:
        return set(self._spo) | set(self._pos) | set(self._osp)

    def match(self, s: Term | None = None, p: Term | None = None, o: Term | None = None,
              index: str | None = None) -> Iterator[Triple]:
        """Yield every triple agreeing with the bound positions.

        ``index`` forces one of ``"spo"``, ``"pos"`` or ``"osp"``; by default
        the index whose leading positions are bound is used.
        """
        if index is None:
            if s is not None:
                index = "osp" if (o is not None and p is None) else "spo"
            elif p is not None:
                index = "pos"
            elif o is not None:
                index = "osp"
            else:
                index = "spo"
        if index == "spo":
            for a, b, c in _scan(self._spo, s, p, o):
                yield Triple(a, b, c)
        elif index == "pos":
            for b, c, a in _scan(self._pos, p, o, s):
                yield Triple(a, b, c)
        elif index == "osp":
            for c, a, b in _scan(self._osp, o, s, p):
                yield Triple(a, b, c)
        else:
            raise ValueError(f"unknown index {index!r}")

    def count_entities(self) -> int:
        return len(self.entity_set)

    def count_entities_with_fact(self, p: Term, o: Term) -> int:
        return len(self._pos.get(p, {}).get(o, ()))

    def count_entities_with_any_fact(self) -> int:
        return len({s for s in self._spo if s in self.entity_set})

    def count_triples_with_object(self, o: Term) -> int:
        return self._object_counts.get(o, 0)

    def facts_of(self, e: Term) -> Iterator[tuple[Term, Term]]:
        for p, objs in self._spo.get(e, {}).items():
            for o in objs:
                yield p, o


def _scan(index: dict, a, b, c) -> Iterator[tuple]:
    firsts = (a,) if a is not None else index.keys()
    for x in firsts:
        level2 = index.get(x)
        if not level2:
            continue
        seconds = (b,) if b is not None else level2.keys()
        for y in seconds:
            level3 = level2.get(y)
            if not level3:
                continue
            if c is not None:
                if c in level3:
                    yield x, y, c
            else:
                for z in level3:
                    yield x, y, z


def build_graph(triples: Iterable[Triple]) -> Graph:
    return Graph(triples)


def compute_closure(g: Graph) -> Graph:
    """Materialize the RDFS closure restricted to four rules.

    subClassOf and subPropertyOf transitivity, type inheritance along
    subClassOf and statement propagation along subPropertyOf.  Hierarchy
    reachability is computed once per round on the condensed graph; rounds
    repeat only when propagation itself produced new schema or type triples.
    """
    triples = set(g.triples)
    while True:
        sc = _strict_reach((s, o) for s, p, o in triples if p == SUBCLASSOF)
        sp = _strict_reach((s, o) for s, p, o in triples if p == SUBPROPERTYOF)
        derived = set()
        for a, ups in sc.items():
            if isinstance(a, (Iri, Blank)):
                derived.update(Triple(a, SUBCLASSOF, b) for b in ups)
        for a, ups in sp.items():
            if isinstance(a, (Iri, Blank)):
                derived.update(Triple(a, SUBPROPERTYOF, b) for b in ups)
        for s, p, o in triples:
            if p == TYPE and o in sc:
                derived.update(Triple(s, TYPE, c) for c in sc[o])
            if p in sp:
                derived.update(Triple(s, q, o) for q in sp[p] if isinstance(q, Iri))
        derived -= triples
        if not derived:
            break
        triples |= derived
    return Graph(triples, closure_applied=True)


def match_triples(g: Graph, s: Term | None = None, p: Term | None = None,
                  o: Term | None = None) -> Iterator[Triple]:
    return g.match(s, p, o)


def count_entities(g: Graph) -> int:
    return g.count_entities()


def count_entities_with_fact(g: Graph, p: Term, o: Term) -> int:
    return g.count_entities_with_fact(p, o)


def count_triples_with_object(g: Graph, o: Term) -> int:
    return g.count_triples_with_object(o)


def load_graph(paths: Iterable, closure: bool = True) -> Graph:
    """Read and merge N-Triples files; blank nodes stay file-scoped."""
    triples = []
    paths = list(paths)
    for i, path in enumerate(paths):
        scope = f"f{i}." if len(paths) > 1 else ""
        with open(path, encoding="utf-8") as fh:
            triples.extend(parse_ntriples(fh, scope=scope))
    g = build_graph(triples)
    return compute_closure(g) if closure else g
