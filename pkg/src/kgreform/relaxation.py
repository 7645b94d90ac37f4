"""Relaxation rules and variable typing.

Each rule rewrites a single triple pattern.  A rule whose preconditions do
not hold raises :class:`NotApplicable`; a rule that applies but has nothing
to offer (a class without a superclass, say) returns an empty list.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .query import TriplePattern, Var
from .rdf import TYPE, Graph, Iri, Literal, SchemaIndex, term_key

FRESH_PREFIX = "_rlx"

POSITIONS = ("subject", "predicate", "object")


class RuleKind(str, enum.Enum):
    SUPERCLASS = "superclass"
    SUPERPROPERTY = "superproperty"
    LITERAL = "literal_relax"
    SIMPLE = "simple_relax"
    VARIABLE_TYPING = "variable_typing"
    ENTITY_REFORM = "entity_reform"


class NotApplicable(Exception):
    """The rule's input shape does not match; not a failure."""


@dataclass(frozen=True)
class RewriteStep:
    kind: RuleKind
    source_pattern_index: int
    detail: str

    def __post_init__(self):
        if not self.detail:
            raise ValueError("rewrite step needs a description")

    def __str__(self):
        return f"{self.kind.value}[{self.source_pattern_index}]: {self.detail}"


def fresh_var(used: Iterable[str], prefix: str = FRESH_PREFIX) -> Var:
    """First ``<prefix><n>`` (n = 1, 2, ...) not among ``used``."""
    used = set(used)
    n = 1
    while f"{prefix}{n}" in used:
        n += 1
    return Var(f"{prefix}{n}")


def superclass_relax(tp: TriplePattern, schema: SchemaIndex,
                     index: int = 0) -> list[tuple[TriplePattern, RewriteStep]]:
    if tp.predicate != TYPE or not isinstance(tp.object, Iri):
        raise NotApplicable("superclass relaxation needs <s rdf:type Class>")
    out = []
    for c2 in schema.superclasses(tp.object):
        step = RewriteStep(RuleKind.SUPERCLASS, index, f"{tp.object} -> {c2}")
        out.append((TriplePattern(tp.subject, TYPE, c2), step))
    return out


def superproperty_relax(tp: TriplePattern, schema: SchemaIndex,
                        index: int = 0) -> list[tuple[TriplePattern, RewriteStep]]:
    if not isinstance(tp.predicate, Iri) or tp.predicate == TYPE:
        raise NotApplicable("superproperty relaxation needs a constant non-type predicate")
    out = []
    for p2 in schema.superproperties(tp.predicate):
        step = RewriteStep(RuleKind.SUPERPROPERTY, index, f"{tp.predicate} -> {p2}")
        out.append((TriplePattern(tp.subject, p2, tp.object), step))
    return out


def literal_relax(tp: TriplePattern, used: Iterable[str] = (),
                  index: int = 0) -> tuple[TriplePattern, RewriteStep]:
    if not isinstance(tp.object, Literal):
        raise NotApplicable("literal relaxation needs a literal object")
    v = fresh_var(set(used) | set(tp.variables()))
    step = RewriteStep(RuleKind.LITERAL, index, f"object {tp.object} -> {v}")
    return TriplePattern(tp.subject, tp.predicate, v), step


def simple_relax(tp: TriplePattern, position: str, used: Iterable[str] = (),
                 index: int = 0) -> tuple[TriplePattern, RewriteStep]:
    """Replace the constant at ``position`` by a fresh variable."""
    i = POSITIONS.index(position)
    if isinstance(tp[i], Var):
        raise NotApplicable(f"{position} is already a variable")
    v = fresh_var(set(used) | set(tp.variables()))
    parts = list(tp)
    parts[i] = v
    step = RewriteStep(RuleKind.SIMPLE, index, f"{position} {tp[i]} -> {v}")
    return TriplePattern(*parts), step


def variable_typing(tp: TriplePattern, g: Graph, mode: str = "observed") -> list[TriplePattern]:
    """Type assertions for the subject variable of ``<?v p e>``.

    In ``"observed"`` mode the classes are those shared by every subject
    matching the pattern in ``g``, reduced to the most specific ones.  When
    nothing matches (or in ``"domain"`` mode) the declared ``rdfs:domain``
    classes of ``p`` are used instead.  The result is meant to be prepended
    to the pattern; it is empty when no type can be established.
    """
    if not isinstance(tp.subject, Var) or isinstance(tp.predicate, Var) or isinstance(tp.object, Var):
        raise NotApplicable("variable typing needs <?v p e> with constant p and e")
    if tp.predicate == TYPE:
        raise NotApplicable("pattern is already a type assertion")
    if mode not in ("observed", "domain"):
        raise ValueError(f"unknown typing mode {mode!r}")
    schema = g.schema
    classes: set | None = None
    if mode == "observed":
        subjects = {t.subject for t in g.match(None, tp.predicate, tp.object)}
        for s in sorted(subjects, key=term_key):
            types = schema.types_of(s)
            classes = set(types) if classes is None else classes & types
            if not classes:
                break
    if classes is None:
        classes = set(schema.domains.get(tp.predicate, ()))
    return [TriplePattern(tp.subject, TYPE, c) for c in schema.most_specific(classes)]
