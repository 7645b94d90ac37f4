"""Fact ranking and the entity reformulation rules built on it.

A fact of an entity ``e`` is a ``(predicate, object)`` pair with
``<e predicate object>`` in the graph.  Facts are scored TF-IDF style::

    specificity = log(|entities| / |entities holding the fact|)
    popularity  = log(|triples whose object is the fact's object|)
    rank        = specificity * popularity

and the top-k, one per object range, become the summary that replaces the
entity constant in a query pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .query import TriplePattern, Var
from .rdf import (SCHEMA_PREDICATES, TYPE, Blank, Graph, Iri, Literal, Term,
                  term_key)
from .relaxation import NotApplicable, fresh_var

ENTITY_PREFIX = "_ent"


class NotEntityPattern(NotApplicable):
    """The pattern has no entity constant in a reformulable position."""


class EmptySummary(NotApplicable):
    """Every candidate fact was filtered out, or the rounds are exhausted."""


class Fact(NamedTuple):
    predicate: Term
    object: Term

    def __str__(self):
        return f"{self.predicate} {self.object}"


def fact_key(f: Fact) -> tuple:
    return (term_key(f.predicate), term_key(f.object))


@dataclass(frozen=True)
class FactSet:
    entity: Term
    facts: tuple[Fact, ...]

    def __len__(self):
        return len(self.facts)

    def __iter__(self):
        return iter(self.facts)


@dataclass(frozen=True)
class RankedFact:
    fact: Fact
    specificity: float
    popularity: float
    rank: float
    #: most specific type of the object, ``None`` if it has none
    range: Term | None = None

    @property
    def group(self):
        if self.range is not None:
            return self.range
        return ("untyped", self.fact.predicate)


def rank_key(rf: RankedFact) -> tuple:
    """Descending rank, then predicate IRI, then object."""
    return (-rf.rank, term_key(rf.fact.predicate), term_key(rf.fact.object))


@dataclass(frozen=True)
class EntitySummary:
    entity: Term | None
    k: int
    ranked: tuple[RankedFact, ...]

    @property
    def facts(self) -> list[Fact]:
        return [rf.fact for rf in self.ranked]

    def __len__(self):
        return len(self.ranked)


@dataclass(frozen=True)
class SummaryPattern:
    variable: str
    patterns: tuple[TriplePattern, ...]


@dataclass(frozen=True)
class SelectionConfig:
    k: int = 3
    blacklist: frozenset[str] = frozenset()
    namespace_priority: tuple[str, ...] = ()
    exclude_literals: bool = True
    exclude_unique: bool = True
    include_type_facts: bool = False
    log_base: float = math.e
    #: ``"per_fact"`` counts entities holding the exact fact;
    #: ``"any_fact"`` counts entities holding any fact at all
    df_mode: str = "per_fact"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.df_mode not in ("per_fact", "any_fact"):
            raise ValueError(f"unknown df_mode {self.df_mode!r}")
        object.__setattr__(self, "blacklist", frozenset(self.blacklist))
        object.__setattr__(self, "namespace_priority", tuple(self.namespace_priority))


DEFAULT_CONFIG = SelectionConfig()


# --------------------------------------------------------------------------
# Scoring
# --------------------------------------------------------------------------

def fact_set(e: Term, g: Graph) -> FactSet:
    facts = sorted({Fact(p, o) for p, o in g.facts_of(e)}, key=fact_key)
    return FactSet(e, tuple(facts))


def _log(x: float, base: float) -> float:
    return math.log(x) if base == math.e else math.log(x, base)


def specificity(f: Fact, g: Graph, base: float = math.e, df_mode: str = "per_fact") -> float:
    if df_mode == "any_fact":
        df = g.count_entities_with_any_fact()
    else:
        df = g.count_entities_with_fact(f.predicate, f.object)
    if df < 1:
        raise ValueError(f"no entity holds the fact {f}")
    return _log(g.count_entities() / df, base)


def popularity(o: Term, g: Graph, base: float = math.e) -> float:
    n = g.count_triples_with_object(o)
    if n < 1:
        raise ValueError(f"{o} never occurs as an object")
    return _log(n, base)


def range_of(o: Term, g: Graph) -> Term | None:
    """Most specific type of ``o``; the least by term order if several."""
    types = g.schema.most_specific(g.schema.types_of(o))
    return types[0] if types else None


def rank(f: Fact, g: Graph, cfg: SelectionConfig = DEFAULT_CONFIG) -> RankedFact:
    spec = specificity(f, g, cfg.log_base, cfg.df_mode)
    pop = popularity(f.object, g, cfg.log_base)
    return RankedFact(f, spec, pop, spec * pop, range_of(f.object, g))


# --------------------------------------------------------------------------
# Selection
# --------------------------------------------------------------------------

def filter_facts(fs: FactSet, g: Graph, cfg: SelectionConfig = DEFAULT_CONFIG) -> FactSet:
    """Drop facts that make poor query conditions.

    Removed: schema statements, literal-valued facts, type facts (unless
    ``include_type_facts``), blacklisted predicates, and facts that are
    unique in the graph (held by one entity and whose object occurs once).
    """
    kept = []
    for f in fs.facts:
        p, o = f
        if p in SCHEMA_PREDICATES:
            continue
        if cfg.exclude_literals and isinstance(o, Literal):
            continue
        if p == TYPE and not cfg.include_type_facts:
            continue
        if isinstance(p, Iri) and p.value in cfg.blacklist:
            continue
        if (cfg.exclude_unique and g.count_entities_with_fact(p, o) <= 1
                and g.count_triples_with_object(o) <= 1):
            continue
        kept.append(f)
    return FactSet(fs.entity, tuple(kept))


def split_iri(iri: str) -> tuple[str, str]:
    """``(namespace, local name)`` split after the last ``#`` or ``/``."""
    cut = max(iri.rfind("#"), iri.rfind("/"))
    if cut < 0:
        cut = iri.find(":")
    return iri[:cut + 1], iri[cut + 1:]


def _namespace_rank(iri: str, priority: tuple[str, ...]) -> int:
    for i, prefix in enumerate(priority):
        if iri.startswith(prefix):
            return i
    return len(priority)


def dedup_properties(facts: Iterable[RankedFact],
                     cfg: SelectionConfig = DEFAULT_CONFIG) -> list[RankedFact]:
    """Keep one namespace per property local name.

    When predicates from different namespaces share a local name, only the
    predicate carrying the highest-ranked fact survives (ties: namespace
    priority, then IRI).  Several values of the surviving predicate stay.
    """
    facts = list(facts)
    by_local: dict[str, list[RankedFact]] = {}
    for rf in facts:
        by_local.setdefault(split_iri(_iri_text(rf.fact.predicate))[1], []).append(rf)
    losers = set()
    for group in by_local.values():
        preds = {rf.fact.predicate for rf in group}
        if len(preds) < 2:
            continue
        best = min(group, key=lambda rf: (-rf.rank,
                                          _namespace_rank(_iri_text(rf.fact.predicate), cfg.namespace_priority),
                                          _iri_text(rf.fact.predicate)))
        losers |= preds - {best.fact.predicate}
    return [rf for rf in facts if rf.fact.predicate not in losers]


def _iri_text(t: Term) -> str:
    return t.value if isinstance(t, Iri) else str(t)


def group_and_select(facts: Iterable[RankedFact], k: int, round: int = 0,
                     entity: Term | None = None) -> EntitySummary:
    """Pick up to ``k`` facts with pairwise distinct object ranges.

    Facts are grouped by range and each group sorted by rank.  Round ``r``
    draws the ``r``-th best member of every group that still has one and
    keeps the ``k`` best of those.  Exhausted groups yield an empty summary.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if round < 0:
        raise ValueError("round must be non-negative")
    groups: dict[object, list[RankedFact]] = {}
    for rf in facts:
        groups.setdefault(rf.group, []).append(rf)
    picks = []
    for members in groups.values():
        members.sort(key=rank_key)
        if round < len(members):
            picks.append(members[round])
    picks.sort(key=rank_key)
    return EntitySummary(entity, k, tuple(picks[:k]))


def ranked_facts(e: Term, g: Graph, cfg: SelectionConfig = DEFAULT_CONFIG,
                 exclude_predicates: Iterable[Term] = (),
                 exclude_pairs: Iterable[tuple[Term, Term]] = ()) -> list[RankedFact]:
    """Eligible facts of ``e``, ranked and deduplicated, best first."""
    exclude_predicates = set(exclude_predicates)
    exclude_pairs = {Fact(*pair) for pair in exclude_pairs}
    eligible = [f for f in filter_facts(fact_set(e, g), g, cfg)
                if f.predicate not in exclude_predicates and f not in exclude_pairs]
    ranked = dedup_properties((rank(f, g, cfg) for f in eligible), cfg)
    return sorted(ranked, key=rank_key)


def summarize(e: Term, g: Graph, cfg: SelectionConfig = DEFAULT_CONFIG, round: int = 0,
              exclude_predicates: Iterable[Term] = (),
              exclude_pairs: Iterable[tuple[Term, Term]] = ()) -> EntitySummary:
    facts = ranked_facts(e, g, cfg, exclude_predicates, exclude_pairs)
    return group_and_select(facts, cfg.k, round, entity=e)


def summary_pattern(s: EntitySummary, var: str) -> SummaryPattern:
    v = Var(var)
    return SummaryPattern(var, tuple(TriplePattern(v, rf.fact.predicate, rf.fact.object)
                                     for rf in s.ranked))


# --------------------------------------------------------------------------
# Reformulation rules
# --------------------------------------------------------------------------

def _is_entity(x, g: Graph) -> bool:
    return isinstance(x, (Iri, Blank)) and x in g.entity_set


def entity_positions(tp: TriplePattern, g: Graph) -> list[str]:
    """Positions of ``tp`` holding a reformulable entity constant."""
    out = []
    for position in ("subject", "object"):
        try:
            entity_rule(tp, g, position)
        except NotEntityPattern:
            continue
        out.append(position)
    return out


def entity_rule(tp: TriplePattern, g: Graph, position: str | None = None) -> tuple[int, str]:
    """Which reformulation rule (1-6) applies, and to which position."""
    s, p, o = tp
    if position is None:
        candidates = ("subject", "object")
    elif position in ("subject", "object"):
        candidates = (position,)
    else:
        raise ValueError(f"entity position must be subject or object, not {position!r}")
    for pos in candidates:
        if pos == "subject" and _is_entity(s, g):
            if isinstance(p, Var) and isinstance(o, Var):
                return 1, pos
            if not isinstance(p, Var) and isinstance(o, Var):
                return 2, pos
            if not isinstance(p, Var) and not isinstance(o, Var):
                return 3, pos
        if pos == "object" and _is_entity(o, g) and p != TYPE:
            if not isinstance(s, Var) and not isinstance(p, Var):
                return 4, pos
            if isinstance(s, Var) and not isinstance(p, Var):
                return 5, pos
            if isinstance(s, Var) and isinstance(p, Var):
                return 6, pos
    raise NotEntityPattern(f"no reformulable entity in {tp}")


@dataclass(frozen=True)
class Reformulation:
    rule: int
    entity: Term
    position: str
    variable: str
    patterns: tuple[TriplePattern, ...]
    appended: tuple[RankedFact, ...] = field(default=())

    def describe(self) -> str:
        facts = ", ".join(str(rf.fact) for rf in self.appended)
        text = f"rule {self.rule}: {self.position} {self.entity} -> ?{self.variable}"
        return f"{text} with [{facts}]" if facts else text


def reformulate(tp: TriplePattern, g: Graph, cfg: SelectionConfig = DEFAULT_CONFIG,
                round: int = 0, position: str | None = None, used: Iterable[str] = (),
                per_feature: bool = False) -> Reformulation:
    """Rewrite the entity in ``tp`` into a fresh variable plus its summary.

    With ``per_feature`` the ``round``-th ranked fact alone is appended
    instead of a k-summary.  Raises :class:`NotEntityPattern` or
    :class:`EmptySummary`.
    """
    rule, position = entity_rule(tp, g, position)
    idx = 0 if position == "subject" else 2
    entity = tp[idx]
    var = fresh_var(set(used) | set(tp.variables()), ENTITY_PREFIX)
    parts = list(tp)
    parts[idx] = var
    head = TriplePattern(*parts)
    if rule == 1:
        if round > 0:
            raise EmptySummary("rule 1 has a single reformulation")
        return Reformulation(rule, entity, position, var.name, (head,))

    exclude_predicates, exclude_pairs = (), ()
    if rule in (2, 4, 5):
        exclude_predicates = (tp.predicate,)
    elif rule == 3:
        exclude_pairs = ((tp.predicate, tp.object),)
    facts = ranked_facts(entity, g, cfg, exclude_predicates, exclude_pairs)
    if per_feature:
        chosen = (facts[round],) if round < len(facts) else ()
    else:
        chosen = group_and_select(facts, cfg.k, round, entity).ranked
    if not chosen:
        raise EmptySummary(f"no facts left for {entity} in round {round}")
    summary = EntitySummary(entity, cfg.k, tuple(chosen))
    appended = summary_pattern(summary, var.name).patterns
    return Reformulation(rule, entity, position, var.name, (head,) + appended, tuple(chosen))


def reformulate_pattern(tp: TriplePattern, g: Graph, cfg: SelectionConfig = DEFAULT_CONFIG,
                        round: int = 0, **kwargs) -> list[TriplePattern]:
    return list(reformulate(tp, g, cfg, round, **kwargs).patterns)


def read_iri_list(path) -> list[str]:
    """One IRI (or IRI prefix) per line; lines starting with ``#`` are comments."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                out.append(line.strip("<>"))
    return out
