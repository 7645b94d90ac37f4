"""Level-by-level generation and execution of rewritten queries.

Level 0 holds the input query; level ``n + 1`` holds every query obtained by
one more rule application to a level ``n`` query.  Entity constants are
reformulated in place of being relaxed to a bare variable whenever both
rules are enabled.  Queries equal up to renaming of non-head variables are
emitted once.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .query import BGPQuery, SolutionSet, TriplePattern, Var, evaluate, pattern_term_key
from .rdf import Graph, Literal
from .relaxation import (POSITIONS, NotApplicable, RewriteStep, RuleKind, literal_relax,
                         simple_relax, superclass_relax, superproperty_relax, variable_typing)
from .summary import EmptySummary, SelectionConfig, entity_positions, reformulate

RELAX_RULES = frozenset({RuleKind.SUPERCLASS, RuleKind.SUPERPROPERTY, RuleKind.LITERAL, RuleKind.SIMPLE})
REFORM_RULES = frozenset({RuleKind.ENTITY_REFORM, RuleKind.VARIABLE_TYPING})
MODES = {
    "relax": RELAX_RULES,
    "reform": REFORM_RULES,
    "both": RELAX_RULES | REFORM_RULES,
}

# object first so that an entity value is relaxed before the predicate
_SIMPLE_ORDER = ("object", "predicate", "subject")
_MAX_TIE_ORDERINGS = 5040


@dataclass(frozen=True)
class Candidate:
    query: BGPQuery
    steps: tuple[RewriteStep, ...] = ()
    round: int = 0

    @property
    def level(self) -> int:
        return len(self.steps)

    @property
    def rules(self) -> list[str]:
        return [s.kind.value for s in self.steps]


@dataclass(frozen=True)
class GenerationConfig:
    max_level: int = 2
    max_candidates: int = 50
    answer_threshold: int | None = None
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    enable_rules: frozenset[RuleKind] = MODES["both"]
    per_feature: bool = False
    typing_mode: str = "observed"

    def __post_init__(self):
        if self.max_level < 1:
            raise ValueError("max_level must be at least 1")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be at least 1")
        object.__setattr__(self, "enable_rules", frozenset(RuleKind(r) for r in self.enable_rules))

    @classmethod
    def for_mode(cls, mode: str, **kwargs) -> GenerationConfig:
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}; expected one of {sorted(MODES)}")
        return cls(enable_rules=MODES[mode], **kwargs)


# --------------------------------------------------------------------------
# Canonical form
# --------------------------------------------------------------------------

def canonical_form(q: BGPQuery) -> tuple:
    """Key identifying ``q`` up to renaming of non-head variables.

    Patterns are sorted by their shape with anonymous variables blanked out;
    patterns whose shapes tie are tried in every order and the smallest
    renaming wins.  Past a few thousand orderings the first one is used,
    which can only cause a missed duplicate, never a false merge.
    """
    head = set(q.head)

    def shape(tp):
        return tuple((0, x.name) if isinstance(x, Var) and x.name in head
                     else (1, "") if isinstance(x, Var)
                     else (2, pattern_term_key(x)) for x in tp)

    body = sorted(set(q.body), key=shape)
    groups = [list(g) for _, g in itertools.groupby(body, key=shape)]
    orderings = math.prod(math.factorial(len(g)) for g in groups)
    if orderings > _MAX_TIE_ORDERINGS:
        choices = [[tuple(g)] for g in groups]
    else:
        choices = [list(itertools.permutations(g)) for g in groups]
    best = None
    for combo in itertools.product(*choices):
        names: dict[str, int] = {}
        encoded = []
        for tp in itertools.chain.from_iterable(combo):
            row = []
            for x in tp:
                if isinstance(x, Var) and x.name not in head:
                    row.append((1, str(names.setdefault(x.name, len(names)))))
                elif isinstance(x, Var):
                    row.append((0, x.name))
                else:
                    row.append((2, pattern_term_key(x)))
            encoded.append(tuple(row))
        encoded = tuple(encoded)
        if best is None or encoded < best:
            best = encoded
    return (tuple(q.head), q.distinct, best)


# --------------------------------------------------------------------------
# Expansion
# --------------------------------------------------------------------------

def _replace(body: tuple, i: int, new: Iterable[TriplePattern]) -> tuple:
    return body[:i] + tuple(new) + body[i + 1:]


def _typed(parent: Candidate, g: Graph, cfg: GenerationConfig) -> Iterator[Candidate]:
    body = parent.query.body
    for i, tp in enumerate(body):
        try:
            types = variable_typing(tp, g, cfg.typing_mode)
        except NotApplicable:
            continue
        types = [t for t in types if t not in body]
        if not types:
            continue
        detail = f"?{tp.subject.name} typed " + ", ".join(str(t.object) for t in types)
        step = RewriteStep(RuleKind.VARIABLE_TYPING, i, detail)
        yield Candidate(parent.query.with_body(_replace(body, i, types + [tp])),
                        parent.steps + (step,), parent.round)


def expand(parent: Candidate, g: Graph, cfg: GenerationConfig) -> Iterator[Candidate]:
    """All candidates one rule application away from ``parent``."""
    rules = cfg.enable_rules
    q = parent.query
    body = q.body
    used = set(q.variables())

    def child(i, new_patterns, step, round=parent.round):
        return Candidate(q.with_body(_replace(body, i, new_patterns)), parent.steps + (step,), round)

    if parent.level == 0 and RuleKind.VARIABLE_TYPING in rules:
        yield from _typed(parent, g, cfg)

    for i, tp in enumerate(body):
        if RuleKind.SUPERCLASS in rules:
            try:
                for new, step in superclass_relax(tp, g.schema, i):
                    yield child(i, [new], step)
            except NotApplicable:
                pass
        if RuleKind.SUPERPROPERTY in rules:
            try:
                for new, step in superproperty_relax(tp, g.schema, i):
                    yield child(i, [new], step)
            except NotApplicable:
                pass
        if RuleKind.LITERAL in rules and isinstance(tp.object, Literal):
            new, step = literal_relax(tp, used, i)
            yield child(i, [new], step)

        reformed = set()
        if RuleKind.ENTITY_REFORM in rules:
            for position in entity_positions(tp, g):
                for r in itertools.count():
                    try:
                        ref = reformulate(tp, g, cfg.selection, r, position, used, cfg.per_feature)
                    except EmptySummary:
                        break
                    reformed.add(position)
                    step = RewriteStep(RuleKind.ENTITY_REFORM, i, ref.describe() + f" (round {r})")
                    yield child(i, ref.patterns, step, r)
                    if r >= cfg.max_candidates:
                        break

        if RuleKind.SIMPLE in rules:
            for position in _SIMPLE_ORDER:
                if position in reformed:
                    continue
                if isinstance(tp[POSITIONS.index(position)], Var):
                    continue
                new, step = simple_relax(tp, position, used, i)
                yield child(i, [new], step)


def generate(q: BGPQuery, g: Graph, cfg: GenerationConfig | None = None) -> list[Candidate]:
    """Breadth-first candidate generation, original query first.

    Stops after ``max_level`` levels, after ``max_candidates`` rewritten
    queries, or, with ``answer_threshold`` set, once the distinct answers of
    all emitted queries together reach the threshold.
    """
    cfg = cfg or GenerationConfig()
    original = Candidate(q)
    out = [original]
    seen = {canonical_form(q)}
    answers: set | None = None
    if cfg.answer_threshold is not None:
        answers = set(evaluate(q, g).rows)
        if len(answers) >= cfg.answer_threshold:
            return out
    frontier = [original]
    for _ in range(cfg.max_level):
        nxt = []
        for parent in frontier:
            for cand in expand(parent, g, cfg):
                key = canonical_form(cand.query)
                if key in seen:
                    continue
                seen.add(key)
                out.append(cand)
                nxt.append(cand)
                if answers is not None:
                    answers.update(evaluate(cand.query, g).rows)
                    if len(answers) >= cfg.answer_threshold:
                        return out
                if len(out) - 1 >= cfg.max_candidates:
                    return out
        frontier = nxt
        if not frontier:
            break
    return out


# --------------------------------------------------------------------------
# Execution
# --------------------------------------------------------------------------

@dataclass
class Execution:
    candidate: Candidate
    solutions: SolutionSet
    new_answers: list[tuple]

    @property
    def answer_count(self) -> int:
        return self.solutions.answer_count

    @property
    def new_answer_count(self) -> int:
        return len(self.new_answers)


def execute_all(cands: list[Candidate], g: Graph, original: BGPQuery | None = None,
                workers: int | None = None) -> list[Execution]:
    """Evaluate every candidate and diff its answers against the original.

    The original is ``original`` if given, else the first level-0 candidate.
    With ``workers`` the evaluations run on a thread pool; result order
    always follows ``cands``.
    """
    if original is None:
        original = next((c.query for c in cands if c.level == 0), None)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: evaluate(c.query, g), cands))
    else:
        results = [evaluate(c.query, g) for c in cands]
    base: set = set()
    if original is not None:
        match = next((r for c, r in zip(cands, results) if c.query == original), None)
        base = (match or evaluate(original, g)).answers
    out = []
    for cand, sols in zip(cands, results):
        new = sorted(sols.answers - base, key=lambda row: [pattern_term_key(t) for t in row])
        out.append(Execution(cand, sols, new))
    return out
