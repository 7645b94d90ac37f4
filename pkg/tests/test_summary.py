import math

import pytest
from hypothesis import given, strategies as st

from kgreform.datasets import DBO, DBR, EX, data_path, load_fixture
from kgreform.query import TriplePattern, Var
from kgreform.rdf import SUBCLASSOF, TYPE, Iri, Literal, Triple, build_graph, compute_closure
from kgreform.summary import (EmptySummary, Fact, NotEntityPattern, RankedFact, SelectionConfig,
                              dedup_properties, entity_positions, entity_rule, fact_set,
                              filter_facts, group_and_select, popularity, rank, read_iri_list,
                              reformulate, specificity, summarize, summary_pattern)


def ex(x):
    return Iri(EX + x)


@pytest.fixture(scope="module")
def scorsese():
    return load_fixture("scorsese")


@pytest.fixture(scope="module")
def coppola():
    return load_fixture("coppola")


# Values frozen from the brute-force ranking oracle (tests/oracles.py).
SCORSESE_RANKS = {
    ("almaMater", "New_York_University"): 3.05449853691666,
    ("birthPlace", "Queens"): 3.0371214365564234,
    ("subject", "Tisch_School_Alumni"): 2.925376660401235,
    ("parents", "Catherine_Scorsese"): 1.943141344118819,
    ("parents", "Charles_Scorsese"): 1.943141344118819,
    ("spouse", "Isabella_Rossellini"): 1.943141344118819,
}


def test_scorsese_ranks_match_frozen_oracle(scorsese):
    e = ex("Martin_Scorsese")
    assert scorsese.count_entities() == 33
    for (p, o), want in SCORSESE_RANKS.items():
        rf = rank(Fact(ex(p), ex(o)), scorsese)
        assert rf.rank == pytest.approx(want, rel=1e-12)
        assert rf.rank == pytest.approx(rf.specificity * rf.popularity)
    assert len(filter_facts(fact_set(e, scorsese), scorsese)) == 6


def test_specificity_and_popularity_formulas(scorsese):
    f = Fact(ex("almaMater"), ex("New_York_University"))
    df = scorsese.count_entities_with_fact(*f)
    n = scorsese.count_triples_with_object(f.object)
    assert specificity(f, scorsese) == pytest.approx(math.log(33 / df))
    assert popularity(f.object, scorsese) == pytest.approx(math.log(n))
    assert specificity(f, scorsese, base=2) == pytest.approx(math.log2(33 / df))
    with pytest.raises(ValueError):
        popularity(ex("never_an_object"), scorsese)


def test_any_fact_df_mode_gives_one_specificity_for_all(scorsese):
    cfg = SelectionConfig(df_mode="any_fact")
    values = {specificity(Fact(ex(p), ex(o)), scorsese, df_mode=cfg.df_mode) for p, o in SCORSESE_RANKS}
    assert len(values) == 1


def test_scorsese_later_rounds(scorsese):
    e = ex("Martin_Scorsese")
    # persons: parents twice and spouse share one range
    assert summarize(e, scorsese, round=1).facts == [(ex("parents"), ex("Charles_Scorsese"))]
    assert summarize(e, scorsese, round=2).facts == [(ex("spouse"), ex("Isabella_Rossellini"))]
    assert summarize(e, scorsese, round=3).facts == []


# ---------------------------------------------------------------- Coppola: dedup and types

def _coppola_cfg(**kw):
    return SelectionConfig(blacklist=read_iri_list(data_path("blacklist.txt")),
                           namespace_priority=read_iri_list(data_path("namespaces.txt")),
                           include_type_facts=True, **kw)


def test_coppola_summaries(coppola):
    e = Iri(DBR + "Francis_Ford_Coppola")
    wd = "http://www.wikidata.org/entity/"
    r0 = summarize(e, coppola, _coppola_cfg(), round=0).facts
    r1 = summarize(e, coppola, _coppola_cfg(), round=1).facts
    assert r0 == [(Iri(DBO + "birthPlace"), Iri(DBR + "Detroit")),
                  (Iri(DBO + "occupation"), Iri(DBR + "Film_Producer")),
                  (TYPE, Iri(wd + "Q215627"))]
    assert r1 == [(Iri(DBO + "birthPlace"), Iri(DBR + "Michigan")),
                  (Iri(DBO + "occupation"), Iri(DBR + "Screenwriter")),
                  (TYPE, Iri(wd + "Q5"))]
    assert all(p.value != "http://dbpedia.org/property/birthPlace" for p, _ in r0 + r1)


def test_blacklist_is_honoured(coppola):
    e = Iri(DBR + "Francis_Ford_Coppola")
    preds = {f.predicate for f in filter_facts(fact_set(e, coppola), coppola, _coppola_cfg())}
    assert not any(p.value in _coppola_cfg().blacklist for p in preds)


def test_read_iri_list_skips_comments(tmp_path):
    f = tmp_path / "list.txt"
    f.write_text("# header\n<http://a/x#y>\n\nhttp://b/\n")
    assert read_iri_list(f) == ["http://a/x#y", "http://b/"]


# ---------------------------------------------------------------- filtering

def _small():
    return compute_closure(build_graph([
        Triple(ex("a"), ex("p"), ex("x")),
        Triple(ex("b"), ex("p"), ex("x")),
        Triple(ex("a"), ex("q"), ex("lonely")),
        Triple(ex("a"), ex("name"), Literal("A")),
        Triple(ex("a"), TYPE, ex("K")),
        Triple(ex("b"), TYPE, ex("K")),
        Triple(ex("K"), SUBCLASSOF, ex("Top")),
    ]))


def test_filter_drops_literals_unique_and_types():
    g = _small()
    kept = filter_facts(fact_set(ex("a"), g), g).facts
    assert kept == (Fact(ex("p"), ex("x")),)
    with_types = filter_facts(fact_set(ex("a"), g), g, SelectionConfig(include_type_facts=True)).facts
    assert Fact(TYPE, ex("K")) in with_types
    keep_all = SelectionConfig(exclude_unique=False, exclude_literals=False)
    assert Fact(ex("q"), ex("lonely")) in filter_facts(fact_set(ex("a"), g), g, keep_all).facts


def test_dedup_prefers_higher_rank_then_priority():
    a = RankedFact(Fact(Iri("http://one/name"), ex("v")), 1, 1, 2.0)
    b = RankedFact(Fact(Iri("http://two#name"), ex("w")), 1, 1, 1.0)
    c = RankedFact(Fact(Iri("http://two#name"), ex("z")), 1, 1, 1.0)
    assert dedup_properties([a, b, c]) == [a]
    tie = RankedFact(Fact(Iri("http://two#name"), ex("w")), 1, 1, 2.0)
    cfg = SelectionConfig(namespace_priority=("http://two#",))
    assert dedup_properties([a, tie], cfg) == [tie]
    assert dedup_properties([a, tie]) == [a]  # no priority: IRI order


# ---------------------------------------------------------------- selection

def _rf(p, o, r, rng=None):
    return RankedFact(Fact(ex(p), ex(o)), r, 1.0, r, ex(rng) if rng else None)


def test_group_and_select_one_per_range():
    facts = [_rf("p", "a", 5, "A"), _rf("p", "b", 4, "A"), _rf("q", "c", 3, "B"),
             _rf("r", "d", 2), _rf("r", "e", 1)]
    assert [f.object for f in group_and_select(facts, 3).facts] == [ex("a"), ex("c"), ex("d")]
    assert [f.object for f in group_and_select(facts, 3, round=1).facts] == [ex("b"), ex("e")]
    assert group_and_select(facts, 3, round=2).facts == []
    assert len(group_and_select(facts, 1)) == 1
    with pytest.raises(ValueError):
        group_and_select(facts, 0)


ranked = st.builds(_rf, st.sampled_from("pqr"), st.sampled_from("abcdef"),
                   st.floats(0, 10, allow_nan=False), st.sampled_from([None, "A", "B", "C"]))


@given(st.lists(ranked, max_size=12), st.integers(1, 4), st.integers(0, 3))
def test_selection_invariants(facts, k, rnd):
    s = group_and_select(facts, k, rnd)
    assert len(s) <= k
    groups = [rf.group for rf in s.ranked]
    assert len(set(map(str, groups))) == len(groups)
    ranks = [rf.rank for rf in s.ranked]
    assert ranks == sorted(ranks, reverse=True)


# ---------------------------------------------------------------- reformulation rules

@pytest.mark.parametrize("pattern, rule, position", [
    (("e", None, None), 1, "subject"),
    (("e", "p", None), 2, "subject"),
    (("e", "p", "o"), 3, "subject"),
    (("s", "p", "e"), 4, "object"),
    ((None, "p", "e"), 5, "object"),
    ((None, None, "e"), 6, "object"),
])
def test_entity_rules(scorsese, pattern, rule, position):
    names = {"e": ex("Martin_Scorsese"), "s": ex("not_in_graph"), "p": ex("director"),
             "o": ex("Queens")}
    parts = [names[x] if x else Var(v) for x, v in zip(pattern, "xyz")]
    assert entity_rule(TriplePattern(*parts), scorsese) == (rule, position)


def test_subject_entity_is_tried_first(scorsese):
    tp = TriplePattern(ex("The_Godfather"), ex("director"), ex("Martin_Scorsese"))
    assert entity_rule(tp, scorsese) == (3, "subject")
    assert entity_rule(tp, scorsese, "object") == (4, "object")
    assert entity_positions(tp, scorsese) == ["subject", "object"]


def test_non_entity_patterns(scorsese):
    with pytest.raises(NotEntityPattern):
        entity_rule(TriplePattern(Var("x"), ex("director"), Var("y")), scorsese)
    with pytest.raises(NotEntityPattern):
        entity_rule(TriplePattern(Var("x"), TYPE, ex("Person")), scorsese)
    assert entity_positions(TriplePattern(Var("x"), ex("director"), Literal("v")), scorsese) == []


def test_rule_1_has_one_round(scorsese):
    tp = TriplePattern(ex("Martin_Scorsese"), Var("p"), Var("o"))
    ref = reformulate(tp, scorsese)
    assert ref.patterns == (TriplePattern(Var("_ent1"), Var("p"), Var("o")),)
    with pytest.raises(EmptySummary):
        reformulate(tp, scorsese, round=1)


def test_rule_2_excludes_its_predicate(scorsese):
    tp = TriplePattern(ex("Martin_Scorsese"), ex("almaMater"), Var("o"))
    ref = reformulate(tp, scorsese)
    assert ex("almaMater") not in {rf.fact.predicate for rf in ref.appended}


def test_rule_3_excludes_only_its_pair(scorsese):
    tp = TriplePattern(ex("Martin_Scorsese"), ex("parents"), ex("Catherine_Scorsese"))
    facts = [rf.fact for rf in reformulate(tp, scorsese, SelectionConfig(k=4)).appended]
    assert Fact(ex("parents"), ex("Catherine_Scorsese")) not in facts
    assert Fact(ex("parents"), ex("Charles_Scorsese")) in facts


def test_per_feature_appends_single_facts(scorsese):
    tp = TriplePattern(Var("s"), ex("director"), ex("Martin_Scorsese"))
    got = []
    for r in range(10):
        try:
            got.append(reformulate(tp, scorsese, round=r, per_feature=True))
        except EmptySummary:
            break
    assert len(got) == 6
    assert all(len(ref.patterns) == 2 for ref in got)


def test_fresh_variable_avoids_query_names(scorsese):
    tp = TriplePattern(Var("s"), ex("director"), ex("Martin_Scorsese"))
    assert reformulate(tp, scorsese, used={"_ent1"}).variable == "_ent2"


def test_summary_pattern_shares_variable(scorsese):
    s = summarize(ex("Martin_Scorsese"), scorsese)
    sp = summary_pattern(s, "v")
    assert {tp.subject for tp in sp.patterns} == {Var("v")}
    assert [(tp.predicate, tp.object) for tp in sp.patterns] == s.facts
