"""Relax and reformulate basic graph pattern queries over RDF graphs."""

from .rdf import (Blank, Graph, Iri, Literal, NTriplesError, SchemaIndex, Triple, build_graph,
                  compute_closure, count_entities, count_entities_with_fact,
                  count_triples_with_object, load_graph, match_triples, parse_ntriples)
from .query import (BGPQuery, QuerySyntaxError, SolutionSet, TriplePattern, Var, evaluate,
                    parse_query, substitute)
from .relaxation import (NotApplicable, RewriteStep, RuleKind, literal_relax, simple_relax,
                         superclass_relax, superproperty_relax, variable_typing)
from .summary import (EmptySummary, EntitySummary, Fact, FactSet, NotEntityPattern, RankedFact,
                      SelectionConfig, SummaryPattern, dedup_properties, fact_set, filter_facts,
                      group_and_select, popularity, rank, reformulate, reformulate_pattern,
                      specificity, summarize, summary_pattern)
from .generation import (Candidate, Execution, GenerationConfig, canonical_form, execute_all,
                         generate)

__version__ = "0.1.0"
