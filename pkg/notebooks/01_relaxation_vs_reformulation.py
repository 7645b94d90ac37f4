"""
Relaxing a constant versus reformulating an entity
==================================================

A query about one director returns a single film.  Dropping the director
constant returns every directed thing in the graph, including research
centres.  Reformulating the director keeps the answers close to the
original intent.
"""

# %%
from kgreform import GenerationConfig, SelectionConfig, execute_all, generate
from kgreform.datasets import load_fixture, load_query

g = load_fixture("scorsese")
q = load_query("director")
print(q.to_sparql())

# %% Simple relaxation only
relax = execute_all(generate(q, g, GenerationConfig.for_mode("relax", max_level=1)), g)
for run in relax:
    print(run.candidate.level, run.answer_count, [str(s) for s in run.candidate.steps])

# %% Entity reformulation with a 3-fact summary
cfg = GenerationConfig.for_mode("reform", max_level=1, selection=SelectionConfig(k=3))
for run in execute_all(generate(q, g, cfg), g):
    print(run.answer_count, "answers,", run.new_answer_count, "new")
    for step in run.candidate.steps:
        print("   ", step)
    for row in run.solutions.rows:
        print("      ", *row)
