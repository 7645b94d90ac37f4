"""
A failing query on a synthetic university graph
===============================================

Full professors who work for a department that has none.  The original
query is empty; the simple relaxation returns every full professor; each
single-feature reformulation lands in between.
"""

# %%
import time

from kgreform import (GenerationConfig, SelectionConfig, build_graph, compute_closure, evaluate,
                      execute_all, generate, simple_relax)
from kgreform.datasets import lubm_failing_query, lubm_like

start = time.perf_counter()
raw = lubm_like()
g = compute_closure(build_graph(raw))
print(len(raw), "triples,", len(g), "after closure")

q = lubm_failing_query()
print(q.to_sparql(), "->", evaluate(q, g).answer_count)

# %% Simple relaxation of the department
relaxed, _ = simple_relax(q.body[1], "object", q.variables(), 1)
print("relaxed:", evaluate(q.with_body((q.body[0], relaxed)), g).answer_count)

# %% One reformulation per feature of the department
cfg = GenerationConfig.for_mode("reform", per_feature=True, max_level=1,
                                selection=SelectionConfig(include_type_facts=True))
for run in execute_all(generate(q, g, cfg), g):
    if run.candidate.rules == ["entity_reform"]:
        print(run.answer_count, run.candidate.steps[-1])

print(f"{time.perf_counter() - start:.2f} s")
