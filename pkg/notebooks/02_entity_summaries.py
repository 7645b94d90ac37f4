"""
Ranking the facts of an entity
==============================

Every fact gets specificity (how rare the fact is among entities) times
popularity (how often its object is referenced).  The summary keeps the
best fact from each object type.
"""

# %%
from kgreform import SelectionConfig, summarize
from kgreform.datasets import DBR, EX, data_path, load_fixture
from kgreform.rdf import Iri
from kgreform.summary import ranked_facts, read_iri_list

g = load_fixture("scorsese")
e = Iri(EX + "Martin_Scorsese")

for rf in ranked_facts(e, g):
    print(f"{rf.rank:7.4f} = {rf.specificity:.4f} x {rf.popularity:.4f}  {rf.fact}  [{rf.range}]")

# %% Rounds walk down each type group
for r in range(3):
    print(r, [str(f) for f in summarize(e, g, round=r).facts])

# %% The log base rescales ranks but never reorders them
for base in (2, 10):
    print(base, summarize(e, g, SelectionConfig(log_base=base)).facts == summarize(e, g).facts)

# %% Namespace de-duplication and a property blacklist
c = load_fixture("coppola")
cfg = SelectionConfig(blacklist=read_iri_list(data_path("blacklist.txt")),
                      namespace_priority=read_iri_list(data_path("namespaces.txt")),
                      include_type_facts=True)
ffc = Iri(DBR + "Francis_Ford_Coppola")
for r in range(2):
    print(r, [str(f) for f in summarize(ffc, c, cfg, round=r).facts])
