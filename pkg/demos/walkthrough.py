"""A small ontology, classified and explained step by step.

Run with ``python3 demos/walkthrough.py``.
"""
from elpp import (
    BOTTOM, Atomic, Exists, Nominal, check_subsumption, classify, explain, normalize, parse_concept,
    parse_kb,
)
from elpp.classify import SEntry
from elpp.oracle import find_countermodel

# %% The ontology: every X is the individual b and also the individual c,
# and every A has an r1-successor that is an X.
kb = parse_kb("""
concept X A B
role r1
individual b c
axiom X <= {b}
axiom X <= {c}
axiom A <= (exists r1 . X)
""")
for axiom in kb.constraints:
    print(axiom.lhs, "<=", axiom.rhs)

# %% The knowledge base is already normal, so saturation can run directly.
state = classify(normalize(kb))
for concept in sorted(state.S, key=str):
    print(f"S({concept}) = {sorted(map(str, state.S[concept]))}")
print("R(r1) =", state.R["r1"])

# %% Where did {c} in S(X) come from?
print(explain(state, SEntry(Atomic("X"), Nominal("c"))).render())

# %% Queries go through transform, normalization and A-extension first.
for c, d in [("X", "{b}"), ("A", "X"), ("(exists r1 . X)", "bot")]:
    verdict = check_subsumption(kb, parse_concept(c, kb), parse_concept(d, kb))
    print(f"{c} <= {d}: {verdict.holds} ({verdict.reason})")

# %% A refuted query has a finite countermodel; the oracle finds a smallest one.
model = find_countermodel(kb, Exists("r1", Atomic("X")), BOTTOM, 2)
print("countermodel:", model)
