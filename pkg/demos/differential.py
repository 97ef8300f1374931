"""Cross-check the reasoner against bounded countermodel search on random ontologies.

Run with ``python3 demos/differential.py [count] [seed]``.
"""
import sys

from elpp.differential import run
from elpp.generate import CONCRETE, SMALL

count = int(sys.argv[1]) if len(sys.argv) > 1 else 200
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0

# %% Abstract ontologies: names, nominals, existentials and role chains.
report = run(count, seed=seed, shape=SMALL)
print(f"abstract: {report.cases} cases, {report.entailed} entailed, "
      f"{len(report.disagreements)} disagreements, {report.seconds:.2f} s")

# %% The same with rational and string predicates mixed in.
report = run(count, seed=seed, shape=CONCRETE)
print(f"concrete: {report.cases} cases, {report.entailed} entailed, "
      f"{len(report.disagreements)} disagreements, {report.seconds:.2f} s")
for case in report.disagreements[:5]:
    print("  disagreement:", case)
