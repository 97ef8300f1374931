"""Concrete domains: exact rationals and strings, alone and inside an ontology.

Run with ``python3 demos/concrete.py``.
"""
from fractions import Fraction

from elpp import Atomic, check_subsumption, parse_kb
from elpp.cdomains import (
    RATIONALS, STRINGS, Atom, ConcatWord, EqConst, EqWord, GtConst, PlusConst,
)

# %% Rationals: f > 3/2 and g = f + 1 forces g > 5/2.
atoms = [Atom(GtConst(Fraction(3, 2)), ("f",)), Atom(PlusConst(1), ("f", "g"))]
print("witness:", RATIONALS.satisfiable(atoms))
print("implies g > 5/2:", RATIONALS.implies(atoms, Atom(GtConst(Fraction(5, 2)), ("g",))))
print("implies g > 3:", RATIONALS.implies(atoms, Atom(GtConst(3), ("g",))))

# %% Adding f = 1 contradicts f > 3/2.
print("with f = 1:", RATIONALS.satisfiable(atoms + [Atom(EqConst(1), ("f",))]))

# %% Strings: g = f + "b" and g = "ab" pins f to "a".
atoms = [Atom(ConcatWord("b"), ("f", "g")), Atom(EqWord("ab"), ("g",))]
print("witness:", STRINGS.satisfiable(atoms))
print("implies f = 'a':", STRINGS.implies(atoms, Atom(EqWord("a"), ("f",))))

# %% Inside an ontology the deciders drive two saturation rules: one derives
# bottom from an unsatisfiable set of predicates, the other adds implied predicates.
kb = parse_kb("""
concept Adult Senior Impossible
feature age
axiom Senior <= Q.gt[64](age)
axiom Q.gt[17](age) <= Adult
axiom Impossible <= (Q.eq[3](age) and Q.gt[4](age))
""")
for c, d in [("Senior", "Adult"), ("Adult", "Senior"), ("Impossible", "Senior")]:
    v = check_subsumption(kb, Atomic(c), Atomic(d))
    print(f"{c} <= {d}: {v.holds} ({v.reason})")
