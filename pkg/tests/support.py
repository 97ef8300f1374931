"""Independent checkers used by the unit and acceptance tests.

These deliberately avoid the deciders under test: they only evaluate
predicates on concrete values.
"""
from __future__ import annotations

import itertools
import random
from collections import defaultdict
from fractions import Fraction

from elpp.cdomains import (
    Atom, ConcatWord, EqConst, EqWord, GtConst, PlusConst, SameQ, SameS, TopQ, TopS,
)

FEATURES = ("f1", "f2", "f3", "f4")
Q_GRID = (Fraction(-1), Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2))
S_GRID = ("", "a", "b", "ab", "ba", "aab")


def random_conjunction(rng: random.Random, domain: str, *, max_atoms: int = 6,
                       features=FEATURES) -> list[Atom]:
    """Up to ``max_atoms`` atoms over at most four features, constants from a small grid."""
    feats = features[:rng.randint(1, len(features))]
    atoms = []
    for _ in range(rng.randint(0, max_atoms)):
        f, g = rng.choice(feats), rng.choice(feats)
        if domain == "Q":
            q = rng.choice(Q_GRID)
            kind = rng.choice(["top", "eq", "gt", "gt", "plus", "plus", "same"])
            p = {"top": TopQ(), "eq": EqConst(q), "gt": GtConst(q),
                 "plus": PlusConst(q), "same": SameQ()}[kind]
        else:
            w = rng.choice(S_GRID)
            kind = rng.choice(["top", "eq", "concat", "concat", "same"])
            p = {"top": TopS(), "eq": EqWord(w), "concat": ConcatWord(w), "same": SameS()}[kind]
        atoms.append(Atom(p, (f, g)[:p.arity]))
    return atoms


def holds(atom, assignment: dict) -> bool:
    return atom.predicate.holds([assignment[f] for f in atom.features])


class _Not:
    """The negation of an atom, as a check for the enumerators."""

    def __init__(self, atom):
        self.atom = atom
        self.features = atom.features

    def check(self, assignment):
        return not holds(self.atom, assignment)


def _check(item, assignment) -> bool:
    return item.check(assignment) if isinstance(item, _Not) else holds(item, assignment)


def _components(atoms):
    """Feature-connected groups of atoms, each with a breadth-first feature order."""
    adj = defaultdict(set)
    for a in atoms:
        for f in a.features:
            adj[f].update(a.features)
    seen, groups = set(), []
    for start in sorted(adj):
        if start in seen:
            continue
        order, queue = [], [start]
        seen.add(start)
        while queue:
            f = queue.pop(0)
            order.append(f)
            for g in sorted(adj[f]):
                if g not in seen:
                    seen.add(g)
                    queue.append(g)
        members = set(order)
        groups.append((order, [a for a in atoms if set(a.features) <= members]))
    return groups


def _search(order, atoms, values) -> dict | None:
    """Backtracking over ``values`` for each feature, checking atoms as soon as they are ground."""
    position = {f: i for i, f in enumerate(order)}
    ready = defaultdict(list)
    for a in atoms:
        ready[max(position[f] for f in a.features)].append(a)
    assignment: dict = {}

    def go(i):
        if i == len(order):
            return True
        for v in values:
            assignment[order[i]] = v
            if all(_check(a, assignment) for a in ready[i]) and go(i + 1):
                return True
        del assignment[order[i]]
        return False

    return dict(assignment) if go(0) else None


def string_universe(atoms) -> list[str]:
    """Every word over the constants' letters plus one fresh letter, up to max length + 2."""
    words = [a.predicate.word for a in atoms if isinstance(a.predicate, (EqWord, ConcatWord))]
    letters = sorted({ch for w in words for ch in w})
    fresh = next(ch for ch in "abcdefghijklmnopqrstuvwxyz" if ch not in letters)
    alphabet = letters + [fresh]
    limit = max((len(w) for w in words), default=0) + 2
    return ["".join(t) for n in range(limit + 1) for t in itertools.product(alphabet, repeat=n)]


def enumerate_strings(atoms, falsify=None) -> dict | None:
    """Exhaustive bounded search for a string witness; None when there is none in the bound.

    With ``falsify``, the witness must also make that atom false.
    """
    universe = string_universe(list(atoms) + ([falsify] if falsify is not None else []))
    checks = list(atoms) + ([_Not(falsify)] if falsify is not None else [])
    witness = {}
    for order, group in _components(checks):
        found = _search(order, group, universe)
        if found is None:
            return None
        witness.update(found)
    return witness


def rational_grid(atoms) -> list[Fraction]:
    consts = {a.predicate.value for a in atoms
              if isinstance(a.predicate, (EqConst, GtConst, PlusConst))} or {Fraction(0)}
    offsets = (Fraction(-2), Fraction(-1), Fraction(-1, 2), Fraction(0),
               Fraction(1, 2), Fraction(1), Fraction(2))
    return sorted({c + o for c in consts for o in offsets})


def sample_rationals(atoms, rng: random.Random, samples: int = 10_000) -> dict | None:
    """Random assignments from the constants-plus-offsets grid (and a few random
    rationals); returns the first one satisfying every atom."""
    feats = sorted({f for a in atoms for f in a.features})
    if not feats:
        return {}
    grid = rational_grid(atoms)
    for _ in range(samples):
        assignment = {}
        for f in feats:
            if rng.random() < 0.9:
                assignment[f] = rng.choice(grid)
            else:
                assignment[f] = Fraction(rng.randint(-12, 12), rng.randint(1, 4))
        if all(holds(a, assignment) for a in atoms):
            return assignment
    return None


SEED_TEXTS = (
    "concept X A B\nrole r1\nindividual b c\n"
    "axiom X <= {b}\naxiom X <= {c}\naxiom A <= (exists r1 . X)\n",
    "concept P W Z\nrole r s t\nfeature f g\n# a comment\n"
    "axiom (P and W and Q.gt[3/2](f)) <= (exists r . (Z and S.eq[\"ab\"](g)))\n"
    "axiom r o s <= t\naxiom r <= s\naxiom Q.plus[-1](f, g) <= bot\n"
    "axiom S.concat[\"\\u00fc\"](g, f) <= (top and S.same(f, g) and Q.same(f, f))\n",
)
TOKENS = ("concept", "role", "individual", "feature", "axiom", "top", "bot", "and", "exists",
          "o", "<=", "{", "}", "(", ")", "[", "]", ".", ",", "Q", "S", "eq", "gt", "plus",
          "same", "concat", "X", "r", "f", "a", "1", "-2/3", "0/0", '"w"', '"', "#", "\n", " ",
          "\t", "é", "\x00", "$")


def fuzz_input(rng: random.Random) -> str | bytes:
    """One fuzz case: raw bytes, token soup, a mutated valid text, or deep nesting."""
    kind = rng.random()
    if kind < 0.15:
        return bytes(rng.randrange(256) for _ in range(rng.randint(0, 60)))
    if kind < 0.45:
        return " ".join(rng.choice(TOKENS) for _ in range(rng.randint(0, 40)))
    if kind < 0.95:
        text = rng.choice(SEED_TEXTS)
        for _ in range(rng.randint(1, 4)):
            i = rng.randrange(len(text) + 1)
            j = min(len(text), i + rng.randint(0, 12))
            op = rng.randrange(4)
            if op == 0:
                text = text[:i] + text[j:]
            elif op == 1:
                text = text[:i] + rng.choice(TOKENS) + text[i:]
            elif op == 2:
                text = text[:i] + text[i:j] * 2 + text[j:]
            else:
                k = rng.randrange(len(text) + 1)
                text = text[:k] + text[i:j] + text[k:]
        return text.encode("utf-8", "surrogatepass") if rng.random() < 0.1 else text
    depth = rng.choice([5, 150, 199, 200, 201, 1000])
    opener = rng.choice(["(exists r . ", "(X and ", "("])
    return "concept X\nrole r\naxiom X <= " + opener * depth + "X" + ")" * depth
