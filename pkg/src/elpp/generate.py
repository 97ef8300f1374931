"""Seeded random knowledge bases for differential testing and benchmarks."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .cdomains import (
    ConcatWord, EqConst, EqWord, GtConst, PlusConst, SameQ, SameS, TopQ, TopS,
)
from .core import (
    BOTTOM, GCI, TOP, Atomic, Concept, Conj, Exists, KnowledgeBase, Nominal, Pred, RoleInclusion,
)


@dataclass(frozen=True)
class Shape:
    """Vocabulary and size limits of generated knowledge bases."""

    concepts: tuple = ("A", "B", "C", "D", "E")
    roles: tuple = ("r", "s")
    individuals: tuple = ("a", "b")
    features: tuple = ()
    max_gcis: int = 8
    max_role_inclusions: int = 2
    max_chain: int = 3
    depth: int = 2
    bottom_rate: float = 0.08


SMALL = Shape()
CONCRETE = Shape(features=("f", "g"))

_Q_GRID = (Fraction(-1), Fraction(0), Fraction(1), Fraction(3, 2), Fraction(2))
_S_GRID = ("", "a", "b", "ab", "ba")


def random_predicate(rng: random.Random, features) -> Pred:
    f = rng.choice(features)
    g = rng.choice(features)
    pick = rng.randrange(8)
    if pick == 0:
        return Pred.of(EqConst(rng.choice(_Q_GRID)), f)
    if pick == 1:
        return Pred.of(GtConst(rng.choice(_Q_GRID)), f)
    if pick == 2:
        return Pred.of(PlusConst(rng.choice(_Q_GRID)), f, g)
    if pick == 3:
        return Pred.of(rng.choice([TopQ(), TopS()]), f)
    if pick == 4:
        return Pred.of(rng.choice([SameQ(), SameS()]), f, g)
    if pick == 5:
        return Pred.of(EqWord(rng.choice(_S_GRID)), f)
    return Pred.of(ConcatWord(rng.choice(_S_GRID)), f, g)


def random_concept(rng: random.Random, shape: Shape = SMALL, depth: int | None = None) -> Concept:
    """A description of nesting depth at most ``depth`` (no bottom)."""
    depth = shape.depth if depth is None else depth
    leaves = 6 if shape.features else 5
    choice = rng.randrange(leaves + (3 if depth > 0 else 0))
    if choice == 0:
        return TOP
    if choice in (1, 2, 3):
        return Atomic(rng.choice(shape.concepts))
    if choice == 4:
        return Nominal(rng.choice(shape.individuals))
    if choice == leaves - 1 and shape.features:
        return random_predicate(rng, shape.features)
    if choice == leaves:
        return Conj(random_concept(rng, shape, depth - 1), random_concept(rng, shape, depth - 1))
    return Exists(rng.choice(shape.roles), random_concept(rng, shape, depth - 1))


def random_kb(rng: random.Random | int, shape: Shape = SMALL) -> KnowledgeBase:
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    out = []
    for _ in range(rng.randint(1, shape.max_gcis)):
        lhs = random_concept(rng, shape)
        rhs = BOTTOM if rng.random() < shape.bottom_rate else random_concept(rng, shape)
        out.append(GCI(lhs, rhs))
    for _ in range(rng.randint(0, shape.max_role_inclusions)):
        chain = [rng.choice(shape.roles) for _ in range(rng.randint(1, shape.max_chain))]
        out.append(RoleInclusion(chain, rng.choice(shape.roles)))
    rng.shuffle(out)
    return KnowledgeBase.build(out, concepts=shape.concepts, roles=shape.roles,
                               individuals=shape.individuals, features=shape.features)


def random_query(rng: random.Random, kb: KnowledgeBase) -> tuple[Concept, Concept]:
    """A pair of concept names of ``kb``, occasionally top or bottom."""
    names = [Atomic(n) for n in sorted(kb.concepts)]
    pool = names + [TOP, BOTTOM] if rng.random() < 0.1 else names
    return rng.choice(pool), rng.choice(pool)


BENCHMARK = Shape(
    concepts=tuple(f"C{i}" for i in range(20)),
    roles=tuple(f"r{i}" for i in range(10)),
    individuals=tuple(f"i{i}" for i in range(20)),
    features=("f", "g", "h"),
    max_gcis=36, max_role_inclusions=4, depth=3, bottom_rate=0.0,
)


def benchmark_kb(seed: int = 0, axioms: int = 40) -> KnowledgeBase:
    """20 concept names, 10 role names, 20 individuals and ``axioms`` mixed constraints."""
    rng = random.Random(seed)
    shape = BENCHMARK
    out = []
    n_ris = min(4, axioms // 10)
    for _ in range(axioms - n_ris):
        out.append(GCI(random_concept(rng, shape), random_concept(rng, shape)))
    for _ in range(n_ris):
        chain = [rng.choice(shape.roles) for _ in range(rng.randint(1, 3))]
        out.append(RoleInclusion(chain, rng.choice(shape.roles)))
    return KnowledgeBase.build(out, concepts=shape.concepts, roles=shape.roles,
                               individuals=shape.individuals, features=shape.features)


__all__ = ["Shape", "SMALL", "CONCRETE", "BENCHMARK", "random_concept", "random_kb",
           "random_query", "random_predicate", "benchmark_kb"]
