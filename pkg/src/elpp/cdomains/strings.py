"""The string domain S.

Every constraint relates two features by appending a known word
(``SameS`` appends the empty word), so each connected component of the
constraint graph pins all of its features to ``base + tail`` for one
unknown base word and known tails.  Satisfiability reduces to checking
that the tails are consistent and that any constants agree on the base.
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import ClassVar

from .base import ConcreteDomain, DomainError, Predicate, register


class SPredicate(Predicate):
    domain = "S"


def _word(w) -> str:
    if not isinstance(w, str):
        raise DomainError(f"{w!r} is not a string")
    return w


@dataclass(frozen=True)
class TopS(SPredicate):
    arity: ClassVar[int] = 1
    keyword: ClassVar[str] = "top"

    def holds(self, values):
        return True


@dataclass(frozen=True)
class EqWord(SPredicate):
    """``v = word``"""

    word: str
    arity: ClassVar[int] = 1
    keyword: ClassVar[str] = "eq"

    def __post_init__(self):
        _word(self.word)

    @property
    def argument(self):
        return self.word

    def holds(self, values):
        return values[0] == self.word


@dataclass(frozen=True)
class ConcatWord(SPredicate):
    """``v2 = v1 + word``"""

    word: str
    arity: ClassVar[int] = 2
    keyword: ClassVar[str] = "concat"

    def __post_init__(self):
        _word(self.word)

    @property
    def argument(self):
        return self.word

    def holds(self, values):
        return values[1] == values[0] + self.word


@dataclass(frozen=True)
class SameS(SPredicate):
    arity: ClassVar[int] = 2
    keyword: ClassVar[str] = "same"

    def holds(self, values):
        return values[0] == values[1]


@dataclass
class _Component:
    tails: dict[str, str]
    base: str | None  # None: any base word works


def _solve(atoms) -> list[_Component] | None:
    edges = []  # (f, g, w) meaning g = f + w
    constants = defaultdict(set)
    features = []
    for a in atoms:
        p, fs = a.predicate, a.features
        features.extend(fs)
        if isinstance(p, EqWord):
            constants[fs[0]].add(p.word)
        elif isinstance(p, ConcatWord):
            edges.append((fs[0], fs[1], p.word))
        elif isinstance(p, SameS):
            edges.append((fs[0], fs[1], ""))
        elif not isinstance(p, TopS):
            raise DomainError(f"not a string predicate: {p!r}")

    adj = defaultdict(list)
    for f, g, w in edges:
        adj[f].append((g, w, True))
        adj[g].append((f, w, False))

    seen: set[str] = set()
    components = []
    for root in dict.fromkeys(features):
        if root in seen:
            continue
        # rel[v] = (u, p): v is the root value with suffix u removed, then p appended
        rel = {root: ("", "")}
        seen.add(root)
        todo = deque([root])
        while todo:
            v = todo.popleft()
            u, p = rel[v]
            for other, w, forward in adj[v]:
                if other in rel:
                    continue
                if forward:
                    rel[other] = (u, p + w)
                elif p.endswith(w):
                    rel[other] = (u, p[: len(p) - len(w)])
                elif w.endswith(p):
                    rel[other] = (w[: len(w) - len(p)] + u, "")
                else:
                    return None
                seen.add(other)
                todo.append(other)

        longest = max((u for u, _ in rel.values()), key=len)
        if not all(longest.endswith(u) for u, _ in rel.values()):
            return None
        tails = {v: longest[: len(longest) - len(u)] + p for v, (u, p) in rel.items()}

        base = None
        for v in tails:
            for c in constants.get(v, ()):
                if not c.endswith(tails[v]):
                    return None
                b = c[: len(c) - len(tails[v])]
                if base is not None and b != base:
                    return None
                base = b
        components.append(_Component(tails, base))

    index = {v: comp for comp in components for v in comp.tails}
    for f, g, w in edges:
        if index[f].tails[g] != index[f].tails[f] + w:
            return None
    return components


class StringDomain(ConcreteDomain):
    id = "S"
    predicate_types = (TopS, EqWord, ConcatWord, SameS)

    def contains(self, value) -> bool:
        return isinstance(value, str)

    def satisfiable(self, atoms):
        atoms = self.check_atoms(atoms)
        components = _solve(atoms)
        if components is None:
            return None
        witness = {}
        for comp in components:
            base = comp.base or ""
            for v, t in comp.tails.items():
                witness[v] = base + t
        return witness

    def implies(self, atoms, goal) -> bool:
        atoms = self.check_atoms(atoms)
        self.check_atoms([goal])
        components = _solve(atoms)
        if components is None:
            return True
        index = {v: comp for comp in components for v in comp.tails}
        if not all(f in index for f in goal.features):
            return False

        def value(f):
            comp = index[f]
            return None if comp.base is None else comp.base + comp.tails[f]

        p, fs = goal.predicate, goal.features
        if isinstance(p, TopS):
            return True
        if isinstance(p, EqWord):
            return value(fs[0]) == p.word
        w = p.word if isinstance(p, ConcatWord) else ""
        f, g = fs
        if index[f] is index[g]:
            return index[f].tails[g] == index[f].tails[f] + w
        vf, vg = value(f), value(g)
        return vf is not None and vg is not None and vg == vf + w


STRINGS = register(StringDomain())
