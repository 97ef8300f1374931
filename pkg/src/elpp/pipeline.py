"""Pre-classification stages: query transformation, normalization, A-extension."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .core import (
    GCI, Atomic, Bottom, Concept, Conj, Exists, FreshNames, KnowledgeBase, Nominal,
    RoleInclusion, check, is_basic,
)


@dataclass(frozen=True)
class TransformResult:
    kb: KnowledgeBase
    subsumee: str
    subsumer: str


@dataclass(frozen=True)
class AExtensionResult:
    kb: KnowledgeBase
    individual: str
    role: str


def transform(kb: KnowledgeBase, c: Concept, d: Concept) -> TransformResult:
    """Add ``A <= c`` and ``d <= B`` for fresh concept names A and B."""
    check(kb, c, d)
    fresh = FreshNames.avoiding(kb)
    a, b = fresh("concept"), fresh("concept")
    out = kb.extend([GCI(Atomic(a), c), GCI(d, Atomic(b))], concepts=[a, b])
    return TransformResult(out, a, b)


def a_extend(kb: KnowledgeBase, a: str) -> AExtensionResult:
    """Add ``{t} <= exists r_t . A`` for a fresh individual t and role r_t."""
    if a not in kb.concepts:
        raise ValueError(f"{a} is not a concept name of the knowledge base")
    fresh = FreshNames.avoiding(kb)
    t, r = fresh("individual"), fresh("role")
    out = kb.extend([GCI(Nominal(t), Exists(r, Atomic(a)))], individuals=[t], roles=[r])
    return AExtensionResult(out, t, r)


def _complex(c: Concept) -> bool:
    return not is_basic(c)


# Each rule is (name, condition, application).  The application receives the
# constraint and the fresh-name supply and returns the replacement constraints.

def _nf1_cond(c):
    return isinstance(c, RoleInclusion) and len(c.chain) > 2


def _nf1(c, fresh):
    u = fresh("role")
    return [RoleInclusion(c.chain[:-1], u), RoleInclusion((u, c.chain[-1]), c.sup)]


def _nf2_cond(c):
    return (isinstance(c, GCI) and isinstance(c.lhs, Conj)
            and (_complex(c.lhs.left) or _complex(c.lhs.right)))


def _nf2(c, fresh):
    left, right = c.lhs.left, c.lhs.right
    if _complex(left) and _complex(right):
        a, b = Atomic(fresh("concept")), Atomic(fresh("concept"))
        return [GCI(Conj(a, b), c.rhs), GCI(right, b), GCI(left, a)]
    a = Atomic(fresh("concept"))
    if _complex(left):
        return [GCI(Conj(a, right), c.rhs), GCI(left, a)]
    return [GCI(Conj(left, a), c.rhs), GCI(right, a)]


def _nf3_cond(c):
    return isinstance(c, GCI) and isinstance(c.lhs, Exists) and _complex(c.lhs.filler)


def _nf3(c, fresh):
    a = Atomic(fresh("concept"))
    return [GCI(c.lhs.filler, a), GCI(Exists(c.lhs.role, a), c.rhs)]


def _nf4_cond(c):
    return isinstance(c, GCI) and isinstance(c.lhs, Bottom)


def _nf4(c, fresh):
    return []


def _nf5_cond(c):
    return (isinstance(c, GCI) and _complex(c.lhs)
            and _complex(c.rhs) and not isinstance(c.rhs, Bottom))


def _nf5(c, fresh):
    a = Atomic(fresh("concept"))
    return [GCI(c.lhs, a), GCI(a, c.rhs)]


def _nf6_cond(c):
    return (isinstance(c, GCI) and is_basic(c.lhs)
            and isinstance(c.rhs, Exists) and _complex(c.rhs.filler))


def _nf6(c, fresh):
    a = Atomic(fresh("concept"))
    return [GCI(c.lhs, Exists(c.rhs.role, a)), GCI(a, c.rhs.filler)]


def _nf7_cond(c):
    return isinstance(c, GCI) and is_basic(c.lhs) and isinstance(c.rhs, Conj)


def _nf7(c, fresh):
    return [GCI(c.lhs, c.rhs.left), GCI(c.lhs, c.rhs.right)]


Rule = tuple[str, Callable, Callable]

PHASE1: list[Rule] = [
    ("NF1", _nf1_cond, _nf1),
    ("NF2", _nf2_cond, _nf2),
    ("NF3", _nf3_cond, _nf3),
    ("NF4", _nf4_cond, _nf4),
    ("NF5", _nf5_cond, _nf5),
]
PHASE2: list[Rule] = [
    ("NF6", _nf6_cond, _nf6),
    ("NF7", _nf7_cond, _nf7),
]


def _select(constraints: list, rules: list[Rule]) -> Optional[tuple[int, Rule]]:
    for rule in rules:
        for i, c in enumerate(constraints):
            if rule[1](c):
                return i, rule
    return None


@dataclass(frozen=True)
class NormalizationStep:
    rule: str
    before: object
    after: tuple
    measure: int


def normalize(kb: KnowledgeBase, *, debug: bool = False,
              log: Optional[list] = None) -> KnowledgeBase:
    """Rewrite ``kb`` into normal form.

    With ``debug`` every rule application is checked to strictly decrease
    ``nf_measure``; ``log`` (a list) collects the applied steps.
    """
    check(kb)
    fresh = FreshNames.avoiding(kb)
    constraints = list(kb.constraints)
    measure = nf_measure_of(constraints) if debug else -1
    for phase in (PHASE1, PHASE2):
        while True:
            step = _select(constraints, phase)
            if step is None:
                break
            i, (name, _, apply) = step
            old = constraints[i]
            new = apply(old, fresh)
            constraints[i:i + 1] = new
            if debug:
                m = nf_measure_of(constraints)
                if not m < measure:
                    raise AssertionError(f"{name} on {old} did not decrease the measure "
                                         f"({measure} -> {m})")
                measure = m
            if log is not None:
                log.append(NormalizationStep(name, old, tuple(new), measure))
    out = KnowledgeBase(constraints,
                        kb.concepts | set(fresh.created["concept"]),
                        kb.roles | set(fresh.created["role"]),
                        kb.individuals, kb.features)
    return out


def nf3_component(c: Concept) -> int:
    """Nested-existential count used for the NF3 part of the measure."""
    if isinstance(c, Conj):
        return nf3_component(c.left) + nf3_component(c.right)
    if isinstance(c, Exists):
        if is_basic(c.filler):
            return 0
        return nf3_component(c.filler) + 3
    return 0


def _lhs_weight(c: Concept) -> int:
    if isinstance(c, Bottom):
        return 1
    if isinstance(c, Conj):
        joins = 1 if _complex(c.left) or _complex(c.right) else 0
        return _lhs_weight(c.left) + _lhs_weight(c.right) + joins
    if isinstance(c, Exists):
        if is_basic(c.filler):
            return 0
        return _lhs_weight(c.filler) + 3
    return 0


def _rhs_weight(c: Concept) -> int:
    if isinstance(c, Conj):
        return _rhs_weight(c.left) + _rhs_weight(c.right) + 1
    if isinstance(c, Exists):
        if is_basic(c.filler):
            return 0
        return _rhs_weight(c.filler) + 1
    return 0


def _constraint_weight(c) -> int:
    if isinstance(c, RoleInclusion):
        return max(0, len(c.chain) - 2)
    split = 1 if _complex(c.lhs) and _complex(c.rhs) and not isinstance(c.rhs, Bottom) else 0
    return _lhs_weight(c.lhs) + _rhs_weight(c.rhs) + split


def nf_measure_of(constraints) -> int:
    return sum(_constraint_weight(c) for c in constraints)


def nf_measure(kb: KnowledgeBase) -> int:
    """Weighted count of remaining normalization steps; zero iff normal."""
    return nf_measure_of(kb.constraints)


def _normal_gci(g: GCI) -> bool:
    lhs, rhs = g.lhs, g.rhs
    rhs_ok = is_basic(rhs) or isinstance(rhs, Bottom)
    if is_basic(lhs):
        return rhs_ok or (isinstance(rhs, Exists) and is_basic(rhs.filler))
    if isinstance(lhs, Conj):
        return is_basic(lhs.left) and is_basic(lhs.right) and rhs_ok
    if isinstance(lhs, Exists):
        return is_basic(lhs.filler) and rhs_ok
    return False


def is_normal(kb: KnowledgeBase) -> bool:
    for c in kb.constraints:
        if isinstance(c, RoleInclusion):
            if len(c.chain) > 2:
                return False
        elif not _normal_gci(c):
            return False
    return True


__all__ = [
    "TransformResult", "AExtensionResult", "NormalizationStep",
    "transform", "normalize", "a_extend", "nf_measure", "nf3_component", "is_normal",
]
