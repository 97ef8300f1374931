"""The rational-number domain Q.

Satisfiability is decided exactly: Gaussian elimination on the equalities,
then Fourier-Motzkin elimination on the remaining strict inequalities,
with back-substitution to produce a witness.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import ClassVar, Sequence

from .base import ConcreteDomain, DomainError, Predicate, register


def _q(value) -> Fraction:
    if isinstance(value, bool):
        raise DomainError("booleans are not rationals")
    if isinstance(value, str):
        return Fraction(value)
    if not isinstance(value, Rational):
        raise DomainError(f"{value!r} is not an exact rational")
    return Fraction(value)


class QPredicate(Predicate):
    domain = "Q"


@dataclass(frozen=True)
class TopQ(QPredicate):
    arity: ClassVar[int] = 1
    keyword: ClassVar[str] = "top"

    def holds(self, values):
        return True


@dataclass(frozen=True)
class EqConst(QPredicate):
    """``v = value``"""

    value: Fraction
    arity: ClassVar[int] = 1
    keyword: ClassVar[str] = "eq"

    def __post_init__(self):
        object.__setattr__(self, "value", _q(self.value))

    @property
    def argument(self):
        return self.value

    def holds(self, values):
        return values[0] == self.value


@dataclass(frozen=True)
class GtConst(QPredicate):
    """``v > value``"""

    value: Fraction
    arity: ClassVar[int] = 1
    keyword: ClassVar[str] = "gt"

    def __post_init__(self):
        object.__setattr__(self, "value", _q(self.value))

    @property
    def argument(self):
        return self.value

    def holds(self, values):
        return values[0] > self.value


@dataclass(frozen=True)
class PlusConst(QPredicate):
    """``v1 + value = v2``"""

    value: Fraction
    arity: ClassVar[int] = 2
    keyword: ClassVar[str] = "plus"

    def __post_init__(self):
        object.__setattr__(self, "value", _q(self.value))

    @property
    def argument(self):
        return self.value

    def holds(self, values):
        return values[0] + self.value == values[1]


@dataclass(frozen=True)
class SameQ(QPredicate):
    arity: ClassVar[int] = 2
    keyword: ClassVar[str] = "same"

    def holds(self, values):
        return values[0] == values[1]


# A linear constraint  sum(coeffs[v] * v)  op  rhs,  op in {"=", ">"}.
@dataclass(frozen=True)
class _Lin:
    coeffs: tuple[tuple[str, Fraction], ...]
    op: str
    rhs: Fraction


def _lin(coeffs: dict, op: str, rhs) -> _Lin:
    rhs = Fraction(rhs)
    if op == "<":
        coeffs = {v: -c for v, c in coeffs.items()}
        op, rhs = ">", -rhs
    items = tuple(sorted((v, Fraction(c)) for v, c in coeffs.items() if c != 0))
    return _Lin(items, op, rhs)


def _atom_constraints(atom) -> list[_Lin]:
    p, fs = atom.predicate, atom.features
    if isinstance(p, TopQ):
        return []
    if isinstance(p, EqConst):
        return [_lin({fs[0]: 1}, "=", p.value)]
    if isinstance(p, GtConst):
        return [_lin({fs[0]: 1}, ">", p.value)]
    if isinstance(p, PlusConst):
        if fs[0] == fs[1]:
            return [_lin({}, "=", p.value)]
        return [_lin({fs[1]: 1, fs[0]: -1}, "=", p.value)]
    if isinstance(p, SameQ):
        if fs[0] == fs[1]:
            return []
        return [_lin({fs[0]: 1, fs[1]: -1}, "=", 0)]
    raise DomainError(f"not a rational predicate: {p!r}")


def _negations(atom) -> list[list[_Lin]]:
    """Disjuncts of the negation of ``atom`` (each a conjunction)."""
    p, fs = atom.predicate, atom.features
    if isinstance(p, TopQ):
        return []
    if isinstance(p, EqConst):
        return [[_lin({fs[0]: 1}, ">", p.value)], [_lin({fs[0]: 1}, "<", p.value)]]
    if isinstance(p, GtConst):
        return [[_lin({fs[0]: 1}, "=", p.value)], [_lin({fs[0]: 1}, "<", p.value)]]
    if isinstance(p, (PlusConst, SameQ)):
        q = p.value if isinstance(p, PlusConst) else 0
        diff = {}
        diff[fs[0]] = diff.get(fs[0], 0) + 1
        diff[fs[1]] = diff.get(fs[1], 0) - 1
        return [[_lin(diff, ">", -q)], [_lin(diff, "<", -q)]]
    raise DomainError(f"not a rational predicate: {p!r}")


def _substitute(coeffs: dict, rhs: Fraction, pivots: dict):
    """Replace pivot variables by their definitions."""
    out = dict(coeffs)
    for v in [v for v in out if v in pivots]:
        c = out.pop(v)
        defn, const = pivots[v]
        # v = const - sum(defn)
        rhs -= c * const
        for w, d in defn.items():
            out[w] = out.get(w, 0) - c * d
    return {v: c for v, c in out.items() if c != 0}, rhs


def solve(constraints: Sequence[_Lin], variables: Sequence[str]) -> dict | None:
    # pivot v -> (defn, const) meaning v + sum(defn[w] * w) = const
    pivots: dict[str, tuple[dict, Fraction]] = {}
    strict = []
    for c in constraints:
        if c.op == ">":
            strict.append(c)
            continue
        coeffs, rhs = _substitute(dict(c.coeffs), c.rhs, pivots)
        if not coeffs:
            if rhs != 0:
                return None
            continue
        v = min(coeffs)
        a = coeffs.pop(v)
        defn = {w: d / a for w, d in coeffs.items()}
        const = rhs / a
        for u, (udefn, uconst) in list(pivots.items()):
            if v in udefn:
                k = udefn.pop(v)
                for w, d in defn.items():
                    udefn[w] = udefn.get(w, 0) - k * d
                pivots[u] = ({w: d for w, d in udefn.items() if d != 0}, uconst - k * const)
        pivots[v] = (defn, const)

    ineqs = set()
    for c in strict:
        coeffs, rhs = _substitute(dict(c.coeffs), c.rhs, pivots)
        if not coeffs:
            if not 0 > rhs:
                return None
            continue
        ineqs.add(_lin(coeffs, ">", rhs))

    free = sorted({v for c in ineqs for v, _ in c.coeffs})
    stages = []
    current = ineqs
    for v in free:
        pos, neg, rest = [], [], set()
        for c in current:
            a = dict(c.coeffs).get(v, 0)
            if a > 0:
                pos.append(c)
            elif a < 0:
                neg.append(c)
            else:
                rest.add(c)
        stages.append((v, pos, neg))
        for p in pos:
            ap = dict(p.coeffs)[v]
            for n in neg:
                an = dict(n.coeffs)[v]
                combined = {}
                for w, d in p.coeffs:
                    combined[w] = combined.get(w, 0) + (-an) * d
                for w, d in n.coeffs:
                    combined[w] = combined.get(w, 0) + ap * d
                combined.pop(v, None)
                rhs = (-an) * p.rhs + ap * n.rhs
                combined = {w: d for w, d in combined.items() if d != 0}
                if not combined:
                    if not 0 > rhs:
                        return None
                    continue
                rest.add(_lin(combined, ">", rhs))
        current = rest
    # every remaining constraint is variable-free and was checked on creation

    values: dict[str, Fraction] = {}
    for v, pos, neg in reversed(stages):
        lo = hi = None
        for c in pos + neg:
            a = 0
            acc = c.rhs
            for w, d in c.coeffs:
                if w == v:
                    a = d
                else:
                    acc -= d * values[w]
            bound = acc / a
            if a > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if lo is not None and hi is not None:
            values[v] = (lo + hi) / 2
        elif lo is not None:
            values[v] = lo + 1
        elif hi is not None:
            values[v] = hi - 1
        else:
            values[v] = Fraction(0)

    for v in variables:
        if v not in pivots and v not in values:
            values[v] = Fraction(0)
    for v, (defn, const) in pivots.items():
        values[v] = const - sum((d * values[w] for w, d in defn.items()), Fraction(0))
    return {v: values[v] for v in variables}


class RationalDomain(ConcreteDomain):
    id = "Q"
    predicate_types = (TopQ, EqConst, GtConst, PlusConst, SameQ)

    def contains(self, value) -> bool:
        return isinstance(value, Rational) and not isinstance(value, bool)

    def satisfiable(self, atoms):
        atoms = self.check_atoms(atoms)
        variables = sorted({f for a in atoms for f in a.features})
        constraints = [c for a in atoms for c in _atom_constraints(a)]
        return solve(constraints, variables)

    def implies(self, atoms, goal) -> bool:
        atoms = self.check_atoms(atoms)
        self.check_atoms([goal])
        if self.satisfiable(atoms) is None:
            return True
        variables = sorted({f for a in atoms for f in a.features})
        if not set(goal.features) <= set(variables):
            return False
        base = [c for a in atoms for c in _atom_constraints(a)]
        return all(solve(base + alt, variables) is None for alt in _negations(goal))


RATIONALS = register(RationalDomain())
