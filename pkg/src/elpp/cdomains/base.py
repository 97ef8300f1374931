"""Concrete-domain framework.

A concrete domain bundles a carrier of values, a family of predicate
names with fixed arities, an application function, and deciders for
satisfiability and implication of conjunctions of predicate atoms.

Atoms are duck-typed: anything with ``predicate`` and ``features``
attributes works, which lets ``elpp.core.Pred`` nodes be fed to the
deciders directly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, ClassVar, Iterable, Sequence


class DomainError(ValueError):
    """A predicate, value list or atom does not fit the domain it was given to."""


class Predicate:
    """Base class for predicate names.

    Subclasses are frozen dataclasses whose fields are the built-in
    arguments (``EqConst(2)`` is the predicate "equals 2").
    """

    domain: ClassVar[str]
    arity: ClassVar[int]
    keyword: ClassVar[str]

    @property
    def argument(self) -> Any:
        return None

    def holds(self, values: Sequence[Any]) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class Atom:
    """A predicate applied to feature names, ``p(f1, ..., fk)``."""

    predicate: Predicate
    features: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))

    @property
    def domain(self) -> str:
        return self.predicate.domain


class ConcreteDomain:
    """Descriptor for one concrete domain.

    Subclasses set ``id`` and ``predicate_types`` and implement
    ``contains``, ``satisfiable`` and ``implies``.
    """

    id: str = ""
    predicate_types: tuple[type, ...] = ()

    def contains(self, value: Any) -> bool:
        raise NotImplementedError

    def has_predicate(self, p: Any) -> bool:
        return isinstance(p, self.predicate_types)

    def arity(self, p: Predicate) -> int:
        if not self.has_predicate(p):
            raise DomainError(f"{p!r} is not a predicate of domain {self.id}")
        return p.arity

    def apply(self, p: Predicate, values: Sequence[Any]) -> bool:
        if not self.has_predicate(p):
            raise DomainError(f"{p!r} is not a predicate of domain {self.id}")
        if len(values) != p.arity:
            raise DomainError(f"{p!r} expects {p.arity} values, got {len(values)}")
        for v in values:
            if not self.contains(v):
                raise DomainError(f"{v!r} is not a value of domain {self.id}")
        return p.holds(values)

    def check_atoms(self, atoms: Iterable[Any]) -> list:
        atoms = list(atoms)
        for a in atoms:
            if not self.has_predicate(a.predicate):
                raise DomainError(f"atom {a!r} does not belong to domain {self.id}")
            if len(a.features) != a.predicate.arity:
                raise DomainError(f"atom {a!r} has the wrong number of features")
        return atoms

    def holds_under(self, atom: Any, assignment: dict) -> bool:
        """Truth of one atom under a (partial) feature assignment."""
        if any(f not in assignment for f in atom.features):
            return False
        values = [assignment[f] for f in atom.features]
        if not all(self.contains(v) for v in values):
            return False
        return atom.predicate.holds(values)

    def satisfiable(self, atoms: Iterable[Any]) -> dict | None:
        """Return a witness assignment, or None when unsatisfiable.

        The empty conjunction yields ``{}``, so test the result with
        ``is None`` rather than truthiness.
        """
        raise NotImplementedError

    def implies(self, atoms: Iterable[Any], goal: Any) -> bool:
        raise NotImplementedError

    def __repr__(self):
        return f"<concrete domain {self.id}>"


_REGISTRY: dict[str, ConcreteDomain] = {}


def register(domain: ConcreteDomain) -> ConcreteDomain:
    for other in _REGISTRY.values():
        shared = set(domain.predicate_types) & set(other.predicate_types)
        if other.id != domain.id and shared:
            raise DomainError(f"domains {domain.id} and {other.id} share predicates")
    _REGISTRY[domain.id] = domain
    return domain


def get_domain(dom: str | ConcreteDomain) -> ConcreteDomain:
    if isinstance(dom, ConcreteDomain):
        return dom
    try:
        return _REGISTRY[dom]
    except KeyError:
        raise DomainError(f"unknown concrete domain {dom!r}") from None


def domains() -> dict[str, ConcreteDomain]:
    return dict(_REGISTRY)


def domain_of(p: Any) -> ConcreteDomain | None:
    for d in _REGISTRY.values():
        if d.has_predicate(p):
            return d
    return None


def apply_predicate(dom, p: Predicate, values: Sequence[Any]) -> bool:
    return get_domain(dom).apply(p, values)


def arity(dom, p: Predicate) -> int:
    return get_domain(dom).arity(p)


def satisfiable(dom, conj: Iterable[Any]) -> dict | None:
    return get_domain(dom).satisfiable(conj)


def implies(dom, conj: Iterable[Any], goal: Any) -> bool:
    return get_domain(dom).implies(conj, goal)
