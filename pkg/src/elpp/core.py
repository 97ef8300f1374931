"""Names, concept descriptions, constraints and knowledge bases."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Union

from . import cdomains
from .cdomains import Predicate

KINDS = ("concept", "role", "individual", "feature")


class Name(NamedTuple):
    kind: str
    label: str


class Concept:
    """Base class of concept descriptions. Instances are immutable."""

    __slots__ = ()

    def __and__(self, other: "Concept") -> "Conj":
        return Conj(self, other)

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Top(Concept):
    pass


@dataclass(frozen=True)
class Bottom(Concept):
    pass


TOP = Top()
BOTTOM = Bottom()


@dataclass(frozen=True)
class Atomic(Concept):
    name: str


@dataclass(frozen=True)
class Nominal(Concept):
    individual: str


@dataclass(frozen=True)
class Conj(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class Exists(Concept):
    role: str
    filler: Concept


@dataclass(frozen=True)
class Pred(Concept):
    """A concrete-domain predicate applied to features, ``p(f1, ..., fk)``."""

    domain: str
    predicate: Predicate
    features: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))

    @classmethod
    def of(cls, predicate: Predicate, *features: str) -> "Pred":
        return cls(predicate.domain, predicate, features)


def _leaf(c: Concept) -> str:
    if isinstance(c, Top):
        return "top"
    if isinstance(c, Bottom):
        return "bot"
    if isinstance(c, Atomic):
        return c.name
    if isinstance(c, Nominal):
        return "{" + c.individual + "}"
    p = c.predicate
    arg = p.argument
    if arg is None:
        head = f"{c.domain}.{p.keyword}"
    elif isinstance(arg, str):
        head = f"{c.domain}.{p.keyword}[{json.dumps(arg, ensure_ascii=False)}]"
    else:
        head = f"{c.domain}.{p.keyword}[{arg}]"
    return f"{head}({', '.join(c.features)})"


def render(c: Concept) -> str:
    """Surface syntax of ``c``; iterative, so nesting depth is not limited by the stack.

    Left-nested conjunctions print flat, ``(A and B and C)``.
    """
    out: list[str] = []
    stack: list = [c]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
        elif isinstance(item, Conj):
            parts = []
            node: Concept = item
            while isinstance(node, Conj):
                parts.append(node.right)
                node = node.left
            parts.append(node)
            stack.append(")")
            for i, part in enumerate(parts):  # parts are in reverse order
                stack.append(part)
                if i < len(parts) - 1:
                    stack.append(" and ")
            stack.append("(")
        elif isinstance(item, Exists):
            stack.extend([")", item.filler, f"(exists {item.role} . "])
        else:
            out.append(_leaf(item))
    return "".join(out)


def conj(*parts: Concept) -> Concept:
    """Left-associated conjunction of one or more descriptions."""
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = Conj(out, p)
    return out


@dataclass(frozen=True)
class GCI:
    lhs: Concept
    rhs: Concept

    def __str__(self):
        return f"{self.lhs} <= {self.rhs}"


@dataclass(frozen=True)
class RoleInclusion:
    chain: tuple[str, ...]
    sup: str

    def __post_init__(self):
        object.__setattr__(self, "chain", tuple(self.chain))
        if not self.chain:
            raise ValueError("role inclusion needs a nonempty chain")

    def __str__(self):
        return f"{' o '.join(self.chain)} <= {self.sup}"


Constraint = Union[GCI, RoleInclusion]


def subconcepts(c: Concept) -> Iterator[Concept]:
    """Pre-order traversal of ``c`` and all its sub-descriptions."""
    stack = [c]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Conj):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, Exists):
            stack.append(node.filler)


def names_in(item: Concept | Constraint) -> set[Name]:
    out: set[Name] = set()
    if isinstance(item, RoleInclusion):
        out.update(Name("role", r) for r in item.chain)
        out.add(Name("role", item.sup))
        return out
    roots = [item.lhs, item.rhs] if isinstance(item, GCI) else [item]
    for root in roots:
        for c in subconcepts(root):
            if isinstance(c, Atomic):
                out.add(Name("concept", c.name))
            elif isinstance(c, Nominal):
                out.add(Name("individual", c.individual))
            elif isinstance(c, Exists):
                out.add(Name("role", c.role))
            elif isinstance(c, Pred):
                out.update(Name("feature", f) for f in c.features)
    return out


def is_basic(c: Concept) -> bool:
    return isinstance(c, (Top, Atomic, Nominal, Pred))


@dataclass(frozen=True)
class KnowledgeBase:
    """A constraint list together with the inventories of usable names."""

    constraints: tuple = ()
    concepts: frozenset = frozenset()
    roles: frozenset = frozenset()
    individuals: frozenset = frozenset()
    features: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for kind in ("concepts", "roles", "individuals", "features"):
            object.__setattr__(self, kind, frozenset(getattr(self, kind)))

    @classmethod
    def build(cls, constraints: Iterable[Constraint] = (), *, concepts=(), roles=(),
              individuals=(), features=()) -> "KnowledgeBase":
        """Knowledge base whose inventories cover every name in ``constraints``."""
        constraints = tuple(constraints)
        inv = {k: set() for k in KINDS}
        for c in constraints:
            for n in names_in(c):
                inv[n.kind].add(n.label)
        return cls(constraints,
                   inv["concept"] | set(concepts), inv["role"] | set(roles),
                   inv["individual"] | set(individuals), inv["feature"] | set(features))

    def inventory(self, kind: str) -> frozenset:
        return {"concept": self.concepts, "role": self.roles,
                "individual": self.individuals, "feature": self.features}[kind]

    def names(self) -> set[Name]:
        return {Name(k, label) for k in KINDS for label in self.inventory(k)}

    @property
    def gcis(self) -> list[GCI]:
        return [c for c in self.constraints if isinstance(c, GCI)]

    @property
    def role_inclusions(self) -> list[RoleInclusion]:
        return [c for c in self.constraints if isinstance(c, RoleInclusion)]

    def extend(self, constraints: Iterable[Constraint] = (), *, concepts=(), roles=(),
               individuals=(), features=()) -> "KnowledgeBase":
        return KnowledgeBase(self.constraints + tuple(constraints),
                             self.concepts | set(concepts), self.roles | set(roles),
                             self.individuals | set(individuals), self.features | set(features))

    def replace(self, constraints: Iterable[Constraint]) -> "KnowledgeBase":
        return KnowledgeBase(tuple(constraints), self.concepts, self.roles,
                             self.individuals, self.features)

    def __str__(self):
        return "\n".join(str(c) for c in self.constraints)


def basic_concepts(kb: KnowledgeBase) -> tuple[Concept, ...]:
    """``{top}`` plus every basic sub-description of the GCIs, in first-occurrence order."""
    seen = {TOP: None}
    for gci in kb.gcis:
        for root in (gci.lhs, gci.rhs):
            for c in subconcepts(root):
                if is_basic(c):
                    seen.setdefault(c, None)
    return tuple(seen)


@dataclass(frozen=True)
class Violation:
    kind: str  # "unknown-name" | "unknown-predicate" | "arity-mismatch"
    message: str
    name: Name | None = None


class InvalidKnowledgeBase(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(v.message for v in self.violations))


def concept_violations(c: Concept, kb: KnowledgeBase) -> list[Violation]:
    out = []
    for n in sorted(names_in(c)):
        if n.label not in kb.inventory(n.kind):
            out.append(Violation("unknown-name", f"unknown {n.kind} name {n.label}", n))
    for node in subconcepts(c):
        if isinstance(node, Pred):
            out.extend(_pred_violations(node))
    return out


def _pred_violations(p: Pred) -> list[Violation]:
    try:
        dom = cdomains.get_domain(p.domain)
    except cdomains.DomainError:
        return [Violation("unknown-predicate", f"unknown concrete domain {p.domain}")]
    if not dom.has_predicate(p.predicate):
        return [Violation("unknown-predicate",
                          f"{p.predicate!r} is not a predicate of domain {p.domain}")]
    if not p.features:
        return [Violation("arity-mismatch", f"{p} has no features")]
    if len(p.features) != dom.arity(p.predicate):
        return [Violation("arity-mismatch",
                          f"{p.domain}.{p.predicate.keyword} needs {dom.arity(p.predicate)} "
                          f"features, got {len(p.features)}")]
    return []


def validate(kb: KnowledgeBase) -> list[Violation]:
    """All well-formedness violations of ``kb``; an empty list means ok."""
    out = []
    for c in kb.constraints:
        if isinstance(c, GCI):
            out.extend(concept_violations(c.lhs, kb))
            out.extend(concept_violations(c.rhs, kb))
        else:
            for n in sorted(names_in(c)):
                if n.label not in kb.roles:
                    out.append(Violation("unknown-name", f"unknown role name {n.label}", n))
    return list(dict.fromkeys(out))


def check(kb: KnowledgeBase, *concepts: Concept) -> None:
    """Raise InvalidKnowledgeBase unless ``kb`` and ``concepts`` are well formed."""
    violations = validate(kb)
    for c in concepts:
        violations.extend(concept_violations(c, kb))
    if violations:
        raise InvalidKnowledgeBase(violations)


FRESH_PREFIX = {"concept": "_C", "role": "_r", "individual": "_i", "feature": "_f"}


def fresh_name(kind: str, used: Iterable[Name | str]) -> Name:
    """Smallest ``_<k><n>`` label of ``kind`` that is not in ``used``.

    Plain strings in ``used`` are read as labels of the requested kind.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown name kind {kind!r}")
    taken = set()
    for n in used:
        if isinstance(n, Name):
            if n.kind == kind:
                taken.add(n.label)
        else:
            taken.add(n)
    i = 0
    while f"{FRESH_PREFIX[kind]}{i}" in taken:
        i += 1
    return Name(kind, f"{FRESH_PREFIX[kind]}{i}")


@dataclass
class FreshNames:
    """Incremental fresh-name supply over a fixed set of used labels."""

    used: dict[str, set] = field(default_factory=lambda: {k: set() for k in KINDS})
    created: dict[str, list] = field(default_factory=lambda: {k: [] for k in KINDS})
    _next: dict[str, int] = field(default_factory=lambda: {k: 0 for k in KINDS})

    @classmethod
    def avoiding(cls, kb: KnowledgeBase, *extra: Concept) -> "FreshNames":
        out = cls()
        for n in kb.names():
            out.used[n.kind].add(n.label)
        for c in extra:
            for n in names_in(c):
                out.used[n.kind].add(n.label)
        return out

    def __call__(self, kind: str) -> str:
        prefix = FRESH_PREFIX[kind]
        i = self._next[kind]
        while f"{prefix}{i}" in self.used[kind]:
            i += 1
        label = f"{prefix}{i}"
        self._next[kind] = i + 1
        self.used[kind].add(label)
        self.created[kind].append(label)
        return label
