"""Finite-model semantics and bounded countermodel search.

``find_countermodel`` looks for a model of the knowledge base with an
element inside ``C`` but outside ``D``, using at most ``max_size``
elements.  It builds the model lazily: facts forced by the constraints
are added deterministically, and the search branches only on the choice
of an existential witness (an existing element or a new one) and on
feature values drawn from the candidate pools.  Every construct is
monotone, so any countermodel contains a minimal one reachable this way;
the search is exhaustive up to the size bound and the pools.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import cdomains
from .cdomains import EqConst, EqWord, GtConst, PlusConst, ConcatWord
from .core import (
    GCI, Atomic, Bottom, Concept, Conj, Exists, KnowledgeBase, Nominal, Pred, Top,
    names_in, subconcepts,
)


class UninterpretedName(KeyError):
    pass


class BudgetExceeded(RuntimeError):
    """The search visited more nodes than its budget allowed."""


@dataclass
class FiniteInterpretation:
    size: int
    concepts: dict = field(default_factory=dict)
    roles: dict = field(default_factory=dict)
    individuals: dict = field(default_factory=dict)
    features: dict = field(default_factory=dict)
    witness: Optional[int] = None

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("interpretation domains are nonempty")

    @property
    def domain(self) -> range:
        return range(self.size)

    def to_dict(self) -> dict:
        return {
            "size": self.size,
            "concepts": {k: sorted(v) for k, v in sorted(self.concepts.items())},
            "roles": {k: sorted(map(list, v)) for k, v in sorted(self.roles.items())},
            "individuals": dict(sorted(self.individuals.items())),
            "features": {k: {str(e): str(v) for e, v in sorted(m.items())}
                         for k, m in sorted(self.features.items())},
        }


def _lookup(table, key, what):
    try:
        return table[key]
    except KeyError:
        raise UninterpretedName(f"{what} {key} is not interpreted") from None


def interpret(c: Concept, interp: FiniteInterpretation) -> frozenset:
    """The extension of ``c`` in ``interp``."""
    if isinstance(c, Top):
        return frozenset(interp.domain)
    if isinstance(c, Bottom):
        return frozenset()
    if isinstance(c, Atomic):
        return frozenset(_lookup(interp.concepts, c.name, "concept"))
    if isinstance(c, Nominal):
        return frozenset([_lookup(interp.individuals, c.individual, "individual")])
    if isinstance(c, Conj):
        return interpret(c.left, interp) & interpret(c.right, interp)
    if isinstance(c, Exists):
        inner = interpret(c.filler, interp)
        edges = _lookup(interp.roles, c.role, "role")
        return frozenset(x for x, y in edges if y in inner)
    if isinstance(c, Pred):
        dom = cdomains.get_domain(c.domain)
        maps = [_lookup(interp.features, f, "feature") for f in c.features]
        pairs = list(zip(c.features, maps))
        return frozenset(x for x in interp.domain
                         if dom.holds_under(c, {f: m[x] for f, m in pairs if x in m}))
    raise TypeError(f"not a concept description: {c!r}")


def _compose(chain, roles) -> set:
    pairs = set(roles[chain[0]])
    for r in chain[1:]:
        step = roles[r]
        succ = {}
        for x, y in step:
            succ.setdefault(x, set()).add(y)
        pairs = {(x, z) for x, y in pairs for z in succ.get(y, ())}
    return pairs


def is_model(interp: FiniteInterpretation, kb: KnowledgeBase) -> bool:
    for c in kb.constraints:
        if isinstance(c, GCI):
            if not interpret(c.lhs, interp) <= interpret(c.rhs, interp):
                return False
        else:
            roles = {r: _lookup(interp.roles, r, "role") for r in (*c.chain, c.sup)}
            if not _compose(c.chain, roles) <= set(roles[c.sup]):
                return False
    return True


# --- candidate pools -----------------------------------------------------

_OFFSETS = (Fraction(-1), Fraction(-1, 2), Fraction(0), Fraction(1, 2), Fraction(1))


def _kb_atoms(kb: KnowledgeBase, extra=()):
    roots = [x for g in kb.gcis for x in (g.lhs, g.rhs)] + list(extra)
    for root in roots:
        for c in subconcepts(root):
            if isinstance(c, Pred):
                yield c


def candidate_values(kb: KnowledgeBase, extra=()) -> dict:
    """Finite value pools per concrete domain mentioned in ``kb`` (and ``extra`` concepts)."""
    atoms = list(_kb_atoms(kb, extra))
    pools = {}
    q_atoms = [a for a in atoms if a.domain == "Q"]
    if q_atoms:
        consts = {a.predicate.value for a in q_atoms
                  if isinstance(a.predicate, (EqConst, GtConst, PlusConst))}
        shifts = {a.predicate.value for a in q_atoms if isinstance(a.predicate, PlusConst)}
        base = set(consts) or {Fraction(0)}
        base |= {c + s for c in list(base) for s in shifts}
        base |= {c - s for c in list(base) for s in shifts}
        pools["Q"] = sorted({c + o for c in base for o in _OFFSETS})
    s_atoms = [a for a in atoms if a.domain == "S"]
    if s_atoms:
        words = {a.predicate.word for a in s_atoms if isinstance(a.predicate, (EqWord, ConcatWord))}
        letters = {ch for w in words for ch in w}
        fresh = next(ch for ch in itertools.chain("abcdefghijklmnopqrstuvwxyz",
                                                  (chr(i) for i in range(0x100, 0x10FFFF)))
                     if ch not in letters)
        pool = {""}
        for w in words:
            pool.update(w[i:] for i in range(len(w)))
            pool.add(w + fresh)
        pools["S"] = sorted(pool, key=lambda w: (len(w), w))
    return pools


# --- countermodel search -------------------------------------------------
#
# Every fact of a partial model carries a bitmask of the branch points it
# depends on (bit k = the choice made at search depth k).  A failed subtree
# reports the mask of its clash; a branch point whose bit is absent from
# that mask cannot help, so its remaining alternatives are skipped
# (dependency-directed backtracking, as in description-logic tableaux).

class _Node:
    __slots__ = ("n", "born", "conc", "roles", "feat", "pending", "deferred", "seen", "depth")

    def __init__(self, n, born, conc, roles, feat, pending, deferred, seen, depth):
        self.n = n
        self.born = born  # element -> mask of the choices that created it
        self.conc = conc  # concept name -> {element: mask}
        self.roles = roles  # role name -> {(x, y): mask}
        self.feat = feat  # feature -> {element: (value, mask)}
        self.pending = pending  # [(element, concept, mask)] to make true now
        self.deferred = deferred  # [(element, concept, mask)] that need a choice
        self.seen = seen  # (element, id(concept)) obligations already handled
        self.depth = depth

    def copy(self):
        return _Node(self.n, list(self.born), {k: dict(v) for k, v in self.conc.items()},
                     {k: dict(v) for k, v in self.roles.items()},
                     {k: dict(v) for k, v in self.feat.items()},
                     list(self.pending), list(self.deferred), set(self.seen), self.depth + 1)


class _Clash(Exception):
    def __init__(self, mask: int):
        self.mask = mask


class _Search:
    def __init__(self, kb, c, d, pools, budget, backjump=True):
        self.kb = kb
        self.c, self.d = c, d
        self.gcis = kb.gcis
        self.ris = kb.role_inclusions
        self.pools = pools
        self.budget = budget
        self.backjump = backjump
        self.nodes = 0
        used = set()
        for item in [*kb.constraints, c, d]:
            used |= {n.label for n in names_in(item) if n.kind == "individual"}
        self.individuals = sorted(used)
        self.role_names = sorted({n.label for item in [*kb.constraints, c, d]
                                  for n in names_in(item) if n.kind == "role"})

    def ext(self, node, c, cache) -> dict:
        """Extension of ``c`` in the partial model, as {element: dependency mask}."""
        key = id(c)
        hit = cache.get(key)
        if hit is not None:
            return hit
        if isinstance(c, Top):
            out = dict(enumerate(node.born))
        elif isinstance(c, Bottom):
            out = {}
        elif isinstance(c, Atomic):
            out = node.conc.get(c.name, {})
        elif isinstance(c, Nominal):
            out = {self.ind[c.individual]: 0}
        elif isinstance(c, Conj):
            left = self.ext(node, c.left, cache)
            right = self.ext(node, c.right, cache)
            out = {x: m | right[x] for x, m in left.items() if x in right}
        elif isinstance(c, Exists):
            inner = self.ext(node, c.filler, cache)
            out = {}
            for (x, y), m in node.roles.get(c.role, {}).items():
                if y in inner and x not in out:
                    out[x] = m | inner[y]
        else:
            dom = cdomains.get_domain(c.domain)
            maps = [node.feat.get(f, {}) for f in c.features]
            out = {}
            for x in range(node.n):
                if all(x in m for m in maps):
                    values = {f: m[x][0] for f, m in zip(c.features, maps)}
                    if dom.holds_under(c, values):
                        mask = 0
                        for m in maps:
                            mask |= m[x][1]
                        out[x] = mask
        cache[key] = out
        return out

    def feature_mask(self, node, x, c) -> int:
        mask = node.born[x]
        for f in c.features:
            entry = node.feat.get(f, {}).get(x)
            if entry is not None:
                mask |= entry[1]
        return mask

    def force(self, node, x, c, mask):
        """Make ``x`` an instance of ``c`` deterministically where possible."""
        key = (x, id(c))
        if key in node.seen:
            return
        node.seen.add(key)
        if x in self.ext(node, c, {}):
            return
        if isinstance(c, (Bottom, Nominal)):
            raise _Clash(mask | node.born[x])
        if isinstance(c, Atomic):
            node.conc.setdefault(c.name, {})[x] = mask
        elif isinstance(c, Conj):
            node.pending.append((x, c.right, mask))
            node.pending.append((x, c.left, mask))
        elif isinstance(c, Exists):
            node.deferred.append((x, c, mask))
        elif isinstance(c, Pred):
            if all(x in node.feat.get(f, {}) for f in c.features):
                raise _Clash(mask | self.feature_mask(node, x, c))
            node.deferred.append((x, c, mask))

    def close_roles(self, node) -> bool:
        changed = False
        for ri in self.ris:
            pairs = dict(node.roles.get(ri.chain[0], {}))
            for r in ri.chain[1:]:
                succ = {}
                for (y, z), m in node.roles.get(r, {}).items():
                    succ.setdefault(y, []).append((z, m))
                step = {}
                for (x, y), m in pairs.items():
                    for z, m2 in succ.get(y, ()):
                        step.setdefault((x, z), m | m2)
                pairs = step
            target = node.roles.setdefault(ri.sup, {})
            for pair, m in pairs.items():
                if pair not in target:
                    target[pair] = m
                    changed = True
        return changed

    def propagate(self, node):
        while True:
            while node.pending:
                x, c, m = node.pending.pop()
                self.force(node, x, c, m)
            changed = self.close_roles(node)
            cache = {}
            for g in self.gcis:
                lhs = self.ext(node, g.lhs, cache)
                if not lhs:
                    continue
                if isinstance(g.rhs, Bottom):
                    raise _Clash(next(iter(lhs.values())))
                rhs = self.ext(node, g.rhs, cache)
                rhs_id = id(g.rhs)
                for x in sorted(lhs):
                    if x not in rhs and (x, rhs_id) not in node.seen:
                        node.pending.append((x, g.rhs, lhs[x]))
                        changed = True
            hit = self.ext(node, self.d, {}).get(self.x0)
            if hit is not None:
                raise _Clash(hit)
            if not changed and not node.pending:
                return

    def expand(self, node):
        """A completed partial model below ``node``, or the mask explaining failure."""
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"countermodel search exceeded {self.budget} nodes")
        try:
            self.propagate(node)
        except _Clash as clash:
            return clash.mask
        node.deferred = [(x, c, m) for x, c, m in node.deferred
                         if x not in self.ext(node, c, {})]
        if not node.deferred:
            return node
        x, c, m = node.deferred[0]
        bit = 1 << node.depth
        failure = m | node.born[x]
        for child in self.branches(node, x, c, m, bit):
            if isinstance(child, int):
                failure |= child
                continue
            child.deferred.pop(0)
            res = self.expand(child)
            if isinstance(res, _Node):
                return res
            if self.backjump and not res & bit:
                return res
            failure |= res & ~bit
        return failure

    def branches(self, node, x, c, m, bit):
        """Children for the choice point ``(x, c)``; ints are extra failure masks."""
        if isinstance(c, Exists):
            targets = list(range(node.n))
            if node.n < self.cap:
                targets.append(node.n)
            else:
                blocked = 0
                for b in node.born:
                    blocked |= b
                yield blocked
            for y in targets:
                child = node.copy()
                if y == child.n:
                    child.n += 1
                    child.born.append(bit | m)
                child.roles.setdefault(c.role, {})[(x, y)] = bit | m | child.born[y]
                child.pending.append((y, c.filler, bit | m))
                yield child
            return
        dom = cdomains.get_domain(c.domain)
        yield self.feature_mask(node, x, c)
        open_features = list(dict.fromkeys(f for f in c.features if x not in node.feat.get(f, {})))
        pool = self.pools.get(c.domain, [])
        fixed = {f: node.feat[f][x][0] for f in c.features if x in node.feat.get(f, {})}
        for values in itertools.product(pool, repeat=len(open_features)):
            assignment = dict(fixed)
            assignment.update(zip(open_features, values))
            if not dom.holds_under(c, assignment):
                continue
            child = node.copy()
            for f, v in zip(open_features, values):
                child.feat.setdefault(f, {})[x] = (v, bit | m)
            yield child

    def partitions(self, cap):
        """Individual maps up to renaming of elements (restricted growth strings)."""
        k = len(self.individuals)

        def rec(i, blocks, acc):
            if i == k:
                yield dict(acc)
                return
            for b in range(min(blocks + 1, cap)):
                acc[self.individuals[i]] = b
                yield from rec(i + 1, max(blocks, b + 1), acc)
            acc.pop(self.individuals[i], None)

        yield from rec(0, 0, {})

    def run(self, max_size):
        for cap in range(1, max_size + 1):
            self.cap = cap
            for ind in self.partitions(cap):
                self.ind = ind
                named = len(set(ind.values()))
                starts = list(range(named)) + ([named] if named < cap else [])
                for x0 in starts:
                    self.x0 = x0
                    size = max(named, x0 + 1)
                    root = _Node(size, [0] * size, {}, {}, {}, [(x0, self.c, 0)], [], set(), 0)
                    found = self.expand(root)
                    if isinstance(found, _Node):
                        return self.finish(found)
        return None

    def finish(self, node) -> FiniteInterpretation:
        kb = self.kb
        query_names = names_in(self.c) | names_in(self.d)
        concepts = set(kb.concepts) | {n.label for n in query_names if n.kind == "concept"}
        roles = set(kb.roles) | set(self.role_names)
        individuals = set(kb.individuals) | set(self.individuals)
        features = set(kb.features) | {n.label for n in query_names if n.kind == "feature"}
        interp = FiniteInterpretation(
            node.n,
            {a: frozenset(node.conc.get(a, ())) for a in sorted(concepts)},
            {r: frozenset(node.roles.get(r, ())) for r in sorted(roles)},
            {i: self.ind.get(i, 0) for i in sorted(individuals)},
            {f: {e: v for e, (v, _) in node.feat.get(f, {}).items()} for f in sorted(features)},
            witness=self.x0,
        )
        if not (is_model(interp, kb) and self.x0 in interpret(self.c, interp)
                and self.x0 not in interpret(self.d, interp)):
            raise AssertionError("countermodel search produced an invalid model")
        return interp


class _Chase:
    """Depth-bounded Skolem chase: a sound forward-chaining entailment prover.

    Starting from a fresh element in ``c`` plus one constant per individual,
    it applies the constraints, inventing a successor for each unsatisfied
    existential up to ``max_depth`` and merging elements forced into the same
    nominal.  Every derived fact holds in every model (under the obvious
    homomorphism), so deriving ``d`` at the start element, or bottom anywhere,
    proves that no countermodel exists at any size.
    """

    def __init__(self, kb, c, d, individuals, max_depth, max_elements):
        self.gcis = kb.gcis
        self.ris = kb.role_inclusions
        self.d = d
        self.max_depth = max_depth
        self.max_elements = max_elements
        self.parent: list[int] = []
        self.depth: list[int] = []
        self.labels: list[set] = []
        self.preds: list[set] = []
        self.edges: dict[str, set] = {}
        self.succ: dict[str, dict] = {}
        self.truncated = False
        self.spawned: set = set()  # (element, id of existential) given a witness
        self.const = {a: self.new(0) for a in individuals}
        self.start = self.new(0)
        self.bottom = False
        self.apply(self.start, c)

    def new(self, depth) -> int:
        e = len(self.parent)
        self.parent.append(e)
        self.depth.append(depth)
        self.labels.append(set())
        self.preds.append(set())
        return e

    def find(self, e) -> int:
        while self.parent[e] != e:
            self.parent[e] = self.parent[self.parent[e]]
            e = self.parent[e]
        return e

    def union(self, a, b) -> bool:
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        if b < a:
            a, b = b, a
        self.parent[b] = a
        self.depth[a] = min(self.depth[a], self.depth[b])
        self.labels[a] |= self.labels[b]
        self.preds[a] |= self.preds[b]
        for r, pairs in self.edges.items():
            self.edges[r] = {(self.find(x), self.find(y)) for x, y in pairs}
            self.succ[r] = {}
            for x, y in self.edges[r]:
                self.succ[r].setdefault(x, set()).add(y)
        return True

    def add_edge(self, r, x, y) -> bool:
        pairs = self.edges.setdefault(r, set())
        if (x, y) in pairs:
            return False
        pairs.add((x, y))
        self.succ.setdefault(r, {}).setdefault(x, set()).add(y)
        return True

    def successors(self, r, e):
        return self.succ.get(r, {}).get(e, ())

    def holds(self, e, c) -> bool:
        if isinstance(c, Top):
            return True
        if isinstance(c, Bottom):
            return False
        if isinstance(c, Atomic):
            return c.name in self.labels[e]
        if isinstance(c, Nominal):
            return e == self.find(self.const[c.individual])
        if isinstance(c, Conj):
            return self.holds(e, c.left) and self.holds(e, c.right)
        if isinstance(c, Exists):
            return any(self.holds(y, c.filler) for y in self.successors(c.role, e))
        return c in self.preds[e]

    def apply(self, e, c) -> bool:
        """Add the facts making ``e`` an instance of ``c``; True when something changed."""
        e = self.find(e)
        if isinstance(c, Top) or self.holds(e, c):
            return False
        if isinstance(c, Bottom):
            self.bottom = True
            return True
        if isinstance(c, Atomic):
            self.labels[e].add(c.name)
            return True
        if isinstance(c, Nominal):
            return self.union(e, self.const[c.individual])
        if isinstance(c, Conj):
            left = self.apply(e, c.left)
            return self.apply(e, c.right) or left
        if isinstance(c, Exists):
            if (e, id(c)) in self.spawned:
                return False
            if self.depth[e] >= self.max_depth or len(self.parent) >= self.max_elements:
                self.truncated = True
                return False
            self.spawned.add((e, id(c)))
            y = self.new(self.depth[e] + 1)
            self.add_edge(c.role, e, y)
            self.apply(y, c.filler)
            return True
        self.preds[e].add(c)
        return True

    def close_roles(self) -> bool:
        changed = False
        for ri in self.ris:
            pairs = set(self.edges.get(ri.chain[0], ()))
            for r in ri.chain[1:]:
                step = self.succ.get(r, {})
                pairs = {(x, z) for x, y in pairs for z in step.get(y, ())}
            for x, z in pairs:
                changed = self.add_edge(ri.sup, x, z) or changed
        return changed

    def refutes(self) -> bool:
        changed = True
        while changed and not self.bottom:
            if self.holds(self.find(self.start), self.d):
                return True
            changed = self.close_roles()
            for e in range(len(self.parent)):
                if self.find(e) != e:
                    continue
                for g in self.gcis:
                    e = self.find(e)
                    if self.holds(e, g.lhs) and self.apply(e, g.rhs):
                        changed = True
                    if self.bottom:
                        return True
        return self.bottom or self.holds(self.find(self.start), self.d)


def chase_refutes(kb: KnowledgeBase, c: Concept, d: Concept, max_depth: int,
                  max_elements: int = 300) -> bool:
    """True when forward chaining proves that ``c`` is subsumed by ``d`` in every model."""
    individuals = sorted({n.label for item in [*kb.constraints, c, d]
                          for n in names_in(item) if n.kind == "individual"})
    for depth in range(max_depth + 1):
        chase = _Chase(kb, c, d, individuals, depth, max_elements)
        if chase.refutes():
            return True
        if not chase.truncated or len(chase.parent) >= max_elements:
            break
    return False


DEFAULT_BUDGET = 2_000_000


def find_countermodel(kb: KnowledgeBase, c: Concept, d: Concept, max_size: int,
                      pools: Optional[dict] = None, *,
                      budget: int = DEFAULT_BUDGET,
                      backjump: bool = True, chase: bool = True) -> Optional[FiniteInterpretation]:
    """A model of ``kb`` with an element in ``c`` but not in ``d``, or None.

    Searches every domain size up to ``max_size``.  Feature values come
    from ``pools`` (default: ``candidate_values``).  Raises BudgetExceeded
    when more than ``budget`` search nodes are needed.  ``backjump=False``
    turns off dependency-directed backtracking and ``chase=False`` the
    forward-chaining shortcut that settles entailed cases without search
    (both for cross-checking).
    The returned interpretation carries the offending element as ``witness``.
    """
    if pools is None:
        pools = candidate_values(kb, (c, d))
    if chase and chase_refutes(kb, c, d, max_size):
        return None
    return _Search(kb, c, d, pools, budget, backjump).run(max_size)


def entails(kb: KnowledgeBase, c: Concept, d: Concept, max_size: int, **kw) -> bool:
    """Bounded semantic verdict: True iff no countermodel up to ``max_size`` exists."""
    return find_countermodel(kb, c, d, max_size, **kw) is None


__all__ = [
    "FiniteInterpretation", "BudgetExceeded", "UninterpretedName",
    "interpret", "is_model", "candidate_values", "find_countermodel", "entails", "chase_refutes",
]
