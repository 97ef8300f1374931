"""Completion-rule saturation over basic concepts.

The state holds the subsumer sets ``S`` and the role-edge sets ``R``.
Rules CR1-CR5 and CR10-CR11 are driven by a semi-naive worklist: each new
entry only triggers the rule instances it can newly enable.  The
concrete-domain rules CR7-CR9 run on concepts whose atom set changed, and
the nominal rule CR6 runs as a separate phase whenever the worklist drains,
so the outer loop reaches the least fixpoint.

Every entry records the first derivation that produced it, which makes
each entry replayable (``check_entry``) and explainable (``explain``).
"""
from __future__ import annotations

import random
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from . import cdomains
from .core import (
    BOTTOM, GCI, TOP, Atomic, Bottom, Concept, Conj, Exists, KnowledgeBase, Nominal, Pred,
    RoleInclusion, basic_concepts,
)
from .pipeline import is_normal


@dataclass(frozen=True)
class SEntry:
    """``member`` is in S(concept)."""

    concept: Concept
    member: Concept

    def __str__(self):
        return f"{self.member} in S({self.concept})"


@dataclass(frozen=True)
class REntry:
    """``(source, target)`` is in R(role)."""

    role: str
    source: Concept
    target: Concept

    def __str__(self):
        return f"({self.source}, {self.target}) in R({self.role})"


Entry = Union[SEntry, REntry]

ROLE_TREE_SHAPES = {"CR3": "ExistsR", "CR10": "TransR", "CR11": "SplitR"}


@dataclass(frozen=True)
class Derivation:
    """How an entry was produced.

    ``premises`` are the state entries the rule consumed, ``axioms`` the
    indices of the constraints it used.  For CR6, ``root`` is the start
    of the reachability path (the merged concept itself or a nominal).
    """

    rule: str
    premises: tuple = ()
    axioms: tuple = ()
    root: Optional[Concept] = None

    @property
    def shape(self) -> Optional[str]:
        return ROLE_TREE_SHAPES.get(self.rule)


INIT = Derivation("init")


class NotNormalError(ValueError):
    pass


class AbsentEntry(LookupError):
    pass


@dataclass
class ClassificationState:
    kb: KnowledgeBase
    basic: tuple
    S: dict = field(default_factory=dict)
    R: dict = field(default_factory=dict)
    traces: dict = field(default_factory=dict)
    order: dict = field(default_factory=dict)
    nominal_roots: bool = True

    def __contains__(self, entry: Entry) -> bool:
        if isinstance(entry, SEntry):
            return entry.member in self.S.get(entry.concept, ())
        return (entry.source, entry.target) in self.R.get(entry.role, ())

    def entries(self) -> Iterable[Entry]:
        return self.traces.keys()

    def subsumers(self, c: Concept) -> set:
        return self.S[c]

    def snapshot(self):
        """Hashable view of S and R for comparing runs."""
        return (frozenset((c, frozenset(v)) for c, v in self.S.items()),
                frozenset((r, frozenset(v)) for r, v in self.R.items()))


def init_state(kb: KnowledgeBase, *, nominal_roots: bool = True) -> ClassificationState:
    """``S(C) = {C, top}`` for every basic concept, all role sets empty.

    ``nominal_roots`` controls reachability in CR6: when set, a path may
    start at any nominal as well as at the concept being updated.
    """
    if not is_normal(kb):
        raise NotNormalError("knowledge base is not in normal form")
    state = ClassificationState(kb, basic_concepts(kb), nominal_roots=nominal_roots)
    for c in state.basic:
        state.S[c] = set()
        for m in (c, TOP):
            if m not in state.S[c]:
                state.S[c].add(m)
                e = SEntry(c, m)
                state.traces[e] = INIT
                state.order[e] = len(state.order)
    for r in sorted(kb.roles):
        state.R[r] = set()
    return state


def _predecessors(state: ClassificationState) -> dict:
    preds = defaultdict(set)
    for r, pairs in state.R.items():
        for c, d in pairs:
            preds[d].add((r, c))
    return preds


def _find_path(preds: dict, sources, target) -> Optional[list]:
    """Depth-first search backwards from ``target`` to any of ``sources``.

    Returns the path as a list of R-entries from the source to the target
    (empty when the target itself is a source), or None.
    """
    sources = set(sources)
    if target in sources:
        return []
    parent = {target: None}
    stack = [target]
    while stack:
        node = stack.pop()
        for r, c in preds.get(node, ()):
            if c in parent:
                continue
            parent[c] = REntry(r, c, node)
            if c in sources:
                path = []
                while c != target:
                    edge = parent[c]
                    path.append(edge)
                    c = edge.target
                return path
            stack.append(c)
    return None


def reachable(state: ClassificationState, c: Concept, d: Concept) -> bool:
    """True iff ``c == d`` or a chain of R-edges leads from ``c`` to ``d``."""
    return _find_path(_predecessors(state), [c], d) is not None


def _ancestors(preds: dict, target) -> set:
    seen = {target}
    stack = [target]
    while stack:
        node = stack.pop()
        for _, c in preds.get(node, ()):
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return seen


class _Saturation:
    def __init__(self, state: ClassificationState, rng: Optional[random.Random]):
        self.state = state
        self.rng = rng
        self.queue = deque()
        self.dirty: set = set()
        self.cd_cache: dict = {}
        self.nominals = [c for c in state.basic if isinstance(c, Nominal)]
        self.atoms_by_domain = defaultdict(list)
        for c in state.basic:
            if isinstance(c, Pred):
                self.atoms_by_domain[c.domain].append(c)

        self.told = defaultdict(list)
        self.conj = defaultdict(list)
        self.exists_rhs = defaultdict(list)
        self.exists_lhs = defaultdict(list)
        self.sub = defaultdict(list)
        self.chain_first = defaultdict(list)
        self.chain_second = defaultdict(list)
        for i, ax in enumerate(state.kb.constraints):
            if isinstance(ax, RoleInclusion):
                if len(ax.chain) == 1:
                    self.sub[ax.chain[0]].append((ax.sup, i))
                else:
                    r1, r2 = ax.chain
                    self.chain_first[r1].append((r2, ax.sup, i))
                    self.chain_second[r2].append((r1, ax.sup, i))
            elif isinstance(ax.lhs, Conj):
                self.conj[ax.lhs.left].append((ax.lhs.right, ax.rhs, i))
                self.conj[ax.lhs.right].append((ax.lhs.left, ax.rhs, i))
            elif isinstance(ax.lhs, Exists):
                self.exists_lhs[(ax.lhs.role, ax.lhs.filler)].append((ax.rhs, i))
            elif isinstance(ax.rhs, Exists):
                self.exists_rhs[ax.lhs].append((ax.rhs.role, ax.rhs.filler, i))
            else:
                self.told[ax.lhs].append((ax.rhs, i))

        self.succ = defaultdict(lambda: defaultdict(set))
        self.pred = defaultdict(lambda: defaultdict(set))
        self.preds_any = defaultdict(set)
        for r, pairs in state.R.items():
            for c, d in pairs:
                self._index_edge(r, c, d)
        # seed: every existing entry may trigger rules
        for e in sorted(state.traces, key=state.order.__getitem__):
            self.queue.append(e)
            if isinstance(e, SEntry) and isinstance(e.member, Pred):
                self.dirty.add(e.concept)

    def _index_edge(self, r, c, d):
        self.succ[r][c].add(d)
        self.pred[r][d].add(c)
        self.preds_any[d].add((r, c))

    def add_s(self, c, x, derivation):
        s = self.state.S[c]
        if x in s:
            return
        s.add(x)
        e = SEntry(c, x)
        self.state.traces[e] = derivation
        self.state.order[e] = len(self.state.order)
        self.queue.append(e)

    def add_r(self, r, c, d, derivation):
        pairs = self.state.R.setdefault(r, set())
        if (c, d) in pairs:
            return
        pairs.add((c, d))
        self._index_edge(r, c, d)
        e = REntry(r, c, d)
        self.state.traces[e] = derivation
        self.state.order[e] = len(self.state.order)
        self.queue.append(e)

    def pop(self):
        if self.rng is None:
            return self.queue.popleft()
        i = self.rng.randrange(len(self.queue))
        self.queue[i], self.queue[-1] = self.queue[-1], self.queue[i]
        return self.queue.pop()

    def on_s(self, e: SEntry):
        S = self.state.S
        c, x = e.concept, e.member
        for d, i in self.told[x]:
            self.add_s(c, d, Derivation("CR1", (e,), (i,)))
        for other, d, i in self.conj[x]:
            if other in S[c]:
                self.add_s(c, d, Derivation("CR2", (e, SEntry(c, other)), (i,)))
        for r, d, i in self.exists_rhs[x]:
            self.add_r(r, c, d, Derivation("CR3", (e,), (i,)))
        for r, p in list(self.preds_any[c]):
            for target, i in self.exists_lhs[(r, x)]:
                self.add_s(p, target, Derivation("CR4", (REntry(r, p, c), e), (i,)))
            if isinstance(x, Bottom):
                self.add_s(p, BOTTOM, Derivation("CR5", (REntry(r, p, c), e)))
        if isinstance(x, Pred):
            self.dirty.add(c)

    def on_r(self, e: REntry):
        S = self.state.S
        r, c, d = e.role, e.source, e.target
        for x in list(S[d]):
            for target, i in self.exists_lhs[(r, x)]:
                self.add_s(c, target, Derivation("CR4", (e, SEntry(d, x)), (i,)))
        if BOTTOM in S[d]:
            self.add_s(c, BOTTOM, Derivation("CR5", (e, SEntry(d, BOTTOM))))
        for s, i in self.sub[r]:
            self.add_r(s, c, d, Derivation("CR10", (e,), (i,)))
        for r2, s, i in self.chain_first[r]:
            for x in list(self.succ[r2][d]):
                self.add_r(s, c, x, Derivation("CR11", (e, REntry(r2, d, x)), (i,)))
        for r1, s, i in self.chain_second[r]:
            for x in list(self.pred[r1][c]):
                self.add_r(s, x, d, Derivation("CR11", (REntry(r1, x, c), e), (i,)))

    def concrete(self):
        """CR7, CR8 and CR9 for every concept whose atom set changed."""
        dirty, self.dirty = self.dirty, set()
        for c in sorted(dirty, key=str):
            atoms = [x for x in self.state.S[c] if isinstance(x, Pred)]
            by_domain = defaultdict(list)
            for a in atoms:
                by_domain[a.domain].append(a)
            for dm in by_domain:
                by_domain[dm].sort(key=str)
            # CR9: features shared across domains
            owner = {}
            for dm in sorted(by_domain):
                for a in by_domain[dm]:
                    for f in a.features:
                        if f in owner and owner[f].domain != dm:
                            self.add_s(c, BOTTOM, Derivation(
                                "CR9", (SEntry(c, owner[f]), SEntry(c, a))))
                        owner.setdefault(f, a)
            for dm in sorted(by_domain):
                group = by_domain[dm]
                key = (c, dm, frozenset(group))
                if key in self.cd_cache:
                    continue
                self.cd_cache[key] = True
                premises = tuple(SEntry(c, a) for a in group)
                domain = cdomains.get_domain(dm)
                if domain.satisfiable(group) is None:  # CR7
                    self.add_s(c, BOTTOM, Derivation("CR7", premises))
                    continue
                for p in self.atoms_by_domain[dm]:  # CR8
                    if p not in self.state.S[c] and domain.implies(group, p):
                        self.add_s(c, p, Derivation("CR8", premises))

    def nominal_phase(self):
        """CR6: merge S(D) into S(C) when both share a nominal and C reaches D."""
        S = self.state.S
        holders = defaultdict(list)
        for c in self.state.basic:
            for x in S[c]:
                if isinstance(x, Nominal):
                    holders[x].append(c)
        if not any(len(v) > 1 for v in holders.values()):
            return
        preds = _predecessors(self.state)
        ancestors = {}
        roots = set(self.nominals) if self.state.nominal_roots else set()
        for a in sorted(holders, key=str):
            group = holders[a]
            for d in group:
                if d not in ancestors:
                    ancestors[d] = _ancestors(preds, d)
                for c in group:
                    if c == d or S[d] <= S[c]:
                        continue
                    anc = ancestors[d]
                    if c in anc:
                        sources = [c]
                    elif roots & anc:
                        sources = sorted(roots & anc, key=str)
                    else:
                        continue
                    path = _find_path(preds, sources, d)
                    root = path[0].source if path else d
                    base = (SEntry(c, a), SEntry(d, a)) + tuple(path)
                    for x in sorted(S[d] - S[c], key=str):
                        self.add_s(c, x, Derivation("CR6", (SEntry(d, x),) + base, (), root))

    def run(self):
        while True:
            while self.queue:
                e = self.pop()
                if isinstance(e, SEntry):
                    self.on_s(e)
                else:
                    self.on_r(e)
            if self.dirty:
                self.concrete()
                if self.queue:
                    continue
            self.nominal_phase()
            if not self.queue:
                return


def saturate(state: ClassificationState, *,
             rng: Optional[random.Random] = None) -> ClassificationState:
    """Apply the completion rules to ``state`` until nothing new is derived.

    ``rng`` randomizes the worklist order; the final S and R do not depend on it.
    """
    _Saturation(state, rng).run()
    return state


def classify(kb: KnowledgeBase, *, nominal_roots: bool = True,
             rng: Optional[random.Random] = None) -> ClassificationState:
    return saturate(init_state(kb, nominal_roots=nominal_roots), rng=rng)


# --- replay and explanation -------------------------------------------------

def _axiom(state, i):
    cs = state.kb.constraints
    return cs[i] if 0 <= i < len(cs) else None


def check_entry(state: ClassificationState, entry: Entry) -> bool:
    """Replay the recorded rule for ``entry`` against the state and the kb."""
    d = state.traces.get(entry)
    if d is None or entry not in state:
        return False
    for p in d.premises:
        if p not in state or state.order[p] >= state.order[entry]:
            return False
    prem = d.premises
    ax = [_axiom(state, i) for i in d.axioms]
    if any(a is None for a in ax):
        return False
    rule = d.rule
    if rule == "init":
        return (isinstance(entry, SEntry) and entry.concept in state.S
                and entry.member in (entry.concept, TOP))
    if isinstance(entry, SEntry):
        c, x = entry.concept, entry.member
        if rule == "CR1":
            (p,), (a,) = prem, ax
            return (isinstance(a, GCI) and p == SEntry(c, a.lhs) and a.rhs == x)
        if rule == "CR2":
            (p1, p2), (a,) = prem, ax
            return (isinstance(a, GCI) and isinstance(a.lhs, Conj) and a.rhs == x
                    and {p1, p2} == {SEntry(c, a.lhs.left), SEntry(c, a.lhs.right)})
        if rule == "CR4":
            (edge, p), (a,) = prem, ax
            return (isinstance(a, GCI) and isinstance(a.lhs, Exists) and a.rhs == x
                    and isinstance(edge, REntry) and edge.role == a.lhs.role
                    and edge.source == c and p == SEntry(edge.target, a.lhs.filler))
        if rule == "CR5":
            edge, p = prem
            return (isinstance(x, Bottom) and isinstance(edge, REntry) and edge.source == c
                    and p == SEntry(edge.target, BOTTOM))
        if rule == "CR6":
            member, nom_c, nom_d, *path = prem
            dd = member.concept
            a = nom_c.member
            if not (isinstance(a, Nominal) and nom_c == SEntry(c, a) and nom_d == SEntry(dd, a)
                    and member == SEntry(dd, x) and c != dd):
                return False
            node = d.root
            if node != c and not (state.nominal_roots and isinstance(node, Nominal)):
                return False
            for edge in path:
                if not isinstance(edge, REntry) or edge.source != node:
                    return False
                node = edge.target
            return node == dd
        if rule in ("CR7", "CR8"):
            atoms = [p.member for p in prem]
            if not all(isinstance(p, SEntry) and p.concept == c and isinstance(p.member, Pred)
                       for p in prem) or not atoms:
                return False
            if len({a.domain for a in atoms}) != 1:
                return False
            dom = cdomains.get_domain(atoms[0].domain)
            if rule == "CR7":
                return isinstance(x, Bottom) and dom.satisfiable(atoms) is None
            return (isinstance(x, Pred) and x.domain == dom.id and x in state.basic
                    and dom.implies(atoms, x))
        if rule == "CR9":
            p1, p2 = prem
            a1, a2 = p1.member, p2.member
            return (isinstance(x, Bottom) and p1.concept == c and p2.concept == c
                    and isinstance(a1, Pred) and isinstance(a2, Pred)
                    and a1.domain != a2.domain and bool(set(a1.features) & set(a2.features)))
        return False
    r, c, dd = entry.role, entry.source, entry.target
    if rule == "CR3":
        (p,), (a,) = prem, ax
        return (isinstance(a, GCI) and isinstance(a.rhs, Exists) and a.rhs.role == r
                and a.rhs.filler == dd and p == SEntry(c, a.lhs))
    if rule == "CR10":
        (p,), (a,) = prem, ax
        return (isinstance(a, RoleInclusion) and a.chain == (p.role,) and a.sup == r
                and (p.source, p.target) == (c, dd))
    if rule == "CR11":
        (p1, p2), (a,) = prem, ax
        return (isinstance(a, RoleInclusion) and a.chain == (p1.role, p2.role) and a.sup == r
                and p1.source == c and p1.target == p2.source and p2.target == dd)
    return False


def replay_failures(state: ClassificationState) -> list:
    """Entries whose recorded derivation does not replay."""
    return [e for e in state.traces if not check_entry(state, e)]


@dataclass
class TraceNode:
    entry: Entry
    derivation: Derivation
    children: list
    # the saturated kb; derivation.axioms index into its constraints
    kb: Optional[KnowledgeBase] = field(default=None, repr=False, compare=False)

    @property
    def rule(self) -> str:
        return self.derivation.rule

    def to_dict(self, _seen: Optional[set] = None) -> dict:
        """Nested dict; a premise already expanded earlier is marked ``"repeat": true``."""
        seen = set() if _seen is None else _seen
        out = {"entry": str(self.entry), "rule": self.rule}
        if self.derivation.shape:
            out["shape"] = self.derivation.shape
        if self.derivation.axioms:
            out["axioms"] = list(self.derivation.axioms)
        if self.entry in seen and self.children:
            out["repeat"] = True
            return out
        seen.add(self.entry)
        if self.children:
            out["premises"] = [ch.to_dict(seen) for ch in self.children]
        return out

    def render(self, indent: str = "") -> str:
        kb = self.kb
        lines = []
        seen: set = set()

        def walk(node, depth):
            shape = node.derivation.shape
            label = f"{node.rule}/{shape}" if shape else node.rule
            extra = ""
            if kb is not None and node.derivation.axioms:
                used = (str(kb.constraints[i]) for i in node.derivation.axioms)
                extra = "  using " + "; ".join(used)
            pad = indent + "  " * depth
            if node.entry in seen and node.children:
                lines.append(f"{pad}{node.entry}  [{label}, see above]")
                return
            seen.add(node.entry)
            lines.append(f"{pad}{node.entry}  [{label}]{extra}")
            for ch in node.children:
                walk(ch, depth + 1)

        walk(self, 0)
        return "\n".join(lines)


def explain(state: ClassificationState, entry: Entry) -> TraceNode:
    """Derivation tree of ``entry``; leaves are initial entries."""
    if entry not in state or entry not in state.traces:
        raise AbsentEntry(f"{entry} is not in the classification")
    nodes: dict = {}
    stack = [entry]
    while stack:
        e = stack.pop()
        if e in nodes:
            continue
        nodes[e] = TraceNode(e, state.traces[e], [], state.kb)
        stack.extend(state.traces[e].premises)
    for e, node in nodes.items():
        node.children = [nodes[p] for p in node.derivation.premises]
    return nodes[entry]
