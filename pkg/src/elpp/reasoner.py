"""End-to-end subsumption checking."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .classify import (
    ClassificationState, SEntry, TraceNode, classify, explain,
)
from .core import BOTTOM, TOP, Atomic, Concept, KnowledgeBase, Nominal, check, validate
from .pipeline import AExtensionResult, TransformResult, a_extend, normalize, transform

DIRECT = "direct"
SUBSUMEE_EMPTY = "subsumee-empty"
INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class Verdict:
    holds: bool
    reason: Optional[str] = None
    trace: Optional[TraceNode] = None

    def to_dict(self) -> dict:
        out = {"holds": self.holds, "reason": self.reason}
        if self.trace is not None:
            out["trace"] = self.trace.to_dict()
        return out


@dataclass
class PipelineRun:
    """All intermediate artifacts of one subsumption query."""

    transformed: TransformResult
    normalized: KnowledgeBase
    extended: AExtensionResult
    state: ClassificationState

    @property
    def subsumee(self) -> Atomic:
        return Atomic(self.transformed.subsumee)

    @property
    def subsumer(self) -> Atomic:
        return Atomic(self.transformed.subsumer)

    def decisive_entry(self) -> tuple[Optional[str], Optional[SEntry]]:
        S = self.state.S
        a, b = self.subsumee, self.subsumer
        if b in S.get(a, ()):
            return DIRECT, SEntry(a, b)
        if BOTTOM in S.get(a, ()):
            return SUBSUMEE_EMPTY, SEntry(a, BOTTOM)
        for i in sorted(self.extended.kb.individuals):
            nom = Nominal(i)
            if BOTTOM in S.get(nom, ()):
                return INCONSISTENT, SEntry(nom, BOTTOM)
        return None, None


def _assert_closed(kb: KnowledgeBase, stage: str) -> None:
    # The input was validated once on entry; each stage must keep the inventories closed.
    violations = validate(kb)
    if violations:
        raise AssertionError(f"{stage} broke name closure: {violations[0].message}")


def run_pipeline(kb: KnowledgeBase, c: Concept, d: Concept, *,
                 nominal_roots: bool = True, rng=None) -> PipelineRun:
    t = transform(kb, c, d)
    _assert_closed(t.kb, "transform")
    n = normalize(t.kb)
    _assert_closed(n, "normalize")
    x = a_extend(n, t.subsumee)
    _assert_closed(x.kb, "a_extend")
    state = classify(x.kb, nominal_roots=nominal_roots, rng=rng)
    return PipelineRun(t, n, x, state)


def check_subsumption(kb: KnowledgeBase, c: Concept, d: Concept, *,
                      trace: bool = False, nominal_roots: bool = True) -> Verdict:
    """Decide whether ``c`` is subsumed by ``d`` with respect to ``kb``."""
    run = run_pipeline(kb, c, d, nominal_roots=nominal_roots)
    reason, entry = run.decisive_entry()
    if reason is None:
        return Verdict(False)
    return Verdict(True, reason, explain(run.state, entry) if trace else None)


def is_consistent(kb: KnowledgeBase) -> bool:
    return not check_subsumption(kb, TOP, BOTTOM).holds


def classify_names(kb: KnowledgeBase) -> set[tuple[str, str]]:
    """All pairs ``(X, Y)`` of inventory concept names with ``X`` subsumed by ``Y``."""
    check(kb)
    names = sorted(kb.concepts)
    out = set()
    for x in names:
        for y in names:
            if x == y or check_subsumption(kb, Atomic(x), Atomic(y)).holds:
                out.add((x, y))
    return out
