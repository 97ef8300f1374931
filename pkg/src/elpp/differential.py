"""Reasoner-versus-oracle comparison on seeded random knowledge bases."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Optional

from .core import GCI, Concept, KnowledgeBase, basic_concepts
from .generate import SMALL, Shape, random_kb, random_query
from .oracle import DEFAULT_BUDGET, FiniteInterpretation, find_countermodel
from .reasoner import check_subsumption


def default_bound(kb: KnowledgeBase, c: Concept, d: Concept) -> int:
    """|BC| + 1, counting the basic concepts of the query as well."""
    return len(basic_concepts(kb.extend([GCI(c, d)]))) + 1


@dataclass
class Case:
    seed: str
    kb: KnowledgeBase
    subsumee: Concept
    subsumer: Concept
    holds: bool
    countermodel: Optional[FiniteInterpretation]
    bound: int

    @property
    def agrees(self) -> bool:
        return self.holds == (self.countermodel is None)


@dataclass
class Report:
    cases: int = 0
    entailed: int = 0
    disagreements: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def to_dict(self) -> dict:
        return {
            "cases": self.cases,
            "entailed": self.entailed,
            "disagreements": [
                {"seed": c.seed, "kb": str(c.kb).splitlines(), "subsumee": str(c.subsumee),
                 "subsumer": str(c.subsumer), "reasoner": c.holds, "bound": c.bound}
                for c in self.disagreements
            ],
        }


def case_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"{seed}-{index}")


def run_case(seed: int, index: int, *, shape: Shape = SMALL, max_size: Optional[int] = None,
             budget: int = DEFAULT_BUDGET, nominal_roots: bool = True) -> Case:
    rng = case_rng(seed, index)
    kb = random_kb(rng, shape)
    c, d = random_query(rng, kb)
    holds = check_subsumption(kb, c, d, nominal_roots=nominal_roots).holds
    bound = max_size if max_size is not None else default_bound(kb, c, d)
    model = find_countermodel(kb, c, d, bound, budget=budget)
    return Case(f"{seed}-{index}", kb, c, d, holds, model, bound)


def run(count: int, seed: int = 0, **kw) -> Report:
    """Compare verdicts on ``count`` random cases; BudgetExceeded propagates."""
    report = Report()
    start = time.perf_counter()
    for i in range(count):
        case = run_case(seed, i, **kw)
        report.cases += 1
        report.entailed += case.holds
        if not case.agrees:
            report.disagreements.append(case)
    report.seconds = time.perf_counter() - start
    return report


__all__ = ["Case", "Report", "default_bound", "case_rng", "run_case", "run"]
