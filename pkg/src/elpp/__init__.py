"""EL++ subsumption reasoning with rational and string concrete domains."""
from .core import (
    BOTTOM, GCI, TOP, Atomic, Bottom, Concept, Conj, Exists, InvalidKnowledgeBase, KnowledgeBase,
    Name, Nominal, Pred, RoleInclusion, Top, basic_concepts, conj, validate,
)
from .classify import ClassificationState, classify, explain
from .oracle import BudgetExceeded, FiniteInterpretation, find_countermodel, interpret, is_model
from .pipeline import a_extend, normalize, transform
from .reasoner import Verdict, check_subsumption, classify_names, is_consistent
from .syntax import OntologyError, format_kb, parse_concept, parse_kb

__version__ = "0.1.0"

__all__ = [
    "BOTTOM", "GCI", "TOP", "Atomic", "Bottom", "Concept", "Conj", "Exists",
    "InvalidKnowledgeBase", "KnowledgeBase", "Name", "Nominal", "Pred", "RoleInclusion", "Top",
    "basic_concepts", "conj", "validate",
    "ClassificationState", "classify", "explain",
    "BudgetExceeded", "FiniteInterpretation", "find_countermodel", "interpret", "is_model",
    "a_extend", "normalize", "transform",
    "Verdict", "check_subsumption", "classify_names", "is_consistent",
    "OntologyError", "format_kb", "parse_concept", "parse_kb",
]
