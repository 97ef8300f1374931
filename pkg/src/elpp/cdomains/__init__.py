from .base import (
    Atom,
    ConcreteDomain,
    DomainError,
    Predicate,
    apply_predicate,
    arity,
    domain_of,
    domains,
    get_domain,
    implies,
    register,
    satisfiable,
)
from .rationals import RATIONALS, EqConst, GtConst, PlusConst, SameQ, TopQ
from .strings import STRINGS, ConcatWord, EqWord, SameS, TopS

__all__ = [
    "Atom", "ConcreteDomain", "DomainError", "Predicate",
    "apply_predicate", "arity", "domain_of", "domains", "get_domain",
    "implies", "register", "satisfiable",
    "RATIONALS", "EqConst", "GtConst", "PlusConst", "SameQ", "TopQ",
    "STRINGS", "ConcatWord", "EqWord", "SameS", "TopS",
]
