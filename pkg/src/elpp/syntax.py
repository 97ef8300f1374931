"""Text format for knowledge bases: a recursive-descent parser and a printer.

::

    # declarations come first on their own lines, names separated by spaces
    concept X A
    role r1
    individual b c
    feature f
    axiom X <= {b}
    axiom A <= (exists r1 . (X and Q.gt[1/2](f)))
    axiom r1 o r1 <= r1

A single-name axiom ``x <= y`` is a role inclusion when both names are
declared roles and a concept inclusion when both are declared concepts.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .cdomains import (
    ConcatWord, EqConst, EqWord, GtConst, PlusConst, SameQ, SameS, TopQ, TopS,
)
from .core import (
    BOTTOM, GCI, KINDS, TOP, Atomic, Concept, Conj, Exists, KnowledgeBase, Name, Nominal, Pred,
    RoleInclusion, _pred_violations, names_in, validate,
)

MAX_DEPTH = 200
RESERVED = frozenset({"concept", "role", "individual", "feature", "axiom",
                      "top", "bot", "and", "exists", "o"})


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int = 0
    end_col: int = 0

    def __str__(self):
        return f"{self.line}:{self.col}"


@dataclass(frozen=True)
class Diagnostic:
    stage: str  # "lexical" | "syntax" | "lowering"
    message: str
    span: Span
    expected: tuple = ()

    def __str__(self):
        out = f"{self.span}: {self.stage} error: {self.message}"
        if self.expected:
            out += f" (expected {', '.join(self.expected)})"
        return out


class OntologyError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


# --- lexer ---------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "number" | "string" | "punct" | "eof"
    text: str
    span: Span
    value: object = None


_TOKEN = re.compile(r"""
    (?P<newline>\n)
  | (?P<space>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\[^\n])*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<number>-?[0-9]+(?:/[0-9]+)?)
  | (?P<punct><=|[{}()\[\].,])
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    tokens = []
    i, line, line_start = 0, 1, 0
    n = len(text)
    while i < n:
        m = _TOKEN.match(text, i)
        col = i - line_start + 1
        start = Span(line, col)
        if m is None:
            if text[i] == '"':
                raise OntologyError([Diagnostic("lexical", "unterminated string literal", start)])
            raise OntologyError([Diagnostic("lexical", f"unexpected character {text[i]!r}",
                                            start)])
        kind, word = m.lastgroup, m.group()
        i = m.end()
        if kind == "newline":
            line, line_start = line + 1, i
            continue
        if kind in ("space", "comment"):
            continue
        span = Span(line, col, line, col + len(word))
        if kind == "string":
            try:
                value = json.loads(word)
            except ValueError as exc:
                raise OntologyError([Diagnostic("lexical", f"bad string literal: {exc.msg}",
                                                start)]) from None
            tokens.append(Token("string", word, span, value))
        elif kind == "number":
            num, _, den = word.partition("/")
            if den and int(den) == 0:
                raise OntologyError([Diagnostic("lexical", "zero denominator", start)])
            tokens.append(Token("number", word, span, Fraction(int(num), int(den) if den else 1)))
        else:
            tokens.append(Token(kind, word, span))
    tokens.append(Token("eof", "", Span(line, i - line_start + 1, line, i - line_start + 1)))
    return tokens


def _span(start: Span, line: int, col: int) -> Span:
    return Span(start.line, start.col, line, col)


# --- parsed form ---------------------------------------------------------

@dataclass(frozen=True)
class Reference:
    """A name or predicate occurrence inside an axiom, kept for error reporting."""

    span: Span
    name: Optional[Name] = None
    pred: Optional[Pred] = None


@dataclass
class SourceAxiom:
    span: Span
    lhs: object  # Concept, or a tuple of role names for role inclusions
    rhs: object
    refs: list = field(default_factory=list)
    bare: Optional[tuple] = None  # (lhs_name, rhs_name) when both sides are single names


@dataclass
class SourceOntology:
    declarations: list = field(default_factory=list)  # (kind, label, span)
    axioms: list = field(default_factory=list)

    def inventories(self) -> dict[str, set]:
        inv = {k: set() for k in KINDS}
        for kind, label, _ in self.declarations:
            inv[kind].add(label)
        return inv

    def lower(self) -> KnowledgeBase:
        """The knowledge base, or OntologyError listing every lowering problem."""
        inv = self.inventories()
        errors: list[Diagnostic] = []
        constraints = []
        for ax in self.axioms:
            c = self._resolve(ax, inv, errors)
            if c is None:
                continue
            refs = ax.refs if isinstance(c, GCI) else []
            found = False
            for ref in refs:
                if ref.name is not None and ref.name.label not in inv[ref.name.kind]:
                    errors.append(Diagnostic(
                        "lowering", f"unknown {ref.name.kind} name {ref.name.label}", ref.span))
                    found = True
                elif ref.pred is not None:
                    for v in _pred_violations(ref.pred):
                        errors.append(Diagnostic("lowering", v.message, ref.span))
                        found = True
            if isinstance(c, RoleInclusion):
                for role in (*c.chain, c.sup):
                    if role not in inv["role"]:
                        errors.append(Diagnostic("lowering", f"unknown role name {role}", ax.span))
                        found = True
            if not found:
                constraints.append(c)
        if errors:
            raise OntologyError(errors)
        kb = KnowledgeBase(constraints, inv["concept"], inv["role"],
                           inv["individual"], inv["feature"])
        leftover = validate(kb)
        if leftover:  # defensive: every violation should already carry a span
            raise OntologyError([Diagnostic("lowering", v.message, Span(1, 1)) for v in leftover])
        return kb

    @staticmethod
    def _resolve(ax: SourceAxiom, inv, errors):
        if ax.bare is not None:
            a, b = ax.bare
            as_roles = a in inv["role"] and b in inv["role"]
            as_concepts = a in inv["concept"] and b in inv["concept"]
            if as_roles and as_concepts:
                errors.append(Diagnostic(
                    "lowering", f"{a} <= {b} is ambiguous: both names are roles and concepts",
                    ax.span))
                return None
            if as_roles:
                return RoleInclusion((a,), b)
            return GCI(Atomic(a), Atomic(b))
        if isinstance(ax.lhs, tuple):
            return RoleInclusion(ax.lhs, ax.rhs)
        return GCI(ax.lhs, ax.rhs)


# --- parser --------------------------------------------------------------

_Q_PREDICATES = {"top": (TopQ, None), "eq": (EqConst, "number"), "gt": (GtConst, "number"),
                 "plus": (PlusConst, "number"), "same": (SameQ, None)}
_S_PREDICATES = {"top": (TopS, None), "eq": (EqWord, "string"),
                 "concat": (ConcatWord, "string"), "same": (SameS, None)}
DOMAIN_PREDICATES = {"Q": _Q_PREDICATES, "S": _S_PREDICATES}

_CONCEPT_START = ("top", "bot", "{", "(", "concept name", "Q.<predicate>", "S.<predicate>")


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.refs: list[Reference] = []

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def fail(self, message: str, expected=()):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise OntologyError([Diagnostic("syntax", f"{message}, found {found}", t.span,
                                        tuple(expected))])

    def is_punct(self, p: str) -> bool:
        return self.tok.kind == "punct" and self.tok.text == p

    def expect_punct(self, p: str) -> Token:
        if not self.is_punct(p):
            self.fail(f"expected {p!r}", (repr(p),))
        return self.advance()

    def is_word(self, w: str) -> bool:
        return self.tok.kind == "ident" and self.tok.text == w

    def name(self, what: str) -> Token:
        t = self.tok
        if t.kind != "ident" or t.text in RESERVED:
            self.fail(f"expected {what}", (what,))
        return self.advance()

    # ontology := (declaration | axiom)* EOF
    def ontology(self) -> SourceOntology:
        out = SourceOntology()
        while self.tok.kind != "eof":
            t = self.tok
            if t.kind == "ident" and t.text in KINDS:
                self.advance()
                if not (self.tok.kind == "ident" and self.tok.text not in RESERVED):
                    self.fail(f"expected a {t.text} name", (f"{t.text} name",))
                while self.tok.kind == "ident" and self.tok.text not in RESERVED:
                    n = self.advance()
                    out.declarations.append((t.text, n.text, n.span))
            elif self.is_word("axiom"):
                out.axioms.append(self.axiom())
            else:
                self.fail("expected a declaration or axiom",
                          ("concept", "role", "individual", "feature", "axiom"))
        return out

    # axiom := 'axiom' (role-chain '<=' NAME | concept '<=' concept)
    def axiom(self) -> SourceAxiom:
        start = self.advance().span
        self.refs = []
        t = self.tok
        if t.kind == "ident" and t.text not in RESERVED and not self._starts_predicate():
            nxt = self.peek()
            if nxt.kind == "ident" and nxt.text == "o":
                chain = [self.advance().text]
                while self.is_word("o"):
                    self.advance()
                    chain.append(self.name("role name").text)
                self.expect_punct("<=")
                sup = self.name("role name").text
                return SourceAxiom(self._close(start), tuple(chain), sup)
            if nxt.kind == "punct" and nxt.text == "<=":
                after = self.peek(2)
                third = self.peek(3)
                if (after.kind == "ident" and after.text not in RESERVED
                        and not (third.kind == "punct" and third.text == ".")):
                    a = self.advance()
                    self.advance()
                    b = self.advance()
                    refs = [Reference(a.span, Name("concept", a.text)),
                            Reference(b.span, Name("concept", b.text))]
                    return SourceAxiom(self._close(start), Atomic(a.text), Atomic(b.text),
                                       refs, bare=(a.text, b.text))
        lhs = self.concept(0)
        self.expect_punct("<=")
        rhs = self.concept(0)
        return SourceAxiom(self._close(start), lhs, rhs, list(self.refs))

    def _close(self, start: Span) -> Span:
        prev = self.tokens[self.pos - 1].span
        return Span(start.line, start.col, prev.end_line, prev.end_col)

    def _starts_predicate(self) -> bool:
        t, nxt = self.tok, self.peek()
        return (t.kind == "ident" and t.text in DOMAIN_PREDICATES
                and nxt.kind == "punct" and nxt.text == ".")

    # concept := 'top' | 'bot' | NAME | '{' NAME '}' | predicate
    #          | '(' concept ('and' concept)+ ')' | '(' 'exists' NAME '.' concept ')'
    def concept(self, depth: int) -> Concept:
        if depth > MAX_DEPTH:
            self.fail(f"descriptions nested deeper than {MAX_DEPTH}")
        t = self.tok
        if self.is_word("top"):
            self.advance()
            return TOP
        if self.is_word("bot"):
            self.advance()
            return BOTTOM
        if self._starts_predicate():
            return self.predicate()
        if t.kind == "ident" and t.text not in RESERVED:
            self.advance()
            self.refs.append(Reference(t.span, Name("concept", t.text)))
            return Atomic(t.text)
        if self.is_punct("{"):
            self.advance()
            n = self.name("individual name")
            self.expect_punct("}")
            self.refs.append(Reference(n.span, Name("individual", n.text)))
            return Nominal(n.text)
        if self.is_punct("("):
            self.advance()
            if self.is_word("exists"):
                self.advance()
                r = self.name("role name")
                self.refs.append(Reference(r.span, Name("role", r.text)))
                self.expect_punct(".")
                filler = self.concept(depth + 1)
                self.expect_punct(")")
                return Exists(r.text, filler)
            out = self.concept(depth + 1)
            if not self.is_word("and"):
                self.fail("expected 'and'", ("'and'",))
            while self.is_word("and"):
                self.advance()
                out = Conj(out, self.concept(depth + 1))
            self.expect_punct(")")
            return out
        self.fail("expected a concept description", _CONCEPT_START)

    # predicate := ('Q'|'S') '.' KEYWORD ('[' literal ']')? '(' NAME (',' NAME)* ')'
    def predicate(self) -> Pred:
        start = self.advance()
        domain = start.text
        self.expect_punct(".")
        table = DOMAIN_PREDICATES[domain]
        kw = self.tok
        if kw.kind != "ident" or kw.text not in table:
            self.fail(f"unknown {domain} predicate", tuple(sorted(table)))
        self.advance()
        cls, arg_kind = table[kw.text]
        if arg_kind is None:
            predicate = cls()
        else:
            self.expect_punct("[")
            lit = self.tok
            if lit.kind != arg_kind:
                self.fail(f"expected a {arg_kind} literal", (arg_kind,))
            self.advance()
            self.expect_punct("]")
            predicate = cls(lit.value)
        self.expect_punct("(")
        feats = [self.name("feature name")]
        while self.is_punct(","):
            self.advance()
            feats.append(self.name("feature name"))
        self.expect_punct(")")
        for f in feats:
            self.refs.append(Reference(f.span, Name("feature", f.text)))
        pred = Pred(domain, predicate, tuple(f.text for f in feats))
        self.refs.append(Reference(_span(start.span, self.tokens[self.pos - 1].span.end_line,
                                         self.tokens[self.pos - 1].span.end_col), pred=pred))
        return pred


def _decode(source: Union[str, bytes]) -> str:
    if isinstance(source, bytes):
        try:
            return source.decode("utf-8")
        except UnicodeDecodeError as exc:
            before = source[:exc.start]
            line = before.count(b"\n") + 1
            col = exc.start - (before.rfind(b"\n") + 1) + 1
            raise OntologyError([Diagnostic("lexical", "input is not valid UTF-8",
                                            Span(line, col))]) from None
    return source


def parse_ontology(source: Union[str, bytes]) -> SourceOntology:
    """Parse without lowering; syntax problems raise OntologyError."""
    return _Parser(tokenize(_decode(source))).ontology()


def parse_kb(source: Union[str, bytes]) -> KnowledgeBase:
    return parse_ontology(source).lower()


def parse_concept(source: str, kb: Optional[KnowledgeBase] = None) -> Concept:
    """Parse a single description; with ``kb``, its names must be declared there."""
    p = _Parser(tokenize(_decode(source)))
    c = p.concept(0)
    if p.tok.kind != "eof":
        p.fail("expected end of description", ("end of input",))
    if kb is not None:
        errors = []
        for ref in p.refs:
            if ref.name is not None and ref.name.label not in kb.inventory(ref.name.kind):
                errors.append(Diagnostic("lowering",
                                         f"unknown {ref.name.kind} name {ref.name.label}",
                                         ref.span))
            elif ref.pred is not None:
                errors.extend(Diagnostic("lowering", v.message, ref.span)
                              for v in _pred_violations(ref.pred))
        if errors:
            raise OntologyError(errors)
    return c


# --- printer -------------------------------------------------------------

def format_kb(kb: KnowledgeBase) -> str:
    """Surface text for ``kb``; ``parse_kb(format_kb(kb)) == kb``."""
    lines = []
    for kind in KINDS:
        labels = sorted(kb.inventory(kind))
        if labels:
            lines.append(f"{kind} {' '.join(labels)}")
    lines.extend(f"axiom {c}" for c in kb.constraints)
    return "\n".join(lines) + "\n"


def format_concept(c: Concept) -> str:
    return str(c)


__all__ = [
    "Span", "Diagnostic", "OntologyError", "Token", "SourceOntology", "SourceAxiom",
    "tokenize", "parse_ontology", "parse_kb", "parse_concept", "format_kb", "format_concept",
    "MAX_DEPTH", "RESERVED",
]
