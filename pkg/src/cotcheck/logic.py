"""Typed first-order AST, sorts, declarations, and well-sortedness checking.

The fragment covers booleans, linear integer/real arithmetic, uninterpreted
sorts and functions, equality, and quantifiers. Everything here is an
immutable value; extending a vocabulary returns a new one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

BOOL = "Bool"
INT = "Int"
REAL = "Real"
BUILTIN_SORTS = frozenset({BOOL, INT, REAL})

# SMT-LIB simple symbols, minus the quoted-symbol escape hatch.
_SIMPLE_SYMBOL = re.compile(r"[A-Za-z~!@$%^&*_+=<>.?/-][A-Za-z0-9~!@$%^&*_+=<>.?/-]*$")

_RESERVED_WORDS = frozenset(
    {
        "true", "false", "and", "or", "not", "=>", "=", "distinct", "ite", "let",
        "forall", "exists", "assert", "declare-sort", "declare-const",
        "declare-fun", "+", "-", "*", "/", "<=", "<", ">=", ">",
    }
)


class LogicError(Exception):
    """Base class for vocabulary and fragment errors."""


class UnknownSort(LogicError):
    pass


class ConflictingRedeclaration(LogicError):
    pass


class FragmentViolation(LogicError):
    """Raised when a term outside the supported fragment is constructed."""


def is_valid_symbol(name: str) -> bool:
    return bool(name) and bool(_SIMPLE_SYMBOL.match(name)) and name not in _RESERVED_WORDS


def normalize_symbol(text: str, taken: Iterable[str] = ()) -> str:
    """Normalize an NL-derived name to lower_snake_case ASCII.

    CamelCase humps become underscores, non-symbol characters collapse to
    underscores, and collisions with `taken` get a numeric suffix.
    """
    s = re.sub(r"(?<=[a-z0-9])([A-Z])", r"_\1", text.strip())
    s = re.sub(r"[^A-Za-z0-9]+", "_", s).strip("_").lower()
    if not s or s[0].isdigit():
        s = "s_" + s
    taken_set = set(taken)
    if s not in taken_set:
        return s
    i = 2
    while f"{s}_{i}" in taken_set:
        i += 1
    return f"{s}_{i}"


@dataclass(frozen=True)
class Declaration:
    """A named sort, constant, or function with its signature and NL gloss."""

    kind: str  # "sort" | "const" | "func"
    name: str
    arg_sorts: tuple[str, ...] = ()
    result_sort: Optional[str] = None
    doc: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("sort", "const", "func"):
            raise LogicError(f"unknown declaration kind {self.kind!r}")
        if not is_valid_symbol(self.name):
            raise LogicError(f"invalid symbol name {self.name!r}")
        if self.kind == "sort" and (self.arg_sorts or self.result_sort):
            raise LogicError("sort declarations carry no signature")
        if self.kind == "const" and (self.arg_sorts or not self.result_sort):
            raise LogicError("const declarations need a result sort and no arguments")
        if self.kind == "func" and not self.result_sort:
            raise LogicError("func declarations need a result sort")

    def signature(self) -> tuple:
        return (self.kind, self.arg_sorts, self.result_sort)


class Vocabulary:
    """Ordered, immutable map of declarations; the case's logical signature.

    Sorts live in one namespace, constants and functions share another
    (a name must resolve unambiguously inside a formula). Printing order
    is insertion order, so equal declaration sequences print identically.
    """

    __slots__ = ("_sorts", "_terms", "_order", "version")

    def __init__(self, decls: Iterable[Declaration] = (), _version: int = 0):
        self._sorts: dict[str, Declaration] = {}
        self._terms: dict[str, Declaration] = {}
        self._order: tuple[Declaration, ...] = ()
        self.version = _version
        order = []
        for d in decls:
            self._admit(d)
            order.append(d)
        self._order = tuple(order)

    def _admit(self, d: Declaration) -> None:
        if d.name in self._sorts or d.name in self._terms:
            raise ConflictingRedeclaration(f"{d.name!r} declared twice")
        if d.kind == "sort":
            if d.name in BUILTIN_SORTS:
                raise ConflictingRedeclaration(f"sort {d.name!r} shadows a built-in")
            self._sorts[d.name] = d
        else:
            for s in (*d.arg_sorts, d.result_sort):
                if s not in BUILTIN_SORTS and s not in self._sorts:
                    raise UnknownSort(f"declaration {d.name!r} references unknown sort {s!r}")
            self._terms[d.name] = d

    def declare(self, d: Declaration) -> "Vocabulary":
        """Return this vocabulary extended with `d` (version + 1).

        Re-declaring an identical signature is idempotent and returns self;
        a different signature under the same name is an error.
        """
        existing = self._sorts.get(d.name) if d.kind == "sort" else self._terms.get(d.name)
        if existing is None and d.kind != "sort" and d.name in self._sorts:
            existing = self._sorts[d.name]
        if existing is None and d.kind == "sort" and d.name in self._terms:
            existing = self._terms[d.name]
        if existing is not None:
            if existing.signature() == d.signature():
                return self
            raise ConflictingRedeclaration(
                f"{d.name!r} already declared as {existing.signature()}, got {d.signature()}"
            )
        if d.kind == "sort" and d.name in BUILTIN_SORTS:
            raise ConflictingRedeclaration(f"sort {d.name!r} shadows a built-in")
        return Vocabulary((*self._order, d), _version=self.version + 1)

    def declare_all(self, decls: Iterable[Declaration]) -> "Vocabulary":
        vocab = self
        for d in decls:
            vocab = vocab.declare(d)
        return vocab

    def has_sort(self, name: str) -> bool:
        return name in BUILTIN_SORTS or name in self._sorts

    def lookup_term(self, name: str) -> Optional[Declaration]:
        return self._terms.get(name)

    @property
    def declarations(self) -> tuple[Declaration, ...]:
        return self._order

    def sort_names(self) -> tuple[str, ...]:
        return tuple(self._sorts)

    def term_names(self) -> tuple[str, ...]:
        return tuple(self._terms)

    def __contains__(self, name: str) -> bool:
        return name in self._sorts or name in self._terms

    def __len__(self) -> int:
        return len(self._order)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self._order == other._order

    def __hash__(self):
        return hash(self._order)

    def __repr__(self):
        return f"Vocabulary({len(self._order)} decls, v{self.version})"


# --- Formula AST ----------------------------------------------------------

class Formula:
    """Base class for all AST nodes; `str()` renders the SMT-LIB form."""

    __slots__ = ()


def _sexpr(head: str, parts: Iterable[str]) -> str:
    return "(" + head + "".join(" " + p for p in parts) + ")"


@dataclass(frozen=True)
class BoolConst(Formula):
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


@dataclass(frozen=True)
class NumLit(Formula):
    """Exact numeric literal: an integer, or a rational tagged Real."""

    value: Fraction
    sort: str = INT

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))
        if self.sort not in (INT, REAL):
            raise FragmentViolation(f"numeric literal sort must be Int or Real, got {self.sort!r}")
        if self.sort == INT and self.value.denominator != 1:
            raise FragmentViolation(f"integer literal with denominator: {self.value}")

    def __str__(self):
        v = self.value
        if v < 0:
            return f"(- {NumLit(-v, self.sort)})"
        if self.sort == INT:
            return str(v.numerator)
        if v.denominator == 1:
            return f"{v.numerator}.0"
        return f"(/ {v.numerator}.0 {v.denominator}.0)"


def int_lit(n: int) -> NumLit:
    return NumLit(Fraction(n), INT)


def real_lit(value: Union[int, Fraction], den: int = 1) -> NumLit:
    return NumLit(Fraction(value, den) if den != 1 else Fraction(value), REAL)


@dataclass(frozen=True)
class VarRef(Formula):
    """Occurrence of a quantifier-bound variable."""

    name: str
    sort: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Apply(Formula):
    """Application of a declared constant (no args) or function."""

    name: str
    args: tuple[Formula, ...] = ()

    def __str__(self):
        if not self.args:
            return self.name
        return _sexpr(self.name, (str(a) for a in self.args))


def const(name: str) -> Apply:
    return Apply(name, ())


@dataclass(frozen=True)
class Eq(Formula):
    args: tuple[Formula, ...]

    def __post_init__(self):
        if len(self.args) < 2:
            raise FragmentViolation("= needs at least two arguments")

    def __str__(self):
        return _sexpr("=", (str(a) for a in self.args))


@dataclass(frozen=True)
class Distinct(Formula):
    args: tuple[Formula, ...]

    def __post_init__(self):
        if len(self.args) < 2:
            raise FragmentViolation("distinct needs at least two arguments")

    def __str__(self):
        return _sexpr("distinct", (str(a) for a in self.args))


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def __str__(self):
        return f"(not {self.arg})"


class _Nary(Formula):
    __slots__ = ()
    op = ""

    def __str__(self):
        return _sexpr(self.op, (str(a) for a in self.args))  # type: ignore[attr-defined]


def _check_nary(args):
    if len(args) < 2:
        raise FragmentViolation("connective needs at least two arguments")


@dataclass(frozen=True)
class And(_Nary):
    args: tuple[Formula, ...]
    op = "and"

    def __post_init__(self):
        _check_nary(self.args)


@dataclass(frozen=True)
class Or(_Nary):
    args: tuple[Formula, ...]
    op = "or"

    def __post_init__(self):
        _check_nary(self.args)


@dataclass(frozen=True)
class Implies(_Nary):
    args: tuple[Formula, ...]
    op = "=>"

    def __post_init__(self):
        _check_nary(self.args)


@dataclass(frozen=True)
class Iff(_Nary):
    """Boolean equivalence; printed as chainable `=` over Bool."""

    args: tuple[Formula, ...]
    op = "="

    def __post_init__(self):
        _check_nary(self.args)


COMPARE_OPS = ("<=", "<", ">=", ">")
ARITH_OPS = ("+", "-", "*")


@dataclass(frozen=True)
class Compare(Formula):
    op: str
    args: tuple[Formula, ...]

    def __post_init__(self):
        if self.op not in COMPARE_OPS:
            raise FragmentViolation(f"unknown comparison {self.op!r}")
        _check_nary(self.args)

    def __str__(self):
        return _sexpr(self.op, (str(a) for a in self.args))


@dataclass(frozen=True)
class Arith(Formula):
    """Linear arithmetic term: +, n-ary/unary -, and * with numeral factors."""

    op: str
    args: tuple[Formula, ...]

    def __post_init__(self):
        if self.op not in ARITH_OPS:
            raise FragmentViolation(f"unknown arithmetic operator {self.op!r}")
        if self.op == "-":
            if len(self.args) < 1:
                raise FragmentViolation("- needs at least one argument")
        else:
            _check_nary(self.args)
        if self.op == "*":
            non_numeral = [a for a in self.args if not isinstance(a, NumLit)]
            if len(non_numeral) > 1:
                raise FragmentViolation(
                    "nonlinear multiplication: at most one non-numeral factor allowed"
                )

    def __str__(self):
        return _sexpr(self.op, (str(a) for a in self.args))


@dataclass(frozen=True)
class Forall(Formula):
    bound: tuple[tuple[str, str], ...]  # (name, sort) pairs
    body: Formula
    quant = "forall"

    def __post_init__(self):
        if not self.bound:
            raise FragmentViolation("quantifier needs at least one bound variable")

    def __str__(self):
        binders = " ".join(f"({n} {s})" for n, s in self.bound)
        return f"({self.quant} ({binders}) {self.body})"


@dataclass(frozen=True)
class Exists(Forall):
    quant = "exists"


# --- Well-sortedness ------------------------------------------------------

@dataclass(frozen=True)
class SortDiagnostic:
    """Names the offending subterm and the expected/actual sorts."""

    subterm: str
    message: str
    expected: Optional[str] = None
    actual: Optional[str] = None

    def __str__(self):
        detail = f" (expected {self.expected}, got {self.actual})" if self.expected else ""
        return f"{self.message}{detail} in {self.subterm}"


class _SortFailure(Exception):
    def __init__(self, diagnostic: SortDiagnostic):
        super().__init__(str(diagnostic))
        self.diagnostic = diagnostic


def _fail(node: Formula, message: str, expected: str = None, actual: str = None):
    raise _SortFailure(SortDiagnostic(str(node), message, expected, actual))


def sort_of(vocab: Vocabulary, f: Formula, env: Mapping[str, str] = None) -> str:
    """Sort of `f` under `vocab` and a bound-variable environment.

    Raises LogicError via an internal failure carrying a SortDiagnostic;
    use check_well_sorted for the diagnostic-as-value form.
    """
    env = env or {}
    return _sort_of(vocab, f, dict(env))


def _numeric(vocab, node, args, env) -> str:
    sorts = [_sort_of(vocab, a, env) for a in args]
    for a, s in zip(args, sorts):
        if s not in (INT, REAL):
            _fail(node, f"arithmetic over non-numeric operand {a}", "Int or Real", s)
    if len(set(sorts)) > 1:
        _fail(node, "mixed Int/Real operands", sorts[0], sorts[1])
    return sorts[0]


def _sort_of(vocab: Vocabulary, f: Formula, env: dict) -> str:
    if isinstance(f, BoolConst):
        return BOOL
    if isinstance(f, NumLit):
        return f.sort
    if isinstance(f, VarRef):
        bound = env.get(f.name)
        if bound is None:
            _fail(f, f"free variable {f.name!r}")
        if bound != f.sort:
            _fail(f, f"variable {f.name!r} annotated {f.sort!r}", bound, f.sort)
        return bound
    if isinstance(f, Apply):
        if f.name in env and not f.args:
            # A bare symbol in binder scope should have parsed as VarRef.
            _fail(f, f"symbol {f.name!r} is bound here; constant use is ambiguous")
        decl = vocab.lookup_term(f.name)
        if decl is None:
            _fail(f, f"unknown symbol {f.name!r}")
        if len(f.args) != len(decl.arg_sorts):
            _fail(f, f"{f.name!r} expects {len(decl.arg_sorts)} arguments, got {len(f.args)}")
        for i, (a, want) in enumerate(zip(f.args, decl.arg_sorts)):
            got = _sort_of(vocab, a, env)
            if got != want:
                _fail(f, f"arg {i} of {f.name!r}", want, got)
        return decl.result_sort
    if isinstance(f, (Eq, Distinct)):
        sorts = [_sort_of(vocab, a, env) for a in f.args]
        if len(set(sorts)) > 1:
            _fail(f, "equality over differently sorted terms", sorts[0], sorts[1])
        return BOOL
    if isinstance(f, Not):
        got = _sort_of(vocab, f.arg, env)
        if got != BOOL:
            _fail(f, "negation of non-boolean", BOOL, got)
        return BOOL
    if isinstance(f, Iff):
        sorts = [_sort_of(vocab, a, env) for a in f.args]
        for s in sorts:
            if s != BOOL:
                _fail(f, "iff over non-boolean", BOOL, s)
        return BOOL
    if isinstance(f, (And, Or, Implies)):
        for a in f.args:
            got = _sort_of(vocab, a, env)
            if got != BOOL:
                _fail(f, f"connective argument {a}", BOOL, got)
        return BOOL
    if isinstance(f, Compare):
        _numeric(vocab, f, f.args, env)
        return BOOL
    if isinstance(f, Arith):
        return _numeric(vocab, f, f.args, env)
    if isinstance(f, Forall):  # covers Exists
        inner = dict(env)
        for name, sort in f.bound:
            if not vocab.has_sort(sort):
                _fail(f, f"bound variable {name!r} has unknown sort {sort!r}")
            inner[name] = sort  # inner binding shadows outer
        got = _sort_of(vocab, f.body, inner)
        if got != BOOL:
            _fail(f, "quantified body must be boolean", BOOL, got)
        return BOOL
    _fail(f, f"unsupported node {type(f).__name__}")


def check_well_sorted(vocab: Vocabulary, f: Formula,
                      env: Mapping[str, str] = None) -> Optional[SortDiagnostic]:
    """None when `f` is well-sorted with no free variables, else a diagnostic."""
    try:
        sort_of(vocab, f, env)
        return None
    except _SortFailure as e:
        return e.diagnostic


def free_symbols(f: Formula) -> set[str]:
    """Non-bound, non-builtin identifiers appearing in `f`."""
    out: set[str] = set()

    def walk(node: Formula, bound: frozenset[str]):
        if isinstance(node, Apply):
            out.add(node.name)
            for a in node.args:
                walk(a, bound)
        elif isinstance(node, VarRef):
            if node.name not in bound:
                out.add(node.name)
        elif isinstance(node, Forall):
            walk(node.body, bound | {n for n, _ in node.bound})
        elif isinstance(node, Not):
            walk(node.arg, bound)
        elif isinstance(node, (Eq, Distinct, And, Or, Implies, Iff, Compare, Arith)):
            for a in node.args:
                walk(a, bound)

    walk(f, frozenset())
    return out


# --- Verification-run state ----------------------------------------------

class ErrorKind(str, Enum):
    UNGROUNDED = "ungrounded"
    CONTRADICTION = "contradiction"
    UNTRANSLATABLE = "untranslatable"


@dataclass(frozen=True)
class StepFormula:
    """Origin tag: the formalization of CoT step `index`."""

    index: int

    def label(self) -> str:
        return f"step {self.index}"


@dataclass(frozen=True)
class PremiseOrigin:
    """Origin tag: an incorporated premise."""

    premise_id: str

    def label(self) -> str:
        return f"premise {self.premise_id}"


Origin = Union[StepFormula, PremiseOrigin]


@dataclass
class KnowledgeState:
    """Established formulas, premise ids, and the error ledger of one run.

    `established` only ever grows; every formula is checked well-sorted
    under the vocabulary at its insertion time. Confined to a single
    verification run (not shared across threads).
    """

    vocab: Vocabulary = field(default_factory=Vocabulary)
    established: list[tuple[Formula, Origin]] = field(default_factory=list)
    premise_ids: list[str] = field(default_factory=list)
    errors: list[tuple[int, ErrorKind]] = field(default_factory=list)

    def extend_vocab(self, vocab: Vocabulary) -> None:
        if vocab.version < self.vocab.version:
            raise LogicError("vocabulary must extend monotonically")
        self.vocab = vocab

    def add_established(self, f: Formula, origin: Origin) -> None:
        diag = check_well_sorted(self.vocab, f)
        if diag is not None:
            raise LogicError(f"ill-sorted formula for {origin.label()}: {diag}")
        self.established.append((f, origin))

    def add_premise_id(self, premise_id: str) -> None:
        self.premise_ids.append(premise_id)

    def record_error(self, step_index: int, kind: ErrorKind) -> None:
        self.errors.append((step_index, kind))

    def established_formulas(self) -> list[Formula]:
        return [f for f, _ in self.established]
