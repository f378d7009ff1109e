"""Parser and printer for the supported SMT-LIB v2 fragment.

Accepted commands: declare-sort (arity 0), declare-const, declare-fun,
assert, plus `;` comments. Comments immediately preceding a command attach
to it as its NL gloss; printing echoes them back, one item per line, so
parse(print(s)) is structurally stable and printing is idempotent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .logic import (
    BOOL,
    INT,
    REAL,
    And,
    Apply,
    Arith,
    BoolConst,
    Compare,
    Declaration,
    Distinct,
    Eq,
    Exists,
    Forall,
    Formula,
    FragmentViolation,
    Iff,
    Implies,
    LogicError,
    Not,
    NumLit,
    Or,
    VarRef,
    Vocabulary,
    is_valid_symbol,
)

_SYMBOL_CHARS = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz"
                    "0123456789~!@$%^&*_-+=<>.?/")

_KNOWN_UNSUPPORTED = {
    "define-fun", "define-sort", "define-const", "set-logic", "set-option",
    "set-info", "check-sat", "check-sat-assuming", "get-model", "get-value",
    "get-info", "push", "pop", "reset", "echo", "exit", "declare-datatype",
    "declare-datatypes",
}


@dataclass(frozen=True)
class ParseDiagnostic:
    """1-based position, message, and the token that triggered the failure."""

    line: int
    column: int
    message: str
    offending_token: str
    category: str = "syntax"  # syntax | sort | fragment | unsupported

    def __str__(self):
        return f"{self.line}:{self.column}: {self.message} (at {self.offending_token!r})"


class ParseError(LogicError):
    def __init__(self, diagnostic: ParseDiagnostic):
        super().__init__(str(diagnostic))
        self.diagnostic = diagnostic


class UnsupportedCommand(ParseError):
    pass


def _err(line: int, col: int, message: str, token: str, category: str = "syntax"):
    diag = ParseDiagnostic(line, col, message, token, category)
    cls = UnsupportedCommand if category == "unsupported" else ParseError
    raise cls(diag)


@dataclass(frozen=True)
class Assertion:
    formula: Formula
    doc: Optional[str] = None


@dataclass(frozen=True)
class Comment:
    text: str


ScriptItem = Union[Declaration, Assertion, Comment]


@dataclass(frozen=True)
class Script:
    """Ordered declarations, assertions, and trailing comments."""

    items: tuple[ScriptItem, ...] = ()

    @property
    def declarations(self) -> tuple[Declaration, ...]:
        return tuple(i for i in self.items if isinstance(i, Declaration))

    @property
    def assertions(self) -> tuple[Assertion, ...]:
        return tuple(i for i in self.items if isinstance(i, Assertion))


# --- Tokenizer / reader ---------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str  # "(" | ")" | "symbol" | "numeral" | "decimal" | "comment"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == ";":
            j = i
            while j < n and text[j] != "\n":
                j += 1
            body = text[i + 1:j].strip()
            tokens.append(_Token("comment", body, line, col))
            col += j - i
            i = j
            continue
        if ch in "()":
            tokens.append(_Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch in _SYMBOL_CHARS:
            j = i
            while j < n and text[j] in _SYMBOL_CHARS:
                j += 1
            word = text[i:j]
            if word[0].isdigit():
                if word.isdigit():
                    kind = "numeral"
                else:
                    parts = word.split(".")
                    if len(parts) == 2 and parts[0].isdigit() and parts[1].isdigit():
                        kind = "decimal"
                    else:
                        _err(line, col, "malformed numeral", word)
                tokens.append(_Token(kind, word, line, col))
            else:
                tokens.append(_Token("symbol", word, line, col))
            col += j - i
            i = j
            continue
        _err(line, col, f"unsupported character {ch!r}", ch)
    return tokens


@dataclass(frozen=True)
class _Atom:
    token: _Token


@dataclass(frozen=True)
class _List:
    items: tuple
    line: int
    col: int
    end_line: int = 0
    end_col: int = 0


def _iter_forms(tokens: list[_Token]):
    """Yield ("form", node, gloss) per completed top-level form in source
    order, then ("trailing", comment_texts, None). Reader errors fire as soon
    as the offending token arrives, keeping diagnostics near their cause."""
    stack: list[tuple[list, int, int]] = []
    comments: list[str] = []
    for tok in tokens:
        if tok.kind == "comment":
            if not stack:
                comments.append(tok.text)
            continue
        if tok.kind == "(":
            stack.append(([], tok.line, tok.col))
            continue
        if tok.kind == ")":
            if not stack:
                _err(tok.line, tok.col, "unmatched closing parenthesis", ")")
            items, line, col = stack.pop()
            node = _List(tuple(items), line, col, tok.line, tok.col)
            if stack:
                stack[-1][0].append(node)
            else:
                yield "form", node, "\n".join(comments) if comments else None
                comments = []
            continue
        if not stack:
            _err(tok.line, tok.col, "expected a command form", tok.text)
        stack[-1][0].append(_Atom(tok))
    if stack:
        _, line, col = stack[-1]
        _err(line, col, "unclosed parenthesis", "(")
    yield "trailing", tuple(comments), None


def _pos(node) -> tuple[int, int, str]:
    if isinstance(node, _Atom):
        return node.token.line, node.token.col, node.token.text
    return node.line, node.col, "("


def _atom_symbol(node, what: str) -> str:
    if not isinstance(node, _Atom) or node.token.kind != "symbol":
        line, col, tok = _pos(node)
        _err(line, col, f"expected {what}", tok)
    return node.token.text


# --- Term parsing with inline sort inference ------------------------------

_BOOL_NARY = {"and": And, "or": Or, "=>": Implies}


def _parse_term(node, vocab: Vocabulary, env: dict) -> tuple[Formula, str]:
    if isinstance(node, _Atom):
        tok = node.token
        if tok.kind == "numeral":
            return NumLit(Fraction(int(tok.text)), INT), INT
        if tok.kind == "decimal":
            num, den = tok.text.split(".")
            frac = Fraction(int(num)) + Fraction(int(den), 10 ** len(den)) if den else Fraction(int(num))
            return NumLit(frac, REAL), REAL
        name = tok.text
        if name == "true":
            return BoolConst(True), BOOL
        if name == "false":
            return BoolConst(False), BOOL
        if name in env:
            return VarRef(name, env[name]), env[name]
        decl = vocab.lookup_term(name)
        if decl is None:
            _err(tok.line, tok.col, f"unknown symbol {name!r}", name, "sort")
        if decl.arg_sorts:
            _err(tok.line, tok.col,
                 f"{name!r} takes {len(decl.arg_sorts)} arguments", name, "sort")
        return Apply(name, ()), decl.result_sort

    if not node.items:
        _err(node.line, node.col, "empty application", "(")
    head = node.items[0]
    if not isinstance(head, _Atom) or head.token.kind != "symbol":
        line, col, tok = _pos(head)
        _err(line, col, "expected an operator or function symbol", tok)
    op = head.token.text
    rest = node.items[1:]

    if op in ("forall", "exists"):
        return _parse_quantifier(node, op, vocab, env)
    if op in ("let", "ite", "!"):
        _err(head.token.line, head.token.col,
             f"{op!r} is outside the supported fragment", op, "fragment")

    args: list[tuple[Formula, str]] = []
    for sub in rest:
        args.append(_parse_term(sub, vocab, env))

    def need(k: int):
        if len(args) < k:
            _err(node.line, node.col, f"{op!r} needs at least {k} arguments", op)

    def all_numeric(what: str) -> str:
        need(2)
        sorts = {s for _, s in args}
        if not sorts <= {INT, REAL} or len(sorts) != 1:
            line, col, tok = _pos(node)
            _err(line, col, f"{what} needs uniformly Int or Real arguments", op, "sort")
        return next(iter(sorts))

    terms = tuple(t for t, _ in args)
    if op == "not":
        if len(args) != 1:
            _err(node.line, node.col, "'not' takes exactly one argument", op)
        _expect_bool(node, args, op)
        return Not(terms[0]), BOOL
    if op in _BOOL_NARY:
        need(2)
        _expect_bool(node, args, op)
        return _BOOL_NARY[op](terms), BOOL
    if op == "=":
        need(2)
        sorts = {s for _, s in args}
        if len(sorts) != 1:
            line, col, tok = _pos(node)
            _err(line, col, "equality over differently sorted terms", op, "sort")
        if sorts == {BOOL}:
            return Iff(terms), BOOL
        return Eq(terms), BOOL
    if op == "distinct":
        need(2)
        sorts = {s for _, s in args}
        if len(sorts) != 1:
            _err(node.line, node.col, "distinct over differently sorted terms", op, "sort")
        return Distinct(terms), BOOL
    if op in ("<=", "<", ">=", ">"):
        all_numeric("comparison")
        return Compare(op, terms), BOOL
    if op in ("+", "*"):
        sort = all_numeric("arithmetic")
        try:
            return Arith(op, terms), sort
        except FragmentViolation as e:
            _err(node.line, node.col, str(e), op, "fragment")
    if op == "-":
        if len(args) == 1:
            term, sort = args[0]
            if sort not in (INT, REAL):
                _err(node.line, node.col, "negation of non-numeric term", op, "sort")
            if isinstance(term, NumLit):
                return NumLit(-term.value, term.sort), sort
            return Arith("-", terms), sort
        sort = all_numeric("arithmetic")
        return Arith("-", terms), sort
    if op == "/":
        if len(args) == 2 and all(isinstance(t, NumLit) for t in terms):
            num, den = terms
            if den.value == 0:
                _err(node.line, node.col, "division by zero literal", op, "fragment")
            return NumLit(Fraction(num.value, den.value), REAL), REAL
        _err(node.line, node.col,
             "'/' is only supported between numeric literals", op, "fragment")

    decl = vocab.lookup_term(op)
    if decl is None:
        _err(head.token.line, head.token.col, f"unknown symbol {op!r}", op, "sort")
    if len(args) != len(decl.arg_sorts):
        _err(head.token.line, head.token.col,
             f"{op!r} expects {len(decl.arg_sorts)} arguments, got {len(args)}",
             op, "sort")
    for i, ((_, got), want) in enumerate(zip(args, decl.arg_sorts)):
        if got != want:
            line, col, tok = _pos(rest[i])
            _err(line, col, f"arg {i} of {op!r} expected {want}, got {got}", tok, "sort")
    return Apply(op, terms), decl.result_sort


def _expect_bool(node, args, op):
    for term, sort in args:
        if sort != BOOL:
            line, col, tok = _pos(node)
            _err(line, col, f"{op!r} needs boolean arguments, got {sort}", tok, "sort")


def _parse_quantifier(node, op, vocab, env):
    if len(node.items) != 3:
        _err(node.line, node.col, f"{op} needs a binder list and a body", op)
    binder_node = node.items[1]
    if not isinstance(binder_node, _List) or not binder_node.items:
        line, col, tok = _pos(binder_node)
        _err(line, col, "expected a non-empty binder list", tok)
    bound = []
    inner = dict(env)
    seen = set()
    for b in binder_node.items:
        if not isinstance(b, _List) or len(b.items) != 2:
            line, col, tok = _pos(b)
            _err(line, col, "binder must be (name Sort)", tok)
        name = _atom_symbol(b.items[0], "a variable name")
        sort = _atom_symbol(b.items[1], "a sort name")
        if name in seen:
            _err(b.line, b.col, f"duplicate bound variable {name!r}", name)
        if not vocab.has_sort(sort):
            line, col, tok = _pos(b.items[1])
            _err(line, col, f"unknown sort {sort!r}", sort, "sort")
        seen.add(name)
        bound.append((name, sort))
        inner[name] = sort  # shadows any outer binding
    body, sort = _parse_term(node.items[2], vocab, inner)
    if sort != BOOL:
        line, col, tok = _pos(node.items[2])
        _err(line, col, f"quantified body must be Bool, got {sort}", tok, "sort")
    cls = Forall if op == "forall" else Exists
    return cls(tuple(bound), body), BOOL


# --- Command parsing ------------------------------------------------------

def _parse_declaration(form: _List, doc: Optional[str], vocab: Vocabulary) -> Declaration:
    head = form.items[0]
    op = head.token.text
    rest = form.items[1:]
    # shape errors anchor at the form's closing paren: when a corruption
    # truncates a form, that paren is the corruption site
    line, col = form.end_line, form.end_col
    try:
        if op == "declare-sort":
            if len(rest) not in (1, 2):
                _err(line, col, "declare-sort takes a name and optional arity", op)
            name = _atom_symbol(rest[0], "a sort name")
            if len(rest) == 2:
                arity = rest[1]
                if not (isinstance(arity, _Atom) and arity.token.text == "0"):
                    aline, acol, tok = _pos(arity)
                    _err(aline, acol, "parameterized sorts are out of fragment",
                         tok, "fragment")
            return Declaration("sort", name, doc=doc)
        if op == "declare-const":
            if len(rest) != 2:
                _err(line, col, "declare-const takes a name and a sort", op)
            name = _atom_symbol(rest[0], "a constant name")
            sort = _atom_symbol(rest[1], "a sort name")
            return Declaration("const", name, result_sort=sort, doc=doc)
        # declare-fun
        if len(rest) != 3:
            _err(line, col, "declare-fun takes a name, argument sorts, and a result sort", op)
        name = _atom_symbol(rest[0], "a function name")
        if not isinstance(rest[1], _List):
            aline, acol, tok = _pos(rest[1])
            _err(aline, acol, "expected an argument sort list", tok)
        arg_sorts = tuple(_atom_symbol(a, "a sort name") for a in rest[1].items)
        result = _atom_symbol(rest[2], "a sort name")
        if not arg_sorts:
            return Declaration("const", name, result_sort=result, doc=doc)
        return Declaration("func", name, arg_sorts=arg_sorts, result_sort=result, doc=doc)
    except LogicError as e:
        if isinstance(e, ParseError):
            raise
        _err(line, col, str(e), op, "sort")


def parse_script(text: str, vocab: Vocabulary = None) -> Script:
    """Parse `text` against `vocab`; raises ParseError with a located diagnostic.

    Assertions are sort-checked against the base vocabulary extended by the
    script's own declarations, in source order. Unknown commands raise
    UnsupportedCommand rather than being skipped.
    """
    vocab = vocab if vocab is not None else Vocabulary()
    tokens = _tokenize(text)
    items: list[ScriptItem] = []
    for kind, form, doc in _iter_forms(tokens):
        if kind == "trailing":
            items.extend(Comment(c) for c in form)
            break
        if not form.items:
            _err(form.line, form.col, "empty command", "(")
        head = form.items[0]
        if not isinstance(head, _Atom) or head.token.kind != "symbol":
            line, col, tok = _pos(head)
            _err(line, col, "expected a command name", tok)
        op = head.token.text
        if op in ("declare-sort", "declare-const", "declare-fun"):
            decl = _parse_declaration(form, doc, vocab)
            try:
                extended = vocab.declare(decl)
            except LogicError as e:
                _err(form.line, form.col, str(e), decl.name, "sort")
            vocab = extended
            items.append(decl)
        elif op == "assert":
            if len(form.items) < 2:
                _err(form.end_line, form.end_col, "assert takes exactly one term", op)
            if len(form.items) > 2:
                line, col, tok = _pos(form.items[2])
                _err(line, col, "assert takes exactly one term", tok)
            term, sort = _parse_term(form.items[1], vocab, {})
            if sort != BOOL:
                line, col, tok = _pos(form.items[1])
                _err(line, col, f"asserted term must be Bool, got {sort}", tok, "sort")
            items.append(Assertion(term, doc=doc))
        elif op in _KNOWN_UNSUPPORTED:
            _err(head.token.line, head.token.col,
                 f"unsupported command {op!r}", op, "unsupported")
        else:
            _err(head.token.line, head.token.col,
                 f"unknown command {op!r}", op, "unsupported")
    return Script(tuple(items))


def script_vocabulary(script: Script, base: Vocabulary = None) -> Vocabulary:
    """The base vocabulary extended with the script's declarations, in order."""
    vocab = base if base is not None else Vocabulary()
    return vocab.declare_all(script.declarations)


# --- Printing -------------------------------------------------------------

def format_declaration(d: Declaration) -> str:
    if d.kind == "sort":
        return f"(declare-sort {d.name} 0)"
    if d.kind == "const":
        return f"(declare-const {d.name} {d.result_sort})"
    sorts = " ".join(d.arg_sorts)
    return f"(declare-fun {d.name} ({sorts}) {d.result_sort})"


def _doc_lines(doc: Optional[str]) -> list[str]:
    if doc is None:
        return []
    return [f"; {line}".rstrip() for line in doc.split("\n")]


def print_script(script: Script) -> str:
    """Canonical text: one item per line, glosses echoed as `;` comments."""
    lines: list[str] = []
    for item in script.items:
        if isinstance(item, Declaration):
            lines.extend(_doc_lines(item.doc))
            lines.append(format_declaration(item))
        elif isinstance(item, Assertion):
            lines.extend(_doc_lines(item.doc))
            lines.append(f"(assert {item.formula})")
        else:
            lines.append(f"; {item.text}".rstrip())
    return "".join(line + "\n" for line in lines)


def print_vocabulary(vocab: Vocabulary) -> str:
    """Deterministic declaration listing with glosses, insertion-ordered."""
    return print_script(Script(tuple(vocab.declarations)))
