"""Exhaustive finite-model enumeration, the independent check on the solver.

Interprets every uninterpreted sort as a set of size 1..domain_bound, every
integer constant or function output as a value in int_range, and enumerates
all interpretations of the symbols the assertions mention. Deliberately
shares nothing with the solver path beyond the AST. Real arithmetic,
quantification over Int, and oversized model spaces are out of fragment.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

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
    Iff,
    Implies,
    LogicError,
    Not,
    NumLit,
    Or,
    VarRef,
    Vocabulary,
    free_symbols,
)

SAT = "sat"
UNSAT = "unsat"
OUT_OF_FRAGMENT = "out-of-fragment"

DEFAULT_MAX_MODELS = 200_000


class _OutOfFragment(Exception):
    pass


def _fragment_scan(f: Formula) -> None:
    """Reject quantifiers over Int/Real and any Real-sorted literal."""
    if isinstance(f, NumLit):
        if f.sort == REAL:
            raise _OutOfFragment("real literal")
        return
    if isinstance(f, Forall):  # covers Exists
        for _, sort in f.bound:
            if sort in (INT, REAL):
                raise _OutOfFragment(f"quantifier over {sort}")
        _fragment_scan(f.body)
        return
    if isinstance(f, Not):
        _fragment_scan(f.arg)
        return
    if isinstance(f, (Eq, Distinct, And, Or, Implies, Iff, Compare, Arith)):
        for a in f.args:
            _fragment_scan(a)
        return
    if isinstance(f, Apply):
        for a in f.args:
            _fragment_scan(a)


def _value_domain(sort: str, sizes: dict[str, int], int_values: range):
    if sort == BOOL:
        return (False, True)
    if sort == INT:
        return tuple(int_values)
    return tuple(range(sizes[sort]))


@dataclass(frozen=True)
class _Symbol:
    decl: Declaration

    def spaces(self, sizes: dict[str, int], int_values: range):
        """(input_tuples, output_domain); constants have one empty input."""
        out = _value_domain(self.decl.result_sort, sizes, int_values)
        if self.decl.kind == "const":
            return ((),), out
        arg_domains = [_value_domain(s, sizes, int_values) for s in self.decl.arg_sorts]
        return tuple(itertools.product(*arg_domains)), out


def brute_force_check(
    vocab: Vocabulary,
    assertions: Sequence[Formula],
    domain_bound: int = 3,
    int_range: tuple[int, int] = (-20, 20),
    max_models: int = DEFAULT_MAX_MODELS,
) -> str:
    """sat / unsat over all bounded interpretations, or out-of-fragment.

    sat means some assignment of sort sizes (1..domain_bound) and symbol
    interpretations satisfies every assertion; unsat means none does. The
    verdict is sound against a real solver only when the assertions also
    bound the sorts and integers (cardinality axioms, range constraints),
    which the test generator guarantees.
    """
    used = set()
    for f in assertions:
        used |= free_symbols(f)
    symbols = []
    user_sorts: list[str] = []
    try:
        for f in assertions:
            _fragment_scan(f)
        for name in sorted(used):
            decl = vocab.lookup_term(name)
            if decl is None:
                raise LogicError(f"assertions mention undeclared symbol {name!r}")
            for s in (*decl.arg_sorts, decl.result_sort):
                if s == REAL:
                    raise _OutOfFragment("real-sorted symbol")
                if s not in (BOOL, INT) and s not in user_sorts:
                    user_sorts.append(s)
            symbols.append(_Symbol(decl))
        for f in assertions:
            for sort in _quantified_sorts(f):
                if sort not in (BOOL,) and sort not in user_sorts:
                    user_sorts.append(sort)
    except _OutOfFragment:
        return OUT_OF_FRAGMENT

    int_values = range(int_range[0], int_range[1] + 1)
    for sizes_tuple in itertools.product(*(range(1, domain_bound + 1) for _ in user_sorts)):
        sizes = dict(zip(user_sorts, sizes_tuple))
        count = 1
        per_symbol = []
        for sym in symbols:
            inputs, out = sym.spaces(sizes, int_values)
            count *= len(out) ** len(inputs)
            if count > max_models:
                return OUT_OF_FRAGMENT
            per_symbol.append((sym.decl.name, inputs, out))
        if _search(per_symbol, assertions, sizes, int_values):
            return SAT
    return UNSAT


def _quantified_sorts(f: Formula) -> Iterable[str]:
    if isinstance(f, Forall):
        for _, sort in f.bound:
            yield sort
        yield from _quantified_sorts(f.body)
    elif isinstance(f, Not):
        yield from _quantified_sorts(f.arg)
    elif isinstance(f, (Eq, Distinct, And, Or, Implies, Iff, Compare, Arith, Apply)):
        for a in f.args:
            yield from _quantified_sorts(a)


def _search(per_symbol, assertions, sizes, int_values) -> bool:
    interp_spaces = []
    for name, inputs, out in per_symbol:
        if inputs == ((),):
            interp_spaces.append([(name, None, v) for v in out])
        else:
            interp_spaces.append(
                [(name, inputs, table) for table in itertools.product(out, repeat=len(inputs))]
            )
    for combo in itertools.product(*interp_spaces):
        interp = {}
        for name, inputs, value in combo:
            if inputs is None:
                interp[name] = value
            else:
                interp[name] = dict(zip(inputs, value))
        if all(_eval(f, interp, {}, sizes, int_values) for f in assertions):
            return True
    return False


def _eval(f: Formula, interp, env, sizes, int_values):
    if isinstance(f, BoolConst):
        return f.value
    if isinstance(f, NumLit):
        return int(f.value)
    if isinstance(f, VarRef):
        return env[f.name]
    if isinstance(f, Apply):
        target = interp[f.name]
        if not f.args:
            return target
        key = tuple(_eval(a, interp, env, sizes, int_values) for a in f.args)
        return target[key]
    if isinstance(f, Not):
        return not _eval(f.arg, interp, env, sizes, int_values)
    if isinstance(f, And):
        return all(_eval(a, interp, env, sizes, int_values) for a in f.args)
    if isinstance(f, Or):
        return any(_eval(a, interp, env, sizes, int_values) for a in f.args)
    if isinstance(f, Implies):
        # right-associative: (=> a b c) is a => (b => c)
        vals = [_eval(a, interp, env, sizes, int_values) for a in f.args]
        result = vals[-1]
        for v in reversed(vals[:-1]):
            result = (not v) or result
        return result
    if isinstance(f, Iff):
        vals = [_eval(a, interp, env, sizes, int_values) for a in f.args]
        return all(v == vals[0] for v in vals)
    if isinstance(f, Eq):
        vals = [_eval(a, interp, env, sizes, int_values) for a in f.args]
        return all(v == vals[0] for v in vals)
    if isinstance(f, Distinct):
        vals = [_eval(a, interp, env, sizes, int_values) for a in f.args]
        return len(set(vals)) == len(vals)
    if isinstance(f, Compare):
        vals = [_eval(a, interp, env, sizes, int_values) for a in f.args]
        op = {"<=": lambda a, b: a <= b, "<": lambda a, b: a < b,
              ">=": lambda a, b: a >= b, ">": lambda a, b: a > b}[f.op]
        return all(op(a, b) for a, b in zip(vals, vals[1:]))
    if isinstance(f, Arith):
        vals = [_eval(a, interp, env, sizes, int_values) for a in f.args]
        if f.op == "+":
            return sum(vals)
        if f.op == "*":
            product = 1
            for v in vals:
                product *= v
            return product
        if len(vals) == 1:
            return -vals[0]
        result = vals[0]
        for v in vals[1:]:
            result -= v
        return result
    if isinstance(f, Forall):
        domains = [_value_domain(sort, sizes, int_values) for _, sort in f.bound]
        names = [name for name, _ in f.bound]
        quantifier = any if isinstance(f, Exists) else all
        def instances():
            for values in itertools.product(*domains):
                inner = dict(env)
                inner.update(zip(names, values))
                yield _eval(f.body, interp, inner, sizes, int_values)
        return quantifier(instances())
    raise LogicError(f"cannot evaluate node {type(f).__name__}")
