"""Preconditions: parsing, printing, evaluation and implication.

The supported fragment is a conjunction of comparisons between one variable
and an integer constant, plus ``= null`` / ``!= null`` tests.  Anything else
parses fine but makes :func:`implies` answer ``None`` (undecidable).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Union

from kindc.errors import ContractSyntaxError


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Int:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Null:
    def __str__(self) -> str:
        return "null"


Term = Union[Var, Int, Null]

OPS = ("<", "<=", "==", "!=", ">=", ">")
_OP_ALIASES = {"=": "==", "==": "==", "≤": "<=", "≥": ">=", "≠": "!=", "/=": "!=",
               "<": "<", "<=": "<=", "!=": "!=", ">=": ">=", ">": ">"}
_FLIP = {"<": ">", "<=": ">=", "==": "==", "!=": "!=", ">=": "<=", ">": "<"}


@dataclass(frozen=True)
class Cmp:
    left: Term
    op: str
    right: Term

    def __str__(self) -> str:
        return f"{self.left}{self.op}{self.right}"


@dataclass(frozen=True)
class Contract:
    """A conjunction of comparisons; duplicates are dropped, order kept."""

    conjuncts: tuple[Cmp, ...]

    def __post_init__(self):
        seen: list[Cmp] = []
        for c in self.conjuncts:
            if c not in seen:
                seen.append(c)
        object.__setattr__(self, "conjuncts", tuple(seen))

    def __str__(self) -> str:
        return " && ".join(str(c) for c in self.conjuncts) or "true"

    def variables(self) -> tuple[str, ...]:
        out: list[str] = []
        for c in self.conjuncts:
            for t in (c.left, c.right):
                if isinstance(t, Var) and t.name not in out:
                    out.append(t.name)
        return tuple(out)

    def __and__(self, other: "Contract") -> "Contract":
        return Contract(self.conjuncts + other.conjuncts)


ContractExpr = Contract

# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
                    r"|(?P<op><=|>=|==|!=|/=|&&|[<>=≤≥≠()\-]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            at = len(text) - len(text[pos:].lstrip())
            raise ContractSyntaxError(f"unexpected character {text[at]!r} in contract", 0, at + 1)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    return tokens


def parse_contract(text: str) -> Contract:
    """Parse ``year > 1970``, ``(thread != null)``, ``x > 0 and x < 10`` ..."""
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else ("eof", "", len(text) + 1)

    def take(expected: str | None = None):
        nonlocal pos
        tok = peek()
        if tok[0] == "eof" or (expected is not None and tok[1] != expected):
            want = f"{expected!r}" if expected else "more input"
            raise ContractSyntaxError(f"expected {want}, found {tok[1] or 'end of contract'!r}",
                                      0, tok[2])
        pos += 1
        return tok

    def term() -> Term:
        kind, value, col = take()
        if value == "-":
            kind, value, col = take()
            if kind != "num":
                raise ContractSyntaxError("expected a number after '-'", 0, col)
            return Int(-int(value))
        if kind == "num":
            return Int(int(value))
        if kind == "name" and value not in ("and", "null", "true"):
            return Var(value)
        if value == "null":
            return Null()
        raise ContractSyntaxError(f"expected an identifier or literal, found {value!r}", 0, col)

    def atom() -> list[Cmp]:
        if peek()[1] == "(":
            take("(")
            inner = conj()
            take(")")
            return inner
        left = term()
        kind, value, col = take()
        if value not in _OP_ALIASES:
            raise ContractSyntaxError(f"expected a comparison operator, found {value!r}", 0, col)
        op = _OP_ALIASES[value]
        right = term()
        if (isinstance(left, Null) or isinstance(right, Null)) and op not in ("==", "!="):
            raise ContractSyntaxError("null can only be compared with = or !=", 0, col)
        return [Cmp(left, op, right)]

    def conj() -> list[Cmp]:
        out = atom()
        while peek()[1] in ("and", "&&"):
            take()
            out += atom()
        return out

    if not tokens:
        raise ContractSyntaxError("empty contract", 0, 1)
    result = conj()
    if pos != len(tokens):
        raise ContractSyntaxError(f"unexpected {tokens[pos][1]!r}", 0, tokens[pos][2])
    return Contract(tuple(result))


# -- manipulation -----------------------------------------------------------

def rename_vars(contract: Contract, mapping: Mapping[str, str]) -> Contract:
    def sub(t: Term) -> Term:
        return Var(mapping.get(t.name, t.name)) if isinstance(t, Var) else t

    return Contract(tuple(Cmp(sub(c.left), c.op, sub(c.right)) for c in contract.conjuncts))


def conjoin(*contracts: Contract | None) -> Contract | None:
    parts = [c for c in contracts if c is not None]
    if not parts:
        return None
    out = parts[0]
    for c in parts[1:]:
        out = out & c
    return out


_PY_OPS = {"<": lambda a, b: a < b, "<=": lambda a, b: a <= b,
           "==": lambda a, b: a == b, "!=": lambda a, b: a != b,
           ">=": lambda a, b: a >= b, ">": lambda a, b: a > b}


def evaluate(contract: Contract | None, env: Mapping[str, object]) -> bool:
    """Evaluate against concrete values; ``None`` stands for null."""
    if contract is None:
        return True

    def val(t: Term):
        if isinstance(t, Var):
            return env[t.name]
        return t.value if isinstance(t, Int) else None

    for c in contract.conjuncts:
        a, b = val(c.left), val(c.right)
        if a is None or b is None:
            ok = (a is b) if c.op == "==" else (a is not b) if c.op == "!=" else False
        else:
            ok = _PY_OPS[c.op](a, b)
        if not ok:
            return False
    return True


# -- implication ------------------------------------------------------------

class _IntSet:
    """An integer interval with finitely many holes."""

    def __init__(self):
        self.lo = -math.inf
        self.hi = math.inf
        self.holes: set[int] = set()

    def restrict(self, op: str, k: int) -> None:
        if op == "<":
            self.hi = min(self.hi, k - 1)
        elif op == "<=":
            self.hi = min(self.hi, k)
        elif op == ">":
            self.lo = max(self.lo, k + 1)
        elif op == ">=":
            self.lo = max(self.lo, k)
        elif op == "==":
            self.lo = max(self.lo, k)
            self.hi = min(self.hi, k)
        else:
            self.holes.add(k)
        while self.lo in self.holes and self.lo <= self.hi:
            self.lo += 1
        while self.hi in self.holes and self.lo <= self.hi:
            self.hi -= 1

    def empty(self) -> bool:
        return self.lo > self.hi

    def contains(self, x: int) -> bool:
        return self.lo <= x <= self.hi and x not in self.holes

    def subset_of(self, other: "_IntSet") -> bool:
        if self.empty():
            return True
        if self.lo < other.lo or self.hi > other.hi:
            return False
        return not any(self.contains(h) for h in other.holes)


def _normalize(contract: Contract | None):
    """Split into per-variable integer sets and null tests, or None if outside the fragment."""
    ints: dict[str, _IntSet] = {}
    nulls: dict[str, set[str]] = {}
    if contract is None:
        return ints, nulls
    for c in contract.conjuncts:
        left, op, right = c.left, c.op, c.right
        if not isinstance(left, Var):
            left, right, op = right, left, _FLIP[op]
        if not isinstance(left, Var) or isinstance(right, Var):
            return None
        if isinstance(right, Null):
            nulls.setdefault(left.name, set()).add(op)
        else:
            ints.setdefault(left.name, _IntSet()).restrict(op, right.value)
    return ints, nulls


def in_fragment(contract: Contract | None) -> bool:
    return _normalize(contract) is not None


def implies(a: Contract | None, b: Contract | None) -> bool | None:
    """Decide ``a ⇒ b`` over the integers; ``None`` means undecidable.

    An absent contract is ``true``.  Within the fragment the answer is exact:
    every variable's admissible set under ``a`` must lie inside its set under
    ``b``.  Null tests are compared syntactically.
    """
    na, nb = _normalize(a), _normalize(b)
    if na is None or nb is None:
        return None
    ints_a, nulls_a = na
    ints_b, nulls_b = nb
    if any(s.empty() for s in ints_a.values()):
        return True
    if any({"==", "!="} <= ops for ops in nulls_a.values()):
        return True
    for var, sb in ints_b.items():
        sa = ints_a.get(var, _IntSet())
        if not sa.subset_of(sb):
            return False
    for var, ops in nulls_b.items():
        if not ops <= nulls_a.get(var, set()):
            return False
    return True
