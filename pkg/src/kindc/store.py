"""The assertion knowledge base.

A :class:`Context` is an immutable set of kind-theory assertions together with
the canonicalization rules and ground kinds that the rest of the package
reasons over.  Operations return new contexts; nothing is mutated in place.

Reflexivity (``x < x``, ``x ⊂p x``) and identity interpretations are never
stored.  :func:`holds` answers them directly.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Union

from kindc.errors import ConflictError, CycleError, InvalidAsset

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
ASSET_RE = re.compile(rf"{_IDENT}(?:\.{_IDENT})*")
IDENT_RE = re.compile(_IDENT)

PARENT_INTERP_AGENT = "inheritance"


def check_asset(name: str) -> str:
    if not isinstance(name, str) or not ASSET_RE.fullmatch(name):
        raise InvalidAsset(f"invalid asset id: {name!r}")
    return name


# -- kind expressions -------------------------------------------------------

COMPOSE_OPS = ("plus", "tensor", "circ")


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        check_asset(self.name)

    def atoms(self) -> tuple[str, ...]:
        return (self.name,)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Compose:
    op: str
    operands: tuple["KindExpr", ...]

    def __post_init__(self):
        if self.op not in COMPOSE_OPS:
            raise InvalidAsset(f"unknown composition operator {self.op!r}")
        object.__setattr__(self, "operands", tuple(self.operands))
        if len(self.operands) < 2:
            raise InvalidAsset("a composition needs at least two operands")

    def atoms(self) -> tuple[str, ...]:
        return tuple(a for o in self.operands for a in o.atoms())

    def __str__(self) -> str:
        return f"{self.op}({','.join(str(o) for o in self.operands)})"


KindExpr = Union[Atom, Compose]


def parse_kind_expr(text: str) -> KindExpr:
    """Parse ``Name`` or ``op(expr,expr,...)`` (no whitespace needed)."""
    src = text.strip()
    pos = 0

    def expr() -> KindExpr:
        nonlocal pos
        while pos < len(src) and src[pos].isspace():
            pos += 1
        m = ASSET_RE.match(src, pos)
        if not m:
            raise InvalidAsset(f"bad kind expression {text!r} at {pos}")
        pos = m.end()
        name = m.group(0)
        if pos < len(src) and src[pos] == "(":
            pos += 1
            operands = [expr()]
            while pos < len(src) and src[pos] == ",":
                pos += 1
                operands.append(expr())
            if pos >= len(src) or src[pos] != ")":
                raise InvalidAsset(f"unclosed composition in {text!r}")
            pos += 1
            return Compose(name, tuple(operands))
        return Atom(name)

    result = expr()
    if src[pos:].strip():
        raise InvalidAsset(f"trailing text in kind expression {text!r}")
    return result


# -- truth structures -------------------------------------------------------

@dataclass(frozen=True)
class TruthStructure:
    level: str  # "claim" | "belief"
    degree: Fraction | None = None
    author: str = ""

    def __post_init__(self):
        if self.level == "claim":
            if self.degree is not None:
                raise InvalidAsset("claims carry no belief degree")
        elif self.level == "belief":
            if self.degree is None:
                raise InvalidAsset("beliefs need a degree")
            deg = Fraction(self.degree)
            if not 0 <= deg <= 1:
                raise InvalidAsset(f"belief degree {deg} outside [0, 1]")
            object.__setattr__(self, "degree", deg)
        else:
            raise InvalidAsset(f"unknown truth level {self.level!r}")


CLAIM = TruthStructure("claim")


def belief(degree, author: str) -> TruthStructure:
    return TruthStructure("belief", Fraction(degree), author)


# -- facts ------------------------------------------------------------------

@dataclass(frozen=True)
class Realization:
    instance: str
    kind: KindExpr

    def __post_init__(self):
        check_asset(self.instance)
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", parse_kind_expr(self.kind))


@dataclass(frozen=True)
class Inheritance:
    child: str
    parent: str

    def __post_init__(self):
        check_asset(self.child)
        check_asset(self.parent)


@dataclass(frozen=True)
class Inclusion:
    part: str
    whole: str

    def __post_init__(self):
        check_asset(self.part)
        check_asset(self.whole)


@dataclass(frozen=True)
class FullEquiv:
    a: str
    b: str

    def __post_init__(self):
        check_asset(self.a)
        check_asset(self.b)


@dataclass(frozen=True)
class PartialEquiv:
    lesser: str
    greater: str

    def __post_init__(self):
        check_asset(self.lesser)
        check_asset(self.greater)


@dataclass(frozen=True)
class TextualEquiv:
    asset: str
    literal: str

    def __post_init__(self):
        check_asset(self.asset)
        if not isinstance(self.literal, str):
            raise InvalidAsset("textual equivalence binds a string literal")


@dataclass(frozen=True)
class Interpretation:
    """A directed interpretation edge; ``kind`` is ``full`` or ``partial``."""

    source: str
    target: str
    kind: str = "full"
    agent: str = ""
    context_label: str = ""
    template: str | None = None
    is_identity: bool = False

    def __post_init__(self):
        check_asset(self.source)
        check_asset(self.target)
        if self.kind not in ("full", "partial"):
            raise InvalidAsset(f"interpretation kind must be full or partial, not {self.kind!r}")
        if self.agent and not IDENT_RE.fullmatch(self.agent):
            raise InvalidAsset(f"invalid agent id {self.agent!r}")
        if self.is_identity and (self.source != self.target or self.kind != "full"):
            raise InvalidAsset("identity interpretations are full self-maps")

    @property
    def sort_key(self) -> tuple:
        return (self.source, self.target, self.kind, self.agent,
                self.context_label, self.template or "")


InterpEdge = Interpretation

Fact = Union[Realization, Inheritance, Inclusion, FullEquiv, PartialEquiv,
             TextualEquiv, Interpretation]


@dataclass(frozen=True)
class Assertion:
    fact: Fact
    provenance: TruthStructure | None = None


def as_assertion(a: Assertion | Fact) -> Assertion:
    return a if isinstance(a, Assertion) else Assertion(a)


# -- canonicalization rules -------------------------------------------------

@dataclass(frozen=True)
class CanonicalizationRule:
    source: str
    target: str
    renames: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        check_asset(self.source)
        check_asset(self.target)
        pairs = self.renames.items() if isinstance(self.renames, dict) else self.renames
        pairs = tuple(sorted((str(k), str(v)) for k, v in pairs))
        keys = [k for k, _ in pairs]
        values = [v for _, v in pairs]
        for name in keys + values:
            if not IDENT_RE.fullmatch(name):
                raise InvalidAsset(f"invalid feature name in rename: {name!r}")
        if len(set(keys)) != len(keys):
            raise ConflictError(f"rule for {self.source} renames a feature twice")
        if len(set(values)) != len(values):
            raise ConflictError(f"renames of rule for {self.source} are not injective")
        object.__setattr__(self, "renames", pairs)

    @property
    def rename_map(self) -> dict[str, str]:
        return dict(self.renames)

    @property
    def is_identity(self) -> bool:
        return self.source == self.target and not self.renames


# -- context ----------------------------------------------------------------

def _reaches(up: dict[str, set[str]], start: str, goal: str) -> bool:
    seen = {start}
    stack = [start]
    while stack:
        node = stack.pop()
        if node == goal:
            return True
        for nxt in up.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return False


@dataclass(frozen=True)
class Context:
    label: str = "kb"
    assertions: frozenset[Assertion] = frozenset()
    rules: frozenset[CanonicalizationRule] = frozenset()
    grounds: frozenset[str] = frozenset()
    derived: frozenset[Assertion] = field(default=frozenset(), compare=False)

    # -- building --

    def extend(self, items: Iterable[Assertion | Fact]) -> "Context":
        """Return a context holding ``items`` as well; validates as it goes."""
        items = [as_assertion(a) for a in items]
        if not items:
            return self
        inh = {k: set(v) for k, v in self._inherit_up.items()}
        inc = {k: set(v) for k, v in self._include_up.items()}
        bound = dict(self._literals)
        added = set(self.assertions)
        for a in items:
            fact = a.fact
            if isinstance(fact, (Inheritance, Inclusion)):
                lo, hi = ((fact.child, fact.parent) if isinstance(fact, Inheritance)
                          else (fact.part, fact.whole))
                if lo == hi:
                    continue  # reflexive, implicit
                graph = inh if isinstance(fact, Inheritance) else inc
                if hi not in graph.get(lo, ()) and _reaches(graph, hi, lo):
                    rel = "inheritance" if graph is inh else "inclusion"
                    raise CycleError(f"{rel} {lo} -> {hi} would create a cycle")
                graph.setdefault(lo, set()).add(hi)
            elif isinstance(fact, TextualEquiv):
                old = bound.get(fact.asset)
                if old is not None and old != fact.literal:
                    raise ConflictError(
                        f"{fact.asset} is already bound to {old!r}, not {fact.literal!r}")
                bound[fact.asset] = fact.literal
            added.add(a)
        return replace(self, assertions=frozenset(added), derived=frozenset())

    def add(self, a: Assertion | Fact) -> "Context":
        return self.extend([a])

    def add_rule(self, rule: CanonicalizationRule) -> "Context":
        existing = self.rule_for(rule.source)
        if existing is not None:
            if existing == rule:
                return self
            raise ConflictError(f"ambiguous canonicalization: two rules for {rule.source}")
        return replace(self, rules=self.rules | {rule}, derived=frozenset())

    def add_ground(self, kind: str) -> "Context":
        check_asset(kind)
        return replace(self, grounds=self.grounds | {kind}, derived=frozenset())

    def merge(self, other: "Context") -> "Context":
        ctx = self.extend(sorted(other.assertions, key=_assertion_key))
        for rule in sorted(other.rules, key=lambda r: r.source):
            ctx = ctx.add_rule(rule)
        for g in other.grounds:
            ctx = ctx.add_ground(g)
        return ctx

    # -- indexes over asserted (not derived) facts --

    @cached_property
    def _by_type(self) -> dict[type, list[Assertion]]:
        out: dict[type, list[Assertion]] = defaultdict(list)
        for a in self.assertions:
            out[type(a.fact)].append(a)
        return out

    def facts_of(self, cls: type) -> list:
        return [a.fact for a in self._by_type.get(cls, ())]

    @cached_property
    def _inherit_up(self) -> dict[str, set[str]]:
        up: dict[str, set[str]] = defaultdict(set)
        for f in self.facts_of(Inheritance):
            up[f.child].add(f.parent)
        return up

    @cached_property
    def _include_up(self) -> dict[str, set[str]]:
        up: dict[str, set[str]] = defaultdict(set)
        for f in self.facts_of(Inclusion):
            up[f.part].add(f.whole)
        return up

    @cached_property
    def _include_down(self) -> dict[str, list[str]]:
        down: dict[str, set[str]] = defaultdict(set)
        for f in self.facts_of(Inclusion):
            down[f.whole].add(f.part)
        return {k: sorted(v) for k, v in down.items()}

    @cached_property
    def _literals(self) -> dict[str, str]:
        return {f.asset: f.literal for f in self.facts_of(TextualEquiv)}

    @cached_property
    def _realized(self) -> dict[str, list[KindExpr]]:
        out: dict[str, set] = defaultdict(set)
        for f in self.facts_of(Realization):
            out[f.instance].add(f.kind)
        return {k: sorted(v, key=str) for k, v in out.items()}

    @cached_property
    def _rules(self) -> dict[str, CanonicalizationRule]:
        return {r.source: r for r in self.rules}

    def parts(self, whole: str) -> list[str]:
        return self._include_down.get(whole, [])

    def wholes(self, part: str) -> list[str]:
        return sorted(self._include_up.get(part, ()))

    def literal(self, asset: str) -> str | None:
        return self._literals.get(asset)

    def realized_kinds(self, instance: str) -> list[KindExpr]:
        return self._realized.get(instance, [])

    def realizes(self, instance: str, kind: str) -> bool:
        return any(kind in k.atoms() for k in self.realized_kinds(instance))

    def rule_for(self, source: str) -> CanonicalizationRule | None:
        return self._rules.get(source)

    def instances_of(self, kind: str) -> list[str]:
        return sorted(i for i, ks in self._realized.items()
                      if any(kind in k.atoms() for k in ks))

    @cached_property
    def names(self) -> frozenset[str]:
        """Every asset name mentioned anywhere in the context."""
        out: set[str] = set(self.grounds)
        for r in self.rules:
            out.update((r.source, r.target))
        for a in self.assertions:
            f = a.fact
            if isinstance(f, Realization):
                out.add(f.instance)
                out.update(f.kind.atoms())
            elif isinstance(f, TextualEquiv):
                out.add(f.asset)
            elif isinstance(f, Interpretation):
                out.update((f.source, f.target))
            else:
                out.update(getattr(f, n) for n in f.__dataclass_fields__)
        return frozenset(out)

    def sort_of(self, name: str) -> str:
        """``instance`` for anything that realizes a kind, ``kind`` otherwise."""
        return "instance" if name in self._realized else "kind"

    # -- closure --

    @cached_property
    def closed(self) -> "Context":
        return _close(self)

    @cached_property
    def closed_facts(self) -> frozenset:
        c = self.closed
        return frozenset(a.fact for a in c.assertions | c.derived)

    @cached_property
    def interpretations(self) -> tuple[Interpretation, ...]:
        """All non-identity interpretation edges of the closed context, sorted."""
        edges = {f for f in self.closed_facts
                 if isinstance(f, Interpretation) and not f.is_identity}
        return tuple(sorted(edges, key=lambda e: e.sort_key))

    def __len__(self) -> int:
        return len(self.assertions)


def _assertion_key(a: Assertion) -> tuple:
    return (type(a.fact).__name__, repr(a.fact), repr(a.provenance))


def _transitive(up: dict[str, set[str]]) -> dict[str, set[str]]:
    out = {}
    for node in sorted(up):
        seen: set[str] = set()
        stack = list(up[node])
        while stack:
            n = stack.pop()
            if n not in seen:
                seen.add(n)
                stack.extend(up.get(n, ()))
        seen.discard(node)
        out[node] = seen
    return out


def _close(ctx: Context) -> Context:
    derived: set = set()

    inh = _transitive(ctx._inherit_up)
    for child, parents in inh.items():
        for parent in parents:
            derived.add(Inheritance(child, parent))
            # parent -> child preserves all structure; child -> parent forgets some
            derived.add(Interpretation(parent, child, "full", PARENT_INTERP_AGENT, ctx.label))
            derived.add(Interpretation(child, parent, "partial", PARENT_INTERP_AGENT, ctx.label))
            derived.add(Interpretation(parent, parent, "full", PARENT_INTERP_AGENT, ctx.label,
                                       is_identity=True))

    for part, wholes in _transitive(ctx._include_up).items():
        for whole in wholes:
            derived.add(Inclusion(part, whole))

    pe_up: dict[str, set[str]] = defaultdict(set)
    for f in ctx.facts_of(PartialEquiv):
        if f.lesser != f.greater:
            pe_up[f.lesser].add(f.greater)
    for lo, his in _transitive(pe_up).items():
        for hi in his:
            derived.add(PartialEquiv(lo, hi))

    # full equivalence: symmetric-transitive closure via connected classes
    adj: dict[str, set[str]] = defaultdict(set)
    for f in ctx.facts_of(FullEquiv):
        if f.a != f.b:
            adj[f.a].add(f.b)
            adj[f.b].add(f.a)
    seen: set[str] = set()
    for start in sorted(adj):
        if start in seen:
            continue
        comp, stack = set(), [start]
        while stack:
            n = stack.pop()
            if n not in comp:
                comp.add(n)
                stack.extend(adj[n])
        seen |= comp
        for a in comp:
            for b in comp:
                if a != b:
                    derived.add(FullEquiv(a, b))

    # composite realization makes the instance a member of every operand kind
    for f in ctx.facts_of(Realization):
        if isinstance(f.kind, Compose):
            for name in f.kind.atoms():
                derived.add(Realization(f.instance, Atom(name)))

    base = {a.fact for a in ctx.assertions}
    extra = frozenset(Assertion(f) for f in derived if f not in base)
    closed = replace(ctx, derived=extra)
    closed.__dict__["closed"] = closed
    return closed


# -- module-level API -------------------------------------------------------

def assert_(ctx: Context, a: Assertion | Fact) -> Context:
    """Add one assertion; raises CycleError / ConflictError."""
    return ctx.add(a)


def close(ctx: Context) -> Context:
    """The context plus everything derivable from it (held in ``derived``)."""
    return ctx.closed


def holds(ctx: Context, a: Assertion | Fact) -> bool:
    fact = a.fact if isinstance(a, Assertion) else a
    if isinstance(fact, Inheritance) and fact.child == fact.parent:
        return True
    if isinstance(fact, Inclusion) and fact.part == fact.whole:
        return True
    if isinstance(fact, FullEquiv) and fact.a == fact.b:
        return True
    if isinstance(fact, PartialEquiv) and fact.lesser == fact.greater:
        return True
    facts = ctx.closed_facts
    if isinstance(fact, Interpretation):
        if fact.source == fact.target and fact.kind == "full" and not fact.agent:
            return True  # identity is defined everywhere
        wanted = ("full",) if fact.kind == "full" else ("full", "partial")
        for f in facts:
            if (isinstance(f, Interpretation) and f.source == fact.source
                    and f.target == fact.target and f.kind in wanted
                    and (not fact.agent or f.agent == fact.agent)
                    and (fact.template is None or f.template == fact.template)
                    and (not fact.is_identity or f.is_identity)):
                return True
        return False
    return fact in facts
