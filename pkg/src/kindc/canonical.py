"""Canonical forms, full and partial equivalence.

The canonical form of an asset is built from its inclusion tree.  Each node
takes its canonical name from the canonicalization rule that applies to it
(a rule keyed by the asset's own name wins over rules of the kinds it
realizes), falling back to the names of its realized kinds, and finally to
its own name ("self-canonical").  Literal bindings become ``("value", text)``
slots, rewritten by the rename maps of every rule in scope.  Parts are an
unordered multiset, so permuting declarations never changes the result.

Parts that realize an inert kind (contracts, documentation-only properties)
are left out; contracts are compared by implication instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from kindc.errors import NoCanonicalTarget
from kindc.store import Atom, CanonicalizationRule, Context, KindExpr

LITERAL_SLOT = "value"
PARAMETER_SET = "ParameterSet"
ONTOLOGY_REF = "OntologyRef"
INERT_KINDS = frozenset({"Precondition", "SemanticProperty"})


@dataclass(frozen=True)
class CanonicalAsset:
    name: str
    parts: tuple["CanonicalAsset", ...] = ()
    literals: tuple[tuple[str, str], ...] = ()
    self_canonical: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(sorted(self.parts, key=lambda p: p.key)))
        object.__setattr__(self, "literals", tuple(sorted(self.literals)))

    @property
    def key(self) -> tuple:
        k = self.__dict__.get("_key")
        if k is None:
            k = (self.name, self.literals, tuple(p.key for p in self.parts))
            object.__setattr__(self, "_key", k)
        return k

    def __hash__(self) -> int:
        return hash(self.key)

    def __eq__(self, other) -> bool:
        return isinstance(other, CanonicalAsset) and self.key == other.key

    def literal(self) -> str | None:
        return self.literals[0][1] if self.literals else None

    def part(self, name: str) -> "CanonicalAsset | None":
        for p in self.parts:
            if p.name == name:
                return p
        return None

    def pretty(self, indent: int = 0) -> str:
        lits = "".join(f" {s}={v!r}" for s, v in self.literals)
        lines = [" " * indent + self.name + lits]
        lines += [p.pretty(indent + 2) for p in self.parts]
        return "\n".join(lines)


# -- rule lookup ------------------------------------------------------------

def _checked(ctx: Context, rule: CanonicalizationRule) -> CanonicalizationRule:
    target_rule = ctx.rule_for(rule.target)
    if target_rule is not None and not target_rule.is_identity and target_rule is not rule:
        raise NoCanonicalTarget(
            f"rule {rule.source} -> {rule.target}: target is not canonical "
            f"(it has its own rule to {target_rule.target})")
    if rule.source == rule.target and rule.renames:
        raise NoCanonicalTarget(f"self-rule for {rule.source} may not rename features")
    return rule


def _applicable(ctx: Context, asset: str) -> tuple[CanonicalizationRule | None,
                                                     list[CanonicalizationRule]]:
    own = ctx.rule_for(asset)
    via_kinds = []
    for k in ctx.realized_kinds(asset):
        if isinstance(k, Atom):
            r = ctx.rule_for(k.name)
            if r is not None and r is not own:
                via_kinds.append(r)
    return (own and _checked(ctx, own)), [_checked(ctx, r) for r in via_kinds]


def _merge_env(env: dict[str, str], rules, asset: str) -> dict[str, str]:
    out = dict(env)
    for rule in rules:
        for old, new in rule.renames:
            if out.get(old, new) != new:
                raise NoCanonicalTarget(
                    f"conflicting renames for {old!r} in scope of {asset}: "
                    f"{out[old]!r} vs {new!r}")
            out[old] = new
    return out


def _kind_name(ctx: Context, kind: KindExpr) -> str:
    if isinstance(kind, Atom):
        rule = ctx.rule_for(kind.name)
        return _checked(ctx, rule).target if rule else kind.name
    return f"{kind.op}({','.join(_kind_name(ctx, o) for o in kind.operands)})"


def _name(ctx: Context, asset: str, own, via_kinds) -> tuple[str, bool]:
    if own is not None:
        return own.target, False
    if via_kinds:
        targets = sorted({r.target for r in via_kinds})
        if len(targets) > 1:
            raise NoCanonicalTarget(
                f"{asset} has several canonicalization targets: {', '.join(targets)}")
        return targets[0], False
    kinds = ctx.realized_kinds(asset)
    if kinds:
        return "+".join(sorted({_kind_name(ctx, k) for k in kinds})), True
    return asset, True


def is_inert(ctx: Context, asset: str) -> bool:
    return any(a in INERT_KINDS for k in ctx.realized_kinds(asset) for a in k.atoms())


def _ancestors(ctx: Context, asset: str) -> list[str]:
    seen: list[str] = []
    stack = list(ctx.wholes(asset))
    while stack:
        w = stack.pop()
        if w not in seen:
            seen.append(w)
            stack.extend(ctx.wholes(w))
    return sorted(seen)


def inherited_renames(ctx: Context, asset: str) -> dict[str, str]:
    env: dict[str, str] = {}
    for anc in _ancestors(ctx, asset):
        own, via = _applicable(ctx, anc)
        env = _merge_env(env, ([own] if own else []) + via, anc)
    return env


def _cache(ctx: Context) -> dict:
    return ctx.__dict__.setdefault("_canonical_cache", {})


def _canon(ctx: Context, asset: str, env: dict[str, str]) -> CanonicalAsset:
    key = (asset, tuple(sorted(env.items())))
    cache = _cache(ctx)
    hit = cache.get(key)
    if hit is not None:
        return hit
    own, via = _applicable(ctx, asset)
    env = _merge_env(env, ([own] if own else []) + via, asset)
    name, self_canonical = _name(ctx, asset, own, via)
    lit = ctx.literal(asset)
    literals = ((LITERAL_SLOT, env.get(lit, lit)),) if lit is not None else ()
    parts = tuple(_canon(ctx, p, env) for p in ctx.parts(asset) if not is_inert(ctx, p))
    result = CanonicalAsset(name, parts, literals, self_canonical)
    cache[key] = result
    return result


def _recanon(ctx: Context, ca: CanonicalAsset) -> CanonicalAsset:
    rule = ctx.rule_for(ca.name)
    name = _checked(ctx, rule).target if rule is not None else ca.name
    return CanonicalAsset(name, tuple(_recanon(ctx, p) for p in ca.parts), ca.literals,
                          ca.self_canonical)


def canonical_form(ctx: Context, asset: str | CanonicalAsset) -> CanonicalAsset:
    """The canonical form of an asset (or of an already canonical form)."""
    if isinstance(asset, CanonicalAsset):
        return _recanon(ctx, asset)
    return _canon(ctx, asset, inherited_renames(ctx, asset))


# -- containment ------------------------------------------------------------

def match_injective(small: Sequence, big: Sequence,
                    fits: Callable[[object, object], bool]) -> list[int] | None:
    """Assign each ``small[i]`` a distinct ``big[j]`` with ``fits(big[j], small[i])``.

    Returns the chosen big indices, or None when no such assignment exists.
    Augmenting paths (Kuhn); candidates are tried in index order so the
    answer is deterministic.
    """
    if len(small) > len(big):
        return None
    cand = [[j for j, b in enumerate(big) if fits(b, s)] for s in small]
    owner: dict[int, int] = {}

    def augment(i: int, seen: set[int]) -> bool:
        for j in cand[i]:
            if j in seen:
                continue
            seen.add(j)
            if j not in owner or augment(owner[j], seen):
                owner[j] = i
                return True
        return False

    for i in range(len(small)):
        if not augment(i, set()):
            return None
    chosen = [0] * len(small)
    for j, i in owner.items():
        chosen[i] = j
    return chosen


def _multiset_le(small, big) -> bool:
    pool = list(big)
    for item in small:
        if item not in pool:
            return False
        pool.remove(item)
    return True


def ontology_kind(param: CanonicalAsset) -> str | None:
    ref = param.part(ONTOLOGY_REF)
    return ref.literal() if ref is not None else None


def param_link(ctx: Context, supplier: CanonicalAsset, wanted: CanonicalAsset,
               max_len: int | None = None, *, chain_search=None):
    """How a consumer parameter can feed a provider parameter.

    ``"direct"`` when their canonical forms agree, a (possibly empty) chain of
    full interpretations between their ontology kinds otherwise, or None.
    Non-trivial chains need at least one ground in the context.
    """
    if supplier == wanted:
        return "direct"
    ks, kw = ontology_kind(supplier), ontology_kind(wanted)
    if ks is None or kw is None:
        return None
    if ks == kw:
        return ()
    if not ctx.grounds:
        return None
    if chain_search is None:
        from kindc.bridge import find_chain as chain_search
    chain = chain_search(ctx, ks, kw, max_len, full_only=True)
    return None if chain is None else chain.edges


def parameters_supplied(ctx: Context, consumer: Sequence[CanonicalAsset],
                        provider: Sequence[CanonicalAsset], max_len: int | None = None) -> bool:
    """Every provider parameter can be fed from some consumer parameter."""
    return all(any(param_link(ctx, q, p, max_len) is not None for q in consumer)
               for p in provider)


def contains(ctx: Context, big: CanonicalAsset, small: CanonicalAsset,
             max_len: int | None = None) -> bool:
    """Structural containment ``big ⊃ small`` in context ``ctx``.

    Recursive multiset inclusion, except that parameter sets are compared by
    supply: each parameter of ``big`` must be obtainable from one of
    ``small``'s, directly or through an interpretation chain.
    """
    if small.name != big.name or not _multiset_le(small.literals, big.literals):
        return False
    if small.name == PARAMETER_SET:
        return parameters_supplied(ctx, small.parts, big.parts, max_len)
    return match_injective(small.parts, big.parts,
                           lambda b, s: contains(ctx, b, s, max_len)) is not None


def fully_equivalent(ctx: Context, u: str, v: str) -> bool:
    return canonical_form(ctx, u) == canonical_form(ctx, v)


def partially_equivalent(ctx: Context, u: str, v: str, max_len: int | None = None) -> bool:
    """True iff the canonical form of ``v`` structurally contains that of ``u``."""
    return contains(ctx, canonical_form(ctx, v), canonical_form(ctx, u), max_len)
