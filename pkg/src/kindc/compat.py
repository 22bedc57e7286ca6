"""Semantic compatibility and equivalence of components.

A consumer fits a provider when the canonical form of its ``Requires`` part
is contained in the canonical form of the provider's ``Provides`` part, and
for every matched feature the consumer's precondition implies the
provider's.  The bridge built from the matching is returned as the witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from kindc.bridge import SemanticBridge, assemble_bridge, resolve_arguments
from kindc.canonical import canonical_form, contains, fully_equivalent, match_injective, \
    partially_equivalent
from kindc.contracts import Contract, implies, rename_vars
from kindc.errors import NoBridge
from kindc.kinding import ComponentKind, FeatureKind
from kindc.store import Context

__all__ = ["Obligation", "CompatibilityResult", "check_compatibility",
           "semantically_equivalent", "implies"]

DISCHARGED = "discharged"
FAILED = "failed"
UNDECIDABLE = "undecidable"
GUARDED = "guarded"


@dataclass(frozen=True)
class Obligation:
    """``antecedent ⇒ consequent`` for one matched feature pair.

    The antecedent is the consumer's precondition written in the provider's
    parameter names.  ``guarded`` obligations are not decided statically and
    become runtime checks in the adapter.
    """

    required: str
    provided: str
    antecedent: Contract | None
    consequent: Contract
    status: str

    def __str__(self) -> str:
        return f"{self.antecedent or 'true'} => {self.consequent} : {self.status}"


@dataclass(frozen=True)
class CompatibilityResult:
    verdict: str  # "compatible" | "incompatible" | "unknown"
    witness: SemanticBridge | None = None
    obligations: tuple[Obligation, ...] = ()
    diagnostics: tuple[str, ...] = ()
    matches: tuple[tuple[str, str], ...] = field(default=())

    @property
    def compatible(self) -> bool:
        return self.verdict == "compatible"


def _obligation(ctx: Context, r: FeatureKind, p: FeatureKind,
                max_len: int | None) -> Obligation | None:
    if p.precondition is None:
        return None
    plan = resolve_arguments(ctx, r, p, max_len)
    to_provider = {r.params[i].name: p.params[j].name
                   for j, i in enumerate(plan.suppliers) if p.params[j].name not in plan.chained}
    antecedent = rename_vars(r.precondition, to_provider) if r.precondition else None
    if r.precondition is None or set(p.precondition.variables()) & plan.chained:
        status = GUARDED
    else:
        decided = implies(antecedent, p.precondition)
        status = UNDECIDABLE if decided is None else DISCHARGED if decided else FAILED
    return Obligation(r.feature, p.feature, antecedent, p.precondition, status)


def check_compatibility(ctx: Context, provider: ComponentKind, consumer: ComponentKind,
                        max_len: int | None = None) -> CompatibilityResult:
    big = canonical_form(ctx, provider.provides)
    small = canonical_form(ctx, consumer.requires)
    required, provided = list(consumer.required), list(provider.provided)
    if not contains(ctx, big, small, max_len):
        diags = []
        provided_forms = [canonical_form(ctx, p.feature) for p in provided]
        for r in required:
            form = canonical_form(ctx, r.feature)
            if not any(contains(ctx, b, form, max_len) for b in provided_forms):
                diags.append(f"no provided feature of {provider.component} "
                             f"matches required {r.name}")
        if not diags:
            diags.append("required features cannot be matched one-to-one")
        return CompatibilityResult("incompatible", diagnostics=tuple(diags))

    small_forms = [canonical_form(ctx, r.feature) for r in required]
    big_forms = [canonical_form(ctx, p.feature) for p in provided]
    chosen = match_injective(small_forms, big_forms, lambda b, s: contains(ctx, b, s, max_len))
    if chosen is None:  # cannot happen when the containment above succeeded
        raise NoBridge("feature matching disagrees with containment")
    pairs = [(r, provided[j]) for r, j in zip(required, chosen)]

    obligations = []
    for r, p in pairs:
        ob = _obligation(ctx, r, p, max_len)
        if ob is not None:
            obligations.append(ob)
    matches = tuple((r.feature, p.feature) for r, p in pairs)
    statuses = {o.status for o in obligations}
    if FAILED in statuses:
        diags = tuple(f"{o.required}: precondition {o.antecedent or 'true'} does not imply "
                      f"{o.consequent}" for o in obligations if o.status == FAILED)
        return CompatibilityResult("incompatible", None, tuple(obligations), diags, matches)
    if UNDECIDABLE in statuses:
        diags = tuple(f"{o.required}: cannot decide {o.antecedent or 'true'} => {o.consequent}"
                      for o in obligations if o.status == UNDECIDABLE)
        return CompatibilityResult("unknown", None, tuple(obligations), diags, matches)
    guards = {o.required: o.consequent for o in obligations if o.status == GUARDED}
    witness = assemble_bridge(ctx, provider, consumer, pairs, guards, max_len)
    return CompatibilityResult("compatible", witness, tuple(obligations), (), matches)


def semantically_equivalent(ctx: Context, i: str, j: str) -> bool:
    return fully_equivalent(ctx, i, j)


def requires_fits(ctx: Context, provider: ComponentKind, consumer: ComponentKind,
                  max_len: int | None = None) -> bool:
    """The containment test alone, ignoring contracts."""
    return partially_equivalent(ctx, consumer.requires, provider.provides, max_len)
