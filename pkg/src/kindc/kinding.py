"""Encoding parsed components as kind-store assertions.

Every method becomes an instance of ``Method`` whose signature is spelled out
as parts, one asset per piece of structure::

    SetDate.writeDate                      : Method
    SetDate.writeDate.Name                 : Identifier  ≡ "writeDate"
    SetDate.writeDate.ParameterSet         : ParameterSet
    SetDate.writeDate.Parameter0           : Parameter   ⊂p ParameterSet
    SetDate.writeDate.Parameter0Type       : Type        ≡ "Integer"
    SetDate.writeDate.Parameter0Name       : Identifier  ≡ "day"
    SetDate.writeDate.ReturnType           : ReturnType  ≡ "void"

Optional parts record concurrency semantics, the precondition, parameter
ontology references (``@realizes <param> <Kind>`` on a method) and the raw
semantic properties.  Provided methods sit under ``<C>.Provides``, required
ones under ``<C>.Requires``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from kindc.contracts import Contract, implies, parse_contract, rename_vars
from kindc.errors import ConflictError, UnboundIdentifier, UndecidableContract, UnknownKind
from kindc.sidl import ComponentDecl, MethodDecl
from kindc.store import (
    CLAIM, ASSET_RE, IDENT_RE, Assertion, Atom, CanonicalizationRule, Context, Inclusion,
    KindExpr, Realization, TextualEquiv, parse_kind_expr,
)

COMPONENT_KIND = "SemanticComponent"
METHOD_KIND = "Method"
INTERFACE_KIND = "Interface"
VOID = "void"
DIRECTIONS = ("Provides", "Requires")
RESERVED = frozenset(DIRECTIONS)

_PROPERTY_RE = re.compile(r"Property\d+")


@dataclass(frozen=True)
class ParamKind:
    asset: str
    name: str
    type_name: str
    ontology: str | None = None


@dataclass(frozen=True)
class FeatureKind:
    feature: str
    name: str
    direction: str  # "Provides" | "Requires"
    params: tuple[ParamKind, ...] = ()
    return_type: str | None = None
    concurrency: str | None = None
    precondition: Contract | None = None
    realizes: tuple[KindExpr, ...] = ()

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.params)


@dataclass(frozen=True)
class ComponentKind:
    component: str
    provides: str
    requires: str
    features: tuple[FeatureKind, ...] = ()

    @property
    def provided(self) -> tuple[FeatureKind, ...]:
        return tuple(f for f in self.features if f.direction == "Provides")

    @property
    def required(self) -> tuple[FeatureKind, ...]:
        return tuple(f for f in self.features if f.direction == "Requires")

    @property
    def feature_map(self) -> dict[str, FeatureKind]:
        return {f.feature: f for f in self.features}

    def feature(self, name: str, direction: str) -> FeatureKind | None:
        for f in self.features:
            if f.name == name and f.direction == direction:
                return f
        return None


def concurrency_atom(value: str) -> str:
    """``GUARDED`` -> ``GuardedSemantics``."""
    return value.strip("()").title().replace("_", "").replace("-", "") + "Semantics"


def _check_kind(ctx: Context, kind: KindExpr, auto_declare: bool, where: str) -> None:
    if auto_declare:
        return
    for name in kind.atoms():
        if name not in ctx.names:
            raise UnknownKind(f"{where}: kind {name!r} is not declared in the knowledge base")


class _Emitter:
    def __init__(self):
        self.facts: list[Assertion] = []

    def part(self, asset: str, whole: str, kind: str, literal: str | None = None) -> None:
        self.facts.append(Assertion(Inclusion(asset, whole)))
        self.facts.append(Assertion(Realization(asset, Atom(kind))))
        if literal is not None:
            self.facts.append(Assertion(TextualEquiv(asset, literal)))


def _param_annotations(m: MethodDecl, where: str) -> tuple[dict[str, str], list[KindExpr]]:
    """Split method-level ``@realizes`` into parameter ontology refs and method kinds."""
    names = {p.name for p in m.params}
    onto: dict[str, str] = {}
    kinds: list[KindExpr] = []
    for prop in m.properties:
        if prop.tag != "realizes":
            continue
        desc = prop.description.split()
        if prop.value in names and len(desc) == 1 and ASSET_RE.fullmatch(desc[0]):
            onto[prop.value] = desc[0]
        else:
            kinds.append(parse_kind_expr(prop.value))
    return onto, kinds


def _feature(component: str, direction: str, m: MethodDecl, ctx: Context,
             auto_declare: bool) -> tuple[FeatureKind, _Emitter]:
    asset = f"{component}.{m.name}"
    where = f"{component}.{m.name}"
    if m.name in RESERVED or _PROPERTY_RE.fullmatch(m.name):
        raise ConflictError(f"{where}: method name {m.name!r} is reserved")
    onto, kinds = _param_annotations(m, where)
    for kind in [Atom(k) for k in onto.values()] + kinds:
        _check_kind(ctx, kind, auto_declare, where)
    if m.precondition is not None:
        params = {p.name for p in m.params}
        for v in m.precondition.variables():
            if v not in params:
                raise UnboundIdentifier(
                    f"{where}: contract mentions {v!r}, which is not a parameter")

    em = _Emitter()
    em.facts.append(Assertion(Inclusion(asset, f"{component}.{direction}")))
    em.facts.append(Assertion(Realization(asset, Atom(METHOD_KIND))))
    for k in kinds:
        em.facts.append(Assertion(Realization(asset, k), CLAIM))
    em.part(f"{asset}.Name", asset, "Identifier", m.name)
    pset = f"{asset}.ParameterSet"
    em.part(pset, asset, "ParameterSet")
    params = []
    for i, p in enumerate(m.params):
        pa = f"{asset}.Parameter{i}"
        em.part(pa, pset, "Parameter")
        em.part(f"{pa}Type", pa, "Type", p.type_name)
        em.part(f"{pa}Name", pa, "Identifier", p.name)
        if p.name in onto:
            em.part(f"{pa}Kind", pa, "OntologyRef", onto[p.name])
        params.append(ParamKind(pa, p.name, p.type_name, onto.get(p.name)))
    em.part(f"{asset}.ReturnType", asset, "ReturnType", m.return_type or VOID)

    concurrency = None
    for prop in m.properties:
        if prop.tag == "concurrency" and prop.value:
            concurrency = concurrency_atom(prop.value)
            em.part(f"{asset}.ConcurrencySemantics0", asset, "ConcurrencySemantics", concurrency)
            break
    if m.precondition is not None:
        em.part(f"{asset}.Precondition", asset, "Precondition", str(m.precondition))
    for i, prop in enumerate(m.properties):
        text = " ".join(s for s in (prop.tag, prop.value, prop.description) if s)
        em.part(f"{asset}.Property{i}", asset, "SemanticProperty", text)

    feature = FeatureKind(asset, m.name, direction, tuple(params), m.return_type,
                          concurrency, m.precondition, tuple(kinds))
    return feature, em


def kind_component(ctx: Context, decl: ComponentDecl,
                   auto_declare: bool = False) -> tuple[Context, ComponentKind]:
    """Encode ``decl`` into ``ctx``; returns the extended context and its image."""
    c = decl.name
    provided_names = {m.name for m in decl.provided}
    for m in decl.required:
        if m.name in provided_names:
            raise ConflictError(f"{c}.{m.name}: declared both as method and callmethod")

    facts = [Assertion(Realization(c, Atom(COMPONENT_KIND)))]
    for prop in decl.properties:
        if prop.tag == "realizes" and prop.value:
            kind = parse_kind_expr(prop.value)
            _check_kind(ctx, kind, auto_declare, c)
            facts.append(Assertion(Realization(c, kind), CLAIM))
    for direction in DIRECTIONS:
        facts.append(Assertion(Inclusion(f"{c}.{direction}", c)))
        facts.append(Assertion(Realization(f"{c}.{direction}", Atom(direction))))
    for i, prop in enumerate(decl.properties):
        text = " ".join(s for s in (prop.tag, prop.value, prop.description) if s)
        facts += [Assertion(Inclusion(f"{c}.Property{i}", c)),
                  Assertion(Realization(f"{c}.Property{i}", Atom("SemanticProperty"))),
                  Assertion(TextualEquiv(f"{c}.Property{i}", text))]

    features = []
    for direction, methods in (("Provides", decl.provided), ("Requires", decl.required)):
        for m in methods:
            feature, em = _feature(c, direction, m, ctx, auto_declare)
            features.append(feature)
            facts += em.facts

    out = ctx.extend(facts)
    for direction in DIRECTIONS:
        out = out.add_rule(CanonicalizationRule(direction, INTERFACE_KIND))
    features.sort(key=lambda f: (f.direction, f.name))
    return out, ComponentKind(c, f"{c}.Provides", f"{c}.Requires", tuple(features))


# -- reading components back from a knowledge base --------------------------

def _index(asset: str) -> int:
    return int(re.search(r"(\d+)$", asset).group(1))


def read_feature(ctx: Context, asset: str, direction: str) -> FeatureKind:
    pset = f"{asset}.ParameterSet"
    params = []
    for pa in sorted((p for p in ctx.parts(pset) if ctx.realizes(p, "Parameter")), key=_index):
        params.append(ParamKind(pa, ctx.literal(f"{pa}Name") or "",
                                ctx.literal(f"{pa}Type") or "", ctx.literal(f"{pa}Kind")))
    ret = ctx.literal(f"{asset}.ReturnType")
    pre = ctx.literal(f"{asset}.Precondition")
    kinds = tuple(k for k in ctx.realized_kinds(asset) if k != Atom(METHOD_KIND))
    return FeatureKind(
        feature=asset,
        name=ctx.literal(f"{asset}.Name") or asset.rsplit(".", 1)[-1],
        direction=direction,
        params=tuple(params),
        return_type=None if ret in (None, VOID) else ret,
        concurrency=ctx.literal(f"{asset}.ConcurrencySemantics0"),
        precondition=parse_contract(pre) if pre else None,
        realizes=kinds,
    )


def read_component(ctx: Context, name: str) -> ComponentKind:
    """Rebuild the :class:`ComponentKind` of a component already in ``ctx``."""
    if not IDENT_RE.fullmatch(name) or not ctx.realizes(name, COMPONENT_KIND):
        raise UnknownKind(f"no component named {name!r} in the knowledge base")
    features = []
    for direction in DIRECTIONS:
        whole = f"{name}.{direction}"
        for m in ctx.parts(whole):
            if ctx.realizes(m, METHOD_KIND):
                features.append(read_feature(ctx, m, direction))
    features.sort(key=lambda f: (f.direction, f.name))
    return ComponentKind(name, f"{name}.Provides", f"{name}.Requires", tuple(features))


def components(ctx: Context) -> list[str]:
    return ctx.instances_of(COMPONENT_KIND)


# -- behavioral subsumption -------------------------------------------------

def check_subsumption(ctx: Context, overriding: FeatureKind, overridden: FeatureKind) -> bool:
    """Does ``overriding`` only weaken the precondition of ``overridden``?

    Parameters are matched by position; the parent's contract is rewritten
    into the child's parameter names before testing ``parent ⇒ child``.
    """
    parent = overridden.precondition
    if parent is not None:
        parent = rename_vars(parent, dict(zip(overridden.param_names, overriding.param_names)))
    result = implies(parent, overriding.precondition)
    if result is None:
        raise UndecidableContract(
            f"cannot decide {parent or 'true'} => {overriding.precondition or 'true'}")
    return result
