from __future__ import annotations

import pytest
from hypothesis import assume, given, settings

from conftest import fixture_text
from kindc.contracts import evaluate, parse_contract
from kindc.errors import ConflictError, UnboundIdentifier, UndecidableContract, UnknownKind
from kindc.kinding import (
    FeatureKind, ParamKind, check_subsumption, components, concurrency_atom, kind_component,
    read_component,
)
from kindc.sidl import format_component, parse_component, parse_components
from kindc.store import (
    ASSET_RE, CLAIM, Assertion, Atom, Context, Inclusion, Realization, TextualEquiv, holds,
)
from test_sidl import components as sidl_components


def kinded(source: str, ctx: Context | None = None, auto_declare: bool = True):
    ctx = ctx or Context()
    out = []
    for decl in parse_components(source):
        ctx, ck = kind_component(ctx, decl, auto_declare)
        out.append(ck)
    return ctx, out


def test_isoff_encoding():
    ctx, (ck,) = kinded(fixture_text("isoff.sidl"))
    m = "Debug.isOff"
    assert holds(ctx, Realization(m, Atom("Method")))
    assert holds(ctx, Inclusion(f"{m}.ParameterSet", m))
    assert holds(ctx, Inclusion(f"{m}.ReturnType", m))
    assert holds(ctx, Inclusion(f"{m}.Parameter0", f"{m}.ParameterSet"))
    assert holds(ctx, Realization(f"{m}.Parameter0", Atom("Parameter")))
    assert holds(ctx, TextualEquiv(f"{m}.Parameter0Type", "Thread"))
    assert holds(ctx, TextualEquiv(f"{m}.Parameter0Name", "thread"))
    assert holds(ctx, Inclusion(f"{m}.ConcurrencySemantics0", m))
    assert holds(ctx, TextualEquiv(f"{m}.ConcurrencySemantics0", "GuardedSemantics"))
    assert holds(ctx, TextualEquiv(f"{m}.Precondition", "thread!=null"))
    assert holds(ctx, Inclusion(f"{m}.Parameter0", m))  # through the closure
    f = ck.provided[0]
    assert f.concurrency == "GuardedSemantics"
    assert f.precondition == parse_contract("thread != null")


def test_meta_information_is_stored():
    ctx, _ = kinded(fixture_text("isoff.sidl"))
    texts = [ctx.literal(p) for p in ctx.parts("Debug.isOff") if ".Property" in p]
    assert "review reviewer - Are the isOff() methods necessary at all?" in texts
    assert "modifies QUERY" in texts


def test_zero_parameters():
    ctx, (ck,) = kinded("Class X method f(); end;")
    assert "X.f.ParameterSet" in ctx.names
    assert ctx.parts("X.f.ParameterSet") == []
    assert ck.provided[0].params == ()


def test_realizes_claim(date_ctx):
    assert Assertion(Realization("SetDate", Atom("Date")), CLAIM) in date_ctx.assertions


def test_unknown_kind():
    with pytest.raises(UnknownKind):
        kind_component(Context(), parse_component("/** @realizes Date **/ Class X end;"))
    ctx, _ = kind_component(Context(), parse_component("/** @realizes Date **/ Class X end;"),
                            auto_declare=True)
    assert ctx.realizes("X", "Date")


def test_unknown_parameter_kind():
    src = "Class X /** @realizes a Apple **/ method f(a: Integer); end;"
    with pytest.raises(UnknownKind):
        kind_component(Context(), parse_component(src))


def test_unbound_identifier():
    src = "Class X -- requires: year > 0\n method f(day: Integer); end;"
    with pytest.raises(UnboundIdentifier):
        kind_component(Context(), parse_component(src))


def test_direction_collision_rejected():
    with pytest.raises(ConflictError):
        kinded("Class X method f(); callmethod f(); end;")
    with pytest.raises(ConflictError):
        kinded("Class X method Provides(); end;")


def test_component_kind_invariants(date_ctx):
    for name in ("Date", "SetDate"):
        ck = read_component(date_ctx, name)
        assert holds(date_ctx, Inclusion(ck.provides, name))
        assert holds(date_ctx, Inclusion(ck.requires, name))
        assert holds(date_ctx, Realization(ck.provides, Atom("Provides")))
        assert holds(date_ctx, Realization(ck.requires, Atom("Requires")))
    assert components(date_ctx) == ["Date", "SetDate"]


def test_parameter_annotations(ontology_ctx):
    ck = read_component(ontology_ctx, "Calendar")
    assert [p.ontology for p in ck.required[0].params] == ["Year", "Month", "Day"]


def test_read_component_matches_kinding():
    for source in ("isoff.sidl", "isodate.sidl"):
        ctx_new, cks = kinded(fixture_text(source), Context())
        for ck in cks:
            assert read_component(ctx_new, ck.component) == ck


def test_read_unknown_component():
    with pytest.raises(UnknownKind):
        read_component(Context(), "Nope")


@settings(max_examples=100, deadline=None)
@given(sidl_components())
def test_kinding_round_trip_and_injectivity(decl):
    assume(not {m.name for m in decl.provided} & {m.name for m in decl.required})
    assume(all(ASSET_RE.fullmatch(p.value) for m in decl.provided + decl.required + (decl,)
               for p in m.properties if p.tag == "realizes"))
    ctx, ck = kind_component(Context(), decl, auto_declare=True)
    again, ck2 = kind_component(Context(), parse_component(format_component(decl)), True)
    assert again.assertions == ctx.assertions
    assert ck == ck2
    assert kind_component(ctx, decl, True)[0].assertions == ctx.assertions  # re-kinding is a no-op
    ids = [f.feature for f in ck.features]
    assert len(ids) == len(set(ids))
    assert len(ck.provided) == len(decl.provided) and len(ck.required) == len(decl.required)
    for f, m in zip(sorted(ck.provided, key=lambda f: f.name),
                    sorted(decl.provided, key=lambda m: m.name)):
        assert len(f.params) == len(m.params)
        assert len(ctx.parts(f"{f.feature}.ParameterSet")) == len(m.params)


def test_concurrency_atom():
    assert concurrency_atom("GUARDED") == "GuardedSemantics"
    assert concurrency_atom("CONCURRENT") == "ConcurrentSemantics"


# -- behavioral subsumption -------------------------------------------------

def feature(pre: str | None, params=("year",)) -> FeatureKind:
    return FeatureKind(f"X.{'_'.join(params)}", "setDate", "Provides",
                       tuple(ParamKind(f"p{i}", n, "Integer") for i, n in enumerate(params)),
                       precondition=parse_contract(pre) if pre else None)


def test_subsumption_same_contract():
    assert check_subsumption(Context(), feature("year > 0"), feature("year > 0"))


def test_subsumption_allows_weakening():
    assert check_subsumption(Context(), overriding=feature("year > 0"),
                             overridden=feature("year > 1970"))


def test_subsumption_strengthening_forbidden():
    child, parent = feature("year > 1970"), feature("year > 0")
    expected = all(evaluate(child.precondition, {"year": y})
                   for y in range(-10000, 10001) if evaluate(parent.precondition, {"year": y}))
    assert check_subsumption(Context(), child, parent) is expected is False


def test_subsumption_renames_positionally():
    child = feature("y > 0", params=("y",))
    assert check_subsumption(Context(), child, feature("year > 5"))


def test_subsumption_undecidable():
    with pytest.raises(UndecidableContract):
        check_subsumption(Context(), feature("a < b", ("a", "b")), feature("a < b", ("a", "b")))
