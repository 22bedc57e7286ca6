from __future__ import annotations

import itertools
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import build
from kindc.canonical import (
    CanonicalAsset, canonical_form, contains, fully_equivalent, match_injective,
    partially_equivalent,
)
from kindc.errors import NoCanonicalTarget
from kindc.store import CanonicalizationRule, Context, Inclusion, Realization, TextualEquiv


def test_date_and_setdate_features_coincide(date_ctx):
    assert canonical_form(date_ctx, "Date.setDate") == canonical_form(date_ctx, "SetDate.writeDate")
    assert canonical_form(date_ctx, "Date.getDate") == canonical_form(date_ctx, "SetDate.readDate")
    assert canonical_form(date_ctx, "Date.setDate") != canonical_form(date_ctx, "Date.getDate")


def test_date_fully_equivalent_to_setdate(date_ctx):
    assert fully_equivalent(date_ctx, "Date", "SetDate")
    assert partially_equivalent(date_ctx, "SetDate.Requires", "Date.Provides")
    assert not partially_equivalent(date_ctx, "Date.Provides", "SetDate.Provides")


def test_reordered_parameters_are_equal(isodate_ctx):
    a = canonical_form(isodate_ctx, "ISODate.setDate.ParameterSet")
    b = canonical_form(isodate_ctx, "SetDate.setDate.ParameterSet")
    assert a == b
    assert fully_equivalent(isodate_ctx, "ISODate.setDate", "SetDate.setDate")


def test_canonical_of_canonical(date_ctx):
    for asset in ("Date", "SetDate", "SetDate.writeDate", "Date.Provides"):
        once = canonical_form(date_ctx, asset)
        assert canonical_form(date_ctx, once) == once


def test_without_rules_names_differ():
    ctx = build("date.sidl", "date_rules.kb")
    bare = build("date.sidl", auto_declare=True)
    assert fully_equivalent(ctx, "Date", "SetDate")
    assert not fully_equivalent(bare, "Date", "SetDate")


def test_precondition_is_not_structure(isodate_ctx):
    form = canonical_form(isodate_ctx, "ISODate.setDate")
    assert all(p.name != "Precondition" for p in form.parts)


def test_self_canonical_flag():
    ctx = Context().extend([Inclusion("x.a", "x")])
    form = canonical_form(ctx, "x")
    assert form.self_canonical and form.name == "x"


def test_composite_kinds_join_names():
    ctx = Context().extend([Realization("p", "B"), Realization("p", "A")])
    assert canonical_form(ctx, "p").name == "A+B"


def test_two_rule_targets_are_ambiguous():
    ctx = Context().extend([Realization("p", "A"), Realization("p", "B")])
    ctx = ctx.add_rule(CanonicalizationRule("A", "X")).add_rule(CanonicalizationRule("B", "Y"))
    with pytest.raises(NoCanonicalTarget):
        canonical_form(ctx, "p")


def test_rule_target_must_be_canonical():
    ctx = Context().add(Realization("p", "A"))
    ctx = ctx.add_rule(CanonicalizationRule("A", "B")).add_rule(CanonicalizationRule("B", "C"))
    with pytest.raises(NoCanonicalTarget):
        canonical_form(ctx, "p")


def test_conflicting_renames_in_scope():
    ctx = Context().extend([Realization("w", "W"), Inclusion("w.p", "w"), Realization("w.p", "P"),
                            Inclusion("w.p.n", "w.p"), TextualEquiv("w.p.n", "a")])
    ctx = ctx.add_rule(CanonicalizationRule("W", "W2", {"a": "b"}))
    ctx = ctx.add_rule(CanonicalizationRule("P", "P2", {"a": "c"}))
    with pytest.raises(NoCanonicalTarget):
        canonical_form(ctx, "w.p.n")


def test_match_injective():
    assert match_injective([1, 2], [2, 1, 3], lambda b, s: b == s) == [1, 0]
    assert match_injective([1, 1], [1, 2], lambda b, s: b == s) is None
    assert match_injective([], [], lambda b, s: True) == []
    # needs an augmenting path: the greedy choice for the first item must be undone
    assert match_injective(["x", "y"], ["xy", "x"], lambda b, s: s in b) == [1, 0]


# -- random trees with an independent naive model ---------------------------

KINDS = ["K0", "K1", "K2", "K3"]
LITS = ["p", "q", "r"]


@st.composite
def trees(draw, every_node_kinded=False):
    n = draw(st.integers(1, 7))
    nodes = [f"t{i}" for i in range(n)]
    parent = {nodes[i]: draw(st.none() | st.sampled_from(nodes[:i])) if i else None
              for i in range(n)}
    kind = {v: draw(st.sampled_from(KINDS) if every_node_kinded else
                    st.none() | st.sampled_from(KINDS)) for v in nodes}
    lit = {v: draw(st.none() | st.sampled_from(LITS)) for v in nodes}
    rules = {}
    for k in KINDS:
        if draw(st.booleans()):
            olds = draw(st.lists(st.sampled_from(LITS), unique=True, max_size=2))
            news = draw(st.permutations(LITS + ["s"]))[: len(olds)]
            rules[k] = (draw(st.sampled_from(["C0", "C1"])), dict(zip(olds, news)))
    return nodes, parent, kind, lit, rules


def to_context(model, rename=lambda v: v) -> Context:
    nodes, parent, kind, lit, rules = model
    facts = []
    for v in nodes:
        if parent[v]:
            facts.append(Inclusion(rename(v), rename(parent[v])))
        if kind[v]:
            facts.append(Realization(rename(v), kind[v]))
        if lit[v]:
            facts.append(TextualEquiv(rename(v), lit[v]))
    ctx = Context().extend(facts)
    for k, (target, renames) in sorted(rules.items()):
        ctx = ctx.add_rule(CanonicalizationRule(k, target, renames))
    return ctx


class Ambiguous(Exception):
    pass


def naive(model, v, env=None):
    """(name, literals, children) computed straight from the tree description."""
    nodes, parent, kind, lit, rules = model
    if env is None:
        env, chain, u = {}, [], parent[v]
        while u:
            chain.append(u)
            u = parent[u]
        for u in chain:
            env = _scope(model, u, env)
    env = _scope(model, v, env)
    k = kind[v]
    name = rules[k][0] if k in rules else (k or v)
    lits = ((env.get(lit[v], lit[v]),) if lit[v] else ())
    kids = sorted(naive(model, c, env) for c in nodes if parent[c] == v)
    return (name, lits, tuple(kids))


def _scope(model, v, env):
    kind, rules = model[2], model[4]
    k = kind[v]
    if k not in rules:
        return env
    out = dict(env)
    for a, b in rules[k][1].items():
        if out.get(a, b) != b:
            raise Ambiguous
        out[a] = b
    return out


def as_tuple(ca: CanonicalAsset):
    return (ca.name, tuple(v for _, v in ca.literals), tuple(sorted(as_tuple(p) for p in ca.parts)))


def brute_contains(big, small) -> bool:
    if big[0] != small[0] or Counter(small[1]) - Counter(big[1]):
        return False
    kids_b, kids_s = big[2], small[2]
    return any(all(brute_contains(kids_b[j], s) for s, j in zip(kids_s, perm))
               for perm in itertools.permutations(range(len(kids_b)), len(kids_s)))


def forms(model):
    ctx = to_context(model)
    out = {}
    for v in model[0]:
        try:
            out[v] = canonical_form(ctx, v)
        except NoCanonicalTarget:
            pass
    return ctx, out


@settings(max_examples=150, deadline=None)
@given(trees())
def test_canonical_matches_naive_model(model):
    ctx = to_context(model)
    for v in model[0]:
        try:
            expected = naive(model, v)
        except Ambiguous:
            with pytest.raises(NoCanonicalTarget):
                canonical_form(ctx, v)
            continue
        assert as_tuple(canonical_form(ctx, v)) == expected


@settings(max_examples=150, deadline=None)
@given(trees())
def test_canonical_idempotent(model):
    ctx, fs = forms(model)
    for f in fs.values():
        assert canonical_form(ctx, f) == f


@settings(max_examples=150, deadline=None)
@given(trees())
def test_full_equivalence_is_an_equivalence(model):
    ctx, fs = forms(model)
    vs = sorted(fs)
    eq = {(a, b): fully_equivalent(ctx, a, b) for a in vs for b in vs}
    for a in vs:
        assert eq[a, a]
    for a, b in itertools.product(vs, repeat=2):
        assert eq[a, b] == eq[b, a]
        assert eq[a, b] == (as_tuple(fs[a]) == as_tuple(fs[b]))
    for a, b, c in itertools.product(vs, repeat=3):
        if eq[a, b] and eq[b, c]:
            assert eq[a, c]


@settings(max_examples=150, deadline=None)
@given(trees())
def test_partial_equivalence_matches_embedding_search(model):
    ctx, fs = forms(model)
    vs = sorted(fs)
    pe = {}
    for a, b in itertools.product(vs, repeat=2):
        pe[a, b] = partially_equivalent(ctx, a, b)
        assert pe[a, b] == brute_contains(as_tuple(fs[b]), as_tuple(fs[a]))
        if fully_equivalent(ctx, a, b):
            assert pe[a, b] and partially_equivalent(ctx, b, a)
    for a in vs:
        assert pe[a, a]
    for a, b, c in itertools.product(vs, repeat=3):
        if pe[a, b] and pe[b, c]:
            assert pe[a, c]


@settings(max_examples=100, deadline=None)
@given(trees(every_node_kinded=True), st.randoms(use_true_random=False))
def test_order_of_declarations_is_irrelevant(model, rnd):
    nodes = model[0]
    shuffled = nodes[:]
    rnd.shuffle(shuffled)
    relabel = {v: f"u{shuffled.index(v)}" for v in nodes}
    ctx_a, fs = forms(model)
    ctx_b = to_context(model, relabel.get)
    for v, f in fs.items():
        assert canonical_form(ctx_b, relabel[v]) == f


def test_contains_handles_literal_multisets():
    big = CanonicalAsset("A", literals=(("value", "x"), ("value", "x")))
    small = CanonicalAsset("A", literals=(("value", "x"),))
    assert contains(Context(), big, small)
    assert not contains(Context(), small, big)
