"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

from __future__ import annotations

import itertools
import operator
import random
import time
from contextlib import contextmanager

import pytest
from click.testing import CliRunner
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES, GOLDEN
from generators import brute_force_bridge, random_ontology
from kindc import kbformat
from kindc.bridge import build_bridge
from kindc.canonical import canonical_form, fully_equivalent, partially_equivalent
from kindc.cli import main
from kindc.contracts import Cmp, Contract, Int, Var, implies
from kindc.errors import CycleError, NoBridge, NoCanonicalTarget
from kindc.sidl import format_component, parse_component
from kindc.store import Context, Inheritance, close
from test_canonical import to_context, trees
from test_kbformat import contexts as kb_contexts
from test_sidl import components as sidl_components
from test_store import NODES, contexts as store_contexts


@contextmanager
def criterion(capsys, number: int, title: str):
    line = f"criterion {number} FAIL: {title}"
    try:
        yield
        line = f"criterion {number} PASS: {title}"
    finally:
        with capsys.disabled():
            print(f"\n{line}")


@pytest.fixture
def cli(tmp_path, monkeypatch):
    monkeypatch.delenv("KINDC_KB", raising=False)
    runner = CliRunner()
    kb = tmp_path / "acceptance.kb"

    def invoke(*args, seed_kb=None):
        if seed_kb:
            kb.write_text((FIXTURES / seed_kb).read_text(), encoding="utf-8")
        return runner.invoke(main, ["--kb", str(kb), "--out", str(tmp_path), *args])

    invoke.dir = tmp_path
    return invoke


def golden(name: str) -> str:
    return (GOLDEN / name).read_text(encoding="utf-8")


def test_criterion_1_date_adapter(cli, capsys):
    with criterion(capsys, 1, "Date/SetDate compose, golden adapter, < 1 s"):
        start = time.perf_counter()
        kinded = cli("kind", str(FIXTURES / "date.sidl"), seed_kb="date_rules.kb")
        result = cli("compose", "Date", "SetDate")
        elapsed = time.perf_counter() - start
        assert kinded.exit_code == 0, kinded.output
        assert result.exit_code == 0, result.output
        written = (cli.dir / "SetDateToDateAdapter.gen.txt").read_text(encoding="utf-8")
        assert written == golden("SetDateToDateAdapter.gen.txt")
        assert "    public void writeDate(Integer day, Integer month, Integer year) {\n" \
               "        delegate.setDate(day, month, year);" in written
        assert "    public void readDate() {\n        delegate.getDate();" in written
        assert elapsed < 1.0


def test_criterion_2_isodate_obligations(cli, capsys):
    with criterion(capsys, 2, "ISODate/SetDate reorder, discharged and failed obligations, < 1 s"):
        start = time.perf_counter()
        assert cli("kind", str(FIXTURES / "isodate_swapped.sidl")).exit_code == 0
        swapped = cli("compose", "ISODate", "SetDate")
        elapsed = time.perf_counter() - start
        assert swapped.exit_code == 0, swapped.output
        assert "  year>1970 => year>0 : discharged" in swapped.stdout.splitlines()
        assert "  setDate -> setDate  reorder(2,1,0)" in swapped.stdout.splitlines()
        written = (cli.dir / "SetDateToISODateAdapter.gen.txt").read_text(encoding="utf-8")
        assert written == golden("SetDateToISODateAdapter.gen.txt")
        assert "delegate.setDate(year, month, day);" in written
        assert elapsed < 1.0

        (cli.dir / "acceptance.kb").unlink()
        (cli.dir / "SetDateToISODateAdapter.gen.txt").unlink()
        start = time.perf_counter()
        assert cli("kind", str(FIXTURES / "isodate.sidl")).exit_code == 0
        reversed_ = cli("compose", "ISODate", "SetDate")
        elapsed = time.perf_counter() - start
        assert reversed_.exit_code == 2
        assert "  year>0 => year>1970 : failed" in reversed_.stdout.splitlines()
        assert not (cli.dir / "SetDateToISODateAdapter.gen.txt").exists()
        assert elapsed < 1.0


def test_criterion_3_calendar_chain(cli, capsys):
    with criterion(capsys, 3, "Year -> Month -> Day -> DaysSinceJan1_1970 chain and adapter, < 1 s"):
        start = time.perf_counter()
        chain = cli("chain", "Year", "DaysSinceJan1_1970", seed_kb="ontology.kb")
        assert cli("kind", str(FIXTURES / "ontology.sidl")).exit_code == 0
        composed = cli("compose", "OffsetDate", "Calendar")
        elapsed = time.perf_counter() - start
        assert chain.exit_code == 0
        assert chain.stdout.splitlines()[0] == \
            "chain Year -> Month -> Day -> DaysSinceJan1_1970 (length 3, full)"
        assert composed.exit_code == 0, composed.output
        assert "  setDate -> setDate  chain(3)" in composed.stdout.splitlines()
        written = (cli.dir / "CalendarToOffsetDateAdapter.gen.txt").read_text(encoding="utf-8")
        assert written == golden("CalendarToOffsetDateAdapter.gen.txt")
        assert [l.strip() for l in written.splitlines() if l.strip().startswith("//")] == [
            "// Year -> Month", "// Month -> Day", "// Day -> DaysSinceJan1_1970"]
        assert elapsed < 1.0


def test_criterion_4_bridge_witness(capsys):
    with criterion(capsys, 4, "partial equivalence yields a bridge; otherwise none exists"):
        counterexamples, positives, seeds = [], 0, 300
        for seed in range(seeds):
            o = random_ontology(random.Random(seed))
            assert len(o.kinds) <= 12 and len(o.interps) + len(o.inherits) <= 20
            holds = partially_equivalent(o.ctx, o.consumer.requires, o.provider.provides)
            if holds:
                positives += 1
                try:
                    build_bridge(o.ctx, o.provider, o.consumer)
                except NoBridge:
                    counterexamples.append((seed, "build_bridge failed"))
            elif next(brute_force_bridge(o), None) is not None:
                counterexamples.append((seed, "brute force found a bridge"))
        assert counterexamples == []
        assert positives >= 20 and seeds - positives >= 20  # both branches exercised


OPS = {"<": operator.lt, "<=": operator.le, "==": operator.eq, "!=": operator.ne,
       ">=": operator.ge, ">": operator.gt}


def brute_implies(a: Contract, b: Contract) -> bool:
    def sat(c, x):
        return all(OPS[k.op](x if isinstance(k.left, Var) else k.left.value,
                             x if isinstance(k.right, Var) else k.right.value)
                   for k in c.conjuncts)
    return all(sat(b, x) for x in range(-1000, 1001) if sat(a, x))


def random_single(rng: random.Random) -> Contract:
    out = []
    for _ in range(rng.randint(1, 4)):
        c = Int(rng.randint(-50, 50))
        op = rng.choice(list(OPS))
        out.append(Cmp(Var("x"), op, c) if rng.random() < 0.8 else Cmp(c, op, Var("x")))
    return Contract(tuple(out))


def random_out_of_fragment(rng: random.Random) -> Contract:
    odd = rng.choice([Cmp(Var("x"), rng.choice(list(OPS)), Var("y")),
                      Cmp(Int(rng.randint(-50, 50)), rng.choice(list(OPS)),
                          Int(rng.randint(-50, 50)))])
    return Contract(tuple(random_single(rng).conjuncts) + (odd,))


def test_criterion_5_implication(capsys):
    with criterion(capsys, 5, "implies agrees with exhaustive evaluation; out of fragment is undecidable"):
        rng = random.Random(20240605)
        disagreements = []
        for _ in range(500):
            a, b = random_single(rng), random_single(rng)
            got = implies(a, b)
            if got is None or got != brute_implies(a, b):
                disagreements.append((str(a), str(b), got))
        assert disagreements == []
        non_boolean = []
        for i in range(200):
            a, b = random_single(rng), random_out_of_fragment(rng)
            pair = (a, b) if i % 2 else (b, a)
            if implies(*pair) is not None:
                non_boolean.append(tuple(map(str, pair)))
        assert non_boolean == []


def test_criterion_6_rule_invariants(capsys):
    with criterion(capsys, 6, "closure, canonical and equivalence invariants over >= 100 cases each"):
        counts = dict.fromkeys(["closure", "canonical", "full_equiv", "partial", "asymmetry"], 0)

        @settings(max_examples=150, deadline=None, database=None)
        @given(store_contexts(), store_contexts())
        def closure(ctx, more):
            once = close(ctx)
            assert close(Context().extend(once.assertions | once.derived)).closed_facts == \
                once.closed_facts
            assert {a.fact for a in ctx.assertions} <= once.closed_facts
            assert once.closed_facts <= close(ctx.merge(more)).closed_facts
            counts["closure"] += 1

        @settings(max_examples=150, deadline=None, database=None)
        @given(store_contexts(), st.integers(0, 6), st.integers(0, 6))
        def asymmetry(ctx, i, j):
            a, b = NODES[i], NODES[j]
            if a != b and Inheritance(a, b) in ctx.closed_facts:
                with pytest.raises(CycleError):
                    ctx.add(Inheritance(b, a))
            counts["asymmetry"] += 1

        def forms(model):
            ctx, out = to_context(model), {}
            for v in model[0]:
                try:
                    out[v] = canonical_form(ctx, v)
                except NoCanonicalTarget:
                    pass
            return ctx, out

        @settings(max_examples=150, deadline=None, database=None)
        @given(trees())
        def canonical(model):
            ctx, fs = forms(model)
            for f in fs.values():
                assert canonical_form(ctx, f) == f
            counts["canonical"] += 1

        @settings(max_examples=150, deadline=None, database=None)
        @given(trees())
        def equivalences(model):
            ctx, fs = forms(model)
            vs = sorted(fs)
            fe = {(a, b): fully_equivalent(ctx, a, b) for a in vs for b in vs}
            pe = {(a, b): partially_equivalent(ctx, a, b) for a in vs for b in vs}
            for a in vs:
                assert fe[a, a] and pe[a, a]
            for a, b in itertools.product(vs, repeat=2):
                assert fe[a, b] == fe[b, a]
            for a, b, c in itertools.product(vs, repeat=3):
                if fe[a, b] and fe[b, c]:
                    assert fe[a, c]
                if pe[a, b] and pe[b, c]:
                    assert pe[a, c]
            counts["full_equiv"] += 1
            counts["partial"] += 1

        for prop in (closure, asymmetry, canonical, equivalences):
            prop()
        assert min(counts.values()) >= 100, counts


def test_criterion_7_round_trips(capsys):
    with criterion(capsys, 7, "sidl print/parse and KB save/load round trips over >= 100 cases each"):
        counts = {"sidl": 0, "kb": 0}

        @settings(max_examples=150, deadline=None, database=None)
        @given(sidl_components())
        def sidl(decl):
            text = format_component(decl)
            assert parse_component(text) == decl
            assert format_component(parse_component(text)) == text
            counts["sidl"] += 1

        @settings(max_examples=150, deadline=None, database=None)
        @given(kb_contexts())
        def kb(ctx):
            text = kbformat.save(ctx)
            assert kbformat.load(text) == ctx
            assert kbformat.save(kbformat.load(text)) == text
            counts["kb"] += 1

        sidl()
        kb()
        assert min(counts.values()) >= 100, counts
