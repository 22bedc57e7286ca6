from __future__ import annotations

from pathlib import Path

import pytest

from kindc import kbformat
from kindc.kinding import kind_component, read_component
from kindc.sidl import parse_components
from kindc.store import Context

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def build(sidl: str, kb: str | None = None, auto_declare: bool = False) -> Context:
    """Kind every component of a fixture file into a (possibly preloaded) context."""
    ctx = kbformat.load(fixture_text(kb)) if kb else Context()
    for decl in parse_components(fixture_text(sidl)):
        ctx, _ = kind_component(ctx, decl, auto_declare)
    return ctx


@pytest.fixture
def date_ctx():
    return build("date.sidl", "date_rules.kb")


@pytest.fixture
def isodate_ctx():
    return build("isodate.sidl")


@pytest.fixture
def swapped_ctx():
    return build("isodate_swapped.sidl")


@pytest.fixture
def ontology_ctx():
    return build("ontology.sidl", "ontology.kb")


def pair(ctx: Context, provider: str, consumer: str):
    return read_component(ctx, provider), read_component(ctx, consumer)
