"""Line-oriented text serialization of contexts.

::

    kindkb 1
    canon SetDate -> Date { readDate=getDate, writeDate=setDate }
    ground Day
    inherit PaperbackBook Book
    interp Day DaysSinceJan1_1970 full agent calendar template "days_since_jan1_1970 = day_count - 719468"
    realize SetDate Date claim
    textequiv Debug.isOff.Parameter0Name "thread" belief 3/4 by reviewer

Literals and templates are JSON string literals.  Only asserted facts are
written; the closure is recomputed on load.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from kindc.errors import KbParseError, KindError, VersionMismatch
from kindc.store import (
    Assertion, CanonicalizationRule, Context, FullEquiv, Inclusion, Inheritance,
    Interpretation, PartialEquiv, Realization, TextualEquiv, TruthStructure, parse_kind_expr,
)

VERSION = 1
HEADER = f"kindkb {VERSION}"
NO_AGENT = "-"

_STR = r'"(?:[^"\\]|\\.)*"'
_SUFFIX = re.compile(rf"^(.*?)(?:\s+(claim|belief\s+(\d+)/(\d+)\s+by\s+({_STR}|\S+)))?\s*$")
_BODIES = {
    "inherit": re.compile(r"(\S+)\s+(\S+)"),
    "include": re.compile(r"(\S+)\s+(\S+)"),
    "realize": re.compile(r"(\S+)\s+(\S+)"),
    "equiv": re.compile(r"(\S+)\s+(\S+)"),
    "pequiv": re.compile(r"(\S+)\s+(\S+)"),
    "textequiv": re.compile(rf"(\S+)\s+({_STR})"),
    "interp": re.compile(rf"(\S+)\s+(\S+)\s+(full|partial)\s+agent\s+(\S+)"
                         rf"(?:\s+template\s+({_STR}))?(?:\s+context\s+({_STR}))?(\s+identity)?"),
    "canon": re.compile(r"(\S+)\s+->\s+(\S+)\s+\{(.*)\}"),
    "ground": re.compile(r"(\S+)"),
    "label": re.compile(rf"({_STR})"),
}
_PAIR = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*([A-Za-z_][A-Za-z0-9_]*)\s*")


def _q(text: str) -> str:
    return json.dumps(text)


def _fact_line(fact) -> str:
    if isinstance(fact, Inheritance):
        return f"inherit {fact.child} {fact.parent}"
    if isinstance(fact, Inclusion):
        return f"include {fact.part} {fact.whole}"
    if isinstance(fact, Realization):
        return f"realize {fact.instance} {fact.kind}"
    if isinstance(fact, FullEquiv):
        return f"equiv {fact.a} {fact.b}"
    if isinstance(fact, PartialEquiv):
        return f"pequiv {fact.lesser} {fact.greater}"
    if isinstance(fact, TextualEquiv):
        return f"textequiv {fact.asset} {_q(fact.literal)}"
    line = f"interp {fact.source} {fact.target} {fact.kind} agent {fact.agent or NO_AGENT}"
    if fact.template is not None:
        line += f" template {_q(fact.template)}"
    if fact.context_label:
        line += f" context {_q(fact.context_label)}"
    if fact.is_identity:
        line += " identity"
    return line


def _suffix(prov: TruthStructure | None) -> str:
    if prov is None:
        return ""
    if prov.level == "claim":
        return " claim"
    d = prov.degree
    author = prov.author if re.fullmatch(r'[^\s"]+', prov.author) else _q(prov.author)
    return f" belief {d.numerator}/{d.denominator} by {author}"


def statement_lines(ctx: Context) -> list[str]:
    lines = [_fact_line(a.fact) + _suffix(a.provenance) for a in ctx.assertions]
    for r in ctx.rules:
        body = ", ".join(f"{a}={b}" for a, b in r.renames)
        lines.append(f"canon {r.source} -> {r.target} {{ {body} }}" if body
                     else f"canon {r.source} -> {r.target} {{ }}")
    lines += [f"ground {g}" for g in ctx.grounds]
    if ctx.label != "kb":
        lines.append(f"label {_q(ctx.label)}")
    return sorted(set(lines), key=lambda s: (s.split(" ", 1)[0], s))


def save(ctx: Context) -> str:
    return "\n".join([HEADER] + statement_lines(ctx)) + "\n"


# -- loading ----------------------------------------------------------------

def _provenance(m: re.Match) -> TruthStructure | None:
    if m.group(2) is None:
        return None
    if m.group(2) == "claim":
        return TruthStructure("claim")
    author = m.group(5)
    if author.startswith('"'):
        author = json.loads(author)
    return TruthStructure("belief", Fraction(int(m.group(3)), int(m.group(4))), author)


def parse_statement(text: str):
    """One statement -> Assertion, CanonicalizationRule, ``("ground", k)`` or ``("label", s)``."""
    sm = _SUFFIX.match(text.strip())
    body, prov = sm.group(1), _provenance(sm)
    keyword, _, rest = body.partition(" ")
    pattern = _BODIES.get(keyword)
    if pattern is None:
        raise ValueError(f"unknown statement {keyword!r}")
    m = pattern.fullmatch(rest.strip())
    if m is None:
        raise ValueError(f"malformed {keyword} statement")
    g = m.groups()
    if keyword in ("canon", "ground", "label") and prov is not None:
        raise ValueError(f"{keyword} statements take no truth structure")
    if keyword == "canon":
        inner = g[2].strip()
        pairs = []
        if inner:
            for item in inner.split(","):
                pm = _PAIR.fullmatch(item)
                if pm is None:
                    raise ValueError(f"bad rename {item.strip()!r}")
                pairs.append((pm.group(1), pm.group(2)))
        if len(dict(pairs)) != len(pairs):
            raise ValueError("a feature is renamed twice")
        return CanonicalizationRule(g[0], g[1], tuple(pairs))
    if keyword == "ground":
        return ("ground", g[0])
    if keyword == "label":
        return ("label", json.loads(g[0]))
    if keyword == "inherit":
        fact = Inheritance(g[0], g[1])
    elif keyword == "include":
        fact = Inclusion(g[0], g[1])
    elif keyword == "realize":
        fact = Realization(g[0], parse_kind_expr(g[1]))
    elif keyword == "equiv":
        fact = FullEquiv(g[0], g[1])
    elif keyword == "pequiv":
        fact = PartialEquiv(g[0], g[1])
    elif keyword == "textequiv":
        fact = TextualEquiv(g[0], json.loads(g[1]))
    else:
        fact = Interpretation(g[0], g[1], g[2], "" if g[3] == NO_AGENT else g[3],
                              json.loads(g[5]) if g[5] else "",
                              json.loads(g[4]) if g[4] else None, bool(g[6]))
    return Assertion(fact, prov)


def load(text: str) -> Context:
    lines = [l.rstrip("\r") for l in text.split("\n")]
    first = next((i for i, l in enumerate(lines) if l.strip() and not l.lstrip().startswith("#")),
                 None)
    if first is None:
        raise VersionMismatch("missing 'kindkb' header")
    head = lines[first].split()
    if len(head) != 2 or head[0] != "kindkb":
        raise VersionMismatch(f"line {first + 1}: missing 'kindkb' header")
    if head[1] != str(VERSION):
        raise VersionMismatch(f"unsupported knowledge base version {head[1]} (expected {VERSION})")

    items: list[tuple[int, object]] = []
    for no, line in enumerate(lines[first + 1:], start=first + 2):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            items.append((no, parse_statement(line)))
        except (ValueError, KindError) as e:
            raise KbParseError(str(e), no) from None

    assertions = [(no, x) for no, x in items if isinstance(x, Assertion)]
    ctx = Context()
    try:
        ctx = ctx.extend([a for _, a in assertions])
    except KindError:
        ctx = Context()
        for no, a in assertions:  # redo one at a time to find the offending line
            try:
                ctx = ctx.add(a)
            except KindError as e:
                raise KbParseError(str(e), no) from None
    for no, x in items:
        try:
            if isinstance(x, CanonicalizationRule):
                ctx = ctx.add_rule(x)
            elif isinstance(x, tuple) and x[0] == "ground":
                ctx = ctx.add_ground(x[1])
            elif isinstance(x, tuple):
                ctx = Context(x[1], ctx.assertions, ctx.rules, ctx.grounds)
        except KindError as e:
            raise KbParseError(str(e), no) from None
    return ctx
