"""Interpretation chains and semantic bridges.

:func:`find_chain` searches the closed context for the shortest sequence of
interpretation edges between two kinds.  :func:`build_bridge` turns a
compatibility verdict into per-feature conversions: a rename of the feature,
a reordering of its arguments, and expression steps for arguments that are
only reachable through an ontology chain.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Union

from kindc.canonical import canonical_form, param_link
from kindc.contracts import Contract, rename_vars
from kindc.errors import NoBridge
from kindc.kinding import ComponentKind, FeatureKind
from kindc.store import PARENT_INTERP_AGENT, Context, Interpretation
from kindc.templates import Template, parse_template, snake_case

DEFAULT_MAX_CHAIN = 8


# -- chains -----------------------------------------------------------------

@dataclass(frozen=True)
class Chain:
    edges: tuple[Interpretation, ...]
    source: str
    target: str

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        at = self.source
        for e in self.edges:
            if e.source != at:
                raise ValueError(f"chain edges do not compose at {at}")
            at = e.target
        if at != self.target:
            raise ValueError("chain does not end at its target")

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def full(self) -> bool:
        return all(e.kind == "full" for e in self.edges)

    @property
    def kinds(self) -> tuple[str, ...]:
        return (self.source,) + tuple(e.target for e in self.edges)

    def __add__(self, other: "Chain") -> "Chain":
        return Chain(self.edges + other.edges, self.source, other.target)

    def __str__(self) -> str:
        return " -> ".join(self.kinds)


def find_chain(ctx: Context, source: str, target: str, max_len: int | None = DEFAULT_MAX_CHAIN,
               full_only: bool = False) -> Chain | None:
    """Shortest chain of interpretation edges from ``source`` to ``target``.

    Ties between equally short chains go to the lexicographically least
    sequence of edges.  ``max_len=None`` lifts the length bound.
    """
    if source == target:
        return Chain((), source, target)
    edges = [e for e in ctx.interpretations if not full_only or e.kind == "full"]
    out: dict[str, list[Interpretation]] = defaultdict(list)
    back: dict[str, list[str]] = defaultdict(list)
    for e in edges:
        if e.source != e.target:
            out[e.source].append(e)
            back[e.target].append(e.source)
    # distances to the target, then a greedy walk that always takes the least edge
    dist = {target: 0}
    queue = deque([target])
    while queue:
        n = queue.popleft()
        for m in back[n]:
            if m not in dist:
                dist[m] = dist[n] + 1
                queue.append(m)
    if source not in dist or (max_len is not None and dist[source] > max_len):
        return None
    chain, at = [], source
    while at != target:
        step = min((e for e in out[at] if dist.get(e.target) == dist[at] - 1),
                   key=lambda e: e.sort_key)
        chain.append(step)
        at = step.target
    return Chain(tuple(chain), source, target)


# -- conversions ------------------------------------------------------------

@dataclass(frozen=True)
class Rename:
    mapping: tuple[tuple[str, str], ...]

    def inverse(self) -> "Rename":
        return Rename(tuple((b, a) for a, b in self.mapping))


@dataclass(frozen=True)
class Reorder:
    permutation: tuple[int, ...]  # provider position -> consumer position

    def __post_init__(self):
        if sorted(self.permutation) != list(range(len(self.permutation))):
            raise ValueError(f"{self.permutation} is not a permutation")


@dataclass(frozen=True)
class Expr:
    """One conversion step along an interpretation edge.

    ``template`` is None for edges that carry no arithmetic; inheritance
    edges are identity coercions, any other such edge cannot be realized.
    """

    output: str
    template: Template | None
    edge: Interpretation

    @property
    def is_coercion(self) -> bool:
        return self.template is None and self.edge.agent == PARENT_INTERP_AGENT


@dataclass(frozen=True)
class Composite:
    steps: tuple["ConversionSpec", ...]


ConversionSpec = Union[Rename, Reorder, Expr, Composite]


def flatten(spec: ConversionSpec) -> tuple[ConversionSpec, ...]:
    if isinstance(spec, Composite):
        return tuple(s for step in spec.steps for s in flatten(step))
    return (spec,)


@dataclass(frozen=True)
class FeatureMap:
    required: str
    provided: str
    conversion: ConversionSpec
    arguments: tuple[str, ...] = ()
    guard: Contract | None = None

    @property
    def expr_steps(self) -> tuple[Expr, ...]:
        return tuple(s for s in flatten(self.conversion) if isinstance(s, Expr))


@dataclass(frozen=True)
class SemanticBridge:
    provider: str
    consumer: str
    feature_maps: tuple[FeatureMap, ...] = field(default=())

    def map_for(self, required: str) -> FeatureMap | None:
        for fm in self.feature_maps:
            if fm.required == required:
                return fm
        return None


# -- argument resolution ----------------------------------------------------

@dataclass(frozen=True)
class ArgumentPlan:
    arguments: tuple[str, ...]         # one identifier per provider parameter
    suppliers: tuple[int, ...]         # consumer parameter index per provider parameter
    chained: frozenset[str]            # provider parameters fed through a chain
    steps: tuple[Expr, ...]
    renames: tuple[tuple[str, str], ...]  # consumer -> provider names of plain suppliers


def template_of(edge: Interpretation) -> Template | None:
    if edge.template is None:
        return None
    return parse_template(edge.template, snake_case(edge.target))


def _simulate(edges, start: str, bound: set[str]) -> tuple[list[Expr], str] | None:
    """Steps for one chain, or None when some template input is not available."""
    bound = set(bound)
    steps, current = [], start
    for e in edges:
        t = template_of(e)
        if t is None:
            if e.agent != PARENT_INTERP_AGENT:
                return None
            steps.append(Expr(current, None, e))
            continue
        if not set(t.inputs) <= bound:
            return None
        steps.append(Expr(t.output, t, e))
        bound.add(t.output)
        current = t.output
    return steps, current


def _unrealizable_steps(edges, start: str) -> tuple[list[Expr], str]:
    steps, current = [], start
    for e in edges:
        t = template_of(e)
        out = t.output if t is not None else (current if e.agent == PARENT_INTERP_AGENT
                                              else snake_case(e.target))
        steps.append(Expr(out, t, e))
        current = out
    return steps, current


def resolve_arguments(ctx: Context, required: FeatureKind, provided: FeatureKind,
                      max_len: int | None = None) -> ArgumentPlan:
    """Decide where each provider argument comes from.

    Preference per provider parameter: an identical consumer parameter, one
    of the same ontology kind, then an interpretation chain whose templates
    can all be evaluated, then the shortest chain, then the lowest index.
    """
    cons = [canonical_form(ctx, p.asset) for p in required.params]
    prov = [canonical_form(ctx, p.asset) for p in provided.params]
    bound = set(required.param_names)
    arguments, suppliers, renames = [], [], []
    chained: set[str] = set()
    steps: list[Expr] = []
    for j, want in enumerate(prov):
        links = [param_link(ctx, q, want, max_len) for q in cons]
        pname = provided.params[j].name
        plain = ([i for i, l in enumerate(links) if l == "direct"]
                 + [i for i, l in enumerate(links) if l == ()])
        if plain:
            i = plain[0]
            arguments.append(required.params[i].name)
            suppliers.append(i)
            if required.params[i].name != pname:
                renames.append((required.params[i].name, pname))
            continue
        options = []
        for i, l in enumerate(links):
            if l:
                sim = _simulate(l, required.params[i].name, bound)
                options.append((sim is None, len(l), i, l, sim))
        if not options:
            raise NoBridge(f"{provided.feature}: nothing supplies parameter {pname!r}")
        _, _, i, edges, sim = min(options, key=lambda o: o[:3])
        new_steps, result = sim if sim is not None else _unrealizable_steps(edges,
                                                                            required.params[i].name)
        for s in new_steps:
            if s not in steps:
                steps.append(s)
            if s.template is not None:
                bound.add(s.output)
        arguments.append(result)
        suppliers.append(i)
        chained.add(pname)
    return ArgumentPlan(tuple(arguments), tuple(suppliers), frozenset(chained), tuple(steps),
                        tuple(dict.fromkeys(renames)))


def feature_conversion(required: FeatureKind, provided: FeatureKind,
                       plan: ArgumentPlan) -> ConversionSpec:
    parts: list[ConversionSpec] = [Rename(((required.name, provided.name),) + plan.renames)]
    perm = plan.suppliers
    if (not plan.chained and len(perm) == len(required.params)
            and sorted(perm) == list(range(len(perm))) and list(perm) != sorted(perm)):
        parts.append(Reorder(perm))
    parts += plan.steps
    return parts[0] if len(parts) == 1 else Composite(tuple(parts))


def assemble_bridge(ctx: Context, provider: ComponentKind, consumer: ComponentKind,
                    pairs, guards: dict[str, Contract] | None = None,
                    max_len: int | None = None) -> SemanticBridge:
    """Bridge for matched ``(required, provided)`` feature pairs."""
    guards = guards or {}
    maps = []
    matched = {r.feature for r, _ in pairs}
    missing = [r.name for r in consumer.required if r.feature not in matched]
    if missing:
        raise NoBridge(f"unmapped required features: {', '.join(missing)}")
    for r, p in pairs:
        plan = resolve_arguments(ctx, r, p, max_len)
        guard = guards.get(r.feature)
        if guard is not None:
            guard = rename_vars(guard, dict(zip(p.param_names, plan.arguments)))
        maps.append(FeatureMap(r.feature, p.feature, feature_conversion(r, p, plan),
                               plan.arguments, guard))
    maps.sort(key=lambda m: m.required)
    return SemanticBridge(provider.component, consumer.component, tuple(maps))


def build_bridge(ctx: Context, provider: ComponentKind, consumer: ComponentKind,
                 max_len: int | None = None) -> SemanticBridge:
    """Re-check compatibility and return its witness; NoBridge otherwise."""
    from kindc.compat import check_compatibility

    result = check_compatibility(ctx, provider, consumer, max_len)
    if result.witness is None:
        raise NoBridge(f"{consumer.component} cannot be bridged to {provider.component} "
                       f"({result.verdict})", tuple(result.diagnostics))
    return result.witness
