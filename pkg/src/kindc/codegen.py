"""Adapter planning and emission.

An adapter is a wrapper class: it exposes exactly the consumer's required
methods and forwards each call to the provider (the delegate), converting
arguments on the way and checking any contract that could not be settled
statically.
"""

from __future__ import annotations

from dataclasses import dataclass

from kindc.bridge import Reorder, SemanticBridge, flatten
from kindc.contracts import Contract, Null
from kindc.errors import UnrealizableConversion
from kindc.kinding import ComponentKind
from kindc.templates import Template, to_java

STYLES = ("java-like",)


@dataclass(frozen=True)
class PlanStep:
    output: str
    template: Template
    edge: str  # "Source -> Target" for comments and diagnostics


@dataclass(frozen=True)
class PlanMethod:
    name: str
    params: tuple[tuple[str, str], ...]  # (name, type) as the consumer declares them
    return_type: str | None
    target: str
    arguments: tuple[str, ...]
    steps: tuple[PlanStep, ...] = ()
    guards: tuple[Contract, ...] = ()
    permutation: tuple[int, ...] | None = None


@dataclass(frozen=True)
class AdapterPlan:
    adapter_name: str
    consumer: str
    delegate: str
    methods: tuple[PlanMethod, ...] = ()

    @property
    def interface(self) -> str:
        return f"{self.consumer}Requires"

    @property
    def file_name(self) -> str:
        return f"{self.adapter_name}.gen.txt"

    def manifest_line(self) -> str:
        return (f"adapter {self.adapter_name} consumer {self.consumer} "
                f"provider {self.delegate} features {len(self.methods)}")


def adapter_name(consumer: str, provider: str) -> str:
    return f"{consumer}To{provider}Adapter"


def plan_adapter(bridge: SemanticBridge, consumer: ComponentKind,
                 provider: ComponentKind) -> AdapterPlan:
    """One plan method per feature map, in the bridge's (sorted) order."""
    req = consumer.feature_map
    prov = provider.feature_map
    methods = []
    for fm in bridge.feature_maps:
        r, p = req[fm.required], prov[fm.provided]
        steps = []
        for s in fm.expr_steps:
            edge = f"{s.edge.source} -> {s.edge.target}"
            if s.template is None:
                if s.is_coercion:
                    continue
                raise UnrealizableConversion(
                    f"{r.name}: interpretation {edge} has no conversion template")
            steps.append(PlanStep(s.output, s.template, edge))
        perm = next((s.permutation for s in flatten(fm.conversion) if isinstance(s, Reorder)),
                    None)
        methods.append(PlanMethod(
            name=r.name,
            params=tuple((x.name, x.type_name) for x in r.params),
            return_type=r.return_type,
            target=p.name,
            arguments=fm.arguments,
            steps=tuple(steps),
            guards=(fm.guard,) if fm.guard is not None else (),
            permutation=perm,
        ))
    return AdapterPlan(adapter_name(bridge.consumer, bridge.provider), bridge.consumer,
                       bridge.provider, tuple(methods))


def _java_term(t) -> str:
    return "null" if isinstance(t, Null) else str(t)


def _java_cond(c: Contract) -> str:
    return " && ".join(f"{_java_term(x.left)} {x.op} {_java_term(x.right)}"
                       for x in c.conjuncts)


def _java_string(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_adapter(plan: AdapterPlan, style: str = "java-like") -> str:
    if style not in STYLES:
        raise ValueError(f"unknown adapter style {style!r}")
    name = plan.adapter_name
    out = [
        f"public class {name} implements {plan.interface} {{",
        f"    private final {plan.delegate} delegate;",
        "",
        f"    public {name}({plan.delegate} delegate) {{",
        "        this.delegate = delegate;",
        "    }",
    ]
    for m in plan.methods:
        params = ", ".join(f"{t} {n}" for n, t in m.params)
        out += ["", f"    public {m.return_type or 'void'} {m.name}({params}) {{"]
        for s in m.steps:
            out.append(f"        // {s.edge}")
            out.append(f"        var {s.output} = {to_java(s.template)};")
        for g in m.guards:
            out += [f"        if (!({_java_cond(g)})) {{",
                    f"            throw new ContractViolation({_java_string(str(g))});",
                    "        }"]
        call = f"delegate.{m.target}({', '.join(m.arguments)});"
        out.append(f"        {'return ' if m.return_type else ''}{call}")
        out.append("    }")
    out.append("}")
    return "\n".join(out) + "\n"
