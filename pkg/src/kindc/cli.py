"""The ``kindc`` command line.

Exit codes: 0 success / compatible, 1 usage or input error, 2 incompatible
(or no chain), 3 undecidable contract.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from kindc import kbformat
from kindc.bridge import Expr, Rename, Reorder, find_chain, flatten
from kindc.codegen import emit_adapter, plan_adapter
from kindc.compat import check_compatibility
from kindc.errors import KindError, SidlSyntaxError, UnrealizableConversion
from kindc.kinding import kind_component, read_component
from kindc.sidl import parse_components
from kindc.store import Assertion, CanonicalizationRule, Context

EXIT_CODES = {"compatible": 0, "incompatible": 2, "unknown": 3}


@dataclass(frozen=True)
class CliConfig:
    kb_path: Path
    max_chain_len: int = 8
    output_dir: Path = Path(".")
    strict_tags: bool = False
    json: bool = False
    auto_declare: bool = False


def _err(message: str) -> None:
    click.echo(f"error: {message}", err=True)


def _load_kb(cfg: CliConfig) -> Context:
    if not cfg.kb_path.exists():
        return Context()
    return kbformat.load(cfg.kb_path.read_text(encoding="utf-8"))


def _save_kb(cfg: CliConfig, ctx: Context) -> None:
    cfg.kb_path.write_text(kbformat.save(ctx), encoding="utf-8")


def _emit_json(data) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True))


@click.group()
@click.option("--kb", "kb_path", envvar="KINDC_KB", default="kindc.kb", show_default=True,
              type=click.Path(dir_okay=False, path_type=Path), help="Knowledge base file.")
@click.option("--max-chain", default=8, show_default=True, type=click.IntRange(min=1),
              help="Longest interpretation chain to consider.")
@click.option("--out", "output_dir", default=".", type=click.Path(file_okay=False, path_type=Path),
              help="Directory for generated adapters.")
@click.option("--strict-tags", is_flag=True, help="Treat unknown semantic property tags as errors.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.option("--auto-declare", is_flag=True, help="Accept realized kinds missing from the KB.")
@click.pass_context
def main(ctx: click.Context, kb_path, max_chain, output_dir, strict_tags, as_json, auto_declare):
    """Semantic component compatibility checker and adapter generator."""
    ctx.obj = CliConfig(kb_path, max_chain, output_dir, strict_tags, as_json, auto_declare)


# -- kind -------------------------------------------------------------------

@main.command("kind")
@click.argument("files", nargs=-1, required=True)
@click.pass_obj
def cmd_kind(cfg: CliConfig, files):
    """Parse .sidl files and add their components to the knowledge base."""
    try:
        kb = _load_kb(cfg)
    except KindError as e:
        _err(f"{cfg.kb_path}: {e}")
        sys.exit(1)
    summary = []
    for f in files:
        path = Path(f)
        if not path.is_file():
            _err(f"no such file: {f}")
            sys.exit(1)
        try:
            decls = parse_components(path.read_text(encoding="utf-8"))
        except SidlSyntaxError as e:
            _err(f"{f}:{e}")
            sys.exit(1)
        for decl in decls:
            for d in decl.diagnostics:
                click.echo(f"{f}:{d}", err=True)
            if cfg.strict_tags and decl.diagnostics:
                _err(f"{f}: unknown semantic property tags in {decl.name}")
                sys.exit(1)
            try:
                kb, ck = kind_component(kb, decl, cfg.auto_declare)
            except KindError as e:
                _err(f"{f}:{decl.line}: {e}")
                sys.exit(1)
            summary.append((ck.component, len(ck.provided), len(ck.required)))
    _save_kb(cfg, kb)
    if cfg.json:
        _emit_json({"components": [{"name": n, "provided": p, "required": r}
                                   for n, p, r in summary]})
    else:
        for n, p, r in summary:
            click.echo(f"kinded {n}: {p} provided, {r} required")


# -- check / compose ---------------------------------------------------------

def describe(conversion) -> str:
    words = []
    steps = flatten(conversion)
    for s in steps:
        if isinstance(s, Rename):
            if any(a != b for a, b in s.mapping) or len(steps) == 1:
                words.append("rename")
        elif isinstance(s, Reorder):
            words.append("reorder" + str(tuple(s.permutation)).replace(" ", ""))
    chain = [s for s in steps if isinstance(s, Expr)]
    if chain:
        words.append(f"chain({len(chain)})")
    return "+".join(words) or "identity"


def _short(asset: str) -> str:
    return asset.rsplit(".", 1)[-1]


def _run_check(cfg: CliConfig, provider: str, consumer: str):
    kb = _load_kb(cfg)
    p = read_component(kb, provider)
    c = read_component(kb, consumer)
    return kb, p, c, check_compatibility(kb, p, c, cfg.max_chain_len)


def _report(result) -> dict:
    features = []
    if result.witness is not None:
        for fm in result.witness.feature_maps:
            features.append({"required": _short(fm.required), "provided": _short(fm.provided),
                             "conversion": describe(fm.conversion),
                             "arguments": list(fm.arguments),
                             "guard": str(fm.guard) if fm.guard is not None else None})
    else:
        features = [{"required": _short(r), "provided": _short(p)} for r, p in result.matches]
    return {
        "verdict": result.verdict,
        "features": features,
        "obligations": [{"feature": _short(o.required), "antecedent": str(o.antecedent or "true"),
                         "consequent": str(o.consequent), "status": o.status}
                        for o in result.obligations],
        "diagnostics": list(result.diagnostics),
    }


def _print_report(report: dict) -> None:
    click.echo(f"verdict: {report['verdict']}")
    if report["features"]:
        click.echo("features:")
        for f in report["features"]:
            how = f"  {f['conversion']}" if "conversion" in f else ""
            click.echo(f"  {f['required']} -> {f['provided']}{how}")
    if report["obligations"]:
        click.echo("obligations:")
        for o in report["obligations"]:
            click.echo(f"  {o['antecedent']} => {o['consequent']} : {o['status']}")


def _checked(cfg: CliConfig, provider: str, consumer: str):
    try:
        return _run_check(cfg, provider, consumer)
    except KindError as e:
        _err(str(e))
        sys.exit(1)


@main.command("check")
@click.argument("provider")
@click.argument("consumer")
@click.pass_obj
def cmd_check(cfg: CliConfig, provider, consumer):
    """Decide whether CONSUMER's requirements are met by PROVIDER."""
    _, _, _, result = _checked(cfg, provider, consumer)
    report = _report(result)
    for d in result.diagnostics:
        click.echo(d, err=True)
    if cfg.json:
        _emit_json(report)
    else:
        _print_report(report)
    sys.exit(EXIT_CODES[result.verdict])


@main.command("compose")
@click.argument("provider")
@click.argument("consumer")
@click.pass_obj
def cmd_compose(cfg: CliConfig, provider, consumer):
    """Check compatibility and write the adapter for the pair."""
    _, p, c, result = _checked(cfg, provider, consumer)
    report = _report(result)
    for d in result.diagnostics:
        click.echo(d, err=True)
    if result.witness is None:
        if cfg.json:
            _emit_json(report)
        else:
            _print_report(report)
        sys.exit(EXIT_CODES[result.verdict])
    try:
        plan = plan_adapter(result.witness, c, p)
    except UnrealizableConversion as e:
        _err(str(e))
        sys.exit(2)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    target = cfg.output_dir / plan.file_name
    target.write_text(emit_adapter(plan), encoding="utf-8")
    if cfg.json:
        report["adapter"] = {"name": plan.adapter_name, "file": str(target),
                             "manifest": plan.manifest_line()}
        _emit_json(report)
    else:
        _print_report(report)
        click.echo(plan.manifest_line())
    sys.exit(0)


# -- chain ------------------------------------------------------------------

@main.command("chain")
@click.argument("source")
@click.argument("target")
@click.pass_obj
def cmd_chain(cfg: CliConfig, source, target):
    """Print the shortest interpretation chain from SOURCE to TARGET."""
    try:
        kb = _load_kb(cfg)
    except KindError as e:
        _err(str(e))
        sys.exit(1)
    chain = find_chain(kb, source, target, cfg.max_chain_len)
    if cfg.json:
        _emit_json({"from": source, "to": target, "chain": None if chain is None else {
            "length": len(chain), "full": chain.full, "kinds": list(chain.kinds),
            "edges": [{"from": e.source, "to": e.target, "kind": e.kind, "agent": e.agent}
                      for e in chain.edges]}})
    elif chain is not None:
        click.echo(f"chain {chain} (length {len(chain)}, {'full' if chain.full else 'partial'})")
        for e in chain.edges:
            click.echo(f"  {e.source} -> {e.target} {e.kind} agent {e.agent or '-'}")
    else:
        click.echo(f"no chain from {source} to {target}")
    sys.exit(0 if chain is not None else 2)


# -- kb ---------------------------------------------------------------------

@main.group("kb")
def cmd_kb():
    """Inspect or extend the knowledge base."""


@cmd_kb.command("list")
@click.pass_obj
def kb_list(cfg: CliConfig):
    try:
        kb = _load_kb(cfg)
    except KindError as e:
        _err(str(e))
        sys.exit(1)
    lines = kbformat.statement_lines(kb)
    if cfg.json:
        _emit_json({"statements": lines})
    else:
        for line in lines:
            click.echo(line)


@cmd_kb.command("add")
@click.argument("statement", nargs=-1, required=True)
@click.pass_obj
def kb_add(cfg: CliConfig, statement):
    """Add one statement, e.g. ``kindc kb add ground Day``."""
    text = " ".join(statement)
    try:
        kb = _load_kb(cfg)
        item = kbformat.parse_statement(text)
        if isinstance(item, Assertion):
            kb = kb.add(item)
        elif isinstance(item, CanonicalizationRule):
            kb = kb.add_rule(item)
        elif item[0] == "ground":
            kb = kb.add_ground(item[1])
        else:
            kb = Context(item[1], kb.assertions, kb.rules, kb.grounds)
    except (KindError, ValueError) as e:
        _err(str(e))
        sys.exit(1)
    _save_kb(cfg, kb)
    if cfg.json:
        _emit_json({"added": text})
    else:
        click.echo(f"added: {text}")
