"""Arithmetic conversion templates attached to interpretation edges.

A template is ``out = expr`` (or just ``expr``, in which case the output is
named after the target kind).  Expressions use integers, names, ``+ - *``,
floor division ``//`` and modulo ``%``.  Parsing goes through :mod:`ast`
with everything else rejected.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from typing import Mapping

from kindc.errors import InvalidAsset

_ASSIGN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*=(?!=)(.*)\Z", re.S)
_BINOPS = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*", ast.FloorDiv: "//", ast.Mod: "%"}
_UNARY = {ast.USub: "-", ast.UAdd: "+"}


def snake_case(kind: str) -> str:
    """``DaysSinceJan1_1970`` -> ``days_since_jan1_1970``."""
    last = kind.rsplit(".", 1)[-1]
    return re.sub(r"(?<=[a-z0-9])(?=[A-Z])", "_", last).lower()


def _check(node: ast.AST) -> None:
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        _check(node.left)
        _check(node.right)
    elif isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        _check(node.operand)
    elif isinstance(node, ast.Constant) and type(node.value) is int:
        pass
    elif isinstance(node, ast.Name):
        pass
    else:
        raise InvalidAsset(f"unsupported construct in template: {ast.dump(node)[:40]}")


@dataclass(frozen=True)
class Template:
    output: str
    expr: str

    @property
    def tree(self) -> ast.expr:
        return ast.parse(self.expr, mode="eval").body

    @property
    def inputs(self) -> tuple[str, ...]:
        seen: list[str] = []
        for node in ast.walk(self.tree):
            if isinstance(node, ast.Name) and node.id not in seen:
                seen.append(node.id)
        return tuple(sorted(seen))

    def __str__(self) -> str:
        return f"{self.output} = {self.expr}"


def parse_template(text: str, default_output: str) -> Template:
    m = _ASSIGN.match(text)
    output, body = (m.group(1), m.group(2)) if m else (default_output, text)
    try:
        tree = ast.parse(body.strip(), mode="eval").body
    except SyntaxError as e:
        raise InvalidAsset(f"bad template {text!r}: {e.msg}") from None
    _check(tree)
    return Template(output, ast.unparse(tree))


def evaluate(template: Template, env: Mapping[str, int]) -> int:
    def ev(node: ast.expr) -> int:
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.Name):
            return env[node.id]
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        a, b = ev(node.left), ev(node.right)
        op = type(node.op)
        if op is ast.Add:
            return a + b
        if op is ast.Sub:
            return a - b
        if op is ast.Mult:
            return a * b
        if op is ast.FloorDiv:
            return a // b
        return a % b

    return ev(template.tree)


_PREC = {ast.Add: 1, ast.Sub: 1, ast.Mult: 2}


def to_java(template: Template) -> str:
    """Render the expression in Java syntax; floor semantics are kept exact."""

    def go(node: ast.expr, prec: int = 0) -> str:
        if isinstance(node, ast.Constant):
            return str(node.value)
        if isinstance(node, ast.Name):
            return node.id
        if isinstance(node, ast.UnaryOp):
            text = _UNARY[type(node.op)] + go(node.operand, 3)
            return f"({text})" if prec > 2 else text
        op = type(node.op)
        if op is ast.FloorDiv:
            return f"Math.floorDiv({go(node.left)}, {go(node.right)})"
        if op is ast.Mod:
            return f"Math.floorMod({go(node.left)}, {go(node.right)})"
        p = _PREC[op]
        text = f"{go(node.left, p)} {_BINOPS[op]} {go(node.right, p + 1)}"
        return f"({text})" if p < prec else text

    return go(template.tree)
