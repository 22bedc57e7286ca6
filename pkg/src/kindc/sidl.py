"""Parser and printer for the semantic IDL.

A ``.sidl`` file holds one or more components::

    /** @realizes Date **/
    Class SetDate
        -- requires: year > 0
        callmethod writeDate(day: Integer; month: Integer; year: Integer);
        callmethod readDate();
    end;

``method`` declares a provided feature, ``callmethod`` a required one.
``end;``, ``EndClass`` and ``EndType`` all close a component.  Documentation
comments (``/** ... **/``) carry semantic properties (``@tag value text``) and
attach to the following component or method.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from kindc.contracts import Contract, conjoin, parse_contract
from kindc.errors import ContractSyntaxError, SidlSyntaxError, UnknownKeyword

TAGS = (
    # meta-information
    "author", "bon", "bug", "copyright", "description", "history", "license", "title",
    # dependencies
    "references", "use",
    # inheritance
    "hides", "overrides", "realizes",
    # contracts
    "ensure", "generate", "invariant", "modifies", "require",
    # concurrency
    "concurrency",
    # usage
    "param", "return", "exception",
    # pending work
    "idea", "review", "todo",
    # versioning
    "version", "deprecated", "since",
    # documentation
    "design", "equivalent", "example", "see",
    # miscellaneous
    "guard", "values", "time-complexity", "space-complexity",
)
TAG_SET = frozenset(TAGS)

KEYWORDS = ("Class", "Type", "EndClass", "EndType", "end", "method", "callmethod")


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    line: int = 0
    column: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


@dataclass(frozen=True)
class SemanticProperty:
    tag: str
    value: str = ""
    description: str = ""


@dataclass(frozen=True)
class Param:
    name: str
    type_name: str


@dataclass(frozen=True)
class MethodDecl:
    name: str
    params: tuple[Param, ...] = ()
    return_type: str | None = None
    precondition: Contract | None = None
    properties: tuple[SemanticProperty, ...] = ()
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ComponentDecl:
    name: str
    decl_sort: str = "class"  # "class" | "type"
    provided: tuple[MethodDecl, ...] = ()
    required: tuple[MethodDecl, ...] = ()
    properties: tuple[SemanticProperty, ...] = ()
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)
    diagnostics: tuple[Diagnostic, ...] = field(default=(), compare=False)


# -- semantic properties ----------------------------------------------------

_TAG_LINE = re.compile(r"@([A-Za-z][A-Za-z-]*)\s*(.*)")


def _strip_doc(block: str) -> list[str]:
    text = block.strip()
    if text.startswith("/**"):
        text = text[3:]
    for end in ("**/", "*/"):
        if text.endswith(end):
            text = text[: -len(end)]
            break
    lines = []
    for raw in text.split("\n"):
        line = raw.strip()
        if line.startswith("*"):
            line = line[1:].strip()
        lines.append(line)
    return lines


def _split_value(rest: str) -> tuple[str, str]:
    rest = rest.strip()
    if rest.startswith("("):
        depth = 0
        for i, ch in enumerate(rest):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0:
                return rest[: i + 1], rest[i + 1:].strip()
        return rest, ""
    head, _, tail = rest.partition(" ")
    return head, tail.strip()


def parse_properties(comment_block: str, diagnostics: list | None = None,
                     first_line: int = 1) -> list[SemanticProperty]:
    """Extract ``@tag value description`` entries from a doc comment.

    Descriptions continue over following lines until the next tag.  Tags
    outside the vocabulary produce one ``UnknownTag`` warning each (appended
    to ``diagnostics`` when given) and are dropped.
    """
    props: list[list[str]] = []
    current: list[str] | None = None
    for offset, line in enumerate(_strip_doc(comment_block)):
        m = _TAG_LINE.match(line)
        if m:
            tag = m.group(1)
            if tag not in TAG_SET:
                if diagnostics is not None:
                    diagnostics.append(Diagnostic("warning", f"UnknownTag: @{tag}",
                                                  first_line + offset, 1))
                current = None
                continue
            value, desc = _split_value(m.group(2))
            current = [tag, value, desc]
            props.append(current)
        elif current is not None and line:
            current[2] = f"{current[2]} {line}".strip()
    return [SemanticProperty(t, v, d) for t, v, d in props]


def format_properties(props, indent: str = "") -> str:
    lines = [f"{indent}/**"]
    for p in props:
        text = " ".join(s for s in (f"@{p.tag}", p.value, p.description) if s)
        lines.append(f"{indent} * {text}")
    lines.append(f"{indent} **/")
    return "\n".join(lines)


# -- lexer ------------------------------------------------------------------

_LEX = re.compile(
    r"(?P<doc>/\*\*.*?\*/)"
    r"|(?P<comment>--[^\n]*)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*)"
    r"|(?P<punct>[():;,])"
    r"|(?P<ws>\s+)",
    re.S,
)
_REQUIRES = re.compile(r"--\s*requires\s*:(.*)", re.S)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(source: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _LEX.match(source, pos)
        if not m:
            raise SidlSyntaxError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind, text = m.lastgroup, m.group(0)
        col = pos - line_start + 1
        if kind == "comment":
            r = _REQUIRES.match(text)
            if r:
                body = r.group(1)
                lead = len(body) - len(body.lstrip())
                toks.append(_Tok("requires", body.strip(), line, col + r.start(1) + lead))
        elif kind != "ws":
            toks.append(_Tok(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rfind("\n") + 1
        pos = m.end()
    return toks


# -- parser -----------------------------------------------------------------

class _Parser:
    def __init__(self, source: str):
        self.toks = _lex(source)
        self.pos = 0
        self.diagnostics: list[Diagnostic] = []

    def peek(self) -> _Tok | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self, what: str) -> _Tok:
        tok = self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else _Tok("eof", "", 1, 1)
            raise SidlSyntaxError(f"unexpected end of input, expected {what}", last.line, last.col)
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.next(repr(text))
        if tok.text != text:
            raise SidlSyntaxError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def name(self, what: str) -> _Tok:
        tok = self.next(what)
        if tok.kind != "name" or tok.text in KEYWORDS:
            raise SidlSyntaxError(f"expected {what}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def doc(self) -> list[SemanticProperty] | None:
        tok = self.peek()
        if tok is not None and tok.kind == "doc":
            self.pos += 1
            return parse_properties(tok.text, self.diagnostics, tok.line)
        return None

    def contract(self, tok: _Tok) -> Contract:
        try:
            return parse_contract(tok.text)
        except ContractSyntaxError as e:
            raise ContractSyntaxError(e.bare_message, tok.line, tok.col + max(e.column, 1) - 1) from None

    def components(self) -> list[ComponentDecl]:
        out = []
        while self.peek() is not None:
            out.append(self.component())
        return out

    def component(self) -> ComponentDecl:
        first_diag = len(self.diagnostics)
        props = self.doc() or []
        head = self.next("'Class' or 'Type'")
        if head.text not in ("Class", "Type"):
            if head.kind == "name":
                raise UnknownKeyword(f"unknown keyword {head.text!r}", head.line, head.col)
            raise SidlSyntaxError(f"expected 'Class' or 'Type', found {head.text!r}",
                                  head.line, head.col)
        name = self.name("component name")
        provided: list[MethodDecl] = []
        required: list[MethodDecl] = []
        while True:
            pending: list[_Tok] = []
            mprops: list[SemanticProperty] | None = None
            while True:
                tok = self.peek()
                if tok is not None and tok.kind == "requires":
                    pending.append(self.next("contract"))
                elif tok is not None and tok.kind == "doc" and mprops is None:
                    mprops = self.doc()
                else:
                    break
            tok = self.next("a method or terminator")
            if tok.text in ("end", "EndClass", "EndType"):
                if pending or mprops is not None:
                    raise SidlSyntaxError("contract or documentation is not attached to a method",
                                          tok.line, tok.col)
                if tok.text == "end" and self.peek() is not None and self.peek().text == ";":
                    self.pos += 1
                break
            if tok.text not in ("method", "callmethod"):
                if tok.kind == "name":
                    raise UnknownKeyword(f"unknown keyword {tok.text!r}", tok.line, tok.col)
                raise SidlSyntaxError(f"unexpected {tok.text!r}", tok.line, tok.col)
            decl = self.method(tok, [self.contract(t) for t in pending], mprops or [])
            bucket = provided if tok.text == "method" else required
            if any(m.name == decl.name for m in bucket):
                raise SidlSyntaxError(f"duplicate {tok.text} {decl.name!r}", decl.line, decl.column)
            bucket.append(decl)
        return ComponentDecl(
            name=name.text,
            decl_sort=head.text.lower(),
            provided=tuple(provided),
            required=tuple(required),
            properties=tuple(props),
            line=head.line,
            column=head.col,
            diagnostics=tuple(self.diagnostics[first_diag:]),
        )

    def method(self, kw: _Tok, contracts: list[Contract],
               props: list[SemanticProperty]) -> MethodDecl:
        name = self.name("method name")
        self.expect("(")
        params: list[Param] = []
        if self.peek() is not None and self.peek().text != ")":
            while True:
                pname = self.name("parameter name")
                self.expect(":")
                ptype = self.name("parameter type")
                if any(p.name == pname.text for p in params):
                    raise SidlSyntaxError(f"duplicate parameter {pname.text!r}", pname.line, pname.col)
                params.append(Param(pname.text, ptype.text))
                sep = self.next("';', ',' or ')'")
                if sep.text == ")":
                    break
                if sep.text not in (";", ","):
                    raise SidlSyntaxError(f"expected ';' or ')', found {sep.text!r}", sep.line, sep.col)
        else:
            self.expect(")")
        return_type = None
        if self.peek() is not None and self.peek().text == ":":
            self.pos += 1
            return_type = self.name("return type").text
        self.expect(";")
        for p in props:
            if p.tag == "require":
                try:
                    contracts.append(parse_contract(p.value))
                except ContractSyntaxError as e:
                    raise ContractSyntaxError(f"in @require: {e.bare_message}", kw.line, kw.col) from None
        return MethodDecl(
            name=name.text,
            params=tuple(params),
            return_type=return_type,
            precondition=conjoin(*contracts),
            properties=tuple(props),
            line=kw.line,
            column=kw.col,
        )


def parse_components(source: str) -> list[ComponentDecl]:
    return _Parser(source).components()


def parse_component(source: str) -> ComponentDecl:
    """Parse exactly one component."""
    comps = parse_components(source)
    if len(comps) != 1:
        raise SidlSyntaxError(f"expected exactly one component, found {len(comps)}", 1, 1)
    return comps[0]


# -- printer ----------------------------------------------------------------

def _format_method(keyword: str, m: MethodDecl) -> str:
    lines = []
    if m.precondition is not None:
        lines.append(f"    -- requires: {m.precondition}")
    if m.properties:
        lines.append(format_properties(m.properties, "    "))
    params = "; ".join(f"{p.name}: {p.type_name}" for p in m.params)
    ret = f": {m.return_type}" if m.return_type else ""
    lines.append(f"    {keyword} {m.name}({params}){ret};")
    return "\n".join(lines)


def format_component(decl: ComponentDecl) -> str:
    lines = []
    if decl.properties:
        lines.append(format_properties(decl.properties))
    head = "Class" if decl.decl_sort == "class" else "Type"
    lines.append(f"{head} {decl.name}")
    lines += [_format_method("method", m) for m in decl.provided]
    lines += [_format_method("callmethod", m) for m in decl.required]
    lines.append("EndClass" if decl.decl_sort == "class" else "EndType")
    return "\n".join(lines) + "\n"
