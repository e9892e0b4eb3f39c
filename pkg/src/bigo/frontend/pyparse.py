"""Indentation-based structural parser for the Python subset."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..core import CodeSnippet, Language
from .ir import (
    FunctionUnit,
    ParseError,
    Statement,
    StatementBlock,
    StmtKind,
    StructuralIR,
    find_calls,
    split_top_level,
)
from .mask import mask_python

_DEF_RE = re.compile(r"^(?:async\s+)?def\s+(\w+)\s*\((.*)\)\s*(?:->[^:]*)?:\s*(.*)$", re.S)
_FOR_RE = re.compile(r"^(?:async\s+)?for\s+(.+?)\s+in\s+(.+?)\s*:\s*(.*)$", re.S)
_WHILE_RE = re.compile(r"^while\s+(.+?)\s*:\s*(.*)$", re.S)
_BRANCH_RE = re.compile(
    r"^(if|elif|else|try|except|finally|with|match|case|class)\b.*?:\s*(.*)$", re.S
)

@dataclass
class _Logical:
    text: str  # masked statement text, stripped
    start: int  # 0-based physical line index
    end: int
    indent: int


def _logical_lines(masked: str) -> list[_Logical]:
    lines = masked.split("\n")
    logical: list[_Logical] = []
    i = 0
    while i < len(lines):
        stripped = lines[i].strip()
        if not stripped:
            i += 1
            continue
        start = i
        depth = 0
        buf: list[str] = []
        while i < len(lines):
            line = lines[i]
            depth += sum(line.count(c) for c in "([{") - sum(
                line.count(c) for c in ")]}"
            )
            cont = line.rstrip().endswith("\\")
            buf.append(line.rstrip("\\") if cont and depth == 0 else line)
            i += 1
            if depth <= 0 and not cont:
                break
        if depth > 0:
            raise ParseError(start + 1, "unbalanced brackets")
        expanded = lines[start].expandtabs(8)
        indent = len(expanded) - len(expanded.lstrip())
        logical.append(
            _Logical(
                text="\n".join(buf).strip(), start=start, end=i - 1, indent=indent
            )
        )
    return logical


def parse_python(snippet: CodeSnippet) -> StructuralIR:
    source = snippet.source
    if not source.strip():
        raise ParseError(1, "empty source")
    masked = mask_python(source)
    raw_lines = source.split("\n")
    logical = _logical_lines(masked)
    if not logical:
        raise ParseError(1, "no statements")

    functions: list[FunctionUnit] = []
    top = StatementBlock()
    # stack of (indent, block); a pending header pushes a frame expecting
    # deeper indentation
    stack: list[tuple[int, StatementBlock]] = [(-1, top)]
    pending: list[tuple[int, StatementBlock]] = []  # header indents awaiting body

    idx = 0
    while idx < len(logical):
        ll = logical[idx]
        if pending:
            head_indent, body_block = pending.pop()
            if ll.indent > head_indent:
                stack.append((ll.indent, body_block))
            # else: empty suite; tolerate and fall through to normal handling
        while ll.indent < stack[-1][0]:
            stack.pop()
        if ll.indent != stack[-1][0] and len(stack) > 1 and ll.indent > stack[-1][0]:
            raise ParseError(ll.start + 1, "unexpected indent")
        block = stack[-1][1]
        stmt, body_needed = _make_statement(ll, raw_lines, functions)
        block.statements.append(stmt)
        if body_needed:
            pending.append((ll.indent, stmt.body))
            # inline suite already populated means no pending body expected
            if stmt.body.statements:
                pending.pop()
        idx += 1
    return StructuralIR(
        functions=functions, top_level=top, language=Language.PYTHON, source=source
    )


def _make_statement(
    ll: _Logical, raw_lines: list[str], functions: list[FunctionUnit]
) -> tuple[Statement, bool]:
    text = ll.text
    raw = tuple(raw_lines[ll.start : ll.end + 1])
    common = dict(
        line=ll.start + 1, end_line=ll.end + 1, raw_lines=raw
    )

    m = _DEF_RE.match(text)
    if m:
        name, params_text, inline = m.group(1), m.group(2), m.group(3)
        params = [
            p.split(":")[0].split("=")[0].strip()
            for p in split_top_level(params_text, ",")
            if p.strip()
        ]
        body = StatementBlock()
        stmt = Statement(kind=StmtKind.FUNCDEF, text=text, body=body, **common)
        functions.append(
            FunctionUnit(name=name, params=params, body=body, line=ll.start + 1)
        )
        _populate_inline(body, inline, ll, raw)
        return stmt, True

    m = _FOR_RE.match(text)
    if m:
        target, iterable, inline = m.group(1), m.group(2), m.group(3)
        body = StatementBlock()
        stmt = Statement(
            kind=StmtKind.FOR,
            text=text,
            body=body,
            loop_var=target.strip(),
            bound=iterable.strip(),
            calls=find_calls(iterable),
            **common,
        )
        _populate_inline(body, inline, ll, raw)
        return stmt, True

    m = _WHILE_RE.match(text)
    if m:
        cond, inline = m.group(1), m.group(2)
        body = StatementBlock()
        stmt = Statement(
            kind=StmtKind.WHILE,
            text=text,
            body=body,
            bound=cond.strip(),
            calls=find_calls(cond),
            **common,
        )
        _populate_inline(body, inline, ll, raw)
        return stmt, True

    m = _BRANCH_RE.match(text)
    if m:
        inline = m.group(2)
        body = StatementBlock()
        stmt = Statement(
            kind=StmtKind.BRANCH,
            text=text,
            body=body,
            calls=find_calls(text.split(":")[0]),
            **common,
        )
        _populate_inline(body, inline, ll, raw)
        return stmt, True

    return _simple_statement(text, common), False


def _populate_inline(
    body: StatementBlock, inline: str, ll: _Logical, raw: tuple[str, ...]
) -> None:
    """Single-line suites like ``for i in range(n): print(i)``."""
    inline = inline.strip()
    if not inline:
        return
    for part in split_top_level(inline, ";"):
        part = part.strip()
        if part:
            body.statements.append(
                _simple_statement(
                    part,
                    dict(line=ll.start + 1, end_line=ll.end + 1, raw_lines=()),
                )
            )


def classify_simple(text: str) -> StmtKind:
    if re.match(r"^return\b", text) or text == "return":
        return StmtKind.RETURN
    if re.search(r"\.sort\s*\(", text) or re.search(r"\bsorted\s*\(", text):
        return StmtKind.SORT_CALL
    if _has_top_level_assign(text):
        return StmtKind.ASSIGN
    if re.match(r"^[A-Za-z_][\w.]*\s*\(", text):
        return StmtKind.CALL
    return StmtKind.OTHER


def _has_top_level_assign(text: str) -> bool:
    depth = 0
    for i, ch in enumerate(text):
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif depth == 0 and ch == "=":
            before = text[i - 1] if i else ""
            after = text[i + 1] if i + 1 < len(text) else ""
            if before in "<>" and i >= 2 and text[i - 2] == before:
                return True  # augmented shift: <<= or >>=
            if after == "=" or before in "=!<>:":
                continue  # comparison or walrus, not an assignment
            return True
    return False


def _simple_statement(text: str, common: dict) -> Statement:
    kind = classify_simple(text)
    return Statement(kind=kind, text=text, calls=find_calls(text), **common)
