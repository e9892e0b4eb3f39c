"""Brace-tracking structural parser for the Java subset.

Classes are containers: their methods are hoisted to FunctionUnits and the
``main`` method body doubles as the top-level entry block. Constructs
outside the recognized subset become OTHER statements that keep their raw
text and character span.
"""

from __future__ import annotations

import re

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
from .mask import mask_java

_BLOCK_KEYWORDS = ("if", "else", "switch", "try", "catch", "finally", "do", "synchronized")
_METHOD_RE = re.compile(
    r"(?:@\w+(?:\([^)]*\))?\s+)*"
    r"(?:(?:public|private|protected|static|final|abstract|synchronized|native|strictfp)\s+)*"
    r"(?:<[^>{};]*>\s*)?"
    r"[\w<>\[\].?,\s]+?\s+(\w+)\s*\(([^)]*)\)\s*(?:throws\s+[\w.,\s]+)?$",
    re.S,
)
_RESERVED = {
    "if", "for", "while", "switch", "catch", "return", "new", "do", "else",
    "try", "finally", "synchronized", "super", "this", "assert",
}


class _Scanner:
    def __init__(self, source: str, masked: str):
        self.source = source
        self.masked = masked
        self.pos = 0
        self.n = len(masked)

    def line_of(self, pos: int) -> int:
        return self.masked.count("\n", 0, pos) + 1

    def skip_ws(self) -> None:
        while self.pos < self.n and self.masked[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= self.n

    def peek(self) -> str:
        self.skip_ws()
        return self.masked[self.pos] if self.pos < self.n else ""

    def match_keyword(self, word: str) -> bool:
        self.skip_ws()
        end = self.pos + len(word)
        if self.masked[self.pos : end] != word:
            return False
        if end < self.n and (self.masked[end].isalnum() or self.masked[end] == "_"):
            return False
        return True

    def find_matching(self, open_pos: int, open_ch: str, close_ch: str) -> int:
        depth = 0
        i = open_pos
        while i < self.n:
            c = self.masked[i]
            if c == open_ch:
                depth += 1
            elif c == close_ch:
                depth -= 1
                if depth == 0:
                    return i
            i += 1
        raise ParseError(self.line_of(open_pos), f"unbalanced {open_ch!r}")


def parse_java(snippet: CodeSnippet) -> StructuralIR:
    source = snippet.source
    if not source.strip():
        raise ParseError(1, "empty source")
    masked = mask_java(source)
    if masked.count("{") != masked.count("}"):
        raise ParseError(1, "unbalanced braces")

    sc = _Scanner(source, masked)
    functions: list[FunctionUnit] = []
    top = StatementBlock()
    _parse_region(sc, len(masked), top, functions, at_class_level=True)

    main = next((f for f in functions if f.name == "main"), None)
    if main is not None:
        top = main.body
    return StructuralIR(
        functions=functions, top_level=top, language=Language.JAVA, source=source
    )


def _parse_region(
    sc: _Scanner,
    end: int,
    block: StatementBlock,
    functions: list[FunctionUnit],
    at_class_level: bool,
) -> None:
    while not sc.at_end() and sc.pos < end:
        stmt = _parse_statement(sc, end, functions, at_class_level)
        if stmt is None:
            break
        if stmt is not SKIPPED:
            block.statements.append(stmt)


SKIPPED = object()  # import statements, stray semicolons


def _parse_statement(
    sc: _Scanner, end: int, functions: list[FunctionUnit], at_class_level: bool
):
    sc.skip_ws()
    if sc.pos >= end:
        return None
    start = sc.pos

    if sc.masked[sc.pos] == "}":
        sc.pos += 1
        return SKIPPED
    if sc.masked[sc.pos] == ";":
        sc.pos += 1
        return SKIPPED

    if sc.match_keyword("for"):
        return _parse_loop(sc, end, functions, StmtKind.FOR)
    if sc.match_keyword("while"):
        return _parse_loop(sc, end, functions, StmtKind.WHILE)
    for kw in _BLOCK_KEYWORDS:
        if sc.match_keyword(kw):
            return _parse_branch(sc, end, functions, kw)

    # scan forward to the statement terminator: ';' or '{' at paren depth 0
    i = sc.pos
    depth = 0
    while i < end:
        c = sc.masked[i]
        if c in "([":
            depth += 1
        elif c in ")]":
            depth -= 1
        elif depth == 0 and c in ";{}":
            break
        i += 1
    if i >= end or sc.masked[i] == "}":
        # trailing text without terminator; emit as OTHER
        text = sc.source[start:i].strip()
        sc.pos = i
        if not text:
            return SKIPPED
        return _simple(text, sc, start, i)

    if sc.masked[i] == ";":
        text = sc.source[start:i].strip()
        sc.pos = i + 1
        if re.match(r"^(import|package)\b", text):
            return SKIPPED
        return _simple(text, sc, start, i + 1)

    # block opener
    header = sc.source[start:i].strip()
    header_masked = sc.masked[start:i].strip()
    close = sc.find_matching(i, "{", "}")
    body = StatementBlock()

    if re.search(r"\b(class|interface|enum)\b", header_masked) and "=" not in header_masked:
        sc.pos = i + 1
        _parse_region(sc, close, body, functions, at_class_level=True)
        sc.pos = close + 1
        return Statement(
            kind=StmtKind.BRANCH,
            text=header,
            line=sc.line_of(start),
            end_line=sc.line_of(close),
            raw_lines=(),
            body=body,
            span=(start, close + 1),
            body_span=(i + 1, close),
        )

    m = _METHOD_RE.match(header_masked)
    if (
        at_class_level
        and m
        and m.group(1) not in _RESERVED
        and "=" not in header_masked.split("(")[0]
    ):
        sc.pos = i + 1
        _parse_region(sc, close, body, functions, at_class_level=False)
        sc.pos = close + 1
        params = [
            p.strip().split()[-1].strip()
            for p in split_top_level(m.group(2), ",")
            if p.strip()
        ]
        functions.append(
            FunctionUnit(
                name=m.group(1), params=params, body=body, line=sc.line_of(start)
            )
        )
        return Statement(
            kind=StmtKind.FUNCDEF,
            text=header,
            line=sc.line_of(start),
            end_line=sc.line_of(close),
            raw_lines=(),
            body=body,
            span=(start, close + 1),
            body_span=(i + 1, close),
        )

    if "=" in header_masked or header_masked.startswith("new") or "->" in header_masked:
        # array initializer, anonymous class, or lambda: opaque statement
        j = close + 1
        while j < sc.n and sc.masked[j] in ");. \t\n":
            if sc.masked[j] == ";":
                j += 1
                break
            j += 1
        sc.pos = j
        return Statement(
            kind=StmtKind.OTHER,
            text=sc.source[start:j].strip(),
            line=sc.line_of(start),
            end_line=sc.line_of(j),
            raw_lines=(),
            calls=find_calls(sc.masked[start:j]),
            span=(start, j),
        )

    # unrecognized block construct: descend so nested loops still count
    sc.pos = i + 1
    _parse_region(sc, close, body, functions, at_class_level=False)
    sc.pos = close + 1
    return Statement(
        kind=StmtKind.BRANCH,
        text=header,
        line=sc.line_of(start),
        end_line=sc.line_of(close),
        raw_lines=(),
        body=body,
        calls=find_calls(header_masked),
        span=(start, close + 1),
        body_span=(i + 1, close),
    )


def _parse_branch(sc: _Scanner, end: int, functions: list[FunctionUnit], kw: str):
    start = sc.pos
    sc.pos += len(kw)
    sc.skip_ws()
    header_end = sc.pos
    if sc.pos < end and sc.masked[sc.pos] == "(":
        header_end = sc.find_matching(sc.pos, "(", ")") + 1
        sc.pos = header_end
    header = sc.source[start:header_end].strip()
    body, body_span, close = _parse_body(sc, end, functions)
    return Statement(
        kind=StmtKind.BRANCH,
        text=header,
        line=sc.line_of(start),
        end_line=sc.line_of(close),
        raw_lines=(),
        body=body,
        calls=find_calls(sc.masked[start:header_end]),
        span=(start, close),
        body_span=body_span,
    )


def _parse_loop(sc: _Scanner, end: int, functions: list[FunctionUnit], kind: StmtKind):
    start = sc.pos
    kw = "for" if kind is StmtKind.FOR else "while"
    sc.pos += len(kw)
    sc.skip_ws()
    if sc.pos >= end or sc.masked[sc.pos] != "(":
        raise ParseError(sc.line_of(start), f"malformed {kw} header")
    close_paren = sc.find_matching(sc.pos, "(", ")")
    inner = sc.source[sc.pos + 1 : close_paren]
    inner_masked = sc.masked[sc.pos + 1 : close_paren]
    sc.pos = close_paren + 1

    init = cond = update = loop_var = bound = None
    enhanced = False
    if kind is StmtKind.FOR:
        parts = split_top_level(inner_masked, ";")
        if len(parts) == 3:
            o_parts = _offsets_split(inner, inner_masked, ";")
            init, cond, update = (p.strip() for p in o_parts)
            m = re.match(r"^(?:[\w<>\[\],.\s]+\s)?(\w+)\s*=", init)
            if m:
                loop_var = m.group(1)
            bound = cond
        elif ":" in inner_masked:
            decl, _, coll = inner.partition(":")
            enhanced = True
            loop_var = decl.strip().split()[-1] if decl.strip() else None
            bound = coll.strip()
        else:
            bound = inner.strip()
    else:
        bound = inner.strip()

    body, body_span, close = _parse_body(sc, end, functions)
    return Statement(
        kind=kind,
        text=sc.source[start : close_paren + 1].strip(),
        line=sc.line_of(start),
        end_line=sc.line_of(close),
        raw_lines=(),
        body=body,
        loop_var=loop_var,
        bound=bound,
        init=init,
        update=update,
        enhanced=enhanced,
        calls=find_calls(inner_masked),
        span=(start, close),
        body_span=body_span,
    )


def _offsets_split(inner: str, inner_masked: str, sep: str) -> list[str]:
    """Split original text at the separator positions found in the masked text."""
    parts: list[str] = []
    depth = 0
    last = 0
    for idx, ch in enumerate(inner_masked):
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append(inner[last:idx])
            last = idx + 1
    parts.append(inner[last:])
    return parts


def _parse_body(sc: _Scanner, end: int, functions: list[FunctionUnit]):
    """Body of a loop or branch: a braced block or a single statement."""
    sc.skip_ws()
    body = StatementBlock()
    if sc.pos < end and sc.masked[sc.pos] == "{":
        open_brace = sc.pos
        close = sc.find_matching(open_brace, "{", "}")
        sc.pos = open_brace + 1
        _parse_region(sc, close, body, functions, at_class_level=False)
        sc.pos = close + 1
        return body, (open_brace + 1, close), close + 1
    if sc.pos < end and sc.masked[sc.pos] == ";":
        sc.pos += 1
        return body, (sc.pos - 1, sc.pos - 1), sc.pos
    body_start = sc.pos
    stmt = _parse_statement(sc, end, functions, at_class_level=False)
    if stmt is not None and stmt is not SKIPPED:
        body.statements.append(stmt)
    return body, (body_start, sc.pos), sc.pos


def _simple(text: str, sc: _Scanner, start: int, stop: int) -> Statement:
    if re.match(r"^return\b", text):
        kind = StmtKind.RETURN
    elif re.search(r"\b(Arrays|Collections)\s*\.\s*sort\s*\(", text) or re.search(
        r"\.sort\s*\(", text
    ):
        kind = StmtKind.SORT_CALL
    elif _is_assign(sc.masked[start:stop]):
        kind = StmtKind.ASSIGN
    elif re.match(r"^[A-Za-z_][\w.]*\s*\(", text):
        kind = StmtKind.CALL
    else:
        kind = StmtKind.OTHER
    return Statement(
        kind=kind,
        text=text,
        line=sc.line_of(start),
        end_line=sc.line_of(stop),
        raw_lines=(),
        calls=find_calls(sc.masked[start:stop]),
        span=(start, stop),
    )


def _is_assign(masked_text: str) -> bool:
    depth = 0
    for i, ch in enumerate(masked_text):
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif depth == 0 and ch == "=":
            before = masked_text[i - 1] if i else ""
            after = masked_text[i + 1] if i + 1 < len(masked_text) else ""
            if before in "<>" and i >= 2 and masked_text[i - 2] == before:
                return True
            if after == "=" or before in "=!<>":
                continue
            return True
    return bool(re.search(r"\b\w+\s*(\+\+|--)|(\+\+|--)\s*\w+", masked_text))
