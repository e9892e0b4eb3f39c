"""Shared IR node types for the Java/Python structural parsers."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ..core import Language


class ParseError(Exception):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class StmtKind(Enum):
    FOR = "for"
    WHILE = "while"
    CALL = "call"
    ASSIGN = "assign"
    RETURN = "return"
    SORT_CALL = "sort_call"
    BRANCH = "branch"  # if/elif/else/try arms; analyzer descends into body
    FUNCDEF = "funcdef"  # definition site; cost attributed at call sites
    OTHER = "other"


@dataclass
class Statement:
    kind: StmtKind
    text: str  # header text for block statements, full text otherwise
    line: int  # 1-based first line in the original source
    end_line: int = 0
    raw_lines: tuple[str, ...] = ()  # verbatim original lines for this statement
    body: Optional["StatementBlock"] = None
    # loop components; None where not applicable
    loop_var: Optional[str] = None
    bound: Optional[str] = None  # range stop / iterable / while condition
    init: Optional[str] = None  # java for init clause
    update: Optional[str] = None  # java for update clause
    enhanced: bool = False  # java for-each form
    calls: tuple[tuple[str, int], ...] = ()
    # char offsets into the original source (used by the java rewriter)
    span: Optional[tuple[int, int]] = None
    body_span: Optional[tuple[int, int]] = None

    def walk(self):
        yield self
        if self.body is not None:
            yield from self.body.walk()


@dataclass
class StatementBlock:
    statements: list[Statement] = field(default_factory=list)

    def walk(self):
        for stmt in self.statements:
            yield from stmt.walk()

    def loops(self) -> list[Statement]:
        return [s for s in self.walk() if s.kind in (StmtKind.FOR, StmtKind.WHILE)]


@dataclass
class FunctionUnit:
    name: str
    params: list[str]
    body: StatementBlock
    line: int = 0

    @property
    def call_sites(self) -> list[tuple[str, int]]:
        sites: list[tuple[str, int]] = []
        for stmt in self.body.walk():
            if stmt.kind is StmtKind.FUNCDEF:
                continue
            sites.extend(stmt.calls)
        return sites


@dataclass
class StructuralIR:
    functions: list[FunctionUnit]
    top_level: StatementBlock
    language: Language
    source: str

    def function(self, name: str) -> Optional[FunctionUnit]:
        for f in self.functions:
            if f.name == name:
                return f
        return None


def extract_functions(ir: StructuralIR) -> list[FunctionUnit]:
    """All function definitions; empty for function-free scripts."""
    return list(ir.functions)


_KEYWORDS_NOT_CALLS = {
    "if", "elif", "while", "for", "return", "and", "or", "not", "in", "is",
    "else", "switch", "catch", "synchronized", "new", "assert", "lambda",
    "with", "yield", "del", "raise", "print",  # print counted separately below
}

_CALL_RE = re.compile(r"([A-Za-z_][\w.]*)\s*\(")


def find_calls(masked_text: str) -> tuple[tuple[str, int], ...]:
    """Syntactic call expressions ``name(...)`` with top-level arg counts.

    Dotted receivers keep only the final attribute name so ``obj.solve(x)``
    matches a function named ``solve``.
    """
    calls: list[tuple[str, int]] = []
    for m in _CALL_RE.finditer(masked_text):
        name = m.group(1).split(".")[-1]
        if name in _KEYWORDS_NOT_CALLS and name != "print":
            continue
        argc = _count_args(masked_text, m.end() - 1)
        calls.append((name, argc))
    return tuple(calls)


def _count_args(text: str, open_paren: int) -> int:
    depth = 0
    commas = 0
    nonblank = False
    for ch in text[open_paren:]:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
            if depth == 0:
                break
        elif depth == 1:
            if ch == ",":
                commas += 1
            elif not ch.isspace():
                nonblank = True
    if not nonblank and commas == 0:
        return 0
    return commas + 1


def split_top_level(text: str, sep: str) -> list[str]:
    """Split on a separator character at bracket depth zero."""
    parts: list[str] = []
    depth = 0
    cur: list[str] = []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts
