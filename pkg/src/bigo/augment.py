"""Label-preserving code augmentation.

Loop conversion (for<->while) is a native, deterministic source rewrite.
Back-translation is delegated to an external augmenter process speaking a
newline-delimited JSON protocol; a deterministic identifier-renaming mock
ships with the package for tests and self-contained experiments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence

from .core import CodeSnippet, ComplexityClass, LabeledExample, Language
from .frontend import ParseError, Statement, StatementBlock, StmtKind, parse
from .frontend.ir import split_top_level


class UnsupportedLoopForm(Exception):
    """Conversion would change semantics or cannot be expressed."""


class AugmenterUnavailable(Exception):
    """BT requested without a connected augmenter backend."""


class AugmenterError(Exception):
    pass


class InvalidAugmentation(Exception):
    """Augmenter output failed validation (unparseable or identical)."""


class AugMethod(Enum):
    BT = "bt"
    LC = "lc"


class AugKind(Enum):
    BT = "bt"
    LC = "lc"
    BT_PLUS_LC = "bt+lc"


class Sampling(Enum):
    NATURAL = "natural"
    ARTIFICIAL = "artificial"


@dataclass(frozen=True)
class AugStrategy:
    kind: AugKind
    sampling: Sampling = Sampling.NATURAL


@dataclass(frozen=True)
class AugmentedExample:
    original: str
    snippet: CodeSnippet
    label: ComplexityClass
    method: AugMethod

    def to_labeled(self) -> LabeledExample:
        return LabeledExample(self.snippet, self.label)


# ---------------------------------------------------------------------------
# loop conversion

_CONTINUE_RE = re.compile(r"(^|\W)continue(\W|$)")


def _body_has_continue(stmt: Statement) -> bool:
    if stmt.body is None:
        return False
    for s in stmt.body.statements:  # stop at nested loops: their continue is theirs
        if s.kind in (StmtKind.FOR, StmtKind.WHILE, StmtKind.FUNCDEF):
            continue
        if _CONTINUE_RE.search(s.text):
            return True
        if s.body is not None and _branch_has_continue(s):
            return True
    return False


def _branch_has_continue(stmt: Statement) -> bool:
    for s in stmt.body.statements:
        if s.kind in (StmtKind.FOR, StmtKind.WHILE, StmtKind.FUNCDEF):
            continue
        if _CONTINUE_RE.search(s.text):
            return True
        if s.body is not None and _branch_has_continue(s):
            return True
    return False


def loop_convert(example: LabeledExample) -> Optional[AugmentedExample]:
    """Swap every loop kind in the snippet; absent when nothing converts."""
    snippet = example.snippet
    try:
        new_source, converted = convert_source(snippet)
    except ParseError:
        return None
    if converted == 0:
        return None
    new = CodeSnippet(
        id=snippet.id + "::lc", source=new_source, language=snippet.language
    )
    try:
        parse(new)
    except ParseError:
        return None
    return AugmentedExample(
        original=snippet.id, snippet=new, label=example.label, method=AugMethod.LC
    )


def convert_source(snippet: CodeSnippet) -> tuple[str, int]:
    """Rewritten source and the number of loops actually converted."""
    ir = parse(snippet)
    if snippet.language is Language.PYTHON:
        emitter = _PythonEmitter(snippet.source)
        lines = emitter.emit_block(ir.top_level)
        return "\n".join(lines), emitter.converted
    emitter = _JavaEmitter(snippet.source)
    text = emitter.emit_span(0, len(snippet.source), _all_statements(ir))
    return text, emitter.converted


class _PythonEmitter:
    def __init__(self, source: str):
        self.lines = source.split("\n")
        self.converted = 0
        self.fresh = 0

    def emit_block(self, block: StatementBlock) -> list[str]:
        out: list[str] = []
        emitted_through = -1
        for stmt in block.statements:
            if stmt.line - 1 <= emitted_through:
                continue  # inline suite already covered by its header line
            out.extend(self.emit_statement(stmt))
            emitted_through = stmt.end_line - 1
        return out

    def raw(self, stmt: Statement) -> list[str]:
        return list(self.lines[stmt.line - 1 : stmt.end_line])

    def emit_statement(self, stmt: Statement) -> list[str]:
        if stmt.kind is StmtKind.FOR:
            try:
                return self.convert_for(stmt)
            except UnsupportedLoopForm:
                return self.emit_with_body(stmt)
        if stmt.kind is StmtKind.WHILE:
            try:
                return self.convert_while(stmt)
            except UnsupportedLoopForm:
                return self.emit_with_body(stmt)
        if stmt.body is not None and stmt.body.statements and not self._inline_suite(stmt):
            return self.emit_with_body(stmt)
        return self.raw(stmt)

    def _inline_suite(self, stmt: Statement) -> bool:
        return bool(stmt.body and stmt.body.statements) and all(
            not s.raw_lines for s in stmt.body.statements
        )

    def emit_with_body(self, stmt: Statement) -> list[str]:
        if not stmt.body or not stmt.body.statements:
            return self.raw(stmt)
        header = self.lines[stmt.line - 1 : stmt.body.statements[0].line - 1]
        return list(header) + self.emit_block(stmt.body)

    def _indent_of(self, line: str) -> str:
        return line[: len(line) - len(line.lstrip())]

    def convert_for(self, stmt: Statement) -> list[str]:
        if self._inline_suite(stmt):
            raise UnsupportedLoopForm("inline suite")
        if _body_has_continue(stmt):
            raise UnsupportedLoopForm("continue interacts with hoisted update")
        if self._has_else_clause(stmt):
            raise UnsupportedLoopForm("for-else")
        header_line = self.lines[stmt.line - 1]
        indent = self._indent_of(header_line)
        body_lines = self.emit_block(stmt.body)
        body_indent = self._indent_of(
            self.lines[stmt.body.statements[0].line - 1]
        )
        target = stmt.loop_var or ""
        iterable = (stmt.bound or "").strip()

        m = re.match(r"^\s*range\s*\((.*)\)\s*$", iterable, re.S)
        if m:
            args = [a.strip() for a in split_top_level(m.group(1), ",") if a.strip()]
            if not re.match(r"^[A-Za-z_]\w*$", target):
                raise UnsupportedLoopForm("tuple target over range")
            if len(args) == 1:
                start, stop, step = "0", args[0], "1"
            elif len(args) == 2:
                start, stop, step = args[0], args[1], "1"
            elif len(args) == 3:
                start, stop, step = args
            else:
                raise UnsupportedLoopForm("unrecognized range arity")
            neg = step.lstrip().startswith("-")
            cmp_op = ">" if neg else "<"
            init = f"{indent}{target} = {start}"
            head = f"{indent}while {target} {cmp_op} {stop}:"
            update = f"{body_indent}{target} += {step}"
            self.converted += 1
            return [init, head] + body_lines + [update]

        # generic iterable: index-based traversal
        idx = f"_lc_i{self.fresh}"
        self.fresh += 1
        init = f"{indent}{idx} = 0"
        head = f"{indent}while {idx} < len({iterable}):"
        bind = f"{body_indent}{target} = ({iterable})[{idx}]"
        update = f"{body_indent}{idx} += 1"
        self.converted += 1
        return [init, head, bind] + body_lines + [update]

    def convert_while(self, stmt: Statement) -> list[str]:
        if self._inline_suite(stmt):
            raise UnsupportedLoopForm("inline suite")
        cond = (stmt.bound or "").strip()
        if cond in ("True", "1"):
            raise UnsupportedLoopForm("no python for-equivalent of while True")
        if self._has_else_clause(stmt):
            raise UnsupportedLoopForm("while-else")
        header_line = self.lines[stmt.line - 1]
        indent = self._indent_of(header_line)

        # counter-style loop: while VAR < STOP with a trailing additive update
        m = re.match(r"^([A-Za-z_]\w*)\s*(<=|<|>=|>)\s*(.+)$", cond, re.S)
        if not m:
            raise UnsupportedLoopForm("condition is not a simple comparison")
        var, op, stop = m.group(1), m.group(2), m.group(3).strip()
        body_stmts = stmt.body.statements
        if not body_stmts:
            raise UnsupportedLoopForm("empty body")
        last = body_stmts[-1]
        step = self._trailing_step(last, var)
        if step is None:
            raise UnsupportedLoopForm("no trailing counter update")
        if _body_has_continue(stmt):
            raise UnsupportedLoopForm("continue would skip the counter update")
        direction_down = op in (">", ">=")
        if (step.startswith("-")) != direction_down:
            raise UnsupportedLoopForm("update direction does not match condition")
        if op == "<=":
            stop = f"({stop}) + 1"
        elif op == ">=":
            stop = f"({stop}) - 1"
        body_lines = self.emit_block(StatementBlock(body_stmts[:-1]))
        head = f"{indent}for {var} in range({var}, {stop}, {step}):"
        if step == "1":
            head = f"{indent}for {var} in range({var}, {stop}):"
        self.converted += 1
        return [head] + body_lines

    def _trailing_step(self, stmt: Statement, var: str) -> Optional[str]:
        text = stmt.text.strip()
        m = re.match(rf"^{re.escape(var)}\s*\+=\s*(-?\s*\w+)$", text)
        if m:
            return m.group(1).replace(" ", "")
        m = re.match(rf"^{re.escape(var)}\s*-=\s*(\w+)$", text)
        if m:
            return "-" + m.group(1)
        m = re.match(rf"^{re.escape(var)}\s*=\s*{re.escape(var)}\s*\+\s*(\w+)$", text)
        if m:
            return m.group(1)
        m = re.match(rf"^{re.escape(var)}\s*=\s*{re.escape(var)}\s*-\s*(\w+)$", text)
        if m:
            return "-" + m.group(1)
        return None

    def _has_else_clause(self, stmt: Statement) -> bool:
        # an else at the loop's indent on the first non-blank line after the
        # loop's body subtree
        last = stmt.end_line
        for sub in stmt.walk():
            last = max(last, sub.end_line)
        loop_indent = len(self._indent_of(self.lines[stmt.line - 1]))
        for idx in range(last, len(self.lines)):  # 0-based index of next lines
            line = self.lines[idx]
            if not line.strip():
                continue
            indent = len(line) - len(line.lstrip())
            return line.strip().startswith("else") and indent == loop_indent
        return False


class _JavaEmitter:
    def __init__(self, source: str):
        self.source = source
        self.converted = 0

    def emit_region(self, region, ir) -> str:
        return self.emit_span(0, len(self.source), _all_statements(ir))

    def emit_span(self, start: int, end: int, statements: list[Statement]) -> str:
        """Reassemble [start, end) replacing top-most loop statements."""
        loops = [
            s
            for s in statements
            if s.kind in (StmtKind.FOR, StmtKind.WHILE)
            and s.span is not None
            and start <= s.span[0] and s.span[1] <= end
        ]
        # keep only outermost spans
        outer: list[Statement] = []
        for s in sorted(loops, key=lambda s: (s.span[0], -s.span[1])):
            if not outer or s.span[0] >= outer[-1].span[1]:
                outer.append(s)
        out: list[str] = []
        pos = start
        for s in outer:
            out.append(self.source[pos : s.span[0]])
            out.append(self.emit_loop(s, statements))
            pos = s.span[1]
        out.append(self.source[pos:end])
        return "".join(out)

    def emit_loop(self, stmt: Statement, statements: list[Statement]) -> str:
        inner = _collect_statements(stmt.body)
        body_text = (
            self.emit_span(stmt.body_span[0], stmt.body_span[1], inner)
            if stmt.body_span
            else ""
        )
        braced = self.source[stmt.body_span[0] - 1 : stmt.body_span[0]] == "{" if stmt.body_span else False
        try:
            if stmt.kind is StmtKind.FOR:
                text = self._for_to_while(stmt, body_text, braced)
            else:
                text = self._while_to_for(stmt, body_text, braced)
            self.converted += 1
            return text
        except UnsupportedLoopForm:
            return self.source[stmt.span[0] : stmt.body_span[0]] + body_text + (
                self.source[stmt.body_span[1] : stmt.span[1]] if stmt.body_span else ""
            )

    def _for_to_while(self, stmt: Statement, body_text: str, braced: bool) -> str:
        if stmt.enhanced:
            raise UnsupportedLoopForm("enhanced for has no counter to hoist")
        if _body_has_continue(stmt):
            raise UnsupportedLoopForm("continue interacts with hoisted update")
        init = (stmt.init or "").strip()
        cond = (stmt.bound or "").strip() or "true"
        update = (stmt.update or "").strip()
        if not braced:
            body_text = body_text.strip()
            body_text = ("\n" + body_text + "\n") if body_text else "\n"
        update_stmt = f"{update};" if update else ""
        body = body_text.rstrip()
        pieces = []
        if init:
            pieces.append(f"{init};\n")
        pieces.append(f"while ({cond}) {{")
        pieces.append(body if body.strip() else "")
        if update_stmt:
            pieces.append(f"\n{update_stmt}\n")
        pieces.append("}")
        return "".join(pieces)

    def _while_to_for(self, stmt: Statement, body_text: str, braced: bool) -> str:
        cond = (stmt.bound or "").strip()
        update = ""
        body = body_text
        if stmt.body is not None and stmt.body.statements and not _body_has_continue(stmt):
            last = stmt.body.statements[-1]
            if last.kind in (StmtKind.ASSIGN, StmtKind.OTHER, StmtKind.CALL) and (
                last.span is not None
            ):
                text = last.text.strip().rstrip(";").strip()
                if re.match(
                    r"^\w+\s*(\+\+|--)$|^(\+\+|--)\s*\w+$|^\w+(\[\w*\])?\s*[-+*/]?=[^=].*$",
                    text,
                ) and "\n" not in text:
                    update = text
                    cut = last.span[0] - stmt.body_span[0]
                    body = body_text[:cut] + body_text[
                        last.span[1] - stmt.body_span[0] :
                    ]
        if not braced:
            body = body.strip()
            body = ("\n" + body + "\n") if body else "\n"
        return f"for (; {cond}; {update}) {{" + body.rstrip() + "\n}"


def _all_statements(ir) -> list[Statement]:
    out = list(ir.top_level.walk())
    for f in ir.functions:
        out.extend(f.body.walk())
    # dedupe by identity (main body may alias top_level)
    seen: set[int] = set()
    uniq = []
    for s in out:
        if id(s) not in seen:
            seen.add(id(s))
            uniq.append(s)
    return uniq


def _collect_statements(block: Optional[StatementBlock]) -> list[Statement]:
    return list(block.walk()) if block is not None else []


from .frontend.ir import StructuralIR as _IR  # noqa: E402


# ---------------------------------------------------------------------------
# for_to_while / while_to_for on explicit locations

def for_to_while(ir: _IR, line: int) -> str:
    """Convert the single for-loop starting at the given line."""
    return _convert_single(ir, line, StmtKind.FOR)


def while_to_for(ir: _IR, line: int) -> str:
    return _convert_single(ir, line, StmtKind.WHILE)


def _convert_single(ir: _IR, line: int, kind: StmtKind) -> str:
    target = None
    for s in _all_statements(ir):
        if s.line == line and s.kind is kind:
            target = s
            break
    if target is None:
        raise UnsupportedLoopForm(f"no {kind.value} loop at line {line}")
    if ir.language is Language.PYTHON:
        em = _PythonEmitter(ir.source)
        lines = (
            em.convert_for(target) if kind is StmtKind.FOR else em.convert_while(target)
        )
        all_lines = ir.source.split("\n")
        new_lines = all_lines[: target.line - 1] + lines + all_lines[target.end_line :]
        return "\n".join(new_lines)
    em = _JavaEmitter(ir.source)
    inner = _collect_statements(target.body)
    body_text = (
        ir.source[target.body_span[0] : target.body_span[1]] if target.body_span else ""
    )
    braced = (
        ir.source[target.body_span[0] - 1 : target.body_span[0]] == "{"
        if target.body_span
        else False
    )
    if kind is StmtKind.FOR:
        replacement = em._for_to_while(target, body_text, braced)
    else:
        replacement = em._while_to_for(target, body_text, braced)
    return ir.source[: target.span[0]] + replacement + ir.source[target.span[1] :]


# ---------------------------------------------------------------------------
# dataset-level augmentation

Backtranslator = Callable[[CodeSnippet], str]


def validate_backtranslation(original: CodeSnippet, new_code: str) -> CodeSnippet:
    if new_code.strip() == original.source.strip():
        raise InvalidAugmentation(f"{original.id}: output identical to original")
    candidate = CodeSnippet(
        id=original.id + "::bt", source=new_code, language=original.language
    )
    try:
        parse(candidate)
    except ParseError as exc:
        raise InvalidAugmentation(f"{original.id}: output does not parse: {exc}")
    return candidate


def backtranslate_example(
    example: LabeledExample, bt: Backtranslator
) -> Optional[AugmentedExample]:
    try:
        code = bt(example.snippet)
        snippet = validate_backtranslation(example.snippet, code)
    except (InvalidAugmentation, AugmenterError):
        return None
    return AugmentedExample(
        original=example.snippet.id,
        snippet=snippet,
        label=example.label,
        method=AugMethod.BT,
    )


def augment_dataset(
    labeled: Sequence[LabeledExample],
    strategy: AugStrategy,
    bt: Optional[Backtranslator] = None,
) -> list[AugmentedExample]:
    out: list[AugmentedExample] = []
    if strategy.kind in (AugKind.BT, AugKind.BT_PLUS_LC):
        if bt is None:
            raise AugmenterUnavailable("back-translation requested without a backend")
        for ex in labeled:
            aug = backtranslate_example(ex, bt)
            if aug is not None:
                out.append(aug)
    if strategy.kind in (AugKind.LC, AugKind.BT_PLUS_LC):
        for ex in labeled:
            aug = loop_convert(ex)
            if aug is not None:
                out.append(aug)
    return out


def has_loops(snippet: CodeSnippet) -> bool:
    try:
        ir = parse(snippet)
    except ParseError:
        return False
    return bool([s for s in _all_statements(ir) if s.kind in (StmtKind.FOR, StmtKind.WHILE)])


# ---------------------------------------------------------------------------
# deterministic mock back-translator (identity up to identifier renaming)

_RENAME_SKIP = {
    # language keywords and idiom names the parsers/analyzer key on
    "for", "while", "if", "elif", "else", "def", "return", "in", "is", "not",
    "and", "or", "range", "len", "sorted", "sort", "print", "input", "int",
    "str", "list", "map", "append", "import", "from", "break", "continue",
    "pass", "True", "False", "None", "try", "except", "finally", "with",
    "class", "public", "private", "protected", "static", "void", "main",
    "new", "System", "out", "println", "Scanner", "String", "args", "long",
    "double", "float", "boolean", "char", "byte", "short", "Arrays",
    "Collections", "Math", "Integer", "Long", "nextInt", "nextLong", "next",
    "nextLine", "readLine", "BufferedReader", "InputStreamReader", "split",
    "parseInt", "lambda", "yield", "global", "true", "false", "null", "this",
    "switch", "case", "do", "throws", "throw", "catch", "abs", "min", "max",
    "sum", "enumerate", "zip", "dict", "set", "tuple", "final", "import",
}


def mock_backtranslate(snippet: CodeSnippet) -> str:
    """Rename user identifiers deterministically; structure preserved."""
    from .frontend.mask import mask_java, mask_python

    masked = (
        mask_python(snippet.source)
        if snippet.language is Language.PYTHON
        else mask_java(snippet.source)
    )
    names: dict[str, str] = {}
    pieces: list[str] = []
    last = 0
    for m in re.finditer(r"[A-Za-z_]\w*", masked):
        word = snippet.source[m.start() : m.end()]
        if word != m.group(0) or word in _RENAME_SKIP:
            continue
        prev = masked[m.start() - 1] if m.start() else ""
        if prev == ".":
            continue  # attribute/method names stay
        if word not in names:
            names[word] = f"{word}_v{len(names) % 7}"
        pieces.append(snippet.source[last : m.start()])
        pieces.append(names[word])
        last = m.end()
    pieces.append(snippet.source[last:])
    return "".join(pieces)
