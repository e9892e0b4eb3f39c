"""Symbolic time-complexity analysis over the structural IR.

The pipeline runs five phases: function extraction, loop/recursion
detection, special-operation detection (sorts, binary traversals), cost
aggregation over a small term algebra, and classification into one of the
seven complexity classes. Costs of called functions are inlined at their
call sites; direct recursion is solved by a three-pattern heuristic table
(decrementing, halving, branching).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

from .core import CodeSnippet, ComplexityClass, Language
from .frontend import (
    FunctionUnit,
    ParseError,
    Statement,
    StatementBlock,
    StmtKind,
    StructuralIR,
    parse,
)


class AnalysisUnavailable(Exception):
    """Parse failed; callers treat this as "no symbolic label"."""


class TermKind(Enum):
    ONE = 0
    LOG = 1
    N = 2
    NLOG = 3
    N2 = 4
    N3 = 5
    EXP = 6

    @property
    def pretty(self) -> str:
        return _PRETTY[self]

    def to_class(self) -> ComplexityClass:
        return ComplexityClass(self.value)


_PRETTY = {
    TermKind.ONE: "O(1)",
    TermKind.LOG: "O(log N)",
    TermKind.N: "O(N)",
    TermKind.NLOG: "O(N log N)",
    TermKind.N2: "O(N^2)",
    TermKind.N3: "O(N^3)",
    TermKind.EXP: "O(2^N)",
}

# (polynomial degree, log factor present)
_DEGREE = {
    TermKind.ONE: (0, False),
    TermKind.LOG: (0, True),
    TermKind.N: (1, False),
    TermKind.NLOG: (1, True),
    TermKind.N2: (2, False),
    TermKind.N3: (3, False),
}


@dataclass(frozen=True)
class ComplexityTerm:
    kind: TermKind
    trace: tuple[str, ...] = ()


ONE_TERM = ComplexityTerm(TermKind.ONE)


@dataclass(frozen=True)
class LoopInfo:
    depth: int
    cost_per_level: tuple[TermKind, ...]
    location: tuple[int, int]  # (first line, last line)

    def __post_init__(self):
        if len(self.cost_per_level) != self.depth:
            raise ValueError("cost_per_level length must equal depth")


class ArgShrink(Enum):
    DECREMENT = "decrement"
    HALVING = "halving"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class RecursionInfo:
    function: str
    self_call_count: int
    argument_shrink: ArgShrink


def combine_sequence(terms: Sequence[ComplexityTerm]) -> ComplexityTerm:
    """Sequential composition: dominance maximum over the class order."""
    if not terms:
        return ONE_TERM
    best = max(terms, key=lambda t: t.kind.value)
    trace: list[str] = []
    for t in terms:
        trace.extend(t.trace)
    if len([t for t in terms if t.kind is not TermKind.ONE]) > 1:
        parts = " + ".join(t.kind.pretty for t in terms if t.kind is not TermKind.ONE)
        trace.append(f"sequence: {parts} = {best.kind.pretty}")
    return ComplexityTerm(best.kind, tuple(trace))


def combine_nested(outer: ComplexityTerm, inner: ComplexityTerm) -> ComplexityTerm:
    """Multiplication over the term algebra (loop body under a loop)."""
    kind = _multiply(outer.kind, inner.kind)
    trace = outer.trace + inner.trace
    if outer.kind is not TermKind.ONE and inner.kind is not TermKind.ONE:
        trace = trace + (
            f"nest: {outer.kind.pretty} * {inner.kind.pretty} = {kind.pretty}",
        )
    return ComplexityTerm(kind, trace)


def _multiply(a: TermKind, b: TermKind) -> TermKind:
    if TermKind.EXP in (a, b):
        return TermKind.EXP
    da, la = _DEGREE[a]
    db, lb = _DEGREE[b]
    degree = da + db
    log = la or lb
    if degree == 0:
        return TermKind.LOG if log else TermKind.ONE
    if degree == 1:
        return TermKind.NLOG if log else TermKind.N
    if degree == 2 and not log:
        return TermKind.N2
    # (2, log), degree 3, and anything beyond cap at cubic; EXP is reserved
    # for genuinely exponential structure
    return TermKind.N3


def recursion_cost(info: RecursionInfo, body: ComplexityTerm) -> ComplexityTerm:
    """Cost of a directly recursive function given its per-call body cost."""
    if info.self_call_count >= 2:
        kind = TermKind.EXP
        why = f"{info.self_call_count} self-calls branch exponentially"
        return ComplexityTerm(
            kind,
            body.trace
            + (f"recursion {info.function}: {why} -> {kind.pretty}",),
        )
    if info.argument_shrink is ArgShrink.HALVING:
        if body.kind.value >= TermKind.N.value:
            result = ComplexityTerm(
                TermKind.NLOG,
                body.trace
                + (
                    f"recursion {info.function}: halving with "
                    f"{body.kind.pretty} body -> {TermKind.NLOG.pretty}",
                ),
            )
        else:
            result = combine_nested(
                ComplexityTerm(
                    TermKind.LOG,
                    (f"recursion {info.function}: halving -> {TermKind.LOG.pretty}",),
                ),
                body,
            )
        return result
    # DECREMENT and UNKNOWN: linear chain of calls
    return combine_nested(
        ComplexityTerm(
            TermKind.N,
            (f"recursion {info.function}: decrementing -> {TermKind.N.pretty}",),
        ),
        body,
    )


# ---------------------------------------------------------------------------
# input-size variable tracking

_PY_INPUT_SEED = re.compile(
    r"\binput\s*\(|\bstdin\b|\breadline(s)?\s*\(|\bsys\.argv\b|\bopen\s*\("
)
_JAVA_INPUT_SEED = re.compile(
    r"\bnext(Int|Long|Double|Float|Line|Token|Short|Byte|BigInteger)?\s*\("
    r"|\breadLine\s*\(|\bread\s*\(|\bargs\b|\bSystem\.in\b|\bhasNext\w*\s*\("
)

_PY_TARGET_RE = re.compile(r"^[\w\s,()\[\]*]+$")


def _assign_parts(stmt: Statement, language: Language) -> Optional[tuple[list[str], str]]:
    """(target identifiers, rhs text) for an assignment statement."""
    text = stmt.text
    depth = 0
    for i, ch in enumerate(text):
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif depth == 0 and ch == "=":
            before = text[i - 1] if i else ""
            after = text[i + 1] if i + 1 < len(text) else ""
            if after == "=" or before in "=!<>":
                continue
            lhs = text[:i].rstrip("+-*/%&|^<>@: \t")
            rhs = text[i + 1 :]
            targets = re.findall(r"[A-Za-z_]\w*", lhs)
            # java declarations carry a type; the variable is the last token
            if language is Language.JAVA and len(targets) > 1 and "," not in lhs:
                targets = targets[-1:]
            return targets, rhs
    return None


def _references(text: str, names: set[str]) -> bool:
    for m in re.finditer(r"[A-Za-z_]\w*", text):
        if m.group(0) in names:
            return True
    return False


def input_variables(
    block: StatementBlock, language: Language, seeds: Iterable[str] = ()
) -> set[str]:
    """Fixed point of "assigned from input or from an input-sized value"."""
    seed_re = _PY_INPUT_SEED if language is Language.PYTHON else _JAVA_INPUT_SEED
    names: set[str] = set(seeds)
    statements = [s for s in block.walk() if s.kind is not StmtKind.FUNCDEF]
    for _ in range(len(statements) + 1):
        changed = False
        for stmt in statements:
            if stmt.kind in (StmtKind.FOR, StmtKind.WHILE):
                bound = stmt.bound or ""
                if stmt.loop_var and (
                    seed_re.search(bound) or _references(bound, names)
                ):
                    for var in re.findall(r"[A-Za-z_]\w*", stmt.loop_var):
                        if var not in names:
                            names.add(var)
                            changed = True
                continue
            parts = _assign_parts(stmt, language)
            if not parts:
                continue
            targets, rhs = parts
            if seed_re.search(rhs) or _references(rhs, names):
                for var in targets:
                    if var not in names:
                        names.add(var)
                        changed = True
        if not changed:
            break
    return names


# ---------------------------------------------------------------------------
# loop classification

_NUMERIC_RE = re.compile(r"^[\d\s+\-*/%().,_eE]*\d[\d\s+\-*/%().,_eE]*$")
_EXP_BOUND_RE = re.compile(r"<<|\*\*|Math\.pow\s*\(\s*2")


def _is_constant_expr(text: str) -> bool:
    text = text.strip()
    return bool(text) and bool(_NUMERIC_RE.match(text))


def _mult_update_re(var: str) -> re.Pattern:
    v = re.escape(var)
    return re.compile(
        rf"\b{v}\s*(\*|//|/|>>|<<)=\s*|\b{v}\s*=\s*(\(\s*)?{v}\s*(\*|//|/|>>|<<)"
        rf"|\b{v}\s*=\s*\d+\s*\*\s*{v}\b"
    )


def _add_update_re(var: str) -> re.Pattern:
    v = re.escape(var)
    return re.compile(
        rf"\b{v}\s*[+-]=|\b{v}\s*=\s*{v}\s*[+-]|\b{v}\s*\+\+|\+\+\s*{v}\b|\b{v}\s*--|--\s*{v}\b"
    )


def _body_updates(body: Optional[StatementBlock], var: str) -> tuple[bool, bool]:
    """(has multiplicative update, has additive update) for var in the body."""
    mult = _mult_update_re(var)
    add = _add_update_re(var)
    has_mult = has_add = False
    if body is not None:
        for stmt in body.walk():
            if stmt.kind is StmtKind.FUNCDEF:
                continue
            if mult.search(stmt.text):
                has_mult = True
            if add.search(stmt.text):
                has_add = True
    return has_mult, has_add


_RANGE_RE = re.compile(r"^\s*range\s*\((.*)\)\s*$", re.S)


def loop_level_cost(
    stmt: Statement, input_vars: set[str], language: Language
) -> TermKind:
    """Iteration count class of a single loop level."""
    bound = (stmt.bound or "").strip()
    seed_re = _PY_INPUT_SEED if language is Language.PYTHON else _JAVA_INPUT_SEED

    def input_sized(text: str) -> bool:
        return bool(seed_re.search(text)) or _references(text, input_vars)

    if stmt.kind is StmtKind.FOR and language is Language.PYTHON:
        m = _RANGE_RE.match(bound)
        if m:
            from .frontend.ir import split_top_level

            args = [a.strip() for a in split_top_level(m.group(1), ",") if a.strip()]
            stop = args[0] if len(args) == 1 else (args[1] if len(args) > 1 else "")
            if _EXP_BOUND_RE.search(stop):
                return TermKind.EXP if input_sized(stop) else TermKind.ONE
            if input_sized(stop):
                return TermKind.N
            if _is_constant_expr(stop):
                return TermKind.ONE
            return TermKind.N
        if input_sized(bound):
            return TermKind.N
        if re.match(r"^\s*[\[\(\{]", bound) and not input_sized(bound):
            return TermKind.ONE  # literal collection
        return TermKind.N

    if stmt.kind is StmtKind.FOR and language is Language.JAVA:
        if stmt.enhanced:
            # collection sizes are input-sized in practice; default N
            return TermKind.N
        update = stmt.update or ""
        cond = stmt.bound or ""
        if stmt.loop_var:
            if _mult_update_re(stmt.loop_var).search(update) or (
                _body_updates(stmt.body, stmt.loop_var)[0]
            ):
                return TermKind.LOG
        if _EXP_BOUND_RE.search(cond):
            return TermKind.EXP if input_sized(cond) else TermKind.ONE
        if input_sized(cond):
            return TermKind.N
        if not cond.strip():
            return TermKind.N  # for(;;) with break
        rhs = re.split(r"<=|>=|<|>|!=|==", cond)
        if len(rhs) == 2 and (_is_constant_expr(rhs[1]) or _is_constant_expr(rhs[0])):
            return TermKind.ONE
        return TermKind.N

    # while loops, both languages
    cond_vars = [
        v
        for v in dict.fromkeys(re.findall(r"[A-Za-z_]\w*", bound))
        if v not in _COND_NOISE
    ]
    if stmt.loop_var:
        cond_vars = [stmt.loop_var] + cond_vars
    for var in cond_vars:
        has_mult, _ = _body_updates(stmt.body, var)
        if has_mult:
            return TermKind.LOG
    if re.search(r"--|\+\+", bound):  # while (t-- > 0)
        return TermKind.N if _references(bound, input_vars) else _const_or_n(bound)
    if _EXP_BOUND_RE.search(bound):
        return TermKind.EXP if _references(bound, input_vars) else TermKind.ONE
    if _references(bound, input_vars) or (
        _PY_INPUT_SEED.search(bound) or _JAVA_INPUT_SEED.search(bound)
    ):
        return TermKind.N
    # purely constant condition with additive updates counts as constant only
    # when every moving part is a literal
    sides = re.split(r"<=|>=|<|>|!=|==", bound)
    if len(sides) == 2:
        var_side = sides[0].strip() if not _is_constant_expr(sides[0]) else sides[1].strip()
        other = sides[1].strip() if var_side == sides[0].strip() else sides[0].strip()
        if _is_constant_expr(other) and re.match(r"^[A-Za-z_]\w*$", var_side):
            _, has_add = _body_updates(stmt.body, var_side)
            if has_add:
                return TermKind.ONE
    return TermKind.N


def _const_or_n(bound: str) -> TermKind:
    m = re.search(r"[A-Za-z_]\w*", bound)
    return TermKind.ONE if m is None else TermKind.N


_COND_NOISE = {
    "True", "true", "False", "false", "None", "null", "and", "or", "not",
    "len", "abs", "int", "size", "length", "hasNext", "hasMoreTokens", "isEmpty",
    "in", "is",
}


def detect_loops(
    block: StatementBlock,
    input_vars: set[str],
    language: Language = Language.PYTHON,
) -> list[LoopInfo]:
    """One LoopInfo per maximal loop nest; per-level cost along the deepest path."""
    infos: list[LoopInfo] = []

    def chain(stmt: Statement) -> tuple[list[TermKind], int]:
        level = loop_level_cost(stmt, input_vars, language)
        deepest: list[TermKind] = []
        last_line = stmt.end_line or stmt.line
        if stmt.body is not None:
            for inner in _direct_loops(stmt.body):
                costs, end = chain(inner)
                if len(costs) > len(deepest):
                    deepest = costs
                last_line = max(last_line, end)
        return [level] + deepest, last_line

    for loop in _direct_loops(block):
        costs, end = chain(loop)
        infos.append(
            LoopInfo(depth=len(costs), cost_per_level=tuple(costs), location=(loop.line, end))
        )
    return infos


def _direct_loops(block: StatementBlock) -> list[Statement]:
    """Loops reachable without crossing another loop or a function definition."""
    found: list[Statement] = []

    def visit(b: StatementBlock):
        for stmt in b.statements:
            if stmt.kind in (StmtKind.FOR, StmtKind.WHILE):
                found.append(stmt)
            elif stmt.kind is not StmtKind.FUNCDEF and stmt.body is not None:
                visit(stmt.body)

    visit(block)
    return found


# ---------------------------------------------------------------------------
# recursion and special-operation detection

_SORT_RE = re.compile(r"\bsorted\s*\(|\.sort\s*\(|\b(Arrays|Collections)\s*\.\s*sort\s*\(")
_BINSEARCH_RE = re.compile(
    r"\bbisect(?:_left|_right)?\s*\(|\bbinarySearch\s*\(|\bbinary_search\s*\("
)


def detect_special_tc(block: StatementBlock) -> list[ComplexityTerm]:
    """Sort and binary-traversal idioms anywhere in the block (not nested-
    loop adjusted; analyze() applies loop multiplication at the right spot)."""
    terms: list[ComplexityTerm] = []
    for stmt in block.walk():
        if stmt.kind is StmtKind.FUNCDEF:
            continue
        terms.extend(_statement_specials(stmt))
    return terms


def _statement_specials(stmt: Statement) -> list[ComplexityTerm]:
    terms = []
    for _ in _SORT_RE.findall(stmt.text):
        terms.append(
            ComplexityTerm(
                TermKind.NLOG, (f"sort call line {stmt.line}: {TermKind.NLOG.pretty}",)
            )
        )
    for _ in _BINSEARCH_RE.findall(stmt.text):
        terms.append(
            ComplexityTerm(
                TermKind.LOG,
                (f"binary search line {stmt.line}: {TermKind.LOG.pretty}",),
            )
        )
    return terms


def detect_recursion(ir: StructuralIR) -> list[RecursionInfo]:
    infos = []
    for f in ir.functions:
        info = _recursion_for(f)
        if info is not None:
            infos.append(info)
    return infos


def _recursion_for(f: FunctionUnit) -> Optional[RecursionInfo]:
    count = sum(1 for name, _ in f.call_sites if name == f.name)
    if count == 0:
        return None
    shrink = ArgShrink.UNKNOWN
    call_re = re.compile(rf"\b{re.escape(f.name)}\s*\(([^()]*(?:\([^()]*\)[^()]*)*)\)")
    args_seen: list[str] = []
    for stmt in f.body.walk():
        if stmt.kind is StmtKind.FUNCDEF:
            continue
        for m in call_re.finditer(stmt.text):
            args_seen.append(m.group(1))
    joined = " | ".join(args_seen)
    if re.search(r"/\s*2|//\s*2|>>\s*1", joined):
        shrink = ArgShrink.HALVING
    elif re.search(r"-\s*\w+", joined) or re.search(r"\w+\s*-", joined):
        shrink = ArgShrink.DECREMENT
    return RecursionInfo(function=f.name, self_call_count=count, argument_shrink=shrink)


# ---------------------------------------------------------------------------
# end-to-end analysis

class _Analyzer:
    def __init__(self, ir: StructuralIR):
        self.ir = ir
        self.language = ir.language
        self.memo: dict[str, ComplexityTerm] = {}
        self.by_name = {f.name: f for f in ir.functions}

    def function_cost(self, f: FunctionUnit, stack: frozenset[str]) -> ComplexityTerm:
        if f.name in self.memo:
            return self.memo[f.name]
        if f.name in stack:
            return ONE_TERM  # mutual recursion: out of scope, treated as flat
        stack = stack | {f.name}
        vars_ = input_variables(f.body, self.language, seeds=f.params)
        body = self.block_cost(f.body, vars_, skip_self=f.name, stack=stack)
        rec = _recursion_for(f)
        cost = recursion_cost(rec, body) if rec is not None else body
        cost = ComplexityTerm(
            cost.kind,
            cost.trace + (f"function {f.name}: {cost.kind.pretty}",),
        )
        self.memo[f.name] = cost
        return cost

    def block_cost(
        self,
        block: StatementBlock,
        input_vars: set[str],
        skip_self: Optional[str],
        stack: frozenset[str],
    ) -> ComplexityTerm:
        terms = [
            self.statement_cost(s, input_vars, skip_self, stack)
            for s in block.statements
        ]
        return combine_sequence([t for t in terms if t is not None])

    def statement_cost(
        self,
        stmt: Statement,
        input_vars: set[str],
        skip_self: Optional[str],
        stack: frozenset[str],
    ) -> Optional[ComplexityTerm]:
        if stmt.kind is StmtKind.FUNCDEF:
            return None
        own = _statement_specials(stmt)
        own.extend(self.call_costs(stmt, skip_self, stack))

        if stmt.kind in (StmtKind.FOR, StmtKind.WHILE):
            level_kind = loop_level_cost(stmt, input_vars, self.language)
            level = ComplexityTerm(
                level_kind, (f"loop line {stmt.line}: {level_kind.pretty}",)
            )
            inner = (
                self.block_cost(stmt.body, input_vars, skip_self, stack)
                if stmt.body is not None
                else ONE_TERM
            )
            per_iter = combine_sequence([t for t in [inner] + own if t.trace or t.kind is not TermKind.ONE] or [ONE_TERM])
            return combine_nested(level, per_iter)

        if stmt.body is not None:  # branches, class bodies
            own.append(self.block_cost(stmt.body, input_vars, skip_self, stack))
        if not own:
            return ONE_TERM
        return combine_sequence(own)

    def call_costs(
        self, stmt: Statement, skip_self: Optional[str], stack: frozenset[str]
    ) -> list[ComplexityTerm]:
        costs = []
        for name, _argc in stmt.calls:
            if name == skip_self:
                continue
            callee = self.by_name.get(name)
            if callee is None:
                continue
            cost = self.function_cost(callee, stack)
            costs.append(
                ComplexityTerm(
                    cost.kind,
                    cost.trace + (f"call {name} line {stmt.line}: {cost.kind.pretty}",),
                )
            )
        return costs


def analyze_ir(ir: StructuralIR) -> tuple[ComplexityClass, tuple[str, ...]]:
    analyzer = _Analyzer(ir)
    top_vars = input_variables(ir.top_level, ir.language)
    executable = [
        s for s in ir.top_level.statements if s.kind is not StmtKind.FUNCDEF
    ]
    if executable:
        total = analyzer.block_cost(
            ir.top_level, top_vars, skip_self=None, stack=frozenset()
        )
    elif ir.functions:
        # definition-only snippet: report the heaviest function
        costs = [analyzer.function_cost(f, frozenset()) for f in ir.functions]
        total = max(costs, key=lambda t: t.kind.value)
    else:
        total = ONE_TERM
    trace = total.trace + (f"total: {total.kind.pretty}",)
    return total.kind.to_class(), trace


def analyze(snippet: CodeSnippet) -> tuple[ComplexityClass, tuple[str, ...]]:
    """End-to-end symbolic classification of one snippet."""
    try:
        ir = parse(snippet)
    except ParseError as exc:
        raise AnalysisUnavailable(str(exc)) from exc
    return analyze_ir(ir)


def try_analyze(snippet: CodeSnippet) -> Optional[ComplexityClass]:
    try:
        return analyze(snippet)[0]
    except AnalysisUnavailable:
        return None
