"""Seeded synthetic corpus of labeled Python snippets.

Each complexity class has a few program templates; identifiers, literal
constants, and decoy statements (constant-bound loops, unused helper
functions) are randomized so the corpus is not trivially separable by
surface tokens alone.
"""

from __future__ import annotations

import random
from typing import Callable, Optional, Sequence

from .core import ALL_CLASSES, CodeSnippet, ComplexityClass, Dataset, LabeledExample, Language

_NAMES = [
    "total", "acc", "result", "best", "count", "value", "score", "answer",
    "left", "right", "top", "cur", "tmp", "item", "node", "probe", "mark",
]
_LOOPVARS = ["i", "j", "k", "t", "p", "q", "u", "v", "w"]
_FUNCS = ["solve", "work", "process", "compute", "run", "evaluate", "handle"]


class _Ctx:
    """Per-snippet naming context so templates never collide on names."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.names = rng.sample(_NAMES, 6)
        self.vars = rng.sample(_LOOPVARS, 4)
        self.func = rng.choice(_FUNCS)
        self.const = rng.randrange(2, 40)

    def decoy_loop(self) -> str:
        # constant-bound loop: contributes O(1) but adds loop-shaped tokens
        v = self.vars[3]
        return (
            f"for {v} in range({self.rng.randrange(2, 9)}):\n"
            f"    {self.names[5]} = {v} * {self.rng.randrange(1, 5)}\n"
        )

    def decoy_func(self) -> str:
        # defined but never called; the analyzer ignores it, tokens remain
        name = f"{self.func}_unused"
        return (
            f"def {name}(x):\n"
            f"    return x + {self.rng.randrange(1, 9)}\n"
        )


def _constant(c: _Ctx) -> str:
    a, b = c.names[0], c.names[1]
    return (
        f"{a} = int(input())\n"
        f"{b} = {a} * {c.const} + {c.rng.randrange(1, 7)}\n"
        f"print({b} % {c.const + 1})\n"
    )


def _constant_branch(c: _Ctx) -> str:
    a = c.names[0]
    return (
        f"{a} = int(input())\n"
        f"if {a} > {c.const}:\n"
        f"    print({a} - {c.const})\n"
        f"else:\n"
        f"    print({a} + {c.const})\n"
    )


def _logn(c: _Ctx) -> str:
    a, b = c.names[0], c.names[1]
    return (
        f"{a} = int(input())\n"
        f"{b} = 0\n"
        f"while {a} > 1:\n"
        f"    {a} = {a} // 2\n"
        f"    {b} += 1\n"
        f"print({b})\n"
    )


def _logn_binary_search(c: _Ctx) -> str:
    # true O(log N), but halving happens through lo/hi narrowing that static
    # loop heuristics tend to misjudge — keeps the corpus honest
    a = c.names[0]
    return (
        f"{a} = int(input())\n"
        f"lo = 0\n"
        f"hi = {a}\n"
        f"while lo < hi:\n"
        f"    mid = (lo + hi) // 2\n"
        f"    if mid * mid < {a}:\n"
        f"        lo = mid + 1\n"
        f"    else:\n"
        f"        hi = mid\n"
        f"print(lo)\n"
    )


def _logn_doubling(c: _Ctx) -> str:
    a, b = c.names[0], c.names[1]
    return (
        f"{a} = int(input())\n"
        f"{b} = 1\n"
        f"while {b} < {a}:\n"
        f"    {b} = {b} * 2\n"
        f"print({b})\n"
    )


def _linear(c: _Ctx) -> str:
    a, b, v = c.names[0], c.names[1], c.vars[0]
    return (
        f"{a} = int(input())\n"
        f"{b} = 0\n"
        f"for {v} in range({a}):\n"
        f"    {b} += {v} % {c.const}\n"
        f"print({b})\n"
    )


def _linear_scan(c: _Ctx) -> str:
    a, b, v = c.names[0], c.names[1], c.vars[0]
    return (
        f"{a} = list(map(int, input().split()))\n"
        f"{b} = 0\n"
        f"for {v} in {a}:\n"
        f"    if {v} > {b}:\n"
        f"        {b} = {v}\n"
        f"print({b})\n"
    )


def _nlogn(c: _Ctx) -> str:
    a, b, v = c.names[0], c.names[1], c.vars[0]
    return (
        f"{a} = list(map(int, input().split()))\n"
        f"{a} = sorted({a})\n"
        f"{b} = 0\n"
        f"for {v} in {a}:\n"
        f"    {b} += {v}\n"
        f"print({b})\n"
    )


def _nlogn_halving_inner(c: _Ctx) -> str:
    a, b, v = c.names[0], c.names[1], c.vars[0]
    return (
        f"{a} = int(input())\n"
        f"{b} = 0\n"
        f"for {v} in range({a}):\n"
        f"    step = {a}\n"
        f"    while step > 1:\n"
        f"        step = step // 2\n"
        f"        {b} += 1\n"
        f"print({b})\n"
    )


def _quadratic(c: _Ctx) -> str:
    a, b, v, w = c.names[0], c.names[1], c.vars[0], c.vars[1]
    return (
        f"{a} = int(input())\n"
        f"{b} = 0\n"
        f"for {v} in range({a}):\n"
        f"    for {w} in range({a}):\n"
        f"        {b} += {v} * {w}\n"
        f"print({b})\n"
    )


def _quadratic_triangle(c: _Ctx) -> str:
    a, b, v, w = c.names[0], c.names[1], c.vars[0], c.vars[1]
    return (
        f"{a} = int(input())\n"
        f"{b} = 0\n"
        f"for {v} in range({a}):\n"
        f"    for {w} in range({v}, {a}):\n"
        f"        {b} += 1\n"
        f"print({b})\n"
    )


def _quadratic_count(c: _Ctx) -> str:
    # true O(N^2): list.count is linear and runs once per element, an
    # implicit loop that static analysis commonly misses
    a, b, v = c.names[0], c.names[1], c.vars[0]
    return (
        f"{a} = list(map(int, input().split()))\n"
        f"{b} = 0\n"
        f"for {v} in {a}:\n"
        f"    {b} += {a}.count({v})\n"
        f"print({b})\n"
    )


def _cubic(c: _Ctx) -> str:
    a, b, v, w, x = c.names[0], c.names[1], c.vars[0], c.vars[1], c.vars[2]
    return (
        f"{a} = int(input())\n"
        f"{b} = 0\n"
        f"for {v} in range({a}):\n"
        f"    for {w} in range({a}):\n"
        f"        for {x} in range({a}):\n"
        f"            {b} += {v} + {w} + {x}\n"
        f"print({b})\n"
    )


def _cubic_call(c: _Ctx) -> str:
    a, b, v, w = c.names[0], c.names[1], c.vars[0], c.vars[1]
    f = c.func
    return (
        f"def {f}(n):\n"
        f"    s = 0\n"
        f"    for {w} in range(n):\n"
        f"        s += {w}\n"
        f"    return s\n"
        f"{a} = int(input())\n"
        f"{b} = 0\n"
        f"for {v} in range({a}):\n"
        f"    for {w} in range({a}):\n"
        f"        {b} += {f}({a})\n"
        f"print({b})\n"
    )


def _exponential(c: _Ctx) -> str:
    a, b, v = c.names[0], c.names[1], c.vars[0]
    return (
        f"{a} = int(input())\n"
        f"{b} = 0\n"
        f"for {v} in range(1 << {a}):\n"
        f"    {b} += {v} % 2\n"
        f"print({b})\n"
    )


def _exponential_fib(c: _Ctx) -> str:
    a = c.names[0]
    f = c.func
    return (
        f"def {f}(n):\n"
        f"    if n <= 1:\n"
        f"        return n\n"
        f"    return {f}(n - 1) + {f}(n - 2)\n"
        f"{a} = int(input())\n"
        f"print({f}({a}))\n"
    )


_TEMPLATES: dict[ComplexityClass, list[Callable[[_Ctx], str]]] = {
    ComplexityClass.CONSTANT: [_constant, _constant_branch],
    ComplexityClass.LOGN: [_logn, _logn_doubling, _logn_binary_search],
    ComplexityClass.LINEAR: [_linear, _linear_scan],
    ComplexityClass.NLOGN: [_nlogn, _nlogn_halving_inner],
    ComplexityClass.QUADRATIC: [_quadratic, _quadratic_triangle, _quadratic_count],
    ComplexityClass.CUBIC: [_cubic, _cubic_call],
    ComplexityClass.EXPONENTIAL: [_exponential, _exponential_fib],
}


def generate_snippet(
    cls: ComplexityClass, rng: random.Random, snippet_id: str
) -> LabeledExample:
    ctx = _Ctx(rng)
    template = rng.choice(_TEMPLATES[cls])
    body = template(ctx)
    parts = []
    if rng.random() < 0.5:
        parts.append(ctx.decoy_func())
    parts.append(body)
    if rng.random() < 0.5:
        parts.append(ctx.decoy_loop())
    source = "\n".join(parts)
    snippet = CodeSnippet(id=snippet_id, source=source, language=Language.PYTHON)
    return LabeledExample(snippet, cls)


def generate_corpus(
    per_class: int,
    seed: int,
    class_set: Sequence[ComplexityClass] = ALL_CLASSES,
    prefix: str = "syn",
) -> Dataset:
    """``per_class`` labeled snippets per class, deterministic in ``seed``."""
    rng = random.Random(seed)
    examples = []
    for cls in class_set:
        for i in range(per_class):
            examples.append(
                generate_snippet(cls, rng, f"{prefix}-{cls.serialized}-{i:04d}")
            )
    return Dataset(examples=tuple(examples), class_set=tuple(class_set))
