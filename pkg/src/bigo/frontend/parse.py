"""Language dispatch for the structural parsers."""

from __future__ import annotations

from ..core import CodeSnippet, Language
from .ir import StructuralIR
from .javaparse import parse_java
from .pyparse import parse_python


def parse(snippet: CodeSnippet) -> StructuralIR:
    if snippet.language is Language.PYTHON:
        return parse_python(snippet)
    if snippet.language is Language.JAVA:
        return parse_java(snippet)
    raise ValueError(f"unsupported language: {snippet.language}")
