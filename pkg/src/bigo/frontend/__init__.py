"""Structural IR over a Java/Python subset: functions, loops, calls.

The parsers are deliberately shallow. They capture the constructs the
complexity analyzer and the loop-conversion rewriter care about (function
definitions, for/while loops, branches, calls, sorts, assignments, returns)
and map everything else to ``OTHER`` statements that still carry their raw
text, so source can always be reassembled verbatim.
"""

from .ir import (
    FunctionUnit,
    ParseError,
    Statement,
    StatementBlock,
    StmtKind,
    StructuralIR,
    extract_functions,
)
from .parse import parse

__all__ = [
    "FunctionUnit",
    "ParseError",
    "Statement",
    "StatementBlock",
    "StmtKind",
    "StructuralIR",
    "extract_functions",
    "parse",
]
