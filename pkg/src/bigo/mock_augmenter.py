"""Deterministic stand-in augmenter speaking the back-translation protocol.

Renames user identifiers (structure untouched), which satisfies the
"parses and differs from the original" validation without an LLM. Run as
``python -m bigo.mock_augmenter``.
"""

from __future__ import annotations

import json
import sys

from .augment import mock_backtranslate
from .core import CodeSnippet, Language


def serve(stdin=None, stdout=None) -> None:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            req = json.loads(line)
            if req.get("op") != "backtranslate":
                reply = {"id": req.get("id"), "error": f"unknown op {req.get('op')!r}"}
            else:
                snippet = CodeSnippet(
                    id=str(req["id"]),
                    source=req["code"],
                    language=Language(req["language"]),
                )
                reply = {"id": snippet.id, "code": mock_backtranslate(snippet)}
        except Exception as exc:  # keep serving; report per-request errors
            reply = {"id": None, "error": str(exc)}
        stdout.write(json.dumps(reply) + "\n")
        stdout.flush()


if __name__ == "__main__":
    serve()
