"""External classifier and augmenter processes over line-delimited JSON.

Both protocols run over a spawned subprocess's standard streams, one JSON
object per line, one response per request, in order.

Classifier protocol:
    {"op":"hello"}                                -> {"classes":[...]}
    {"op":"fit","examples":[...],"seed":N}        -> {"ok":true}
    {"op":"predict","examples":[...]}             -> {"predictions":[...]}

Augmenter protocol:
    {"op":"backtranslate","id":...,"language":...,"code":...}
        -> {"id":...,"code":...} or {"id":...,"error":...}
"""

from __future__ import annotations

import json
import os
import subprocess
from typing import Optional, Sequence

from .augment import AugmenterError
from .classifier import ClassDistribution
from .core import CodeSnippet, ComplexityClass, LabeledExample

TIMEOUT_ENV_VAR = "BIGO_SUBPROC_TIMEOUT"
_DEFAULT_TIMEOUT = 60.0


class BackendUnavailable(Exception):
    pass


class ProtocolViolation(Exception):
    pass


def _timeout() -> float:
    return float(os.environ.get(TIMEOUT_ENV_VAR, _DEFAULT_TIMEOUT))


class _LineProcess:
    def __init__(self, command: Sequence[str]):
        self.command = list(command)
        try:
            self.proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
            )
        except OSError as exc:
            raise BackendUnavailable(f"cannot spawn {self.command!r}: {exc}") from exc

    def request(self, payload: dict) -> dict:
        if self.proc.poll() is not None:
            raise BackendUnavailable(f"{self.command!r} exited early")
        try:
            self.proc.stdin.write(json.dumps(payload) + "\n")
            self.proc.stdin.flush()
            line = self.proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise BackendUnavailable(str(exc)) from exc
        if not line:
            raise BackendUnavailable(f"{self.command!r} closed its output")
        try:
            return json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolViolation(f"invalid JSON from backend: {line!r}") from exc

    def close(self) -> None:
        if self.proc.poll() is None:
            try:
                self.proc.stdin.close()
                self.proc.wait(timeout=_timeout())
            except (OSError, subprocess.TimeoutExpired):
                self.proc.kill()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class ExternalClassifier:
    """Protocol adapter with the same observable contract as BuiltinModel."""

    def __init__(self, command: Sequence[str], class_set: Sequence[ComplexityClass]):
        self.class_set = tuple(class_set)
        self.io = _LineProcess(command)
        self.fitted = False
        reply = self.io.request({"op": "hello"})
        names = reply.get("classes")
        if not isinstance(names, list):
            raise ProtocolViolation(f"bad hello reply: {reply!r}")
        try:
            got = [ComplexityClass.from_name(n) for n in names]
        except ValueError as exc:
            raise ProtocolViolation(str(exc)) from exc
        if set(got) != set(self.class_set):
            raise ProtocolViolation(
                f"backend classes {names} do not match the experiment class set"
            )

    def fit(self, labeled: Sequence[LabeledExample], seed: int) -> "ExternalClassifier":
        reply = self.io.request(
            {
                "op": "fit",
                "examples": [
                    {
                        "id": ex.snippet.id,
                        "code": ex.snippet.source,
                        "language": ex.snippet.language.value,
                        "label": ex.label.serialized,
                    }
                    for ex in labeled
                ],
                "seed": seed,
            }
        )
        if not reply.get("ok"):
            raise ProtocolViolation(f"fit failed: {reply!r}")
        self.fitted = True
        return self

    def predict_many(self, snippets: Sequence[CodeSnippet]) -> list[ClassDistribution]:
        reply = self.io.request(
            {
                "op": "predict",
                "examples": [
                    {"id": s.id, "code": s.source, "language": s.language.value}
                    for s in snippets
                ],
            }
        )
        preds = reply.get("predictions")
        if not isinstance(preds, list) or len(preds) != len(snippets):
            raise ProtocolViolation(f"bad predict reply: {reply!r}")
        by_id = {}
        for p in preds:
            probs = {
                ComplexityClass.from_name(name): float(v)
                for name, v in p.get("probs", {}).items()
            }
            if set(probs) != set(self.class_set):
                raise ProtocolViolation(f"prediction support mismatch: {p!r}")
            if abs(sum(probs.values()) - 1.0) > 1e-6:
                raise ProtocolViolation(
                    f"probabilities sum to {sum(probs.values())}: {p!r}"
                )
            by_id[p["id"]] = ClassDistribution(probs)
        try:
            return [by_id[s.id] for s in snippets]
        except KeyError as exc:
            raise ProtocolViolation(f"missing prediction for id {exc}") from None

    def predict(self, snippet: CodeSnippet) -> ClassDistribution:
        return self.predict_many([snippet])[0]

    def close(self) -> None:
        self.io.close()


class ExternalAugmenter:
    """Back-translation over the augmenter wire protocol."""

    def __init__(self, command: Sequence[str]):
        self.io = _LineProcess(command)

    def __call__(self, snippet: CodeSnippet) -> str:
        try:
            reply = self.io.request(
                {
                    "op": "backtranslate",
                    "id": snippet.id,
                    "language": snippet.language.value,
                    "code": snippet.source,
                }
            )
        except (BackendUnavailable, ProtocolViolation) as exc:
            raise AugmenterError(str(exc)) from exc
        if "error" in reply:
            raise AugmenterError(str(reply["error"]))
        code = reply.get("code")
        if not isinstance(code, str):
            raise AugmenterError(f"bad backtranslate reply: {reply!r}")
        return code

    def close(self) -> None:
        self.io.close()
