"""Domain types, the complexity-class lattice, dataset handling, and metrics.

Everything here is an immutable value object shared by the rest of the
package. Datasets live on disk as JSON Lines, one object per line:
``{"id": ..., "code": ..., "language": "java"|"python", "label": ...}``
where ``label`` is optional.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence


class ComplexityClass(Enum):
    """The seven ordered complexity classes, O(1) through O(2^N)."""

    CONSTANT = 0
    LOGN = 1
    LINEAR = 2
    NLOGN = 3
    QUADRATIC = 4
    CUBIC = 5
    EXPONENTIAL = 6

    @property
    def serialized(self) -> str:
        return _CLASS_NAMES[self]

    @classmethod
    def from_name(cls, name: str) -> "ComplexityClass":
        try:
            return _NAME_TO_CLASS[name.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown complexity class name: {name!r}") from None

    def __lt__(self, other: "ComplexityClass") -> bool:
        return self.value < other.value

    def __le__(self, other: "ComplexityClass") -> bool:
        return self.value <= other.value

    def __gt__(self, other: "ComplexityClass") -> bool:
        return self.value > other.value

    def __ge__(self, other: "ComplexityClass") -> bool:
        return self.value >= other.value


_CLASS_NAMES = {
    ComplexityClass.CONSTANT: "constant",
    ComplexityClass.LOGN: "logn",
    ComplexityClass.LINEAR: "linear",
    ComplexityClass.NLOGN: "nlogn",
    ComplexityClass.QUADRATIC: "quadratic",
    ComplexityClass.CUBIC: "cubic",
    ComplexityClass.EXPONENTIAL: "exponential",
}
_NAME_TO_CLASS = {v: k for k, v in _CLASS_NAMES.items()}

ALL_CLASSES: tuple[ComplexityClass, ...] = tuple(ComplexityClass)


def dominates(a: ComplexityClass, b: ComplexityClass) -> ComplexityClass:
    """Join of two classes under the total order (the greater one)."""
    return a if a.value >= b.value else b


class Language(Enum):
    JAVA = "java"
    PYTHON = "python"


class DataError(Exception):
    """Malformed dataset file or record."""


@dataclass(frozen=True)
class CodeSnippet:
    id: str
    source: str
    language: Language

    def __post_init__(self) -> None:
        if not self.id:
            raise DataError("snippet id must be non-empty")
        if not self.source:
            raise DataError(f"snippet {self.id}: source must be non-empty")


@dataclass(frozen=True)
class LabeledExample:
    snippet: CodeSnippet
    label: ComplexityClass


class InsufficientClassCount(Exception):
    def __init__(self, cls: ComplexityClass, have: int, need: int):
        self.cls, self.have, self.need = cls, have, need
        super().__init__(
            f"class {cls.serialized}: have {have} examples, need {need}"
        )


class MissingPrediction(Exception):
    def __init__(self, snippet_id: str):
        self.snippet_id = snippet_id
        super().__init__(f"no prediction for gold id {snippet_id!r}")


@dataclass(frozen=True)
class Dataset:
    """A collection of labeled and/or unlabeled snippets.

    ``class_set`` is the ordered label space for the experiment (5 classes
    for CorCoD-style data, all 7 for CodeComplex-style data).
    """

    examples: tuple = ()
    class_set: tuple[ComplexityClass, ...] = ALL_CLASSES

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for ex in self.examples:
            sid = ex.snippet.id if isinstance(ex, LabeledExample) else ex.id
            if sid in seen:
                raise DataError(f"duplicate snippet id {sid!r}")
            seen.add(sid)
            if isinstance(ex, LabeledExample) and ex.label not in self.class_set:
                raise DataError(
                    f"label {ex.label.serialized} of {sid!r} not in class set"
                )

    def __len__(self) -> int:
        return len(self.examples)

    @property
    def labeled(self) -> tuple[LabeledExample, ...]:
        return tuple(e for e in self.examples if isinstance(e, LabeledExample))

    @property
    def snippets(self) -> tuple[CodeSnippet, ...]:
        return tuple(
            e.snippet if isinstance(e, LabeledExample) else e for e in self.examples
        )


def few_shot_split(
    train: Dataset, k: int, seed: int
) -> tuple[list[LabeledExample], list[CodeSnippet], dict[str, ComplexityClass]]:
    """Pick k labeled examples per class; strip labels from the rest.

    Returns ``(L, U, hidden)`` where ``hidden`` maps unlabeled ids to their
    stripped gold labels. The hidden labels exist only for pseudo-label
    quality diagnostics and never reach a classifier.
    """
    by_class: dict[ComplexityClass, list[LabeledExample]] = {
        c: [] for c in train.class_set
    }
    for ex in train.labeled:
        by_class[ex.label].append(ex)
    for c in train.class_set:
        if len(by_class[c]) < k:
            raise InsufficientClassCount(c, len(by_class[c]), k)

    rng = random.Random(seed)
    chosen: set[str] = set()
    labeled: list[LabeledExample] = []
    for c in train.class_set:
        pool = sorted(by_class[c], key=lambda e: e.snippet.id)
        for ex in rng.sample(pool, k):
            labeled.append(ex)
            chosen.add(ex.snippet.id)

    unlabeled: list[CodeSnippet] = []
    hidden: dict[str, ComplexityClass] = {}
    for ex in train.labeled:
        if ex.snippet.id not in chosen:
            unlabeled.append(ex.snippet)
            hidden[ex.snippet.id] = ex.label
    return labeled, unlabeled, hidden


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    macro_f1: float
    per_class_f1: Mapping[ComplexityClass, float]
    confusion: tuple[tuple[int, ...], ...]  # rows = gold, cols = predicted
    class_set: tuple[ComplexityClass, ...]

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "per_class_f1": {
                c.serialized: self.per_class_f1[c] for c in self.class_set
            },
            "confusion": [list(row) for row in self.confusion],
            "classes": [c.serialized for c in self.class_set],
        }


def compute_metrics(
    predictions: Mapping[str, ComplexityClass],
    gold: Sequence[LabeledExample],
    class_set: Optional[Sequence[ComplexityClass]] = None,
) -> Metrics:
    """Accuracy, per-class F1, and macro F1 from a confusion matrix.

    Classes absent from both gold and predictions contribute F1 = 0 to the
    macro average.
    """
    if class_set is None:
        class_set = ALL_CLASSES
    class_set = tuple(class_set)
    index = {c: i for i, c in enumerate(class_set)}
    n = len(class_set)
    confusion = [[0] * n for _ in range(n)]
    for ex in gold:
        if ex.snippet.id not in predictions:
            raise MissingPrediction(ex.snippet.id)
        pred = predictions[ex.snippet.id]
        confusion[index[ex.label]][index[pred]] += 1

    total = sum(sum(row) for row in confusion)
    correct = sum(confusion[i][i] for i in range(n))
    accuracy = correct / total if total else 0.0

    per_class: dict[ComplexityClass, float] = {}
    for i, c in enumerate(class_set):
        tp = confusion[i][i]
        gold_count = sum(confusion[i])
        pred_count = sum(confusion[r][i] for r in range(n))
        if gold_count + pred_count == 0:
            per_class[c] = 0.0
        else:
            per_class[c] = 2 * tp / (gold_count + pred_count)
    macro_f1 = sum(per_class.values()) / n if n else 0.0
    return Metrics(
        accuracy=accuracy,
        macro_f1=macro_f1,
        per_class_f1=per_class,
        confusion=tuple(tuple(row) for row in confusion),
        class_set=class_set,
    )


def clamp_to_class_set(
    cls: ComplexityClass, class_set: Sequence[ComplexityClass]
) -> ComplexityClass:
    """Map a class onto a restricted class set by dominance-nearest choice.

    Prefers the largest member <= cls; falls back to the smallest member
    above it (e.g. CUBIC maps to QUADRATIC on a CorCoD-style 5-class set).
    """
    if cls in class_set:
        return cls
    below = [c for c in class_set if c.value <= cls.value]
    if below:
        return max(below, key=lambda c: c.value)
    return min(class_set, key=lambda c: c.value)


def _record_to_example(rec: dict, lineno: int):
    try:
        snippet = CodeSnippet(
            id=str(rec["id"]),
            source=rec["code"],
            language=Language(rec["language"]),
        )
    except (KeyError, ValueError) as exc:
        raise DataError(f"line {lineno}: {exc}") from None
    if rec.get("label") is not None:
        try:
            return LabeledExample(snippet, ComplexityClass.from_name(rec["label"]))
        except ValueError as exc:
            raise DataError(f"line {lineno}: {exc}") from None
    return snippet


def load_jsonl(path: str | Path, class_set: Sequence[ComplexityClass] = ALL_CLASSES) -> Dataset:
    examples = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: line {lineno}: invalid JSON: {exc}") from None
            examples.append(_record_to_example(rec, lineno))
    return Dataset(examples=tuple(examples), class_set=tuple(class_set))


def dump_jsonl(examples: Iterable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            if isinstance(ex, LabeledExample):
                rec = {
                    "id": ex.snippet.id,
                    "code": ex.snippet.source,
                    "language": ex.snippet.language.value,
                    "label": ex.label.serialized,
                }
            else:
                rec = {"id": ex.id, "code": ex.source, "language": ex.language.value}
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
