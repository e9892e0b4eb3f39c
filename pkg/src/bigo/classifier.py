"""Built-in trainable classifier: n-gram multinomial logistic regression.

Deterministic, warm-startable, and honest about its confidences: the
softmax outputs feed the pseudo-label threshold rule, so no calibration
tricks. External (e.g. neural) classifiers plug in through the wire
protocol in ``backends``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .core import CodeSnippet, ComplexityClass, LabeledExample

MODEL_FORMAT_VERSION = 1


class EmptyTrainingSet(Exception):
    pass


class UnfittedModel(Exception):
    pass


@dataclass(frozen=True)
class ClassDistribution:
    probs: Mapping[ComplexityClass, float]

    def __post_init__(self):
        total = sum(self.probs.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total}, not 1")

    @property
    def argmax(self) -> ComplexityClass:
        return max(self.probs, key=lambda c: (self.probs[c], -c.value))

    @property
    def confidence(self) -> float:
        return self.probs[self.argmax]


_TOKEN_RE = re.compile(
    r"[A-Za-z_]\w*"
    r"|\d+\.?\d*"
    r"|==|!=|<=|>=|<<|>>|\*\*|//|\+\+|--|\+=|-=|\*=|/=|%=|&&|\|\||->|:=|::"
    r"|\S"
)

# tokens kept verbatim; everything else abstracts to ID so the model learns
# structure, not variable naming
_KEEP = {
    "for", "while", "if", "elif", "else", "def", "return", "in", "is", "not",
    "and", "or", "break", "continue", "pass", "import", "from", "class",
    "try", "except", "finally", "with", "lambda", "yield", "global", "print",
    "input", "int", "str", "float", "list", "dict", "set", "tuple", "map",
    "len", "range", "sorted", "sort", "append", "pop", "sum", "min", "max",
    "abs", "enumerate", "zip", "count", "split", "join", "True", "False",
    "None", "public", "private", "protected", "static", "final", "void",
    "new", "this", "super", "null", "true", "false", "do", "switch", "case",
    "throws", "throw", "catch", "long", "double", "boolean", "char", "byte",
    "short", "String", "System", "out", "println", "Scanner", "Arrays",
    "Collections", "Math", "Integer", "Long", "next", "nextInt", "nextLong",
    "nextLine", "readLine", "BufferedReader", "StringTokenizer", "length",
    "size", "add", "get", "put", "pow", "sqrt", "binarySearch", "bisect",
    "main", "args", "stdin", "sys", "hasNext", "hasMoreTokens", "parseInt",
}


def tokenize(snippet: CodeSnippet, ngram_max: int = 2) -> list[str]:
    """Unigrams and n-grams over a keyword/operator-preserving lexing."""
    from .frontend.mask import mask_java, mask_python
    from .core import Language

    masked = (
        mask_python(snippet.source)
        if snippet.language is Language.PYTHON
        else mask_java(snippet.source)
    )
    base: list[str] = []
    for m in _TOKEN_RE.finditer(masked):
        tok = m.group(0)
        if tok[0].isdigit():
            base.append("NUM")
        elif tok == "s" * len(tok) and masked[m.start()] != snippet.source[m.start()]:
            base.append("STR")
        elif re.match(r"[A-Za-z_]", tok):
            base.append(tok if tok in _KEEP else "ID")
        else:
            base.append(tok)
    out = list(base)
    for n in range(2, ngram_max + 1):
        out.extend("_".join(base[i : i + n]) for i in range(len(base) - n + 1))
    return out


@dataclass
class Hyperparams:
    learning_rate: float = 0.1
    epochs_per_fit: int = 50
    l2: float = 1e-4
    ngram_max: int = 2
    batch_size: int = 32


class BuiltinModel:
    """Multinomial logistic regression over n-gram count features.

    ``fit`` warm-starts from the current weights; the vocabulary grows as
    new tokens appear, with zero-initialized columns.
    """

    def __init__(
        self,
        class_set: Sequence[ComplexityClass],
        hyperparams: Optional[Hyperparams] = None,
    ):
        self.class_set = tuple(class_set)
        self.hp = hyperparams or Hyperparams()
        self.vocab: dict[str, int] = {}
        self.weights: Optional[np.ndarray] = None  # (C, V)
        self.bias: Optional[np.ndarray] = None  # (C,)
        self.fitted = False

    # -- features ----------------------------------------------------------
    def _grow_vocab(self, token_lists: Iterable[list[str]]) -> None:
        for toks in token_lists:
            for t in toks:
                if t not in self.vocab:
                    self.vocab[t] = len(self.vocab)
        v = len(self.vocab)
        if self.weights is None:
            self.weights = np.zeros((len(self.class_set), v))
            self.bias = np.zeros(len(self.class_set))
        elif self.weights.shape[1] < v:
            pad = np.zeros((len(self.class_set), v - self.weights.shape[1]))
            self.weights = np.hstack([self.weights, pad])

    def _featurize(self, token_lists: Sequence[list[str]]) -> np.ndarray:
        x = np.zeros((len(token_lists), len(self.vocab)))
        for i, toks in enumerate(token_lists):
            for t in toks:
                j = self.vocab.get(t)
                if j is not None:
                    x[i, j] += 1.0
        norms = np.linalg.norm(x, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        return x / norms

    # -- training ----------------------------------------------------------
    def loss_and_grad(
        self, x: np.ndarray, y: np.ndarray, weights: np.ndarray, bias: np.ndarray
    ) -> tuple[float, np.ndarray, np.ndarray]:
        """Mean cross-entropy + L2 penalty, with analytic gradients."""
        logits = x @ weights.T + bias
        logits -= logits.max(axis=1, keepdims=True)
        exp = np.exp(logits)
        probs = exp / exp.sum(axis=1, keepdims=True)
        n = x.shape[0]
        nll = -np.log(probs[np.arange(n), y] + 1e-300).mean()
        loss = nll + 0.5 * self.hp.l2 * float((weights**2).sum())
        delta = probs
        delta[np.arange(n), y] -= 1.0
        grad_w = delta.T @ x / n + self.hp.l2 * weights
        grad_b = delta.mean(axis=0)
        return loss, grad_w, grad_b

    def fit(self, labeled: Sequence[LabeledExample], seed: int) -> "BuiltinModel":
        if not labeled:
            raise EmptyTrainingSet("cannot fit on an empty labeled set")
        class_index = {c: i for i, c in enumerate(self.class_set)}
        for ex in labeled:
            if ex.label not in class_index:
                raise ValueError(f"label {ex.label} outside the class set")
        token_lists = [tokenize(ex.snippet, self.hp.ngram_max) for ex in labeled]
        self._grow_vocab(token_lists)
        x = self._featurize(token_lists)
        y = np.array([class_index[ex.label] for ex in labeled])

        rng = np.random.default_rng(seed)
        n = len(labeled)
        for _ in range(self.hp.epochs_per_fit):
            order = rng.permutation(n)
            for start in range(0, n, self.hp.batch_size):
                idx = order[start : start + self.hp.batch_size]
                _, gw, gb = self.loss_and_grad(x[idx], y[idx], self.weights, self.bias)
                self.weights -= self.hp.learning_rate * gw
                self.bias -= self.hp.learning_rate * gb
        self.fitted = True
        return self

    # -- inference ---------------------------------------------------------
    def predict(self, snippet: CodeSnippet) -> ClassDistribution:
        return self.predict_many([snippet])[0]

    def predict_many(self, snippets: Sequence[CodeSnippet]) -> list[ClassDistribution]:
        if not self.fitted:
            raise UnfittedModel("predict before fit")
        return self._distributions(snippets)

    def _distributions(self, snippets: Sequence[CodeSnippet]) -> list[ClassDistribution]:
        token_lists = [tokenize(s, self.hp.ngram_max) for s in snippets]
        x = self._featurize(token_lists)
        logits = x @ self.weights.T + self.bias
        logits -= logits.max(axis=1, keepdims=True)
        exp = np.exp(logits)
        probs = exp / exp.sum(axis=1, keepdims=True)
        out = []
        for row in probs:
            row = row / row.sum()
            out.append(
                ClassDistribution(
                    {c: float(p) for c, p in zip(self.class_set, row)}
                )
            )
        return out

    # -- persistence -------------------------------------------------------
    def save(self, path: str | Path) -> None:
        payload = {
            "format_version": MODEL_FORMAT_VERSION,
            "classes": [c.serialized for c in self.class_set],
            "hyperparams": vars(self.hp),
            "vocab": self.vocab,
            "weights": self.weights.tolist() if self.weights is not None else None,
            "bias": self.bias.tolist() if self.bias is not None else None,
            "fitted": self.fitted,
        }
        Path(path).write_text(json.dumps(payload))

    @classmethod
    def load(cls, path: str | Path) -> "BuiltinModel":
        payload = json.loads(Path(path).read_text())
        if payload.get("format_version") != MODEL_FORMAT_VERSION:
            raise ValueError(
                f"unsupported model format: {payload.get('format_version')}"
            )
        model = cls(
            [ComplexityClass.from_name(n) for n in payload["classes"]],
            Hyperparams(**payload["hyperparams"]),
        )
        model.vocab = dict(payload["vocab"])
        if payload["weights"] is not None:
            model.weights = np.array(payload["weights"])
            model.bias = np.array(payload["bias"])
        model.fitted = payload["fitted"]
        return model
