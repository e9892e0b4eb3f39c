"""Semi-supervised training engine.

Each epoch the model pseudo-labels the unlabeled pool: confident
predictions (max prob >= theta) become model pseudo-labels, the rest fall
back to the symbolic analyzer when it can parse the snippet. Self-training
folds the labels back into the model's own pool; co-training cross-feeds
two models trained on the original and the augmented pools.
"""

from __future__ import annotations

import csv
import json
import statistics
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Optional, Sequence

from .augment import (
    AugKind,
    AugmenterUnavailable,
    AugStrategy,
    Backtranslator,
    Sampling,
    augment_dataset,
    has_loops,
    mock_backtranslate,
)
from .classifier import BuiltinModel, Hyperparams
from .core import (
    ALL_CLASSES,
    CodeSnippet,
    ComplexityClass,
    Dataset,
    LabeledExample,
    Metrics,
    clamp_to_class_set,
    compute_metrics,
    few_shot_split,
    load_jsonl,
)
from .symbolic import try_analyze


class ConfigError(Exception):
    pass


class LabelSource(Enum):
    MODEL = "model"
    SYMBOLIC = "symbolic"


@dataclass(frozen=True)
class PseudoLabel:
    snippet_id: str
    label: ComplexityClass
    source: LabelSource
    confidence: Optional[float]
    epoch: int


SymbolicFn = Callable[[CodeSnippet], Optional[ComplexityClass]]


def pseudo_label(
    model,
    sym: Optional[SymbolicFn],
    unlabeled: Sequence[CodeSnippet],
    theta: float,
    epoch: int = 0,
) -> list[PseudoLabel]:
    """Algorithm-1 Pseudo-label: model confidence first, symbolic fallback."""
    if not unlabeled:
        return []
    out: list[PseudoLabel] = []
    dists = model.predict_many(list(unlabeled))
    for snippet, dist in zip(unlabeled, dists):
        if dist.confidence >= theta:
            out.append(
                PseudoLabel(
                    snippet_id=snippet.id,
                    label=dist.argmax,
                    source=LabelSource.MODEL,
                    confidence=dist.confidence,
                    epoch=epoch,
                )
            )
        elif sym is not None:
            cls = sym(snippet)
            if cls is not None:
                out.append(
                    PseudoLabel(
                        snippet_id=snippet.id,
                        label=cls,
                        source=LabelSource.SYMBOLIC,
                        confidence=None,
                        epoch=epoch,
                    )
                )
    return out


class _Pool:
    """A labeled pool where the original few-shot labels are immutable and
    pseudo-labels follow latest-wins semantics."""

    def __init__(self, originals: Sequence[LabeledExample]):
        self.entries: dict[str, LabeledExample] = {
            ex.snippet.id: ex for ex in originals
        }
        self.protected: set[str] = set(self.entries)

    def merge_examples(self, examples: Sequence[LabeledExample], protect: bool = False):
        for ex in examples:
            if ex.snippet.id in self.protected:
                continue
            self.entries[ex.snippet.id] = ex
            if protect:
                self.protected.add(ex.snippet.id)

    def merge_pseudo(
        self, labels: Sequence[PseudoLabel], snippets: dict[str, CodeSnippet]
    ):
        for pl in labels:
            if pl.snippet_id in self.protected:
                continue
            self.entries[pl.snippet_id] = LabeledExample(
                snippets[pl.snippet_id], pl.label
            )

    def examples(self) -> list[LabeledExample]:
        return list(self.entries.values())

    def __len__(self) -> int:
        return len(self.entries)


class SSLEngine:
    def __init__(
        self,
        labeled: Sequence[LabeledExample],
        augmented: Sequence[LabeledExample],
        unlabeled: Sequence[CodeSnippet],
        model,
        model_aug=None,
        *,
        theta: float = 0.7,
        use_sym: bool = True,
        mode: str = "self-train",
        class_set: Sequence[ComplexityClass] = ALL_CLASSES,
        seed: int = 0,
    ):
        if mode not in ("self-train", "co-train"):
            raise ConfigError(f"unknown mode {mode!r}")
        if mode == "co-train" and model_aug is None:
            raise ConfigError("co-training requires two models")
        self.mode = mode
        self.L = _Pool(labeled)
        self.L_aug = _Pool(augmented)
        self.U = list(unlabeled)
        self.snippets = {s.id: s for s in unlabeled}
        self.model = model
        self.model_aug = model_aug
        self.theta = theta
        self.class_set = tuple(class_set)
        self.seed = seed
        self.epoch = 0
        self.pseudo_label_log: list[PseudoLabel] = []
        self._sym_cache: dict[str, Optional[ComplexityClass]] = {}
        self._use_sym = use_sym
        self._aug_merged = False

    # symbolic labels are deterministic; compute once per snippet
    def _sym(self, snippet: CodeSnippet) -> Optional[ComplexityClass]:
        if snippet.id not in self._sym_cache:
            cls = try_analyze(snippet)
            if cls is not None:
                cls = clamp_to_class_set(cls, self.class_set)
            self._sym_cache[snippet.id] = cls
        return self._sym_cache[snippet.id]

    def run_epoch(self) -> None:
        self.epoch += 1
        if self.mode == "self-train":
            self._self_train_epoch()
        else:
            self._co_train_epoch()

    def _self_train_epoch(self) -> None:
        self.L.merge_examples(self.L_aug.examples(), protect=True)
        self.model.fit(self.L.examples(), seed=self.seed + self.epoch)
        sym = self._sym if self._use_sym else None
        labels = pseudo_label(self.model, sym, self.U, self.theta, self.epoch)
        self.pseudo_label_log.extend(labels)
        self.L.merge_pseudo(labels, self.snippets)

    def _co_train_epoch(self) -> None:
        self.model.fit(self.L.examples(), seed=self.seed + self.epoch)
        self.model_aug.fit(self.L_aug.examples(), seed=self.seed + self.epoch)
        sym = self._sym if self._use_sym else None
        u_pl = pseudo_label(self.model, sym, self.U, self.theta, self.epoch)
        u_aug_pl = pseudo_label(self.model_aug, sym, self.U, self.theta, self.epoch)
        self.pseudo_label_log.extend(u_pl)
        self.pseudo_label_log.extend(u_aug_pl)
        self.L.merge_pseudo(u_aug_pl, self.snippets)
        self.L_aug.merge_pseudo(u_pl, self.snippets)

    def predictions(self, snippets: Sequence[CodeSnippet]) -> dict[str, ComplexityClass]:
        dists = self.model.predict_many(list(snippets))
        return {s.id: d.argmax for s, d in zip(snippets, dists)}


# ---------------------------------------------------------------------------
# experiment configuration and runner

@dataclass
class ExperimentConfig:
    train: str
    test: str
    val: Optional[str] = None
    mode: str = "self-train"
    k: int = 5
    theta: float = 0.7
    epochs: int = 20
    seeds: tuple[int, ...] = (1, 2, 3)
    use_sym: bool = True
    augment: Optional[str] = None  # "bt" | "lc" | "bt+lc"
    sampling: str = "natural"
    augmenter: Optional[object] = None  # "mock" or a command list
    classifier: object = "builtin"  # "builtin" or a command list
    classes: tuple[str, ...] = tuple(c.serialized for c in ALL_CLASSES)
    select: str = "best-val"  # or "last"
    out_dir: Optional[str] = None
    hyperparams: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "train" not in raw or "test" not in raw:
            raise ConfigError("config requires 'train' and 'test' dataset paths")
        cfg = cls(**{**raw})
        cfg.seeds = tuple(cfg.seeds)
        cfg.classes = tuple(cfg.classes)
        if cfg.mode not in ("self-train", "co-train"):
            raise ConfigError(f"unknown mode {cfg.mode!r}")
        if not 0 < cfg.theta <= 1:
            raise ConfigError(f"theta must be in (0, 1], got {cfg.theta}")
        if cfg.select not in ("best-val", "last"):
            raise ConfigError(f"unknown select policy {cfg.select!r}")
        if cfg.augment is not None and cfg.augment not in ("bt", "lc", "bt+lc"):
            raise ConfigError(f"unknown augmentation {cfg.augment!r}")
        if cfg.sampling not in ("natural", "artificial"):
            raise ConfigError(f"unknown sampling {cfg.sampling!r}")
        return cfg

    def class_set(self) -> tuple[ComplexityClass, ...]:
        return tuple(ComplexityClass.from_name(n) for n in self.classes)

    def strategy(self) -> Optional[AugStrategy]:
        if self.augment is None:
            return None
        return AugStrategy(AugKind(self.augment), Sampling(self.sampling))

    def to_dict(self) -> dict:
        d = dict(vars(self))
        d["seeds"] = list(self.seeds)
        d["classes"] = list(self.classes)
        # artifact location, not an experiment parameter; keeping it out
        # makes reports byte-identical wherever they are written
        d.pop("out_dir")
        return d


@dataclass
class EpochRecord:
    epoch: int
    test: Metrics
    val_accuracy: Optional[float]
    model_labels: int
    symbolic_labels: int
    pseudo_accuracy: Optional[float]


@dataclass
class SeedResult:
    seed: int
    selected_epoch: int
    test: Metrics
    epochs: list[EpochRecord]


@dataclass
class RunReport:
    config: ExperimentConfig
    per_seed: list[SeedResult]

    @property
    def mean_accuracy(self) -> float:
        return statistics.fmean(r.test.accuracy for r in self.per_seed)

    @property
    def std_accuracy(self) -> float:
        vals = [r.test.accuracy for r in self.per_seed]
        return statistics.stdev(vals) if len(vals) > 1 else 0.0

    @property
    def mean_macro_f1(self) -> float:
        return statistics.fmean(r.test.macro_f1 for r in self.per_seed)

    @property
    def std_macro_f1(self) -> float:
        vals = [r.test.macro_f1 for r in self.per_seed]
        return statistics.stdev(vals) if len(vals) > 1 else 0.0

    def table_row(self) -> str:
        return f"{self.mean_accuracy * 100:.2f}±{self.std_accuracy * 100:.2f}"

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "aggregate": {
                "accuracy_mean": self.mean_accuracy,
                "accuracy_std": self.std_accuracy,
                "macro_f1_mean": self.mean_macro_f1,
                "macro_f1_std": self.std_macro_f1,
                "table_row": self.table_row(),
            },
            "per_seed": [
                {
                    "seed": r.seed,
                    "selected_epoch": r.selected_epoch,
                    "test": r.test.to_dict(),
                }
                for r in self.per_seed
            ],
        }

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        report_path = out / "report.json"
        report_path.write_text(json.dumps(self.to_dict(), sort_keys=True, indent=2))
        written.append(report_path)
        for r in self.per_seed:
            epochs_path = out / f"epochs_seed{r.seed}.csv"
            with open(epochs_path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(
                    [
                        "epoch", "test_accuracy", "test_macro_f1", "val_accuracy",
                        "model_pseudo_labels", "symbolic_pseudo_labels",
                        "pseudo_label_accuracy",
                    ]
                )
                for e in r.epochs:
                    writer.writerow(
                        [
                            e.epoch,
                            f"{e.test.accuracy:.6f}",
                            f"{e.test.macro_f1:.6f}",
                            "" if e.val_accuracy is None else f"{e.val_accuracy:.6f}",
                            e.model_labels,
                            e.symbolic_labels,
                            ""
                            if e.pseudo_accuracy is None
                            else f"{e.pseudo_accuracy:.6f}",
                        ]
                    )
            written.append(epochs_path)
            conf_path = out / f"confusion_seed{r.seed}.csv"
            with open(conf_path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["gold\\pred"] + [c.serialized for c in r.test.class_set])
                for cls, row in zip(r.test.class_set, r.test.confusion):
                    writer.writerow([cls.serialized] + list(row))
            written.append(conf_path)
        return written


def _make_backtranslator(spec) -> Optional[Backtranslator]:
    if spec is None:
        return None
    if spec == "mock":
        return mock_backtranslate
    from .backends import ExternalAugmenter

    return ExternalAugmenter([str(c) for c in spec])


def _make_model(spec, class_set, hyperparams: dict):
    if spec == "builtin":
        return BuiltinModel(class_set, Hyperparams(**hyperparams))
    from .backends import ExternalClassifier

    return ExternalClassifier([str(c) for c in spec], class_set)


def run_experiment(config: ExperimentConfig) -> RunReport:
    class_set = config.class_set()
    train = load_jsonl(config.train, class_set)
    test = load_jsonl(config.test, class_set)
    val = load_jsonl(config.val, class_set) if config.val else None
    strategy = config.strategy()
    if strategy is not None and strategy.kind in (AugKind.BT, AugKind.BT_PLUS_LC):
        if config.augmenter is None:
            raise AugmenterUnavailable(
                "config requests back-translation but no augmenter is set"
            )

    per_seed = []
    for seed in config.seeds:
        per_seed.append(_run_seed(config, train, val, test, class_set, strategy, seed))
    return RunReport(config=config, per_seed=per_seed)


def _run_seed(
    config: ExperimentConfig,
    train: Dataset,
    val: Optional[Dataset],
    test: Dataset,
    class_set,
    strategy: Optional[AugStrategy],
    seed: int,
) -> SeedResult:
    split_source = train
    if strategy is not None and strategy.sampling is Sampling.ARTIFICIAL:
        loopy = [ex for ex in train.labeled if has_loops(ex.snippet)]
        split_source = Dataset(examples=tuple(loopy), class_set=class_set)
    labeled, _, _ = few_shot_split(split_source, config.k, seed)
    chosen = {ex.snippet.id for ex in labeled}
    unlabeled = [ex.snippet for ex in train.labeled if ex.snippet.id not in chosen]
    hidden = {
        ex.snippet.id: ex.label
        for ex in train.labeled
        if ex.snippet.id not in chosen
    }

    augmented: list[LabeledExample] = []
    if strategy is not None:
        bt = _make_backtranslator(config.augmenter)
        augmented = [a.to_labeled() for a in augment_dataset(labeled, strategy, bt)]
        if hasattr(bt, "close"):
            bt.close()

    model = _make_model(config.classifier, class_set, config.hyperparams)
    model_aug = (
        _make_model(config.classifier, class_set, config.hyperparams)
        if config.mode == "co-train"
        else None
    )
    engine = SSLEngine(
        labeled,
        augmented,
        unlabeled,
        model,
        model_aug,
        theta=config.theta,
        use_sym=config.use_sym,
        mode=config.mode,
        class_set=class_set,
        seed=seed,
    )

    records: list[EpochRecord] = []
    for _ in range(config.epochs):
        engine.run_epoch()
        preds = engine.predictions(test.snippets)
        metrics = compute_metrics(preds, test.labeled, class_set)
        val_acc = None
        if val is not None:
            val_preds = engine.predictions(val.snippets)
            val_acc = compute_metrics(val_preds, val.labeled, class_set).accuracy
        epoch_labels = [pl for pl in engine.pseudo_label_log if pl.epoch == engine.epoch]
        n_model = sum(1 for pl in epoch_labels if pl.source is LabelSource.MODEL)
        n_sym = sum(1 for pl in epoch_labels if pl.source is LabelSource.SYMBOLIC)
        graded = [pl for pl in epoch_labels if pl.snippet_id in hidden]
        pseudo_acc = (
            sum(1 for pl in graded if pl.label == hidden[pl.snippet_id]) / len(graded)
            if graded
            else None
        )
        records.append(
            EpochRecord(
                epoch=engine.epoch,
                test=metrics,
                val_accuracy=val_acc,
                model_labels=n_model,
                symbolic_labels=n_sym,
                pseudo_accuracy=pseudo_acc,
            )
        )

    if config.select == "best-val" and val is not None:
        best = max(records, key=lambda r: (r.val_accuracy, -r.epoch))
        selected = best.epoch
        final = best.test
    else:
        selected = records[-1].epoch
        final = records[-1].test
    for closeable in (model, model_aug):
        if hasattr(closeable, "close"):
            closeable.close()
    return SeedResult(seed=seed, selected_epoch=selected, test=final, epochs=records)
