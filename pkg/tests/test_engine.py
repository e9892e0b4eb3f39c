import json
import re

import pytest

from bigo.classifier import BuiltinModel, ClassDistribution
from bigo.core import (
    ALL_CLASSES,
    CodeSnippet,
    ComplexityClass,
    LabeledExample,
    Language,
)
from bigo.corpus import generate_corpus
from bigo.engine import (
    ConfigError,
    ExperimentConfig,
    LabelSource,
    SSLEngine,
    pseudo_label,
    run_experiment,
)

CONST = ComplexityClass.CONSTANT
LIN = ComplexityClass.LINEAR


def _py(code, sid):
    return CodeSnippet(id=sid, source=code, language=Language.PYTHON)


class FakeModel:
    """Returns canned distributions keyed by snippet id."""

    def __init__(self, dists):
        self.dists = dists
        self.fit_calls = []

    def fit(self, labeled, seed):
        self.fit_calls.append([ex.snippet.id for ex in labeled])
        return self

    def predict_many(self, snippets):
        return [self.dists[s.id] for s in snippets]


def _dist(top: ComplexityClass, confidence: float) -> ClassDistribution:
    rest = (1.0 - confidence) / (len(ALL_CLASSES) - 1)
    probs = {c: rest for c in ALL_CLASSES}
    probs[top] = confidence
    return ClassDistribution(probs)


class TestPseudoLabel:
    def test_confidence_at_theta_is_model_label(self):
        # the threshold is inclusive: exactly 0.70 stays a model label
        snippet = _py("for i in range(n):\n    print(i)\n", "u1")
        model = FakeModel({"u1": _dist(LIN, 0.70)})
        out = pseudo_label(model, None, [snippet], theta=0.70)
        assert len(out) == 1
        assert out[0].source is LabelSource.MODEL
        assert out[0].label is LIN
        assert out[0].confidence == pytest.approx(0.70)

    def test_below_theta_falls_back_to_symbolic(self):
        snippet = _py("for i in range(n):\n    print(i)\n", "u1")
        model = FakeModel({"u1": _dist(CONST, 0.699)})
        out = pseudo_label(model, lambda s: LIN, [snippet], theta=0.70)
        assert out[0].source is LabelSource.SYMBOLIC
        assert out[0].label is LIN
        assert out[0].confidence is None

    def test_uniform_distribution_goes_symbolic(self):
        snippet = _py("print(1)\n", "u1")
        uniform = ClassDistribution({c: 1 / 7 for c in ALL_CLASSES})
        model = FakeModel({"u1": uniform})
        out = pseudo_label(model, lambda s: CONST, [snippet], theta=0.70)
        assert out[0].source is LabelSource.SYMBOLIC

    def test_no_symbolic_answer_emits_nothing(self):
        snippet = _py("print(1)\n", "u1")
        model = FakeModel({"u1": _dist(CONST, 0.2)})
        out = pseudo_label(model, lambda s: None, [snippet], theta=0.70)
        assert out == []

    def test_without_symbolic_fallback(self):
        snippet = _py("print(1)\n", "u1")
        model = FakeModel({"u1": _dist(CONST, 0.2)})
        assert pseudo_label(model, None, [snippet], theta=0.70) == []


def _engine_parts():
    labeled = [
        LabeledExample(_py("print(1)\n", "l1"), CONST),
        LabeledExample(_py("for i in range(n):\n    print(i)\n", "l2"), LIN),
    ]
    unlabeled = [
        _py("x = int(input())\nprint(x)\n", "u1"),
        _py("n = int(input())\nfor i in range(n):\n    print(i)\n", "u2"),
    ]
    return labeled, unlabeled


class TestSelfTraining:
    def test_pool_grows_with_pseudo_labels(self):
        labeled, unlabeled = _engine_parts()
        model = FakeModel({"u1": _dist(CONST, 0.9), "u2": _dist(LIN, 0.9)})
        eng = SSLEngine(labeled, [], unlabeled, model, mode="self-train")
        eng.run_epoch()
        assert len(eng.L) == 4
        assert model.fit_calls[0] == ["l1", "l2"]

    def test_original_labels_never_overwritten(self):
        labeled, unlabeled = _engine_parts()
        # the model is confidently wrong about an original id; merging must
        # not touch it because originals are protected
        model = FakeModel(
            {"u1": _dist(LIN, 0.99), "u2": _dist(LIN, 0.99)}
        )
        eng = SSLEngine(labeled, [], unlabeled, model, mode="self-train")
        eng.run_epoch()
        assert eng.L.entries["l1"].label is CONST

    def test_latest_pseudo_label_wins(self):
        labeled, unlabeled = _engine_parts()
        model = FakeModel({"u1": _dist(CONST, 0.9), "u2": _dist(LIN, 0.9)})
        eng = SSLEngine(labeled, [], unlabeled, model, mode="self-train")
        eng.run_epoch()
        assert eng.L.entries["u1"].label is CONST
        model.dists["u1"] = _dist(LIN, 0.95)
        eng.run_epoch()
        assert eng.L.entries["u1"].label is LIN

    def test_augmented_pool_merges_into_labeled(self):
        labeled, unlabeled = _engine_parts()
        aug = [LabeledExample(_py("while i < n:\n    i += 1\n", "l2::lc"), LIN)]
        model = FakeModel({"u1": _dist(CONST, 0.1), "u2": _dist(LIN, 0.1)})
        eng = SSLEngine(labeled, aug, unlabeled, model,
                        mode="self-train", use_sym=False)
        eng.run_epoch()
        assert set(model.fit_calls[0]) == {"l1", "l2", "l2::lc"}

    def test_epoch_is_idempotent_on_stable_labels(self):
        labeled, unlabeled = _engine_parts()
        model = FakeModel({"u1": _dist(CONST, 0.9), "u2": _dist(LIN, 0.9)})
        eng = SSLEngine(labeled, [], unlabeled, model, mode="self-train")
        eng.run_epoch()
        first = {sid: ex.label for sid, ex in eng.L.entries.items()}
        eng.run_epoch()
        second = {sid: ex.label for sid, ex in eng.L.entries.items()}
        assert first == second


class TestCoTraining:
    def test_requires_second_model(self):
        labeled, unlabeled = _engine_parts()
        model = FakeModel({})
        with pytest.raises(ConfigError):
            SSLEngine(labeled, [], unlabeled, model, mode="co-train")

    def test_cross_merge(self):
        labeled, unlabeled = _engine_parts()
        aug = [LabeledExample(_py("while i < n:\n    i += 1\n", "l2::lc"), LIN)]
        # model on L is confident about u1; model on L_aug about u2
        model = FakeModel({"u1": _dist(CONST, 0.9), "u2": _dist(LIN, 0.1)})
        model_aug = FakeModel({"u1": _dist(CONST, 0.1), "u2": _dist(LIN, 0.9)})
        eng = SSLEngine(labeled, aug, unlabeled, model, model_aug,
                        mode="co-train", use_sym=False)
        eng.run_epoch()
        # cross: B_aug's labels land in L, B's labels land in L_aug
        assert "u2" in eng.L.entries and "u1" not in eng.L.entries
        assert "u1" in eng.L_aug.entries and "u2" not in eng.L_aug.entries

    def test_pools_stay_separate(self):
        labeled, unlabeled = _engine_parts()
        aug = [LabeledExample(_py("while i < n:\n    i += 1\n", "l2::lc"), LIN)]
        model = FakeModel({"u1": _dist(CONST, 0.1), "u2": _dist(LIN, 0.1)})
        model_aug = FakeModel({"u1": _dist(CONST, 0.1), "u2": _dist(LIN, 0.1)})
        eng = SSLEngine(labeled, aug, unlabeled, model, model_aug,
                        mode="co-train", use_sym=False)
        eng.run_epoch()
        assert model.fit_calls[0] == ["l1", "l2"]
        assert model_aug.fit_calls[0] == ["l2::lc"]


class TestExperimentConfig:
    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"train": "a", "test": "b", "bogus": 1})

    def test_missing_paths_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"mode": "self-train"})

    def test_bad_theta_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"train": "a", "test": "b", "theta": 1.5})

    def test_bad_mode_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"train": "a", "test": "b", "mode": "tri"})


@pytest.fixture(scope="module")
def corpus_files(tmp_path_factory):
    from bigo.core import dump_jsonl

    tmp = tmp_path_factory.mktemp("corpus")
    train = generate_corpus(12, seed=1, prefix="tr")
    test = generate_corpus(4, seed=2, prefix="te")
    dump_jsonl(train.labeled, tmp / "train.jsonl")
    dump_jsonl(test.labeled, tmp / "test.jsonl")
    return tmp


class TestRunExperiment:
    def _config(self, tmp, **kw):
        base = {
            "train": str(tmp / "train.jsonl"),
            "test": str(tmp / "test.jsonl"),
            "mode": "self-train",
            "k": 3,
            "epochs": 2,
            "seeds": [1, 2],
            "select": "last",
        }
        base.update(kw)
        return ExperimentConfig.from_dict(base)

    def test_table_row_format(self, corpus_files):
        report = run_experiment(self._config(corpus_files))
        assert re.fullmatch(r"\d+\.\d{2}±\d+\.\d{2}", report.table_row())

    def test_identical_seeds_zero_std(self, corpus_files):
        report = run_experiment(self._config(corpus_files, seeds=[7, 7, 7]))
        assert report.std_accuracy == 0.0
        assert report.table_row().endswith("±0.00")

    def test_report_json_deterministic(self, corpus_files):
        cfg = self._config(corpus_files)
        a = run_experiment(cfg)
        b = run_experiment(cfg)
        assert json.dumps(a.to_dict(), sort_keys=True) == \
            json.dumps(b.to_dict(), sort_keys=True)

    def test_pseudo_label_counts_logged(self, corpus_files):
        report = run_experiment(self._config(corpus_files, seeds=[1]))
        rec = report.per_seed[0].epochs[0]
        total_unlabeled = 12 * 7 - 3 * 7
        assert rec.model_labels + rec.symbolic_labels == total_unlabeled

    def test_artifacts_written(self, corpus_files, tmp_path):
        report = run_experiment(self._config(corpus_files, seeds=[1]))
        written = report.write(tmp_path / "out")
        names = {p.name for p in written}
        assert names == {"report.json", "epochs_seed1.csv", "confusion_seed1.csv"}
        payload = json.loads((tmp_path / "out" / "report.json").read_text())
        assert "aggregate" in payload and "per_seed" in payload
