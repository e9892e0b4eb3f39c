import json

import pytest

from bigo.cli import (
    EXIT_CONFIG,
    EXIT_DATA,
    EXIT_IO,
    EXIT_NO_AUGMENTER,
    main,
)
from bigo.core import dump_jsonl
from bigo.corpus import generate_corpus


@pytest.fixture()
def corpus_path(tmp_path):
    path = tmp_path / "corpus.jsonl"
    dump_jsonl(generate_corpus(5, seed=3).labeled, path)
    return path


class TestAnalyze:
    def test_writes_records(self, corpus_path, tmp_path, capsys):
        out = tmp_path / "analysis.ndjson"
        assert main(["analyze", str(corpus_path), "--out", str(out)]) == 0
        records = [json.loads(l) for l in out.read_text().splitlines()]
        assert len(records) == 35
        assert all({"id", "class", "trace"} <= set(r) for r in records)

    def test_gold_metrics_on_stderr(self, corpus_path, capsys):
        rc = main(
            ["analyze", str(corpus_path), "--gold", str(corpus_path)]
        )
        assert rc == 0
        err = capsys.readouterr().err
        metrics = json.loads(err.strip().splitlines()[-1])
        # the bundled corpus includes analyzer-hard templates on purpose
        assert 0.8 <= metrics["accuracy"] <= 1.0

    def test_missing_path_is_io_error(self, tmp_path):
        assert main(["analyze", str(tmp_path / "nope.jsonl")]) == EXIT_IO

    def test_malformed_dataset_is_data_error(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("not json\n")
        assert main(["analyze", str(bad)]) == EXIT_DATA


class TestAugment:
    def test_lc_writes_output_and_provenance(self, corpus_path, tmp_path):
        out = tmp_path / "aug.jsonl"
        rc = main(
            ["augment", str(corpus_path), "--strategy", "lc", "--out", str(out)]
        )
        assert rc == 0
        assert out.exists()
        prov = json.loads(
            (tmp_path / "aug.jsonl.provenance.json").read_text()
        )
        assert all(p["method"] == "lc" for p in prov)
        assert all(p["id"].endswith("::lc") for p in prov)

    def test_bt_without_augmenter_exits_4(self, corpus_path, tmp_path):
        rc = main(
            ["augment", str(corpus_path), "--strategy", "bt",
             "--out", str(tmp_path / "aug.jsonl")]
        )
        assert rc == EXIT_NO_AUGMENTER

    def test_bt_with_mock(self, corpus_path, tmp_path):
        out = tmp_path / "aug.jsonl"
        rc = main(
            ["augment", str(corpus_path), "--strategy", "bt",
             "--augmenter", "mock", "--out", str(out)]
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 70  # every record round-tripped

    def test_refuses_overwrite_without_force(self, corpus_path, tmp_path):
        out = tmp_path / "aug.jsonl"
        args = ["augment", str(corpus_path), "--strategy", "lc", "--out", str(out)]
        assert main(args) == 0
        assert main(args) == EXIT_IO
        assert main(args + ["--force"]) == 0


class TestTrainPredict:
    def test_round_trip(self, corpus_path, tmp_path):
        model = tmp_path / "model.json"
        assert main(["train", str(corpus_path), "--out", str(model),
                     "--seed", "1"]) == 0
        preds = tmp_path / "preds.ndjson"
        assert main(["predict", str(corpus_path), "--model", str(model),
                     "--out", str(preds)]) == 0
        records = [json.loads(l) for l in preds.read_text().splitlines()]
        assert len(records) == 35
        for r in records:
            assert sum(r["probs"].values()) == pytest.approx(1.0)

    def test_predict_with_bogus_model_file(self, corpus_path, tmp_path):
        bogus = tmp_path / "model.json"
        bogus.write_text("{}")
        rc = main(["predict", str(corpus_path), "--model", str(bogus)])
        assert rc == EXIT_DATA


class TestExperiment:
    def _write_config(self, tmp_path, corpus_path, **kw):
        cfg = {
            "train": str(corpus_path),
            "test": str(corpus_path),
            "mode": "self-train",
            "k": 2,
            "epochs": 2,
            "seeds": [1],
            "select": "last",
        }
        cfg.update(kw)
        path = tmp_path / "exp.json"
        path.write_text(json.dumps(cfg))
        return path

    def test_smoke_run_writes_artifacts(self, corpus_path, tmp_path, capsys):
        cfg = self._write_config(tmp_path, corpus_path)
        rc = main(["experiment", str(cfg), "--out-dir", str(tmp_path / "out")])
        assert rc == 0
        out = capsys.readouterr().out.strip()
        assert "±" in out
        assert (tmp_path / "out" / "report.json").exists()
        assert (tmp_path / "out" / "epochs_seed1.csv").exists()

    def test_byte_identical_reports(self, corpus_path, tmp_path):
        cfg = self._write_config(tmp_path, corpus_path)
        main(["experiment", str(cfg), "--out-dir", str(tmp_path / "o1")])
        main(["experiment", str(cfg), "--out-dir", str(tmp_path / "o2")])
        a = (tmp_path / "o1" / "report.json").read_bytes()
        b = (tmp_path / "o2" / "report.json").read_bytes()
        assert a == b

    def test_insufficient_class_count_is_config_error(self, corpus_path, tmp_path):
        cfg = self._write_config(tmp_path, corpus_path, k=20)
        assert main(["experiment", str(cfg)]) == EXIT_CONFIG

    def test_unknown_key_is_config_error(self, corpus_path, tmp_path):
        cfg = self._write_config(tmp_path, corpus_path, bogus=1)
        assert main(["experiment", str(cfg)]) == EXIT_CONFIG


class TestGenCorpusAndReport:
    def test_gen_corpus_deterministic(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        assert main(["gen-corpus", "--per-class", "4", "--seed", "9",
                     "--out", str(a)]) == 0
        assert main(["gen-corpus", "--per-class", "4", "--seed", "9",
                     "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_report_summary(self, tmp_path, capsys):
        corpus = tmp_path / "corpus.jsonl"
        dump_jsonl(generate_corpus(4, seed=2).labeled, corpus)
        cfg = tmp_path / "exp.json"
        cfg.write_text(json.dumps({
            "train": str(corpus), "test": str(corpus), "k": 2,
            "epochs": 1, "seeds": [1], "select": "last",
        }))
        main(["experiment", str(cfg), "--out-dir", str(tmp_path / "out")])
        capsys.readouterr()
        rc = main(["report", str(tmp_path / "out" / "report.json")])
        assert rc == 0
        agg = json.loads(capsys.readouterr().out)
        assert "table_row" in agg

    def test_report_on_missing_file(self, tmp_path):
        assert main(["report", str(tmp_path / "nope.json")]) == EXIT_IO
