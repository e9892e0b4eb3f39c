import json

import pytest
from hypothesis import given, strategies as st

from bigo.core import (
    ALL_CLASSES,
    CodeSnippet,
    ComplexityClass,
    DataError,
    Dataset,
    InsufficientClassCount,
    LabeledExample,
    Language,
    MissingPrediction,
    clamp_to_class_set,
    compute_metrics,
    dominates,
    dump_jsonl,
    few_shot_split,
    load_jsonl,
)

CONST = ComplexityClass.CONSTANT
LIN = ComplexityClass.LINEAR
EXP = ComplexityClass.EXPONENTIAL


def _snippet(i, code="print(1)"):
    return CodeSnippet(id=f"s{i}", source=code, language=Language.PYTHON)


def _dataset(counts: dict, class_set=ALL_CLASSES) -> Dataset:
    examples = []
    n = 0
    for cls, count in counts.items():
        for _ in range(count):
            examples.append(LabeledExample(_snippet(n), cls))
            n += 1
    return Dataset(examples=tuple(examples), class_set=class_set)


class TestComplexityClass:
    def test_seven_classes_in_dominance_order(self):
        names = [c.serialized for c in ALL_CLASSES]
        assert names == [
            "constant", "logn", "linear", "nlogn", "quadratic", "cubic",
            "exponential",
        ]

    def test_round_trip_names(self):
        for c in ALL_CLASSES:
            assert ComplexityClass.from_name(c.serialized) is c

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError):
            ComplexityClass.from_name("polylog")

    def test_ordering_matches_dominance(self):
        assert CONST < LIN < EXP
        assert not EXP < CONST


class TestDominates:
    def test_exhaustive_pairs(self):
        # the dominance join is simply the max in class order
        for a in ALL_CLASSES:
            for b in ALL_CLASSES:
                assert dominates(a, b) is max(a, b)

    @given(st.sampled_from(ALL_CLASSES), st.sampled_from(ALL_CLASSES),
           st.sampled_from(ALL_CLASSES))
    def test_semilattice_laws(self, a, b, c):
        assert dominates(a, b) is dominates(b, a)
        assert dominates(a, a) is a
        assert dominates(dominates(a, b), c) is dominates(a, dominates(b, c))


class TestFewShotSplit:
    def test_partition_and_sizes(self):
        train = _dataset({c: 6 for c in ALL_CLASSES})
        labeled, unlabeled, hidden = few_shot_split(train, 2, seed=9)
        assert len(labeled) == 2 * len(ALL_CLASSES)
        assert len(unlabeled) == len(train) - len(labeled)
        chosen = {ex.snippet.id for ex in labeled}
        assert chosen.isdisjoint({s.id for s in unlabeled})
        assert set(hidden) == {s.id for s in unlabeled}

    def test_deterministic_in_seed(self):
        train = _dataset({c: 6 for c in ALL_CLASSES})
        a = few_shot_split(train, 3, seed=4)
        b = few_shot_split(train, 3, seed=4)
        assert [e.snippet.id for e in a[0]] == [e.snippet.id for e in b[0]]

    def test_different_seeds_differ(self):
        train = _dataset({c: 30 for c in ALL_CLASSES})
        a, _, _ = few_shot_split(train, 5, seed=1)
        b, _, _ = few_shot_split(train, 5, seed=2)
        assert {e.snippet.id for e in a} != {e.snippet.id for e in b}

    def test_k_zero_gives_everything_unlabeled(self):
        train = _dataset({c: 2 for c in ALL_CLASSES})
        labeled, unlabeled, hidden = few_shot_split(train, 0, seed=0)
        assert labeled == []
        assert len(unlabeled) == len(train)

    def test_insufficient_class_count(self):
        train = _dataset({c: (1 if c is CONST else 5) for c in ALL_CLASSES})
        with pytest.raises(InsufficientClassCount):
            few_shot_split(train, 3, seed=0)

    def test_hidden_labels_match_gold(self):
        train = _dataset({c: 4 for c in ALL_CLASSES})
        gold = {ex.snippet.id: ex.label for ex in train.labeled}
        _, _, hidden = few_shot_split(train, 1, seed=3)
        assert all(gold[sid] == cls for sid, cls in hidden.items())


class TestMetrics:
    def test_hand_computed_two_class(self):
        # gold: A A B B   pred: A B B B
        class_set = (CONST, LIN)
        gold = [LabeledExample(_snippet(i), CONST) for i in (0, 1)]
        gold += [LabeledExample(_snippet(i), LIN) for i in (2, 3)]
        preds = {"s0": CONST, "s1": LIN, "s2": LIN, "s3": LIN}
        m = compute_metrics(preds, gold, class_set)
        assert m.accuracy == pytest.approx(0.75)
        assert m.per_class_f1[CONST] == pytest.approx(2 / 3)
        assert m.per_class_f1[LIN] == pytest.approx(0.8)
        assert m.macro_f1 == pytest.approx((2 / 3 + 0.8) / 2)
        assert m.confusion == ((1, 1), (0, 2))

    def test_absent_class_scores_zero_f1(self):
        gold = [LabeledExample(_snippet(0), CONST)]
        m = compute_metrics({"s0": CONST}, gold, ALL_CLASSES)
        assert m.per_class_f1[EXP] == 0.0
        assert m.accuracy == 1.0

    def test_missing_prediction_raises(self):
        gold = [LabeledExample(_snippet(0), CONST)]
        with pytest.raises(MissingPrediction):
            compute_metrics({}, gold, ALL_CLASSES)

    def test_perfect_predictions(self):
        train = _dataset({c: 2 for c in ALL_CLASSES})
        preds = {ex.snippet.id: ex.label for ex in train.labeled}
        m = compute_metrics(preds, list(train.labeled), ALL_CLASSES)
        assert m.accuracy == 1.0 and m.macro_f1 == 1.0


class TestClampToClassSet:
    def test_identity_when_member(self):
        assert clamp_to_class_set(LIN, ALL_CLASSES) is LIN

    def test_cubic_maps_to_quadratic_in_five_class_set(self):
        five = tuple(c for c in ALL_CLASSES
                     if c not in (ComplexityClass.CUBIC, ComplexityClass.LOGN))
        assert clamp_to_class_set(ComplexityClass.CUBIC, five) \
            is ComplexityClass.QUADRATIC

    def test_logn_maps_to_nearest(self):
        no_log = tuple(c for c in ALL_CLASSES if c is not ComplexityClass.LOGN)
        got = clamp_to_class_set(ComplexityClass.LOGN, no_log)
        assert got in (CONST, LIN)

    @given(st.sampled_from(ALL_CLASSES))
    def test_result_always_in_class_set(self, cls):
        subset = (CONST, LIN, EXP)
        assert clamp_to_class_set(cls, subset) in subset


class TestDataset:
    def test_duplicate_ids_rejected(self):
        ex = LabeledExample(_snippet(0), CONST)
        with pytest.raises(DataError):
            Dataset(examples=(ex, ex))

    def test_label_outside_class_set_rejected(self):
        ex = LabeledExample(_snippet(0), EXP)
        with pytest.raises(DataError):
            Dataset(examples=(ex,), class_set=(CONST, LIN))

    def test_empty_snippet_fields_rejected(self):
        with pytest.raises(DataError):
            CodeSnippet(id="", source="x = 1", language=Language.PYTHON)
        with pytest.raises(DataError):
            CodeSnippet(id="a", source="", language=Language.PYTHON)


class TestJsonl:
    def test_round_trip(self, tmp_path):
        train = _dataset({CONST: 2, LIN: 1})
        path = tmp_path / "data.jsonl"
        dump_jsonl(train.labeled, path)
        back = load_jsonl(path)
        assert [e.snippet.id for e in back.labeled] == \
            [e.snippet.id for e in train.labeled]
        assert [e.label for e in back.labeled] == \
            [e.label for e in train.labeled]

    def test_unlabeled_records(self, tmp_path):
        path = tmp_path / "data.jsonl"
        path.write_text(json.dumps(
            {"id": "u1", "code": "x = 1", "language": "python"}) + "\n")
        ds = load_jsonl(path)
        assert len(ds.labeled) == 0 and len(ds.snippets) == 1

    def test_malformed_line_reports_line_number(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"id": "a", "code": "x", "language": "python"}\nnot json\n')
        with pytest.raises(DataError) as err:
            load_jsonl(path)
        assert "2" in str(err.value)

    def test_missing_field_rejected(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"id": "a", "language": "python"}\n')
        with pytest.raises(DataError):
            load_jsonl(path)

    def test_unknown_language_rejected(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"id": "a", "code": "x", "language": "rust"}\n')
        with pytest.raises(DataError):
            load_jsonl(path)
