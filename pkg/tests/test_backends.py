import io
import json
import sys
from pathlib import Path

import pytest

from bigo.augment import AugmenterError
from bigo.backends import (
    BackendUnavailable,
    ExternalAugmenter,
    ExternalClassifier,
    ProtocolViolation,
)
from bigo.core import ALL_CLASSES, CodeSnippet, ComplexityClass, LabeledExample, Language
from bigo.mock_augmenter import serve

STUB = str(Path(__file__).parent / "fixtures" / "stub_classifier.py")


def _stub(behavior):
    return [sys.executable, STUB, behavior]


def _py(code, sid="t"):
    return CodeSnippet(id=sid, source=code, language=Language.PYTHON)


class TestExternalClassifier:
    def test_round_trip(self):
        clf = ExternalClassifier(_stub("ok"), ALL_CLASSES)
        try:
            examples = [
                LabeledExample(_py("print(1)\n", "a"), ComplexityClass.CONSTANT),
                LabeledExample(_py("print(2)\n", "b"), ComplexityClass.CONSTANT),
            ]
            clf.fit(examples, seed=0)
            dists = clf.predict_many([_py("print(3)\n", "c")])
            assert dists[0].argmax is ComplexityClass.CONSTANT
            assert sum(dists[0].probs.values()) == pytest.approx(1.0)
        finally:
            clf.close()

    def test_probabilities_must_sum_to_one(self):
        clf = ExternalClassifier(_stub("badsum"), ALL_CLASSES)
        try:
            clf.fit(
                [LabeledExample(_py("print(1)\n", "a"), ComplexityClass.CONSTANT)],
                seed=0,
            )
            with pytest.raises(ProtocolViolation):
                clf.predict_many([_py("print(2)\n", "b")])
        finally:
            clf.close()

    def test_wrong_class_set_rejected_at_handshake(self):
        with pytest.raises(ProtocolViolation):
            ExternalClassifier(_stub("wrongset"), ALL_CLASSES)

    def test_missing_prediction_rejected(self):
        clf = ExternalClassifier(_stub("missing"), ALL_CLASSES)
        try:
            clf.fit(
                [LabeledExample(_py("print(1)\n", "a"), ComplexityClass.CONSTANT)],
                seed=0,
            )
            with pytest.raises(ProtocolViolation):
                clf.predict_many([_py("print(2)\n", "b")])
        finally:
            clf.close()

    def test_unspawnable_command(self):
        with pytest.raises(BackendUnavailable):
            ExternalClassifier(["/nonexistent/binary"], ALL_CLASSES)


class TestExternalAugmenter:
    def test_mock_augmenter_subprocess_round_trip(self):
        aug = ExternalAugmenter([sys.executable, "-m", "bigo.mock_augmenter"])
        try:
            snippet = _py("total = 0\nfor i in range(9):\n    total += i\n")
            code = aug(snippet)
            assert code != snippet.source
        finally:
            aug.close()

    def test_error_reply_raises(self):
        server = (
            "import sys, json\n"
            "for line in sys.stdin:\n"
            "    req = json.loads(line)\n"
            "    print(json.dumps({'id': req.get('id'), 'error': 'backend down'}))\n"
            "    sys.stdout.flush()\n"
        )
        aug = ExternalAugmenter([sys.executable, "-c", server])
        try:
            with pytest.raises(AugmenterError):
                aug(_py("print(1)\n"))
        finally:
            aug.close()


class TestMockAugmenterServer:
    def _serve(self, requests):
        stdin = io.StringIO("\n".join(json.dumps(r) for r in requests) + "\n")
        stdout = io.StringIO()
        serve(stdin, stdout)
        return [json.loads(line) for line in stdout.getvalue().splitlines()]

    def test_backtranslate_reply(self):
        replies = self._serve(
            [
                {
                    "op": "backtranslate",
                    "id": "s1",
                    "language": "python",
                    "code": "value = 1\nprint(value)\n",
                }
            ]
        )
        assert replies[0]["id"] == "s1"
        assert replies[0]["code"] != "value = 1\nprint(value)\n"

    def test_unknown_op_keeps_serving(self):
        replies = self._serve(
            [
                {"op": "launch", "id": "x"},
                {
                    "op": "backtranslate",
                    "id": "s2",
                    "language": "python",
                    "code": "q = 2\nprint(q)\n",
                },
            ]
        )
        assert "error" in replies[0]
        assert replies[1]["id"] == "s2" and "code" in replies[1]

    def test_eof_is_clean_exit(self):
        assert self._serve([]) == []
