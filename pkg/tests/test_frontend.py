from pathlib import Path

import pytest

from bigo.core import CodeSnippet, Language
from bigo.frontend import ParseError, StmtKind, parse
from bigo.frontend.mask import mask_java, mask_python

FIXTURES = Path(__file__).parent / "fixtures"


def _py(code, sid="t"):
    return CodeSnippet(id=sid, source=code, language=Language.PYTHON)


def _java(code, sid="t"):
    return CodeSnippet(id=sid, source=code, language=Language.JAVA)


def _kinds(block):
    return [s.kind for s in block.statements]


class TestPythonParsing:
    def test_function_extraction(self):
        src = FIXTURES.joinpath("appendix_j.py").read_text()
        ir = parse(_py(src))
        assert [f.name for f in ir.functions] == ["solve"]
        assert ir.top_level is not None
        top_loops = [
            s for s in ir.top_level.statements if s.kind is StmtKind.FOR
        ]
        assert len(top_loops) == 1

    def test_call_site_detection(self):
        src = FIXTURES.joinpath("appendix_j.py").read_text()
        ir = parse(_py(src))
        top_calls = {name for s in ir.top_level.walk() for name, _ in s.calls}
        assert "solve" in top_calls

    def test_loop_count_matches_keyword_count(self):
        # keyword occurrences (outside strings/comments) are an independent
        # oracle for the number of loop statements
        src = (
            "for i in range(3):\n"
            "    while i > 0:\n"
            "        i -= 1\n"
            "# for fake in comment\n"
            "s = 'while not a loop'\n"
            "for j in range(2):\n"
            "    print(j)\n"
        )
        masked = mask_python(src)
        keyword_loops = sum(
            line.lstrip().startswith(("for ", "while "))
            for line in masked.splitlines()
        )
        ir = parse(_py(src))
        parsed_loops = [
            s for s in ir.top_level.walk()
            if s.kind in (StmtKind.FOR, StmtKind.WHILE)
        ]
        assert len(parsed_loops) == keyword_loops == 3

    def test_nested_function_defs(self):
        src = (
            "def outer(n):\n"
            "    def inner(m):\n"
            "        return m + 1\n"
            "    return inner(n)\n"
        )
        ir = parse(_py(src))
        assert {f.name for f in ir.functions} == {"outer", "inner"}

    def test_inline_suite(self):
        ir = parse(_py("for i in range(5): print(i)\n"))
        loop = ir.top_level.statements[0]
        assert loop.kind is StmtKind.FOR
        assert loop.body is not None and len(loop.body.statements) == 1

    def test_unbalanced_brackets_raise(self):
        with pytest.raises(ParseError):
            parse(_py("x = (1 + \n"))

    def test_whitespace_only_raises(self):
        with pytest.raises(ParseError):
            parse(_py("   \n\n"))

    def test_sort_statement_kind(self):
        ir = parse(_py("arr = [3, 1]\narr.sort()\n"))
        assert StmtKind.SORT_CALL in _kinds(ir.top_level)

    def test_reparse_stability(self):
        # parsing is a pure function of the source text
        src = FIXTURES.joinpath("appendix_j.py").read_text()
        a, b = parse(_py(src)), parse(_py(src))
        assert [s.text for s in a.top_level.walk()] == \
            [s.text for s in b.top_level.walk()]


class TestJavaParsing:
    SRC = (
        "public class Main {\n"
        "    public static void main(String[] args) {\n"
        "        int n = 5;\n"
        "        for (int i = 0; i < n; i++) {\n"
        "            System.out.println(helper(i));\n"
        "        }\n"
        "    }\n"
        "    static int helper(int x) {\n"
        "        while (x > 1) {\n"
        "            x = x / 2;\n"
        "        }\n"
        "        return x;\n"
        "    }\n"
        "}\n"
    )

    def test_methods_extracted(self):
        ir = parse(_java(self.SRC))
        assert {f.name for f in ir.functions} >= {"main", "helper"}

    def test_main_body_promoted_to_top_level(self):
        ir = parse(_java(self.SRC))
        kinds = [s.kind for s in ir.top_level.walk()]
        assert StmtKind.FOR in kinds

    def test_loop_header_parts(self):
        ir = parse(_java(self.SRC))
        loop = next(s for s in ir.top_level.walk() if s.kind is StmtKind.FOR)
        assert loop.loop_var == "i"
        assert "n" in loop.bound

    def test_call_sites_in_loop_body(self):
        ir = parse(_java(self.SRC))
        calls = {name for s in ir.top_level.walk() for name, _ in s.calls}
        assert "helper" in calls

    def test_enhanced_for(self):
        src = (
            "class A { public static void main(String[] a) {\n"
            "    int[] xs = new int[3];\n"
            "    for (int x : xs) { System.out.println(x); }\n"
            "} }\n"
        )
        ir = parse(_java(src))
        loop = next(s for s in ir.top_level.walk() if s.kind is StmtKind.FOR)
        assert loop.enhanced

    def test_unbalanced_braces_raise(self):
        with pytest.raises(ParseError):
            parse(_java("class A { void f() { }"))

    def test_empty_raises(self):
        with pytest.raises(ParseError):
            parse(_java("   "))


class TestMasking:
    def test_python_masks_preserve_offsets(self):
        src = "x = 'for i in range'  # while True\ny = 2\n"
        masked = mask_python(src)
        assert len(masked) == len(src)
        assert masked.count("\n") == src.count("\n")
        assert "for i in range" not in masked
        assert "while True" not in masked
        assert masked.index("y = 2") == src.index("y = 2")

    def test_python_triple_quoted(self):
        src = 'doc = """\nfor i in loop\n"""\nz = 1\n'
        masked = mask_python(src)
        assert "for i" not in masked
        assert len(masked) == len(src)

    def test_java_masks_block_comments(self):
        src = "int x = 1; /* for (;;) */ String s = \"while\"; // for\nint y;\n"
        masked = mask_java(src)
        assert len(masked) == len(src)
        assert "for" not in masked
        assert "while" not in masked

    def test_escaped_quotes(self):
        src = 's = "a\\"for\\"b"; int k = 0;'
        masked = mask_java(src)
        assert "for" not in masked
        assert "int k = 0;" in masked
