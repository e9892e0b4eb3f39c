"""Line- and column-preserving masking of comments and string literals.

Loop keywords inside strings or comments must not look like structure, so
the parsers match against a masked copy of the source where comment text
and string contents are blanked out. Every masked character is replaced
one-for-one (newlines kept), so offsets and line numbers in the masked
text map directly onto the original.
"""

from __future__ import annotations


def mask_python(source: str) -> str:
    out = list(source)
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "#":
            while i < n and source[i] != "\n":
                out[i] = " "
                i += 1
        elif ch in "\"'":
            quote = ch
            if source[i : i + 3] == quote * 3:
                i = _blank_until(source, out, i + 3, quote * 3)
            else:
                i = _blank_until(source, out, i + 1, quote, stop_at_newline=True)
        else:
            i += 1
    return "".join(out)


def mask_java(source: str) -> str:
    out = list(source)
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if source[i : i + 2] == "//":
            while i < n and source[i] != "\n":
                out[i] = " "
                i += 1
        elif source[i : i + 2] == "/*":
            i += 2
            while i < n and source[i : i + 2] != "*/":
                if source[i] != "\n":
                    out[i] = " "
                i += 1
            i = min(i + 2, n)
        elif ch in "\"'":
            i = _blank_until(source, out, i + 1, ch, stop_at_newline=True)
        else:
            i += 1
    return "".join(out)


def _blank_until(
    source: str, out: list, start: int, closer: str, stop_at_newline: bool = False
) -> int:
    """Blank string content from start until the closing quote (inclusive of
    content, exclusive of the quotes). Tolerates unterminated literals."""
    i = start
    n = len(source)
    clen = len(closer)
    while i < n:
        if source[i] == "\\" and clen == 1:
            out[i] = " "
            if i + 1 < n and source[i + 1] != "\n":
                out[i + 1] = " "
            i += 2
            continue
        if source[i : i + clen] == closer:
            return i + clen
        if stop_at_newline and source[i] == "\n":
            return i + 1
        if source[i] != "\n":
            out[i] = "s"
        i += 1
    return n
