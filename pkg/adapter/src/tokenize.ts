/**
 * Masking and lexing that mirror the primary package's feature extraction,
 * so a model trained here sees the same token stream as the built-in one.
 */

export type Language = "python" | "java";

function blankUntil(
  source: string,
  out: string[],
  start: number,
  closer: string,
  stopAtNewline: boolean,
): number {
  let i = start;
  const n = source.length;
  const clen = closer.length;
  while (i < n) {
    if (source[i] === "\\" && clen === 1) {
      out[i] = " ";
      if (i + 1 < n && source[i + 1] !== "\n") {
        out[i + 1] = " ";
      }
      i += 2;
      continue;
    }
    if (source.slice(i, i + clen) === closer) {
      return i + clen;
    }
    if (stopAtNewline && source[i] === "\n") {
      return i + 1;
    }
    if (source[i] !== "\n") {
      out[i] = "s";
    }
    i += 1;
  }
  return n;
}

export function maskPython(source: string): string {
  const out = source.split("");
  let i = 0;
  const n = source.length;
  while (i < n) {
    const ch = source[i];
    if (ch === "#") {
      while (i < n && source[i] !== "\n") {
        out[i] = " ";
        i += 1;
      }
    } else if (ch === '"' || ch === "'") {
      if (source.slice(i, i + 3) === ch.repeat(3)) {
        i = blankUntil(source, out, i + 3, ch.repeat(3), false);
      } else {
        i = blankUntil(source, out, i + 1, ch, true);
      }
    } else {
      i += 1;
    }
  }
  return out.join("");
}

export function maskJava(source: string): string {
  const out = source.split("");
  let i = 0;
  const n = source.length;
  while (i < n) {
    const ch = source[i];
    if (source.slice(i, i + 2) === "//") {
      while (i < n && source[i] !== "\n") {
        out[i] = " ";
        i += 1;
      }
    } else if (source.slice(i, i + 2) === "/*") {
      i += 2;
      while (i < n && source.slice(i, i + 2) !== "*/") {
        if (source[i] !== "\n") {
          out[i] = " ";
        }
        i += 1;
      }
      i = Math.min(i + 2, n);
    } else if (ch === '"' || ch === "'") {
      i = blankUntil(source, out, i + 1, ch, true);
    } else {
      i += 1;
    }
  }
  return out.join("");
}

const TOKEN_RE =
  /[A-Za-z_]\w*|\d+\.?\d*|==|!=|<=|>=|<<|>>|\*\*|\/\/|\+\+|--|\+=|-=|\*=|\/=|%=|&&|\|\||->|:=|::|\S/g;

const KEEP = new Set([
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
]);

export function tokenize(
  code: string,
  language: Language,
  ngramMax = 2,
): string[] {
  const masked = language === "python" ? maskPython(code) : maskJava(code);
  const base: string[] = [];
  for (const m of masked.matchAll(TOKEN_RE)) {
    const tok = m[0];
    const start = m.index ?? 0;
    if (/\d/.test(tok[0])) {
      base.push("NUM");
    } else if (tok === "s".repeat(tok.length) && masked[start] !== code[start]) {
      base.push("STR");
    } else if (/[A-Za-z_]/.test(tok[0])) {
      base.push(KEEP.has(tok) ? tok : "ID");
    } else {
      base.push(tok);
    }
  }
  const out = base.slice();
  for (let n = 2; n <= ngramMax; n++) {
    for (let i = 0; i + n <= base.length; i++) {
      out.push(base.slice(i, i + n).join("_"));
    }
  }
  return out;
}
