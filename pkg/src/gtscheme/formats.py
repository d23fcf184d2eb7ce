"""Canonical text formats: GVC (generator matrix), GTS (scheme), GTO (outcomes).

Every writer emits newline-terminated lines with no trailing whitespace,
so equal objects serialize to identical bytes.
"""
from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .gvcode import GeneratorMatrix
from .params import CodeParams
from .ssf import Scheme


class FormatError(ValueError):
    def __init__(self, msg: str, line: Optional[int] = None, source: str = "<input>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {msg}")


_FIELD = re.compile(r"([a-z]+)=(\S+)")


def _lines(text: str, source: str) -> List[str]:
    if not text.endswith("\n"):
        raise FormatError("file must end with a newline", source=source)
    return text[:-1].split("\n")


def _header(lines: List[str], magic: str, keys, source: str) -> Dict[str, str]:
    if not lines or lines[0] != f"{magic} v1":
        raise FormatError(f"expected header '{magic} v1'", 1, source)
    if len(lines) < 2:
        raise FormatError("missing parameter line", 2, source)
    fields = lines[1].split(" ")
    parsed = {}
    for f in fields:
        match = _FIELD.fullmatch(f)
        if not match:
            raise FormatError(f"malformed field {f!r}", 2, source)
        parsed[match.group(1)] = match.group(2)
    if list(parsed) != list(keys):
        raise FormatError(f"expected fields {' '.join(keys)}", 2, source)
    return parsed


def _int(value: str, line: int, source: str) -> int:
    if not re.fullmatch(r"0|[1-9][0-9]*", value):
        raise FormatError(f"expected a nonnegative integer, got {value!r}", line, source)
    return int(value)


def dump_code(g: GeneratorMatrix) -> str:
    p = g.params
    out = ["GVC v1", f"q={p.q} m={p.m} k={p.k} delta={p.delta.numerator}/{p.delta.denominator}"]
    out += [" ".join(str(int(v)) for v in row) for row in g.entries]
    return "\n".join(out) + "\n"


def parse_code(text: str, source: str = "<input>") -> GeneratorMatrix:
    lines = _lines(text, source)
    head = _header(lines, "GVC", ("q", "m", "k", "delta"), source)
    q, m, k = (_int(head[x], 2, source) for x in "qmk")
    num, _, den = head["delta"].partition("/")
    delta = Fraction(_int(num, 2, source), _int(den, 2, source) if den else 1)
    try:
        params = CodeParams(q=q, m=m, k=k, delta=delta)
    except ValueError as exc:
        raise FormatError(str(exc), 2, source) from None
    body = lines[2:]
    if len(body) != m:
        raise FormatError(f"expected {m} matrix rows, found {len(body)}", 3 + min(len(body), m), source)
    rows = []
    for n, line in enumerate(body, start=3):
        vals = [_int(v, n, source) for v in line.split(" ")]
        if len(vals) != k:
            raise FormatError(f"expected {k} entries, found {len(vals)}", n, source)
        if any(v >= q for v in vals):
            raise FormatError(f"entry outside [0, {q})", n, source)
        rows.append(vals)
    return GeneratorMatrix(np.array(rows, dtype=np.int64).reshape(m, k), params)


def dump_scheme(s: Scheme) -> str:
    out = ["GTS v1", f"n={s.n} r={s.r} t={s.t}"]
    out += [" ".join(map(str, test)) for test in s.tests]
    return "\n".join(out) + "\n"


def parse_scheme(text: str, source: str = "<input>") -> Scheme:
    lines = _lines(text, source)
    head = _header(lines, "GTS", ("n", "r", "t"), source)
    n, r, t = (_int(head[x], 2, source) for x in "nrt")
    body = lines[2:]
    if len(body) != t:
        raise FormatError(f"expected {t} tests, found {len(body)}", 3 + min(len(body), t), source)
    tests = []
    for no, line in enumerate(body, start=3):
        items = [_int(v, no, source) for v in line.split(" ")] if line else []
        if items != sorted(set(items)):
            raise FormatError("items must be strictly increasing", no, source)
        if items and (items[0] < 1 or items[-1] > n):
            raise FormatError(f"item outside [1, {n}]", no, source)
        tests.append(tuple(items))
    return Scheme(n=n, r=r, tests=tuple(tests))


def dump_outcomes(o) -> str:
    o = np.asarray(o, dtype=bool)
    return f"GTO v1\nt={o.size}\n" + "".join("1" if x else "0" for x in o) + "\n"


def parse_outcomes(text: str, source: str = "<input>") -> np.ndarray:
    lines = _lines(text, source)
    head = _header(lines, "GTO", ("t",), source)
    t = _int(head["t"], 2, source)
    if len(lines) != 3:
        raise FormatError("expected exactly one outcome line", min(len(lines) + 1, 4), source)
    bits = lines[2]
    if len(bits) != t or set(bits) - {"0", "1"}:
        raise FormatError(f"expected {t} characters of 0/1", 3, source)
    return np.array([c == "1" for c in bits], dtype=bool)


def _write(path, text: str):
    Path(path).write_bytes(text.encode("ascii"))


def _read(path) -> str:
    try:
        return Path(path).read_bytes().decode("ascii")
    except UnicodeDecodeError:
        raise FormatError("file is not ASCII text", source=str(path)) from None


def write_code(path, g: GeneratorMatrix):
    _write(path, dump_code(g))


def read_code(path) -> GeneratorMatrix:
    return parse_code(_read(path), str(path))


def write_scheme(path, s: Scheme):
    _write(path, dump_scheme(s))


def read_scheme(path) -> Scheme:
    return parse_scheme(_read(path), str(path))


def write_outcomes(path, o):
    _write(path, dump_outcomes(o))


def read_outcomes(path) -> np.ndarray:
    return parse_outcomes(_read(path), str(path))
