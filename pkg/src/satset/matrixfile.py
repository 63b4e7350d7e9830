"""Plain-text parity-check matrix files (``.pchk``).

Layout::

    # optional comment lines
    q n r
    c_0 c_1 ... c_e        (modulus, low-to-high, or "-" for a prime field)
    r lines of n space-separated element indices

Writing is canonical: single spaces, ``\\n`` line ends, a trailing newline.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from satset.field import make_field
from satset.verify import ParityCheckMatrix


class MatrixParseError(ValueError):
    def __init__(self, line: int, col: int, msg: str):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


def dumps(H: ParityCheckMatrix, comments: list[str] | None = None) -> str:
    out = [f"# {c}" for c in comments or []]
    out.append(f"{H.q} {H.n} {H.r}")
    out.append(" ".join(map(str, H.F.modulus)) if H.F.modulus else "-")
    out.extend(" ".join(map(str, row)) for row in H.entries.tolist())
    return "\n".join(out) + "\n"


def _ints(text: str, lineno: int, what: str) -> list[int]:
    vals, col = [], 1
    for tok in text.split():
        col = text.index(tok, col - 1) + 1
        try:
            vals.append(int(tok))
        except ValueError:
            raise MatrixParseError(lineno, col, f"expected an integer in {what}, got {tok!r}") from None
        col += len(tok)
    return vals


def loads(text: str) -> ParityCheckMatrix:
    lines = text.splitlines()
    k = 0
    while k < len(lines) and (lines[k].startswith("#") or not lines[k].strip()):
        k += 1
    if k == len(lines):
        raise MatrixParseError(k + 1, 1, "missing header line 'q n r'")
    head = _ints(lines[k], k + 1, "the header")
    if len(head) != 3:
        raise MatrixParseError(k + 1, 1, f"header needs 3 integers 'q n r', got {len(head)}")
    q, n, r = head
    if k + 1 >= len(lines):
        raise MatrixParseError(k + 2, 1, "missing modulus line")
    mline = lines[k + 1].strip()
    try:
        F = make_field(q, None if mline == "-" else _ints(mline, k + 2, "the modulus"))
    except ValueError as exc:
        raise MatrixParseError(k + 1 if "prime power" in str(exc) else k + 2, 1, str(exc)) from None
    body = lines[k + 2 :]
    if len(body) < r:
        raise MatrixParseError(k + 3 + len(body), 1, f"expected {r} matrix rows, found {len(body)}")
    rows = []
    for i, line in enumerate(body[:r]):
        ln = k + 3 + i
        row = _ints(line, ln, "a matrix row")
        if len(row) != n:
            raise MatrixParseError(ln, 1, f"expected {n} entries, found {len(row)}")
        for j, x in enumerate(row):
            if not 0 <= x < q:
                raise MatrixParseError(ln, j + 1, f"entry {x} outside [0, {q})")
        rows.append(row)
    extra = [i for i, line in enumerate(body[r:]) if line.strip()]
    if extra:
        raise MatrixParseError(k + 3 + r + extra[0], 1, "unexpected content after the matrix")
    return ParityCheckMatrix(F, np.array(rows, dtype=np.intp).reshape(r, n))


def write(path: str | Path, H: ParityCheckMatrix, comments: list[str] | None = None) -> None:
    Path(path).write_bytes(dumps(H, comments).encode("ascii"))


def read(path: str | Path) -> ParityCheckMatrix:
    return loads(Path(path).read_text(encoding="ascii"))
