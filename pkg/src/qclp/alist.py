"""Reading and writing parity-check matrices in alist format.

Layout: ``cols rows``, the maximum column and row weights, the column
weights, the row weights, then one line of 1-based row indices per column
and one line of 1-based column indices per row. Index lines are padded with
zeros to the maximum weight; the reader accepts padded or unpadded lines.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from qclp.gf2 import BinaryMatrix


def format_alist(h: BinaryMatrix) -> str:
    dense = h.to_dense()
    rows, cols = dense.shape
    col_support = [np.flatnonzero(dense[:, j]) + 1 for j in range(cols)]
    row_support = [np.flatnonzero(dense[i]) + 1 for i in range(rows)]
    max_col = max((len(s) for s in col_support), default=0)
    max_row = max((len(s) for s in row_support), default=0)

    def padded(support, width):
        # an all-zero matrix still gets one placeholder per line
        vals = list(support) + [0] * (max(width, 1) - len(support))
        return " ".join(str(int(v)) for v in vals)

    lines = [
        f"{cols} {rows}",
        f"{max_col} {max_row}",
        " ".join(str(len(s)) for s in col_support),
        " ".join(str(len(s)) for s in row_support),
    ]
    lines += [padded(s, max_col) for s in col_support]
    lines += [padded(s, max_row) for s in row_support]
    return "\n".join(lines) + "\n"


def parse_alist(text: str) -> BinaryMatrix:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    try:
        cols, rows = (int(x) for x in lines[0][:2])
        col_weights = [int(x) for x in lines[2]] if cols else []
        row_weights = [int(x) for x in lines[3]] if rows else []
    except (IndexError, ValueError):
        raise ValueError("alist header is malformed") from None
    body = lines[4:] if cols and rows else []
    if len(col_weights) != cols or len(row_weights) != rows:
        raise ValueError("alist weight lines do not match the declared dimensions")
    if len(body) < cols + rows:
        raise ValueError(f"alist needs {cols + rows} index lines, found {len(body)}")
    dense = np.zeros((rows, cols), dtype=np.uint8)
    for j in range(cols):
        idx = [int(x) for x in body[j] if int(x) != 0]
        if len(idx) != col_weights[j]:
            raise ValueError(f"column {j + 1}: weight {col_weights[j]} but {len(idx)} indices")
        dense[np.array(idx, dtype=np.int64) - 1, j] = 1
    for i in range(rows):
        idx = [int(x) for x in body[cols + i] if int(x) != 0]
        if len(idx) != row_weights[i]:
            raise ValueError(f"row {i + 1}: weight {row_weights[i]} but {len(idx)} indices")
        expected = np.flatnonzero(dense[i]) + 1
        if sorted(idx) != expected.tolist():
            raise ValueError(f"row {i + 1} disagrees with the column lists")
    return BinaryMatrix.from_dense(dense)


def write_alist(h: BinaryMatrix, path: str | Path) -> None:
    Path(path).write_text(format_alist(h))


def read_alist(path: str | Path) -> BinaryMatrix:
    return parse_alist(Path(path).read_text())
