"""Readers and writers for alist and shift-table parity-check files."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .protograph import (
    ConfigurationError,
    ProtoMatrix,
    QCParityCheck,
    ShiftAssignment,
    lift,
)


def to_alist(H: np.ndarray) -> str:
    """MacKay alist text for a binary matrix (1-indexed, zero padded)."""
    H = np.asarray(H, dtype=np.uint8)
    m, n = H.shape
    col_lists = [np.flatnonzero(H[:, j]) + 1 for j in range(n)]
    row_lists = [np.flatnonzero(H[i, :]) + 1 for i in range(m)]
    max_col = max((len(c) for c in col_lists), default=0)
    max_row = max((len(r) for r in row_lists), default=0)

    def padded(idx, width):
        return " ".join(map(str, list(idx) + [0] * (width - len(idx))))

    lines = [
        f"{n} {m}",
        f"{max_col} {max_row}",
        " ".join(str(len(c)) for c in col_lists),
        " ".join(str(len(r)) for r in row_lists),
    ]
    lines += [padded(c, max_col) for c in col_lists]
    lines += [padded(r, max_row) for r in row_lists]
    return "\n".join(lines) + "\n"


def from_alist(text: str) -> np.ndarray:
    """Parse alist text; accepts both zero-padded and unpadded adjacency lists."""
    lines = [line.split() for line in text.splitlines() if line.strip()]
    try:
        n, m = int(lines[0][0]), int(lines[0][1])
        H = np.zeros((m, n), dtype=np.uint8)
        for j in range(n):
            for tok in lines[4 + j]:
                if int(tok):
                    H[int(tok) - 1, j] = 1
        # row lists are redundant; use them only as a consistency check
        for i in range(m):
            row = {int(t) - 1 for t in lines[4 + n + i] if int(t)}
            if row != set(np.flatnonzero(H[i]).tolist()):
                raise ConfigurationError(f"alist row {i + 1} disagrees with column lists")
    except (IndexError, ValueError) as exc:
        raise ConfigurationError(f"malformed alist: {exc}") from exc
    return H


def read_alist(path: str | Path) -> np.ndarray:
    return from_alist(Path(path).read_text())


def write_alist(path: str | Path, H: np.ndarray) -> None:
    Path(path).write_text(to_alist(H))


def to_shift_table(code: QCParityCheck) -> str:
    """Compact circulant description of a lifted code.

    Header ``rows cols v``; one line per protograph row with a token per cell,
    either comma-separated shifts or ``-`` for a zero block.  Optional trailing
    ``punctured`` and ``truncated`` lines carry the remaining metadata.
    """
    if not code.structure.is_circulant:
        raise ConfigurationError("shift tables only describe circulant assignments")
    p = code.proto
    lines = [f"{p.rows} {p.cols} {code.v}"]
    for r in range(p.rows):
        tokens = []
        for c in range(p.cols):
            shifts = code.structure.cells.get((r, c))
            tokens.append(",".join(str(int(s)) for s in shifts) if shifts else "-")
        lines.append(" ".join(tokens))
    if p.punctured:
        lines.append("punctured " + " ".join(map(str, p.punctured)))
    if code.truncated:
        lines.append(f"truncated {code.truncated}")
    return "\n".join(lines) + "\n"


def from_shift_table(text: str) -> QCParityCheck:
    lines = [line.split() for line in text.splitlines() if line.strip()]
    try:
        rows, cols, v = (int(t) for t in lines[0])
        mult = np.zeros((rows, cols), dtype=np.int64)
        cells = {}
        for r in range(rows):
            tokens = lines[1 + r]
            if len(tokens) != cols:
                raise ConfigurationError(f"shift-table row {r} has {len(tokens)} cells")
            for c, tok in enumerate(tokens):
                if tok == "-":
                    continue
                shifts = tuple(int(s) for s in tok.split(","))
                mult[r, c] = len(shifts)
                cells[(r, c)] = shifts
        punctured: tuple[int, ...] = ()
        truncated = 0
        for extra in lines[1 + rows :]:
            if extra[0] == "punctured":
                punctured = tuple(int(t) for t in extra[1:])
            elif extra[0] == "truncated":
                truncated = int(extra[1])
            else:
                raise ConfigurationError(f"unknown shift-table line {' '.join(extra)!r}")
    except (IndexError, ValueError) as exc:
        raise ConfigurationError(f"malformed shift table: {exc}") from exc
    proto = ProtoMatrix(mult, punctured, "shift-table")
    code = lift(proto, ShiftAssignment(v, cells))
    if truncated:
        from .optimizer import truncate_columns

        code = truncate_columns(code, truncated)
    return code


def read_shift_table(path: str | Path) -> QCParityCheck:
    return from_shift_table(Path(path).read_text())


def write_shift_table(path: str | Path, code: QCParityCheck) -> None:
    Path(path).write_text(to_shift_table(code))


def hamming74() -> np.ndarray:
    """The (7,4) Hamming parity-check matrix shipped as an alist asset."""
    from importlib import resources

    return from_alist(resources.files("adaptive_ldpc.data").joinpath("hamming74.alist").read_text())
