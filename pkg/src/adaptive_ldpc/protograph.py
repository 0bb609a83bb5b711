"""Protograph algebra: AR4JA base, rate adaptation, lifting order and lifting.

A protograph is stored as a small matrix of edge multiplicities plus the set of
punctured columns.  Lifting by order ``v`` replaces every cell ``(r, c)`` with a
``v x v`` block that is the GF(2) sum of ``mult[r, c]`` distinct permutation
matrices.  Cyclic shifts use the convention that row ``i`` of a block with
shift ``s`` has its one at column ``(i + s) mod v``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np


class ConfigurationError(ValueError):
    """A protograph asset is missing or malformed."""


class UnsupportedRateError(ValueError):
    """The requested code rate cannot be produced by this path."""


class InvalidBlockLengthError(ValueError):
    """The requested block-length is too short for the protograph."""


class InvalidAssignmentError(ValueError):
    """A shift assignment does not match its protograph or collides."""


def as_fraction(rate) -> Fraction:
    """Parse ``"1/2"``, ``0.5`` or a Fraction into an exact Fraction."""
    if isinstance(rate, Fraction):
        return rate
    if isinstance(rate, str):
        return Fraction(rate.strip())
    if isinstance(rate, float):
        return Fraction(rate).limit_denominator(10_000)
    return Fraction(rate)


@dataclass(frozen=True, eq=False)
class ProtoMatrix:
    """Edge-multiplicity matrix of a protograph with its punctured columns."""

    mult: np.ndarray
    punctured: tuple[int, ...] = ()
    name: str = ""

    def __post_init__(self):
        mult = np.array(self.mult, dtype=np.int64)
        if mult.ndim != 2 or mult.size == 0:
            raise ConfigurationError("protomatrix must be a non-empty 2-D array")
        if (mult < 0).any():
            raise ConfigurationError("edge multiplicities must be non-negative")
        if not (mult.sum(axis=1) > 0).all() or not (mult.sum(axis=0) > 0).all():
            raise ConfigurationError("every row and column needs at least one edge")
        punctured = tuple(sorted(set(int(p) for p in self.punctured)))
        if any(p < 0 or p >= mult.shape[1] for p in punctured):
            raise ConfigurationError(f"punctured columns {punctured} out of range")
        mult.setflags(write=False)
        object.__setattr__(self, "mult", mult)
        object.__setattr__(self, "punctured", punctured)
        rate = self.design_rate
        if not 0 <= rate < 1:
            raise ConfigurationError(f"design rate {rate} outside [0, 1)")

    @property
    def rows(self) -> int:
        return self.mult.shape[0]

    @property
    def cols(self) -> int:
        return self.mult.shape[1]

    @property
    def design_rate(self) -> Fraction:
        return Fraction(self.cols - self.rows, self.cols - len(self.punctured))

    def edge_copies(self) -> list[tuple[int, int, int]]:
        """All ``(r, c, k)`` edge copies in row-major order."""
        return [
            (r, c, k)
            for r in range(self.rows)
            for c in range(self.cols)
            for k in range(int(self.mult[r, c]))
        ]

    @property
    def n_edges(self) -> int:
        return int(self.mult.sum())

    def drop_columns(self, columns: Sequence[int], name: str | None = None) -> ProtoMatrix:
        keep = [c for c in range(self.cols) if c not in set(columns)]
        remap = {old: new for new, old in enumerate(keep)}
        return ProtoMatrix(
            self.mult[:, keep],
            tuple(remap[p] for p in self.punctured if p in remap),
            self.name if name is None else name,
        )

    def append_columns(self, columns: np.ndarray, name: str | None = None) -> ProtoMatrix:
        columns = np.asarray(columns, dtype=np.int64).reshape(self.rows, -1)
        return ProtoMatrix(
            np.hstack([self.mult, columns]),
            self.punctured,
            self.name if name is None else name,
        )

    def __eq__(self, other):
        if not isinstance(other, ProtoMatrix):
            return NotImplemented
        return (
            self.mult.shape == other.mult.shape
            and bool((self.mult == other.mult).all())
            and self.punctured == other.punctured
        )

    def __hash__(self):
        return hash((self.mult.tobytes(), self.mult.shape, self.punctured))

    def __repr__(self):
        return (
            f"ProtoMatrix(name={self.name!r}, rows={self.rows}, cols={self.cols}, "
            f"punctured={self.punctured}, mult={self.mult.tolist()})"
        )


@dataclass(frozen=True)
class CodeSpec:
    """Target block-length, rate and shared construction key."""

    N: int
    R: Fraction
    seed: int = 0
    girth_target: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "R", as_fraction(self.R))
        if not 0 < self.R < 1:
            raise UnsupportedRateError(f"rate {self.R} outside (0, 1)")
        if self.N < 1:
            raise InvalidBlockLengthError(f"block-length {self.N} must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True, eq=False)
class ShiftAssignment:
    """Permutation choice for every edge copy of a protograph.

    ``cells`` maps ``(r, c)`` to a tuple with one entry per parallel edge.  An
    entry is either an ``int`` cyclic shift in ``[0, v)`` or a tuple giving an
    explicit permutation (row ``i`` -> column ``perm[i]``).
    """

    v: int
    cells: Mapping[tuple[int, int], tuple]

    @classmethod
    def from_flat(cls, proto: ProtoMatrix, v: int, shifts: Sequence[int]) -> ShiftAssignment:
        edges = proto.edge_copies()
        if len(shifts) != len(edges):
            raise InvalidAssignmentError(
                f"expected {len(edges)} shifts, got {len(shifts)}"
            )
        cells: dict[tuple[int, int], list[int]] = {}
        for (r, c, _), s in zip(edges, shifts):
            cells.setdefault((r, c), []).append(int(s) % v)
        return cls(v, {key: tuple(val) for key, val in cells.items()})

    @classmethod
    def zeros(cls, proto: ProtoMatrix, v: int) -> ShiftAssignment:
        """Shifts 0, 1, 2, ... inside each cell (all zero for single edges)."""
        return cls(
            v,
            {
                (r, c): tuple(k % v for k in range(int(proto.mult[r, c])))
                for r in range(proto.rows)
                for c in range(proto.cols)
                if proto.mult[r, c]
            },
        )

    @property
    def is_circulant(self) -> bool:
        return all(isinstance(e, (int, np.integer)) for val in self.cells.values() for e in val)

    def flat(self, proto: ProtoMatrix) -> np.ndarray:
        """Shifts in ``proto.edge_copies()`` order (circulant assignments only)."""
        if not self.is_circulant:
            raise InvalidAssignmentError("explicit permutations have no flat shift form")
        return np.array(
            [self.cells[(r, c)][k] for r, c, k in proto.edge_copies()], dtype=np.int64
        )

    def __eq__(self, other):
        if not isinstance(other, ShiftAssignment):
            return NotImplemented
        return self.v == other.v and dict(self.cells) == dict(other.cells)

    def __hash__(self):
        return hash((self.v, tuple(sorted(self.cells.items()))))


@dataclass(frozen=True, eq=False)
class QCParityCheck:
    """Lifted parity-check matrix with its block structure.

    ``truncated`` counts trailing bit-columns removed after lifting; the block
    structure still describes the untruncated matrix.
    """

    H: np.ndarray
    v: int
    proto: ProtoMatrix
    structure: ShiftAssignment
    truncated: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        H = np.asarray(self.H, dtype=np.uint8)
        H.setflags(write=False)
        object.__setattr__(self, "H", H)

    @property
    def n(self) -> int:
        """Full codeword length, punctured positions included."""
        return self.H.shape[1]

    @property
    def punctured_cols(self) -> np.ndarray:
        cols = [p * self.v + i for p in self.proto.punctured for i in range(self.v)]
        return np.array([c for c in cols if c < self.n], dtype=np.int64)

    @property
    def tx_cols(self) -> np.ndarray:
        mask = np.ones(self.n, dtype=bool)
        mask[self.punctured_cols] = False
        return np.flatnonzero(mask)

    @property
    def N_tx(self) -> int:
        return self.n - len(self.punctured_cols)

    @property
    def K(self) -> int:
        return self.n - self.H.shape[0]

    @property
    def rate(self) -> Fraction:
        return Fraction(self.K, self.N_tx)

    def __eq__(self, other):
        if not isinstance(other, QCParityCheck):
            return NotImplemented
        return (
            self.v == other.v
            and self.truncated == other.truncated
            and self.proto == other.proto
            and self.structure == other.structure
            and np.array_equal(self.H, other.H)
        )

    __hash__ = None


def _read_lines(text: str) -> list[str]:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return lines


def parse_protograph(text: str, name: str = "") -> ProtoMatrix:
    """Parse the plain-text protograph format.

    Line 1 is ``rows cols``, line 2 lists punctured column indices (or ``-``),
    followed by ``rows`` lines of multiplicities.  ``#`` starts a comment.
    """
    lines = _read_lines(text)
    try:
        rows, cols = (int(t) for t in lines[0].split())
        punct_line = lines[1].split()
        punctured = () if punct_line == ["-"] else tuple(int(t) for t in punct_line)
        mult = [[int(t) for t in line.split()] for line in lines[2 : 2 + rows]]
    except (IndexError, ValueError) as exc:
        raise ConfigurationError(f"malformed protograph {name!r}: {exc}") from exc
    if len(mult) != rows or any(len(row) != cols for row in mult):
        raise ConfigurationError(f"protograph {name!r} does not match header {rows}x{cols}")
    return ProtoMatrix(np.array(mult), punctured, name)


def format_protograph(p: ProtoMatrix) -> str:
    punct = " ".join(map(str, p.punctured)) if p.punctured else "-"
    body = "\n".join(" ".join(map(str, row)) for row in p.mult.tolist())
    return f"{p.rows} {p.cols}\n{punct}\n{body}\n"


def _asset_text(name: str) -> str:
    try:
        return resources.files("adaptive_ldpc.data").joinpath(name).read_text()
    except (FileNotFoundError, OSError) as exc:
        raise ConfigurationError(f"missing asset {name}") from exc


def load_protograph(path: str | Path) -> ProtoMatrix:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read protograph {path}: {exc}") from exc
    return parse_protograph(text, path.stem)


def ar4ja_base() -> ProtoMatrix:
    """The rate-1/2 AR4JA protograph (3 checks, 5 variables, 1 punctured)."""
    return parse_protograph(_asset_text("ar4ja.txt"), "AR4JA-1/2")


def ar4ja_extension_template() -> np.ndarray:
    """Check-multiplicity columns appended, in cyclic order, to raise the rate."""
    lines = _read_lines(_asset_text("ar4ja_extension.txt"))
    try:
        cols = np.array([[int(t) for t in line.split()] for line in lines], dtype=np.int64)
    except ValueError as exc:
        raise ConfigurationError(f"malformed extension template: {exc}") from exc
    if cols.ndim != 2 or cols.shape[0] == 0:
        raise ConfigurationError("extension template is empty")
    return cols.T


def additional_nodes_for_rate(R) -> int:
    """Number of nodes appended to the rate-1/3 core to reach rate ``R``."""
    R = as_fraction(R)
    if not Fraction(1, 3) <= R < 1:
        raise UnsupportedRateError(
            f"rate {R} outside [1/3, 1); use truncation for lower rates"
        )
    return math.floor((1 - 3 * R) / (R - 1))


def family_rate(n_R: int) -> Fraction:
    return Fraction(n_R + 1, n_R + 3)


def lifting_order(N: int, n_R: int) -> int:
    """Largest ``v`` with ``v * (n_R + 3) <= N``."""
    v = N // (n_R + 3)
    if v == 0:
        raise InvalidBlockLengthError(
            f"block-length {N} shorter than the {n_R + 3} transmitted protograph nodes"
        )
    return v


def extend_for_rate(base: ProtoMatrix, R) -> ProtoMatrix:
    """Protograph of design rate ``R`` built from the base by node appending.

    The last base column is the information node removed for rate 1/3; every
    further node comes from the shipped extension template.
    """
    R = as_fraction(R)
    n_R = additional_nodes_for_rate(R)
    if family_rate(n_R) != R:
        raise UnsupportedRateError(
            f"rate {R} is not (n+1)/(n+3) for any n; nearest lower is {family_rate(n_R)}"
        )
    label = f"{base.name or 'proto'}-{R}"
    core = base.drop_columns([base.cols - 1], name=label)
    if n_R == 0:
        return core
    if n_R == 1:
        return ProtoMatrix(base.mult, base.punctured, label)
    template = ar4ja_extension_template()
    if template.shape[0] != base.rows:
        raise ConfigurationError("extension template does not match base row count")
    extra = np.stack(
        [template[:, k % template.shape[1]] for k in range(n_R - 1)], axis=1
    )
    return base.append_columns(extra, name=label)


def _block(v: int, entry) -> np.ndarray:
    block = np.zeros((v, v), dtype=np.uint8)
    rows = np.arange(v)
    if isinstance(entry, (int, np.integer)):
        if not 0 <= entry < v:
            raise InvalidAssignmentError(f"shift {entry} outside [0, {v})")
        block[rows, (rows + int(entry)) % v] = 1
    else:
        perm = np.asarray(entry, dtype=np.int64)
        if perm.shape != (v,) or not np.array_equal(np.sort(perm), rows):
            raise InvalidAssignmentError(f"{entry!r} is not a permutation of size {v}")
        block[rows, perm] = 1
    return block


def _entry_key(entry):
    return ("s", int(entry)) if isinstance(entry, (int, np.integer)) else ("p", tuple(entry))


def validate_assignment(p: ProtoMatrix, shifts: ShiftAssignment) -> None:
    if shifts.v < 1:
        raise InvalidAssignmentError("lifting order must be at least 1")
    expected = {(r, c) for r in range(p.rows) for c in range(p.cols) if p.mult[r, c]}
    if set(shifts.cells) != expected:
        raise InvalidAssignmentError("assignment cells do not cover the protograph edges")
    for (r, c), entries in shifts.cells.items():
        if len(entries) != p.mult[r, c]:
            raise InvalidAssignmentError(
                f"cell {(r, c)} needs {p.mult[r, c]} entries, got {len(entries)}"
            )
        blocks = [_block(shifts.v, e).tobytes() for e in entries]
        if len(set(blocks)) != len(blocks):
            raise InvalidAssignmentError(f"parallel edges collide in cell {(r, c)}")


def lift(p: ProtoMatrix, shifts: ShiftAssignment) -> QCParityCheck:
    """Copy-and-permute lifting of ``p`` with the given permutations."""
    validate_assignment(p, shifts)
    v = shifts.v
    H = np.zeros((v * p.rows, v * p.cols), dtype=np.uint8)
    for (r, c), entries in shifts.cells.items():
        block = np.zeros((v, v), dtype=np.uint8)
        for e in entries:
            block ^= _block(v, e)
        H[r * v : (r + 1) * v, c * v : (c + 1) * v] = block
    return QCParityCheck(H, v, p, shifts)


def lift_shifts(p: ProtoMatrix, v: int, shifts: Sequence[int]) -> QCParityCheck:
    return lift(p, ShiftAssignment.from_flat(p, v, shifts))


def circulant_blocks_ok(code: QCParityCheck) -> bool:
    """Check every ``v x v`` block against its recorded cyclic shifts."""
    if not code.structure.is_circulant:
        return False
    v, p = code.v, code.proto
    full_cols = v * p.cols
    H = np.zeros((v * p.rows, full_cols), dtype=np.uint8)
    H[:, : code.n] = code.H
    i = np.arange(v)
    for r in range(p.rows):
        for c in range(p.cols):
            block = H[r * v : (r + 1) * v, c * v : (c + 1) * v]
            expect = np.zeros((v, v), dtype=np.uint8)
            for s in code.structure.cells.get((r, c), ()):
                expect[i, (i + s) % v] ^= 1
            kept = min(v, max(0, code.n - c * v))
            if not np.array_equal(block[:, :kept], expect[:, :kept]):
                return False
    return True
