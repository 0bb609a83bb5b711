"""Compact genetic algorithm over circulant shifts, keyed code construction
and rate truncation."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .protograph import (
    CodeSpec,
    InvalidBlockLengthError,
    ProtoMatrix,
    QCParityCheck,
    ShiftAssignment,
    UnsupportedRateError,
    additional_nodes_for_rate,
    ar4ja_base,
    as_fraction,
    extend_for_rate,
    family_rate,
    lift,
    lifting_order,
)
from .tanner import girth_of_matrix, shift_girth

log = logging.getLogger(__name__)


class ConstructionError(RuntimeError):
    """No valid shift assignment could be produced."""


class InvalidSpecError(ValueError):
    """The (N, R) pair cannot be realised."""


@dataclass(frozen=True)
class CgaParams:
    """Compact-GA controls.

    ``init_perturbation`` in ``[0, 0.5)`` moves the starting probability of
    every bit away from 0.5 by a seeded amount, which is one of the keyed
    knobs two parties can agree on.
    """

    virtual_population: int = 255
    max_evaluations: int = 200_000
    bits_per_shift: int | None = None
    restarts: int = 4
    girth_cap: int = 12
    seed: int = 0
    init_perturbation: float = 0.0

    def __post_init__(self):
        if self.virtual_population < 2:
            raise ValueError("virtual_population must be >= 2")
        if self.max_evaluations < 2:
            raise ValueError("max_evaluations must be >= 2")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.girth_cap < 4 or self.girth_cap % 2:
            raise ValueError("girth_cap must be an even integer >= 4")
        if not 0 <= self.init_perturbation < 0.5:
            raise ValueError("init_perturbation must lie in [0, 0.5)")


@dataclass(frozen=True, order=True)
class Fitness:
    """Lexicographic objective: larger girth, then fewer shortest cycles."""

    girth: int
    neg_multiplicity: int

    @classmethod
    def from_report(cls, report) -> Fitness:
        if report.girth is None:
            return cls(10**9, 0)
        return cls(report.girth, 0 if report.capped else -report.multiplicity)


@dataclass
class OptimizationResult:
    shifts: ShiftAssignment
    fitness: Fitness
    evaluations: int
    log: list[tuple[int, int, int, Fitness]] = field(default_factory=list)


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), *key]))


def repair_collisions(proto: ProtoMatrix, v: int, shifts: np.ndarray) -> np.ndarray:
    """Bump repeated shifts inside a multi-edge cell by one until distinct."""
    if int(proto.mult.max()) > v:
        raise ConstructionError(
            f"cell multiplicity {int(proto.mult.max())} exceeds lifting order {v}"
        )
    shifts = np.asarray(shifts, dtype=np.int64) % v
    out = shifts.copy()
    i = 0
    for r in range(proto.rows):
        for c in range(proto.cols):
            m = int(proto.mult[r, c])
            if m > 1:
                seen: set[int] = set()
                for k in range(i, i + m):
                    s = int(out[k])
                    while s in seen:
                        s = (s + 1) % v
                    out[k] = s
                    seen.add(s)
            i += m
    return out


class _Evaluator:
    def __init__(self, proto: ProtoMatrix, v: int, bits: int, girth_cap: int):
        self.proto, self.v, self.bits, self.cap = proto, v, bits, girth_cap
        self.weights = 1 << np.arange(bits - 1, -1, -1, dtype=np.int64)
        self.cache: dict[bytes, tuple[np.ndarray, Fitness, object]] = {}
        self.count = 0

    def decode(self, genome: np.ndarray) -> np.ndarray:
        raw = genome.reshape(-1, self.bits).astype(np.int64) @ self.weights
        return repair_collisions(self.proto, self.v, raw % self.v)

    def shifts_fitness(self, shifts: np.ndarray):
        report = shift_girth(self.proto, self.v, shifts, self.cap)
        self.count += 1
        return Fitness.from_report(report), report

    def __call__(self, genome: np.ndarray):
        key = np.packbits(genome).tobytes()
        hit = self.cache.get(key)
        self.count += 1
        if hit is not None:
            return hit
        shifts = self.decode(genome)
        report = shift_girth(self.proto, self.v, shifts, self.cap)
        hit = (shifts, Fitness.from_report(report), report)
        if len(self.cache) > 200_000:
            self.cache.clear()
        self.cache[key] = hit
        return hit


def optimize_shifts(
    p: ProtoMatrix,
    v: int,
    params: CgaParams = CgaParams(),
    *,
    phase: int = 0,
    observer=None,
) -> OptimizationResult:
    """Search circulant shifts of ``p`` at lifting order ``v`` for the best fitness.

    Each restart runs a compact GA with its own seeded stream: two genomes are
    drawn from the probability vector, the fitter one wins (the first on a
    tie), and every bit where they differ moves ``1/n`` toward the winner.  A
    restart ends when every probability sits at 0 or 1 or its share of the
    evaluation budget is spent.  The best genome ever evaluated is returned,
    with the trivial all-zero assignment evaluated first as a baseline.

    ``observer(restart, prob)``, if given, sees the probability vector at the
    start of each restart and after every update.
    """
    if v < 2:
        raise InvalidSpecError("lifting order must be >= 2")
    if int(p.mult.max()) > v:
        raise ConstructionError(
            f"cell multiplicity {int(p.mult.max())} exceeds lifting order {v}"
        )
    bits = params.bits_per_shift or max(1, math.ceil(math.log2(v)))
    n = params.virtual_population
    L = p.n_edges * bits
    ev = _Evaluator(p, v, bits, params.girth_cap)

    base = repair_collisions(p, v, np.zeros(p.n_edges, dtype=np.int64))
    best_fit, report = ev.shifts_fitness(base)
    best_shifts = base
    trace = [(0, report.girth or 0, report.multiplicity, best_fit)]

    per_restart = max(2, (params.max_evaluations - 1) // params.restarts)
    for restart in range(params.restarts):
        rng = _stream(params.seed, phase, restart)
        # probabilities held as integer counts of 1/(2n) so updates are exact
        counts = np.full(L, n, dtype=np.int64)
        if params.init_perturbation:
            delta = rng.uniform(-1, 1, L) * params.init_perturbation * 2 * n
            counts = np.clip(counts + np.rint(delta).astype(np.int64), 1, 2 * n - 1)
        used = 0
        if observer is not None:
            observer(restart, counts / (2 * n))
        while used + 2 <= per_restart:
            prob = counts / (2 * n)
            a = (rng.random(L) < prob).astype(np.uint8)
            b = (rng.random(L) < prob).astype(np.uint8)
            sa, fa, ra = ev(a)
            sb, fb, rb = ev(b)
            used += 2
            for shifts, fit, rep in ((sa, fa, ra), (sb, fb, rb)):
                if fit > best_fit:
                    best_fit, best_shifts = fit, shifts
                trace.append((len(trace), rep.girth or 0, rep.multiplicity, best_fit))
            winner, loser = (a, b) if fa >= fb else (b, a)
            diff = winner != loser
            counts[diff] += np.where(winner[diff] == 1, 2, -2)
            np.clip(counts, 0, 2 * n, out=counts)
            if observer is not None:
                observer(restart, counts / (2 * n))
            if np.all((counts == 0) | (counts == 2 * n)):
                break
        log.debug("restart %d: %d evaluations, best %s", restart, used, best_fit)

    return OptimizationResult(
        ShiftAssignment.from_flat(p, v, best_shifts), best_fit, ev.count, trace
    )


def removable_columns(code: QCParityCheck) -> int:
    """Trailing bit-columns that may be dropped: transmitted information
    columns in block-columns at or after the protograph's row count."""
    p, v = code.proto, code.v
    total = 0
    for c in range(p.cols - 1, -1, -1):
        if c < p.rows or c in p.punctured:
            break
        total += v
    return total - code.truncated


def truncate_columns(code: QCParityCheck, t: int) -> QCParityCheck:
    """Drop the last ``t`` bit-columns of ``code`` (no re-optimisation)."""
    if t < 0 or t > removable_columns(code):
        raise UnsupportedRateError(f"cannot remove {t} trailing columns")
    if t == 0:
        return code
    p, v = code.proto, code.v
    full = lift(p, code.structure)
    total = code.truncated + t
    whole, part = divmod(total, v)
    if whole:
        dropped = list(range(p.cols - whole, p.cols))
        p = p.drop_columns(dropped)
        cells = {k: s for k, s in code.structure.cells.items() if k[1] < p.cols}
        structure = ShiftAssignment(v, cells)
    else:
        structure = code.structure
    H = full.H[:, : full.n - total]
    if not H.any(axis=1).all():
        raise UnsupportedRateError("truncation leaves an empty parity check")
    return QCParityCheck(H, v, p, structure, part, dict(code.meta))


def _columns_for_rate(code: QCParityCheck, target: Fraction) -> int:
    K, N = code.K, code.N_tx
    room = removable_columns(code)
    for t in range(room + 1):
        if Fraction(K - t, N - t) <= target:
            if K - t <= 0:
                break
            return t
    raise UnsupportedRateError(
        f"rate {target} unreachable by removing up to {room} columns from rate {code.rate}"
    )


def truncate_and_reoptimize(
    code: QCParityCheck, target_R, params: CgaParams = CgaParams()
) -> QCParityCheck:
    """Lower the rate by removing trailing information columns, then re-run the GA.

    The smallest number of bit-columns whose removal brings the rate to or
    below ``target_R`` is removed.  Whole block-columns leave the protograph;
    a partially kept block-column is searched as if it were complete, so its
    girth during the search is a lower bound on the truncated code's girth.
    """
    target = as_fraction(target_R)
    if target == code.rate:
        return code
    if target > code.rate or target <= 0:
        raise UnsupportedRateError(
            f"target {target} must lie in (0, {code.rate}) for truncation"
        )
    t = _columns_for_rate(code, target)
    shaped = truncate_columns(code, t)
    result = optimize_shifts(shaped.proto, code.v, params, phase=1)
    out = lift(shaped.proto, result.shifts)
    if shaped.truncated:
        cut = out.n - shaped.truncated
        out = QCParityCheck(out.H[:, :cut], out.v, out.proto, out.structure, shaped.truncated)
    meta = dict(code.meta)
    meta.update(
        achieved_rate=str(out.rate),
        truncated_columns=t,
        fitness=result.fitness,
        log=result.log,
    )
    object.__setattr__(out, "meta", meta)
    return out


def resolve(spec: CodeSpec) -> tuple[ProtoMatrix, int, bool]:
    """Protograph, lifting order, and whether truncation follows, for a spec."""
    base = ar4ja_base()
    R = spec.R
    if R >= Fraction(1, 3):
        n_R = additional_nodes_for_rate(R)
        if family_rate(n_R) == R:
            v = lifting_order(spec.N, n_R)
            if v < 2:
                raise InvalidSpecError(f"lifting order {v} < 2 for N={spec.N}")
            return extend_for_rate(base, R), v, False
        n_src = n_R + 1
    else:
        n_src = 0
    # after truncation N - K = 2v for every member of the family
    v = int(spec.N * (1 - R) / 2)
    if v < 2:
        raise InvalidSpecError(f"lifting order {v} < 2 for N={spec.N}, R={R}")
    return extend_for_rate(base, family_rate(n_src)), v, True


def construct(spec: CodeSpec, params: CgaParams | None = None) -> QCParityCheck:
    """Build the code for ``(N, R, seed)``; equal specs give identical matrices."""
    params = replace(params or CgaParams(), seed=spec.seed)
    try:
        proto, v, truncate = resolve(spec)
    except InvalidBlockLengthError as exc:
        raise InvalidSpecError(str(exc)) from exc
    result = optimize_shifts(proto, v, params)
    code = lift(proto, result.shifts)
    object.__setattr__(
        code, "meta", {"fitness": result.fitness, "log": result.log, "spec": spec}
    )
    if truncate:
        code = truncate_and_reoptimize(code, spec.R, params)
        code.meta["spec"] = spec
        fit = code.meta["fitness"]
    else:
        fit = result.fitness
    if spec.girth_target is not None:
        achieved = fit.girth if not code.truncated else girth_of_matrix(code.H).girth
        if achieved is not None and achieved < spec.girth_target:
            raise ConstructionError(
                f"best girth {achieved} below requested {spec.girth_target}"
            )
    return code
