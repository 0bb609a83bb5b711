"""Monte Carlo BER campaigns over the DTB channel.

Every frame draws from its own stream seeded by ``(seed, frame_index)``, so
the counts of a point depend only on the seed and the stopping rule, never on
how frames are batched or spread over workers.  Errors are counted on message
bits only.
"""

from __future__ import annotations

import csv
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import channel
from .codec import BPDecoder, EncoderTables, build_encoder, channel_llr, encode
from .formats import read_alist, read_shift_table
from .optimizer import CgaParams, construct
from .protograph import CodeSpec, QCParityCheck, as_fraction

log = logging.getLogger(__name__)

CSV_FIELDS = (
    "code_id",
    "M",
    "ebn0_db",
    "frames",
    "bits",
    "bit_errors",
    "frame_errors",
    "ber",
    "fer",
    "avg_iterations",
    "seed",
    "wall_seconds",
)


@dataclass(frozen=True)
class StopRule:
    min_bit_errors: int = 100
    min_frame_errors: int = 30
    max_frames: int = 100_000

    def __post_init__(self):
        if min(self.min_bit_errors, self.min_frame_errors, self.max_frames) <= 0:
            raise ValueError("stop thresholds must be positive")

    def done(self, frames: int, bit_errors: int, frame_errors: int) -> bool:
        if frames >= self.max_frames:
            return True
        return bit_errors >= self.min_bit_errors and frame_errors >= self.min_frame_errors


@dataclass(frozen=True)
class BerRecord:
    code_id: str
    M: int
    ebn0_db: float
    frames: int
    bits: int
    bit_errors: int
    frame_errors: int
    ber: float
    fer: float
    avg_iterations: float
    seed: int
    wall_seconds: float

    @property
    def upper_bound_only(self) -> bool:
        """No errors seen; ``ber`` is 0 and only an upper bound is known."""
        return self.bit_errors == 0

    def ber_upper_95(self) -> float:
        """One-sided 95% upper confidence bound on the BER.

        Uses the rule of three for zero errors and a normal approximation
        otherwise.
        """
        if self.bit_errors == 0:
            return 3.0 / self.bits
        p = self.ber
        return p + 1.645 * math.sqrt(p * (1 - p) / self.bits)

    def row(self) -> dict:
        return asdict(self)


class Link:
    """Encoder, channel and decoder for one code (or uncoded BPSK).

    ``frame_bits`` sets the frame size of the uncoded link.
    """

    def __init__(
        self,
        code: QCParityCheck | np.ndarray | None,
        code_id: str = "",
        frame_bits: int = 1000,
        max_iter: int = 50,
    ):
        self.max_iter = max_iter
        if code is None:
            self.tables: EncoderTables | None = None
            self.decoder = None
            self.K = frame_bits
            self.N_tx = frame_bits
            self.n = frame_bits
            self.code_id = code_id or "uncoded"
        else:
            self.tables = build_encoder(code)
            self.decoder = BPDecoder(code)
            self.K = self.tables.K
            self.n = self.tables.n
            self.N_tx = len(self.tables.tx_cols)
            self.code_id = code_id or f"P-LDPC({self.N_tx},{self.K})"

    @property
    def rate(self) -> float:
        return self.K / self.N_tx

    def frames(self, M: int, ebn0_db: float, seed: int, start: int, count: int):
        """Simulate frames ``start .. start+count-1``.

        Returns per-frame arrays ``(bit_errors, iterations)``.
        """
        es, sigma2 = channel.ebn0_to_sigma2(ebn0_db, self.rate)
        msgs = np.empty((count, self.K), dtype=np.uint8)
        llr = np.zeros((count, self.n))
        cols = None if self.tables is None else self.tables.tx_cols
        for i in range(count):
            rng = np.random.default_rng(np.random.SeedSequence([seed, start + i]))
            msgs[i] = rng.integers(0, 2, self.K, dtype=np.uint8)
            tx = msgs[i] if self.tables is None else encode(self.tables, msgs[i]).tx
            g = channel.dtb_gain(M, rng, size=self.N_tx)
            sample = channel.transmit_bpsk(tx, g, es, sigma2, rng)
            values = channel_llr(sample.r, sample.gain, sigma2)
            if cols is None:
                llr[i] = values
            else:
                llr[i, cols] = values
        if self.decoder is None:
            decided = (llr < 0).astype(np.uint8)
            iters = np.zeros(count, dtype=np.int64)
            bit_err = (decided != msgs).sum(axis=1)
        else:
            hard, _, iters = self.decoder.decode(llr, self.max_iter)
            bit_err = (hard[:, self.tables.info_cols] != msgs).sum(axis=1)
        return bit_err.astype(np.int64), iters


def _frames_job(args):
    link, M, ebn0_db, seed, start, count = args
    return link.frames(M, ebn0_db, seed, start, count)


def run_point(
    link: Link,
    M: int,
    ebn0_db: float,
    stop: StopRule = StopRule(),
    seed: int = 0,
    workers: int = 1,
    batch: int = 32,
) -> BerRecord:
    """Simulate one (M, Eb/N0) point until the stop rule fires.

    Frames are consumed strictly in index order and the stop rule is checked
    after every frame, so the result is independent of ``batch`` and
    ``workers``.
    """
    t0 = time.perf_counter()
    frames = bit_errors = frame_errors = 0
    iter_sum = 0

    def batches():
        start = 0
        while start < stop.max_frames:
            count = min(batch, stop.max_frames - start)
            yield (link, M, ebn0_db, seed, start, count)
            start += count

    def consume(results) -> bool:
        nonlocal frames, bit_errors, frame_errors, iter_sum
        for errs, iters in results:
            for e, it in zip(errs.tolist(), iters.tolist()):
                frames += 1
                bit_errors += e
                frame_errors += e > 0
                iter_sum += it
                if stop.done(frames, bit_errors, frame_errors):
                    return True
        return False

    if workers <= 1:
        for job in batches():
            if consume([_frames_job(job)]):
                break
    else:
        with ProcessPoolExecutor(workers) as pool:
            jobs = batches()
            pending = []
            finished = False
            while not finished:
                while len(pending) < 2 * workers:
                    job = next(jobs, None)
                    if job is None:
                        break
                    pending.append(pool.submit(_frames_job, job))
                if not pending:
                    break
                finished = consume([pending.pop(0).result()])
            for fut in pending:
                fut.cancel()

    bits = frames * link.K
    return BerRecord(
        code_id=link.code_id,
        M=M,
        ebn0_db=float(ebn0_db),
        frames=frames,
        bits=bits,
        bit_errors=bit_errors,
        frame_errors=frame_errors,
        ber=bit_errors / bits if bits else 0.0,
        fer=frame_errors / frames if frames else 0.0,
        avg_iterations=iter_sum / frames if frames else 0.0,
        seed=seed,
        wall_seconds=round(time.perf_counter() - t0, 3),
    )


@dataclass
class Campaign:
    """A sweep over node counts and Eb/N0 values for one code."""

    code: str = "uncoded"
    n: int = 1000
    rate: str = "1/2"
    seed: int = 0
    m_list: list[int] = field(default_factory=lambda: [1])
    ebn0_list: list[float] = field(default_factory=lambda: [0.0])
    min_bit_errors: int = 100
    min_frame_errors: int = 30
    max_frames: int = 100_000
    max_iter: int = 50
    workers: int = 1
    out: str = "results.csv"
    batch: int = 32
    cga_evaluations: int = CgaParams().max_evaluations

    def __post_init__(self):
        if not self.m_list or not self.ebn0_list:
            raise ValueError("sweep lists must be non-empty")
        StopRule(self.min_bit_errors, self.min_frame_errors, self.max_frames)

    @property
    def stop(self) -> StopRule:
        return StopRule(self.min_bit_errors, self.min_frame_errors, self.max_frames)


def parse_campaign(text: str) -> Campaign:
    """Parse ``key=value`` lines; list values are comma separated."""
    types = {f.name: f.type for f in fields(Campaign)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        kind = types[key]
        if kind == "list[int]":
            values[key] = [int(v) for v in value.split(",") if v.strip()]
        elif kind == "list[float]":
            values[key] = [float(v) for v in value.split(",") if v.strip()]
        elif kind == "int":
            values[key] = int(value)
        else:
            values[key] = value
    return Campaign(**values)


def load_campaign(path: str | Path) -> Campaign:
    path = Path(path)
    c = parse_campaign(path.read_text())
    out = Path(c.out)
    if not out.is_absolute():
        c.out = str(path.parent / out)
    return c


def build_link(c: Campaign) -> Link:
    """Resolve the campaign's ``code`` entry into a link."""
    if c.code == "uncoded":
        return Link(None, "uncoded", frame_bits=c.n, max_iter=c.max_iter)
    if c.code == "construct":
        spec = CodeSpec(c.n, as_fraction(c.rate), c.seed)
        code = construct(spec, CgaParams(max_evaluations=c.cga_evaluations))
        ident = f"P-LDPC({code.N_tx},{code.K})-seed{c.seed}"
        return Link(code, ident, max_iter=c.max_iter)
    path = Path(c.code)
    if path.suffix == ".alist":
        return Link(read_alist(path), path.stem, max_iter=c.max_iter)
    return Link(read_shift_table(path), path.stem, max_iter=c.max_iter)


def _read_done(path: Path, code_id: str, seed: int) -> list[BerRecord]:
    if not path.exists() or path.stat().st_size == 0:
        return []
    done = []
    with path.open(newline="") as fh:
        for row in csv.DictReader(fh):
            if row["code_id"] != code_id or int(row["seed"]) != seed:
                continue
            done.append(
                BerRecord(
                    code_id=row["code_id"],
                    M=int(row["M"]),
                    ebn0_db=float(row["ebn0_db"]),
                    frames=int(row["frames"]),
                    bits=int(row["bits"]),
                    bit_errors=int(row["bit_errors"]),
                    frame_errors=int(row["frame_errors"]),
                    ber=float(row["ber"]),
                    fer=float(row["fer"]),
                    avg_iterations=float(row["avg_iterations"]),
                    seed=int(row["seed"]),
                    wall_seconds=float(row["wall_seconds"]),
                )
            )
    return done


def run_campaign(c: Campaign, link: Link | None = None) -> list[BerRecord]:
    """Run the Cartesian (M, Eb/N0) sweep, appending rows to ``c.out``.

    Points already present in the file for the same code and seed are
    skipped, so an interrupted campaign resumes where it stopped.
    """
    out = Path(c.out)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        with out.open("a"):
            pass
    except OSError as exc:
        raise OSError(f"cannot write results to {out}: {exc}") from exc

    link = link or build_link(c)
    done = {(r.M, r.ebn0_db): r for r in _read_done(out, link.code_id, c.seed)}
    records = []
    new_file = out.stat().st_size == 0
    with out.open("a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        if new_file:
            writer.writeheader()
            fh.flush()
        for M in c.m_list:
            for ebn0 in c.ebn0_list:
                prior = done.get((M, float(ebn0)))
                if prior is not None:
                    records.append(prior)
                    continue
                rec = run_point(link, M, ebn0, c.stop, c.seed, c.workers, c.batch)
                writer.writerow(rec.row())
                fh.flush()
                records.append(rec)
                note = "  (no errors; upper bound only)" if rec.upper_bound_only else ""
                log.info(
                    "%s M=%d Eb/N0=%.2f dB: BER=%.3e FER=%.3e over %d frames%s",
                    rec.code_id, M, ebn0, rec.ber, rec.fer, rec.frames, note,
                )
    return records


def summarize(records: list[BerRecord]) -> str:
    lines = [f"{'M':>3} {'Eb/N0':>7} {'frames':>8} {'BER':>10} {'FER':>10}"]
    for r in records:
        ber = f"<{r.ber_upper_95():.1e}" if r.upper_bound_only else f"{r.ber:.3e}"
        lines.append(f"{r.M:>3} {r.ebn0_db:>7.2f} {r.frames:>8} {ber:>10} {r.fer:>10.3e}")
    return "\n".join(lines)
