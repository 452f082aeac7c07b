"""Batch reduction over a grid of (N, M) pairs.

Each pair gets a fresh triplet around its character matrix, one normalize()
call, and a shape record.  Records stream to a CSV file as they finish, so
an interrupted sweep resumes by pair key instead of recomputing.
"""

from __future__ import annotations

import csv
import time
from collections import Counter
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .triplet import Triplet

CSV_HEADER = (
    "N",
    "M",
    "e",
    "d",
    "m",
    "n",
    "pseudo_rank",
    "guaranteed_kernel",
    "q_rows",
    "q_cols",
    "elapsed_ms",
)


@dataclass(frozen=True)
class SweepRecord:
    N: int
    M: int
    e: int
    d: int
    m: int
    n: int
    pseudo_rank: int
    guaranteed_kernel: int
    q_rows: int
    q_cols: int
    elapsed_ms: int

    def to_json(self) -> dict[str, int]:
        return asdict(self)

    def csv_row(self) -> list[int]:
        return [getattr(self, name) for name in CSV_HEADER]

    @classmethod
    def from_csv_row(cls, row: Sequence[str]) -> "SweepRecord":
        if len(row) != len(CSV_HEADER):
            raise ValueError(f"need {len(CSV_HEADER)} columns, got {len(row)}")
        return cls(**{name: int(value) for name, value in zip(CSV_HEADER, row)})


def reduce_pair(N: int, M: int) -> SweepRecord:
    """Normalize the (N, M) character matrix and record the outcome."""
    start = time.perf_counter()
    t = Triplet.from_character_matrix(N, M)
    report = t.normalize()
    elapsed_ms = int((time.perf_counter() - start) * 1000)
    return SweepRecord(
        N=N,
        M=M,
        e=t.ring.e,
        d=t.ring.d,
        m=t.m,
        n=t.n,
        pseudo_rank=report.pseudo_rank,
        guaranteed_kernel=report.guaranteed_kernel,
        q_rows=report.q_rows,
        q_cols=report.q_cols,
        elapsed_ms=elapsed_ms,
    )


def _validated(values: Iterable[int], label: str) -> list[int]:
    out = sorted(set(int(v) for v in values))
    if not out:
        raise ValueError(f"{label} range must be nonempty")
    if out[0] < 2:
        raise ValueError(f"{label} values must be >= 2")
    return out


def load_records(path: Path | str) -> list[SweepRecord]:
    """Parse a sweep CSV; missing file reads as empty."""
    path = Path(path)
    if not path.exists():
        return []
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        rows = list(reader)
    if not rows:
        return []
    if tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header in {path}")
    return [SweepRecord.from_csv_row(row) for row in rows[1:]]


def run_sweep(
    n_values: Iterable[int],
    m_values: Iterable[int],
    out_path: Path | str | None = None,
) -> list[SweepRecord]:
    """One record per (N, M) pair, in sorted pair order.

    With out_path, rows already present in the file are reused untouched
    (resume) and fresh rows are appended and flushed one at a time.
    """
    n_list = _validated(n_values, "N")
    m_list = _validated(m_values, "M")
    wanted = [(N, M) for N in n_list for M in m_list]
    existing: dict[tuple[int, int], SweepRecord] = {}
    if out_path is not None:
        existing = {(r.N, r.M): r for r in load_records(out_path)}
    records: dict[tuple[int, int], SweepRecord] = {}
    handle = None
    writer = None
    try:
        if out_path is not None:
            path = Path(out_path)
            fresh = not path.exists() or not path.stat().st_size
            handle = path.open("a", newline="")
            writer = csv.writer(handle)
            if fresh:
                writer.writerow(CSV_HEADER)
                handle.flush()
        for key in wanted:
            if key in existing:
                records[key] = existing[key]
                continue
            record = reduce_pair(*key)
            records[key] = record
            if writer is not None:
                writer.writerow(record.csv_row())
                handle.flush()
    finally:
        if handle is not None:
            handle.close()
    return [records[key] for key in wanted]


def histograms(
    records: Sequence[SweepRecord],
) -> tuple[dict[int, int], dict[int, int]]:
    """Frequency maps over the pairs normalize() did not fully resolve.

    First map counts pseudo-ranks, second counts guaranteed kernel sizes,
    both restricted to records with pseudo_rank < n; the two totals match
    by construction.
    """
    partial = [r for r in records if r.pseudo_rank < r.n]
    ranks = Counter(r.pseudo_rank for r in partial)
    kernels = Counter(r.guaranteed_kernel for r in partial)
    return dict(sorted(ranks.items())), dict(sorted(kernels.items()))
