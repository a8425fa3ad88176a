"""Standard Workload Format traces to interval instances.

Every job line has 18 whitespace-separated fields; field 2 is the submit
time and field 4 the run time (seconds). A job becomes the interval
[submit, submit + run). Jobs whose run time is missing (-1) or not
positive are dropped and counted.
"""

from __future__ import annotations

import gzip
import io
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .core import Instance, Interval, to_time
from .errors import EmptyTrace, MalformedLine

SWF_FIELDS = 18
SUBMIT, RUNTIME = 1, 3  # zero-based positions of fields 2 and 4
GZIP_MAGIC = b"\x1f\x8b"


@dataclass(frozen=True)
class SwfScan:
    instance: Instance
    kept: int
    dropped: int
    total: int
    job_numbers: tuple[int, ...]  # original job number per interval id


def _open_text(source) -> IO[str]:
    if isinstance(source, (str, Path)):
        raw = Path(source).read_bytes()
    elif isinstance(source, bytes):
        raw = source
    else:
        data = source.read()
        if isinstance(data, str):
            return io.StringIO(data)
        raw = data
    if raw[:2] == GZIP_MAGIC:
        raw = gzip.decompress(raw)
    return io.StringIO(raw.decode("utf-8", errors="replace"))


def _jobs(lines: Iterable[str]):
    for line_no, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith(";"):
            continue
        fields = text.split()
        if len(fields) != SWF_FIELDS:
            raise MalformedLine(line_no, f"expected {SWF_FIELDS} fields, found {len(fields)}")
        try:
            job = int(Fraction(fields[0]))
            submit = to_time(fields[SUBMIT])
            run = to_time(fields[RUNTIME])
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedLine(line_no, str(exc)) from None
        yield line_no, job, submit, run


def scan_swf(source, limit: int | None = None) -> SwfScan:
    """Parse a trace (path, bytes or stream; gzip detected by magic bytes).

    With ``limit`` only the first ``limit`` kept jobs in release order are
    returned; the counts still describe the whole file.
    """
    kept, total = [], 0
    for line_no, job, submit, run in _jobs(_open_text(source)):
        total += 1
        if run <= 0 or submit < 0:
            continue
        kept.append((submit, job, submit + run))
    if not kept:
        raise EmptyTrace("no job with a positive run time")
    kept.sort()
    n_kept = len(kept)
    if limit is not None:
        kept = kept[:limit]
    ivs = tuple(Interval(i, r, d) for i, (r, _, d) in enumerate(kept))
    return SwfScan(
        instance=Instance(ivs),
        kept=n_kept,
        dropped=total - n_kept,
        total=total,
        job_numbers=tuple(job for _, job, _ in kept),
    )


def parse_swf(source, limit: int | None = None) -> Instance:
    return scan_swf(source, limit).instance


def swf_line(job: int, submit, run) -> str:
    fields = [job, submit, 0, run] + [-1] * (SWF_FIELDS - 4)
    return " ".join(str(f) for f in fields)


def synthetic_swf(n: int, seed: int, *, mean_gap: float = 430.0,
                  max_run: int = 62643, invalid_share: float = 0.02) -> str:
    """A trace with SWF structure: Poisson submits, log-uniform run times
    in [1, max_run], and a small share of jobs with run time 0 or -1."""
    gen = np.random.default_rng(seed)
    submits = np.floor(np.cumsum(gen.exponential(mean_gap, n))).astype(np.int64)
    runs = np.floor(np.exp(gen.uniform(0, np.log(max_run + 1), n))).astype(np.int64)
    runs = np.clip(runs, 1, max_run)
    runs[0] = max_run  # pin k
    runs[min(1, n - 1)] = 1  # pin the minimum length
    bad = gen.random(n) < invalid_share
    bad[: min(2, n)] = False
    runs = np.where(bad, gen.choice([0, -1], n), runs)
    lines = [
        "; Version: 2.2",
        f"; synthetic trace, seed {seed}",
        f"; MaxJobs: {n}",
    ]
    lines += [swf_line(i + 1, int(s), int(r)) for i, (s, r) in enumerate(zip(submits, runs))]
    return "\n".join(lines) + "\n"
