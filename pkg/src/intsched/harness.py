"""Experiment sweeps, Monte Carlo aggregation and table output."""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .core import Instance, format_time
from .offline import dp_opt
from .online import greedy, trust
from .predictions import corrupt_by_displacement, prediction_error
from .rng import derive_seed
from .smooth_merge import MergeParams, smooth_merge_batch, theorem_bound

DEFAULT_PAIRS = (MergeParams(Fraction(1, 2), Fraction(1, 2)),
                 MergeParams(Fraction(3, 4), Fraction(33, 100)))
SIGMAS = 4


def d_grid(n: int, d_points: int) -> list[Fraction]:
    """Equally spaced d in [0, n] with the d = 0 point left out."""
    if d_points < 2:
        raise ValueError("need at least 2 grid points")
    return [Fraction(i * n, d_points - 1) for i in range(1, d_points)]


def parse_pairs(text: str) -> tuple[MergeParams, ...]:
    """``"0.5:0.5,0.75:0.33"`` to MergeParams."""
    out = []
    for chunk in text.split(","):
        pt, pg = chunk.split(":")
        out.append(MergeParams(Fraction(pt.strip()), Fraction(pg.strip())))
    return tuple(out)


def param_tag(p: MergeParams) -> str:
    return f"sm_{float(p.pT):g}_{float(p.pG):g}"


@dataclass(frozen=True)
class _RowTask:
    inst: Instance
    row: int
    d: Fraction
    trials: int
    pairs: tuple[MergeParams, ...]
    seed: int


def _sweep_row(task: _RowTask) -> dict:
    inst = task.inst
    row_seed = derive_seed(task.seed, task.row)
    disp = corrupt_by_displacement(inst, task.d, row_seed)
    pred = disp.prediction
    opt = Fraction(dp_opt(inst).total_length)
    trust_value = Fraction(trust(inst, pred).value)
    greedy_value = Fraction(greedy(inst).value)
    eta = prediction_error(inst, pred)
    out = {
        "d": task.d,
        "m": len(disp.moved_ids),
        "eta": eta,
        "opt": opt,
        "trust": trust_value,
        "greedy": greedy_value,
        "trust_identity": trust_value == (1 - eta) * opt,
    }
    for j, params in enumerate(task.pairs):
        mc = smooth_merge_batch(inst, pred, params, derive_seed(row_seed, j), task.trials)
        bound = theorem_bound(opt, greedy_value, eta, params)
        tag = param_tag(params)
        out[f"{tag}_mean"] = mc.mean
        out[f"{tag}_stderr"] = mc.stderr
        out[f"{tag}_bound"] = bound
        out[f"{tag}_holds"] = mc.mean + SIGMAS * mc.stderr >= float(bound)
    return out


def sweep_paper521(inst: Instance, d_points: int, trials: int,
                   pairs: Sequence[MergeParams] = DEFAULT_PAIRS, seed: int = 0,
                   workers: int = 1) -> list[dict]:
    """Displacement sweep: one row per positive grid value of d.

    Every row draws from its own seed, so the table is identical for any
    ``workers`` count.
    """
    tasks = [
        _RowTask(inst, row, d, trials, tuple(pairs), seed)
        for row, d in enumerate(d_grid(len(inst), d_points), start=1)
    ]
    if workers <= 1:
        return [_sweep_row(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_row, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def row_violations(rows: Iterable[dict]) -> list[str]:
    bad = []
    for i, row in enumerate(rows):
        for key, value in row.items():
            if (key.endswith("_holds") or key == "trust_identity") and value is False:
                bad.append(f"row {i}: {key}")
    return bad


def eta_samples(inst: Instance, d_points: int, seeds: int, seed: int = 0):
    """eta for every (seed, grid d): returns (grid, array of shape seeds x len(grid))."""
    grid = d_grid(len(inst), d_points)
    opt = Fraction(dp_opt(inst).total_length)
    out = np.zeros((seeds, len(grid)))
    for row, d in enumerate(grid, start=1):
        for s in range(seeds):
            pred = corrupt_by_displacement(inst, d, derive_seed(seed, row, s)).prediction
            t = Fraction(trust(inst, pred).value)
            out[s, row - 1] = 0.0 if opt == 0 else float((opt - t) / opt)
    return [float(d) for d in grid], out


# Output ---------------------------------------------------------------------

def cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (int, Fraction)):
        q = Fraction(value)
        text = format_time(q)
        return text if "/" not in text else repr(float(q))
    return str(value)


def jsonable(value):
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else cell(value)
    return str(value)


def write_table(rows: Sequence[dict], fh, fmt: str = "csv") -> None:
    if fmt == "json":
        json.dump(jsonable(list(rows)), fh, indent=1)
        fh.write("\n")
        return
    if not rows:
        return
    writer = csv.writer(fh, lineterminator="\r\n")
    header = list(rows[0].keys())
    writer.writerow(header)
    for row in rows:
        writer.writerow([cell(row.get(k, "")) for k in header])
