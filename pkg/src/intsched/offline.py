"""Exact offline optimum |Opt| by dynamic programming and by enumeration.

Both solvers break ties between maximum-length schedules the same way: the
schedule whose arrival-ordered id tuple is lexicographically smallest wins.
Ids are arrival ranks, so arrival order and id order coincide.
"""

from __future__ import annotations

from bisect import bisect_left
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from .core import Instance, Interval, Schedule
from .errors import TooLarge

BRUTE_FORCE_LIMIT = 20


def _successors(ivs: Sequence[Interval]) -> list[int]:
    releases = [iv.release for iv in ivs]
    return [bisect_left(releases, iv.deadline) for iv in ivs]


def opt_value(intervals: Sequence[Interval]):
    """Value of the optimum over ``intervals`` (must be in arrival order)."""
    n = len(intervals)
    nxt = _successors(intervals)
    best = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        take = intervals[i].length + best[nxt[i]]
        best[i] = take if take > best[i + 1] else best[i + 1]
    return best[0]


def dp_opt(inst: Instance) -> Schedule:
    """Maximum-total-length schedule.

    Suffix recursion over release order: best(i) = max(best(i+1),
    l_i + best(first interval released at or after d_i)), with the
    successor found by binary search. Preferring "take" on ties yields the
    lexicographically smallest optimal id sequence.
    """
    ivs = inst.intervals
    n = len(ivs)
    nxt = _successors(ivs)
    best = [0] * (n + 1)
    take_it = [False] * n
    for i in range(n - 1, -1, -1):
        take = ivs[i].length + best[nxt[i]]
        if take >= best[i + 1]:
            best[i], take_it[i] = take, True
        else:
            best[i] = best[i + 1]
    chosen = []
    i = 0
    while i < n:
        if take_it[i]:
            chosen.append(ivs[i])
            i = nxt[i]
        else:
            i += 1
    return Schedule(tuple(chosen))


def brute_force_opt(inst: Instance) -> Schedule:
    """Exhaustive search over all 2^n subsets (n <= 20).

    Arrival index i owns bit n-1-i, so among equal-value feasible subsets
    the numerically largest mask is the lexicographically smallest one.
    """
    ivs = inst.intervals
    n = len(ivs)
    if n > BRUTE_FORCE_LIMIT:
        raise TooLarge(n, BRUTE_FORCE_LIMIT)
    if n == 0:
        return Schedule(())

    denom = lcm(*(Fraction(iv.length).denominator for iv in ivs))
    weights = [int(Fraction(iv.length) * denom) for iv in ivs]
    dtype = np.int64 if sum(weights) < 2**62 else object

    bit = [1 << (n - 1 - i) for i in range(n)]
    conflicts = [0] * n
    for i in range(n):
        for j in range(n):
            if i != j and ivs[i].overlaps(ivs[j]):
                conflicts[i] |= bit[j]

    masks = np.arange(1 << n, dtype=np.int64)
    feasible = np.ones(masks.shape, dtype=bool)
    values = np.zeros(masks.shape, dtype=dtype)
    for i in range(n):
        member = (masks & bit[i]) != 0
        feasible &= ~member | ((masks & conflicts[i]) == 0)
        values = values + np.where(member, weights[i], 0).astype(dtype)

    feasible_values = values[feasible]
    top = feasible_values.max()
    winners = masks[feasible][feasible_values == top]
    mask = int(winners.max())
    return Schedule(tuple(ivs[i] for i in range(n) if mask & bit[i]))
