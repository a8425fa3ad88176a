"""Prediction synthesis and the prediction error eta."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

import numpy as np

from .core import BinaryPrediction, Instance, Interval, validate_instance
from .errors import BadParameter
from .offline import dp_opt
from .online import trust


def perfect_prediction(inst: Instance) -> BinaryPrediction:
    return BinaryPrediction.from_ids(inst, dp_opt(inst).ids)


def prediction_error(inst: Instance, pred: BinaryPrediction) -> Fraction:
    """eta = (|Opt| - |Trust|) / |Opt|, taken as 0 when |Opt| = 0."""
    pred.check(inst)
    opt = Fraction(dp_opt(inst).total_length)
    if opt == 0:
        return Fraction(0)
    return (opt - Fraction(trust(inst, pred).value)) / opt


@dataclass(frozen=True)
class Displacement:
    prediction: BinaryPrediction
    perturbed: Instance
    moved_ids: tuple[int, ...]


def displaced_count(n: int, d) -> int:
    if not d > 0:
        raise BadParameter("d must be positive")
    return min(n, ceil(Fraction(n) / Fraction(d)))


def corrupt_by_displacement(inst: Instance, d, seed: int) -> Displacement:
    """Move ceil(n/d) random intervals to a common point past the horizon.

    The moved intervals keep their lengths and all start at
    ``max deadline + k``, so they pairwise conflict. The optimum of the
    perturbed instance, read back on the original ids, is the prediction.
    """
    n = len(inst)
    m = displaced_count(n, d)
    if n == 0:
        return Displacement(BinaryPrediction(()), inst, ())
    picks = np.random.default_rng(seed).choice(n, size=m, replace=False)
    moved = tuple(sorted(inst[int(p)].id for p in picks))
    start = max(iv.deadline for iv in inst) + inst.k
    chosen = set(moved)
    perturbed = validate_instance(
        Interval(iv.id, start, start + iv.length) if iv.id in chosen else iv
        for iv in inst
    )
    bits = BinaryPrediction.from_ids(inst, dp_opt(perturbed).ids)
    return Displacement(bits, perturbed, moved)
