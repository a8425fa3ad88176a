"""Irrevocable online driver and the baseline algorithms.

An online algorithm is a policy object with ``offer(interval, hint)`` that
returns ``(accept, reason)``. ``hint`` is the interval's prediction bit (or
None when no prediction is given). The driver owns the schedule: it checks
every acceptance against what was accepted before and raises
``ProtocolViolation`` rather than letting an infeasible schedule through.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import rng
from .core import BinaryPrediction, Instance, Interval, Schedule, format_time
from .errors import NotTwoValue, ProtocolViolation

ACCEPT, REJECT = "accept", "reject"
REASONS = ("conflict", "prediction", "coinFlip", "virtualHold", "policy")


@dataclass(frozen=True)
class OnlineDecision:
    interval_id: int
    action: str
    reason: str

    @property
    def accepted(self) -> bool:
        return self.action == ACCEPT


@dataclass(frozen=True)
class SwitchEvent:
    trigger_id: int
    evaluation_point: object
    switch_time: object
    cause: str


@dataclass(frozen=True)
class BoundCheck:
    name: str
    lhs: object
    rhs: object

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


@dataclass
class RunRecord:
    algorithm: str
    decisions: list[OnlineDecision]
    schedule: Schedule
    seed: int = 0
    trial: int = 0
    switch_event: SwitchEvent | None = None
    infeasible_prediction: bool = False
    bound_checks: list[BoundCheck] = field(default_factory=list)

    @property
    def value(self):
        return self.schedule.total_length

    def to_dict(self) -> dict:
        ev = self.switch_event
        return {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "trial": self.trial,
            "value": format_time(self.value),
            "accepted": list(self.schedule.ids),
            "decisions": [
                {"id": d.interval_id, "action": d.action, "reason": d.reason}
                for d in self.decisions
            ],
            "switch": None if ev is None else {
                "trigger": ev.trigger_id,
                "evaluation_point": format_time(ev.evaluation_point),
                "switch_time": format_time(ev.switch_time),
                "cause": ev.cause,
            },
            "infeasible_prediction": self.infeasible_prediction,
            "bound_checks": [
                {"name": b.name, "lhs": _num(b.lhs), "rhs": _num(b.rhs), "holds": b.holds}
                for b in self.bound_checks
            ],
        }


def _num(x):
    return x if isinstance(x, float) else format_time(x)


class OnlinePolicy:
    """Base class; subclasses override ``offer``."""

    name = "policy"
    seed = 0
    trial = 0
    switch_event: SwitchEvent | None = None
    infeasible_prediction = False

    def offer(self, iv: Interval, hint: int | None) -> tuple[bool, str]:
        raise NotImplementedError


class OnlineDriver:
    """Feeds arrivals to a policy one at a time and enforces feasibility."""

    def __init__(self, policy: OnlinePolicy):
        self.policy = policy
        self.accepted: list[Interval] = []
        self.decisions: list[OnlineDecision] = []
        self._busy_until = None
        self._last_key = None
        self._seen: set[int] = set()

    def conflicts(self, iv: Interval) -> bool:
        return self._busy_until is not None and iv.release < self._busy_until

    def step(self, iv: Interval, hint: int | None = None) -> bool:
        key = (iv.release, iv.id)
        if iv.id in self._seen:
            raise ProtocolViolation(f"interval {iv.id} offered twice")
        if self._last_key is not None and key < self._last_key:
            raise ProtocolViolation(f"interval {iv.id} arrives out of release order")
        self._seen.add(iv.id)
        self._last_key = key
        accept, reason = self.policy.offer(iv, hint)
        if accept not in (True, False):
            raise ProtocolViolation(f"{self.policy.name} returned {accept!r}")
        if accept:
            if self.conflicts(iv):
                raise ProtocolViolation(
                    f"{self.policy.name} accepted interval {iv.id} which overlaps an accepted one"
                )
            self.accepted.append(iv)
            self._busy_until = iv.deadline
        self.decisions.append(OnlineDecision(iv.id, ACCEPT if accept else REJECT, reason))
        return accept

    def record(self) -> RunRecord:
        p = self.policy
        return RunRecord(
            algorithm=p.name,
            decisions=list(self.decisions),
            schedule=Schedule(tuple(self.accepted)),
            seed=p.seed,
            trial=p.trial,
            switch_event=p.switch_event,
            infeasible_prediction=p.infeasible_prediction,
        )


def run_online(
    policy: OnlinePolicy,
    intervals: Iterable[Interval],
    hints: Sequence[int] | None = None,
) -> RunRecord:
    driver = OnlineDriver(policy)
    for pos, iv in enumerate(intervals):
        driver.step(iv, None if hints is None else hints[pos])
    return driver.record()


class _Busy:
    """Tracks the latest deadline among a policy's own acceptances."""

    __slots__ = ("until",)

    def __init__(self):
        self.until = None

    def free(self, iv: Interval) -> bool:
        return self.until is None or iv.release >= self.until

    def take(self, iv: Interval) -> None:
        self.until = iv.deadline


class GreedyPolicy(OnlinePolicy):
    name = "greedy"

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._busy = _Busy()

    def offer(self, iv, hint):
        if self._busy.free(iv):
            self._busy.take(iv)
            return True, "policy"
        return False, "conflict"


class TrustPolicy(OnlinePolicy):
    """Accepts exactly the predicted intervals.

    A predicted interval that overlaps an earlier accepted one is skipped
    (irrevocability leaves no other feasible choice) and the run is flagged.
    """

    name = "trust"

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._busy = _Busy()

    def offer(self, iv, hint):
        if not hint:
            return False, "prediction"
        if not self._busy.free(iv):
            self.infeasible_prediction = True
            return False, "conflict"
        self._busy.take(iv)
        return True, "prediction"


def two_value_lengths(inst: Instance) -> tuple:
    lengths = sorted(inst.lengths)
    if len(lengths) != 2:
        raise NotTwoValue(f"instance has {len(lengths)} distinct lengths")
    return lengths[0], lengths[1]


class VirtualPolicy(OnlinePolicy):
    """Randomized algorithm for two-value instances with lengths ``short < long``.

    Long intervals are taken whenever they fit. A short interval that fits
    and is not shadowed by a live hold gets a fair coin: heads accepts it,
    tails places a virtual hold until its deadline. A hold blocks other short
    intervals only, and simply expires at its deadline.
    """

    name = "virtual"

    def __init__(self, short, long, seed: int = 0, trial: int = 0):
        if not short < long:
            raise NotTwoValue("short length must be below long length")
        self.short, self.long = short, long
        self.seed, self.trial = seed, trial
        self._busy = _Busy()
        self._hold_until = None
        self._threshold = rng.threshold(Fraction(1, 2))

    def offer(self, iv, hint):
        if iv.length == self.long:
            if self._busy.free(iv):
                self._busy.take(iv)
                return True, "policy"
            return False, "conflict"
        if iv.length != self.short:
            raise NotTwoValue(f"interval {iv.id} has length {iv.length}")
        if not self._busy.free(iv):
            return False, "conflict"
        if self._hold_until is not None and iv.release < self._hold_until:
            return False, "virtualHold"
        if rng.draw(self.seed, self.trial, iv.id) < self._threshold:
            self._busy.take(iv)
            return True, "coinFlip"
        self._hold_until = iv.deadline
        return False, "coinFlip"


def greedy(inst: Instance) -> RunRecord:
    return run_online(GreedyPolicy(), inst.intervals)


def trust(inst: Instance, pred: BinaryPrediction) -> RunRecord:
    pred.check(inst)
    return run_online(TrustPolicy(), inst.intervals, pred.bits)


def _virtual_lengths(inst: Instance, short, long):
    if short is None or long is None:
        return two_value_lengths(inst)
    stray = inst.lengths - {short, long}
    if stray:
        raise NotTwoValue(f"lengths {sorted(stray)} are neither short nor long")
    return short, long


def virtual_algorithm(inst: Instance, seed: int = 0, *, trial: int = 0,
                      short=None, long=None) -> RunRecord:
    """Run the Virtual Algorithm once.

    The two lengths are read off the instance when it has exactly two;
    otherwise pass ``short`` and ``long`` explicitly (a one-interval
    instance still needs to know which class it belongs to).
    """
    short, long = _virtual_lengths(inst, short, long)
    return run_online(VirtualPolicy(short, long, seed, trial), inst.intervals)


# Batched Monte Carlo ---------------------------------------------------------

@dataclass(frozen=True)
class MonteCarlo:
    """Per-trial values and per-interval acceptance counts of a batch."""

    values: np.ndarray
    accept_counts: np.ndarray
    ids: tuple[int, ...]

    @property
    def trials(self) -> int:
        return len(self.values)

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    @property
    def stderr(self) -> float:
        if self.trials < 2:
            return 0.0
        return float(self.values.std(ddof=1) / np.sqrt(self.trials))

    def frequency(self, interval_id: int) -> float:
        return float(self.accept_counts[self.ids.index(interval_id)]) / self.trials


def endpoint_ranks(inst: Instance) -> tuple[np.ndarray, np.ndarray]:
    """Releases and deadlines replaced by their rank among all endpoints.

    Ranks preserve every strict comparison, so overlap tests on the int64
    ranks are exact whatever the time type.
    """
    points = sorted({iv.release for iv in inst} | {iv.deadline for iv in inst})
    rank = {t: i for i, t in enumerate(points)}
    rel = np.array([rank[iv.release] for iv in inst], dtype=np.int64)
    dl = np.array([rank[iv.deadline] for iv in inst], dtype=np.int64)
    return rel, dl


def virtual_batch(inst: Instance, seed: int, trials: int, *, short=None, long=None) -> MonteCarlo:
    """Trials ``0..trials-1`` of :func:`virtual_algorithm`, vectorized."""
    short, long = _virtual_lengths(inst, short, long)
    rel, dl = endpoint_ranks(inst)
    keys = rng.trial_keys(seed, trials)
    heads = np.uint64(rng.threshold(Fraction(1, 2)))
    busy = np.full(trials, -1, dtype=np.int64)
    hold = np.full(trials, -1, dtype=np.int64)
    values = np.zeros(trials)
    counts = np.zeros(len(inst), dtype=np.int64)
    for i, iv in enumerate(inst):
        free = busy <= rel[i]
        if iv.length == long:
            acc = free
        else:
            open_ = free & (hold <= rel[i])
            coin = rng.draws(keys, iv.id) < heads
            acc = open_ & coin
            hold = np.where(open_ & ~coin, dl[i], hold)
        busy = np.where(acc, dl[i], busy)
        counts[i] = acc.sum()
        values += acc * float(iv.length)
    return MonteCarlo(values, counts, inst.ids)
