"""Trust-and-Switch and SemiTrust-and-Switch.

Both frameworks start in a trust phase that follows the advice and, at
every arrival, test whether the advice is already known to be wrong. The
first failed test switches, once and for good, to a classic online
algorithm that only sees intervals released after the switch time.
"""

from __future__ import annotations

import heapq
from bisect import insort
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .core import BinaryPrediction, Instance, Interval
from .errors import BadParameter
from .offline import opt_value
from .online import (
    GreedyPolicy,
    OnlinePolicy,
    RunRecord,
    SwitchEvent,
    VirtualPolicy,
    run_online,
    two_value_lengths,
)


@dataclass(frozen=True)
class ClassicAlgorithm:
    """A prediction-free online algorithm that a framework can switch to.

    ``make(seed, trial, lengths)`` builds a fresh policy; ``lengths`` is the
    ``(short, long)`` pair for algorithms that need it. ``theta`` maps an
    instance to the competitive ratio used to label bound checks.
    """

    name: str
    make: Callable[..., OnlinePolicy]
    theta: Callable[[Instance], object] | None = None
    needs_lengths: bool = False

    def policy(self, seed=0, trial=0, lengths=None) -> OnlinePolicy:
        return self.make(seed, trial, lengths)

    def run(self, inst: Instance, seed=0, trial=0) -> RunRecord:
        lengths = two_value_lengths(inst) if self.needs_lengths else None
        return run_online(self.policy(seed, trial, lengths), inst.intervals)


def _greedy_theta(inst: Instance):
    return 1 if inst.delta is None else inst.delta + 1


GREEDY = ClassicAlgorithm("greedy", lambda seed, trial, lengths: GreedyPolicy(seed), _greedy_theta)
VIRTUAL = ClassicAlgorithm(
    "virtual",
    lambda seed, trial, lengths: VirtualPolicy(lengths[0], lengths[1], seed, trial),
    lambda inst: 2,
    needs_lengths=True,
)
CLASSIC_ALGORITHMS = {"greedy": GREEDY, "virtual": VIRTUAL}


class SwitchVerdict(NamedTuple):
    switch: bool
    cause: str  # "overlap" | "suboptimal" | "none"
    evaluation_point: object


class SwitchMonitor:
    """Incremental switch test over the arrival prefix.

    The window for arrival j holds the prefix intervals with deadline at or
    before the evaluation point t_j. Since t_j never decreases, membership
    only grows; |Opt(window)| is recomputed only when it does.
    """

    def __init__(self):
        self._count = 0
        self._pred_until = None
        self._overlap = False
        self._pending: list = []  # (deadline, arrival index, interval) not yet in window
        self._window: list = []   # (arrival index, interval), arrival order
        self._trust_value = 0
        self._bits: dict[int, int] = {}
        self._opt = 0

    def observe(self, iv: Interval, bit) -> SwitchVerdict:
        idx = self._count
        self._count += 1
        bit = 1 if bit else 0
        self._bits[idx] = bit
        if bit:
            if self._pred_until is not None and iv.release < self._pred_until:
                self._overlap = True
            if self._pred_until is None or iv.deadline > self._pred_until:
                self._pred_until = iv.deadline
        t = iv.release if self._pred_until is None else max(iv.release, self._pred_until)
        if self._overlap:
            return SwitchVerdict(True, "overlap", t)

        heapq.heappush(self._pending, (iv.deadline, idx, iv))
        grew = False
        while self._pending and self._pending[0][0] <= t:
            _, i, w = heapq.heappop(self._pending)
            insort(self._window, (i, w), key=lambda e: e[0])
            if self._bits[i]:
                self._trust_value += w.length
            grew = True
        if grew:
            self._opt = opt_value([w for _, w in self._window])
        if self._opt > self._trust_value:
            return SwitchVerdict(True, "suboptimal", t)
        return SwitchVerdict(False, "none", t)


def _verdict_at(inst: Instance, pred: BinaryPrediction, j: int) -> SwitchVerdict:
    pred.check(inst)
    if not 0 <= j < len(inst):
        raise IndexError(j)
    monitor = SwitchMonitor()
    verdict = None
    for pos in range(j + 1):
        verdict = monitor.observe(inst[pos], pred[pos])
    return verdict


def evaluation_point(inst: Instance, pred: BinaryPrediction, j: int):
    """t_j: max of r_j and the deadlines of predicted intervals among arrivals 0..j."""
    return _verdict_at(inst, pred, j).evaluation_point


def should_switch(inst: Instance, pred: BinaryPrediction, j: int) -> tuple[bool, str]:
    """Switch test at arrival j; the overlap cause takes precedence."""
    v = _verdict_at(inst, pred, j)
    return v.switch, v.cause


@dataclass
class SwitchState:
    phase: str = "trust"
    evaluation_point: object = None
    switch_time: object = None
    trust_accepted_ids: list[int] = field(default_factory=list)


class TrustAndSwitchPolicy(OnlinePolicy):
    """Trust-and-Switch; with ``tau`` set it becomes SemiTrust-and-Switch.

    Trust phase: accept iff the advice says so (or, with ``tau``, the
    length exceeds ``tau``) and the interval fits. On the first failed
    switch test at arrival j the classic algorithm takes over every
    undecided arrival released at or after s = r_j (if the advice for j is
    1) or t_j (otherwise), the triggering interval included when r_j >= s.
    s is pushed to the last trust-phase deadline when that is later, so the
    classic algorithm never collides with earlier acceptances.
    """

    def __init__(self, classic: ClassicAlgorithm = GREEDY, *, tau=None,
                 seed: int = 0, trial: int = 0, lengths=None):
        if tau is not None and not tau > 0:
            raise BadParameter("tau must be positive")
        self.classic = classic
        self.tau = tau
        self.seed, self.trial = seed, trial
        self.lengths = lengths
        self.state = SwitchState()
        self._monitor = SwitchMonitor()
        self._busy_until = None
        self._classic_policy: OnlinePolicy | None = None
        if tau is None:
            self.name = f"trust-and-switch({classic.name})"
        else:
            self.name = f"semitrust-and-switch({classic.name})"

    def offer(self, iv, hint):
        st = self.state
        if st.phase == "independent":
            if iv.release >= st.switch_time:
                return self._classic_policy.offer(iv, None)
            return False, "policy"

        verdict = self._monitor.observe(iv, hint)
        st.evaluation_point = verdict.evaluation_point
        if verdict.switch:
            s = iv.release if hint else verdict.evaluation_point
            if self._busy_until is not None and self._busy_until > s:
                s = self._busy_until
            st.phase, st.switch_time = "independent", s
            self.switch_event = SwitchEvent(iv.id, verdict.evaluation_point, s, verdict.cause)
            self._classic_policy = self.classic.policy(self.seed, self.trial, self.lengths)
            if iv.release >= s:
                return self._classic_policy.offer(iv, None)
            return False, "policy"

        by_length = self.tau is not None and iv.length > self.tau
        if not (hint or by_length):
            return False, "prediction"
        if self._busy_until is not None and iv.release < self._busy_until:
            return False, "conflict"
        self._busy_until = iv.deadline
        st.trust_accepted_ids.append(iv.id)
        return True, "prediction" if hint else "policy"


def _lengths_for(classic: ClassicAlgorithm, inst: Instance):
    return two_value_lengths(inst) if classic.needs_lengths else None


def trust_and_switch(inst: Instance, pred: BinaryPrediction,
                     classic: ClassicAlgorithm = GREEDY, seed: int = 0,
                     trial: int = 0) -> RunRecord:
    pred.check(inst)
    policy = TrustAndSwitchPolicy(classic, seed=seed, trial=trial,
                                  lengths=_lengths_for(classic, inst))
    return run_online(policy, inst.intervals, pred.bits)


def semi_trust_and_switch(inst: Instance, pred: BinaryPrediction, tau,
                          classic: ClassicAlgorithm = GREEDY, seed: int = 0,
                          trial: int = 0) -> RunRecord:
    pred.check(inst)
    policy = TrustAndSwitchPolicy(classic, tau=tau, seed=seed, trial=trial,
                                  lengths=_lengths_for(classic, inst))
    return run_online(policy, inst.intervals, pred.bits)
