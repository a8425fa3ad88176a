"""Adaptive lower-bound adversaries for two-value instances.

Each game hands the algorithm a full predicted instance up front (and the
matching binary advice, one bit per arrival), then releases intervals one
at a time, choosing the next release from the algorithm's last decision.
Short intervals have length k/delta and long ones length k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

from .core import (
    BinaryPrediction,
    FullPrediction,
    Instance,
    Interval,
    format_time,
    to_time,
)
from .errors import BadEpsilon, BadParameter
from .offline import BRUTE_FORCE_LIMIT, brute_force_opt, dp_opt
from .online import OnlineDecision, OnlineDriver, OnlinePolicy

TWO_VALUE, SEMITRUST = "two-value", "semitrust"


def _params(k, delta):
    k, delta = Fraction(to_time(k)), Fraction(to_time(delta))
    if not k > 0:
        raise BadParameter("k must be positive")
    if not delta > 1:
        raise BadParameter("delta must exceed 1")
    return k, delta, ceil(delta), k / delta


def epsilon_limits(k, delta) -> tuple[Fraction, Fraction]:
    """(strict upper bound on epsilon, geometric fit bound on epsilon).

    The first is ``1 + (1 - ceil(delta))/delta``. The second keeps the short
    chain clear of the final long interval.
    """
    k, delta, c, s = _params(k, delta)
    return 1 + Fraction(1 - c) / delta, (k - (c - 1) * s) / c


def default_epsilon(k, delta) -> Fraction:
    strict, fit = epsilon_limits(k, delta)
    return min(strict, fit) / 2


def lb_two_value_prediction(k, delta, epsilon) -> FullPrediction:
    """Predicted instance of ceil(delta)^2 + 2 intervals.

    A long [0, k), a chain of ceil(delta) - 1 shorts spaced by epsilon, a
    block of identical shorts ending epsilon/2 before k, and a final long
    [k - epsilon, 2k - epsilon).
    """
    k, delta, c, s = _params(k, delta)
    eps = Fraction(to_time(epsilon))
    strict, fit = epsilon_limits(k, delta)
    if not (0 < eps < strict and eps <= fit):
        raise BadEpsilon(f"epsilon {eps} outside (0, {strict}) or above {fit}")
    pairs = [(0, k), (eps, eps + s)]
    for _ in range(3, c + 1):
        start = pairs[-1][1] + eps
        pairs.append((start, start + s))
    block = (k - eps / 2 - s, k - eps / 2)
    pairs += [block] * (c * c - c + 1)
    pairs.append((k - eps, 2 * k - eps))
    return FullPrediction(tuple(sorted(pairs)))


def lb_semitrust_prediction(k, delta) -> FullPrediction:
    """Predicted clique: short, long, ceil(delta)^2 shorts, long."""
    k, delta, c, s = _params(k, delta)
    e = min(s, k - s) / 8
    pairs = [(0, s), (s / 2, s / 2 + k)]
    pairs += [(s / 2 + e, s / 2 + e + s)] * (c * c)
    pairs.append((s / 2 + 2 * e, s / 2 + 2 * e + k))
    return FullPrediction(tuple(pairs))


def advice_bits(prediction: FullPrediction) -> tuple[int, ...]:
    """Indicator of the optimum of the predicted instance, by arrival index."""
    inst = prediction.as_instance()
    return BinaryPrediction.from_ids(inst, dp_opt(inst).ids).bits


@dataclass
class GameResult:
    lemma: str
    algorithm: str
    seed: int
    case: str
    k: Fraction
    delta: Fraction
    alg_value: Fraction
    opt_value: Fraction
    instance: Instance
    prediction: FullPrediction
    advice: tuple[int, ...]
    decisions: list[OnlineDecision] = field(default_factory=list)

    @property
    def short(self) -> Fraction:
        return self.k / self.delta

    @property
    def ratio(self):
        return None if self.alg_value == 0 else Fraction(self.opt_value) / self.alg_value

    def dichotomy(self) -> tuple[str, Fraction, Fraction]:
        """(description, lhs, rhs) with the claim being lhs <= rhs."""
        c = ceil(self.delta)
        if self.lemma == TWO_VALUE:
            if self.case == "case1":
                need = 1 + Fraction(c - 1) / self.delta
                return "ratio >= 1 + (ceil(delta)-1)/delta", need * self.alg_value, self.opt_value
            return "opt >= delta*alg + k", self.delta * self.alg_value + self.k, self.opt_value
        if self.case == "case1":
            return "ratio >= delta", self.delta * self.alg_value, self.opt_value
        return "opt >= delta*alg + k/delta", self.delta * self.alg_value + self.short, self.opt_value

    @property
    def holds(self) -> bool:
        _, lhs, rhs = self.dichotomy()
        return lhs <= rhs

    def to_dict(self) -> dict:
        name, lhs, rhs = self.dichotomy()
        return {
            "lemma": self.lemma,
            "algorithm": self.algorithm,
            "seed": self.seed,
            "evaluation": "per-seed",
            "case": self.case,
            "k": format_time(self.k),
            "delta": format_time(self.delta),
            "alg": format_time(self.alg_value),
            "opt": format_time(self.opt_value),
            "check": {"name": name, "lhs": format_time(lhs), "rhs": format_time(rhs),
                      "holds": self.holds},
            "predicted": [[format_time(r), format_time(d)] for r, d in self.prediction.pairs],
            "advice": list(self.advice),
            "emitted": [
                {"id": iv.id, "release": format_time(iv.release), "deadline": format_time(iv.deadline)}
                for iv in self.instance
            ],
            "decisions": [
                {"id": d.interval_id, "action": d.action, "reason": d.reason}
                for d in self.decisions
            ],
        }


class _Game:
    """Dialogue between a policy and the adversary."""

    def __init__(self, policy: OnlinePolicy, advice):
        self.driver = OnlineDriver(policy)
        self.advice = advice
        self.emitted: list[Interval] = []

    def emit(self, release, length) -> bool:
        idx = len(self.emitted)
        iv = Interval(idx, to_time(release), to_time(release + length))
        self.emitted.append(iv)
        hint = self.advice[idx] if idx < len(self.advice) else 0
        return self.driver.step(iv, hint)

    def adaptive_tail(self, after, shorts: int, s, k) -> str:
        """Shorts, then one long; a rejection pushes the next release past
        the deadline (gap s), an acceptance pins every later release inside
        the accepted interval."""
        release = after + s
        inside = None
        for _ in range(shorts):
            if inside is not None:
                self.emit(inside, s)
                continue
            if self.emit(release, s):
                inside = release + s / 2
            else:
                release = release + s + s
        if inside is not None:
            self.emit(inside, k)
            return "case2a"
        self.emit(release, k)
        return "case2b"

    def finish(self, lemma, k, delta, case, prediction) -> GameResult:
        inst = Instance(tuple(self.emitted))
        solver = brute_force_opt if len(inst) <= BRUTE_FORCE_LIMIT else dp_opt
        record = self.driver.record()
        return GameResult(
            lemma=lemma, algorithm=record.algorithm, seed=record.seed, case=case,
            k=k, delta=delta, alg_value=Fraction(record.value),
            opt_value=Fraction(solver(inst).total_length), instance=inst,
            prediction=prediction, advice=self.advice, decisions=record.decisions,
        )


def run_lb_two_value(policy: OnlinePolicy, k, delta, epsilon=None) -> GameResult:
    """Play the two-value lower-bound game against ``policy``.

    The long interval [0, k) comes first. If it is accepted the rest of the
    predicted instance follows unchanged (case1). Otherwise ceil(delta)^2
    shorts and one long are released adaptively (case2a if a short was
    taken, case2b if none was).
    """
    k, delta, c, s = _params(k, delta)
    if epsilon is None:
        epsilon = default_epsilon(k, delta)
    pred = lb_two_value_prediction(k, delta, epsilon)
    game = _Game(policy, advice_bits(pred))
    first = pred.pairs[0]
    if game.emit(first[0], first[1] - first[0]):
        for r, d in pred.pairs[1:]:
            game.emit(r, d - r)
        case = "case1"
    else:
        case = game.adaptive_tail(first[1], c * c, s, k)
    return game.finish(TWO_VALUE, k, delta, case, pred)


def run_lb_semitrust(policy: OnlinePolicy, k, delta) -> GameResult:
    """Play the SemiTrust lower-bound game: the predicted clique if the
    first short is accepted, the adaptive tail after it otherwise."""
    k, delta, c, s = _params(k, delta)
    pred = lb_semitrust_prediction(k, delta)
    game = _Game(policy, advice_bits(pred))
    first = pred.pairs[0]
    if game.emit(first[0], first[1] - first[0]):
        for r, d in pred.pairs[1:]:
            game.emit(r, d - r)
        case = "case1"
    else:
        case = game.adaptive_tail(first[1], c * c, s, k)
    return game.finish(SEMITRUST, k, delta, case, pred)
