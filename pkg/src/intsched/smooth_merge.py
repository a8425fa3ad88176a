"""SmoothMerge: a randomized blend of Trust and Greedy.

Both strategies are simulated on the raw arrivals. An interval that does
not conflict with the merged schedule is taken if both simulations take
it, with probability pT if only Trust does, and with probability pG if
only Greedy does.

The exact acceptance probabilities follow from the conflict graph between
the two simulated schedules: every node other than a component root has
exactly one earlier neighbour (the opposite-side interval covering its
release time), so each component is a tree and a node is accepted with
probability ``(1 - P[parent]) * p_side``.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction

import numpy as np

from . import rng
from .core import BinaryPrediction, Instance, Node, conflict_graph
from .errors import BadParameter, NotAChain
from .online import (
    GreedyPolicy,
    MonteCarlo,
    OnlinePolicy,
    RunRecord,
    TrustPolicy,
    endpoint_ranks,
    greedy,
    run_online,
    trust,
)

GREEDY_SIDE, TRUST_SIDE = "G", "T"


def _prob(x) -> Fraction:
    q = Fraction(repr(x)) if isinstance(x, float) else Fraction(x)
    if not 0 <= q <= 1:
        raise BadParameter(f"probability {x!r} outside [0, 1]")
    return q


@dataclass(frozen=True)
class MergeParams:
    pT: Fraction
    pG: Fraction

    def __post_init__(self):
        object.__setattr__(self, "pT", _prob(self.pT))
        object.__setattr__(self, "pG", _prob(self.pG))

    @property
    def label(self) -> str:
        return f"pT={float(self.pT):g},pG={float(self.pG):g}"


class SmoothMergePolicy(OnlinePolicy):
    name = "smoothmerge"

    def __init__(self, params: MergeParams, seed: int = 0, trial: int = 0):
        self.params = params
        self.seed, self.trial = seed, trial
        self._greedy = GreedyPolicy()
        self._trust = TrustPolicy()
        self._busy_until = None
        self._th_t = rng.threshold(params.pT)
        self._th_g = rng.threshold(params.pG)

    def offer(self, iv, hint):
        by_trust, _ = self._trust.offer(iv, hint)
        by_greedy, _ = self._greedy.offer(iv, hint)
        self.infeasible_prediction = self._trust.infeasible_prediction
        if self._busy_until is not None and iv.release < self._busy_until:
            return False, "conflict"
        if by_trust and by_greedy:
            accept, reason = True, "policy"
        elif by_trust or by_greedy:
            cut = self._th_t if by_trust else self._th_g
            accept, reason = rng.draw(self.seed, self.trial, iv.id) < cut, "coinFlip"
        else:
            return False, "policy"
        if accept:
            self._busy_until = iv.deadline
        return accept, reason


def smooth_merge(inst: Instance, pred: BinaryPrediction, params: MergeParams,
                 seed: int = 0, trial: int = 0) -> RunRecord:
    pred.check(inst)
    return run_online(SmoothMergePolicy(params, seed, trial), inst.intervals, pred.bits)


def smooth_merge_batch(inst: Instance, pred: BinaryPrediction, params: MergeParams,
                       seed: int, trials: int) -> MonteCarlo:
    """Trials ``0..trials-1`` of :func:`smooth_merge`, vectorized over trials."""
    pred.check(inst)
    g_ids = set(greedy(inst).schedule.ids)
    t_ids = set(trust(inst, pred).schedule.ids)
    rel, dl = endpoint_ranks(inst)
    keys = rng.trial_keys(seed, trials)
    th_t = np.uint64(rng.threshold(params.pT))
    th_g = np.uint64(rng.threshold(params.pG))
    busy = np.full(trials, -1, dtype=np.int64)
    values = np.zeros(trials)
    counts = np.zeros(len(inst), dtype=np.int64)
    for i, iv in enumerate(inst):
        in_g, in_t = iv.id in g_ids, iv.id in t_ids
        if not (in_g or in_t):
            continue
        acc = busy <= rel[i]
        if in_g != in_t:
            acc &= rng.draws(keys, iv.id) < (th_t if in_t else th_g)
        busy = np.where(acc, dl[i], busy)
        counts[i] = acc.sum()
        values += acc * float(iv.length)
    return MonteCarlo(values, counts, inst.ids)


# Exact acceptance probabilities ----------------------------------------------

def _geometric(ratio: Fraction, terms: int) -> Fraction:
    if ratio == 1:
        return Fraction(terms)
    return (1 - ratio**terms) / (1 - ratio)


def trust_node_probability(params: MergeParams, depth: int) -> Fraction:
    """P[T node at odd recursion depth] = (pT - pT pG)(1 - (pT pG)^x)/(1 - pT pG)."""
    if depth % 2 != 1:
        raise ValueError("trust nodes sit at odd depth")
    pt, pg = params.pT, params.pG
    return (pt - pt * pg) * _geometric(pt * pg, (depth + 1) // 2)


@dataclass(frozen=True)
class ChainProbabilities:
    """Per-node acceptance probability and recursion depth of one component.

    Keys are ``(side, interval id)``. Depth is the number of recursion steps
    down to the component root; shared intervals have depth 0 and
    probability 1.
    """

    probability: dict
    depth: dict
    parent: dict

    def of(self, side: str, interval_id: int) -> Fraction:
        return self.probability[(side, interval_id)]


def _arrival(node: Node):
    return (node.interval.release, node.interval.id)


def chain_probabilities(component, params: MergeParams) -> ChainProbabilities:
    """Closed-form acceptance probabilities on one Greedy/Trust component.

    ``component`` is a sequence of :class:`Node` with sides ``"G"`` and
    ``"T"``. Raises :class:`NotAChain` unless every node has at most one
    earlier neighbour and every root is a Greedy node (or the component is
    a single interval present on both sides).
    """
    nodes = sorted(component, key=lambda n: (_arrival(n), n.side != GREEDY_SIDE))
    sides = {n.side for n in nodes}
    if not sides <= {GREEDY_SIDE, TRUST_SIDE}:
        raise NotAChain(f"unknown sides {sorted(sides)}")
    shared = {n.id for n in nodes if n.side == GREEDY_SIDE} & {
        n.id for n in nodes if n.side == TRUST_SIDE
    }
    if shared:
        if len(nodes) != 2:
            raise NotAChain("an interval on both sides must form its own component")
        keys = [(n.side, n.id) for n in nodes]
        return ChainProbabilities({k: Fraction(1) for k in keys},
                                  {k: 0 for k in keys}, {k: None for k in keys})

    p_side = {GREEDY_SIDE: params.pG, TRUST_SIDE: params.pT}
    prob, depth, parent = {}, {}, {}
    for pos, node in enumerate(nodes):
        earlier = [m for m in nodes[:pos] if m.interval.overlaps(node.interval)]
        if any(m.side == node.side for m in earlier):
            raise NotAChain(f"same-side overlap at interval {node.id}")
        key = (node.side, node.id)
        if not earlier:
            if node.side != GREEDY_SIDE:
                raise NotAChain(f"component rooted at trust node {node.id}")
            prob[key], depth[key], parent[key] = params.pG, 0, None
            continue
        if len(earlier) > 1:
            raise NotAChain(f"interval {node.id} has {len(earlier)} earlier neighbours")
        up = (earlier[0].side, earlier[0].id)
        depth[key] = depth[up] + 1
        parent[key] = up
        if node.side == TRUST_SIDE:
            prob[key] = trust_node_probability(params, depth[key])
        else:
            prob[key] = (1 - prob[up]) * p_side[GREEDY_SIDE]
    return ChainProbabilities(prob, depth, parent)


def acceptance_probabilities(inst: Instance, pred: BinaryPrediction,
                             params: MergeParams) -> dict[int, Fraction]:
    """Exact P[interval accepted by SmoothMerge], keyed by interval id."""
    g = greedy(inst).schedule
    t = trust(inst, pred).schedule
    graph = conflict_graph(g, t, sides=(GREEDY_SIDE, TRUST_SIDE))
    out = {iv.id: Fraction(0) for iv in inst}
    for comp in graph.components:
        chain = chain_probabilities(comp, params)
        for (side, iid), p in chain.probability.items():
            out[iid] = p
    return out


def expected_value(inst: Instance, pred: BinaryPrediction, params: MergeParams) -> Fraction:
    probs = acceptance_probabilities(inst, pred, params)
    return sum((Fraction(iv.length) * probs[iv.id] for iv in inst), Fraction(0))


# Bound and trade-off ----------------------------------------------------------

def smoothness_coefficient(params: MergeParams) -> Fraction:
    return params.pT * (1 - params.pG)


def robustness_coefficient(params: MergeParams) -> Fraction:
    prod = params.pT * params.pG
    if prod == 1:
        return Fraction(0)
    return (params.pG - prod) / (1 - prod)


def theorem_bound(opt_value, greedy_value, eta, params: MergeParams) -> Fraction:
    """Lower bound on E[value]: max of the smoothness and robustness terms."""
    eta = Fraction(eta)
    if not 0 <= eta <= 1:
        raise BadParameter("eta must lie in [0, 1]")
    smooth = Fraction(opt_value) * (1 - eta) * smoothness_coefficient(params)
    robust = robustness_coefficient(params) * Fraction(greedy_value)
    return max(smooth, robust)


def round_coefficient(q: Fraction, places: int = 2) -> Decimal:
    """Round half-to-even; 0.125 becomes 0.12."""
    exact = Decimal(q.numerator) / Decimal(q.denominator)
    return exact.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN)


def tradeoff_rows(grid: int) -> list[dict]:
    """Coefficients on a ``grid`` x ``grid`` lattice over [0, 1]^2."""
    if grid < 2:
        raise BadParameter("grid needs at least 2 points per axis")
    steps = [Fraction(i, grid - 1) for i in range(grid)]
    rows = []
    for pt in steps:
        for pg in steps:
            p = MergeParams(pt, pg)
            rows.append({
                "pT": pt, "pG": pg,
                "smoothnessCoef": smoothness_coefficient(p),
                "robustnessCoef": robustness_coefficient(p),
            })
    return rows


def pareto_front(rows: list[dict]) -> list[dict]:
    """Rows not dominated in (smoothnessCoef, robustnessCoef), by smoothness."""
    ordered = sorted(rows, key=lambda r: (-r["smoothnessCoef"], -r["robustnessCoef"]))
    front, best = [], None
    for r in ordered:
        if best is None or r["robustnessCoef"] > best:
            front.append(r)
            best = r["robustnessCoef"]
    return front[::-1]
