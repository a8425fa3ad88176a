"""Theoretical guarantees evaluated on concrete runs, as BoundCheck rows.

Each check reads ``lhs <= rhs``; ``lhs`` is always |Opt| (or the claim's
left side) so that a violated row pinpoints the failing inequality.
"""

from __future__ import annotations

from fractions import Fraction

from .core import Instance
from .online import BoundCheck


def _delta(inst: Instance) -> Fraction:
    return Fraction(inst.delta) if inst.delta is not None else Fraction(1)


def greedy_checks(inst: Instance, opt, alg) -> list[BoundCheck]:
    d = _delta(inst)
    out = [BoundCheck("greedy: opt <= (delta+1)*alg", opt, (d + 1) * alg)]
    if inst.two_value:
        out.append(BoundCheck("greedy two-value: opt <= max(delta,2)*alg", opt, max(d, 2) * alg))
    return out


def trust_and_switch_checks(inst: Instance, opt, alg, theta=None) -> list[BoundCheck]:
    """Robustness with a theta-competitive classic algorithm (Greedy: delta+1)."""
    d, k = _delta(inst), Fraction(inst.k)
    theta = d + 1 if theta is None else Fraction(theta)
    out = [BoundCheck("tas: opt <= max(theta,2)*alg + 2k", opt, max(theta, 2) * alg + 2 * k)]
    if inst.two_value:
        out.append(BoundCheck("tas two-value: opt <= max(theta,2)*alg + k", opt,
                              max(theta, 2) * alg + k))
    return out


def semi_trust_checks(inst: Instance, opt, alg, tau, theta=None, perfect=False) -> list[BoundCheck]:
    d, k, tau = _delta(inst), Fraction(inst.k), Fraction(tau)
    theta = d + 1 if theta is None else Fraction(theta)
    out = [BoundCheck("semitas: opt <= max(theta,delta+1)*alg + tau", opt,
                      max(theta, d + 1) * alg + tau)]
    if perfect:
        out.append(BoundCheck("semitas consistency: opt <= (1+k/tau)*alg", opt, (1 + k / tau) * alg))
    return out


def consistency_check(opt, alg) -> BoundCheck:
    return BoundCheck("consistency: opt <= alg", opt, alg)
