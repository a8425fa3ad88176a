"""Command line entry point: ``intsched <command> ...`` or ``python -m intsched``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import adversary, bounds
from .core import format_time, load_instance, load_prediction, save_instance
from .errors import IntschedError
from .frameworks import CLASSIC_ALGORITHMS, TrustAndSwitchPolicy, semi_trust_and_switch, trust_and_switch
from .harness import DEFAULT_PAIRS, parse_pairs, row_violations, sweep_paper521, write_table
from .ingest import scan_swf
from .offline import dp_opt
from .online import (
    BoundCheck,
    GreedyPolicy,
    TrustPolicy,
    VirtualPolicy,
    greedy,
    trust,
    virtual_algorithm,
    virtual_batch,
)
from .predictions import corrupt_by_displacement, perfect_prediction, prediction_error
from .smooth_merge import MergeParams, pareto_front, smooth_merge_batch, theorem_bound, tradeoff_rows

EXIT_OK, EXIT_USAGE, EXIT_BOUND = 0, 2, 3
FIXTURES_ENV = "INTSCHED_FIXTURES"
ALGORITHMS = ("greedy", "trust", "virtual", "tas", "semitas", "smoothmerge")


def resolve(path: str) -> Path:
    """A path as given, else relative to $INTSCHED_FIXTURES."""
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    base = os.environ.get(FIXTURES_ENV)
    if base and (Path(base) / p).exists():
        return Path(base) / p
    if base and (Path(base) / p.name).exists():
        return Path(base) / p.name
    return p


def load_any(path: str, limit=None):
    """JSON instance or SWF trace (by extension)."""
    p = resolve(path)
    if p.suffix == ".json":
        inst = load_instance(p)
        if limit is not None:
            inst = type(inst)(inst.intervals[:limit])
        return inst
    return scan_swf(p, limit).instance


def read_config(path: str) -> dict:
    cfg = {}
    for line in resolve(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        cfg[key.strip().lstrip("-").replace("-", "_")] = value.strip().strip('"')
    return cfg


def _emit(rows, args) -> None:
    write_table(rows, sys.stdout, args.format)


def _prediction(inst, args):
    if args.pred:
        return load_prediction(resolve(args.pred)).check(inst)
    if args.corrupt is not None:
        return corrupt_by_displacement(inst, Fraction(args.corrupt), args.seed).prediction
    return perfect_prediction(inst)


# Commands --------------------------------------------------------------------

def cmd_opt(args) -> int:
    inst = load_any(args.instance)
    sched = dp_opt(inst)
    if args.format == "json":
        json.dump({"value": format_time(sched.total_length), "accepted": list(sched.ids)}, sys.stdout)
        sys.stdout.write("\n")
    else:
        _emit([{"value": sched.total_length, "n": len(inst),
                "accepted": " ".join(map(str, sched.ids))}], args)
    return EXIT_OK


def _classic(args):
    return CLASSIC_ALGORITHMS[args.classic]


def cmd_run(args) -> int:
    inst = load_any(args.instance)
    pred = _prediction(inst, args)
    opt = Fraction(dp_opt(inst).total_length)
    alg = args.alg
    checks: list[BoundCheck] = []

    if alg == "smoothmerge" or (alg == "virtual" and args.trials > 1):
        if alg == "smoothmerge":
            params = MergeParams(Fraction(args.pt), Fraction(args.pg))
            mc = smooth_merge_batch(inst, pred, params, args.seed, args.trials)
            eta = prediction_error(inst, pred)
            bound = theorem_bound(opt, greedy(inst).value, eta, params)
            row = {"algorithm": alg, "pT": params.pT, "pG": params.pG, "eta": eta}
            checks.append(BoundCheck("smoothmerge: bound <= mean + 4*stderr",
                                     float(bound), mc.mean + 4 * mc.stderr))
        else:
            mc = virtual_batch(inst, args.seed, args.trials)
            bound = opt / 2
            row = {"algorithm": alg}
            checks.append(BoundCheck("virtual: opt/2 <= mean + 4*stderr",
                                     float(bound), mc.mean + 4 * mc.stderr))
        row.update({"seed": args.seed, "trials": mc.trials, "opt": opt, "mean": mc.mean,
                    "stderr": mc.stderr, "bound": bound, "holds": checks[-1].holds})
        _emit([row], args)
        return EXIT_OK if all(c.holds for c in checks) else EXIT_BOUND

    if alg == "greedy":
        rec = greedy(inst)
        checks = bounds.greedy_checks(inst, opt, rec.value)
    elif alg == "trust":
        rec = trust(inst, pred)
    elif alg == "virtual":
        rec = virtual_algorithm(inst, args.seed)
    elif alg == "tas":
        rec = trust_and_switch(inst, pred, _classic(args), seed=args.seed)
        theta = None if args.classic == "greedy" else 2
        checks = bounds.trust_and_switch_checks(inst, opt, rec.value, theta)
    elif alg == "semitas":
        if args.tau is None:
            raise IntschedError("--tau is required for semitas")
        tau = Fraction(args.tau)
        rec = semi_trust_and_switch(inst, pred, tau, _classic(args), seed=args.seed)
        theta = None if args.classic == "greedy" else 2
        perfect = pred.bits == perfect_prediction(inst).bits
        checks = bounds.semi_trust_checks(inst, opt, rec.value, tau, theta, perfect)
    else:  # smoothmerge single run handled above
        raise IntschedError(f"unknown algorithm {alg}")
    rec.seed = args.seed
    rec.bound_checks = checks
    if args.format == "json":
        out = rec.to_dict()
        out["opt"] = format_time(opt)
        json.dump(out, sys.stdout, indent=1)
        sys.stdout.write("\n")
    else:
        ev = rec.switch_event
        _emit([{
            "algorithm": rec.algorithm, "seed": args.seed, "value": rec.value, "opt": opt,
            "switched": ev is not None,
            "switch_time": "" if ev is None else ev.switch_time,
            "cause": "" if ev is None else ev.cause,
            "infeasible_prediction": rec.infeasible_prediction,
            "checks_failed": sum(not c.holds for c in checks),
        }], args)
    return EXIT_OK if all(c.holds for c in checks) else EXIT_BOUND


def _adv_policy(args, seed, k, delta):
    name = args.alg
    if name == "greedy":
        return GreedyPolicy(seed)
    if name == "trust":
        return TrustPolicy(seed)
    if name == "virtual":
        return VirtualPolicy(k / delta, k, seed=seed)
    if name in ("tas", "semitas"):
        tau = None
        if name == "semitas":
            tau = Fraction(args.tau) if args.tau is not None else (k / delta + k) / 2
        lengths = (k / delta, k) if CLASSIC_ALGORITHMS[args.classic].needs_lengths else None
        return TrustAndSwitchPolicy(_classic(args), tau=tau, seed=seed, lengths=lengths)
    raise IntschedError(f"algorithm {name} cannot play the adversary game")


def cmd_adversary(args) -> int:
    k, delta = Fraction(args.k), Fraction(args.delta)
    games = []
    for seed in range(args.seed, args.seed + args.seeds):
        policy = _adv_policy(args, seed, k, delta)
        if args.lemma == "two-value":
            eps = None if args.epsilon is None else Fraction(args.epsilon)
            games.append(adversary.run_lb_two_value(policy, k, delta, eps))
        else:
            games.append(adversary.run_lb_semitrust(policy, k, delta))
    if args.format == "json":
        json.dump([g.to_dict() for g in games], sys.stdout, indent=1)
        sys.stdout.write("\n")
    else:
        rows = []
        for g in games:
            name, lhs, rhs = g.dichotomy()
            rows.append({"lemma": g.lemma, "algorithm": g.algorithm, "seed": g.seed,
                         "case": g.case, "n": len(g.instance), "alg": g.alg_value,
                         "opt": g.opt_value, "check": name, "lhs": lhs, "rhs": rhs,
                         "holds": g.holds})
        _emit(rows, args)
    return EXIT_OK if all(g.holds for g in games) else EXIT_BOUND


def cmd_ingest(args) -> int:
    scan = scan_swf(resolve(args.swf), args.limit)
    if args.output:
        save_instance(scan.instance, args.output)
    inst = scan.instance
    _emit([{"total": scan.total, "kept": scan.kept, "dropped": scan.dropped,
            "intervals": len(inst), "k": inst.k, "delta": inst.delta}], args)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.experiment != "paper521":
        raise IntschedError(f"unknown experiment {args.experiment}")
    limit = None if args.full else args.limit
    inst = load_any(args.trace, limit)
    pairs = parse_pairs(args.params) if args.params else DEFAULT_PAIRS
    rows = sweep_paper521(inst, args.dpoints, args.trials, pairs, args.seed, args.workers)
    _emit(rows, args)
    bad = row_violations(rows)
    for line in bad:
        print(f"violated: {line}", file=sys.stderr)
    return EXIT_BOUND if bad else EXIT_OK


def cmd_tradeoff(args) -> int:
    rows = tradeoff_rows(args.grid)
    if args.pareto:
        rows = pareto_front(rows)
    _emit(rows, args)
    return EXIT_OK


# Parser -----------------------------------------------------------------------

def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    return str(text).lower() in ("1", "true", "yes", "on")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="intsched", description=__doc__)
    parser.add_argument("--config", help="key=value file; its keys mirror the flags")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.set_defaults(func=func)
        return p

    p = add("opt", cmd_opt, "exact offline optimum of an instance")
    p.add_argument("instance")

    p = add("run", cmd_run, "run one algorithm on an instance")
    p.add_argument("instance")
    p.add_argument("--alg", choices=ALGORITHMS, required=True)
    p.add_argument("--pred", help="prediction JSON; default is the perfect prediction")
    p.add_argument("--corrupt", help="build the prediction by displacement with this d")
    p.add_argument("--tau")
    p.add_argument("--pt", default="0.5")
    p.add_argument("--pg", default="0.5")
    p.add_argument("--classic", choices=sorted(CLASSIC_ALGORITHMS), default="greedy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)

    p = add("sweep", cmd_sweep, "prediction-displacement experiment")
    p.add_argument("--experiment", default="paper521")
    p.add_argument("--trace", required=True, help="SWF trace or JSON instance")
    p.add_argument("--dpoints", type=int, default=1000)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--limit", type=int, default=2000, help="first N jobs (default 2000)")
    p.add_argument("--full", type=_bool, nargs="?", const=True, default=False,
                   help="use the whole trace")
    p.add_argument("--params", help='SmoothMerge pairs, e.g. "0.5:0.5,0.75:0.33"')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = add("adversary", cmd_adversary, "play a lower-bound game")
    p.add_argument("--lemma", choices=("two-value", "semitrust"), required=True)
    p.add_argument("--alg", choices=("greedy", "trust", "virtual", "tas", "semitas"), required=True)
    p.add_argument("--delta", required=True)
    p.add_argument("--k", required=True)
    p.add_argument("--epsilon")
    p.add_argument("--tau")
    p.add_argument("--classic", choices=sorted(CLASSIC_ALGORITHMS), default="greedy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=1, help="games per seed, from --seed on")

    p = add("ingest", cmd_ingest, "convert an SWF trace to a JSON instance")
    p.add_argument("swf")
    p.add_argument("-o", "--output")
    p.add_argument("--limit", type=int)

    p = add("tradeoff", cmd_tradeoff, "smoothness/robustness coefficient grid")
    p.add_argument("--grid", type=int, default=21)
    p.add_argument("--pareto", type=_bool, nargs="?", const=True, default=False)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    cfg = read_config(known.config)
    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            given = {k: v for k, v in cfg.items() if k in {a.dest for a in sp._actions}}
            sp.set_defaults(**given)
            for a in sp._actions:
                if a.dest in given:
                    a.required = False
            for a in sp._actions:
                if a.dest in given and not a.option_strings:
                    a.nargs = "?"


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except (IntschedError, ValueError, OSError) as exc:
        print(f"intsched: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
