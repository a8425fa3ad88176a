"""Shared fuzz generators and the acceptance-criterion reporter."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from intsched import BinaryPrediction, Instance, dp_opt, validate_instance

# Generators -------------------------------------------------------------------


def random_instance(rnd: random.Random, n_max: int, *, horizon: int = 30,
                    max_len: int = 8, fractional: bool = False,
                    n_min: int = 1) -> Instance:
    n = rnd.randint(n_min, n_max)
    triples = []
    for i in range(n):
        if fractional:
            r = Fraction(rnd.randint(0, horizon * 4), 4)
            length = Fraction(rnd.randint(1, max_len * 4), 4)
        else:
            r = rnd.randint(0, horizon)
            length = rnd.randint(1, max_len)
        triples.append((i, r, r + length))
    return validate_instance(triples)


def random_two_value(rnd: random.Random, n_max: int, *, horizon: int = 30,
                     n_min: int = 2) -> Instance:
    """Two-value instance; both lengths are always present."""
    short = rnd.choice([1, 2, 3])
    long = short * rnd.choice([Fraction(3, 2), 2, Fraction(5, 2), 3, 5])
    long = long if long != short else short + 1
    n = rnd.randint(max(2, n_min), n_max)
    lengths = [short, long] + [rnd.choice([short, long]) for _ in range(n - 2)]
    rnd.shuffle(lengths)
    triples = []
    for i, length in enumerate(lengths):
        r = Fraction(rnd.randint(0, horizon * 2), 2)
        triples.append((i, r, r + length))
    return validate_instance(triples)


def random_prediction(rnd: random.Random, inst: Instance) -> BinaryPrediction:
    """Advice from a mix of regimes: perfect, perturbed, random, extreme."""
    mode = rnd.randrange(6)
    opt_bits = BinaryPrediction.from_ids(inst, dp_opt(inst).ids).bits
    if mode == 0:
        bits = opt_bits
    elif mode == 1:
        bits = tuple(b ^ (rnd.random() < 0.2) for b in opt_bits)
    elif mode == 2:
        bits = tuple(int(rnd.random() < 0.5) for _ in inst)
    elif mode == 3:
        bits = (1,) * len(inst)
    elif mode == 4:
        bits = tuple(int(rnd.random() < 0.15) for _ in inst)
    else:
        bits = tuple(int(rnd.random() < 0.85) for _ in inst)
    return BinaryPrediction(bits)


def fuzz_pairs(seed: int, count: int, n_max: int, *, two_value: bool = False):
    rnd = random.Random(seed)
    for _ in range(count):
        if two_value:
            inst = random_two_value(rnd, n_max)
        else:
            inst = random_instance(rnd, n_max, fractional=rnd.random() < 0.3)
        yield inst, random_prediction(rnd, inst)


@st.composite
def instances(draw, max_n: int = 10, horizon: int = 20, max_len: int = 6):
    n = draw(st.integers(0, max_n))
    triples = []
    for i in range(n):
        r = draw(st.integers(0, horizon))
        length = draw(st.integers(1, max_len))
        triples.append((i, r, r + length))
    return validate_instance(triples)


@st.composite
def instance_and_prediction(draw, max_n: int = 10):
    inst = draw(instances(max_n=max_n))
    bits = draw(st.lists(st.integers(0, 1), min_size=len(inst), max_size=len(inst)))
    return inst, BinaryPrediction(tuple(bits))


# Acceptance reporter ----------------------------------------------------------

_RESULTS: dict[int, list[str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number = marker.args[0]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _RESULTS.setdefault(number, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        outcomes = _RESULTS[number]
        if any(o == "failed" for o in outcomes):
            verdict = "FAIL"
        elif all(o == "skipped" for o in outcomes):
            verdict = "SKIP"
        else:
            verdict = "PASS"
        skipped = outcomes.count("skipped")
        note = f" ({len(outcomes) - skipped} run, {skipped} skipped)" if skipped else ""
        terminalreporter.write_line(f"ACCEPTANCE C{number} {verdict}{note}")
