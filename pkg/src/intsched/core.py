"""Domain types for online interval scheduling.

Times are exact: integers stay integers, everything else becomes a
``fractions.Fraction``. Intervals are half-open ``[release, deadline)``, so
``[0, 1)`` and ``[1, 2)`` do not conflict.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from numbers import Rational
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import (
    DuplicateId,
    NegativeRelease,
    NonPositiveLength,
    PredictionMismatch,
)

Time = Rational


def to_time(value) -> Time:
    """Convert ``value`` to an exact time (int or Fraction).

    Strings are parsed as decimals or ``p/q`` ratios; floats go through their
    shortest repr so ``0.1`` means one tenth.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not times")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        q = value
    elif isinstance(value, float):
        q = Fraction(repr(value))
    elif isinstance(value, (str, Decimal)):
        q = Fraction(str(value).strip())
    elif isinstance(value, Rational):
        q = Fraction(value.numerator, value.denominator)
    else:
        raise TypeError(f"cannot interpret {value!r} as a time")
    return q.numerator if q.denominator == 1 else q


def format_time(value) -> str:
    """Render an exact time as a string that ``to_time`` reads back."""
    q = Fraction(value)
    if q.denominator == 1:
        return str(q.numerator)
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{q.numerator}/{q.denominator}"
    places = max(twos, fives)
    scaled = q * 10**places
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled.numerator)).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


@dataclass(frozen=True, slots=True)
class Interval:
    id: int
    release: Time
    deadline: Time
    length: Time = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "length", self.deadline - self.release)

    def overlaps(self, other: Interval) -> bool:
        return self.release < other.deadline and other.release < self.deadline

    def contains(self, t) -> bool:
        return self.release <= t < self.deadline


def _arrival_key(iv: Interval):
    return (iv.release, iv.id)


@dataclass(frozen=True)
class Instance:
    """Release-ordered interval sequence.

    ``k``, ``delta`` and ``two_value`` are derived here and never accepted
    from callers. For the empty instance ``k`` is 0 and ``delta`` is None.
    """

    intervals: tuple[Interval, ...]
    k: Time = field(init=False)
    delta: Time | None = field(init=False)
    two_value: bool = field(init=False)

    def __post_init__(self):
        ivs = tuple(self.intervals)
        object.__setattr__(self, "intervals", ivs)
        if ivs:
            lengths = {iv.length for iv in ivs}
            k = max(lengths)
            delta = to_time(Fraction(k) / Fraction(min(lengths)))
            two_value = len(lengths) == 2
        else:
            k, delta, two_value = 0, None, False
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "two_value", two_value)

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __getitem__(self, idx):
        return self.intervals[idx]

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(iv.id for iv in self.intervals)

    @property
    def lengths(self) -> frozenset:
        return frozenset(iv.length for iv in self.intervals)

    def position(self, interval_id: int) -> int:
        for pos, iv in enumerate(self.intervals):
            if iv.id == interval_id:
                return pos
        raise KeyError(interval_id)

    def by_id(self) -> dict[int, Interval]:
        return {iv.id: iv for iv in self.intervals}


def make_interval(interval_id, release, deadline) -> Interval:
    r, d = to_time(release), to_time(deadline)
    if d <= r:
        raise NonPositiveLength(interval_id)
    if r < 0:
        raise NegativeRelease(interval_id)
    return Interval(int(interval_id), r, d)


def validate_instance(raw: Iterable) -> Instance:
    """Build an Instance from intervals or ``(id, release, deadline)`` triples.

    Dicts with ``id``/``release``/``deadline`` keys are accepted as well.
    Output is sorted stably by ``(release, id)``.
    """
    items: list[Interval] = []
    seen: set[int] = set()
    for pos, obj in enumerate(raw):
        if isinstance(obj, Interval):
            iv = make_interval(obj.id, obj.release, obj.deadline)
        elif isinstance(obj, dict):
            iv = make_interval(obj.get("id", pos), obj["release"], obj["deadline"])
        else:
            if len(obj) == 2:
                iv = make_interval(pos, obj[0], obj[1])
            else:
                iv = make_interval(*obj)
        if iv.id in seen:
            raise DuplicateId(iv.id)
        seen.add(iv.id)
        items.append(iv)
    items.sort(key=_arrival_key)
    return Instance(tuple(items))


def instance_from_pairs(pairs: Iterable[Sequence]) -> Instance:
    """Instance whose ids are the positions of ``pairs`` (``(release, deadline)``)."""
    return validate_instance((i, r, d) for i, (r, d) in enumerate(pairs))


def restrict(
    inst: Instance,
    *,
    release_le=None,
    release_gt=None,
    deadline_le=None,
    deadline_gt=None,
) -> Instance:
    """Sub-instance selected by release/deadline bounds.

    ``release_le=t`` keeps releases ``<= t`` and ``release_gt=t`` keeps
    releases ``> t``; likewise for deadlines. All given bounds must hold.
    ``restrict(I, release_le=t1, deadline_gt=t2)`` is I(t1<-, t2->).
    """
    def keep(iv: Interval) -> bool:
        if release_le is not None and not iv.release <= release_le:
            return False
        if release_gt is not None and not iv.release > release_gt:
            return False
        if deadline_le is not None and not iv.deadline <= deadline_le:
            return False
        if deadline_gt is not None and not iv.deadline > deadline_gt:
            return False
        return True

    return Instance(tuple(iv for iv in inst.intervals if keep(iv)))


@dataclass(frozen=True)
class BinaryPrediction:
    """Accept/reject advice, one bit per interval in arrival order."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError("prediction bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, idx) -> int:
        return self.bits[idx]

    def check(self, inst: Instance) -> BinaryPrediction:
        if len(self.bits) != len(inst):
            raise PredictionMismatch(
                f"prediction has {len(self.bits)} bits for {len(inst)} intervals"
            )
        return self

    @classmethod
    def from_ids(cls, inst: Instance, ids: Iterable[int]) -> BinaryPrediction:
        chosen = set(ids)
        return cls(tuple(1 if iv.id in chosen else 0 for iv in inst.intervals))

    @classmethod
    def zeros(cls, inst: Instance) -> BinaryPrediction:
        return cls((0,) * len(inst))

    @classmethod
    def ones(cls, inst: Instance) -> BinaryPrediction:
        return cls((1,) * len(inst))

    def accepted(self, inst: Instance) -> tuple[Interval, ...]:
        self.check(inst)
        return tuple(iv for iv, b in zip(inst.intervals, self.bits) if b)

    def is_feasible(self, inst: Instance) -> bool:
        busy = None
        for iv in self.accepted(inst):
            if busy is not None and iv.release < busy:
                return False
            busy = iv.deadline if busy is None else max(busy, iv.deadline)
        return True


@dataclass(frozen=True)
class FullPrediction:
    """Predicted ``(release, deadline)`` for every interval."""

    pairs: tuple[tuple[Time, Time], ...]

    def __post_init__(self):
        pairs = tuple((to_time(r), to_time(d)) for r, d in self.pairs)
        for i, (r, d) in enumerate(pairs):
            if d <= r:
                raise NonPositiveLength(i)
        object.__setattr__(self, "pairs", pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def as_instance(self) -> Instance:
        return instance_from_pairs(self.pairs)


@dataclass(frozen=True)
class Schedule:
    """A feasible set of accepted intervals, kept in arrival order."""

    intervals: tuple[Interval, ...] = ()

    def __post_init__(self):
        ivs = tuple(sorted(self.intervals, key=_arrival_key))
        for a, b in zip(ivs, ivs[1:]):
            if b.release < a.deadline:
                raise ValueError(f"intervals {a.id} and {b.id} overlap")
        object.__setattr__(self, "intervals", ivs)

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(iv.id for iv in self.intervals)

    @property
    def total_length(self) -> Time:
        return sum((iv.length for iv in self.intervals), 0)

    def __len__(self) -> int:
        return len(self.intervals)

    def __contains__(self, interval_id) -> bool:
        return any(iv.id == interval_id for iv in self.intervals)


class Node(NamedTuple):
    side: str
    interval: Interval

    @property
    def id(self) -> int:
        return self.interval.id


@dataclass(frozen=True)
class ConflictGraph:
    nodes_a: tuple[int, ...]
    nodes_b: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    components: tuple[tuple[Node, ...], ...]


def conflict_graph(a: Schedule, b: Schedule, sides=("A", "B")) -> ConflictGraph:
    """Bipartite overlap graph between two feasible schedules.

    An interval present in both schedules gives two nodes (one per side),
    joined by an edge. Components are ordered by their earliest node, and
    nodes inside a component by arrival.
    """
    side_a, side_b = sides
    a_ivs, b_ivs = a.intervals, b.intervals
    # feasible schedules: deadlines ascend with releases
    b_deadlines = [iv.deadline for iv in b_ivs]
    edges: list[tuple[int, int]] = []
    parent = list(range(len(a_ivs) + len(b_ivs)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, ai in enumerate(a_ivs):
        j = bisect_right(b_deadlines, ai.release)
        while j < len(b_ivs) and b_ivs[j].release < ai.deadline:
            edges.append((ai.id, b_ivs[j].id))
            ra, rb = find(i), find(len(a_ivs) + j)
            if ra != rb:
                parent[ra] = rb
            j += 1

    groups: dict[int, list[Node]] = {}
    for i, iv in enumerate(a_ivs):
        groups.setdefault(find(i), []).append(Node(side_a, iv))
    for j, iv in enumerate(b_ivs):
        groups.setdefault(find(len(a_ivs) + j), []).append(Node(side_b, iv))

    def node_key(node: Node):
        return (node.interval.release, node.interval.id, node.side != side_a)

    comps = [tuple(sorted(g, key=node_key)) for g in groups.values()]
    comps.sort(key=lambda c: node_key(c[0]))
    return ConflictGraph(
        nodes_a=a.ids, nodes_b=b.ids, edges=tuple(edges), components=tuple(comps)
    )


# JSON interchange -----------------------------------------------------------

def instance_to_dict(inst: Instance) -> dict:
    return {
        "intervals": [
            {"id": iv.id, "release": format_time(iv.release), "deadline": format_time(iv.deadline)}
            for iv in inst.intervals
        ]
    }


def instance_from_dict(data: dict) -> Instance:
    return validate_instance(data["intervals"])


def load_instance(path) -> Instance:
    with open(path) as fh:
        return instance_from_dict(json.load(fh))


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst), indent=1) + "\n")


def prediction_to_dict(pred: BinaryPrediction) -> dict:
    return {"bits": list(pred.bits)}


def load_prediction(path) -> BinaryPrediction:
    with open(path) as fh:
        data = json.load(fh)
    bits = data["bits"] if isinstance(data, dict) else data
    return BinaryPrediction(tuple(bits))
