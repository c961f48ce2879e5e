"""Exact rational arithmetic and finite unions of closed intervals.

Every real quantity in the core modules is a :class:`fractions.Fraction`.
Floats never enter here; rendering code converts at the very end.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

Rational = Fraction


class MalformedIntervalError(ValueError):
    """An interval with lo > hi was supplied."""


class DegenerateMapError(ValueError):
    """An affine map with zero scale was requested."""


def as_rational(value) -> Fraction:
    """Coerce ``value`` to a Fraction, refusing floats.

    Accepts ints, Fractions and strings of the form ``"p/q"`` or ``"p"``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE"):
            raise ValueError(f"not an exact rational: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def format_rational(q: Fraction) -> str:
    """Canonical ``"p/q"`` text (lowest terms, positive denominator)."""
    q = as_rational(q)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, order=True)
class Interval:
    """Closed interval ``[lo, hi]``; a single point is allowed."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo = as_rational(self.lo)
        hi = as_rational(self.hi)
        if lo > hi:
            raise MalformedIntervalError(f"interval with lo > hi: [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, p) -> bool:
        return self.lo <= p <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def to_json(self) -> list:
        return [format_rational(self.lo), format_rational(self.hi)]

    def __repr__(self):
        return f"[{self.lo}, {self.hi}]"


class IntervalSet:
    """A normalized finite union of pairwise separated closed intervals.

    Instances are immutable. Build them with :func:`normalize` (or the
    constructor, which normalizes); components are sorted and any two
    consecutive components are separated by a gap of positive length.
    """

    __slots__ = ("_intervals", "_los")

    def __init__(self, intervals: Iterable = ()):
        merged = _merge(_coerce(intervals))
        self._intervals = tuple(merged)
        self._los = tuple(iv.lo for iv in merged)

    @classmethod
    def _from_normalized(cls, intervals: Sequence[Interval]) -> "IntervalSet":
        obj = cls.__new__(cls)
        obj._intervals = tuple(intervals)
        obj._los = tuple(iv.lo for iv in obj._intervals)
        return obj

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls._from_normalized(())

    @property
    def intervals(self) -> tuple:
        return self._intervals

    def __iter__(self) -> Iterator[Interval]:
        return iter(self._intervals)

    def __len__(self) -> int:
        return len(self._intervals)

    def __getitem__(self, i) -> Interval:
        return self._intervals[i]

    def __bool__(self) -> bool:
        return bool(self._intervals)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self._intervals == other._intervals

    def __hash__(self):
        return hash(self._intervals)

    def __repr__(self):
        return f"IntervalSet({list(self._intervals)!r})"

    def measure(self) -> Fraction:
        return sum((iv.hi - iv.lo for iv in self._intervals), Fraction(0))

    def endpoints(self) -> list:
        pts = []
        for iv in self._intervals:
            pts.append(iv.lo)
            if iv.hi != iv.lo:
                pts.append(iv.hi)
        return pts

    def _index_at(self, p) -> int:
        return bisect_right(self._los, p) - 1

    def contains_point(self, p) -> bool:
        i = self._index_at(p)
        return i >= 0 and p <= self._intervals[i].hi

    def component_containing(self, iv: Interval) -> Optional[Interval]:
        i = self._index_at(iv.lo)
        if i < 0:
            return None
        comp = self._intervals[i]
        if iv.hi <= comp.hi:
            return comp
        return None

    def contains_span(self, lo, hi) -> bool:
        """True iff ``[lo, hi]`` lies inside a single component."""
        i = bisect_right(self._los, lo) - 1
        return i >= 0 and hi <= self._intervals[i].hi

    def issubset(self, other: "IntervalSet") -> bool:
        return all(other.component_containing(iv) is not None for iv in self._intervals)

    def affine_image(self, x, t) -> "IntervalSet":
        return affine_image(self, x, t)

    def to_json(self) -> list:
        return [iv.to_json() for iv in self._intervals]

    @classmethod
    def from_json(cls, data) -> "IntervalSet":
        return normalize([Interval(as_rational(lo), as_rational(hi)) for lo, hi in data])


def _coerce(raw: Iterable) -> list:
    out = []
    for item in raw:
        if isinstance(item, Interval):
            out.append(item)
        else:
            lo, hi = item
            out.append(Interval(as_rational(lo), as_rational(hi)))
    return out


def _merge(ivs: list) -> list:
    if not ivs:
        return []
    ivs = sorted(ivs)
    merged = [ivs[0]]
    for iv in ivs[1:]:
        last = merged[-1]
        # touching closed intervals share a point, so they form one component
        if iv.lo <= last.hi:
            if iv.hi > last.hi:
                merged[-1] = Interval(last.lo, iv.hi)
        else:
            merged.append(iv)
    return merged


def normalize(raw: Iterable) -> IntervalSet:
    """Sort ``raw`` and merge overlapping or touching intervals.

    >>> normalize([(Fraction(0), Fraction(1, 2)), (Fraction(1, 2), Fraction(1))])
    IntervalSet([[0, 1]])
    """
    return IntervalSet(raw)


def measure(s: IntervalSet) -> Fraction:
    return s.measure()


def contains_point(s: IntervalSet, p) -> bool:
    return s.contains_point(p)


def component_containing(s: IntervalSet, iv: Interval) -> Optional[Interval]:
    return s.component_containing(iv)


def affine_image(s: IntervalSet, x, t) -> IntervalSet:
    """Image of ``s`` under ``p -> x + t*p``; ``t`` may be negative but not zero."""
    x = as_rational(x)
    t = as_rational(t)
    if t == 0:
        raise DegenerateMapError("affine map with t = 0")
    if t > 0:
        ivs = [Interval(x + t * iv.lo, x + t * iv.hi) for iv in s]
    else:
        ivs = [Interval(x + t * iv.hi, x + t * iv.lo) for iv in reversed(s.intervals)]
    # a positive scale keeps gaps positive, so no merging is needed
    return IntervalSet._from_normalized(ivs)
