"""Line arrangements in the (x, t) parameter plane.

Lines have the form ``x + a*t = b`` with ``a >= 0``; ``a == 0`` gives the
vertical line ``x = b``. Faces of the arrangement inside a rectangle are
enumerated by a left-to-right sweep that keeps the vertical order of the
slanted lines and emits one interior point for every face, at the slab
where the face begins.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .intervals import as_rational, format_rational


@dataclass(frozen=True)
class ParamRect:
    """The parameter box ``x in [a, b]``, ``t in [A, B]`` with ``0 < A <= B``."""

    a: Fraction
    b: Fraction
    A: Fraction
    B: Fraction

    def __post_init__(self):
        for name in ("a", "b", "A", "B"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))
        if self.a > self.b:
            raise ValueError(f"empty x-range [{self.a}, {self.b}]")
        if not 0 < self.A <= self.B:
            raise ValueError(f"need 0 < A <= B, got [{self.A}, {self.B}]")

    @classmethod
    def from_signed(cls, a, b, A, B) -> "ParamRect":
        """Accept a rectangle with ``A <= B < 0`` as well.

        For a Cantor set with ``1 - C = C`` we have ``x + tC = (x + t) + |t|C``,
        so negative scales map to the positive box ``[a + A, b + B] x [-B, -A]``
        (a bounding box of the sheared image, hence a superset to certify).
        """
        a, b, A, B = (as_rational(v) for v in (a, b, A, B))
        if A <= B < 0:
            return cls(a + A, b + B, -B, -A)
        if A > B or (A <= 0 <= B):
            raise ValueError("t-range must be nonzero and of one sign")
        return cls(a, b, A, B)

    def contains(self, x, t) -> bool:
        return self.a <= x <= self.b and self.A <= t <= self.B

    def to_json(self) -> list:
        return [format_rational(v) for v in (self.a, self.b, self.A, self.B)]


@dataclass(frozen=True, order=True)
class CutLine:
    """The locus ``x + a*t = b``."""

    a: Fraction
    b: Fraction

    @property
    def kind(self) -> str:
        return "vertical" if self.a == 0 else "slanted"

    def side(self, x, t) -> int:
        v = x + self.a * t - self.b
        return (v > 0) - (v < 0)

    def t_at(self, x) -> Fraction:
        return (self.b - x) / self.a


@dataclass(frozen=True)
class FaceSample:
    x: Fraction
    t: Fraction
    admissible: bool


def is_admissible(x, t) -> bool:
    """``x + t*C`` lies in ``[0, 1]`` (for ``t > 0``, since 0 and 1 are in C)."""
    return x >= 0 and x + t <= 1


ADMISSIBILITY_LINES = (CutLine(Fraction(0), Fraction(0)), CutLine(Fraction(1), Fraction(1)))


def meets_rect(line: CutLine, rect: ParamRect) -> bool:
    # x + a*t ranges over [a_x + a*A, b_x + a*B] on the closed box since a >= 0
    return rect.a + line.a * rect.A <= line.b <= rect.b + line.a * rect.B


def cut_lines(endpoint_set: Iterable, grid: Iterable, rect: ParamRect,
              include_admissibility: bool = True) -> list:
    """All lines ``x + a t = b`` (a from ``endpoint_set``, b from ``grid``) meeting ``rect``.

    The two admissibility lines ``x = 0`` and ``x + t = 1`` are added when
    they meet the rectangle. The result is sorted and duplicate-free; its
    length is the line count S.
    """
    avals = sorted({as_rational(a) for a in endpoint_set})
    bvals = sorted({as_rational(b) for b in grid})
    out = set()
    for a in avals:
        if a < 0:
            raise ValueError("slopes come from [0, 1]")
        lo = rect.a + a * rect.A
        hi = rect.b + a * rect.B
        for b in bvals[bisect_left(bvals, lo):bisect_right(bvals, hi)]:
            out.add(CutLine(a, b))
    if include_admissibility:
        out.update(line for line in ADMISSIBILITY_LINES if meets_rect(line, rect))
    return sorted(out)


def face_samples(lines: Iterable[CutLine], rect: ParamRect) -> list:
    """One interior point for every face of the arrangement inside ``rect``.

    A degenerate box (``a == b`` or ``A == B``) is swept as a segment.
    """
    return list(iter_face_samples(lines, rect))


def iter_face_samples(lines: Iterable[CutLine], rect: ParamRect) -> Iterator[FaceSample]:
    lines = sorted(set(lines))
    if rect.a == rect.b or rect.A == rect.B:
        yield from segment_samples(lines, (rect.a, rect.A), (rect.b, rect.B))
    else:
        yield from _sweep(lines, rect)


def segment_samples(lines, p0, p1) -> Iterator[FaceSample]:
    """Midpoints of the pieces the lines cut the segment ``p0 -> p1`` into."""
    x0, t0 = p0
    x1, t1 = p1
    if (x0, t0) == (x1, t1):
        yield FaceSample(x0, t0, is_admissible(x0, t0))
        return
    dx, dt = x1 - x0, t1 - t0
    cuts = set()
    for line in lines:
        denom = dx + line.a * dt
        if denom == 0:
            continue
        s = (line.b - x0 - line.a * t0) / denom
        if 0 < s < 1:
            cuts.add(s)
    marks = [Fraction(0)] + sorted(cuts) + [Fraction(1)]
    for lo, hi in zip(marks, marks[1:]):
        s = (lo + hi) / 2
        x, t = x0 + s * dx, t0 + s * dt
        yield FaceSample(x, t, is_admissible(x, t))


class _Event:
    __slots__ = ("enters", "exits", "points", "vertical")

    def __init__(self):
        self.enters = []
        self.exits = []
        self.points = defaultdict(set)
        self.vertical = False


def _sweep(lines, rect: ParamRect) -> Iterator[FaceSample]:
    xlo, xhi, tlo, thi = rect.a, rect.b, rect.A, rect.B
    events = defaultdict(_Event)

    for line in lines:
        if line.a == 0 and xlo < line.b < xhi:
            events[line.b].vertical = True

    # slanted lines crossing the open box; t decreases as x grows
    slope = []
    icpt = []
    x_enter = []
    x_exit = []
    for line in lines:
        if line.a == 0:
            continue
        x_top = line.b - line.a * thi
        x_bot = line.b - line.a * tlo
        if x_bot <= xlo or x_top >= xhi:
            continue
        i = len(slope)
        slope.append(line.a)
        icpt.append(line.b)
        x_enter.append(x_top)
        x_exit.append(x_bot)
        if x_top > xlo:
            events[x_top].enters.append(i)
        if x_bot < xhi:
            events[x_bot].exits.append(i)

    _add_crossings(slope, icpt, rect, events)

    def t_of(i, x):
        return (icpt[i] - x) / slope[i]

    def gap_sample(order, pos, x):
        # gap between order[pos-1] (or the bottom edge) and order[pos] (or the top edge)
        lower = tlo if pos == 0 else t_of(order[pos - 1], x)
        upper = thi if pos == len(order) else t_of(order[pos], x)
        t = (lower + upper) / 2
        return FaceSample(x, t, is_admissible(x, t))

    xs = sorted(events)
    bounds = [xlo] + xs + [xhi]

    x_mid = (bounds[0] + bounds[1]) / 2
    order = [i for i in range(len(slope)) if x_enter[i] < x_mid < x_exit[i]]
    order.sort(key=lambda i: t_of(i, x_mid))
    for pos in range(len(order) + 1):
        yield gap_sample(order, pos, x_mid)

    for k, x_e in enumerate(xs):
        ev = events[x_e]
        x_mid = (x_e + bounds[k + 2]) / 2
        if ev.exits:
            gone = set(ev.exits)
            n_gone = len(gone)
            if set(order[:n_gone]) != gone:
                raise AssertionError("sweep invariant broken: exiting lines are not lowest")
            del order[:n_gone]
        new_gaps = []
        for group in ev.points.values():
            where = sorted(order.index(i) for i in group)
            p0, p1 = where[0], where[-1]
            if p1 - p0 + 1 != len(where):
                raise AssertionError("sweep invariant broken: concurrent lines not adjacent")
            order[p0:p1 + 1] = order[p0:p1 + 1][::-1]
            new_gaps.extend(range(p0 + 1, p1 + 1))
        if ev.enters:
            # just right of the top edge, flatter lines (larger a) sit higher
            entering = sorted(ev.enters, key=lambda i: slope[i])
            start = len(order)
            order.extend(entering)
            new_gaps.extend(range(start + 1, len(order) + 1))
        if ev.vertical:
            new_gaps = range(len(order) + 1)
        for pos in new_gaps:
            yield gap_sample(order, pos, x_mid)


def _add_crossings(slope, icpt, rect, events):
    """Record every crossing of two slanted lines strictly inside ``rect``."""
    xlo, xhi, tlo, thi = rect.a, rect.b, rect.A, rect.B
    by_slope = defaultdict(list)
    for i, a in enumerate(slope):
        by_slope[a].append((icpt[i], i))
    groups = sorted(by_slope.items())
    for g in groups:
        g[1].sort()
    for gi, (a1, members1) in enumerate(groups):
        for a2, members2 in groups[gi + 1:]:
            # a2 > a1; the crossing height is t = (b2 - b1) / (a2 - a1)
            da = a2 - a1
            keys2 = [b for b, _ in members2]
            for b1, i in members1:
                lo = bisect_right(keys2, b1 + da * tlo)
                hi = bisect_left(keys2, b1 + da * thi)
                for b2, j in members2[lo:hi]:
                    t = (b2 - b1) / da
                    x = b1 - a1 * t
                    if xlo < x < xhi:
                        events[x].points[t].update((i, j))


def sign_vector(lines, x, t) -> Optional[tuple]:
    """Side of every line at ``(x, t)``; None if the point lies on a line."""
    signs = tuple(line.side(x, t) for line in lines)
    if 0 in signs:
        return None
    return signs
