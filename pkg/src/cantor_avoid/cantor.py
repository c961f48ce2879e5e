"""Symmetric Cantor sets given by a ratio rule, plus decay diagnostics.

A spec fixes ``r_n`` for ``n >= 1``; then ``l_n = r_1 * ... * r_n`` is the
length of each of the ``2**n`` generation-``n`` intervals and
``d_n = l_{n-1} - 2 l_n`` is the middle gap removed at step ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

from .intervals import Interval, IntervalSet, as_rational, format_rational

DEFAULT_MAX_GENERATION = 20

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)


class SpecError(ValueError):
    """Invalid Cantor spec (ratio outside (0, 1/2), bad JSON, ...)."""


class GenerationLimitError(RuntimeError):
    """Requested generation exceeds the configured depth cap."""


@dataclass(frozen=True)
class CantorSpec:
    """Ratio rule for a symmetric Cantor set.

    kind is one of ``"constant"`` (``r``), ``"reciprocal_shift"``
    (``r_n = 1/(n + shift)``) or ``"list"`` (explicit ``values`` for
    ``n = 1..len(values)``, then ``tail`` evaluated at the same absolute n).
    """

    kind: str
    r: Optional[Fraction] = None
    shift: Optional[int] = None
    values: tuple = ()
    tail: Optional["CantorSpec"] = None

    def __post_init__(self):
        if self.kind == "constant":
            if self.r is None:
                raise SpecError("constant spec needs r")
            r = as_rational(self.r)
            object.__setattr__(self, "r", r)
            if not 0 < r < HALF:
                raise SpecError(f"ratio must lie in (0, 1/2), got {r}")
        elif self.kind == "reciprocal_shift":
            if not isinstance(self.shift, int) or isinstance(self.shift, bool):
                raise SpecError("reciprocal_shift spec needs an integer shift")
            # shift 1 gives r_1 = 1/2, i.e. no gap at all
            if self.shift < 2:
                raise SpecError(f"shift must be >= 2 so that r_1 < 1/2, got {self.shift}")
        elif self.kind == "list":
            vals = tuple(as_rational(v) for v in self.values)
            object.__setattr__(self, "values", vals)
            for v in vals:
                if not 0 < v < HALF:
                    raise SpecError(f"ratio must lie in (0, 1/2), got {v}")
            if self.tail is None:
                raise SpecError("list spec needs a tail rule")
            if not isinstance(self.tail, CantorSpec):
                raise SpecError("tail must be a CantorSpec")
        else:
            raise SpecError(f"unknown ratio kind {self.kind!r}")

    @classmethod
    def constant(cls, r) -> "CantorSpec":
        return cls("constant", r=as_rational(r))

    @classmethod
    def reciprocal_shift(cls, shift: int) -> "CantorSpec":
        return cls("reciprocal_shift", shift=shift)

    @classmethod
    def from_list(cls, values, tail: "CantorSpec") -> "CantorSpec":
        return cls("list", values=tuple(as_rational(v) for v in values), tail=tail)

    def ratio(self, n: int) -> Fraction:
        if n < 1:
            raise ValueError(f"ratios are indexed from n = 1, got {n}")
        if self.kind == "constant":
            return self.r
        if self.kind == "reciprocal_shift":
            return Fraction(1, n + self.shift)
        if n <= len(self.values):
            return self.values[n - 1]
        return self.tail.ratio(n)

    @property
    def thin(self) -> bool:
        """True iff ``r_n < 1/3`` for every n (equivalently ``d_n > l_n``)."""
        if self.kind == "constant":
            return self.r < THIRD
        if self.kind == "reciprocal_shift":
            return Fraction(1, 1 + self.shift) < THIRD
        return all(v < THIRD for v in self.values) and self.tail.thin

    def to_json(self) -> dict:
        return {"ratios": self._rule_json()}

    def _rule_json(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "r": format_rational(self.r)}
        if self.kind == "reciprocal_shift":
            return {"kind": "reciprocal_shift", "shift": self.shift}
        return {
            "kind": "list",
            "values": [format_rational(v) for v in self.values],
            "tail": self.tail._rule_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "CantorSpec":
        if not isinstance(data, dict) or set(data) != {"ratios"}:
            raise SpecError('spec must be an object with the single key "ratios"')
        return _rule_from_json(data["ratios"])


_RULE_KEYS = {
    "constant": {"kind", "r"},
    "reciprocal_shift": {"kind", "shift"},
    "list": {"kind", "values", "tail"},
}


def _rule_from_json(rule) -> CantorSpec:
    if not isinstance(rule, dict) or rule.get("kind") not in _RULE_KEYS:
        raise SpecError(f"bad ratio rule: {rule!r}")
    kind = rule["kind"]
    if set(rule) != _RULE_KEYS[kind]:
        raise SpecError(f"{kind} rule needs exactly the keys {sorted(_RULE_KEYS[kind])}")
    try:
        if kind == "constant":
            return CantorSpec.constant(rule["r"])
        if kind == "reciprocal_shift":
            return CantorSpec.reciprocal_shift(rule["shift"])
        return CantorSpec.from_list(rule["values"], _rule_from_json(rule["tail"]))
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(str(exc)) from exc


TERNARY = CantorSpec.constant(THIRD)
# the decaying-ratio example set, shifted so that r_1 < 1/2
RECIPROCAL_EXAMPLE = CantorSpec.reciprocal_shift(2)


_ELL_CACHE: dict = {}


def ell(spec: CantorSpec, n: int) -> Fraction:
    """Length of a generation-n interval."""
    if n < 0:
        raise ValueError("n must be >= 0")
    prefix = _ELL_CACHE.setdefault(spec, [Fraction(1)])
    while len(prefix) <= n:
        prefix.append(prefix[-1] * spec.ratio(len(prefix)))
    return prefix[n]


def d(spec: CantorSpec, n: int) -> Fraction:
    """Length of the gap removed from each generation-(n-1) interval."""
    if n < 1:
        raise ValueError("d_n is defined for n >= 1")
    return ell(spec, n - 1) - 2 * ell(spec, n)


def _check_depth(n: int, max_generation: int):
    if n < 0:
        raise ValueError("generation index must be >= 0")
    if n > max_generation:
        raise GenerationLimitError(
            f"generation {n} exceeds the cap {max_generation} (2**{n} intervals)"
        )


@lru_cache(maxsize=64)
def _left_endpoints(spec: CantorSpec, n: int) -> tuple:
    if n == 0:
        return (Fraction(0),)
    prev = _left_endpoints(spec, n - 1)
    shift = ell(spec, n - 1) - ell(spec, n)
    out = []
    for p in prev:
        out.append(p)
        out.append(p + shift)
    return tuple(out)


def left_endpoints(spec: CantorSpec, n: int, max_generation: int = DEFAULT_MAX_GENERATION) -> tuple:
    _check_depth(n, max_generation)
    return _left_endpoints(spec, n)


def generation(spec: CantorSpec, n: int, max_generation: int = DEFAULT_MAX_GENERATION) -> IntervalSet:
    """C_n as an IntervalSet of 2**n components."""
    _check_depth(n, max_generation)
    length = ell(spec, n)
    return IntervalSet._from_normalized(
        [Interval(p, p + length) for p in _left_endpoints(spec, n)]
    )


@dataclass(frozen=True)
class EndpointSet:
    """Sorted boundary points of C_n (left and right endpoints together)."""

    points: tuple
    generation: int

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def endpoints(spec: CantorSpec, n: int, max_generation: int = DEFAULT_MAX_GENERATION) -> EndpointSet:
    _check_depth(n, max_generation)
    length = ell(spec, n)
    pts = []
    for p in _left_endpoints(spec, n):
        pts.append(p)
        pts.append(p + length)
    return EndpointSet(tuple(pts), n)


def newhouse_thickness(spec: CantorSpec, N: int) -> Fraction:
    """``min_{1<=n<=N} l_n / d_n``, the finite-window thickness.

    ``l_n / d_n = r_n / (1 - 2 r_n)``, so for a monotone ratio rule the
    minimum sits at one end of the window.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    return min(spec.ratio(n) / (1 - 2 * spec.ratio(n)) for n in range(1, N + 1))


def delta(points: Sequence) -> Fraction:
    """Smallest consecutive gap of a strictly decreasing list over its span."""
    pts = [as_rational(p) for p in points]
    if len(pts) < 2:
        raise ValueError("delta needs at least two points")
    gaps = [a - b for a, b in zip(pts, pts[1:])]
    if any(g <= 0 for g in gaps):
        raise ValueError("points must be strictly decreasing")
    return min(gaps) / (pts[0] - pts[-1])


def neg_log(q: Fraction) -> float:
    """``-log q`` for a positive rational, without overflowing floats."""
    return math.log(q.denominator) - math.log(q.numerator)


@dataclass
class DecayRow:
    n: int
    value: Fraction
    ratio: float

    @property
    def approx(self) -> float:
        return float(self.value)


@dataclass
class DecayDiagnostic:
    """Table of exact values and the ratio sequence a decay condition tests."""

    label: str
    rows: list = field(default_factory=list)
    thin: Optional[bool] = None

    def ratios(self) -> list:
        return [row.ratio for row in self.rows]

    def decreasing_from(self) -> Optional[int]:
        """Smallest n from which the ratio strictly decreases to the end of the table."""
        if not self.rows:
            return None
        start = len(self.rows) - 1
        while start > 0 and self.rows[start - 1].ratio > self.rows[start].ratio:
            start -= 1
        return self.rows[start].n

    def is_decreasing_from(self, n0: int) -> bool:
        tail = [row.ratio for row in self.rows if row.n >= n0]
        return all(a > b for a, b in zip(tail, tail[1:]))


def min_gap_left_endpoints(spec: CantorSpec, n: int) -> Fraction:
    """Closed form for the smallest distance between points of L_n."""
    return ell(spec, n) + min(d(spec, k) for k in range(1, n + 1))


def theorem12_diagnostic(source: Union[CantorSpec, Sequence], N: int) -> DecayDiagnostic:
    """Rows ``(n, delta_n, -log(delta_n) / #points)``.

    For a spec, the point set at row n is L_n (2**n points). For an explicit
    strictly decreasing sequence, row n uses its first n terms.
    """
    if isinstance(source, CantorSpec):
        if N < 1:
            raise ValueError("N must be >= 1")
        rows = []
        for n in range(1, N + 1):
            dl = min_gap_left_endpoints(source, n) / (1 - ell(source, n))
            rows.append(DecayRow(n, dl, neg_log(dl) / 2**n))
        return DecayDiagnostic("delta(L_n)", rows, thin=source.thin)
    seq = [as_rational(a) for a in source]
    if N < 2:
        raise ValueError("N must be >= 2")
    if len(seq) < N:
        raise ValueError(f"sequence has {len(seq)} terms, need {N}")
    rows = []
    for n in range(2, N + 1):
        dl = delta(seq[:n])
        rows.append(DecayRow(n, dl, neg_log(dl) / n))
    return DecayDiagnostic("delta(a_1..a_n)", rows)


def theorem13_diagnostic(spec: CantorSpec, N: int) -> DecayDiagnostic:
    """Rows ``(n, l_n, -log(l_n) / 2**n)``."""
    rows = [DecayRow(n, ell(spec, n), neg_log(ell(spec, n)) / 2**n) for n in range(1, N + 1)]
    return DecayDiagnostic("-log l_n / 2^n", rows, thin=spec.thin)


def theorem15_diagnostic(spec: CantorSpec, N: int, epsilon) -> DecayDiagnostic:
    """Rows ``(n, l_n, -log(l_n) / 2**(n**(1-eps)))`` for ``0 < eps < 1``."""
    eps = as_rational(epsilon)
    if not 0 < eps < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {eps}")
    power = 1 - float(eps)
    rows = [
        DecayRow(n, ell(spec, n), neg_log(ell(spec, n)) / 2 ** (n**power))
        for n in range(1, N + 1)
    ]
    return DecayDiagnostic(f"-log l_n / 2^(n^{format_rational(1 - eps)})", rows, thin=spec.thin)
