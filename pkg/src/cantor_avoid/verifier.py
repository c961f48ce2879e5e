"""Exact certification of Property A over a parameter rectangle.

Property A for a closed set F and Cantor generation m at (x, t): some
interval of ``x + t*C_m`` lies inside a single component of F. Its truth
value can only change where an endpoint ``x + t*a`` of the Cantor copy
crosses a boundary point ``b`` of F, i.e. on a line ``x + a t = b``. So
checking one point per face of that arrangement certifies every (x, t);
the set where Property A holds is closed, which takes care of points on
the lines themselves.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

from .arrangement import (
    ParamRect,
    cut_lines,
    is_admissible,
    iter_face_samples,
    segment_samples,
)
from .cantor import CantorSpec, endpoints, generation
from .intervals import IntervalSet, as_rational, format_rational

MAX_BOUND_EXPONENT = 1 << 20


class PropertyACheck(NamedTuple):
    holds: bool
    p: int
    admissible: bool


class _Counter:
    """Integer-scaled evaluator of Property A for one (F, C_m) pair."""

    def __init__(self, kept: IntervalSet, cantor: IntervalSet):
        fden = 1
        for iv in kept:
            fden = math.lcm(fden, iv.lo.denominator, iv.hi.denominator)
        cden = 1
        for iv in cantor:
            cden = math.lcm(cden, iv.lo.denominator, iv.hi.denominator)
        self.fden = fden
        self.cden = cden
        self.flo = [iv.lo.numerator * (fden // iv.lo.denominator) for iv in kept]
        self.fhi = [iv.hi.numerator * (fden // iv.hi.denominator) for iv in kept]
        self.spans = [
            (iv.lo.numerator * (cden // iv.lo.denominator), iv.hi.numerator * (cden // iv.hi.denominator))
            for iv in cantor
        ]

    def count(self, x: Fraction, t: Fraction, stop_at: Optional[int] = None) -> int:
        """Number of Cantor-copy intervals inside one component (stops early at ``stop_at``)."""
        if not self.flo:
            return 0
        den = math.lcm(x.denominator, t.denominator)
        X = x.numerator * (den // x.denominator) * self.cden
        T = t.numerator * (den // t.denominator)
        # x + t*c = (X + T*C) / scale for an integer Cantor numerator C
        scale = den * self.cden
        fden, flo, fhi = self.fden, self.flo, self.fhi
        p = 0
        for clo, chi in self.spans:
            lo = (X + T * clo) * fden
            idx = bisect_right(flo, lo // scale) - 1
            if idx >= 0 and (X + T * chi) * fden <= fhi[idx] * scale:
                p += 1
                if stop_at is not None and p >= stop_at:
                    return p
        return p


def property_a_at(F_n: IntervalSet, spec: CantorSpec, m: int, x, t) -> PropertyACheck:
    """Does some interval of ``x + t*C_m`` lie in one component of ``F_n``?

    ``p`` is the number of such intervals. Inadmissible parameters
    (``x + tC`` not inside [0, 1]) are flagged rather than rejected.
    """
    x = as_rational(x)
    t = as_rational(t)
    if t <= 0:
        raise ValueError("property_a_at expects t > 0")
    p = _Counter(F_n, generation(spec, m)).count(x, t)
    return PropertyACheck(p > 0, p, is_admissible(x, t))


def worst_case_K(f_n: Fraction, ell_m: Fraction, B: Fraction) -> int:
    """Most f_n-cells needed to cover an interval of length at most ``B*ell_m``."""
    return math.ceil(B * ell_m / f_n) + 1


@dataclass
class Verdict:
    holds: bool
    faces_checked: int
    S_n: int
    counterexample: Optional[tuple] = None
    min_p: Optional[int] = None
    K_used: Optional[int] = None
    lines_used: int = 0
    faces_total: int = 0
    p_floor: Optional[int] = None
    p_floor_ok: Optional[bool] = None
    bound: Optional[Fraction] = None
    vacuous: bool = False

    def to_json(self) -> dict:
        out = {
            "holds": self.holds,
            "S_n": self.S_n,
            "lines_used": self.lines_used,
            "faces_checked": self.faces_checked,
            "faces_total": self.faces_total,
            "min_p": self.min_p,
            "p_floor": self.p_floor,
            "K": self.K_used,
            "bound": None if self.bound is None else format_rational(self.bound),
            "vacuous": self.vacuous,
        }
        if self.counterexample is not None:
            x, t = self.counterexample
            out["counterexample"] = {"x": format_rational(x), "t": format_rational(t)}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Verdict":
        allowed = {"holds", "S_n", "lines_used", "faces_checked", "faces_total", "min_p",
                   "p_floor", "K", "bound", "vacuous", "counterexample"}
        extra = set(data) - allowed
        if extra:
            raise ValueError(f"unknown verdict fields: {sorted(extra)}")
        ce = data.get("counterexample")
        p_floor = data.get("p_floor")
        min_p = data.get("min_p")
        return cls(
            holds=bool(data["holds"]),
            faces_checked=int(data["faces_checked"]),
            S_n=int(data["S_n"]),
            counterexample=None if ce is None else (as_rational(ce["x"]), as_rational(ce["t"])),
            min_p=min_p,
            K_used=data.get("K"),
            lines_used=int(data.get("lines_used", 0)),
            faces_total=int(data.get("faces_total", 0)),
            p_floor=p_floor,
            p_floor_ok=None if p_floor is None or min_p is None else min_p >= p_floor,
            bound=None if data.get("bound") is None else as_rational(data["bound"]),
            vacuous=bool(data.get("vacuous", False)),
        )


def grid_points(parent: IntervalSet, f: Fraction) -> list:
    """All endpoints of the f-cells subdividing ``parent``."""
    pts = []
    for iv in parent:
        j0 = iv.lo / f
        j1 = iv.hi / f
        if j0.denominator != 1 or j1.denominator != 1:
            raise ValueError("parent components are not aligned to the grid")
        pts.extend(j * f for j in range(j0.numerator, j1.numerator + 1))
    return pts


def admissible_polygon(rect: ParamRect) -> list:
    """Vertices of ``rect`` clipped to ``x >= 0`` and ``x + t <= 1``."""
    poly = [(rect.a, rect.A), (rect.b, rect.A), (rect.b, rect.B), (rect.a, rect.B)]
    for g in (lambda x, t: x, lambda x, t: 1 - x - t):
        out = []
        for p, q in zip(poly, poly[1:] + poly[:1]):
            gp, gq = g(*p), g(*q)
            if gp >= 0:
                out.append(p)
            if (gp > 0 > gq) or (gp < 0 < gq):
                s = gp / (gp - gq)
                out.append((p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])))
        poly = out
        if not poly:
            break
    dedup = []
    for v in poly:
        if v not in dedup:
            dedup.append(v)
    return dedup


def _polygon_area2(poly) -> Fraction:
    return sum(
        (p[0] * q[1] - q[0] * p[1] for p, q in zip(poly, poly[1:] + poly[:1])),
        Fraction(0),
    )


def certification_samples(lines, rect: ParamRect):
    """Face samples covering every admissible parameter in ``rect``.

    When the admissible part of the box has no interior (a segment or a
    point on its boundary) the sweep would never land in it, so that piece
    is swept as a segment instead.
    """
    poly = admissible_polygon(rect)
    if not poly:
        return
    full = rect.a < rect.b and rect.A < rect.B
    if full and _polygon_area2(poly) != 0:
        yield from iter_face_samples(lines, rect)
        return
    ends = sorted(poly)
    yield from segment_samples(lines, ends[0], ends[-1])


def _evaluate(job):
    counter_n, counter_prev, samples = job
    return [
        (counter_n.count(s.x, s.t, stop_at=1) > 0, counter_prev.count(s.x, s.t))
        for s in samples
    ]


def verify_all(F_n: IntervalSet, F_prev: IntervalSet, f_n: Fraction, spec: CantorSpec, m: int,
               rect: ParamRect, *, m_prev: Optional[int] = None, full_grid: bool = False,
               workers: int = 1, stop_at_first: bool = True, chunk: int = 2048) -> Verdict:
    """Certify Property A for ``F_n`` on every admissible (x, t) in ``rect``.

    The arrangement uses slopes from the boundary of C_m and, by default,
    intercepts at the component endpoints of ``F_n`` and ``F_prev`` (where
    the verdict and p can change). ``full_grid`` uses every f_n-grid point
    of ``F_prev`` instead. ``S_n`` always reports the full-grid line count.
    ``min_p`` counts intervals of ``x + t*C_m`` inside components of
    ``F_prev``; when ``m_prev`` is given it is compared with
    ``2**(m - m_prev)``.
    """
    cantor = generation(spec, m)
    boundary = endpoints(spec, m).points
    grid = grid_points(F_prev, f_n)
    all_lines = cut_lines(boundary, grid, rect)
    if full_grid:
        lines = all_lines
    else:
        intercepts = set(F_n.endpoints()) | set(F_prev.endpoints())
        lines = cut_lines(boundary, intercepts, rect)

    counter_n = _Counter(F_n, cantor)
    counter_prev = _Counter(F_prev, cantor)
    p_floor = None if m_prev is None else 2 ** (m - m_prev)

    verdict = Verdict(
        holds=True,
        faces_checked=0,
        S_n=len(all_lines),
        lines_used=len(lines),
        K_used=worst_case_K(f_n, cantor[0].length, rect.B),
        p_floor=p_floor,
    )
    min_p = None
    admissible_seen = 0
    total = 0
    admissible = []

    def consume(s, holds, p):
        # returns True when the scan should stop
        nonlocal min_p, admissible_seen
        admissible_seen += 1
        if p is not None and (min_p is None or p < min_p):
            min_p = p
        if not holds and verdict.holds:
            verdict.holds = False
            verdict.counterexample = (s.x, s.t)
            verdict.faces_checked = admissible_seen
            return stop_at_first
        return False

    for s in certification_samples(lines, rect):
        total += 1
        if not s.admissible:
            continue
        if workers > 1:
            admissible.append(s)
            continue
        holds = counter_n.count(s.x, s.t, stop_at=1) > 0
        if consume(s, holds, counter_prev.count(s.x, s.t)):
            break

    if workers > 1 and admissible:
        batches = [admissible[i:i + chunk] for i in range(0, len(admissible), chunk)]
        jobs = [(counter_n, counter_prev, b) for b in batches]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = False
            for b, outcomes in zip(batches, pool.map(_evaluate, jobs)):
                for s, (holds, p) in zip(b, outcomes):
                    if consume(s, holds, p):
                        done = True
                        break
                if done:
                    break

    verdict.faces_total = total
    if verdict.holds:
        verdict.faces_checked = admissible_seen
    verdict.min_p = min_p
    verdict.vacuous = admissible_seen == 0
    if p_floor is not None and min_p is not None:
        verdict.p_floor_ok = min_p >= p_floor
    return verdict


def brute_force_check(F_n: IntervalSet, spec: CantorSpec, m: int, rect: ParamRect, samples: int,
                      rng, bits: int = 30, max_draws: Optional[int] = None) -> list:
    """Random dyadic (x, t) in ``rect``; return those admissible ones where Property A fails.

    ``samples`` admissible points are checked (rejection sampling, giving up
    after ``max_draws`` draws). ``rng`` is a ``random.Random`` or an int seed.
    """
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    if not admissible_polygon(rect):
        return []
    counter = _Counter(F_n, generation(spec, m))
    scale = Fraction(1, 1 << bits)
    max_draws = max_draws if max_draws is not None else 100 * samples + 100
    violations = []
    checked = 0
    draws = 0
    while checked < samples and draws < max_draws:
        draws += 1
        x = rect.a + (rect.b - rect.a) * rng.getrandbits(bits) * scale
        t = rect.A + (rect.B - rect.A) * rng.getrandbits(bits) * scale
        if not is_admissible(x, t):
            continue
        checked += 1
        if counter.count(x, t, stop_at=1) == 0:
            violations.append((x, t))
    return violations


def bad_probability(q: Fraction, K: int, delta_phi: int, phi_n: int, ell_phi: Fraction) -> Fraction:
    """``(1 - q**K)**(2**delta_phi) * 2**(2 phi_n) / ell_phi**2``, exactly."""
    exponent = 2**delta_phi
    if exponent > MAX_BOUND_EXPONENT:
        raise OverflowError(f"2**{delta_phi} is too large an exponent for exact evaluation")
    q = as_rational(q)
    return (1 - q**K) ** exponent * Fraction(2) ** (2 * phi_n) / as_rational(ell_phi) ** 2


def bad_probability_log_terms(q: Fraction, K: int, delta_phi: int, phi_n: int, ell_phi: Fraction) -> dict:
    """Natural-log decomposition of the bound, for display.

    Keys: ``retention`` (``log(1 - q**K) * 2**delta_phi``, -inf when q = 1),
    ``count`` (``2 phi_n log 2``), ``length`` (``-2 log ell_phi``), ``total``.
    """
    base = 1 - as_rational(q) ** K
    if base == 0:
        retention = -math.inf
    else:
        retention = (math.log(base.numerator) - math.log(base.denominator)) * 2.0**delta_phi
    ell_phi = as_rational(ell_phi)
    count = 2 * phi_n * math.log(2)
    length = -2 * (math.log(ell_phi.numerator) - math.log(ell_phi.denominator))
    return {"retention": retention, "count": count, "length": length,
            "total": retention + count + length}
