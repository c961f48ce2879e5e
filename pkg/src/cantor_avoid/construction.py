"""Generation-by-generation random construction of the null set F.

F_0 = [0, 1]. F_n is obtained by cutting F_{n-1} into cells of length
f_n (an exact divisor of f_{n-1}) and keeping each cell independently with
probability q_n. A candidate is accepted when its measure is at most
2 q_n m(F_{n-1}) and Property A is certified on the whole parameter box.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .arrangement import ParamRect
from .cantor import CantorSpec, ell, endpoints
from .intervals import Interval, IntervalSet, as_rational
from .rng import RETENTION, CounterStream
from .verifier import Verdict, bad_probability, verify_all

log = logging.getLogger(__name__)

DEFAULT_CELL_CAP = 2_000_000
DEFAULT_RETRY_CAP = 64
DEFAULT_DEPTH_CAP = 12
NINE_TENTHS = Fraction(9, 10)
NINE_TWENTIETHS = Fraction(9, 20)


class ConstructionError(RuntimeError):
    pass


class ResourceLimitError(ConstructionError):
    """A grid or depth cap was hit."""


class ConstructionFailure(ConstructionError):
    """No candidate passed within the retry cap.

    Carries the best candidate seen and the (x, t) where it failed.
    """

    def __init__(self, n: int, attempts: int, best: Optional["GenerationState"],
                 verdict: Optional[Verdict], partial: Optional["ConstructionTrace"] = None):
        self.n = n
        self.attempts = attempts
        self.best = best
        self.verdict = verdict
        self.partial = partial
        where = ""
        if verdict is not None and verdict.counterexample is not None:
            x, t = verdict.counterexample
            where = f"; counterexample x={x}, t={t}"
        super().__init__(f"generation {n}: no candidate accepted in {attempts} attempts{where}")

    @property
    def counterexample(self):
        return None if self.verdict is None else self.verdict.counterexample


def _iroot(value: int, k: int) -> int:
    """Largest integer r with r**k <= value."""
    if value < 0 or k < 1:
        raise ValueError("need value >= 0 and k >= 1")
    if value < 2:
        return value
    r = int(round(value ** (1.0 / k))) if value.bit_length() < 1000 else 1 << (value.bit_length() // k)
    # Newton from above, then settle
    r = max(r, 1)
    while r**k > value:
        r = ((k - 1) * r + value // r ** (k - 1)) // k
    while (r + 1) ** k <= value:
        r += 1
    return r


def phi(n: int, eta) -> int:
    """``floor(n ** (1 + eta))`` for rational ``eta = p/q > 0``, computed with integers."""
    eta = as_rational(eta)
    if eta <= 0:
        raise ValueError("eta must be positive")
    if n < 0:
        raise ValueError("n must be >= 0")
    p, q = eta.numerator, eta.denominator
    # m <= n^((p+q)/q)  <=>  m^q <= n^(p+q)
    return _iroot(n ** (p + q), q)


@dataclass(frozen=True)
class PhiSchedule:
    """Either ``floor(n**(1+eta))`` or a linear override ``mul*n + add``."""

    eta: Optional[Fraction] = None
    mul: Optional[int] = None
    add: int = 0

    def __post_init__(self):
        if self.eta is not None:
            object.__setattr__(self, "eta", as_rational(self.eta))
            if self.eta <= 0:
                raise ValueError("eta must be positive")
        elif self.mul is None or self.mul < 1 or self.add < 0:
            raise ValueError("override needs mul >= 1 and add >= 0")

    @property
    def is_override(self) -> bool:
        return self.eta is None

    def __call__(self, n: int) -> int:
        if self.eta is not None:
            return phi(n, self.eta)
        return self.mul * n + self.add

    @classmethod
    def parse_override(cls, text: str) -> "PhiSchedule":
        """Parse ``"n+1"``, ``"2*n"``, ``"3n+2"`` and the like."""
        s = text.replace(" ", "")
        head, plus, tail = s.partition("+")
        if not head.endswith("n"):
            raise ValueError(f"phi override must look like 'k*n+c', got {text!r}")
        coef = head[:-1].rstrip("*")
        mul = int(coef) if coef else 1
        add = int(tail) if plus else 0
        return cls(mul=mul, add=add)

    def to_json(self):
        if self.eta is not None:
            return {"eta": f"{self.eta.numerator}/{self.eta.denominator}"}
        return {"override": {"mul": self.mul, "add": self.add}}


@dataclass(frozen=True)
class QSchedule:
    """Retention probabilities; ``isqrt`` is ``1/(4 + isqrt(n))``."""

    kind: str = "isqrt"
    value: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind == "constant":
            v = as_rational(self.value)
            object.__setattr__(self, "value", v)
            if not 0 < v < Fraction(1, 4):
                raise ValueError(f"constant q must lie in (0, 1/4), got {v}")
        elif self.kind != "isqrt":
            raise ValueError(f"unknown q schedule {self.kind!r}")

    def __call__(self, n: int) -> Fraction:
        if self.kind == "constant":
            return self.value
        return Fraction(1, 4 + math.isqrt(n))

    def to_json(self):
        if self.kind == "constant":
            return {"kind": "constant", "value": f"{self.value.numerator}/{self.value.denominator}"}
        return {"kind": "isqrt"}


@dataclass(frozen=True)
class ConstructionParams:
    rect: ParamRect
    phi: PhiSchedule
    depth: int
    seed: int
    retry_cap: int = DEFAULT_RETRY_CAP
    q_schedule: QSchedule = QSchedule()
    cell_cap: int = DEFAULT_CELL_CAP
    depth_cap: int = DEFAULT_DEPTH_CAP

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.depth > self.depth_cap:
            raise ResourceLimitError(f"depth {self.depth} exceeds the cap {self.depth_cap}")
        if self.retry_cap < 1:
            raise ValueError("retry cap must be >= 1")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def eta(self) -> Optional[Fraction]:
        return self.phi.eta


def q_value(n: int, params: ConstructionParams) -> Fraction:
    if n < 1:
        raise ValueError("q_n is defined for n >= 1")
    return params.q_schedule(n)


def next_subdivision(f_prev, A, ell_phi) -> tuple:
    """Smallest k >= 1 with ``f_prev / k <= (9/10) A ell_phi``; returns ``(k, f_prev / k)``."""
    f_prev, A, ell_phi = as_rational(f_prev), as_rational(A), as_rational(ell_phi)
    if min(f_prev, A, ell_phi) <= 0:
        raise ValueError("f_prev, A and ell must be positive")
    cap = NINE_TENTHS * A * ell_phi
    k = max(1, math.ceil(f_prev / cap))
    return k, f_prev / k


@dataclass
class GenerationState:
    n: int
    phi_n: int
    k: int
    f_n: Fraction
    q_n: Optional[Fraction]
    kept: IntervalSet
    measure: Fraction
    attempts: int

    def cell_ranges(self) -> list:
        """Kept cells as half-open index ranges ``[j0, j1)`` of the f_n grid."""
        out = []
        for iv in self.kept:
            j0, j1 = iv.lo / self.f_n, iv.hi / self.f_n
            out.append([j0.numerator, j1.numerator])
        return out


@dataclass
class ConstructionTrace:
    spec: CantorSpec
    params: ConstructionParams
    states: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    bound_values: list = field(default_factory=list)

    @property
    def outside_asymptotic_regime(self) -> bool:
        return self.params.phi.is_override


def initial_state() -> GenerationState:
    return GenerationState(
        n=0, phi_n=0, k=1, f_n=Fraction(1), q_n=None,
        kept=IntervalSet([(Fraction(0), Fraction(1))]), measure=Fraction(1), attempts=1,
    )


def subdivision_for(prev: GenerationState, params: ConstructionParams, spec: CantorSpec, n: int):
    m = params.phi(n)
    k, f = next_subdivision(prev.f_n, params.rect.A, ell(spec, m))
    return m, k, f


def candidate_next(prev: GenerationState, params: ConstructionParams, spec: CantorSpec,
                   attempt: int = 0, q: Optional[Fraction] = None) -> GenerationState:
    """Re-grid F_{n-1} at f_n and keep each cell with probability q_n.

    The draw for cell j comes from the stream keyed by (seed, n, attempt, j).
    ``q`` overrides the schedule (0 and 1 are allowed here for testing).
    """
    n = prev.n + 1
    m, k, f = subdivision_for(prev, params, spec, n)
    q_n = params.q_schedule(n) if q is None else as_rational(q)
    cells = prev.measure / f
    if cells > params.cell_cap:
        raise ResourceLimitError(f"generation {n} needs {cells} cells (cap {params.cell_cap})")
    stream = CounterStream(params.seed, RETENTION)
    kept = []
    for iv in prev.kept:
        j0 = (iv.lo / f).numerator
        j1 = (iv.hi / f).numerator
        run_start = None
        for j in range(j0, j1):
            if stream.bernoulli(q_n, n, attempt, j):
                if run_start is None:
                    run_start = j
            elif run_start is not None:
                kept.append(Interval(run_start * f, j * f))
                run_start = None
        if run_start is not None:
            kept.append(Interval(run_start * f, j1 * f))
    kept_set = IntervalSet(kept)
    return GenerationState(
        n=n, phi_n=m, k=k, f_n=f, q_n=q_n, kept=kept_set,
        measure=kept_set.measure(), attempts=attempt + 1,
    )


def certify(state: GenerationState, prev: GenerationState, params: ConstructionParams,
            spec: CantorSpec, workers: int = 1, stop_at_first: bool = True) -> Verdict:
    verdict = verify_all(
        state.kept, prev.kept, state.f_n, spec, state.phi_n, params.rect,
        m_prev=prev.phi_n if state.n > 0 else None, workers=workers, stop_at_first=stop_at_first,
    )
    if state.n >= 1:
        verdict.bound = generation_bound(state, prev, spec, verdict.K_used)
    return verdict


def generation_bound(state: GenerationState, prev: GenerationState, spec: CantorSpec, K: int):
    try:
        return bad_probability(state.q_n, K, state.phi_n - prev.phi_n, state.phi_n, ell(spec, state.phi_n))
    except OverflowError:
        return None


def spacing_ok(state: GenerationState, params: ConstructionParams, spec: CantorSpec) -> bool:
    """Distinct points of ``x + t*boundary(C_phi)`` are more than f_n apart for every t >= A."""
    pts = endpoints(spec, state.phi_n).points
    gap = min(b - a for a, b in zip(pts, pts[1:]))
    return params.rect.A * gap > state.f_n


def accept_or_retry(prev: GenerationState, params: ConstructionParams, spec: CantorSpec,
                    workers: int = 1) -> tuple:
    """First candidate with ``m(F_n) <= 2 q_n m(F_{n-1})`` and certified Property A.

    Returns ``(state, verdict)``; raises ConstructionFailure after ``retry_cap`` attempts.
    """
    n = prev.n + 1
    best = None
    best_verdict = None
    best_key = None
    for attempt in range(params.retry_cap):
        cand = candidate_next(prev, params, spec, attempt)
        measure_ok = cand.measure <= 2 * cand.q_n * prev.measure
        if not measure_ok:
            log.debug("gen %d attempt %d: measure %s over Markov bound", n, attempt, cand.measure)
            key = (0, 0)
            verdict = None
        else:
            verdict = certify(cand, prev, params, spec, workers=workers)
            if verdict.holds:
                log.info("gen %d accepted after %d attempts", n, attempt + 1)
                return cand, verdict
            key = (1, verdict.faces_checked)
            log.debug("gen %d attempt %d: Property A fails at %s", n, attempt, verdict.counterexample)
        if best_key is None or key > best_key:
            best, best_verdict, best_key = cand, verdict, key
    raise ConstructionFailure(n, params.retry_cap, best, best_verdict)


def run(spec: CantorSpec, params: ConstructionParams, workers: int = 1) -> ConstructionTrace:
    trace = ConstructionTrace(spec, params)
    state = initial_state()
    state.phi_n = params.phi(0)
    verdict = certify(state, state, params, spec, workers=workers)
    trace.states.append(state)
    trace.verdicts.append(verdict)
    trace.bound_values.append(None)
    for _ in range(params.depth):
        try:
            state, verdict = accept_or_retry(state, params, spec, workers=workers)
        except ConstructionFailure as exc:
            exc.partial = trace
            raise
        trace.states.append(state)
        trace.verdicts.append(verdict)
        trace.bound_values.append(verdict.bound)
    return trace


@dataclass
class GenerationCheck:
    """Outcome of re-checking one stored generation."""

    n: int
    holds: bool
    problems: list = field(default_factory=list)
    verdict: Optional[Verdict] = None
    violations: list = field(default_factory=list)
    samples: int = 0

    @property
    def counterexample(self):
        if self.verdict is not None and self.verdict.counterexample is not None:
            return self.verdict.counterexample
        return self.violations[0] if self.violations else None


def recertify_trace(trace: ConstructionTrace, mode: str = "arrangement", samples: int = 10_000,
                    sample_seed: int = 0, workers: int = 1) -> list:
    """Re-derive every check for a stored trace; returns one GenerationCheck per generation.

    Structural checks (subdivision rule, nesting, Markov bound) run in both
    modes. ``arrangement`` then re-runs the exact face certification;
    ``sample`` runs the random brute-force oracle with ``samples`` points.
    """
    from .verifier import brute_force_check

    if mode not in ("arrangement", "sample"):
        raise ValueError(f"unknown mode {mode!r}")
    spec, params = trace.spec, trace.params
    checks = []
    prev = None
    for state in trace.states:
        problems = []
        if state.phi_n != params.phi(state.n):
            problems.append(f"phi_n {state.phi_n} != schedule value {params.phi(state.n)}")
        if prev is None:
            if state.kept != IntervalSet([(Fraction(0), Fraction(1))]) or state.f_n != 1:
                problems.append("F_0 must be [0, 1] with f_0 = 1")
            parent = state
        else:
            parent = prev
            m, k, f = subdivision_for(prev, params, spec, state.n)
            if (k, f) != (state.k, state.f_n):
                problems.append(f"subdivision (k={state.k}, f={state.f_n}) != rule (k={k}, f={f})")
            if state.q_n != params.q_schedule(state.n):
                problems.append(f"q_n {state.q_n} != schedule value {params.q_schedule(state.n)}")
            if not state.kept.issubset(prev.kept):
                problems.append("F_n is not contained in F_{n-1}")
            if state.q_n is not None and state.measure > 2 * state.q_n * prev.measure:
                problems.append("measure exceeds 2 q_n m(F_{n-1})")
        check = GenerationCheck(state.n, holds=not problems, problems=problems)
        if mode == "arrangement":
            try:
                verdict = certify(state, parent, params, spec, workers=workers)
            except ValueError as exc:
                check.problems.append(f"cannot certify: {exc}")
                verdict = None
            check.verdict = verdict
            if verdict is not None:
                if not verdict.holds:
                    check.problems.append("Property A fails")
                if verdict.p_floor_ok is False:
                    check.problems.append(f"min p {verdict.min_p} < {verdict.p_floor}")
        else:
            viol = brute_force_check(state.kept, spec, state.phi_n, params.rect, samples,
                                     sample_seed + state.n)
            check.violations = viol
            check.samples = samples
            if viol:
                check.problems.append(f"{len(viol)} sampled (x, t) violate Property A")
        check.holds = not check.problems
        checks.append(check)
        prev = state
    return checks
