"""JSON persistence for construction traces.

Rationals are written as ``"p/q"`` strings. Kept cells of generation n are
stored as half-open index ranges ``[j0, j1)`` on the f_n grid, so a
generation costs one pair of integers per maximal interval.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .arrangement import ParamRect
from .cantor import CantorSpec, SpecError
from .construction import (
    ConstructionParams,
    ConstructionTrace,
    GenerationState,
    PhiSchedule,
    QSchedule,
)
from .intervals import Interval, IntervalSet, as_rational, format_rational
from .verifier import Verdict

FORMAT = "cantor-avoid-trace/1"


class TraceFormatError(ValueError):
    """The trace file is malformed or internally inconsistent."""


def _rat(q):
    return None if q is None else format_rational(q)


def params_to_json(params: ConstructionParams) -> dict:
    return {
        "rect": params.rect.to_json(),
        "phi": params.phi.to_json(),
        "q_schedule": params.q_schedule.to_json(),
        "depth": params.depth,
        "seed": params.seed,
        "retry_cap": params.retry_cap,
        "cell_cap": params.cell_cap,
        "depth_cap": params.depth_cap,
    }


def state_to_json(state: GenerationState, verdict: Verdict, bound) -> dict:
    return {
        "n": state.n,
        "phi_n": state.phi_n,
        "k": state.k,
        "f_n": _rat(state.f_n),
        "q_n": _rat(state.q_n),
        "kept": state.cell_ranges(),
        "measure": _rat(state.measure),
        "attempts": state.attempts,
        "verdict": verdict.to_json(),
        "bound": _rat(bound),
    }


def trace_to_json(trace: ConstructionTrace) -> dict:
    return {
        "format": FORMAT,
        "spec": trace.spec.to_json(),
        "params": params_to_json(trace.params),
        "outside_asymptotic_regime": trace.outside_asymptotic_regime,
        "generations": [
            state_to_json(s, v, b)
            for s, v, b in zip(trace.states, trace.verdicts, trace.bound_values)
        ],
    }


def dumps(trace: ConstructionTrace) -> str:
    return json.dumps(trace_to_json(trace), indent=2) + "\n"


def save(trace: ConstructionTrace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(trace))


def _expect_keys(obj, keys, where):
    if not isinstance(obj, dict):
        raise TraceFormatError(f"{where}: expected an object")
    if set(obj) != set(keys):
        raise TraceFormatError(f"{where}: expected keys {sorted(keys)}, got {sorted(obj)}")


def params_from_json(data) -> ConstructionParams:
    _expect_keys(data, ["rect", "phi", "q_schedule", "depth", "seed", "retry_cap",
                        "cell_cap", "depth_cap"], "params")
    phi_data = data["phi"]
    if "eta" in phi_data:
        phi = PhiSchedule(eta=as_rational(phi_data["eta"]))
    else:
        ov = phi_data["override"]
        phi = PhiSchedule(mul=int(ov["mul"]), add=int(ov["add"]))
    q = data["q_schedule"]
    q_schedule = QSchedule(q["kind"], as_rational(q["value"]) if "value" in q else None)
    return ConstructionParams(
        rect=ParamRect(*data["rect"]),
        phi=phi,
        depth=int(data["depth"]),
        seed=int(data["seed"]),
        retry_cap=int(data["retry_cap"]),
        q_schedule=q_schedule,
        cell_cap=int(data["cell_cap"]),
        depth_cap=int(data["depth_cap"]),
    )


def kept_from_ranges(ranges, f: Fraction) -> IntervalSet:
    ivs = []
    for pair in ranges:
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(j, int) for j in pair)):
            raise TraceFormatError(f"bad cell range {pair!r}")
        j0, j1 = pair
        if j0 >= j1:
            raise TraceFormatError(f"empty cell range {pair!r}")
        ivs.append(Interval(j0 * f, j1 * f))
    kept = IntervalSet(ivs)
    if len(kept) != len(ivs):
        raise TraceFormatError("cell ranges overlap or touch")
    return kept


def state_from_json(data) -> tuple:
    _expect_keys(data, ["n", "phi_n", "k", "f_n", "q_n", "kept", "measure", "attempts",
                        "verdict", "bound"], f"generation {data.get('n') if isinstance(data, dict) else '?'}")
    f = as_rational(data["f_n"])
    kept = kept_from_ranges(data["kept"], f)
    measure = as_rational(data["measure"])
    if kept.measure() != measure:
        raise TraceFormatError(f"generation {data['n']}: recorded measure {measure} != {kept.measure()}")
    state = GenerationState(
        n=int(data["n"]),
        phi_n=int(data["phi_n"]),
        k=int(data["k"]),
        f_n=f,
        q_n=None if data["q_n"] is None else as_rational(data["q_n"]),
        kept=kept,
        measure=measure,
        attempts=int(data["attempts"]),
    )
    verdict = Verdict.from_json(data["verdict"])
    bound = None if data["bound"] is None else as_rational(data["bound"])
    return state, verdict, bound


def trace_from_json(data) -> ConstructionTrace:
    try:
        _expect_keys(data, ["format", "spec", "params", "outside_asymptotic_regime", "generations"], "trace")
        if data["format"] != FORMAT:
            raise TraceFormatError(f"unsupported format {data['format']!r}")
        trace = ConstructionTrace(CantorSpec.from_json(data["spec"]), params_from_json(data["params"]))
        for g in data["generations"]:
            state, verdict, bound = state_from_json(g)
            trace.states.append(state)
            trace.verdicts.append(verdict)
            trace.bound_values.append(bound)
    except TraceFormatError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError, SpecError) as exc:
        raise TraceFormatError(f"malformed trace: {exc}") from exc
    if [s.n for s in trace.states] != list(range(len(trace.states))):
        raise TraceFormatError("generations must be numbered 0, 1, 2, ...")
    return trace


def loads(text: str) -> ConstructionTrace:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"not valid JSON: {exc}") from exc
    return trace_from_json(data)


def load(path) -> ConstructionTrace:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
