"""Built-in decision models and the black-box model contract.

Models are pure callables from a named-parameter mapping to a scalar
outcome.  Two families ship here: a four-state continuous-time cohort model
whose outcome is expected residence time outside the absorbing state, and a
generic discrete-time cohort cost-effectiveness evaluator with a synthetic
demonstration specification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import RowSumViolation, SingularSystem

WTP_PER_QALY = 30_000.0  # willingness-to-pay threshold, money per QALY
ANNUAL_DISCOUNT_RATE = 0.035

_ROW_TOL = 1e-10


# ---------------------------------------------------------------------------
# Four-state continuous-time cohort model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FourStateRates:
    """Transition rates per year of the four-state chain; S4 absorbs.

    c1: S1->S2, c2: S1->S3, c3: S1->S4, c4: S2->S3, c5: S2->S4, c6: S3->S4.
    """

    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float

    def __post_init__(self):
        for name in ("c1", "c2", "c3", "c4", "c5", "c6"):
            if getattr(self, name) < 0:
                raise ValueError(f"rate {name} must be non-negative")


def life_expectancy(rates: FourStateRates) -> float:
    """Expected total time in S1-S3 starting from S1.

    Solves the transient linear system -Q_T t = 1 exactly: the generator
    restricted to {S1, S2, S3} is upper triangular, so the expected
    absorption times come from back substitution over the states reachable
    from S1.  States that cannot be reached do not constrain the solution.
    """
    r = rates
    exit1 = r.c1 + r.c2 + r.c3
    if exit1 <= 0:
        raise SingularSystem("no transition out of S1; residence time diverges")
    reaches_s2 = r.c1 > 0
    reaches_s3 = r.c2 > 0 or (reaches_s2 and r.c4 > 0)
    t3 = 0.0
    if reaches_s3:
        if r.c6 <= 0:
            raise SingularSystem("S3 reachable but has no exit; residence time diverges")
        t3 = 1.0 / r.c6
    t2 = 0.0
    if reaches_s2:
        exit2 = r.c4 + r.c5
        if exit2 <= 0:
            raise SingularSystem("S2 reachable but has no exit; residence time diverges")
        t2 = (1.0 + r.c4 * t3) / exit2
    return (1.0 + r.c1 * t2 + r.c2 * t3) / exit1


def _life_expectancy_model(params: Mapping[str, float]) -> float:
    return life_expectancy(
        FourStateRates(
            params["c1"], params["c2"], params["c3"], params["c4"], params["c5"], params["c6"]
        )
    )


# ---------------------------------------------------------------------------
# Generic discrete-time cohort cost-effectiveness evaluator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CohortCeaSpec:
    """A cohort Markov model with per-state annual reward rates.

    ``transition_builder`` maps named parameters to a (states x states)
    row-stochastic matrix.  Costs and utilities are annual rates weighted by
    state occupancy; rewards accrue at cycle starts with no half-cycle
    correction, discounted by (1 + annual rate)**(-t * cycle_length).
    """

    states: tuple[str, ...]
    absorbing: tuple[bool, ...]
    transition_builder: Callable[[Mapping[str, float]], np.ndarray]
    costs: tuple[float, ...]
    utilities: tuple[float, ...]
    cycle_length_years: float
    horizon_cycles: int
    discount_rate_annual: float
    initial: tuple[float, ...]

    def __post_init__(self):
        n = len(self.states)
        if not (len(self.absorbing) == len(self.costs) == len(self.utilities) == len(self.initial) == n):
            raise ValueError("per-state fields must all have one entry per state")
        if self.horizon_cycles < 1:
            raise ValueError("horizon must be at least one cycle")
        if self.cycle_length_years <= 0:
            raise ValueError("cycle length must be positive")
        if any(not 0.0 <= u <= 1.0 for u in self.utilities):
            raise ValueError("utilities must lie in [0, 1]")
        if abs(math.fsum(self.initial) - 1.0) > _ROW_TOL:
            raise ValueError("initial distribution must sum to 1")


def _check_matrix(spec: CohortCeaSpec, matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    n = len(spec.states)
    if matrix.shape != (n, n):
        raise RowSumViolation(f"transition matrix must be {n}x{n}, got {matrix.shape}")
    for i in range(n):
        row_sum = float(matrix[i].sum())
        if abs(row_sum - 1.0) > _ROW_TOL or matrix[i].min() < -_ROW_TOL:
            raise RowSumViolation(
                f"row for state {spec.states[i]!r} sums to {row_sum}", cycle=0, state=i
            )
        if spec.absorbing[i]:
            identity = np.zeros(n)
            identity[i] = 1.0
            if np.abs(matrix[i] - identity).max() > _ROW_TOL:
                raise RowSumViolation(
                    f"absorbing state {spec.states[i]!r} row is not identity", cycle=0, state=i
                )
    return matrix


def cohort_trace(spec: CohortCeaSpec, params: Mapping[str, float]) -> np.ndarray:
    """State occupancy by cycle: row 0 is the initial distribution."""
    matrix = _check_matrix(spec, spec.transition_builder(params))
    trace = np.empty((spec.horizon_cycles + 1, len(spec.states)))
    trace[0] = spec.initial
    for t in range(spec.horizon_cycles):
        trace[t + 1] = trace[t] @ matrix
    drift = np.abs(trace.sum(axis=1) - 1.0)
    if drift.max() > _ROW_TOL:
        t = int(np.argmax(drift > _ROW_TOL))
        raise RowSumViolation(
            f"occupancy at cycle {t} sums to {trace[t].sum()}", cycle=t, state=None
        )
    return trace


def discounted_outcomes(trace: np.ndarray, spec: CohortCeaSpec) -> tuple[float, float]:
    """Discounted (total cost, total QALY) over the horizon."""
    cycles = np.arange(spec.horizon_cycles)
    discount = (1.0 + spec.discount_rate_annual) ** (-cycles * spec.cycle_length_years)
    occupancy = trace[: spec.horizon_cycles]
    cost_per_cycle = occupancy @ np.asarray(spec.costs) * spec.cycle_length_years
    qaly_per_cycle = occupancy @ np.asarray(spec.utilities) * spec.cycle_length_years
    return float(discount @ cost_per_cycle), float(discount @ qaly_per_cycle)


def inmb(
    cost_a: float, qaly_a: float, cost_b: float, qaly_b: float, wtp: float = WTP_PER_QALY
) -> float:
    """Incremental net monetary benefit of strategy A over strategy B."""
    if wtp < 0:
        raise ValueError(f"willingness to pay must be non-negative, got {wtp}")
    return wtp * (qaly_a - qaly_b) - (cost_a - cost_b)


# ---------------------------------------------------------------------------
# Config-driven transition matrices
# ---------------------------------------------------------------------------


def build_transition_matrix(
    states: Sequence[str],
    absorbing: Sequence[bool],
    transitions: Sequence[Mapping],
    params: Mapping[str, float],
) -> np.ndarray:
    """Assemble a row-stochastic matrix from declarative transition entries.

    Each entry has ``from``, ``to`` and one of ``value`` (a constant),
    ``param`` (a named parameter) or ``product`` (a list of names/constants
    multiplied together).  Staying probabilities are the row remainders;
    absorbing states take identity rows.
    """
    index = {name: i for i, name in enumerate(states)}
    n = len(states)
    matrix = np.zeros((n, n))
    for entry in transitions:
        src, dst = index[entry["from"]], index[entry["to"]]
        if "value" in entry:
            p = float(entry["value"])
        elif "param" in entry:
            p = float(params[entry["param"]])
        else:
            p = 1.0
            for factor in entry["product"]:
                p *= float(params[factor]) if isinstance(factor, str) else float(factor)
        matrix[src, dst] += p
    for i in range(n):
        if absorbing[i]:
            matrix[i] = 0.0
            matrix[i, i] = 1.0
        else:
            matrix[i, i] += 1.0 - matrix[i].sum()
    return matrix


# ---------------------------------------------------------------------------
# Demonstration cost-effectiveness model
# ---------------------------------------------------------------------------

DEMO_STATES = ("well", "minor", "serious", "dead")
DEMO_TRANSITIONS = (
    {"from": "well", "to": "minor", "product": ["p_minor", "rr"]},
    {"from": "well", "to": "serious", "product": ["p_serious", "rr"]},
    {"from": "well", "to": "dead", "param": "p_die"},
    {"from": "minor", "to": "well", "value": 0.15},
    {"from": "minor", "to": "serious", "param": "p_minor_serious"},
    {"from": "minor", "to": "dead", "param": "p_die"},
    {"from": "serious", "to": "minor", "value": 0.05},
    {"from": "serious", "to": "dead", "param": "p_die_serious"},
)
DEMO_PARAM_NAMES = frozenset(
    {"p_minor", "p_serious", "p_die", "p_minor_serious", "p_die_serious", "rr", "device_cost"}
)


def demo_cea_spec() -> CohortCeaSpec:
    """Synthetic device-evaluation cohort model, monthly cycles for 10 years."""
    absorbing = (False, False, False, True)

    def builder(params: Mapping[str, float]) -> np.ndarray:
        return build_transition_matrix(DEMO_STATES, absorbing, DEMO_TRANSITIONS, params)

    return CohortCeaSpec(
        states=DEMO_STATES,
        absorbing=absorbing,
        transition_builder=builder,
        costs=(300.0, 2_400.0, 24_000.0, 0.0),
        utilities=(0.95, 0.75, 0.40, 0.0),
        cycle_length_years=1.0 / 12.0,
        horizon_cycles=120,
        discount_rate_annual=ANNUAL_DISCOUNT_RATE,
        initial=(1.0, 0.0, 0.0, 0.0),
    )


_DEMO_SPEC = demo_cea_spec()
_DEMO_KEYS = ("p_minor", "p_serious", "p_die", "p_minor_serious", "p_die_serious")


@lru_cache(maxsize=65536)
def _demo_outcomes(key: tuple[float, ...], rr: float, device_cost: float):
    params = dict(zip(_DEMO_KEYS, key))
    params["rr"] = rr
    trace = cohort_trace(_DEMO_SPEC, params)
    cost, qaly = discounted_outcomes(trace, _DEMO_SPEC)
    return cost + device_cost, qaly


def demo_cea_nmb(params: Mapping[str, float]) -> float:
    """Net monetary benefit of one strategy at the fixed threshold."""
    key = tuple(params[k] for k in _DEMO_KEYS)
    cost, qaly = _demo_outcomes(key, params["rr"], params["device_cost"])
    return WTP_PER_QALY * qaly - cost


def demo_cea_inmb(params: Mapping[str, float]) -> float:
    """INMB of the device strategy over the conventional comparator."""
    key = tuple(params[k] for k in _DEMO_KEYS)
    cost_a, qaly_a = _demo_outcomes(key, params["rr"], params["device_cost"])
    cost_b, qaly_b = _demo_outcomes(key, 1.0, 0.0)
    return inmb(cost_a, qaly_a, cost_b, qaly_b, WTP_PER_QALY)


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegisteredModel:
    fn: Callable[[Mapping[str, float]], float]
    param_names: frozenset[str]


REGISTRY: dict[str, RegisteredModel] = {
    "four_state_life_expectancy": RegisteredModel(
        _life_expectancy_model, frozenset({"c1", "c2", "c3", "c4", "c5", "c6"})
    ),
    "demo_cea_nmb": RegisteredModel(demo_cea_nmb, DEMO_PARAM_NAMES),
    "demo_cea_inmb": RegisteredModel(demo_cea_inmb, DEMO_PARAM_NAMES),
}
