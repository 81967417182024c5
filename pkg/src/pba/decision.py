"""Interval-valued expected utilities and decision rules over them.

Expectations against the two bounding step functions of an outcome box give
an interval of expected utilities per action.  For an increasing utility
the stochastically smaller bound yields the smaller expectation, so rather
than naming which step produced which endpoint, the interval is returned
ordered as [min, max].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import NonMonotoneUtility, TooFewActions
from .interval import Interval
from .propagate import EmpiricalPBox


@dataclass(frozen=True)
class UtilityInterval:
    action: str
    interval: Interval

    @property
    def lo(self) -> float:
        return self.interval.lo

    @property
    def hi(self) -> float:
        return self.interval.hi


class _Indeterminate:
    """No strict ordering exists among the undominated actions."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Indeterminate"


INDETERMINATE = _Indeterminate()


@dataclass(frozen=True)
class Dominance:
    pass


@dataclass(frozen=True)
class Pessimist:
    pass


@dataclass(frozen=True)
class Optimist:
    pass


@dataclass(frozen=True)
class Hurwicz:
    """Scores alpha * lower + (1 - alpha) * upper; alpha weights pessimism."""

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")


DecisionRule = Union[Dominance, Pessimist, Optimist, Hurwicz]


def expected_interval(
    e: EmpiricalPBox,
    utility: Callable[[float], float] | None = None,
    action: str = "",
) -> UtilityInterval:
    """Stieltjes sums of a monotone utility against both bounding steps.

    The identity utility gives the interval of expected outcome values.
    Utilities must be non-decreasing on the outcome support; for
    non-monotone maps the CDF bounds no longer bound the expectation, so
    they are rejected.
    """
    up_y, up_c = e.upper_steps()
    lo_y, lo_c = e.lower_steps()
    if utility is None:
        u_up, u_lo = up_y, lo_y
    else:
        all_y = np.unique(np.concatenate([up_y, lo_y]))
        u_all = np.array([float(utility(y)) for y in all_y])
        if np.any(np.diff(u_all) < -1e-12 * max(1.0, float(np.abs(u_all).max()))):
            raise NonMonotoneUtility("utility map decreases on the outcome support")
        u_up = np.array([float(utility(y)) for y in up_y])
        u_lo = np.array([float(utility(y)) for y in lo_y])
    masses_up = np.diff(np.concatenate([[0.0], up_c]))
    masses_lo = np.diff(np.concatenate([[0.0], lo_c]))
    against_upper = float(masses_up @ u_up)
    against_lower = float(masses_lo @ u_lo)
    lo, hi = sorted((against_upper, against_lower))
    return UtilityInterval(action, Interval(lo, hi))


def _score_choice(us: Sequence[UtilityInterval], score: Callable[[UtilityInterval], float]):
    best = max(score(u) for u in us)
    return frozenset(u.action for u in us if score(u) == best)


def choose(us: Sequence[UtilityInterval], rule: DecisionRule):
    """Optimal action set under the given rule, or INDETERMINATE.

    Dominance: action a beats b iff both interval endpoints of a are
    strictly larger; the undominated set is returned when it is a single
    action and INDETERMINATE otherwise (no strict ordering exists among
    several maximal elements).  The scoring rules return every maximizer on
    ties.
    """
    us = list(us)
    if len(us) < 2:
        raise TooFewActions(f"need at least two actions, got {len(us)}")
    if isinstance(rule, Dominance):
        def beaten(u: UtilityInterval) -> bool:
            return any(v.lo > u.lo and v.hi > u.hi for v in us if v is not u)

        maximal = [u for u in us if not beaten(u)]
        if len(maximal) == 1:
            return frozenset({maximal[0].action})
        return INDETERMINATE
    if isinstance(rule, Pessimist):
        return _score_choice(us, lambda u: u.lo)
    if isinstance(rule, Optimist):
        return _score_choice(us, lambda u: u.hi)
    if isinstance(rule, Hurwicz):
        alpha = rule.alpha
        return _score_choice(us, lambda u: alpha * u.lo + (1.0 - alpha) * u.hi)
    raise TypeError(f"unknown decision rule {rule!r}")
