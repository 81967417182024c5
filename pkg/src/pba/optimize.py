"""Deterministic box-constrained global optimization.

A self-contained DIRECT-style optimizer: normalize the box to a unit cube,
evaluate centers, trisect potentially optimal rectangles along their longest
sides, and select candidates by the lower convex hull of (diameter, value)
pairs.  Derivative-free and fully deterministic, so repeated runs on the
same inputs give identical results.  Maximization runs on the negated
objective.  A vertex-enumeration oracle covers coordinate-monotone
objectives exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import DimensionTooLarge, NonFiniteObjective
from .interval import Interval

MIN = "min"
MAX = "max"


@dataclass(frozen=True)
class SearchBox:
    """Bounds plus the evaluation budget and relative diameter tolerance."""

    bounds: tuple[Interval, ...]
    budget: int = 2000
    tol: float = 1e-6

    def __post_init__(self):
        if len(self.bounds) == 0:
            raise ValueError("search box needs at least one dimension")
        if self.budget < 1:
            raise ValueError(f"budget must be at least 1, got {self.budget}")
        if not 0 < self.tol < 1:
            raise ValueError(f"tol must be in (0, 1), got {self.tol}")


@dataclass(frozen=True)
class OptResult:
    point: tuple[float, ...]
    value: float
    converged: bool
    evaluations: int


class _Rect:
    __slots__ = ("center", "levels", "f")

    def __init__(self, center: tuple[float, ...], levels: tuple[int, ...], f: float):
        self.center = center
        self.levels = levels
        self.f = f

    def diameter(self) -> float:
        return 0.5 * math.sqrt(sum(9.0 ** (-l) for l in self.levels))


def _potentially_optimal(rects: list[_Rect]) -> list[_Rect]:
    """Rectangles on the lower-right convex hull of (diameter, value)."""
    classes: dict[tuple[int, ...], _Rect] = {}
    for r in rects:
        key = tuple(sorted(r.levels))
        cur = classes.get(key)
        if cur is None or r.f < cur.f:
            classes[key] = r
    reps = sorted(classes.values(), key=lambda r: r.diameter())
    f_min = min(r.f for r in reps)
    out = []
    for j, rj in enumerate(reps):
        dj, fj = rj.diameter(), rj.f
        k_lo, k_hi = 0.0, math.inf
        ok = True
        for i, ri in enumerate(reps):
            if i == j:
                continue
            di, fi = ri.diameter(), ri.f
            if di > dj:
                k_hi = min(k_hi, (fi - fj) / (di - dj))
            elif di < dj:
                k_lo = max(k_lo, (fj - fi) / (dj - di))
            elif fi < fj:
                ok = False
                break
        if not ok or k_lo > k_hi:
            continue
        # With the most favorable slope the rect must still undercut f_min.
        if math.isinf(k_hi) or fj - k_hi * dj <= f_min + 1e-13 * max(1.0, abs(f_min)):
            out.append(rj)
    return out


def _direct_minimize(
    f: Callable[[tuple[float, ...]], float], dim: int, budget: int, tol: float
) -> tuple[tuple[float, ...], float, bool, int]:
    evals = 0

    def evaluate(point: tuple[float, ...]) -> float:
        nonlocal evals
        evals += 1
        return f(point)

    center = tuple(0.5 for _ in range(dim))
    root = _Rect(center, tuple(0 for _ in range(dim)), evaluate(center))
    rects = [root]
    best = root
    d0 = root.diameter()

    while True:
        if best.diameter() < tol * d0:
            return best.center, best.f, True, evals
        if evals + 2 > budget:
            return best.center, best.f, False, evals

        selected = _potentially_optimal(rects)
        progressed = False
        for rect in selected:
            lmin = min(rect.levels)
            dims = [i for i, l in enumerate(rect.levels) if l == lmin]
            delta = 3.0 ** (-(lmin + 1))
            sampled = []
            for i in dims:
                if evals + 2 > budget:
                    break
                plus = list(rect.center)
                plus[i] += delta
                minus = list(rect.center)
                minus[i] -= delta
                f_plus = evaluate(tuple(plus))
                f_minus = evaluate(tuple(minus))
                sampled.append((min(f_plus, f_minus), i, tuple(plus), f_plus, tuple(minus), f_minus))
            if not sampled:
                continue
            progressed = True
            sampled.sort(key=lambda s: (s[0], s[1]))
            levels = list(rect.levels)
            for _, i, p_plus, f_plus, p_minus, f_minus in sampled:
                levels[i] += 1
                for point, value in ((p_plus, f_plus), (p_minus, f_minus)):
                    child = _Rect(point, tuple(levels), value)
                    rects.append(child)
                    if value < best.f:
                        best = child
            rect.levels = tuple(levels)  # center keeps the shrunken rect
        if not progressed:
            return best.center, best.f, False, evals
        # Rect shapes changed; re-resolve which rect holds the best value so
        # the convergence test sees its current diameter.
        best = min(rects, key=lambda r: (r.f, r.diameter()))


def optimize_box(
    objective: Callable[[Sequence[float]], float], box: SearchBox, sense: str = MIN
) -> OptResult:
    """Global minimum or maximum of ``objective`` over ``box``.

    Degenerate (zero-width) coordinates are pinned and excluded from the
    search.  The converged flag reports whether the best rectangle shrank
    below ``tol`` times the box diameter before the budget ran out; a spent
    budget is reported through the flag, not as an error.
    """
    if sense not in (MIN, MAX):
        raise ValueError(f"sense must be {MIN!r} or {MAX!r}, got {sense!r}")
    sign = 1.0 if sense == MIN else -1.0
    lows = [iv.lo for iv in box.bounds]
    widths = [iv.width for iv in box.bounds]
    active = [i for i, w in enumerate(widths) if w > 0.0]

    def denormalize(unit_point: Sequence[float]) -> tuple[float, ...]:
        full = list(lows)
        for axis, u in zip(active, unit_point):
            full[axis] = lows[axis] + u * widths[axis]
        return tuple(full)

    def wrapped(unit_point: Sequence[float]) -> float:
        point = denormalize(unit_point)
        value = float(objective(point))
        if not math.isfinite(value):
            raise NonFiniteObjective(f"objective returned {value}", point=point)
        return sign * value

    if not active:
        point = tuple(lows)
        value = float(objective(point))
        if not math.isfinite(value):
            raise NonFiniteObjective(f"objective returned {value}", point=point)
        return OptResult(point, value, True, 1)

    unit_best, f_best, converged, evals = _direct_minimize(
        wrapped, len(active), box.budget, box.tol
    )
    return OptResult(denormalize(unit_best), sign * f_best, converged, evals)


def vertex_extrema(
    objective: Callable[[Sequence[float]], float], box: SearchBox
) -> tuple[float, float]:
    """Extremes of ``objective`` over all box vertices.

    Exact for objectives monotone in every coordinate; 2**dim evaluations.
    """
    dim = len(box.bounds)
    if 2**dim > box.budget:
        raise DimensionTooLarge(f"2**{dim} vertex evaluations exceed budget {box.budget}")
    lo = math.inf
    hi = -math.inf
    for corner in itertools.product(*((iv.lo, iv.hi) for iv in box.bounds)):
        value = float(objective(corner))
        if not math.isfinite(value):
            raise NonFiniteObjective(f"objective returned {value}", point=corner)
        lo = min(lo, value)
        hi = max(hi, value)
    return lo, hi
