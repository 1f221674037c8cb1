"""Integer-valued jump measure of a path and integrals against it.

The jump measure puts unit mass on each point ``(t, jump(t))`` with
``t > 0``.  Sets of the time-by-size plane are finite unions of rectangles
``[t_lo, t_hi] x A``; integrals are taken over ``[0, t] x A`` with ``A``
zero separated, which keeps every count finite.

Sums run in ascending jump time with plain left-to-right float addition
starting from 0.0, so the exhaustion route and the event-scan route agree
bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .borel import BorelSet
from .errors import DomainError, NumericError
from .path import RegulatedPath, jump_at
from .thin import exhaust_restricted

SpaceTimeFn = Callable[[float, float], float]
SizeFn = Callable[[float], float]


@dataclass(frozen=True)
class Rectangle:
    t_lo: float
    t_hi: float
    space: BorelSet

    def __post_init__(self) -> None:
        if not (0.0 <= self.t_lo <= self.t_hi):
            raise DomainError(f"time part [{self.t_lo}, {self.t_hi}] needs 0 <= t_lo <= t_hi")

    def mask(self, times: np.ndarray, sizes: np.ndarray) -> np.ndarray:
        return (times >= self.t_lo) & (times <= self.t_hi) & self.space.contains_many(sizes)

    def to_json(self) -> dict[str, Any]:
        return {"t_lo": self.t_lo, "t_hi": self.t_hi, "set": self.space.to_json()}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "Rectangle":
        try:
            return cls(float(obj.get("t_lo", 0.0)), float(obj["t_hi"]), BorelSet.from_json(obj["set"]))
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"malformed rectangle: {exc}") from exc


@dataclass(frozen=True)
class ProductSet:
    """Finite union of rectangles; overlaps are allowed and counted once."""

    rectangles: tuple[Rectangle, ...]
    id: str = "B"

    @classmethod
    def rectangle(cls, t_hi: float, space: BorelSet, t_lo: float = 0.0, id: str = "B") -> "ProductSet":
        return cls((Rectangle(float(t_lo), float(t_hi), space),), id)

    @property
    def t_max(self) -> float:
        return max((r.t_hi for r in self.rectangles), default=0.0)

    def to_json(self) -> dict[str, Any]:
        return {"id": self.id, "rectangles": [r.to_json() for r in self.rectangles]}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "ProductSet":
        if not isinstance(obj, dict):
            raise DomainError("product set JSON must be an object")
        if "rectangles" in obj:
            if not isinstance(obj["rectangles"], list):
                raise DomainError("'rectangles' must be a list")
            rects = tuple(Rectangle.from_json(r) for r in obj["rectangles"])
        else:
            rects = (Rectangle.from_json(obj),)
        return cls(rects, str(obj.get("id", "B")))


@dataclass(frozen=True)
class Integral:
    """Value of an integral over [0, t] x A with its bound certificate.

    ``certificate`` is the largest |f| over the integrated jump points, so
    the integral of |f| is at most ``certificate * count``.
    """

    value: float
    certificate: float
    count: int


def measure(path: RegulatedPath, b: ProductSet) -> int:
    """Number of jumps (t, jump(t)), t > 0, lying in ``b``.

    The event arrays are already the time-ordered global exhaustion of the
    path, so the count runs over them directly.
    """
    if not path.n_jumps:
        return 0
    hit = np.zeros(path.n_jumps, dtype=bool)
    for rect in b.rectangles:
        hit |= rect.mask(path.times, path.deltas)
    hit &= path.times > 0.0
    return int(np.count_nonzero(hit))


def _ordered_sum(values: Sequence[float]) -> np.ndarray:
    # running sums starting from 0.0, strictly left to right
    return np.cumsum(np.concatenate(([0.0], np.asarray(values, dtype=float))))


def _check_t(path: RegulatedPath, t: float) -> None:
    if not (0.0 <= t <= path.horizon):
        raise DomainError(f"t={t} outside [0, {path.horizon}]")


def _restricted_points(path: RegulatedPath, a: BorelSet) -> tuple[list[float], list[float]]:
    times = list(exhaust_restricted(path, a).finite_times)
    return times, [jump_at(path, s) for s in times]


def integrate(path: RegulatedPath, f: SpaceTimeFn, t: float, a: BorelSet) -> Integral:
    """Integral of f(s, x) over [0, t] x a against the jump measure.

    Evaluated as the sum of f(S_n, jump(S_n)) over the restricted
    exhaustion with S_n <= t.
    """
    a.require_zero_separated()
    _check_t(path, t)
    times, sizes = _restricted_points(path, a)
    values = []
    for s, x in zip(times, sizes):
        if s > t:
            break
        v = float(f(s, x))
        if not math.isfinite(v):
            raise NumericError(f"integrand is not finite at (s={s}, x={x})")
        values.append(v)
    cert = max((abs(v) for v in values), default=0.0)
    return Integral(float(_ordered_sum(values)[-1]), cert, len(values))


def integrate_by_scan(path: RegulatedPath, f: SpaceTimeFn, t: float, a: BorelSet) -> float:
    """Reference route: scan the event list directly, no exhaustion involved."""
    a.require_zero_separated()
    _check_t(path, t)
    total = 0.0
    for e in path.events:
        if 0.0 < e.time <= t and a.contains(e.delta):
            v = float(f(e.time, e.delta))
            if not math.isfinite(v):
                raise NumericError(f"integrand is not finite at (s={e.time}, x={e.delta})")
            total += v
    return total


def _check_grid(path: RegulatedPath, grid: Sequence[float]) -> np.ndarray:
    g = np.asarray(grid, dtype=float).reshape(-1)
    if g.size and (g[0] < 0.0 or g[-1] > path.horizon or (np.diff(g) < 0.0).any()):
        raise DomainError("grid must be non-decreasing within [0, horizon]")
    if np.isnan(g).any():
        raise DomainError("grid contains NaN")
    return g


def counting_process(path: RegulatedPath, a: BorelSet, grid: Sequence[float]) -> list[int]:
    """N(t) = number of restricted exhaustion times S_n <= t, at each grid time."""
    a.require_zero_separated()
    g = _check_grid(path, grid)
    seq = np.array(exhaust_restricted(path, a).finite_times, dtype=float)
    return np.searchsorted(seq, g, side="right").tolist()


def jump_sum_process(path: RegulatedPath, a: BorelSet, g: SizeFn, grid: Sequence[float]) -> list[float]:
    """Z(t) = sum of g(jump(S_n)) over S_n <= t, at each grid time."""
    a.require_zero_separated()
    grid_arr = _check_grid(path, grid)
    times, sizes = _restricted_points(path, a)
    if times and grid_arr.size:
        # only jumps up to the last grid time are ever summed
        times = times[: int(np.searchsorted(times, grid_arr[-1], side="right"))]
    values = []
    for s, x in zip(times, sizes):
        v = float(g(x))
        if not math.isfinite(v):
            raise NumericError(f"integrand is not finite at x={x}")
        values.append(v)
    cum = _ordered_sum(values)
    counts = np.searchsorted(np.array(times, dtype=float), grid_arr, side="right")
    return cum[counts].tolist()


CSV_HEADER = ["path_id", "t", "set_id", "value", "certificate"]


def csv_row(path_id: int, t: float, set_id: str, value: float | int, certificate: float | None) -> list:
    return [path_id, t, set_id, value, "" if certificate is None else certificate]

