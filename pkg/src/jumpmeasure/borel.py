"""Finite unions of real intervals, used as jump-size sets.

A set whose closure avoids 0 keeps every selected jump bounded away from
zero in magnitude; only such sets may be used to restrict jump sequences
and integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable

import numpy as np

from .errors import DomainError, NotInBStarError


@dataclass(frozen=True)
class Interval:
    lo: float
    lo_closed: bool
    hi: float
    hi_closed: bool

    def __post_init__(self) -> None:
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise DomainError("interval endpoints must not be NaN")
        # infinite endpoints are never attained
        if math.isinf(self.lo) and self.lo_closed:
            object.__setattr__(self, "lo_closed", False)
        if math.isinf(self.hi) and self.hi_closed:
            object.__setattr__(self, "hi_closed", False)
        if self.lo > self.hi or (self.lo == self.hi and not (self.lo_closed and self.hi_closed)):
            raise DomainError(f"empty interval {self!r}")

    def contains(self, x: float) -> bool:
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above and below

    def mask(self, x: np.ndarray) -> np.ndarray:
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above & below

    def to_json(self) -> dict[str, Any]:
        return {
            "lo": None if math.isinf(self.lo) else self.lo,
            "lo_closed": self.lo_closed,
            "hi": None if math.isinf(self.hi) else self.hi,
            "hi_closed": self.hi_closed,
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "Interval":
        try:
            lo = -math.inf if obj["lo"] is None else float(obj["lo"])
            hi = math.inf if obj["hi"] is None else float(obj["hi"])
            return cls(lo, bool(obj.get("lo_closed", True)), hi, bool(obj.get("hi_closed", True)))
        except DomainError:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise DomainError(f"malformed interval {obj!r}") from exc

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo}, {self.hi}{right}"


def _touching(a: Interval, b: Interval) -> bool:
    """True if a and b (a.lo <= b.lo) overlap or abut without a gap."""
    if b.lo < a.hi:
        return True
    return b.lo == a.hi and (a.hi_closed or b.lo_closed)


def _merge(a: Interval, b: Interval) -> Interval:
    if b.hi > a.hi:
        hi, hi_closed = b.hi, b.hi_closed
    elif b.hi < a.hi:
        hi, hi_closed = a.hi, a.hi_closed
    else:
        hi, hi_closed = a.hi, a.hi_closed or b.hi_closed
    lo_closed = a.lo_closed or (b.lo == a.lo and b.lo_closed)
    return Interval(a.lo, lo_closed, hi, hi_closed)


class BorelSet:
    """A finite union of intervals of the real line.

    Input intervals may overlap or come in any order; they are sorted and
    merged on construction, so ``intervals`` is always sorted and pairwise
    disjoint.

    >>> a = BorelSet.union(BorelSet.ray_below(-1.0), BorelSet.ray_above(1.0))
    >>> a.contains(-1.0), a.contains(0.5)
    (True, False)
    >>> a.separation_radius()
    1.0
    """

    __slots__ = ("intervals",)

    def __init__(self, intervals: Iterable[Interval] = ()):
        ivs = sorted(intervals, key=lambda iv: (iv.lo, not iv.lo_closed))
        merged: list[Interval] = []
        for iv in ivs:
            if merged and _touching(merged[-1], iv):
                merged[-1] = _merge(merged[-1], iv)
            else:
                merged.append(iv)
        self.intervals: tuple[Interval, ...] = tuple(merged)

    # constructors

    @classmethod
    def empty(cls) -> "BorelSet":
        return cls(())

    @classmethod
    def real_line(cls) -> "BorelSet":
        return cls([Interval(-math.inf, False, math.inf, False)])

    @classmethod
    def interval(cls, lo: float, hi: float, lo_closed: bool = True, hi_closed: bool = True) -> "BorelSet":
        return cls([Interval(float(lo), lo_closed, float(hi), hi_closed)])

    @classmethod
    def ray_above(cls, lo: float, closed: bool = True) -> "BorelSet":
        """The set [lo, +inf), or (lo, +inf) when ``closed`` is false."""
        return cls([Interval(float(lo), closed, math.inf, False)])

    @classmethod
    def ray_below(cls, hi: float, closed: bool = True) -> "BorelSet":
        """The set (-inf, hi], or (-inf, hi) when ``closed`` is false."""
        return cls([Interval(-math.inf, False, float(hi), closed)])

    @classmethod
    def symmetric_tails(cls, eps: float) -> "BorelSet":
        """The set (-inf, -eps] u [eps, +inf)."""
        return cls.union(cls.ray_below(-eps), cls.ray_above(eps))

    @classmethod
    def singleton(cls, x: float) -> "BorelSet":
        return cls([Interval(float(x), True, float(x), True)])

    @classmethod
    def union(cls, *sets: "BorelSet") -> "BorelSet":
        return cls(iv for s in sets for iv in s.intervals)

    # queries

    def contains(self, x: float) -> bool:
        return any(iv.contains(x) for iv in self.intervals)

    __contains__ = contains

    def contains_many(self, x: np.ndarray) -> np.ndarray:
        """Vectorised membership over an array of reals."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for iv in self.intervals:
            out |= iv.mask(x)
        return out

    def separation_radius(self) -> float:
        """Distance from 0 to the closure of the set (+inf for the empty set)."""
        radius = math.inf
        for iv in self.intervals:
            if iv.lo <= 0.0 <= iv.hi:
                return 0.0
            radius = min(radius, iv.lo if iv.lo > 0.0 else -iv.hi)
        return radius

    def is_zero_separated(self) -> bool:
        return self.separation_radius() > 0.0

    def require_zero_separated(self) -> None:
        if not self.is_zero_separated():
            raise NotInBStarError(f"0 lies in the closure of {self}")

    def is_empty(self) -> bool:
        return not self.intervals

    # serialization

    def to_json(self) -> dict[str, Any]:
        return {"intervals": [iv.to_json() for iv in self.intervals]}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "BorelSet":
        if not isinstance(obj, dict) or not isinstance(obj.get("intervals"), list):
            raise DomainError("set JSON must be an object with an 'intervals' list")
        return cls(Interval.from_json(iv) for iv in obj["intervals"])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BorelSet) and self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(self.intervals)

    def __repr__(self) -> str:
        return f"BorelSet({list(self.intervals)!r})"

    def __str__(self) -> str:
        if not self.intervals:
            return "{}"
        return " u ".join(str(iv) for iv in self.intervals)
