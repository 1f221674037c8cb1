"""Finite representation of one regulated trajectory on ``[0, horizon]``.

A path is an affine continuous part ``x0 + drift * t`` plus finitely many
jump events.  At an event time ``t`` the left limit, the spot value and the
right limit may all differ: the jump ``delta = f(t+) - f(t-)`` is split by a
spot weight ``theta`` so that ``f(t) = f(t-) + theta * delta``.  ``theta = 1``
gives a right-continuous (cadlag) point, ``theta = 0`` a left-continuous one.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import DomainError


class Side(str, Enum):
    LEFT = "left"
    SPOT = "spot"
    RIGHT = "right"


@dataclass(frozen=True)
class JumpEvent:
    time: float
    delta: float
    theta: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.time) and math.isfinite(self.delta) and math.isfinite(self.theta)):
            raise DomainError(f"non-finite jump event {self!r}")
        if self.time <= 0.0:
            raise DomainError(f"jump time must be > 0, got {self.time}")
        if self.delta == 0.0:
            raise DomainError(f"jump size must be nonzero at t={self.time}")

    def to_json(self) -> dict[str, float]:
        return {"time": self.time, "delta": self.delta, "theta": self.theta}


def _frozen(a: Any) -> np.ndarray:
    arr = np.array(a, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


class RegulatedPath:
    """Immutable regulated path with finitely many jumps.

    Events are kept as three parallel read-only float arrays (``times``,
    ``deltas``, ``thetas``), which is what every analytic works on; the
    ``events`` property materializes them as :class:`JumpEvent` objects.
    """

    __slots__ = ("x0", "drift", "horizon", "times", "deltas", "thetas", "_cum")

    def __init__(self, x0: float = 0.0, drift: float = 0.0, horizon: float = 1.0,
                 events: Iterable[JumpEvent] = ()):
        events = list(events)
        self._init(
            x0, drift, horizon,
            [e.time for e in events], [e.delta for e in events], [e.theta for e in events],
        )

    @classmethod
    def from_arrays(cls, times: Sequence[float], deltas: Sequence[float],
                    thetas: Sequence[float] | None = None, *, x0: float = 0.0,
                    drift: float = 0.0, horizon: float = 1.0) -> "RegulatedPath":
        """Build a path straight from event arrays (``thetas`` defaults to all ones)."""
        self = cls.__new__(cls)
        if thetas is None:
            thetas = np.ones(len(times))
        self._init(x0, drift, horizon, times, deltas, thetas)
        return self

    def _init(self, x0, drift, horizon, times, deltas, thetas) -> None:
        x0, drift, horizon = float(x0), float(drift), float(horizon)
        if not (math.isfinite(x0) and math.isfinite(drift)):
            raise DomainError("x0 and drift must be finite")
        if not (math.isfinite(horizon) and horizon > 0.0):
            raise DomainError(f"horizon must be a finite positive number, got {horizon}")
        times, deltas, thetas = _frozen(times), _frozen(deltas), _frozen(thetas)
        if not (times.shape == deltas.shape == thetas.shape):
            raise DomainError("event arrays must have equal length")
        if times.size:
            if not (np.isfinite(times).all() and np.isfinite(deltas).all() and np.isfinite(thetas).all()):
                raise DomainError("event fields must be finite")
            if times[0] <= 0.0 or times[-1] > horizon:
                raise DomainError("event times must lie in (0, horizon]")
            if times.size > 1 and not (np.diff(times) > 0.0).all():
                raise DomainError("event times must be strictly increasing")
            if (deltas == 0.0).any():
                raise DomainError("jump sizes must be nonzero")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "horizon", horizon)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "deltas", deltas)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "_cum", None)

    def __setattr__(self, name, value):
        raise AttributeError("RegulatedPath is immutable")

    def __reduce__(self):
        return (_rebuild_path, (self.times, self.deltas, self.thetas, self.x0, self.drift, self.horizon))

    @property
    def events(self) -> tuple[JumpEvent, ...]:
        return tuple(
            JumpEvent(t, d, th)
            for t, d, th in zip(self.times.tolist(), self.deltas.tolist(), self.thetas.tolist())
        )

    @property
    def n_jumps(self) -> int:
        return int(self.times.size)

    def __len__(self) -> int:
        return self.n_jumps

    def with_thetas(self, thetas: Sequence[float]) -> "RegulatedPath":
        """Same jump times and sizes, different spot weights."""
        return RegulatedPath.from_arrays(self.times, self.deltas, thetas,
                                         x0=self.x0, drift=self.drift, horizon=self.horizon)

    def _cumulative(self) -> np.ndarray:
        # cum[k] = sum of the first k deltas, accumulated left to right
        if self._cum is None:
            cum = np.concatenate(([0.0], np.cumsum(self.deltas)))
            cum.setflags(write=False)
            object.__setattr__(self, "_cum", cum)
        return self._cum

    def index_of(self, t: float) -> int | None:
        """Position of the event at exactly ``t``, or None."""
        k = int(np.searchsorted(self.times, t, side="left"))
        if k < self.times.size and self.times[k] == t:
            return k
        return None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RegulatedPath):
            return NotImplemented
        return (
            (self.x0, self.drift, self.horizon) == (other.x0, other.drift, other.horizon)
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.deltas, other.deltas)
            and np.array_equal(self.thetas, other.thetas)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (f"RegulatedPath(x0={self.x0}, drift={self.drift}, horizon={self.horizon}, "
                f"n_jumps={self.n_jumps})")

    def to_json(self) -> dict[str, Any]:
        return {
            "x0": self.x0,
            "drift": self.drift,
            "horizon": self.horizon,
            "events": [
                {"time": t, "delta": d, "theta": th}
                for t, d, th in zip(self.times.tolist(), self.deltas.tolist(), self.thetas.tolist())
            ],
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "RegulatedPath":
        if not isinstance(obj, dict):
            raise DomainError("path JSON must be an object")
        try:
            events = obj.get("events", [])
            return cls.from_arrays(
                [float(e["time"]) for e in events],
                [float(e["delta"]) for e in events],
                [float(e.get("theta", 1.0)) for e in events],
                x0=float(obj.get("x0", 0.0)),
                drift=float(obj.get("drift", 0.0)),
                horizon=float(obj["horizon"]),
            )
        except DomainError:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise DomainError(f"malformed path JSON: {exc}") from exc


def _rebuild_path(times, deltas, thetas, x0, drift, horizon) -> RegulatedPath:
    return RegulatedPath.from_arrays(times, deltas, thetas, x0=x0, drift=drift, horizon=horizon)


def _check_time(path: RegulatedPath, t: float) -> None:
    if not (0.0 <= t <= path.horizon):
        raise DomainError(f"t={t} outside [0, {path.horizon}]")


def evaluate(path: RegulatedPath, t: float, side: Side | str = Side.SPOT) -> float:
    """Left limit, spot value or right limit of ``path`` at ``t``."""
    _check_time(path, t)
    side = Side(side)
    k = int(np.searchsorted(path.times, t, side="left"))
    cum = path._cumulative()
    jumps = cum[k]
    if k < path.times.size and path.times[k] == t:
        if side is Side.RIGHT:
            jumps = cum[k + 1]
        elif side is Side.SPOT:
            jumps = cum[k] + path.thetas[k] * path.deltas[k]
    return float(path.x0 + path.drift * t + jumps)


def jump_at(path: RegulatedPath, t: float) -> float:
    """Jump size f(t+) - f(t-); zero away from events and always zero at t = 0."""
    _check_time(path, t)
    k = path.index_of(t)
    return 0.0 if k is None else float(path.deltas[k])


def jump_set_eps(path: RegulatedPath, eps: float) -> list[float]:
    """Increasing list of times whose jump magnitude exceeds ``eps``."""
    if not eps >= 0.0:
        raise DomainError(f"eps must be >= 0, got {eps}")
    return path.times[np.abs(path.deltas) > eps].tolist()


# Magnitude bands: band 1 holds |delta| > 1, band m + 1 holds
# 1/(m+1) < |delta| <= 1/m, both thresholds as computed in float64.

_VECTOR_FLOOR = 1e-12


def _band_scalar(x: float) -> int:
    # largest m with fl(1/m) >= x, found by bracketing; fl(1/m) is non-increasing in m
    inv = 1.0 / x
    lo, hi = 1, max(2, 2 * int(inv)) if math.isfinite(inv) else 2**1100
    while 1 / hi >= x:
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if 1 / mid >= x:
            lo = mid
        else:
            hi = mid
    return lo + 1


def magnitude_band(delta: float) -> int:
    """Band index of a single nonzero jump size."""
    x = abs(delta)
    if x == 0.0 or not math.isfinite(x):
        raise DomainError(f"no band for jump size {delta}")
    if x > 1.0:
        return 1
    return _band_scalar(x)


def magnitude_bands(deltas: np.ndarray) -> np.ndarray:
    """Vectorised :func:`magnitude_band`, returned as int64."""
    x = np.abs(np.asarray(deltas, dtype=float))
    bands = np.ones(x.shape, dtype=np.int64)
    mid = (x <= 1.0) & (x >= _VECTOR_FLOOR)
    if mid.any():
        xm = x[mid]
        m = np.floor(1.0 / xm)
        # 1/x may be off by one ulp; nudge m onto the computed thresholds
        for _ in range(2):
            m = np.where(1.0 / m < xm, m - 1.0, m)
            m = np.where(1.0 / (m + 1.0) >= xm, m + 1.0, m)
        bands[mid] = m.astype(np.int64) + 1
    tiny = np.flatnonzero(x < _VECTOR_FLOOR)
    for i in tiny.tolist():
        bands[i] = _band_scalar(float(x[i]))
    return bands


def unit_cells(times: np.ndarray) -> np.ndarray:
    """Index n with t in (n-1, n] for each time."""
    return np.ceil(np.asarray(times, dtype=float)).astype(np.int64)


class LayeredDecomposition:
    """Partition of a path's jump times into finite cells keyed by (n, band).

    Cell (n, m) holds the jump times in (n-1, n] whose magnitude falls in
    band m.  Stored flat: ``cell_n``, ``cell_band`` and ``times`` are
    parallel arrays sorted by (n, band, time).
    """

    __slots__ = ("cell_n", "cell_band", "times", "_cells")

    def __init__(self, cell_n: np.ndarray, cell_band: np.ndarray, times: np.ndarray):
        self.cell_n = cell_n
        self.cell_band = cell_band
        self.times = times
        self._cells: dict[tuple[int, int], tuple[float, ...]] | None = None

    @property
    def cells(self) -> dict[tuple[int, int], tuple[float, ...]]:
        if self._cells is None:
            cells: dict[tuple[int, int], list[float]] = {}
            for n, m, t in zip(self.cell_n.tolist(), self.cell_band.tolist(), self.times.tolist()):
                cells.setdefault((n, m), []).append(t)
            self._cells = {k: tuple(v) for k, v in cells.items()}
        return self._cells

    def __len__(self) -> int:
        return len(self.cells)

    def to_json(self) -> list[dict[str, Any]]:
        return [{"n": n, "band": m, "times": list(ts)} for (n, m), ts in self.cells.items()]


def layered_decomposition(path: RegulatedPath) -> LayeredDecomposition:
    n = unit_cells(path.times)
    band = magnitude_bands(path.deltas)
    order = np.lexsort((path.times, band, n))
    return LayeredDecomposition(n[order], band[order], path.times[order])


def enumerate_finite_set(d: Iterable[float]) -> list[float]:
    """List a finite set of reals by repeatedly taking the least element above the last one.

    s_1 = min(D) and s_k = min(D n (s_{k-1}, inf)); a heap serves the
    successive minima.  Repeated inputs are treated as one element.
    """
    heap = [float(x) for x in d]
    if any(math.isnan(x) for x in heap):
        raise DomainError("NaN is not a member of a set of reals")
    heapq.heapify(heap)
    out: list[float] = []
    while heap:
        s = heapq.heappop(heap)
        if out and s <= out[-1]:
            continue
        out.append(s)
    return out
