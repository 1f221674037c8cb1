"""Exhaustion of a path's jump set by increasing sequences of jump times.

Two kinds of sequence are produced per path:

* global: every jump time, strictly increasing, obtained by flattening the
  layered (unit interval x magnitude band) cells and relabelling by time;
* restricted to a jump-size set A: the successive times of jumps with size
  in A, padded with +inf.  A must be zero separated.

``math.inf`` is the padding sentinel and serializes as the string ``"inf"``.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from .borel import BorelSet
from .errors import DomainError
from .path import RegulatedPath, jump_at, layered_decomposition

INF = math.inf
GLOBAL = "global"
RESTRICTED = "restricted"


@dataclass(frozen=True)
class StoppingSequence:
    """Per-path sequence of jump times; ``set`` is None for the global kind.

    The constructor does not enforce monotonicity so that malformed
    sequences can be represented and rejected by
    :func:`check_disjoint_exhaustion`.
    """

    times: tuple[float, ...]
    kind: str = GLOBAL
    set: BorelSet | None = None

    def __post_init__(self) -> None:
        if self.kind not in (GLOBAL, RESTRICTED):
            raise DomainError(f"unknown sequence kind {self.kind!r}")
        if (self.kind == RESTRICTED) != (self.set is not None):
            raise DomainError("restricted sequences carry a set, global ones do not")
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))

    @property
    def finite_times(self) -> tuple[float, ...]:
        return tuple(t for t in self.times if t != INF)

    def __len__(self) -> int:
        return len(self.times)

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "set": None if self.set is None else self.set.to_json(),
            "times": ["inf" if t == INF else t for t in self.times],
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "StoppingSequence":
        try:
            times = [INF if t == "inf" else float(t) for t in obj["times"]]
            a = None if obj.get("set") is None else BorelSet.from_json(obj["set"])
            return cls(tuple(times), obj.get("kind", GLOBAL), a)
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed stopping sequence: {exc}") from exc


def _pad(times: Sequence[float], length: int) -> tuple[float, ...]:
    times = list(times[:length])
    return tuple(times + [INF] * (length - len(times)))


def _resolve_length(path: RegulatedPath, length: int | None) -> int:
    if length is None:
        return path.n_jumps
    if length < 0:
        raise DomainError(f"sequence length must be >= 0, got {length}")
    return length


def first_hitting_times(path: RegulatedPath, a: BorelSet, length: int | None = None) -> list[float]:
    """The iterated hitting times T_1, T_2, ... of jumps with size in ``a``.

    T_1 = inf{t > 0 : jump(t) in a} and T_n = inf{t > T_{n-1} : jump(t) in a},
    with inf of the empty set equal to +inf.  No correction is applied.
    """
    a.require_zero_separated()
    length = _resolve_length(path, length)
    times = path.times.tolist()
    hits = a.contains_many(path.deltas).tolist()
    k = len(times)
    out: list[float] = []
    prev, i = 0.0, 0
    while len(out) < length:
        i = bisect_right(times, prev, i)
        while i < k and not hits[i]:
            i += 1
        if i == k:
            break
        prev = times[i]
        out.append(prev)
    return out + [INF] * (length - len(out))


def exhaust_restricted(path: RegulatedPath, a: BorelSet, length: int | None = None) -> StoppingSequence:
    """Restricted exhaustion via the hitting-time recursion.

    Each hitting time is kept when the jump there lies in ``a`` and sent to
    +inf otherwise.
    """
    out = []
    for t in first_hitting_times(path, a, length):
        if t != INF and a.contains(jump_at(path, t)):
            out.append(t)
        else:
            out.append(INF)
    return StoppingSequence(tuple(out), RESTRICTED, a)


def exhaust_restricted_filter(path: RegulatedPath, a: BorelSet, length: int | None = None) -> StoppingSequence:
    """Restricted exhaustion by filtering the events on ``a`` and sorting."""
    a.require_zero_separated()
    length = _resolve_length(path, length)
    selected = np.sort(path.times[a.contains_many(path.deltas)]).tolist()
    return StoppingSequence(_pad(selected, length), RESTRICTED, a)


def exhaust_global(path: RegulatedPath) -> StoppingSequence:
    """All jump times in increasing order, built from the layered cells."""
    cells = layered_decomposition(path)
    # cells.times lists cell by cell in (n, band) order; relabel by time
    relabelled = np.sort(cells.times, kind="stable")
    return StoppingSequence(tuple(relabelled.tolist()), GLOBAL)


def check_disjoint_exhaustion(path: RegulatedPath, seq: StoppingSequence) -> bool:
    """True iff the finite entries are distinct and exactly cover the target jump set.

    The target is every jump time (global kind) or the times of jumps with
    size in ``seq.set`` (restricted kind).  Padding must trail the finite
    entries.
    """
    times = list(seq.times)
    finite = [t for t in times if t != INF]
    if times[: len(finite)] != finite:
        return False
    if any(math.isnan(t) for t in finite) or len(set(finite)) != len(finite):
        return False
    if seq.kind == GLOBAL:
        target = set(path.times.tolist())
    else:
        target = {t for t, d in zip(path.times.tolist(), path.deltas.tolist()) if seq.set.contains(d)}
    return set(finite) == target


def indicator_identity_holds(path: RegulatedPath, a: BorelSet, grid: Iterable[float],
                          length: int | None = None) -> bool:
    """Check 1{S_n <= t} == 1{T_n <= t} * 1_a(jump at T_n) for all n and grid times t.

    T_n are the raw hitting times and S_n the restricted exhaustion.
    """
    hitting = first_hitting_times(path, a, length)
    restricted = exhaust_restricted(path, a, length).times
    in_a = [tn != INF and a.contains(jump_at(path, tn)) for tn in hitting]
    for t in grid:
        for tn, sn, hit in zip(hitting, restricted, in_a):
            if (sn <= t) != ((tn <= t) and hit):
                return False
    return True
