"""Randomised oracle-equivalence checks, run by ``jumpmeasure selftest``.

Each check pits the constructive route against a brute-force one on random
paths and sets drawn from a seeded generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .borel import BorelSet, Interval
from .measure import ProductSet, integrate, integrate_by_scan, measure
from .path import RegulatedPath, enumerate_finite_set, layered_decomposition
from .thin import (
    check_disjoint_exhaustion, exhaust_global, exhaust_restricted, exhaust_restricted_filter,
    indicator_identity_holds,
)


def random_path(rng: np.random.Generator, max_jumps: int = 50, horizon: float | None = None) -> RegulatedPath:
    """Random path with jump magnitudes spread over several bands and cells."""
    if horizon is None:
        horizon = float(rng.uniform(0.5, 8.0))
    k = int(rng.integers(0, max_jumps + 1))
    times = np.unique(rng.uniform(0.0, horizon, k))
    times = times[times > 0.0]
    sizes = 10.0 ** rng.uniform(-2.5, 1.0, times.size)
    deltas = np.where(rng.random(times.size) < 0.5, -sizes, sizes)
    thetas = rng.uniform(-1.0, 2.0, times.size)
    return RegulatedPath.from_arrays(times, deltas, thetas, x0=float(rng.normal()),
                                     drift=float(rng.normal()), horizon=horizon)


def random_zero_separated_set(rng: np.random.Generator) -> BorelSet:
    """Union of 1-3 random intervals or rays, none touching a neighbourhood of 0."""
    ivs = []
    for _ in range(int(rng.integers(1, 4))):
        sign = 1.0 if rng.random() < 0.5 else -1.0
        a = float(10.0 ** rng.uniform(-2.5, 1.0))
        if rng.random() < 0.3:
            lo, hi = a, math.inf
        else:
            lo, hi = a, a * float(rng.uniform(1.0, 10.0))
        if sign < 0:
            lo, hi = -hi, -lo
        lo_closed, hi_closed = bool(rng.random() < 0.5), bool(rng.random() < 0.5)
        if lo == hi:
            lo_closed = hi_closed = True
        ivs.append(Interval(lo, lo_closed, hi, hi_closed))
    return BorelSet(ivs)


def random_integrand(rng: np.random.Generator) -> Callable[[float, float], float]:
    c = float(rng.normal())
    choices = [
        lambda s, x: 1.0,
        lambda s, x: x,
        lambda s, x: x * x,
        lambda s, x: c * s + x,
        lambda s, x: math.sin(s * x),
    ]
    return choices[int(rng.integers(len(choices)))]


@dataclass
class CheckResult:
    name: str
    cases: int
    failures: int

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.cases - self.failures}/{self.cases} cases"


def _partition_ok(path: RegulatedPath) -> bool:
    cells = layered_decomposition(path).cells
    flat = [t for ts in cells.values() for t in ts]
    if len(flat) != len(set(flat)) or sorted(flat) != path.times.tolist():
        return False
    for (n, band), ts in cells.items():
        for t in ts:
            x = abs(float(path.deltas[path.index_of(t)]))
            in_band = x > 1.0 if band == 1 else 1 / band < x <= 1 / (band - 1)
            if not (n - 1 < t <= n and in_band):
                return False
    return True


def check_exhaustion(rng, cases: int) -> CheckResult:
    bad = 0
    for _ in range(cases):
        path = random_path(rng)
        seq = exhaust_global(path)
        ok = (
            list(seq.times) == sorted(path.times.tolist())
            and check_disjoint_exhaustion(path, seq)
            and _partition_ok(path)
            and list(seq.times) == enumerate_finite_set(layered_decomposition(path).times.tolist())
        )
        bad += not ok
    return CheckResult("global exhaustion = sorted jump times, exact partition", cases, bad)


def check_restricted(rng, cases: int) -> CheckResult:
    bad = 0
    for _ in range(cases):
        path = random_path(rng)
        a = random_zero_separated_set(rng)
        length = path.n_jumps + int(rng.integers(0, 3))
        rec = exhaust_restricted(path, a, length)
        flt = exhaust_restricted_filter(path, a, length)
        grid = rng.uniform(0.0, path.horizon, 10)
        ok = rec == flt and check_disjoint_exhaustion(path, rec) and indicator_identity_holds(path, a, grid, length)
        bad += not ok
    return CheckResult("hitting-time recursion = filter-sort, indicator identity", cases, bad)


def check_integration(rng, cases: int) -> CheckResult:
    bad = 0
    for _ in range(cases):
        path = random_path(rng)
        a = random_zero_separated_set(rng)
        f = random_integrand(rng)
        t = float(rng.uniform(0.0, path.horizon))
        res = integrate(path, f, t, a)
        ref = integrate_by_scan(path, f, t, a)
        count = measure(path, ProductSet.rectangle(t, a))
        abs_total = integrate(path, lambda s, x: abs(f(s, x)), t, a).value
        ok = (
            res.value == ref
            and math.copysign(1.0, res.value) == math.copysign(1.0, ref)
            and res.count == count
            and abs_total <= res.certificate * count
        )
        bad += not ok
    return CheckResult("exhaustion integral = event-scan integral, bound certificate", cases, bad)


def check_enumeration(rng, cases: int) -> CheckResult:
    bad = 0
    for _ in range(cases):
        d = set(rng.normal(size=int(rng.integers(0, 200))).tolist())
        bad += enumerate_finite_set(d) != sorted(d)
    return CheckResult("finite-set enumeration = comparison sort", cases, bad)


def run(seed: int = 0, cases: int = 500) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        check_exhaustion(rng, cases),
        check_restricted(rng, cases),
        check_integration(rng, cases),
        check_enumeration(rng, cases),
    ]
