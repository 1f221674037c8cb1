"""Monte-Carlo checks of the Poisson and compound Poisson laws of jump functionals.

For a compound Poisson path with rate ``lam`` and jump law ``J``, the count
N(t) of jumps with size in a zero-separated set A is Poisson with mean
``t * lam * P(J in A)``, and Z(t) = sum of g(jump) over those jumps has mean
``t * lam * E[g(J) 1_A(J)]``.  Both are checked against an ensemble
simulated from a :class:`~jumpmeasure.levy.SimConfig`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable

import numpy as np
from scipy import stats

from .borel import BorelSet
from .errors import ConfigError, DomainError
from .levy import SimConfig, nu, simulate_path
from .measure import counting_process, jump_sum_process
from .parallel import index_blocks, ordered_map

MIN_PATHS = 10_000
Z_THRESHOLD = 4.0
P_THRESHOLD = 1e-3
MIN_EXPECTED = 5.0
BLOCK = 2_000


# built-in integrands; module level so they pickle for worker processes

def g_one(x: float) -> float:
    return 1.0


def g_x(x: float) -> float:
    return x


def g_x2(x: float) -> float:
    return x * x


def g_abs(x: float) -> float:
    return abs(x)


BUILTIN_G: dict[str, Callable[[float], float]] = {"one": g_one, "x": g_x, "x2": g_x2, "abs": g_abs}


@dataclass
class SimulationReport:
    test_name: str
    estimate: float
    std_error: float
    target: float
    z_score: float
    n_samples: int
    verdict: str
    threshold: float = Z_THRESHOLD

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict[str, Any]:
        return {
            "test_name": self.test_name,
            "estimate": self.estimate,
            "std_error": self.std_error,
            "target": self.target,
            "z_score": self.z_score,
            "n_samples": self.n_samples,
            "verdict": self.verdict,
        }


@dataclass
class GofReport:
    """Poisson law check: mean, chi-square fit and increment checks.

    ``checks`` maps each sub-check to its pass flag; the verdict passes only
    when all of them do.
    """

    test_name: str
    estimate: float
    std_error: float
    target: float
    z_score: float
    n_samples: int
    bin_counts: list[int]
    expected: list[float]
    bin_labels: list[str]
    statistic: float
    dof: int
    p_value: float
    increment_correlation: float
    increment_z: float
    checks: dict[str, bool] = field(default_factory=dict)
    verdict: str = "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict[str, Any]:
        out = asdict(self)
        order = ["test_name", "estimate", "std_error", "target", "z_score", "p_value", "n_samples", "verdict"]
        return {**{k: out[k] for k in order}, **{k: v for k, v in out.items() if k not in order}}


def _z(estimate: float, target: float, se: float) -> float:
    if se > 0.0:
        return (estimate - target) / se
    return 0.0 if estimate == target else math.copysign(math.inf, estimate - target)


def _check_inputs(cfg: SimConfig, a: BorelSet, t: float) -> None:
    a.require_zero_separated()
    if not (0.0 <= t <= cfg.horizon):
        raise DomainError(f"t={t} outside [0, {cfg.horizon}]")
    if cfg.n_paths < MIN_PATHS:
        raise ConfigError(f"need at least {MIN_PATHS} paths for verification, got {cfg.n_paths}")


def poisson_bins(counts: np.ndarray, mean: float, min_expected: float = MIN_EXPECTED):
    """Observed and Poisson-expected frequencies with sparse bins merged.

    Bins run over k = 0, 1, ... with the last one open ("k+"); adjacent
    bins are merged left to right until each expected count reaches
    ``min_expected``, and an underfilled remainder joins the final bin.
    Returns (observed, expected, labels).
    """
    n = counts.size
    top = max(int(counts.max(initial=0)), int(stats.poisson.ppf(1.0 - 1e-12, mean)) if mean > 0 else 0)
    ks = np.arange(top + 1)
    observed = np.bincount(np.minimum(counts, top), minlength=top + 1)
    if mean > 0:
        expected = n * stats.poisson.pmf(ks, mean)
        expected[-1] = n * stats.poisson.sf(top - 1, mean)
    else:
        expected = np.zeros(top + 1)
        expected[0] = n
    bins_o: list[int] = []
    bins_e: list[float] = []
    labels: list[str] = []
    acc_o, acc_e, first = 0, 0.0, 0
    for k in range(top + 1):
        acc_o += int(observed[k])
        acc_e += float(expected[k])
        if acc_e >= min_expected and k < top:
            bins_o.append(acc_o)
            bins_e.append(acc_e)
            labels.append(str(first) if first == k else f"{first}-{k}")
            acc_o, acc_e, first = 0, 0.0, k + 1
    if bins_o and acc_e < min_expected:
        bins_o[-1] += acc_o
        bins_e[-1] += acc_e
        start = labels[-1].split("-")[0]
        labels[-1] = f"{start}+"
    elif acc_o or acc_e:
        bins_o.append(acc_o)
        bins_e.append(acc_e)
        labels.append(f"{first}+")
    return bins_o, bins_e, labels


def _poisson_block(args) -> np.ndarray:
    cfg, a, t, start, stop = args
    out = np.empty((stop - start, 2), dtype=np.int64)
    grid = [0.5 * t, t]
    for row, i in enumerate(range(start, stop)):
        out[row] = counting_process(simulate_path(cfg, i), a, grid)
    return out


def _compound_block(args) -> np.ndarray:
    cfg, a, g, t, start, stop = args
    out = np.empty(stop - start)
    for row, i in enumerate(range(start, stop)):
        out[row] = jump_sum_process(simulate_path(cfg, i), a, g, [t])[0]
    return out


def simulate_counts(cfg: SimConfig, a: BorelSet, t: float, workers: int = 1) -> np.ndarray:
    """Array of (N(t/2), N(t)) per path, in path order."""
    jobs = [(cfg, a, t, lo, hi) for lo, hi in index_blocks(cfg.n_paths, BLOCK)]
    return np.concatenate(ordered_map(_poisson_block, jobs, workers))


def simulate_sums(cfg: SimConfig, a: BorelSet, g: Callable[[float], float], t: float,
                  workers: int = 1) -> np.ndarray:
    """Array of Z(t) per path, in path order."""
    jobs = [(cfg, a, g, t, lo, hi) for lo, hi in index_blocks(cfg.n_paths, BLOCK)]
    return np.concatenate(ordered_map(_compound_block, jobs, workers))


def verify_poisson_law(cfg: SimConfig, a: BorelSet, t: float, workers: int = 1,
                       threshold: float = Z_THRESHOLD, alpha: float = P_THRESHOLD) -> GofReport:
    """Check that N(t) is Poisson(t * nu(A)) with stationary independent increments.

    Sub-checks: the sample mean within ``threshold`` standard errors of
    t * nu(A); chi-square goodness of fit with p >= ``alpha``; the counts on
    (0, t/2] and (t/2, t] uncorrelated (|r| <= threshold / sqrt(n)) and of
    equal mean (paired z within ``threshold``).
    """
    _check_inputs(cfg, a, t)
    rate = nu(cfg, a)
    target = t * rate
    counts = simulate_counts(cfg, a, t, workers)
    n = counts.shape[0]
    total = counts[:, 1]
    estimate = float(total.mean())
    se = math.sqrt(target / n)
    z = _z(estimate, target, se)

    observed, expected, labels = poisson_bins(total, target)
    dof = len(observed) - 1
    if dof > 0:
        o, e = np.asarray(observed, dtype=float), np.asarray(expected)
        statistic = float(((o - e) ** 2 / e).sum())
        p_value = float(stats.chi2.sf(statistic, dof))
    else:
        statistic, p_value = 0.0, 1.0

    first = counts[:, 0].astype(float)
    second = (counts[:, 1] - counts[:, 0]).astype(float)
    if first.std() > 0.0 and second.std() > 0.0:
        corr = float(np.corrcoef(first, second)[0, 1])
    else:
        corr = 0.0
    diff = second - first
    inc_z = _z(float(diff.mean()), 0.0, float(diff.std(ddof=1)) / math.sqrt(n))

    checks = {
        "mean": abs(z) <= threshold,
        "chi_square": p_value >= alpha,
        "increment_correlation": abs(corr) <= threshold / math.sqrt(n),
        "increment_means": abs(inc_z) <= threshold,
    }
    return GofReport(
        test_name="poisson_law",
        estimate=estimate, std_error=se, target=target, z_score=z, n_samples=n,
        bin_counts=observed, expected=expected, bin_labels=labels,
        statistic=statistic, dof=dof, p_value=p_value,
        increment_correlation=corr, increment_z=inc_z,
        checks=checks, verdict="pass" if all(checks.values()) else "fail",
    )


def compound_mean_target(cfg: SimConfig, a: BorelSet, g: Callable[[float], float], t: float) -> float:
    """t * lam * E[g(J) 1_A(J)], after confirming E[g(J)^2 1_A(J)] is finite."""
    a.require_zero_separated()
    cfg.law.expect(lambda x: g(x) ** 2, a)
    return t * cfg.intensity * cfg.law.expect(g, a)


def verify_compound_mean(cfg: SimConfig, a: BorelSet, g: Callable[[float], float], t: float,
                         workers: int = 1, threshold: float = Z_THRESHOLD) -> SimulationReport:
    """Check the ensemble mean of Z(t) against t * lam * E[g(J) 1_A(J)]."""
    _check_inputs(cfg, a, t)
    target = compound_mean_target(cfg, a, g, t)
    sums = simulate_sums(cfg, a, g, t, workers)
    n = sums.size
    estimate = float(sums.mean())
    se = float(sums.std(ddof=1)) / math.sqrt(n)
    z = _z(estimate, target, se)
    return SimulationReport(
        test_name="compound_mean",
        estimate=estimate, std_error=se, target=target, z_score=z, n_samples=n,
        verdict="pass" if abs(z) <= threshold else "fail", threshold=threshold,
    )
