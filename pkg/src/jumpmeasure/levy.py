"""Seeded compound Poisson path generators and their intensity measure.

Every path index ``i`` owns its own random streams, derived from
``(seed, i)`` through :class:`numpy.random.SeedSequence` spawn keys and fed
to a counter-based Philox generator.  Path ``i`` can therefore be rebuilt in
isolation and the output never depends on how indices are split between
workers.  Stream 0 drives arrival times and jump sizes, stream 1 the spot
weights, so a cadlag path and its ladlag twin share times and sizes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Any, Callable, Iterator

import numpy as np
from scipy import integrate as spi

from .borel import BorelSet, Interval
from .errors import ConfigError, NumericError
from .path import RegulatedPath

SEED_BOUND = 2**64
JUMP_STREAM, THETA_STREAM = 0, 1


def path_rng(seed: int, index: int, stream: int = JUMP_STREAM) -> np.random.Generator:
    """Independent generator for one (seed, path index, stream) triple."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index, stream))))


def _finite(*xs: float) -> bool:
    return all(isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x) for x in xs)


# jump laws

class JumpLaw:
    """Law of a single jump size.  Subclasses are immutable dataclasses."""

    kind = ""

    def sample(self, rng: np.random.Generator) -> float:
        raise NotImplementedError

    def prob(self, a: BorelSet) -> float:
        """P(J in a)."""
        raise NotImplementedError

    def expect(self, g: Callable[[float], float], a: BorelSet) -> float:
        """E[g(J) 1_a(J)]."""
        raise NotImplementedError

    def to_json(self) -> dict[str, Any]:
        raise NotImplementedError

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "JumpLaw":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ConfigError("jump law must be an object with a 'kind'")
        kind = obj["kind"]
        try:
            if kind == "normal":
                return NormalLaw(float(obj["mu"]), float(obj["sigma"]))
            if kind == "two_point":
                return TwoPointLaw(float(obj["x1"]), float(obj["p1"]), float(obj["x2"]))
            if kind == "exponential_symmetric":
                return SymmetricExponentialLaw(float(obj["rate"]))
            if kind == "fixed_list":
                return FixedListLaw(tuple(float(v) for v in obj["values"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed {kind} law: {exc}") from exc
        raise ConfigError(f"unknown jump law kind {kind!r}")


class _ContinuousLaw(JumpLaw):
    def _draw(self, rng: np.random.Generator) -> float:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator) -> float:
        x = self._draw(rng)
        while x == 0.0:
            x = self._draw(rng)
        return x

    def pdf(self, x: float) -> float:
        raise NotImplementedError

    def _interval_prob(self, iv: Interval) -> float:
        raise NotImplementedError

    def prob(self, a: BorelSet) -> float:
        return sum(self._interval_prob(iv) for iv in a.intervals)

    def expect(self, g: Callable[[float], float], a: BorelSet) -> float:
        total = 0.0
        for iv in a.intervals:
            if iv.lo == iv.hi:
                continue
            total += _quad(lambda x: g(x) * self.pdf(x), iv.lo, iv.hi)
        return total


def _quad(fn: Callable[[float], float], lo: float, hi: float) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("error", spi.IntegrationWarning)
        try:
            value, err = spi.quad(fn, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)
        except spi.IntegrationWarning as exc:
            raise NumericError(f"quadrature on [{lo}, {hi}] did not converge: {exc}") from exc
    if not (math.isfinite(value) and math.isfinite(err)):
        raise NumericError(f"quadrature on [{lo}, {hi}] is not finite")
    return value


def _upper_tail(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


@dataclass(frozen=True)
class NormalLaw(_ContinuousLaw):
    mu: float = 0.0
    sigma: float = 1.0
    kind = "normal"

    def __post_init__(self) -> None:
        if not _finite(self.mu, self.sigma) or self.sigma <= 0.0:
            raise ConfigError(f"normal law needs finite mu and sigma > 0, got {self}")

    def _draw(self, rng):
        return float(rng.normal(self.mu, self.sigma))

    def pdf(self, x):
        z = (x - self.mu) / self.sigma
        return math.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2.0 * math.pi))

    def _interval_prob(self, iv):
        zlo = (iv.lo - self.mu) / self.sigma
        zhi = (iv.hi - self.mu) / self.sigma
        # difference of the tails on the side that avoids cancellation
        if zlo >= 0.0:
            return _upper_tail(zlo) - _upper_tail(zhi)
        return _upper_tail(-zhi) - _upper_tail(-zlo)

    def to_json(self):
        return {"kind": self.kind, "mu": self.mu, "sigma": self.sigma}


@dataclass(frozen=True)
class SymmetricExponentialLaw(_ContinuousLaw):
    """Laplace law: density rate/2 * exp(-rate |x|)."""

    rate: float = 1.0
    kind = "exponential_symmetric"

    def __post_init__(self) -> None:
        if not _finite(self.rate) or self.rate <= 0.0:
            raise ConfigError(f"exponential_symmetric law needs rate > 0, got {self.rate}")

    def _draw(self, rng):
        sign = 1.0 if rng.random() < 0.5 else -1.0
        return sign * float(rng.exponential(1.0 / self.rate))

    def pdf(self, x):
        return 0.5 * self.rate * math.exp(-self.rate * abs(x))

    def _tail(self, x: float) -> float:
        # P(J > x)
        if x >= 0.0:
            return 0.5 * math.exp(-self.rate * x)
        return 1.0 - 0.5 * math.exp(self.rate * x)

    def _interval_prob(self, iv):
        if iv.lo >= 0.0:
            return self._tail(iv.lo) - self._tail(iv.hi)
        return self._tail(-iv.hi) - self._tail(-iv.lo)

    def to_json(self):
        return {"kind": self.kind, "rate": self.rate}


class _DiscreteLaw(JumpLaw):
    def atoms(self) -> list[tuple[float, float]]:
        raise NotImplementedError

    def _check_atoms(self) -> None:
        for x, p in self.atoms():
            if p > 0.0 and x == 0.0:
                raise ConfigError(f"{self.kind} law puts mass on 0, but jumps must be nonzero")

    def prob(self, a):
        return sum(p for x, p in self.atoms() if a.contains(x))

    def expect(self, g, a):
        total = 0.0
        for x, p in self.atoms():
            if p > 0.0 and a.contains(x):
                total += p * float(g(x))
        if not math.isfinite(total):
            raise NumericError("restricted expectation is not finite")
        return total


@dataclass(frozen=True)
class TwoPointLaw(_DiscreteLaw):
    x1: float
    p1: float
    x2: float
    kind = "two_point"

    def __post_init__(self) -> None:
        if not _finite(self.x1, self.p1, self.x2) or not 0.0 <= self.p1 <= 1.0:
            raise ConfigError(f"two_point law needs finite atoms and p1 in [0, 1], got {self}")
        self._check_atoms()

    def atoms(self):
        return [(self.x1, self.p1), (self.x2, 1.0 - self.p1)]

    def sample(self, rng):
        return self.x1 if rng.random() < self.p1 else self.x2

    def to_json(self):
        return {"kind": self.kind, "x1": self.x1, "p1": self.p1, "x2": self.x2}


@dataclass(frozen=True)
class FixedListLaw(_DiscreteLaw):
    """Uniform law on a list of values (repeats add mass)."""

    values: tuple[float, ...] = (1.0,)
    kind = "fixed_list"

    def __post_init__(self) -> None:
        if not self.values or not _finite(*self.values):
            raise ConfigError("fixed_list law needs a nonempty list of finite values")
        self._check_atoms()

    def atoms(self):
        p = 1.0 / len(self.values)
        return [(x, p) for x in self.values]

    def sample(self, rng):
        if len(self.values) == 1:
            return self.values[0]
        return self.values[int(rng.integers(len(self.values)))]

    def to_json(self):
        return {"kind": self.kind, "values": list(self.values)}


# spot weights

@dataclass(frozen=True)
class ThetaLaw:
    kind: str = "cadlag"
    theta: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("cadlag", "uniform01", "fixed"):
            raise ConfigError(f"unknown theta law {self.kind!r}")
        if not _finite(self.theta):
            raise ConfigError("theta must be finite")

    def draw(self, rng_factory: Callable[[], np.random.Generator], n: int) -> np.ndarray:
        if self.kind == "cadlag":
            return np.ones(n)
        if self.kind == "fixed":
            return np.full(n, self.theta)
        return rng_factory().random(n)

    def to_json(self) -> Any:
        if self.kind == "fixed":
            return {"kind": "fixed", "theta": self.theta}
        return self.kind

    @classmethod
    def from_json(cls, obj: Any) -> "ThetaLaw":
        if isinstance(obj, str):
            return cls(obj)
        if isinstance(obj, dict) and "kind" in obj:
            try:
                return cls(obj["kind"], float(obj.get("theta", 1.0)))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"malformed theta law: {exc}") from exc
        raise ConfigError(f"malformed theta law {obj!r}")


CADLAG = ThetaLaw("cadlag")


@dataclass(frozen=True)
class SimConfig:
    intensity: float
    drift: float
    horizon: float
    law: JumpLaw
    theta_law: ThetaLaw = CADLAG
    seed: int = 0
    n_paths: int = 1

    def __post_init__(self) -> None:
        if not _finite(self.intensity) or self.intensity <= 0.0:
            raise ConfigError(f"intensity must be > 0, got {self.intensity}")
        if not _finite(self.drift):
            raise ConfigError("drift must be finite")
        if not _finite(self.horizon) or self.horizon <= 0.0:
            raise ConfigError(f"horizon must be > 0, got {self.horizon}")
        if not isinstance(self.law, JumpLaw):
            raise ConfigError("law must be a JumpLaw")
        if not isinstance(self.theta_law, ThetaLaw):
            raise ConfigError("theta_law must be a ThetaLaw")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < SEED_BOUND:
            raise ConfigError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")
        if not isinstance(self.n_paths, int) or isinstance(self.n_paths, bool) or self.n_paths < 1:
            raise ConfigError(f"n_paths must be a positive integer, got {self.n_paths!r}")

    def replace(self, **changes: Any) -> "SimConfig":
        return replace(self, **changes)

    def to_json(self) -> dict[str, Any]:
        return {
            "intensity": self.intensity,
            "drift": self.drift,
            "horizon": self.horizon,
            "law": self.law.to_json(),
            "theta_law": self.theta_law.to_json(),
            "seed": self.seed,
            "n_paths": self.n_paths,
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "SimConfig":
        if not isinstance(obj, dict):
            raise ConfigError("config JSON must be an object")
        missing = {"intensity", "drift", "horizon", "law", "seed", "n_paths"} - obj.keys()
        if missing:
            raise ConfigError(f"config is missing fields: {sorted(missing)}")
        seed = obj["seed"]
        if isinstance(seed, float) and seed.is_integer():
            seed = int(seed)
        return cls(
            intensity=obj["intensity"],
            drift=obj["drift"],
            horizon=obj["horizon"],
            law=JumpLaw.from_json(obj["law"]),
            theta_law=ThetaLaw.from_json(obj.get("theta_law", "cadlag")),
            seed=seed,
            n_paths=obj["n_paths"],
        )


def simulate_path(cfg: SimConfig, index: int) -> RegulatedPath:
    """Path number ``index`` of the ensemble described by ``cfg``."""
    rng = path_rng(cfg.seed, index, JUMP_STREAM)
    scale = 1.0 / cfg.intensity
    times: list[float] = []
    deltas: list[float] = []
    t = 0.0
    while True:
        t += float(rng.exponential(scale))
        if t > cfg.horizon:
            break
        if t == 0.0 or (times and t == times[-1]):
            # zero draw or inter-arrival below one ulp of t: no distinct jump time
            continue
        times.append(t)
        deltas.append(cfg.law.sample(rng))
    thetas = cfg.theta_law.draw(lambda: path_rng(cfg.seed, index, THETA_STREAM), len(times))
    return RegulatedPath.from_arrays(times, deltas, thetas, x0=0.0, drift=cfg.drift, horizon=cfg.horizon)


def simulate_block(cfg: SimConfig, start: int, stop: int) -> list[RegulatedPath]:
    return [simulate_path(cfg, i) for i in range(start, stop)]


def simulate_compound_poisson(cfg: SimConfig) -> Iterator[RegulatedPath]:
    """Stream the cadlag compound Poisson ensemble, path 0 first."""
    if cfg.theta_law.kind != "cadlag":
        raise ConfigError("compound Poisson paths are cadlag; use simulate_ladlag for other theta laws")
    for i in range(cfg.n_paths):
        yield simulate_path(cfg, i)


def simulate_ladlag(cfg: SimConfig) -> Iterator[RegulatedPath]:
    """Stream the ensemble with spot weights drawn from ``cfg.theta_law``."""
    for i in range(cfg.n_paths):
        yield simulate_path(cfg, i)


def nu(cfg: SimConfig, a: BorelSet) -> float:
    """Expected number of jumps with size in ``a`` per unit time."""
    a.require_zero_separated()
    return cfg.intensity * cfg.law.prob(a)
