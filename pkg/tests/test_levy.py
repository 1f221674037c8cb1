import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jumpmeasure import (
    BorelSet, ConfigError, FixedListLaw, JumpLaw, NormalLaw, NotInBStarError, ProductSet, SimConfig,
    SymmetricExponentialLaw, ThetaLaw, TwoPointLaw, evaluate, exhaust_global, exhaust_restricted,
    integrate, jump_at, layered_decomposition, measure, nu, simulate_compound_poisson,
    simulate_ladlag, simulate_path,
)

# frozen from 30-digit mpmath quadrature of the densities
NORMAL_TAIL_1 = 0.317310507862914102829534908736          # 2 * P(Z >= 1)
LAPLACE3_ON_HALF_TO_2 = 0.110325703985881735255117651667  # rate 3, P(J in [0.5, 2])
LAPLACE3_BELOW_QUARTER = 0.236183276370507353569023275472  # rate 3, P(J <= -0.25)
LAPLACE3_X_ABOVE_HALF = 0.092970900061845762055533529485  # rate 3, E[J 1{J >= 0.5}]
NORMAL_1_2_TWO_PIECES = 0.421692528761085533376497569427  # N(1, 4), P(J in [-3,-1] u [2,5])


def cfg(**kw):
    base = dict(intensity=2.0, drift=0.0, horizon=1.0, law=NormalLaw(0.0, 1.0), seed=11, n_paths=200)
    base.update(kw)
    return SimConfig(**base)


def test_mean_jump_count():
    c = cfg(n_paths=100_000, seed=2024)
    counts = np.array([p.n_jumps for p in simulate_compound_poisson(c)])
    assert abs(counts.mean() - 2.0) <= 4 * math.sqrt(2.0 / 100_000)


@pytest.mark.parametrize("bad", [
    dict(horizon=0.0), dict(horizon=-1.0), dict(intensity=0.0), dict(intensity=math.inf),
    dict(n_paths=0), dict(seed=-1), dict(seed=2**64), dict(seed=1.5), dict(drift=math.nan),
])
def test_config_validation(bad):
    with pytest.raises(ConfigError):
        cfg(**bad)


def test_law_validation():
    with pytest.raises(ConfigError):
        NormalLaw(0.0, 0.0)
    with pytest.raises(ConfigError):
        TwoPointLaw(0.0, 0.5, 1.0)
    with pytest.raises(ConfigError):
        TwoPointLaw(1.0, 1.5, 2.0)
    with pytest.raises(ConfigError):
        FixedListLaw((1.0, 0.0))
    with pytest.raises(ConfigError):
        SymmetricExponentialLaw(-1.0)
    with pytest.raises(ConfigError):
        JumpLaw.from_json({"kind": "cauchy"})
    # zero atom with no mass is allowed
    TwoPointLaw(0.0, 0.0, 1.0)


def test_fixed_list_single_value():
    for p in simulate_compound_poisson(cfg(intensity=5.0, law=FixedListLaw((1.0,)), n_paths=50)):
        assert (p.deltas == 1.0).all()


def test_compound_poisson_requires_cadlag():
    with pytest.raises(ConfigError):
        next(simulate_compound_poisson(cfg(theta_law=ThetaLaw("uniform01"))))


def test_cadlag_paths():
    for p in simulate_compound_poisson(cfg(n_paths=20, drift=0.5)):
        assert (p.thetas == 1.0).all()
        assert p.x0 == 0.0 and p.drift == 0.5
        for t in p.times.tolist():
            assert evaluate(p, t, "spot") == evaluate(p, t, "right")


def test_caglad_paths():
    for p in simulate_ladlag(cfg(n_paths=20, theta_law=ThetaLaw("fixed", 0.0))):
        for t in p.times.tolist():
            assert evaluate(p, t, "spot") == evaluate(p, t, "left")


def test_midpoint_paths():
    for p in simulate_ladlag(cfg(n_paths=20, theta_law=ThetaLaw("fixed", 0.5))):
        for t in p.times.tolist():
            mid = 0.5 * (evaluate(p, t, "left") + evaluate(p, t, "right"))
            assert evaluate(p, t, "spot") == pytest.approx(mid, abs=1e-12)


def test_theta_does_not_change_jump_analytics():
    a = BorelSet.symmetric_tails(0.5)
    b = ProductSet.rectangle(0.8, a)
    cad = list(simulate_compound_poisson(cfg(n_paths=200, intensity=6.0)))
    lad = list(simulate_ladlag(cfg(n_paths=200, intensity=6.0, theta_law=ThetaLaw("uniform01"))))
    for p, q in zip(cad, lad):
        assert np.array_equal(p.times, q.times) and np.array_equal(p.deltas, q.deltas)
        assert not q.n_jumps or not np.array_equal(p.thetas, q.thetas)
        assert exhaust_global(p) == exhaust_global(q)
        assert exhaust_restricted(p, a) == exhaust_restricted(q, a)
        assert layered_decomposition(p).cells == layered_decomposition(q).cells
        assert measure(p, b) == measure(q, b)
        assert integrate(p, lambda s, x: s * x, 0.8, a) == integrate(q, lambda s, x: s * x, 0.8, a)
        assert all(jump_at(p, t) == jump_at(q, t) for t in p.times.tolist())


def test_reproducible_and_index_addressable():
    c = cfg(n_paths=30, theta_law=ThetaLaw("uniform01"))
    first = list(simulate_ladlag(c))
    assert first == list(simulate_ladlag(c))
    assert simulate_path(c, 17) == first[17]
    assert list(simulate_ladlag(c.replace(seed=12))) != first


def test_nu_examples():
    assert nu(cfg(), BorelSet.ray_above(1.0)) == pytest.approx(NORMAL_TAIL_1, rel=1e-13)
    three = cfg(intensity=3.0, law=TwoPointLaw(-1.0, 0.25, 2.0))
    assert nu(three, BorelSet.ray_above(1.0)) == 2.25
    assert nu(three, BorelSet.interval(5.0, 7.0)) == 0.0
    assert nu(three, BorelSet.singleton(-1.0)) == 0.75
    with pytest.raises(NotInBStarError):
        nu(three, BorelSet.interval(0.0, 1.0, lo_closed=False))


def test_nu_continuous_laws_against_quadrature():
    lap = cfg(intensity=1.0, law=SymmetricExponentialLaw(3.0))
    assert nu(lap, BorelSet.interval(0.5, 2.0)) == pytest.approx(LAPLACE3_ON_HALF_TO_2, rel=1e-13)
    assert nu(lap, BorelSet.ray_below(-0.25)) == pytest.approx(LAPLACE3_BELOW_QUARTER, rel=1e-13)
    shifted = cfg(intensity=1.0, law=NormalLaw(1.0, 2.0))
    two = BorelSet.union(BorelSet.interval(-3.0, -1.0), BorelSet.interval(2.0, 5.0))
    assert nu(shifted, two) == pytest.approx(NORMAL_1_2_TWO_PIECES, rel=1e-13)


def test_restricted_expectation():
    lap = SymmetricExponentialLaw(3.0)
    assert lap.expect(lambda x: x, BorelSet.ray_above(0.5)) == pytest.approx(LAPLACE3_X_ABOVE_HALF, rel=1e-10)
    fl = FixedListLaw((1.0, 2.0, -3.0, 2.0))
    assert fl.expect(lambda x: x * x, BorelSet.ray_above(1.5)) == 0.25 * 4.0 + 0.25 * 4.0


@settings(max_examples=100)
@given(st.floats(0.05, 5.0), st.floats(0.01, 3.0), st.sampled_from(["normal", "laplace", "list"]))
def test_nu_additive_over_disjoint_sets(cut, gap, which):
    law = {
        "normal": NormalLaw(0.3, 1.7),
        "laplace": SymmetricExponentialLaw(0.8),
        "list": FixedListLaw((-2.0, 0.5, 1.0, 3.0, 7.0)),
    }[which]
    c = cfg(law=law, intensity=2.5)
    a = BorelSet.interval(cut, cut + gap, hi_closed=False)
    b = BorelSet.union(BorelSet.ray_above(cut + gap), BorelSet.ray_below(-cut))
    whole = BorelSet.union(a, b)
    assert nu(c, whole) == pytest.approx(nu(c, a) + nu(c, b), rel=1e-12, abs=1e-300)


def test_config_json_roundtrip():
    c = cfg(theta_law=ThetaLaw("fixed", 0.25), law=TwoPointLaw(-1.0, 0.3, 2.0))
    assert SimConfig.from_json(c.to_json()) == c
    obj = c.to_json()
    del obj["seed"]
    with pytest.raises(ConfigError):
        SimConfig.from_json(obj)
    for law in (NormalLaw(1.0, 2.0), SymmetricExponentialLaw(2.0), FixedListLaw((1.0, -1.0))):
        assert JumpLaw.from_json(law.to_json()) == law
