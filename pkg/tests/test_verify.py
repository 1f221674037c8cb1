import numpy as np
import pytest

from jumpmeasure import (
    BorelSet, ConfigError, NormalLaw, NotInBStarError, SimConfig, TwoPointLaw, nu,
    verify_compound_mean, verify_poisson_law,
)
from jumpmeasure.verify import g_one, g_x, g_x2, poisson_bins


def cfg(**kw):
    base = dict(intensity=2.0, drift=0.0, horizon=1.0, law=NormalLaw(0.0, 1.0), seed=5, n_paths=10_000)
    base.update(kw)
    return SimConfig(**base)


def test_too_few_paths():
    with pytest.raises(ConfigError):
        verify_poisson_law(cfg(n_paths=10), BorelSet.ray_above(1.0), 1.0)
    with pytest.raises(ConfigError):
        verify_compound_mean(cfg(n_paths=10), BorelSet.ray_above(1.0), g_x, 1.0)


def test_set_must_be_separated():
    with pytest.raises(NotInBStarError):
        verify_poisson_law(cfg(), BorelSet.real_line(), 1.0)


def test_poisson_law_small_ensemble():
    rep = verify_poisson_law(cfg(), BorelSet.ray_above(1.0), 1.0)
    assert rep.passed, rep.to_json()
    assert sum(rep.bin_counts) == rep.n_samples == 10_000
    assert min(rep.expected) >= 5.0
    assert rep.dof == len(rep.bin_counts) - 1
    assert rep.target == pytest.approx(0.317310507862914, rel=1e-13)


def test_whole_support_counts_every_jump():
    a = BorelSet.symmetric_tails(0.001)
    c = cfg(seed=9)
    rep = verify_poisson_law(c, a, 1.0)
    assert rep.passed, rep.to_json()
    # P(|J| < 0.001) ~ 8e-4 so the target is essentially lambda * t
    assert abs(rep.target - 2.0) < 2e-3


def test_compound_one_matches_poisson_mean():
    a = BorelSet.ray_above(1.0)
    c = cfg(seed=77)
    pois = verify_poisson_law(c, a, 1.0)
    comp = verify_compound_mean(c, a, g_one, 1.0)
    assert comp.estimate == pois.estimate
    assert comp.target == pytest.approx(nu(c, a), rel=1e-12)


def test_compound_mean_small_ensemble():
    rep = verify_compound_mean(cfg(seed=123), BorelSet.ray_above(1.0), g_x2, 1.0)
    assert rep.passed, rep.to_json()
    assert rep.target == pytest.approx(0.801251956901200802, rel=1e-10)


def test_compound_with_no_mass():
    c = cfg(law=TwoPointLaw(-1.0, 0.5, 2.0))
    rep = verify_compound_mean(c, BorelSet.ray_above(5.0), g_x, 1.0)
    assert rep.target == 0.0 and rep.estimate == 0.0 and rep.std_error == 0.0
    assert rep.passed
    pois = verify_poisson_law(c, BorelSet.ray_above(5.0), 1.0)
    assert pois.passed and pois.bin_counts == [10_000]


def test_tight_threshold_fails():
    rep = verify_compound_mean(cfg(seed=3), BorelSet.ray_above(1.0), g_x, 1.0, threshold=1e-9)
    assert rep.verdict == "fail"


def test_report_schema():
    rep = verify_poisson_law(cfg(), BorelSet.ray_above(1.0), 0.5)
    obj = rep.to_json()
    assert list(obj)[:8] == ["test_name", "estimate", "std_error", "target", "z_score", "p_value",
                             "n_samples", "verdict"]


@pytest.mark.parametrize("mean", [0.0, 0.01, 0.3173, 2.0, 40.0])
def test_poisson_bins_invariants(mean):
    rng = np.random.default_rng(1)
    counts = rng.poisson(mean, 20_000)
    obs, exp, labels = poisson_bins(counts, mean)
    assert sum(obs) == counts.size
    assert sum(exp) == pytest.approx(counts.size, rel=1e-9)
    assert min(exp) >= 5.0
    assert len(labels) == len(obs)


@pytest.mark.slow
def test_calibration_under_the_null():
    a = BorelSet.ray_above(1.0)
    failures = sum(not verify_poisson_law(cfg(seed=s), a, 1.0).passed for s in range(1000, 1100))
    assert failures <= 2
