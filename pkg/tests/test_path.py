import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jumpmeasure import (
    DomainError, JumpEvent, RegulatedPath, enumerate_finite_set, evaluate, jump_at,
    jump_set_eps, layered_decomposition,
)
from jumpmeasure.path import magnitude_band, magnitude_bands


@pytest.fixture
def three_jumps():
    return RegulatedPath(0.0, 0.0, 3.0, [
        JumpEvent(0.5, 2.0), JumpEvent(1.2, -0.3), JumpEvent(2.7, 0.05),
    ])


def test_constant_path():
    p = RegulatedPath(horizon=2.0)
    for side in ("left", "spot", "right"):
        assert evaluate(p, 1.0, side) == 0.0


def test_cadlag_single_jump():
    p = RegulatedPath(0.0, 0.0, 1.0, [JumpEvent(0.5, 2.0, 1.0)])
    assert evaluate(p, 0.5, "left") == 0.0
    assert evaluate(p, 0.5, "spot") == 2.0
    assert evaluate(p, 0.5, "right") == 2.0


def test_double_discontinuity_with_drift():
    p = RegulatedPath(1.0, 2.0, 1.0, [JumpEvent(0.5, -1.0, 0.5)])
    # hand evaluation: 1 + 2 * 0.5 = 2, then spot adds -0.5, right adds -1
    assert evaluate(p, 0.5, "left") == 2.0
    assert evaluate(p, 0.5, "spot") == 1.5
    assert evaluate(p, 0.5, "right") == 1.0


def test_eval_at_zero_all_sides_equal_x0():
    p = RegulatedPath(3.0, -1.0, 1.0, [JumpEvent(0.1, 1.0, 0.3)])
    assert {evaluate(p, 0.0, s) for s in ("left", "spot", "right")} == {3.0}


def test_eval_out_of_domain():
    p = RegulatedPath(horizon=1.0)
    with pytest.raises(DomainError):
        evaluate(p, 1.5)
    with pytest.raises(DomainError):
        evaluate(p, -0.1)
    with pytest.raises(DomainError):
        jump_at(p, 2.0)


def test_jump_at():
    p = RegulatedPath(0.0, 0.0, 1.0, [JumpEvent(0.5, 2.0, 0.3)])
    assert jump_at(p, 0.25) == 0.0
    assert jump_at(p, 0.5) == 2.0
    assert jump_at(p, 0.0) == 0.0


@pytest.mark.parametrize("bad", [
    dict(time=0.0, delta=1.0),
    dict(time=-1.0, delta=1.0),
    dict(time=0.5, delta=0.0),
    dict(time=0.5, delta=math.inf),
    dict(time=0.5, delta=1.0, theta=math.nan),
])
def test_event_invariants(bad):
    with pytest.raises(DomainError):
        JumpEvent(**bad)


def test_path_invariants():
    with pytest.raises(DomainError):
        RegulatedPath(horizon=1.0, events=[JumpEvent(0.5, 1.0), JumpEvent(0.5, 2.0)])
    with pytest.raises(DomainError):
        RegulatedPath(horizon=1.0, events=[JumpEvent(0.7, 1.0), JumpEvent(0.5, 2.0)])
    with pytest.raises(DomainError):
        RegulatedPath(horizon=1.0, events=[JumpEvent(1.5, 1.0)])
    with pytest.raises(DomainError):
        RegulatedPath(horizon=0.0)


def test_path_is_immutable(three_jumps):
    with pytest.raises(AttributeError):
        three_jumps.x0 = 1.0
    with pytest.raises(ValueError):
        three_jumps.times[0] = 0.1


def test_jump_set_eps(three_jumps):
    assert jump_set_eps(three_jumps, 1.0) == [0.5]
    assert jump_set_eps(three_jumps, 0.0) == [0.5, 1.2, 2.7]
    assert jump_set_eps(RegulatedPath(horizon=1.0), 0.3) == []
    with pytest.raises(DomainError):
        jump_set_eps(three_jumps, -0.1)


def test_layered_cells(three_jumps):
    cells = layered_decomposition(three_jumps).cells
    assert cells[(1, 1)] == (0.5,)
    # 0.25 < 0.3 <= 1/3: the band right after (1/3, 1/2]
    assert cells[(2, 4)] == (1.2,)
    assert cells[(3, 21)] == (2.7,)
    assert len(cells) == 3
    assert layered_decomposition(RegulatedPath(horizon=1.0)).cells == {}


def test_cell_boundary_at_integer_time():
    p = RegulatedPath(horizon=3.0, events=[JumpEvent(1.0, 5.0), JumpEvent(2.0, 0.5)])
    cells = layered_decomposition(p).cells
    assert cells == {(1, 1): (1.0,), (2, 3): (2.0,)}


@pytest.mark.parametrize("delta, band", [
    (2.0, 1), (1.0, 2), (-1.0, 2), (0.75, 2), (0.5, 3), (0.3, 4), (0.26, 4), (0.25, 5), (0.05, 21),
])
def test_magnitude_band_values(delta, band):
    assert magnitude_band(delta) == band
    assert magnitude_bands(np.array([delta]))[0] == band


def _band_oracle(x):
    # direct membership scan over the computed thresholds
    if x > 1.0:
        return 1
    m = 1
    while not (1 / (m + 1) < x <= 1 / m):
        m += 1
    return m + 1


@settings(max_examples=300)
@given(st.floats(min_value=1e-6, max_value=5.0, allow_subnormal=False))
def test_band_agrees_with_membership_scan(x):
    assert magnitude_band(x) == _band_oracle(x)
    assert magnitude_bands(np.array([x, -x])).tolist() == [_band_oracle(x)] * 2


@pytest.mark.parametrize("x", [1e-13, 3.3e-15, 1e-200, 5e-324])
def test_band_of_tiny_jumps_is_consistent(x):
    band = magnitude_band(x)
    assert 1 / band < x <= 1 / (band - 1)


def test_enumerate_finite_set():
    assert enumerate_finite_set({3.0, 1.0, 2.0}) == [1.0, 2.0, 3.0]
    assert enumerate_finite_set(set()) == []
    assert enumerate_finite_set([2.0, 2.0, 1.0]) == [1.0, 2.0]
    with pytest.raises(DomainError):
        enumerate_finite_set([1.0, math.nan])


@given(st.sets(st.floats(allow_nan=False), max_size=200))
def test_enumerate_matches_sort(d):
    assert enumerate_finite_set(d) == sorted(d)


def _paths(max_jumps=20, drift=True):
    @st.composite
    def build(draw):
        horizon = draw(st.floats(0.5, 10.0))
        times = sorted(draw(st.sets(st.floats(0.01, horizon), max_size=max_jumps)))
        deltas = [draw(st.floats(0.01, 5.0)) * draw(st.sampled_from([-1, 1])) for _ in times]
        thetas = [draw(st.floats(-1.0, 2.0)) for _ in times]
        return RegulatedPath.from_arrays(times, deltas, thetas, x0=draw(st.floats(-5, 5)),
                                         drift=draw(st.floats(-2, 2)) if drift else 0.0,
                                         horizon=horizon)
    return build()


@given(_paths(drift=False))
def test_one_sided_limits_exact_without_drift(p):
    times = p.times.tolist()
    gaps = np.diff([0.0] + times) if times else []
    for k, t in enumerate(times):
        before = t - gaps[k] / 2
        assert evaluate(p, t, "left") == evaluate(p, before, "spot")
        after = (t + times[k + 1]) / 2 if k + 1 < len(times) else (t + p.horizon) / 2
        if after > t:
            assert evaluate(p, t, "right") == evaluate(p, after, "spot")


@given(_paths())
def test_one_sided_limits_with_drift(p):
    times = p.times.tolist()
    h = 1e-9
    for k, t in enumerate(times):
        if k == 0 or times[k - 1] < t - h:
            assert evaluate(p, t, "left") == pytest.approx(evaluate(p, t - h, "spot"), abs=1e-6)
        if t + h <= p.horizon and (k + 1 == len(times) or times[k + 1] > t + h):
            assert evaluate(p, t, "right") == pytest.approx(evaluate(p, t + h, "spot"), abs=1e-6)
        assert jump_at(p, t) == pytest.approx(evaluate(p, t, "right") - evaluate(p, t, "left"), abs=1e-9)


@given(_paths(max_jumps=40))
def test_layered_partition(p):
    lay = layered_decomposition(p)
    flat = [t for ts in lay.cells.values() for t in ts]
    assert sorted(flat) == jump_set_eps(p, 0.0)
    assert len(flat) == len(set(flat))
    for (n, band), ts in lay.cells.items():
        for t in ts:
            x = abs(jump_at(p, t))
            assert n - 1 < t <= n
            assert (x > 1.0) if band == 1 else (1 / band < x <= 1 / (band - 1))


def test_json_roundtrip(three_jumps):
    text = json.dumps(three_jumps.to_json())
    assert RegulatedPath.from_json(json.loads(text)) == three_jumps


def test_json_rejects_unsorted_events():
    obj = {"x0": 0, "drift": 0, "horizon": 3,
           "events": [{"time": 2.0, "delta": 1.0, "theta": 1}, {"time": 1.0, "delta": 1.0, "theta": 1}]}
    with pytest.raises(DomainError):
        RegulatedPath.from_json(obj)
    with pytest.raises(DomainError):
        RegulatedPath.from_json({"events": []})


def test_pickle_roundtrip(three_jumps):
    import pickle
    assert pickle.loads(pickle.dumps(three_jumps)) == three_jumps
