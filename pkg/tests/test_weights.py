from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distorder.errors import ConfigurationError, DomainError
from distorder.weights import (
    WeightFunction,
    ZeroBehavior,
    bump_weight,
    eval_weight,
    linear_weight,
    uniform_weight,
    validate,
    weight_from_json,
)


def test_constant_weight_values():
    w = WeightFunction.constant(2.5)
    assert eval_weight(w, 0.3) == 2.5
    assert w.mu_at_one == 2.5
    assert validate(w) == []


def test_power_law_profile():
    w = WeightFunction.power_at_zero(2.0, 0.5)
    assert eval_weight(w, 0.25) == pytest.approx(1.0)
    assert validate(w) == []


@pytest.mark.parametrize("alpha", [-1e-9, 1.5, float("nan")])
def test_eval_weight_outside_interval(alpha):
    with pytest.raises(DomainError):
        eval_weight(uniform_weight(), alpha)


def test_bump_without_floor_is_inadmissible():
    report = validate(bump_weight(0.0))
    assert any("μ(1)=0" in line for line in report)


def test_bump_with_floor_is_admissible():
    w = bump_weight(0.1)
    assert validate(w) == []
    assert eval_weight(w, 0.5) == pytest.approx(1.6, rel=1e-12)


def test_negative_tabulated_weight_reported():
    samples = [[0, 1], [0.3, 1], [0.5, -0.5], [0.7, 1], [1, 1]]
    report = validate(WeightFunction.tabulated(samples))
    assert any("negative" in line for line in report)


def test_zero_behavior_mismatch_reported():
    # declared alpha^1 behavior but the profile is alpha^2
    w = WeightFunction.power_at_zero(1.0, 1.0, lambda a: a**2 + 0.1 * a**0 * (a > 0.9))
    assert any("zero-behavior" in line for line in validate(w))


def test_declared_positive_but_vanishing():
    samples = [[0, 0], [0.25, 0.25], [0.5, 0.5], [0.75, 0.75], [1, 1]]
    assert any("zero-behavior" in line for line in validate(WeightFunction.tabulated(samples)))


def test_tabulated_requires_full_span():
    with pytest.raises(ConfigurationError):
        WeightFunction.tabulated([[0.1, 1], [0.4, 1], [0.6, 1], [1.0, 1]])


def test_tabulated_reproduces_cubics():
    a = np.linspace(0, 1, 9)
    w = WeightFunction.tabulated(np.column_stack([a, 1 + a**3]))
    x = np.linspace(0, 1, 101)
    assert np.max(np.abs(w(x) - (1 + x**3))) < 1e-13


@pytest.mark.parametrize(
    "source",
    [
        {"kind": "constant", "c": 2.0},
        {"kind": "power_at_zero", "a": 1.0, "nu": 1.0},
        {"kind": "tabulated", "samples": [[0, 1], [0.5, 2], [0.75, 2], [1, 3]]},
        {
            "kind": "tabulated",
            "samples": [[0, 0], [0.5, 1], [0.75, 1.5], [1, 2]],
            "zero_behavior": {"kind": "power_law", "a": 2.0, "nu": 1.0},
        },
    ],
)
def test_json_round_trip(source):
    w = weight_from_json(source)
    again = weight_from_json(json.dumps(w.to_json()))
    x = np.linspace(0, 1, 33)
    assert np.array_equal(w(x), again(x))
    assert again.zero_behavior == w.zero_behavior


def test_json_from_file(tmp_path):
    path = tmp_path / "w.json"
    path.write_text(json.dumps({"kind": "constant", "c": 3}))
    assert eval_weight(weight_from_json(path), 0.1) == 3.0


@pytest.mark.parametrize(
    "source",
    [{"kind": "nope"}, {"c": 1}, {"kind": "power_at_zero", "a": 1.0}, {"kind": "constant", "c": -1}],
)
def test_json_rejects_bad_sources(source):
    with pytest.raises(ConfigurationError):
        weight_from_json(source)


def test_zero_behavior_validation():
    with pytest.raises(ConfigurationError):
        ZeroBehavior.power_law(0.0, 1.0)
    with pytest.raises(ConfigurationError):
        ZeroBehavior("sometimes")


def test_linear_weight():
    assert eval_weight(linear_weight(), 0.3) == pytest.approx(0.3)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 20.0), st.floats(0.0, 1.0))
def test_constant_weight_property(c, alpha):
    assert eval_weight(WeightFunction.constant(c), alpha) == c
