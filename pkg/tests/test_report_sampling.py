import json
import math

import numpy as np
from hypothesis import given, strategies as st

from metallic_slant import SamplingPlan, VerificationReport
from metallic_slant.report import _round
from metallic_slant.sampling import sample_points, unit_vectors


def test_overall_pass_iff_every_check_passes():
    rep = VerificationReport("r")
    rep.add("a", "x = x", 0.0, 1e-9)
    rep.observe("note", 3.0)
    assert rep.passed
    rep.add("b", "y = y", 2e-9, 1e-9)
    assert not rep.passed and [c.name for c in rep.failures()] == ["b"]


def test_nan_residual_fails():
    rep = VerificationReport("r")
    rep.add("nan", "?", math.nan, 1.0)
    assert not rep.passed
    assert json.loads(rep.to_json(timestamp=False))["checks"][0]["passed"] is False


def test_timestamp_optional():
    rep = VerificationReport("r", timestamp="2026-01-01T00:00:00+00:00")
    assert rep.to_dict()["timestamp"] == "2026-01-01T00:00:00+00:00"
    assert "timestamp" not in rep.to_dict(timestamp=False)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_round_keeps_twelve_digits(x):
    r = _round(x)
    assert r == float(f"{x:.12g}")


@given(st.integers(0, 2 ** 64 - 1), st.integers(1, 30))
def test_points_inside_box_with_margin(seed, count):
    box = [(0.5, 3.0), (0.0, 1.0), (-2.0, -1.0)]
    pts = sample_points(box, count, SamplingPlan(seed=seed).rng(0))
    for (lo, hi), col in zip(box, pts.T):
        m = 1e-3 * (hi - lo)
        assert np.all(col >= lo + m) and np.all(col <= hi - m)


def test_streams_are_reproducible_and_independent():
    plan = SamplingPlan(seed=42)
    assert np.array_equal(plan.rng(1).random(5), plan.rng(1).random(5))
    assert not np.array_equal(plan.rng(1).random(5), plan.rng(2).random(5))


def test_unit_vectors():
    V = unit_vectors(4, 10, np.random.default_rng(0))
    assert V.shape == (4, 10) and np.allclose(np.linalg.norm(V, axis=0), 1.0)
