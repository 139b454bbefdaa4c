import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from metallic_slant import (GOLDEN, ConfigError, DistributionSpec, Immersion, InputError, SamplingPlan, SlantClass,
                            StructureOperator, builtin_example2, frame_at, metallic_number, pointwise_angle_relation,
                            products_from_metallic, semi_slant_check, slant_distribution_lambda, slant_test,
                            theorem_angle_relation, wirtinger_angle_F, wirtinger_angle_J)
from metallic_slant.slant import sampled_frames, slant_identity_residuals, whole_tangent

from .oracles import ex1_jacobian, ex2_jacobian, tangent_cos

PHI, PHIB = GOLDEN.sigma, GOLDEN.sigma_bar
EX1_COS = (PHI + 2 * PHIB) / math.sqrt(3 * (PHI ** 2 + 2 * PHIB ** 2))


def test_example1_closed_form_value():
    # the closed form itself, evaluated independently
    assert EX1_COS == pytest.approx(0.11991664594, abs=1e-11)


def test_example1_d2_angle_against_projection_oracle(ex1):
    J = ex1.build_structure()
    D2 = ex1.distribution("D2")
    rng = np.random.default_rng(11)
    for _ in range(10):
        x = np.array([rng.uniform(0.5, 3), rng.uniform(0, 1.5), rng.uniform(0, 1.5)])
        fr = frame_at(ex1.immersion, x)
        Jac = ex1_jacobian(*x)
        X = Jac[:, 0]
        # projecting J X on D2 = span(d/du)
        JX = J.matrix @ X
        oracle = abs(JX @ X) / (np.linalg.norm(JX) * np.linalg.norm(X))
        assert math.cos(wirtinger_angle_J(J, fr, X, D2)) == pytest.approx(oracle, abs=1e-13)
        assert oracle == pytest.approx(EX1_COS, abs=1e-13)
        # angle with the whole tangent space via least squares
        assert math.cos(wirtinger_angle_J(J, fr, X)) == pytest.approx(tangent_cos(J.matrix, Jac, X), abs=1e-12)


def test_example1_classification(ex1):
    J, f = ex1.build_structure(), ex1.immersion
    plan = ex1.plan.with_(count=20, dirs=5)
    frames = sampled_frames(f, plan)
    d2 = slant_test(J, f, ex1.distribution("D2"), plan, frames)
    assert d2.classification is SlantClass.PROPER_SLANT
    assert d2.cos == pytest.approx(EX1_COS, abs=1e-12)
    assert slant_test(J, f, ex1.distribution("D1"), plan, frames).classification is SlantClass.INVARIANT
    assert slant_test(J, f, whole_tangent(f), plan, frames).classification is SlantClass.NOT_SLANT


@pytest.mark.parametrize("n", [1, 2, 3, 5])
@pytest.mark.parametrize("pq", [(1, 1), (2, 1), (1, 2)])
def test_example2_angle(n, pq):
    s = builtin_example2(n, *pq)
    par = s.params
    expected = (n * par.sigma + par.sigma_bar) / math.sqrt((n + 1) * (n * par.sigma ** 2 + par.sigma_bar ** 2))
    J = s.build_structure()
    u, al = 1.3, np.linspace(0.1, 1.4, n)
    Jac = ex2_jacobian(u, al)
    assert tangent_cos(J.matrix, Jac[:, :1], Jac[:, 0]) == pytest.approx(expected, abs=1e-12)
    ar = slant_test(J, s.immersion, s.distribution("D2"), s.plan.with_(count=10, dirs=3))
    assert float(np.max(np.abs(np.cos(ar.angles) - expected))) < 1e-8


def test_example2_n1_value():
    assert builtin_example2(1).plan  # builds
    s = builtin_example2(1)
    ar = slant_test(s.build_structure(), s.immersion, s.distribution("D2"), s.plan.with_(count=5, dirs=2))
    assert ar.cos == pytest.approx(1 / math.sqrt(6), abs=1e-12)


def test_anti_invariant_line():
    par = GOLDEN
    J = StructureOperator.diagonal(["sigma", "sigma_bar"], par)
    a, b = math.sqrt(-par.sigma_bar), math.sqrt(par.sigma)
    f = Immersion.from_strings([f"{a!r}*u", f"{b!r}*u"], ["u"], [(0, 1)])
    ar = slant_test(J, f, whole_tangent(f), SamplingPlan(count=5, dirs=2))
    assert ar.classification is SlantClass.ANTI_INVARIANT
    assert np.all(ar.angles == math.pi / 2) or np.max(np.abs(ar.angles - math.pi / 2)) < 1e-8


def test_zero_vector_rejected(ex1):
    fr = frame_at(ex1.immersion, [1.0, 0.2, 0.2])
    with pytest.raises(InputError):
        wirtinger_angle_J(ex1.build_structure(), fr, np.zeros(7))


def test_lambda_is_cos_squared(ex1):
    J = ex1.build_structure()
    frames = sampled_frames(ex1.immersion, ex1.plan.with_(count=10))
    lam, res = slant_distribution_lambda(J, frames, ex1.distribution("D2"))
    assert lam == pytest.approx(EX1_COS ** 2, abs=1e-12)
    assert res < 1e-12


def test_slant_identities_on_d2(ex1):
    J = ex1.build_structure()
    frames = sampled_frames(ex1.immersion, ex1.plan.with_(count=10))
    res = slant_identity_residuals(J, frames, ex1.distribution("D2"), math.acos(EX1_COS), 5,
                                   np.random.default_rng(0))
    assert max(res.values()) < 1e-10


def test_semi_slant_example1(ex1):
    rep = semi_slant_check(ex1.build_structure(), ex1.immersion, ex1.distribution("D1"), ex1.distribution("D2"),
                           ex1.plan.with_(count=10, dirs=4))
    assert rep.passed, rep.summary_lines()
    assert rep.observations["angle.D2.cos_theta"] == pytest.approx(EX1_COS, abs=1e-12)


def test_semi_slant_swapped_roles_fail(ex1):
    """D2 is not invariant, so it cannot play the invariant role."""
    rep = semi_slant_check(ex1.build_structure(), ex1.immersion, ex1.distribution("D2"), ex1.distribution("D1"),
                           ex1.plan.with_(count=5, dirs=3))
    assert not rep.passed


def test_semi_slant_config_errors(ex1):
    J, f = ex1.build_structure(), ex1.immersion
    plan = ex1.plan.with_(count=3, dirs=2)
    with pytest.raises(ConfigError):
        semi_slant_check(J, f, DistributionSpec("A", coords=(1,)), ex1.distribution("D2"), plan)
    skew = DistributionSpec("S", frame_matrix=lambda x: np.array([[1.0], [1.0], [0.0]]))
    with pytest.raises(ConfigError):
        semi_slant_check(J, f, DistributionSpec("B", coords=(1, 2)), skew, plan)


def test_distribution_selector_validation():
    with pytest.raises(ConfigError):
        DistributionSpec("X")
    with pytest.raises(ConfigError):
        DistributionSpec("X", coords=(0,), frame_matrix=lambda x: np.eye(3)[:, :1])


@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 1e-3),
       st.floats(0.5, 3), st.floats(0, 1.5), st.floats(0, 1.5))
def test_pointwise_relation_example1(c, u, t1, t2):
    from metallic_slant import builtin_example1
    s = builtin_example1()
    J = s.build_structure()
    F, _ = products_from_metallic(J)
    fr = frame_at(s.immersion, [u, t1, t2])
    X = fr.push(np.array(c))
    lhs, rhs, res = pointwise_angle_relation(J, F, fr, X)
    assert res < 1e-9 * max(1.0, X @ X)


@pytest.mark.parametrize("pq", [(1, 1), (3, 2)])
def test_pointwise_relation_example2(pq):
    s = builtin_example2(3, *pq)
    J = s.build_structure()
    F, _ = products_from_metallic(J)
    rng = np.random.default_rng(4)
    for fr in sampled_frames(s.immersion, s.plan.with_(count=20)):
        X = fr.tangent_onb @ rng.standard_normal(4)
        assert pointwise_angle_relation(J, F, fr, X)[2] < 1e-9


def test_pointwise_relation_requires_plus_branch(ex1):
    J = ex1.build_structure()
    F1, F2 = products_from_metallic(J)
    fr = frame_at(ex1.immersion, [1.0, 0.2, 0.2])
    with pytest.raises(ConfigError):
        pointwise_angle_relation(J, F2, fr, fr.jacobian[:, 0])


def test_pointwise_relation_value_at_a_point(ex1):
    """X = d/du at t1 = t2 = 0: both sides equal 10/3, derived by hand."""
    J = ex1.build_structure()
    F, _ = products_from_metallic(J)
    fr = frame_at(ex1.immersion, [1.0, 0.0, 0.0])
    lhs, rhs, _ = pointwise_angle_relation(J, F, fr, fr.jacobian[:, 0])
    assert lhs == pytest.approx(10 / 3, abs=1e-12)
    assert rhs == pytest.approx(10 / 3, abs=1e-12)


def test_closed_form_angle_relation_is_only_reported(ex1):
    J = ex1.build_structure()
    F, _ = products_from_metallic(J)
    fr = frame_at(ex1.immersion, [1.0, 0.3, 0.3])
    D2 = ex1.distribution("D2")
    X = fr.jacobian[:, 0]
    rel = theorem_angle_relation(wirtinger_angle_J(J, fr, X, D2), wirtinger_angle_F(F, fr, X, D2), GOLDEN)
    assert rel.observed_sin_theta == pytest.approx(math.sqrt(1 - EX1_COS ** 2), abs=1e-12)
    # F-angle of d/du: cos = 1/3
    assert rel.predicted_sin_theta == pytest.approx(GOLDEN.gap / (2 * PHI) * math.sqrt(8) / 3, abs=1e-12)
    assert rel.discrepancy > 0.3
