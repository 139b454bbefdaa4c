import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from metallic_slant import (GOLDEN, Branch, DomainError, InputError, Kind, StructureError, StructureOperator,
                            metallic_from_product, metallic_number, products_from_metallic, projectors,
                            random_metallic, validate_structure)
from metallic_slant.metallic import compatibility_residual, polynomial_residual, require_valid

pq = st.tuples(st.integers(1, 40), st.integers(1, 40))


def test_golden_number():
    assert abs(GOLDEN.sigma - 1.6180339887498949) < 1e-12
    assert abs(GOLDEN.sigma_bar + 0.6180339887498949) < 1e-12
    assert GOLDEN.is_golden


def test_copper_number_is_two():
    par = metallic_number(1, 2)
    assert abs(par.sigma - 2.0) < 1e-14
    assert abs(par.sigma_bar + 1.0) < 1e-14


def test_silver_number():
    assert metallic_number(2, 1).sigma == pytest.approx(1 + math.sqrt(2), abs=1e-14)


@pytest.mark.parametrize("p,q", [(0, 1), (1, 0), (-1, 1), (1.5, 1), (True, 1), ("1", 1)])
def test_rejects_bad_parameters(p, q):
    with pytest.raises(DomainError):
        metallic_number(p, q)


@given(pq)
def test_sigma_is_the_positive_root(v):
    p, q = v
    par = metallic_number(p, q)
    roots = sorted(np.roots([1.0, -p, -q]).real)
    assert par.sigma == pytest.approx(roots[1], rel=1e-12)
    assert par.sigma_bar == pytest.approx(roots[0], rel=1e-10, abs=1e-12)
    assert par.sigma + par.sigma_bar == pytest.approx(p, abs=1e-12 * p)
    assert par.sigma * par.sigma_bar == pytest.approx(-q, rel=1e-10)
    assert par.sigma > 0 > par.sigma_bar


def test_diagonal_structure_validates():
    J = StructureOperator.diagonal(["sigma", "sigma_bar", "sigma"], GOLDEN)
    rep = validate_structure(J)
    assert rep.passed
    assert polynomial_residual(J) < 1e-15


def test_diagonal_rejects_unknown_token():
    with pytest.raises(InputError):
        StructureOperator.diagonal(["sigma", "phi"], GOLDEN)


def test_non_metallic_matrix_fails_validation():
    J = StructureOperator(np.diag([1.0, 2.0]), Kind.METALLIC, GOLDEN)
    assert not validate_structure(J).passed
    with pytest.raises(StructureError):
        require_valid(J)


def test_incompatible_metric_detected():
    par = GOLDEN
    # eigenvectors not orthogonal: J^2 = J + I holds but J is not symmetric
    V = np.array([[1.0, 1.0], [0.0, 1.0]])
    M = V @ np.diag([par.sigma, par.sigma_bar]) @ np.linalg.inv(V)
    J = StructureOperator(M, Kind.METALLIC, par)
    assert polynomial_residual(J) < 1e-12
    assert compatibility_residual(J) > 0.1
    assert not validate_structure(J).passed


@pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.zeros(3)])
def test_shape_errors(bad):
    with pytest.raises(InputError):
        StructureOperator(bad, Kind.PRODUCT)


def test_metric_must_be_spd():
    with pytest.raises(InputError):
        StructureOperator(np.eye(2), Kind.PRODUCT, metric=np.diag([1.0, -1.0]))


@given(pq, st.integers(2, 7), st.integers(0, 2 ** 32 - 1))
def test_product_metallic_round_trip(v, dim, seed):
    par = metallic_number(*v)
    J = random_metallic(dim, par, np.random.default_rng(seed))
    F1, F2 = products_from_metallic(J)
    assert np.max(np.abs(F1.matrix @ F1.matrix - np.eye(dim))) < 1e-9
    back = metallic_from_product(F1, par, Branch.PLUS)
    assert np.max(np.abs(back.matrix - J.matrix)) < 1e-9 * max(1.0, par.sigma)
    # the minus branch of F2 is again J
    assert np.max(np.abs(metallic_from_product(F2, par, Branch.MINUS).matrix - J.matrix)) < 1e-9 * max(1.0, par.sigma)


@given(pq, st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_projectors(v, dim, seed):
    par = metallic_number(*v)
    J = random_metallic(dim, par, np.random.default_rng(seed))
    P, Q = projectors(J).P, projectors(J).Q
    I = np.eye(dim)
    assert np.allclose(P + Q, I, atol=1e-10)
    assert np.allclose(P @ P, P, atol=1e-9)
    assert np.allclose(P @ Q, 0, atol=1e-9)
    # J acts as sigma_bar on im P and sigma on im Q
    assert np.allclose(J.matrix @ P, par.sigma_bar * P, atol=1e-9 * par.sigma)
    assert np.allclose(J.matrix @ Q, par.sigma * Q, atol=1e-9 * par.sigma)


def test_projector_of_product_structure_rejected():
    with pytest.raises(StructureError):
        projectors(StructureOperator(np.diag([1.0, -1.0]), Kind.PRODUCT))
