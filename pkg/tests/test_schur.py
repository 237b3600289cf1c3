import numpy as np
import pytest

from rclift import linalg, schur
from rclift.errors import DimensionMismatch


def test_zero_and_constant_eval():
    v = schur.zero(2, 3)
    np.testing.assert_allclose(schur.eval(v, 0.4j), np.zeros((3, 2)))
    c = np.array([[0.3, 0.1], [0.0, -0.5]])
    vc = schur.constant(c)
    np.testing.assert_allclose(schur.eval(vc, -0.2), c)


def test_constant_must_be_contractive():
    with pytest.raises(ValueError):
        schur.constant(1.5 * np.eye(2))


@pytest.mark.parametrize("seed", range(4))
def test_transfer_grid_certification(seed):
    v = schur.random_schur(2, 3, 4, seed)
    assert schur.grid_certify(v, points=256, radius=0.999) <= 1.0 + 1e-9


def test_random_schur_deterministic():
    a = schur.random_schur(2, 2, 3, 123)
    b = schur.random_schur(2, 2, 3, 123)
    np.testing.assert_allclose(a.system.system_matrix(), b.system.system_matrix())


def test_random_schur_static_state():
    v = schur.random_schur(3, 2, 0, 7)
    assert v.system.state_dim == 0
    assert linalg.operator_norm(schur.eval(v, 0.5)) <= 1.0


@pytest.mark.parametrize("kind_seed", [0, 1])
def test_taylor_partial_sums_converge(kind_seed):
    v = schur.random_schur(2, 2, 3, kind_seed)
    deg = 80
    ts = schur.taylor(v, deg)
    lam = 0.5
    partial = ts(lam)
    exact = schur.eval(v, lam)
    assert linalg.operator_norm(partial - exact) < 2.0 * 0.5**deg / 0.5


def test_taylor_static_kinds():
    vz = schur.zero(1, 2)
    assert all(linalg.operator_norm(c) == 0 for c in schur.taylor(vz, 4).coeffs)
    c = np.array([[0.4], [0.2]])
    ts = schur.taylor(schur.constant(c), 4)
    np.testing.assert_allclose(ts.coeffs[0], c)
    assert all(linalg.operator_norm(x) == 0 for x in ts.coeffs[1:])


def test_left_multiply_flips_signs():
    v = schur.random_schur(1, 2, 2, 3)
    s = np.diag([1.0, -1.0])
    w = schur.left_multiply(s, v)
    lam = 0.3 + 0.2j
    np.testing.assert_allclose(schur.eval(w, lam), s @ schur.eval(v, lam))


def test_left_multiply_dimension_check():
    v = schur.random_schur(1, 2, 2, 3)
    with pytest.raises(DimensionMismatch):
        schur.left_multiply(np.eye(3), v)
