import numpy as np
import pytest

from rclift import generators, hardy, lifting, nehari, redheffer, schur
from rclift.errors import HankelNotStrict
from rclift.linalg import adj, eye, operator_norm

SCALAR = nehari.NehariProblem(2, 1, 1, (np.array([[0.5]]),))


def test_hankel_zero_taps():
    p = nehari.NehariProblem(3, 2, 1, ())
    assert operator_norm(nehari.hankel(p)) == 0.0


def test_hankel_scalar_rank_one():
    a = nehari.hankel(SCALAR)
    np.testing.assert_allclose(a, np.array([[0.5, 0.0]]))
    assert abs(operator_norm(a) - 0.5) < 1e-14


def test_hankel_window_one_is_column():
    taps = (np.array([[0.3]]), np.array([[0.2]]), np.array([[0.1]]))
    p = nehari.NehariProblem(1, 1, 1, taps)
    np.testing.assert_allclose(nehari.hankel(p), np.array([[0.3], [0.2], [0.1]]))


def test_hankel_row_guard():
    with pytest.raises(ValueError):
        nehari.hankel(SCALAR, rows=0)


def test_gram_cases():
    p0 = nehari.NehariProblem(3, 2, 2, ())
    np.testing.assert_allclose(nehari.gram(p0), eye(6))
    np.testing.assert_allclose(nehari.gram(SCALAR), np.diag([0.75, 1.0]), atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_gram_matches_hankel_defect(seed):
    rng = np.random.default_rng(seed)
    p = generators.random_nehari_problem(
        rng, int(rng.integers(1, 4)), int(rng.integers(1, 4)),
        int(rng.integers(1, 5)), int(rng.integers(1, 6)), 0.85
    )
    a = nehari.hankel(p)
    np.testing.assert_allclose(
        nehari.gram(p), eye(a.shape[1]) - adj(a) @ a, atol=1e-10
    )


def test_lambda_cross_cases():
    p0 = nehari.NehariProblem(2, 1, 2, ())
    np.testing.assert_allclose(nehari.lambda_cross(p0), eye(2))
    np.testing.assert_allclose(
        nehari.lambda_cross(SCALAR), np.diag([4.0 / 3.0, 1.0]), atol=1e-14
    )
    lam_x = nehari.lambda_cross(SCALAR)
    u = SCALAR.u_dim
    for n in (1, 2):
        block = lam_x[(n - 1) * u : n * u, (n - 1) * u : n * u]
        assert np.linalg.eigvalsh(block).min() > 0


def test_lambda_cross_rejects_unit_norm():
    p = nehari.NehariProblem(1, 1, 1, (np.array([[1.0]]),))
    with pytest.raises(HankelNotStrict):
        nehari.lambda_cross(p)


def test_schur_complement_corner_identity():
    rng = np.random.default_rng(7)
    p = generators.random_nehari_problem(rng, 2, 2, 3, 4, 0.8)
    n_w, u = p.n_window, p.u_dim
    lam = nehari.gram(p)
    lam_x = nehari.lambda_cross(p)
    corner_inv = np.linalg.inv(lam[: (n_w - 1) * u, : (n_w - 1) * u])
    upper = lam_x[: (n_w - 1) * u, : (n_w - 1) * u]
    col = lam_x[: (n_w - 1) * u, (n_w - 1) * u :]
    low = lam_x[(n_w - 1) * u :, (n_w - 1) * u :]
    shortcut = upper - col @ np.linalg.inv(low) @ adj(col)
    assert operator_norm(shortcut - corner_inv) < 1e-10


def test_solve_g_cases():
    p0 = nehari.NehariProblem(3, 1, 1, ())
    assert all(operator_norm(g) == 0 for g in nehari.solve_g(p0))
    np.testing.assert_allclose(nehari.solve_g(SCALAR)[0], np.array([[2.0 / 3.0]]))
    p1 = nehari.NehariProblem(1, 1, 1, (np.array([[0.4]]),))
    assert nehari.solve_g(p1) == []


@pytest.mark.parametrize("seed", range(4))
def test_solve_g_residual(seed):
    rng = np.random.default_rng(seed)
    p = generators.random_nehari_problem(rng, 2, 1, 4, 3, 0.8)
    g_row = nehari.solve_g(p)
    n_w, u = p.n_window, p.u_dim
    corner = nehari.gram(p)[: (n_w - 1) * u, : (n_w - 1) * u]
    lhs = corner @ np.vstack([adj(g) for g in g_row])
    rhs = np.vstack([adj(p.tap(i)) for i in range(1, n_w)])
    assert operator_norm(lhs - rhs) < 1e-9


def test_coefficients_zero_taps():
    p = nehari.NehariProblem(3, 2, 1, ())
    nc = nehari.coefficients(p)
    shift = np.zeros((6, 6))
    shift[:2, 2:4] = np.eye(2)
    shift[2:4, 4:] = np.eye(2)
    np.testing.assert_allclose(nc.t_state, shift)
    assert operator_norm(nc.c1) == 0.0
    np.testing.assert_allclose(nc.c2, np.vstack([np.zeros((4, 2)), np.eye(2)]))


def test_coefficients_scalar_example():
    nc = nehari.coefficients(SCALAR)
    np.testing.assert_allclose(nc.t_state, np.array([[0, 1], [0, 0]]), atol=1e-14)
    assert operator_norm(nc.c1) < 1e-14
    np.testing.assert_allclose(nc.c2, np.array([[0.0], [1.0]]), atol=1e-14)
    np.testing.assert_allclose(nc.f_row, np.array([[0.5, 0.0]]))
    np.testing.assert_allclose(nc.g_big, np.array([[2.0 / 3.0, 0.0]]), atol=1e-14)
    i_fg = nc.i_plus_fg_half @ nc.i_plus_fg_half
    np.testing.assert_allclose(i_fg, np.array([[4.0 / 3.0]]), atol=1e-12)


def test_coefficients_window_one():
    p = nehari.NehariProblem(1, 2, 1, (np.array([[0.3, 0.1]]),))
    nc = nehari.coefficients(p)
    assert operator_norm(nc.t_state) == 0.0
    assert operator_norm(nc.c1) == 0.0
    lam11 = nc.lam_cross
    np.testing.assert_allclose(
        nc.c2 @ nc.c2, lam11, atol=1e-12
    )  # C2 = (top corner)^(1/2) when the window is one


@pytest.mark.parametrize("seed", range(4))
def test_coefficients_cross_check_against_lifting(seed):
    rng = np.random.default_rng(seed)
    p = generators.random_nehari_problem(
        rng, int(rng.integers(1, 3)), int(rng.integers(1, 3)),
        int(rng.integers(2, 4)), int(rng.integers(1, 4)), 0.8
    )
    nc = nehari.coefficients(p)
    rc = redheffer.build_coefficients(lifting.derive(nehari.to_lifting_data(p)))
    assert operator_norm(rc.x1 - nc.t_state) < 1e-8
    assert operator_norm(rc.x2 + nc.b_hat()) < 1e-8
    assert nc.r_spec_t_state < 1.0


def test_phi_hat_zero_taps_closed_forms():
    p = nehari.NehariProblem(3, 2, 1, ())
    nc = nehari.coefficients(p)
    for lam in (0.3, -0.4j):
        p11, p12, p21, p22 = nehari.phi_hat_eval(nc, lam)
        np.testing.assert_allclose(
            p11, np.hstack([np.zeros((2, 1)), -(lam**3) * np.eye(2)]), atol=1e-12
        )
        np.testing.assert_allclose(p12, np.eye(2), atol=1e-14)
        np.testing.assert_allclose(p21, np.hstack([np.eye(1), np.zeros((1, 2))]), atol=1e-14)
        assert operator_norm(p22) < 1e-14


def test_phi_hat_scalar_example():
    nc = nehari.coefficients(SCALAR)
    s3 = np.sqrt(3.0)
    for lam in (0.0, 0.5, 0.2 - 0.6j):
        p11, p12, p21, p22 = nehari.phi_hat_eval(nc, lam)
        np.testing.assert_allclose(p11, [[-lam / 2, -s3 / 2 * lam**2]], atol=1e-12)
        np.testing.assert_allclose(p12, [[s3 / 2]], atol=1e-12)
        np.testing.assert_allclose(p21, [[s3 / 2, -lam / 2]], atol=1e-12)
        assert operator_norm(p22) < 1e-14


def test_phi_hat_taylor_matches_eval():
    rng = np.random.default_rng(3)
    p = generators.random_nehari_problem(rng, 2, 2, 3, 3, 0.8)
    nc = nehari.coefficients(p)
    series = nehari.phi_hat_taylor(nc, 40)
    lam = 0.45 * np.exp(0.9j)
    values = nehari.phi_hat_eval(nc, lam)
    for ts, val in zip(series, values):
        assert operator_norm(ts(lam) - val) < 1e-9


def test_solve_h_central_scalar():
    nc = nehari.coefficients(SCALAR)
    h = nehari.solve_h(nc, schur.zero(1, 2), 12)
    assert all(operator_norm(c) < 1e-14 for c in h.coeffs)
    rep = nehari.assemble_l(SCALAR, h)
    assert abs(rep.sigma_max - 0.5) < 1e-12


def test_solve_h_pure_input_direction_zero_taps():
    p = nehari.NehariProblem(2, 1, 1, ())
    nc = nehari.coefficients(p)
    v = schur.constant(np.array([[0.0], [1.0]]))  # no output component
    h = nehari.solve_h(nc, v, 10)
    assert all(operator_norm(c) < 1e-14 for c in h.coeffs)


def test_assemble_l_rejects_oversized_coefficient():
    h = hardy.TaylorSeries((np.array([[2.0, ]]), ), tail_bound=0.0)
    rep = nehari.assemble_l(nehari.NehariProblem(1, 1, 1, ()), h)
    assert rep.sigma_max >= 2.0
    assert not rep.accepted()


@pytest.mark.parametrize("seed", range(6))
def test_forward_soundness_sweep(seed):
    rng = np.random.default_rng(seed)
    p = generators.random_nehari_problem(
        rng, int(rng.integers(1, 4)), int(rng.integers(1, 4)),
        int(rng.integers(1, 5)), int(rng.integers(1, 6)), 0.9 * rng.uniform(0.4, 1.0)
    )
    nc = nehari.coefficients(p)
    assert nc.r_spec_t_state < 1.0
    v = schur.random_schur(p.u_dim, p.y_dim + p.u_dim, int(rng.integers(0, 4)), seed)
    h = nehari.solve_h(nc, v, 48)
    rep = nehari.assemble_l(p, h)
    assert rep.accepted(1e-6)


def test_hat_m_zero_taps_exact():
    for n_w in (1, 2, 3):
        p = nehari.NehariProblem(n_w, 1, 2, ())
        rep = nehari.hat_m_check(nehari.coefficients(p), n_w)
        assert rep.residual <= 1e-10
        assert rep.slack == 0.0


def test_hat_m_scalar_example():
    nc = nehari.coefficients(SCALAR)
    rep = nehari.hat_m_check(nc, 64)
    assert rep.residual <= 1e-8


def test_hat_m_residual_nonincreasing():
    rng = np.random.default_rng(4)
    p = generators.random_nehari_problem(rng, 1, 1, 2, 2, 0.8)
    nc = nehari.coefficients(p)
    res = [nehari.hat_m_check(nc, d).residual for d in (8, 16, 32)]
    assert res[0] >= res[1] - 1e-12 and res[1] >= res[2] - 1e-12


def test_special_n1_zero_parameter():
    p = nehari.NehariProblem(1, 2, 1, (np.array([[0.3, 0.1]]),))
    h = nehari.special_n1(p, schur.zero(2, 3), 8)
    assert all(operator_norm(c) == 0 for c in h.coeffs)


def test_special_n1_constant_parameter_feasible():
    p = nehari.NehariProblem(1, 1, 1, (np.array([[0.5]]),))
    v = schur.constant(np.array([[0.6], [0.0]]))
    h = nehari.special_n1(p, v, 24)
    assert all(operator_norm(h.coeffs[k]) < 1e-14 for k in range(1, 25))
    full = hardy.TaylorSeries(h.coeffs, tail_bound=0.0)
    rep = nehari.assemble_l(p, full)
    assert rep.sigma_max <= 1.0 + 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_special_n1_bridge_agreement(seed):
    rng = np.random.default_rng(seed)
    u, y = int(rng.integers(1, 3)), int(rng.integers(1, 3))
    p = generators.random_nehari_problem(rng, u, y, 1, int(rng.integers(1, 5)),
                                         float(rng.uniform(0.2, 0.85)))
    v = schur.random_schur(u, y + u, int(rng.integers(0, 4)), seed + 100)
    h = nehari.solve_h(nehari.coefficients(p), v, 20)
    bridge = np.block([
        [eye(y), np.zeros((y, u))],
        [np.zeros((u, y)), -eye(u)],
    ])
    s = nehari.special_n1(p, schur.left_multiply(bridge, v), 20)
    assert max(operator_norm(a - b) for a, b in zip(h.coeffs, s.coeffs)) < 1e-8


@pytest.mark.parametrize("seed", range(5))
def test_special_f0_direct_agreement(seed):
    rng = np.random.default_rng(seed)
    u, y, n_w = int(rng.integers(1, 3)), int(rng.integers(1, 3)), int(rng.integers(1, 5))
    v = schur.random_schur(u, y + u, int(rng.integers(0, 4)), seed + 200)
    p = nehari.NehariProblem(n_w, u, y, ())
    h = nehari.solve_h(nehari.coefficients(p), v, 20)
    f = nehari.special_f0(n_w, u, y, v, 20)
    assert max(operator_norm(a - b) for a, b in zip(h.coeffs, f.coeffs)) < 1e-10


def test_special_f0_identity_parameter():
    # V = [1; 0]: the solution is constantly the identity, and the
    # lower-triangular coefficient operator is an isometry
    v = schur.constant(np.array([[1.0], [0.0]]))
    f = nehari.special_f0(3, 1, 1, v, 12)
    np.testing.assert_allclose(complex(f.coeffs[0][0, 0]), 1.0)
    assert all(operator_norm(c) < 1e-14 for c in f.coeffs[1:])
    p = nehari.NehariProblem(3, 1, 1, ())
    full = hardy.TaylorSeries(f.coeffs, tail_bound=0.0)
    rep = nehari.assemble_l(p, full)
    assert abs(rep.sigma_max - 1.0) < 1e-12


def test_companion_conjugation():
    rng = np.random.default_rng(11)
    p = generators.random_nehari_problem(rng, 2, 2, 4, 3, 0.85)
    nc = nehari.coefficients(p)
    n_w, u = p.n_window, p.u_dim
    e = nehari.flip_operator(n_w, u)
    coeffs = [np.zeros((u, u), dtype=complex)]
    for j in range(1, n_w + 1):
        coeffs.append(nc.lam_cross[(n_w - j) * u : (n_w - j + 1) * u, :u])
    comp = nehari.second_companion(coeffs)
    assert operator_norm(e @ nc.t_state @ e - comp) < 1e-12


def test_parrott_style_direct_oracle():
    # tiny scalar instance: every certified parameter stays feasible, and
    # direct coefficient perturbations of the central solution cross the
    # feasibility boundary exactly where the norm says they do
    p = nehari.NehariProblem(2, 1, 1, (np.array([[0.4]]), np.array([[0.2]])))
    nc = nehari.coefficients(p)
    deg = 6
    for seed in range(1000):
        v = schur.random_schur(1, 2, seed % 3, seed)
        h = nehari.solve_h(nc, v, deg)
        rep = nehari.assemble_l(p, h)
        assert rep.accepted(1e-6), seed
    central = nehari.solve_h(nc, schur.zero(1, 2), deg)
    base = nehari.assemble_l(p, central).sigma_max
    assert base <= 1.0
    sigmas = []
    for t in np.linspace(0.0, 1.2, 13):
        coeffs = list(central.coeffs)
        coeffs[0] = coeffs[0] + t
        pert = hardy.TaylorSeries(tuple(coeffs), tail_bound=central.tail_bound)
        sigmas.append(nehari.assemble_l(p, pert).sigma_max)
    assert all(b >= a - 1e-12 for a, b in zip(sigmas, sigmas[1:]))
    assert sigmas[0] <= 1.0 and sigmas[-1] > 1.0


def test_to_lifting_data_validates():
    rng = np.random.default_rng(12)
    for n_w in (1, 2, 4):
        p = generators.random_nehari_problem(rng, 2, 1, n_w, 3, 0.8)
        rep = lifting.validate(nehari.to_lifting_data(p))
        assert rep.passed and rep.strictness.strict_ok
