"""State-space coefficients of the linear fractional solution formula.

For a strict instance the four coefficient functions

    P11(lam) = lam * X3 (I - lam X1)^-1 X2,   P12(lam) = X3 (I - lam X1)^-1,
    P21(lam) = X5 + lam * X4 (I - lam X1)^-1 X2,   P22(lam) = X4 (I - lam X1)^-1,

are built from five operators X1..X5 and three positive definite weights.
Every solution of the lifting problem is P22 + P21 V (I - P11 V)^-1 P12
over a free Schur parameter V; V = 0 gives the central solution.  The
input space of X2/X5 is the orthogonal sum of the gap-defect coordinates,
the dilation-defect coordinates, and Ker R*, in that order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import schur
from .errors import DimensionMismatch, NotClassicalShape, ResolventSingular
from .hardy import (
    SolutionTaylor,
    TaylorSeries,
    mult_matrix,
    observability_matrix,
    tail_sq_bound,
)
from .lifting import DerivedData, left_inverse_dar
from .linalg import (
    adj,
    eye,
    inv_hpd,
    kernel_embedding,
    operator_norm,
    psd_sqrt,
    solve_hpd,
    spectral_radius,
    zeros,
)


@dataclass(frozen=True)
class RedhefferCoefficients:
    """The realization data (X1..X5, weights) of the coefficient functions."""

    dd: DerivedData
    x1: np.ndarray
    x2: np.ndarray
    x3: np.ndarray
    x4: np.ndarray
    x5: np.ndarray
    delta_q: np.ndarray
    delta_r: np.ndarray
    delta_omega: np.ndarray
    r_spec_x1: float
    input_split: tuple[int, int, int]

    @property
    def w_dim(self) -> int:
        """Dimension of the parameter output space (X2/X5 input)."""
        return sum(self.input_split)

    @property
    def kq_dim(self) -> int:
        return self.x3.shape[0]

    @property
    def dt_dim(self) -> int:
        return self.x4.shape[0]

    def split_cols(self, m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Address the gap / dilation-defect / Ker R* blocks of a W-matrix."""
        d0, dt, _ = self.input_split
        return m[:, :d0], m[:, d0:d0 + dt], m[:, d0 + dt:]


def build_coefficients(dd: DerivedData) -> RedhefferCoefficients:
    """Assemble X1..X5 and the weights from derived data (strict only)."""
    dd.require_strict()
    ds = dd.ds
    d_a_sq = dd.d_a @ dd.d_a
    qdq = adj(ds.q) @ d_a_sq @ ds.q
    rdr = adj(ds.r) @ d_a_sq @ ds.r

    e_q = dd.ker_q_star.basis
    e_r = dd.ker_r_star.basis
    d0 = dd.dim_d_circ
    dt = dd.dim_dt
    kr = e_r.shape[1]

    delta_omega = eye(d0 + dt) + dd.j @ solve_hpd(rdr, adj(dd.j))
    delta_q = adj(e_q) @ dd.d_a_sq_inv @ e_q
    delta_r = adj(e_r) @ dd.d_a_sq_inv @ e_r

    dom_nh = psd_sqrt(inv_hpd(delta_omega))
    dq_nh = psd_sqrt(inv_hpd(delta_q))
    dr_nh = psd_sqrt(inv_hpd(delta_r))

    x1 = ds.r @ solve_hpd(qdq, adj(ds.q) @ d_a_sq)
    x2 = np.hstack(
        [
            -ds.r @ solve_hpd(rdr, adj(dd.j)) @ dom_nh,
            -dd.d_a_sq_inv @ e_r @ dr_nh,
        ]
    )
    x3 = dq_nh @ adj(e_q)
    dtc_a = dd.dt_embedding.coords(dd.d_t_prime @ ds.a)
    x4 = dtc_a @ x1
    x5 = np.hstack([dom_nh[d0:, :], zeros(dt, kr)])

    return RedhefferCoefficients(
        dd=dd,
        x1=x1,
        x2=x2,
        x3=x3,
        x4=x4,
        x5=x5,
        delta_q=delta_q,
        delta_r=delta_r,
        delta_omega=delta_omega,
        r_spec_x1=spectral_radius(x1),
        input_split=(d0, dt, kr),
    )


def delta_omega_inverse_residual(rc: RedhefferCoefficients) -> float:
    """Residual of the closed-form inverse of the omega weight.

    The inverse must equal I - J (Q* D_A^2 Q)^-1 J*, computed here from
    scratch against a direct HPD inversion.
    """
    dd = rc.dd
    ds = dd.ds
    qdq = adj(ds.q) @ (dd.d_a @ dd.d_a) @ ds.q
    closed = eye(dd.j.shape[0]) - dd.j @ solve_hpd(qdq, adj(dd.j))
    return operator_norm(inv_hpd(rc.delta_omega) - closed)


def x_tilde_matrix(rc: RedhefferCoefficients) -> np.ndarray:
    """The similarity-conjugated block matrix [[X1~, X2~], [X3~, 0], [X4~, X5~]].

    Conjugation by D_A turns the coefficient data into a contraction; the
    block matrix is unitary exactly when the defect gap vanishes.
    """
    dd = rc.dd
    da, dai = dd.d_a, dd.d_a_inv
    x1t = da @ rc.x1 @ dai
    x2t = da @ rc.x2
    x3t = rc.x3 @ dai
    x4t = rc.x4 @ dai
    return np.block(
        [
            [x1t, x2t],
            [x3t, zeros(rc.kq_dim, rc.w_dim)],
            [x4t, rc.x5],
        ]
    )


def _resolvent(rc: RedhefferCoefficients, lam: complex) -> np.ndarray:
    if abs(lam) >= 1.0:
        raise ValueError("coefficient functions live on the open unit disc")
    n = rc.x1.shape[0]
    try:
        return np.linalg.inv(eye(n) - lam * rc.x1)
    except np.linalg.LinAlgError as exc:
        raise ResolventSingular(f"I - lam*X1 singular at lam={lam!r}") from exc


def phi_eval(
    rc: RedhefferCoefficients, lam: complex
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Evaluate (P11, P12, P21, P22) at a disc point."""
    res = _resolvent(rc, lam)
    p11 = lam * rc.x3 @ res @ rc.x2
    p12 = rc.x3 @ res
    p21 = rc.x5 + lam * rc.x4 @ res @ rc.x2
    p22 = rc.x4 @ res
    return p11, p12, p21, p22


def phi_taylor(
    rc: RedhefferCoefficients, deg: int
) -> tuple[TaylorSeries, TaylorSeries, TaylorSeries, TaylorSeries]:
    """Taylor coefficients of the four coefficient functions to degree deg."""
    c11 = [zeros(rc.kq_dim, rc.w_dim)]
    c12 = [rc.x3.copy()]
    c21 = [rc.x5.copy()]
    c22 = [rc.x4.copy()]
    x3p = rc.x3
    x4p = rc.x4
    for _ in range(deg):
        c11.append(x3p @ rc.x2)
        c21.append(x4p @ rc.x2)
        x3p = x3p @ rc.x1
        x4p = x4p @ rc.x1
        c12.append(x3p)
        c22.append(x4p)
    return (
        TaylorSeries(tuple(c11)),
        TaylorSeries(tuple(c12)),
        TaylorSeries(tuple(c21)),
        TaylorSeries(tuple(c22)),
    )


def z_from_v(
    dd: DerivedData,
    rc: RedhefferCoefficients,
    v: schur.SchurParameter,
    lam: complex,
) -> np.ndarray:
    """The underlying disc function pinned to omega on F, at one point.

    Maps the contraction defect space into the orthogonal sum of dilation
    defect and contraction defect coordinates; its restriction to the F
    basis equals omega for every parameter and every disc point.
    """
    if v.in_dim != rc.kq_dim or v.out_dim != rc.w_dim:
        raise DimensionMismatch(
            f"parameter dims {v.out_dim}x{v.in_dim}, "
            f"expected {rc.w_dim}x{rc.kq_dim}"
        )
    dai = dd.d_a_inv
    base = np.vstack([rc.x4 @ dai, dd.d_a @ rc.x1 @ dai])
    gain = np.vstack([rc.x5, dd.d_a @ rc.x2])
    return base + gain @ schur.eval(v, lam) @ (rc.x3 @ dai)


def _v_realization(v: schur.SchurParameter) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """State-space quadruple of a parameter (trivial state when static)."""
    if v.kind == "transfer":
        sys = v.system
        return sys.a_s, sys.b_s, sys.c_s, sys.d_s
    d = v.matrix if v.kind == "constant" else zeros(v.out_dim, v.in_dim)
    return zeros(0, 0), zeros(0, v.in_dim), zeros(v.out_dim, 0), d


def closed_loop_realization(
    rc: RedhefferCoefficients, v: schur.SchurParameter
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Realization (A_cl, C_cl, E_cl) of the solved feedback loop.

    The solution function equals C_cl (I - lam A_cl)^-1 E_cl: the loop
    state stacks the coefficient state on top of the parameter state, so
    Taylor coefficients come out as C_cl @ A_cl^k @ E_cl.
    """
    if v.in_dim != rc.kq_dim or v.out_dim != rc.w_dim:
        raise DimensionMismatch(
            f"parameter dims {v.out_dim}x{v.in_dim}, "
            f"expected {rc.w_dim}x{rc.kq_dim}"
        )
    av, bv, cv, dv = _v_realization(v)
    h = rc.x1.shape[0]
    sv = av.shape[0]
    a_cl = np.block(
        [
            [rc.x1 + rc.x2 @ dv @ rc.x3, rc.x2 @ cv],
            [bv @ rc.x3, av],
        ]
    )
    c_cl = np.hstack([rc.x4 + rc.x5 @ dv @ rc.x3, rc.x5 @ cv])
    e_cl = np.vstack([eye(h), zeros(sv, h)])
    return a_cl, c_cl, e_cl


def solution_taylor(
    rc: RedhefferCoefficients, v: schur.SchurParameter, deg: int
) -> SolutionTaylor:
    """Taylor coefficients of the solution attached to a Schur parameter.

    Coefficient tails are bounded geometrically through the closed-loop
    state matrix when its power norms certify decay; otherwise the tail
    bound is absent (this happens when the coefficient state matrix has
    spectral radius at or above one).
    """
    a_cl, c_cl, e_cl = closed_loop_realization(rc, v)
    gammas = []
    cur = e_cl
    for _ in range(deg + 1):
        gammas.append(c_cl @ cur)
        cur = a_cl @ cur
    tail = tail_sq_bound(a_cl, c_cl, deg, post=e_cl)
    return SolutionTaylor(a_part=rc.dd.ds.a, gamma_coeffs=tuple(gammas), tail_bound=tail)


# --- the stacked multiplication operator ---------------------------------------


def assemble_m(rc: RedhefferCoefficients, deg: int, extra: int = 16) -> np.ndarray:
    """Truncation of the stacked solution operator.

    Rows: the base space, then coefficient rows (0..deg+extra) of the two
    Hardy-space outputs; columns: coefficient columns (0..deg) of the
    parameter-output space, then the base domain.  Always a contraction;
    an isometry up to tail slack when the defect gap vanishes and the
    coefficient state is stable.
    """
    ds = rc.dd.ds
    deg_out = deg + extra
    p11, p12, p21, p22 = phi_taylor(rc, deg_out)
    m11 = mult_matrix(p11, deg, deg_out=deg_out)
    m21 = mult_matrix(p21, deg, deg_out=deg_out)
    g12 = observability_matrix(p12)
    g22 = observability_matrix(p22)
    h_prime = ds.dim_h_prime
    top = np.hstack([zeros(h_prime, (deg + 1) * rc.w_dim), ds.a])
    return np.block(
        [
            [top],
            [m11, g12],
            [m21, g22],
        ]
    )


def m_gram_slack(rc: RedhefferCoefficients, deg: int, extra: int = 16) -> float | None:
    """Bound on ||M_trunc* M_trunc - I|| caused by dropped coefficient rows.

    Sums the squared norms of every discarded block: multiplication rows
    beyond the output truncation plus the observability tail.  Returns
    None when no geometric certificate for the coefficient tail exists.
    """
    deg_out = deg + extra
    prefix = np.vstack([rc.x3, rc.x4])
    window = deg_out + 4 * 64
    # multiplication-part coefficients m -> X_{3,4} X1^(m-1) X2, counted
    # min(m - extra, deg + 1) times among the dropped rows
    total = 0.0
    cur = prefix
    for m in range(1, window + 1):
        cnt = min(max(m - extra, 0), deg + 1)
        if cnt:
            total += cnt * operator_norm(cur @ rc.x2) ** 2
        cur = cur @ rc.x1
    rem = tail_sq_bound(rc.x1, prefix, window - 1, post=rc.x2)
    if rem is None:
        return None
    total += (deg + 1) * rem
    obs = tail_sq_bound(rc.x1, prefix, deg_out)
    if obs is None:
        return None
    return total + obs


# --- proof-layer consistency checks ---------------------------------------------


@dataclass(frozen=True)
class YGramReport:
    residual: float
    sigma_min_y_star: float


def y_gram_check(dd: DerivedData) -> YGramReport:
    """Gram identity for the column operator behind the parameterization.

    Builds Y from the omega weight, J, the left inverse of D_A R, and the
    kernel coordinates of R* D_A, and compares Y*Y with the defect square
    of omega-adjoint.  Also reports the smallest singular value of Y*,
    which must be positive (trivial kernel).
    """
    dd.require_strict()
    ds = dd.ds
    d0 = dd.dim_d_circ
    dt = dd.dim_dt
    rdr = adj(ds.r) @ (dd.d_a @ dd.d_a) @ ds.r
    delta_omega = eye(d0 + dt) + dd.j @ solve_hpd(rdr, adj(dd.j))
    dom_nh = psd_sqrt(inv_hpd(delta_omega))
    l_dar = left_inverse_dar(dd)
    ker_rda = kernel_embedding(dd.d_a @ ds.r)
    kr = ker_rda.dim
    h = ds.dim_h
    embed_t = np.vstack([zeros(d0, dt), eye(dt)])
    y = np.block(
        [
            [dom_nh @ embed_t, -dom_nh @ dd.j @ l_dar],
            [zeros(kr, dt), -adj(ker_rda.basis)],
        ]
    )
    omega = dd.omega
    d_om_star_sq = eye(dt + h) - omega @ adj(omega)
    residual = operator_norm(adj(y) @ y - d_om_star_sq)
    svals = np.linalg.svd(y, compute_uv=False)
    sigma_min = float(svals[-1]) if svals.size else float("inf")
    return YGramReport(residual=residual, sigma_min_y_star=sigma_min)


def projection_identity_check(dd: DerivedData) -> tuple[float, float]:
    """Residuals of the weighted projection formulas onto Ker N* D_A.

    For N in {Q, R} the projector onto Ker N* D_A must equal
    D_A^-1 Pi* Delta_N^-1 Pi D_A^-1 with Pi the compression onto Ker N*;
    the oracle projector comes from an SVD kernel basis.
    """
    dd.require_strict()
    ds = dd.ds
    out = []
    for n_mat, emb in ((ds.q, dd.ker_q_star), (ds.r, dd.ker_r_star)):
        e = emb.basis
        delta = adj(e) @ dd.d_a_sq_inv @ e
        formula = dd.d_a_inv @ e @ solve_hpd(delta, adj(e)) @ dd.d_a_inv
        oracle = kernel_embedding(dd.d_a @ n_mat).projector()
        out.append(operator_norm(formula - oracle))
    return out[0], out[1]


def classical_phi_eval(
    dd: DerivedData, lam: complex, exponent_reading: str = "corrected"
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Closed-form coefficient functions for the classical shape (R = I,
    Q isometric), used only to cross-check the general pipeline.

    The printed closed forms carry ambiguous defect exponents: the Ker Q*
    weight appears with a first power where the general construction
    prescribes the square, and the derivation of the second Schur-class
    coefficient mixes first and second inverse powers in its middle
    factor.  `as-printed` keeps the first powers, `corrected` uses the
    squares throughout.  Exactly one reading agrees with the general
    pipeline; the suite records which.
    """
    if exponent_reading not in ("as-printed", "corrected"):
        raise ValueError(f"unknown exponent reading {exponent_reading!r}")
    ds = dd.ds
    h = ds.dim_h
    if ds.r.shape != (h, h) or operator_norm(ds.r - eye(h)) > 1e-10:
        raise NotClassicalShape("classical shape needs R = I")
    if operator_norm(adj(ds.q) @ ds.q - eye(ds.q.shape[1])) > 1e-10:
        raise NotClassicalShape("classical shape needs an isometric Q")
    dd.require_strict()
    if abs(lam) >= 1.0:
        raise ValueError("coefficient functions live on the open unit disc")

    d_a_sq = dd.d_a @ dd.d_a
    aq = ds.a @ ds.q
    daq_sq = eye(ds.q.shape[1]) - adj(aq) @ aq
    t_a = solve_hpd(daq_sq, adj(ds.q) @ d_a_sq)

    e_q = dd.ker_q_star.basis
    j_cls = dd.dt_embedding.coords(dd.d_t_prime @ ds.a)
    delta_om = eye(dd.dim_dt) + j_cls @ dd.d_a_sq_inv @ adj(j_cls)
    if exponent_reading == "as-printed":
        delta_q = adj(e_q) @ dd.d_a_inv @ e_q
        middle = dd.d_a_inv
    else:
        delta_q = adj(e_q) @ dd.d_a_sq_inv @ e_q
        middle = dd.d_a_sq_inv
    dq_nh = psd_sqrt(inv_hpd(delta_q))
    dom_nh = psd_sqrt(inv_hpd(delta_om))
    dom_h = psd_sqrt(delta_om)

    try:
        res = np.linalg.inv(eye(h) - lam * t_a)
    except np.linalg.LinAlgError as exc:
        raise ResolventSingular(f"I - lam*T_A singular at lam={lam!r}") from exc
    p11 = -lam * dq_nh @ adj(e_q) @ res @ dd.d_a_sq_inv @ adj(j_cls) @ dom_nh
    p12 = dq_nh @ adj(e_q) @ res
    p21 = dom_h - j_cls @ res @ middle @ adj(j_cls) @ dom_nh
    p22 = j_cls @ res @ t_a
    return p11, p12, p21, p22
