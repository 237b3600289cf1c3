"""The relaxed Nehari extension problem for finitely supported taps.

Data: a window size N and finitely many taps F_-1, ..., F_-K mapping U to
Y.  A sequence H_0, H_1, ... solves the problem when the doubly infinite
block matrix with the taps frozen above the diagonal and the H's filling
the lower triangle has norm at most one.  With finite tap support the
truncated Hankel matrix, its defect Gram, and every derived operator are
honest finite matrices, so all checks are exact up to truncation of the
solution tail.

Row indexing convention: the combined operator has integer row indices
with H_0 boxed at index 0 and tap rows at negative indices; matrices are
serialized bottom-up, so coordinate n corresponds to index -n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import schur
from .errors import CornerNotPD, DimensionMismatch, HankelNotStrict, ResolventSingular
from .hardy import TaylorSeries, mult_matrix, observability_matrix, tail_sq_bound
from .lifting import LiftingDataSet
from .linalg import (
    adj,
    cmatrix,
    eye,
    inv_hpd,
    min_eig_hermitian,
    operator_norm,
    psd_sqrt,
    solve_hpd,
    spectral_radius,
    zeros,
)

GRAM_MIN_EIG = 1e-8


@dataclass(frozen=True)
class NehariProblem:
    """Window size, port dimensions, and the finitely many nonzero taps."""

    n_window: int
    u_dim: int
    y_dim: int
    taps: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.n_window < 1:
            raise ValueError("the window size must be at least 1")
        if self.u_dim < 0 or self.y_dim < 0:
            raise ValueError("port dimensions must be nonnegative")
        taps = tuple(cmatrix(t) for t in self.taps)
        for t in taps:
            if t.shape != (self.y_dim, self.u_dim):
                raise DimensionMismatch(
                    f"tap shape {t.shape}, expected ({self.y_dim}, {self.u_dim})"
                )
        object.__setattr__(self, "taps", taps)

    @property
    def k_taps(self) -> int:
        return len(self.taps)

    def tap(self, n: int) -> np.ndarray:
        """F_{-n}; zero for n beyond the stored support (n >= 1)."""
        if n < 1:
            raise IndexError("taps are indexed from 1 (meaning F_{-1})")
        if n <= len(self.taps):
            return self.taps[n - 1]
        return zeros(self.y_dim, self.u_dim)


def hankel(p: NehariProblem, rows: int | None = None) -> np.ndarray:
    """The N-truncated Hankel matrix, serialized bottom-up.

    Block row n (coordinate n, index -n) is [F_-n, F_-n-1, ..., F_-n-N+1].
    With rows >= K no nonzero row is dropped, so the norm is the exact
    Hankel norm.
    """
    if rows is None:
        rows = max(p.k_taps, 1)
    if rows < p.k_taps:
        raise ValueError(f"rows={rows} would drop nonzero tap rows (K={p.k_taps})")
    out = zeros(rows * p.y_dim, p.n_window * p.u_dim)
    for n in range(1, rows + 1):
        for j in range(p.n_window):
            out[
                (n - 1) * p.y_dim : n * p.y_dim,
                j * p.u_dim : (j + 1) * p.u_dim,
            ] = p.tap(n + j)
    return out


def gram(p: NehariProblem) -> np.ndarray:
    """The defect Gram of the Hankel matrix, from the displayed sums.

    Block (i, j) is I - sum_{n>=i} F_-n* F_-n on the diagonal and
    -sum_{n>=i} F_-n* F_{-n+i-j} off it (all sums finite).  Equals
    I - A*A of the Hankel matrix.
    """
    n_w, u, k = p.n_window, p.u_dim, p.k_taps
    out = zeros(n_w * u, n_w * u)
    for i in range(1, n_w + 1):
        for j in range(1, n_w + 1):
            block = zeros(u, u)
            for n in range(i, k + 1):
                m = n - i + j
                if 1 <= m <= k:
                    block -= adj(p.tap(n)) @ p.tap(m)
            if i == j:
                block += eye(u)
            out[(i - 1) * u : i * u, (j - 1) * u : j * u] = block
    return 0.5 * (out + adj(out))


def lambda_cross(p: NehariProblem) -> np.ndarray:
    """Inverse of the defect Gram; requires a strictly contractive Hankel."""
    g = gram(p)
    if min_eig_hermitian(g) < GRAM_MIN_EIG:
        raise HankelNotStrict(
            f"defect Gram min eigenvalue {min_eig_hermitian(g):.3e} < {GRAM_MIN_EIG:g}"
        )
    return inv_hpd(g)


def _block(m: np.ndarray, i: int, j: int, u: int) -> np.ndarray:
    """1-based u x u block (i, j) of a square block matrix."""
    return m[(i - 1) * u : i * u, (j - 1) * u : j * u]


def solve_g(p: NehariProblem) -> list[np.ndarray]:
    """Solve the corner system for [G_1 ... G_{N-1}].

    The (N-1)-corner of the Gram applied to the stacked adjoints must give
    the stacked tap adjoints; empty for N = 1.
    """
    n_w, u, y = p.n_window, p.u_dim, p.y_dim
    if n_w == 1:
        return []
    corner = gram(p)[: (n_w - 1) * u, : (n_w - 1) * u]
    if min_eig_hermitian(corner) <= 0.0:
        raise CornerNotPD("leading Gram corner is not positive definite")
    rhs = np.vstack([adj(p.tap(i)) for i in range(1, n_w)])
    sol = solve_hpd(corner, rhs)
    return [adj(sol[(i - 1) * u : i * u, :]) for i in range(1, n_w)]


@dataclass(frozen=True)
class NehariCoefficients:
    """Operators of the closed-form solution description."""

    problem: NehariProblem
    lam: np.ndarray
    lam_cross: np.ndarray
    g_row: tuple[np.ndarray, ...]
    t_state: np.ndarray
    e_n: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    f_row: np.ndarray
    g_big: np.ndarray
    i_plus_fg_half: np.ndarray
    i_plus_fg_neg_half: np.ndarray
    lam11_neg_half: np.ndarray
    r_spec_t_state: float

    @property
    def state_dim(self) -> int:
        return self.t_state.shape[0]

    def b_hat(self) -> np.ndarray:
        """The compound input block [G*(I+FG*)^(-1/2), C2] on Y + U."""
        return np.hstack([adj(self.g_big) @ self.i_plus_fg_neg_half, self.c2])


def coefficients(p: NehariProblem) -> NehariCoefficients:
    """Derive every operator of the closed-form description."""
    n_w, u, y = p.n_window, p.u_dim, p.y_dim
    lam = gram(p)
    lam_x = lambda_cross(p)
    g_row = solve_g(p)

    lam11 = _block(lam_x, 1, 1, u)
    lam11_inv = inv_hpd(lam11)
    lam_nn = _block(lam_x, n_w, n_w, u)

    t_state = zeros(n_w * u, n_w * u)
    for i in range(1, n_w):
        t_state[(i - 1) * u : i * u, i * u : (i + 1) * u] = eye(u)
        t_state[(i - 1) * u : i * u, :u] = -_block(lam_x, i + 1, 1, u) @ lam11_inv

    e_n = np.vstack([eye(u)] + [zeros(u, u)] * (n_w - 1))
    c1 = np.vstack(
        [_block(lam_x, i, 1, u) for i in range(2, n_w + 1)] + [zeros(u, u)]
    ) @ lam11_inv
    c2 = np.vstack([_block(lam_x, i, n_w, u) for i in range(1, n_w + 1)]) @ psd_sqrt(
        inv_hpd(lam_nn)
    )
    f_row = np.hstack([p.tap(n) for n in range(1, n_w + 1)])
    g_big = np.hstack(g_row + [zeros(y, u)] * (n_w - len(g_row)))

    i_fg = eye(y) + f_row @ adj(g_big)
    i_fg_half = psd_sqrt(i_fg)
    i_fg_neg_half = psd_sqrt(inv_hpd(i_fg))

    return NehariCoefficients(
        problem=p,
        lam=lam,
        lam_cross=lam_x,
        g_row=tuple(g_row),
        t_state=t_state,
        e_n=e_n,
        c1=c1,
        c2=c2,
        f_row=f_row,
        g_big=g_big,
        i_plus_fg_half=i_fg_half,
        i_plus_fg_neg_half=i_fg_neg_half,
        lam11_neg_half=psd_sqrt(lam11_inv),
        r_spec_t_state=spectral_radius(t_state),
    )


def phi_hat_eval(
    nc: NehariCoefficients, lam: complex
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Evaluate the four closed-form coefficient functions at a disc point."""
    if abs(lam) >= 1.0:
        raise ValueError("coefficient functions live on the open unit disc")
    n = nc.state_dim
    try:
        res = np.linalg.inv(eye(n) - lam * nc.t_state)
    except np.linalg.LinAlgError as exc:
        raise ResolventSingular(f"I - lam*T singular at lam={lam!r}") from exc
    b_hat = nc.b_hat()
    en_res = adj(nc.e_n) @ res
    p11 = -lam * nc.lam11_neg_half @ en_res @ b_hat
    p12 = nc.lam11_neg_half - lam * nc.lam11_neg_half @ en_res @ nc.c1
    p21 = (
        np.hstack([nc.i_plus_fg_half, nc.f_row @ nc.c2])
        - nc.f_row @ res @ b_hat
    )
    p22 = -nc.f_row @ res @ nc.c1
    return p11, p12, p21, p22


def phi_hat_taylor(
    nc: NehariCoefficients, deg: int
) -> tuple[TaylorSeries, TaylorSeries, TaylorSeries, TaylorSeries]:
    """Taylor coefficients of the closed-form coefficient functions."""
    u, y = nc.problem.u_dim, nc.problem.y_dim
    b_hat = nc.b_hat()
    c11 = [zeros(u, y + u)]
    c12 = [nc.lam11_neg_half.copy()]
    c21 = [np.hstack([nc.i_plus_fg_half, nc.f_row @ nc.c2]) - nc.f_row @ b_hat]
    c22 = [-nc.f_row @ nc.c1]
    en_t = adj(nc.e_n)
    f_t = nc.f_row
    for _ in range(deg):
        c11.append(-nc.lam11_neg_half @ en_t @ b_hat)
        c12.append(-nc.lam11_neg_half @ en_t @ nc.c1)
        f_t = f_t @ nc.t_state
        c21.append(-f_t @ b_hat)
        c22.append(-f_t @ nc.c1)
        en_t = en_t @ nc.t_state
    return (
        TaylorSeries(tuple(c11)),
        TaylorSeries(tuple(c12)),
        TaylorSeries(tuple(c21)),
        TaylorSeries(tuple(c22)),
    )


def solve_h(nc: NehariCoefficients, v: schur.SchurParameter, deg: int) -> TaylorSeries:
    """Taylor coefficients of the solution attached to a Schur parameter.

    Runs the feedback loop of the coefficient state space with the
    parameter realization; V = 0 gives the central solution.
    """
    p = nc.problem
    if v.in_dim != p.u_dim or v.out_dim != p.y_dim + p.u_dim:
        raise DimensionMismatch(
            f"parameter dims {v.out_dim}x{v.in_dim}, "
            f"expected {p.y_dim + p.u_dim}x{p.u_dim}"
        )
    if v.kind == "transfer":
        sys = v.system
        av, bv, cv, dv = sys.a_s, sys.b_s, sys.c_s, sys.d_s
    else:
        dv = v.matrix if v.kind == "constant" else zeros(v.out_dim, v.in_dim)
        av, bv, cv = zeros(0, 0), zeros(0, v.in_dim), zeros(v.out_dim, 0)

    # X-operator form of the coefficient realization
    x1 = nc.t_state
    x2 = -nc.b_hat()
    x3 = nc.lam11_neg_half @ adj(nc.e_n)
    x4 = nc.f_row @ nc.t_state
    x5 = np.hstack([nc.i_plus_fg_neg_half, zeros(p.y_dim, p.u_dim)])

    a_cl = np.block([[x1 + x2 @ dv @ x3, x2 @ cv], [bv @ x3, av]])
    c_cl = np.hstack([x4 + x5 @ dv @ x3, x5 @ cv])
    e_cl = np.vstack([nc.e_n, zeros(av.shape[0], p.u_dim)])

    coeffs = []
    cur = e_cl
    for _ in range(deg + 1):
        coeffs.append(c_cl @ cur)
        cur = a_cl @ cur
    tail = tail_sq_bound(a_cl, c_cl, deg, post=e_cl)
    return TaylorSeries(tuple(coeffs), tail_bound=tail)


@dataclass(frozen=True)
class LContractionReport:
    """Largest singular value of the combined operator plus the tail slack."""

    sigma_max: float
    tail_slack: float | None

    def accepted(self, tol: float = 1e-6) -> bool:
        slack = self.tail_slack if self.tail_slack is not None else 0.0
        return self.sigma_max <= 1.0 + tol + slack


def assemble_l(p: NehariProblem, h: TaylorSeries) -> LContractionReport:
    """Assemble the combined tap/solution operator and measure its norm.

    Rows -K..deg are materialized (every other tap row is exactly zero);
    rows beyond the solution degree are covered by the tail slack computed
    from the solution's tail bound plus the exactly known high columns.
    """
    if h.coeffs[0].shape != (p.y_dim, p.u_dim):
        raise DimensionMismatch("solution coefficients have wrong port dims")
    n_w, u, y, k = p.n_window, p.u_dim, p.y_dim, p.k_taps
    deg = h.degree
    rows = k + deg + 1
    out = zeros(rows * y, n_w * u)
    for idx, i in enumerate(range(-k, deg + 1)):
        for j in range(1, n_w + 1):
            m = i - j + 1
            if m >= 0:
                block = h.coeffs[m]
            elif -m <= k:
                block = p.tap(-m)
            else:
                block = zeros(y, u)
            out[idx * y : (idx + 1) * y, (j - 1) * u : j * u] = block
    sigma = operator_norm(out)
    if h.tail_bound is None:
        slack = None
    else:
        # dropped rows i > deg: column j needs coefficients from deg+2-j up
        total = 0.0
        for j in range(1, n_w + 1):
            partial = sum(
                operator_norm(h.coeffs[m]) ** 2
                for m in range(max(deg + 2 - j, 0), deg + 1)
            )
            total += partial + h.tail_bound
        slack = float(np.sqrt(total))
    return LContractionReport(sigma_max=sigma, tail_slack=slack)


@dataclass(frozen=True)
class HatMReport:
    residual: float
    slack: float | None


def hat_m_check(nc: NehariCoefficients, deg: int, extra: int | None = None) -> HatMReport:
    """Isometry residual of the truncated stacked solution operator.

    Stacks the tap column, the multiplication matrices of the two Schur
    coefficient functions, and the observability matrices of the other
    two, then returns ||M*M - I|| together with the tail slack the
    truncation is entitled to.
    """
    p = nc.problem
    if extra is None:
        extra = max(p.n_window, 16)
    deg_out = deg + extra
    p11, p12, p21, p22 = phi_hat_taylor(nc, deg_out)
    m11 = mult_matrix(p11, deg, deg_out=deg_out)
    m21 = mult_matrix(p21, deg, deg_out=deg_out)
    g12 = observability_matrix(p12)
    g22 = observability_matrix(p22)
    rows = max(p.k_taps, 1)
    gamma_minus = hankel(p, rows)[:, : p.u_dim]
    top = np.hstack([zeros(rows * p.y_dim, (deg + 1) * (p.y_dim + p.u_dim)), gamma_minus])
    m_hat = np.block([[top], [m11, g12], [m21, g22]])
    n_cols = m_hat.shape[1]
    residual = operator_norm(adj(m_hat) @ m_hat - eye(n_cols))

    # slack: squared mass of the dropped coefficient rows
    x1 = nc.t_state
    b_hat = nc.b_hat()
    prefix = np.vstack([nc.lam11_neg_half @ adj(nc.e_n), nc.f_row @ nc.t_state])
    window = deg_out + 4 * 64
    total = 0.0
    cur = prefix
    for m in range(1, window + 1):
        cnt = min(max(m - extra, 0), deg + 1)
        if cnt:
            total += cnt * operator_norm(cur @ b_hat) ** 2
        cur = cur @ x1
    rem = tail_sq_bound(x1, prefix, window - 1, post=b_hat)
    obs = tail_sq_bound(x1, prefix, deg_out - 1, post=nc.c1)
    if rem is None or obs is None:
        return HatMReport(residual=residual, slack=None)
    return HatMReport(residual=residual, slack=total + (deg + 1) * rem + obs)


def special_n1(p: NehariProblem, v: schur.SchurParameter, deg: int) -> TaylorSeries:
    """Closed form for window size 1: H = P_Y V (I - lam P_U V)^-1 D_A.

    Requires a strictly contractive column of taps so the defect root is
    invertible on U.
    """
    if p.n_window != 1:
        raise DimensionMismatch("this closed form needs window size 1")
    if v.in_dim != p.u_dim or v.out_dim != p.y_dim + p.u_dim:
        raise DimensionMismatch("parameter dims disagree with the problem ports")
    g = gram(p)
    if min_eig_hermitian(g) < GRAM_MIN_EIG:
        raise HankelNotStrict("the tap column must be a strict contraction")
    d_a = psd_sqrt(g)
    vt = schur.taylor(v, deg)
    vy = [c[: p.y_dim, :] for c in vt.coeffs]
    vu = [c[p.y_dim :, :] for c in vt.coeffs]
    # (I - lam * Vu)^-1 coefficient recursion: shift Vu by one degree
    inv = [eye(p.u_dim)]
    for k in range(1, deg + 1):
        acc = zeros(p.u_dim, p.u_dim)
        for j in range(1, k + 1):
            acc = acc + vu[j - 1] @ inv[k - j]
        inv.append(acc)
    coeffs = []
    for k in range(deg + 1):
        acc = zeros(p.y_dim, p.u_dim)
        for i in range(k + 1):
            acc = acc + vy[i] @ inv[k - i]
        coeffs.append(acc @ d_a)
    return TaylorSeries(tuple(coeffs))


def special_f0(
    n_window: int, u_dim: int, y_dim: int, v: schur.SchurParameter, deg: int
) -> TaylorSeries:
    """Closed form for zero taps: H = P_Y V (I + lam^N P_U V)^-1.

    The sign in the resolvent is the one the coefficient functions
    actually produce on a zero-tap problem, so this agrees with the
    general solver coefficientwise.  The variant with a minus holds for
    the sign-bridged parameter [P_Y V; -P_U V], which runs over the same
    parameter set.
    """
    if v.in_dim != u_dim or v.out_dim != y_dim + u_dim:
        raise DimensionMismatch("parameter dims disagree with the problem ports")
    vt = schur.taylor(v, deg)
    vy = [c[:y_dim, :] for c in vt.coeffs]
    vu = [c[y_dim:, :] for c in vt.coeffs]
    inv = [eye(u_dim)]
    for k in range(1, deg + 1):
        acc = zeros(u_dim, u_dim)
        for j in range(n_window, k + 1):
            acc = acc - vu[j - n_window] @ inv[k - j]
        inv.append(acc)
    coeffs = []
    for k in range(deg + 1):
        acc = zeros(y_dim, u_dim)
        for i in range(k + 1):
            acc = acc + vy[i] @ inv[k - i]
        coeffs.append(acc)
    return TaylorSeries(tuple(coeffs))


def to_lifting_data(p: NehariProblem, rows: int | None = None) -> LiftingDataSet:
    """The lifting data set whose interpolants are exactly the solutions.

    A is the truncated Hankel matrix, T' the truncated backward shift on
    the tap rows, and R, Q drop the last / first window slot.  Exact for
    rows >= K because all deeper tap rows vanish.
    """
    if rows is None:
        rows = max(p.k_taps, 1)
    a = hankel(p, rows)
    y, u, n_w = p.y_dim, p.u_dim, p.n_window
    t_prime = zeros(rows * y, rows * y)
    for n in range(rows - 1):
        t_prime[n * y : (n + 1) * y, (n + 1) * y : (n + 2) * y] = eye(y)
    r = np.vstack([eye((n_w - 1) * u), zeros(u, (n_w - 1) * u)])
    q = np.vstack([zeros(u, (n_w - 1) * u), eye((n_w - 1) * u)])
    return LiftingDataSet(a=a, t_prime=t_prime, r=r, q=q)


def flip_operator(n_window: int, u_dim: int) -> np.ndarray:
    """Unitary reversal of the window slots of U^N."""
    e = zeros(n_window * u_dim, n_window * u_dim)
    for i in range(n_window):
        e[i * u_dim : (i + 1) * u_dim, (n_window - 1 - i) * u_dim : (n_window - i) * u_dim] = eye(u_dim)
    return e


def second_companion(coeffs: list[np.ndarray]) -> np.ndarray:
    """Second companion matrix of a monic-normalized operator polynomial.

    coeffs = [K_0, ..., K_m] with K_m invertible; the companion carries
    identity blocks on the subdiagonal and -K_j K_m^-1 down the last block
    column.
    """
    m = len(coeffs) - 1
    u = coeffs[0].shape[0]
    lead_inv = np.linalg.inv(coeffs[m])
    out = zeros(m * u, m * u)
    for i in range(1, m):
        out[i * u : (i + 1) * u, (i - 1) * u : i * u] = eye(u)
    for j in range(m):
        out[j * u : (j + 1) * u, (m - 1) * u : m * u] = -coeffs[j] @ lead_inv
    return out
