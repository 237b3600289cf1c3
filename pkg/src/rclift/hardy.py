"""Truncated Hardy-space calculus.

Analytic operator-valued functions on the unit disc are handled through
their Taylor coefficients at zero.  A function with a state-space
realization {Z, B, C, D} has transfer coefficients [D, CB, CZB, ...] and
observability coefficients [C, CZ, CZ^2, ...]; multiplication operators
become block lower-triangular Toeplitz matrices on coefficient space and
the discarded coefficient tail is controlled by geometric bounds driven
by decay of the powers of Z.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import lifting
from .errors import DimensionMismatch
from .linalg import adj, cmatrix, eye, operator_norm, zeros

# Power-norm search horizon for tail bounds: the first power of the state
# matrix with norm <= TAIL_DECAY within this horizon certifies a geometric
# tail; otherwise no bound is reported.
TAIL_MAX_POWER = 64
TAIL_DECAY = 0.9


@dataclass(frozen=True)
class SystemRealization:
    """State-space quadruple {Z, B, C, D} for D + lambda*C(I-lambda*Z)^-1 B.

    `contractive_certified` records that the system matrix [[Z, B], [C, D]]
    is a contraction, which certifies the transfer function as Schur class.
    """

    a_s: np.ndarray
    b_s: np.ndarray
    c_s: np.ndarray
    d_s: np.ndarray
    contractive_certified: bool = False

    def __post_init__(self):
        a = cmatrix(self.a_s)
        b = cmatrix(self.b_s)
        c = cmatrix(self.c_s)
        d = cmatrix(self.d_s)
        if a.shape[0] != a.shape[1]:
            raise DimensionMismatch("state matrix must be square")
        n = a.shape[0]
        if b.shape[0] != n or c.shape[1] != n:
            raise DimensionMismatch("B/C state dimensions disagree with Z")
        if d.shape != (c.shape[0], b.shape[1]):
            raise DimensionMismatch("D block inconsistent with B and C")
        for name, m in (("a_s", a), ("b_s", b), ("c_s", c), ("d_s", d)):
            object.__setattr__(self, name, m)
        if self.contractive_certified:
            if operator_norm(self.system_matrix()) > 1.0 + 1e-9:
                raise ValueError("certified system matrix is not a contraction")

    @property
    def state_dim(self) -> int:
        return self.a_s.shape[0]

    @property
    def in_dim(self) -> int:
        return self.b_s.shape[1]

    @property
    def out_dim(self) -> int:
        return self.c_s.shape[0]

    def system_matrix(self) -> np.ndarray:
        return np.block([[self.a_s, self.b_s], [self.c_s, self.d_s]])


@dataclass(frozen=True)
class TaylorSeries:
    """Taylor coefficients at zero of an operator-valued disc function.

    `tail_bound`, when present, bounds the squared coefficient tail
    sum_{k > degree} ||coeff_k||^2 discarded by the truncation.
    """

    coeffs: tuple[np.ndarray, ...]
    tail_bound: float | None = None

    def __post_init__(self):
        coeffs = tuple(cmatrix(c) for c in self.coeffs)
        if not coeffs:
            raise DimensionMismatch("a Taylor series needs at least one coefficient")
        shape = coeffs[0].shape
        if any(c.shape != shape for c in coeffs):
            raise DimensionMismatch("coefficient dimensions are not uniform")
        if self.tail_bound is not None and self.tail_bound < 0:
            raise ValueError("tail_bound must be nonnegative")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def out_dim(self) -> int:
        return self.coeffs[0].shape[0]

    @property
    def in_dim(self) -> int:
        return self.coeffs[0].shape[1]

    def coeff(self, k: int) -> np.ndarray:
        """Coefficient k, zero beyond the stored degree."""
        if k < 0:
            raise IndexError("negative Taylor index")
        if k <= self.degree:
            return self.coeffs[k]
        return zeros(self.out_dim, self.in_dim)

    def __call__(self, lam: complex) -> np.ndarray:
        """Evaluate the truncated polynomial at a point."""
        acc = zeros(self.out_dim, self.in_dim)
        for c in reversed(self.coeffs):
            acc = acc * lam + c
        return acc


@dataclass(frozen=True)
class SolutionTaylor:
    """Contractive interpolant in stacked Taylor form.

    a_part is the block acting into the base space; gamma_coeffs are the
    Taylor coefficients of the Hardy-space block, expressed in orthonormal
    defect coordinates.  tail_bound bounds the squared coefficient tail per
    unit input vector.
    """

    a_part: np.ndarray
    gamma_coeffs: tuple[np.ndarray, ...]
    tail_bound: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "a_part", cmatrix(self.a_part))
        gammas = tuple(cmatrix(g) for g in self.gamma_coeffs)
        if any(g.shape != gammas[0].shape for g in gammas):
            raise DimensionMismatch("gamma coefficient dimensions are not uniform")
        if gammas and gammas[0].shape[1] != self.a_part.shape[1]:
            raise DimensionMismatch("gamma and a_part input dimensions disagree")
        object.__setattr__(self, "gamma_coeffs", gammas)

    @property
    def degree(self) -> int:
        return len(self.gamma_coeffs) - 1

    def stacked(self) -> np.ndarray:
        """The truncated column operator [a_part; gamma_0; gamma_1; ...]."""
        return np.vstack((self.a_part,) + self.gamma_coeffs)


def transfer_taylor(sys: SystemRealization, deg: int) -> TaylorSeries:
    """Taylor coefficients [D, CB, CZB, CZ^2 B, ...] of the transfer function."""
    coeffs = [sys.d_s]
    cz = sys.c_s
    for _ in range(deg):
        coeffs.append(cz @ sys.b_s)
        cz = cz @ sys.a_s
    return TaylorSeries(tuple(coeffs))


def observability_taylor(a_s: np.ndarray, c_s: np.ndarray, deg: int) -> TaylorSeries:
    """Taylor coefficients [C, CZ, CZ^2, ...] of C(I - lambda*Z)^-1."""
    a_s = cmatrix(a_s)
    c_s = cmatrix(c_s)
    coeffs = [c_s]
    cz = c_s
    for _ in range(deg):
        cz = cz @ a_s
        coeffs.append(cz)
    return TaylorSeries(tuple(coeffs))


def mult_matrix(h: TaylorSeries, deg: int, deg_out: int | None = None) -> np.ndarray:
    """Truncated multiplication operator of h on coefficient space.

    Block (i, j) is coeff(i - j) for i >= j, so the result is block lower
    triangular Toeplitz, mapping inputs of degree <= deg to outputs of
    degree <= deg_out (deg by default).
    """
    if deg_out is None:
        deg_out = deg
    p, q = h.out_dim, h.in_dim
    out = zeros((deg_out + 1) * p, (deg + 1) * q)
    for i in range(deg_out + 1):
        for j in range(min(i, deg) + 1):
            k = i - j
            if k <= h.degree:
                out[i * p:(i + 1) * p, j * q:(j + 1) * q] = h.coeffs[k]
    return out


def observability_matrix(g: TaylorSeries) -> np.ndarray:
    """Stack the coefficients of g into a single column operator."""
    return np.vstack(g.coeffs)


# --- coefficient tails --------------------------------------------------------


def _power_norms(x1: np.ndarray, max_power: int) -> tuple[list[float], int | None]:
    """Norms of x1^0..x1^r until the first power with norm <= TAIL_DECAY."""
    norms = [1.0]
    p = eye(x1.shape[0])
    for r in range(1, max_power + 1):
        p = p @ x1
        norms.append(operator_norm(p))
        if norms[-1] <= TAIL_DECAY:
            return norms, r
    return norms, None


def tail_sq_bound(
    x1: np.ndarray,
    prefix: np.ndarray,
    deg: int,
    post: np.ndarray | None = None,
    max_power: int = TAIL_MAX_POWER,
) -> float | None:
    """Upper bound on sum_{k > deg} ||prefix @ x1^k (@ post)||^2, or None.

    A bound is only produced when some power m <= max_power satisfies
    ||x1^m|| <= 0.9.  The window [deg+1, deg+W] is summed exactly; the
    remainder uses submultiplicativity of the certified power.
    """
    x1 = cmatrix(x1)
    prefix = cmatrix(prefix)
    if x1.shape[0] == 0 or prefix.shape[0] == 0:
        return 0.0
    norms, m_star = _power_norms(x1, max_power)
    if m_star is None:
        return None
    s = norms[m_star]
    if s == 0.0:
        # Nilpotent state matrix: only finitely many terms survive.
        total = 0.0
        term = prefix @ np.linalg.matrix_power(x1, deg + 1) if deg + 1 < m_star else None
        for k in range(deg + 1, m_star):
            t = term if post is None else term @ post
            total += operator_norm(t) ** 2
            term = term @ x1
        return total
    post_norm = 1.0 if post is None else operator_norm(post)
    window = max(4 * m_star, 64)
    term = prefix @ np.linalg.matrix_power(x1, deg + 1)
    exact = 0.0
    for _ in range(deg + 1, deg + window + 1):
        t = term if post is None else term @ post
        exact += operator_norm(t) ** 2
        term = term @ x1
    c = operator_norm(prefix) * max(norms[:m_star]) * post_norm
    sigma = s ** (2.0 / m_star)
    remainder = (c / s) ** 2 * sigma ** (deg + window + 1) / (1.0 - sigma)
    return exact + remainder


def tail_bound(x1: np.ndarray, prefix: np.ndarray, deg: int) -> float | None:
    """Geometric bound on the squared coefficient tail of prefix @ x1^k."""
    return tail_sq_bound(x1, prefix, deg)


# --- formal power-series arithmetic -------------------------------------------


def series_mul(a: list[np.ndarray], b: list[np.ndarray], deg: int) -> list[np.ndarray]:
    """Cauchy product of coefficient lists, truncated at degree deg."""
    out = []
    for k in range(deg + 1):
        acc = None
        for i in range(min(k, len(a) - 1) + 1):
            j = k - i
            if j >= len(b):
                continue
            term = a[i] @ b[j]
            acc = term if acc is None else acc + term
        if acc is None:
            acc = zeros(a[0].shape[0], b[0].shape[1])
        out.append(acc)
    return out


def series_neumann(s: list[np.ndarray], deg: int) -> list[np.ndarray]:
    """Coefficients of (I - S)^-1 for a series S with zero constant term."""
    n = s[0].shape[0]
    if s[0].shape[1] != n:
        raise DimensionMismatch("Neumann inverse needs a square series")
    if operator_norm(s[0]) != 0.0:
        raise ValueError("series must have zero constant term")
    out = [eye(n)]
    for k in range(1, deg + 1):
        acc = zeros(n, n)
        for j in range(1, min(k, len(s) - 1) + 1):
            acc = acc + s[j] @ out[k - j]
        out.append(acc)
    return out


# --- interpolation verification ------------------------------------------------


@dataclass(frozen=True)
class InterpolantReport:
    """Residuals of the contractive-interpolant conditions for one solution."""

    projection_residual: float
    intertwining_residual: float
    sigma_max: float
    tail_slack: float | None
    tol: float
    passed: bool
    checks: dict = field(default_factory=dict)


def verify_interpolant(
    ds: "lifting.LiftingDataSet",
    sol: SolutionTaylor,
    deg: int,
    tol: float = 1e-6,
) -> InterpolantReport:
    """Check the two interpolation identities and contractivity of a solution.

    The three reported numbers are (i) the distance of the base block from
    the target operator, (ii) the intertwining residual against the
    truncated isometric dilation, with the overflow row inherently dropped
    by the truncation, and (iii) the largest singular value of the stacked
    solution.  The solution passes when (i), (ii) <= tol and (iii) is at
    most 1 + tol plus the tail slack.
    """
    if sol.degree < deg:
        raise DimensionMismatch(
            f"solution holds coefficients to degree {sol.degree}, need {deg}"
        )
    if sol.a_part.shape != ds.a.shape:
        raise DimensionMismatch("a_part shape disagrees with the data set")
    b = np.vstack((sol.a_part,) + sol.gamma_coeffs[: deg + 1])
    dt_dim = sol.gamma_coeffs[0].shape[0]
    u_prime = lifting.sznagy_schaffer_truncated(ds.t_prime, deg)
    if u_prime.shape[0] != b.shape[0]:
        raise DimensionMismatch(
            "defect dimension of the solution disagrees with the data set"
        )
    res_a = operator_norm(sol.a_part - ds.a)
    res_int = operator_norm(u_prime @ b @ ds.r - b @ ds.q)
    sigma = operator_norm(b)
    slack = None if sol.tail_bound is None else float(np.sqrt(sol.tail_bound))
    sigma_budget = 1.0 + tol + (slack if slack is not None else 0.0)
    checks = {
        "projection": res_a <= tol,
        "intertwining": res_int <= tol,
        "contraction": sigma <= sigma_budget,
        "tail_available": sol.tail_bound is not None,
        "dt_dim": dt_dim,
    }
    passed = checks["projection"] and checks["intertwining"] and checks["contraction"]
    return InterpolantReport(
        projection_residual=res_a,
        intertwining_residual=res_int,
        sigma_max=sigma,
        tail_slack=slack,
        tol=tol,
        passed=passed,
        checks=checks,
    )
