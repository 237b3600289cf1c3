"""Lifting data sets and their derived operators.

A data set is a quadruple {A, T', R, Q} with A: H -> H' and T' on H' both
contractions, R, Q: H0 -> H, subject to the intertwining constraint
T' A R = A Q and the defect ordering R*R <= Q*Q.  The minimal isometric
dilation of T' is always the canonical one acting on H' plus a Hardy space
of defect vectors; here the Hardy part is truncated at a finite degree
with the overflow row discarded.

Derived material: defect operators D_A, D_T', the gap root
D0 = (Q*Q - R*R)^(1/2), the stacked operator J = [D0; D_T' A R], the
subspace F spanned by D_A Q, and the contraction omega defined on F by
omega (D_A Q h) = [D_T' A R h; D_A R h].  All subspaces are carried in
canonical orthonormal coordinates so that block formulas stay literal
matrix identities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotStrict
from .linalg import (
    SubspaceEmbedding,
    adj,
    cmatrix,
    eye,
    hermitian_eig,
    kernel_embedding,
    min_eig_hermitian,
    min_singular_value,
    operator_norm,
    psd_sqrt_and_range,
    range_embedding,
    zeros,
)

# Strictness margin: the strict pipeline requires ||A|| <= 1 - STRICT_DELTA
# and sigma_min(R) >= STRICT_DELTA, keeping D_A^-2 and the constraint Grams
# comfortably invertible.
STRICT_DELTA = 1e-6

CONSTRAINT_TOL = 1e-10


@dataclass(frozen=True)
class LiftingDataSet:
    """The data {A, T', R, Q} with dimension consistency enforced."""

    a: np.ndarray
    t_prime: np.ndarray
    r: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        a = cmatrix(self.a)
        t = cmatrix(self.t_prime)
        r = cmatrix(self.r)
        q = cmatrix(self.q)
        h_prime, h = a.shape
        if t.shape != (h_prime, h_prime):
            raise DimensionMismatch(f"t_prime must be {h_prime}x{h_prime}, got {t.shape}")
        if r.shape[0] != h or q.shape[0] != h:
            raise DimensionMismatch("R and Q must map into the domain of A")
        if r.shape[1] != q.shape[1]:
            raise DimensionMismatch("R and Q must share their domain")
        for name, m in (("a", a), ("t_prime", t), ("r", r), ("q", q)):
            object.__setattr__(self, name, m)

    @property
    def dim_h(self) -> int:
        return self.a.shape[1]

    @property
    def dim_h_prime(self) -> int:
        return self.a.shape[0]

    @property
    def dim_h0(self) -> int:
        return self.r.shape[1]


@dataclass(frozen=True)
class StrictnessReport:
    norm_a: float
    sigma_min_r: float
    sigma_min_q: float
    strict_ok: bool
    min_eig_qdq: float
    min_eig_rdr: float


@dataclass(frozen=True)
class ConstraintRow:
    name: str
    value: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    rows: tuple[ConstraintRow, ...]
    strictness: StrictnessReport
    passed: bool

    def row(self, name: str) -> ConstraintRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)


def validate(ds: LiftingDataSet, tol: float = CONSTRAINT_TOL) -> ValidationReport:
    """Residuals of the defining constraints, plus a strictness report."""
    norm_a = operator_norm(ds.a)
    norm_t = operator_norm(ds.t_prime)
    intertwine = operator_norm(ds.t_prime @ ds.a @ ds.r - ds.a @ ds.q)
    gap = adj(ds.q) @ ds.q - adj(ds.r) @ ds.r
    gap_min = min_eig_hermitian(gap)

    d_a_sq = eye(ds.dim_h) - adj(ds.a) @ ds.a
    qdq = adj(ds.q) @ d_a_sq @ ds.q
    rdr = adj(ds.r) @ d_a_sq @ ds.r
    sigma_r = min_singular_value(ds.r)
    sigma_q = min_singular_value(ds.q)
    strict_ok = norm_a <= 1.0 - STRICT_DELTA and sigma_r >= STRICT_DELTA
    strictness = StrictnessReport(
        norm_a=norm_a,
        sigma_min_r=sigma_r,
        sigma_min_q=sigma_q,
        strict_ok=strict_ok,
        min_eig_qdq=min_eig_hermitian(qdq),
        min_eig_rdr=min_eig_hermitian(rdr),
    )
    rows = (
        ConstraintRow("contraction_a", norm_a, 1.0 + tol, norm_a <= 1.0 + tol),
        ConstraintRow("contraction_t_prime", norm_t, 1.0 + tol, norm_t <= 1.0 + tol),
        ConstraintRow(
            "intertwining",
            intertwine,
            tol * (1.0 + norm_a),
            intertwine <= tol * (1.0 + norm_a),
        ),
        ConstraintRow("defect_ordering", gap_min, -tol, gap_min >= -tol),
    )
    return ValidationReport(rows=rows, strictness=strictness, passed=all(r.passed for r in rows))


@dataclass(frozen=True)
class DerivedData:
    """Defect operators and subspace coordinates attached to a data set.

    The inverse blocks are only populated for strict instances; elsewhere
    they stay None and the strict pipeline refuses to run.
    """

    ds: LiftingDataSet
    d_a: np.ndarray
    d_t_prime: np.ndarray
    d_circ: np.ndarray
    d_circ_embedding: SubspaceEmbedding
    dt_embedding: SubspaceEmbedding
    f_embedding: SubspaceEmbedding
    ker_q_star: SubspaceEmbedding
    ker_r_star: SubspaceEmbedding
    j: np.ndarray
    omega: np.ndarray
    strict: bool
    d_a_inv: np.ndarray | None
    d_a_sq_inv: np.ndarray | None

    @property
    def dim_d_circ(self) -> int:
        return self.d_circ_embedding.dim

    @property
    def dim_dt(self) -> int:
        return self.dt_embedding.dim

    def require_strict(self) -> None:
        if not self.strict:
            raise NotStrict(
                "operation needs ||A|| < 1 and a left-invertible R "
                f"(norm_a={operator_norm(self.ds.a):.6f}, "
                f"sigma_min_r={min_singular_value(self.ds.r):.3e})"
            )


def derive(ds: LiftingDataSet) -> DerivedData:
    """Compute defect operators, subspace coordinates, and omega."""
    h = ds.dim_h
    d_a_sq = eye(h) - adj(ds.a) @ ds.a
    w, v = hermitian_eig(d_a_sq)
    w = np.clip(w, 0.0, None)
    d_a = (v * np.sqrt(w)) @ adj(v)
    d_a = 0.5 * (d_a + adj(d_a))

    d_t, e_t = psd_sqrt_and_range(eye(ds.dim_h_prime) - adj(ds.t_prime) @ ds.t_prime)
    d_circ, e_circ = psd_sqrt_and_range(adj(ds.q) @ ds.q - adj(ds.r) @ ds.r)

    f_emb = range_embedding(d_a @ ds.q)
    ker_q = kernel_embedding(ds.q)
    ker_r = kernel_embedding(ds.r)

    dtar = e_t.coords(d_t @ ds.a @ ds.r)
    j = np.vstack([e_circ.coords(d_circ), dtar])

    # omega in coordinates: the stack [D_T' A R; D_A R] composed with the
    # pseudoinverse of D_A Q, restricted to the F basis.
    daq = d_a @ ds.q
    pinv_daq = np.linalg.pinv(daq, rcond=1e-10)
    omega = np.vstack([dtar, d_a @ ds.r]) @ (pinv_daq @ f_emb.basis)

    strictness = validate(ds).strictness
    if strictness.strict_ok:
        w_safe = np.where(w > 0, w, 1.0)
        d_a_inv = (v / np.sqrt(w_safe)) @ adj(v)
        d_a_inv = 0.5 * (d_a_inv + adj(d_a_inv))
        d_a_sq_inv = (v / w_safe) @ adj(v)
        d_a_sq_inv = 0.5 * (d_a_sq_inv + adj(d_a_sq_inv))
    else:
        d_a_inv = None
        d_a_sq_inv = None

    return DerivedData(
        ds=ds,
        d_a=d_a,
        d_t_prime=d_t,
        d_circ=d_circ,
        d_circ_embedding=e_circ,
        dt_embedding=e_t,
        f_embedding=f_emb,
        ker_q_star=ker_q,
        ker_r_star=ker_r,
        j=j,
        omega=omega,
        strict=strictness.strict_ok,
        d_a_inv=d_a_inv,
        d_a_sq_inv=d_a_sq_inv,
    )


def gram_identity_residual(dd: DerivedData) -> float:
    """Relative residual of Q* D_A^2 Q = D0^2 + R*A* D_T'^2 A R + R* D_A^2 R."""
    ds = dd.ds
    lhs = adj(ds.q) @ dd.d_a @ dd.d_a @ ds.q
    dtar = dd.d_t_prime @ ds.a @ ds.r
    rhs = dd.d_circ @ dd.d_circ + adj(dtar) @ dtar + adj(dd.d_a @ ds.r) @ (dd.d_a @ ds.r)
    return operator_norm(lhs - rhs) / max(1.0, operator_norm(lhs))


def omega_isometry_defect(dd: DerivedData) -> float:
    """|| omega* omega - I || on the F coordinates."""
    return operator_norm(adj(dd.omega) @ dd.omega - eye(dd.f_embedding.dim))


def left_inverse_daq(dd: DerivedData) -> np.ndarray:
    """The left inverse (Q* D_A^2 Q)^-1 Q* D_A of D_A Q (strict only)."""
    dd.require_strict()
    ds = dd.ds
    daq = dd.d_a @ ds.q
    from .linalg import solve_hpd

    return solve_hpd(adj(daq) @ daq, adj(daq))


def left_inverse_dar(dd: DerivedData) -> np.ndarray:
    """The left inverse (R* D_A^2 R)^-1 R* D_A of D_A R (strict only)."""
    dd.require_strict()
    ds = dd.ds
    dar = dd.d_a @ ds.r
    from .linalg import solve_hpd

    return solve_hpd(adj(dar) @ dar, adj(dar))


def sznagy_schaffer_truncated(t_prime: np.ndarray, deg: int) -> np.ndarray:
    """Truncated canonical isometric dilation of a contraction.

    Acts on H' plus deg+1 Taylor slots of defect vectors: the first column
    block feeds D_T' into slot 0 and the slot shift pushes k -> k+1 with
    the top slot discarded.  The result is isometric on every column that
    does not feed the discarded slot.
    """
    t_prime = cmatrix(t_prime)
    if t_prime.shape[0] != t_prime.shape[1]:
        raise DimensionMismatch("t_prime must be square")
    if deg < 0:
        raise ValueError("deg must be nonnegative")
    h = t_prime.shape[0]
    d_t, e_t = psd_sqrt_and_range(eye(h) - adj(t_prime) @ t_prime)
    dt = e_t.dim
    n = h + dt * (deg + 1)
    u = zeros(n, n)
    u[:h, :h] = t_prime
    u[h:h + dt, :h] = e_t.coords(d_t)
    for k in range(deg):
        u[h + (k + 1) * dt:h + (k + 2) * dt, h + k * dt:h + (k + 1) * dt] = eye(dt)
    return u
