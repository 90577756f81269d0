"""Closed-form estimate of a perturbed-Gaussian box integral.

The target is

    int_{U_N} f(z) dz,
    f(z) = exp(-Ahat N sum z_j^2 + sum a_j z_j^2 + N sum B_j z_j^3
               + sum_{jk} C_jk z_j z_k^2 + N sum E_j z_j^4
               + sum_{jk} F_jk z_j^2 z_k^2 + sum J_j z_j),

over the box U_N = [-N^(-1/2+eps_hat), N^(-1/2+eps_hat)]^N, with complex
coefficient arrays.  The closed form is

    (pi/(Ahat N))^(N/2) exp(Theta1 + Theta2),

with Theta1, Theta2 the displayed polynomial functionals of the
coefficients and Zhat >= 1 the growth factor built from their imaginary
parts.  Multi-index sums are unrestricted (coincident indices included).

integrate_f_direct is the independent oracle: tensor-product Simpson
quadrature of f over the box, practical for N <= 4.  Because the box has
half-width N^(-1/2+eps_hat) while the Gaussian scale is (Ahat N)^(-1/2),
desk-scale N leaves a visible Gaussian tail outside the box; mw3_estimate
can optionally fold in the leading tail correction
prod_j erf(sqrt(Ahat N - Re a_j) * half_width) so that it is directly
comparable with the box quadrature at small N.

Two canned builders produce the coefficient sets that arise when the
contour integral's row block (sigma stage) and column block (tau stage)
are reduced to exactly this box-integral form, making that reduction
executable end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResourceLimit
from .saddle import SaddleSolution

DIRECT_MAX_N = 4
DIRECT_EVAL_CAP = 10**9


@dataclass(frozen=True)
class MomentCoefficients:
    """Inputs of the box-integral estimate; arrays are complex, length/order N."""

    N: int
    Ahat: float
    a: np.ndarray      # (N,)
    B: np.ndarray      # (N,)
    C: np.ndarray      # (N, N)
    E: np.ndarray      # (N,)
    F: np.ndarray      # (N, N)
    J: np.ndarray      # (N,)
    eps_hat: float

    def __post_init__(self):
        if self.N < 1:
            raise DomainError("N must be positive")
        if not self.Ahat > 0:
            raise DomainError("Ahat must be positive")
        if not (0.0 < self.eps_hat < 0.5):
            raise DomainError("eps_hat must lie in (0, 1/2)")
        for name in ("a", "B", "E", "J"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.shape != (self.N,):
                raise DomainError(f"{name} must have shape ({self.N},)")
            object.__setattr__(self, name, arr)
        for name in ("C", "F"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.shape != (self.N, self.N):
                raise DomainError(f"{name} must have shape ({self.N}, {self.N})")
            object.__setattr__(self, name, arr)

    @property
    def half_width(self):
        return self.N ** (-0.5 + self.eps_hat)

    @classmethod
    def zeros(cls, N, Ahat=1.0, eps_hat=0.25):
        z = np.zeros(N, dtype=complex)
        zz = np.zeros((N, N), dtype=complex)
        return cls(N=N, Ahat=Ahat, a=z, B=z.copy(), C=zz, E=z.copy(),
                   F=zz.copy(), J=z.copy(), eps_hat=eps_hat)


def theta1(mc: MomentCoefficients) -> complex:
    """First-order exponent correction (seven terms)."""
    A, N = mc.Ahat, mc.N
    crow = mc.C.sum(axis=1)  # sum_k C_jk
    return complex(
        mc.a.sum() / (2 * A * N)
        + (mc.a**2).sum() / (4 * A**2 * N**2)
        + 15.0 * (mc.B**2).sum() / (16 * A**3 * N)
        + 3.0 * (mc.B @ crow) / (8 * A**3 * N**2)
        + (crow**2).sum() / (16 * A**3 * N**3)
        + 3.0 * mc.E.sum() / (4 * A**2 * N)
        + mc.F.sum() / (4 * A**2 * N**2)
    )


def theta2(mc: MomentCoefficients) -> complex:
    """Second-order exponent correction (eight terms)."""
    A, N = mc.Ahat, mc.N
    a, B, C, E, F, J = mc.a, mc.B, mc.C, mc.E, mc.F, mc.J
    crow = C.sum(axis=1)
    # sum_{jk} (a_j + a_k) F_jk
    aF = a @ F.sum(axis=1) + F.sum(axis=0) @ a
    # sum_{jkl} (a_j + 2 a_k) C_jk C_jl = sum_j a_j crow_j^2 + 2 sum_j (C a)_j crow_j
    aCC = (a * crow**2).sum() + 2.0 * ((C @ a) * crow).sum()
    # sum_{jk} (2 a_j + a_k) B_j C_jk
    aBC = 2.0 * (a * B * crow).sum() + (B * (C @ a)).sum()
    return complex(
        (a**3).sum() / (6 * A**3 * N**3)
        + 3.0 * (a * E).sum() / (2 * A**3 * N**2)
        + 45.0 * (a * B**2).sum() / (16 * A**4 * N**2)
        + aF / (4 * A**3 * N**3)
        + 3.0 * (B * J).sum() / (4 * A**2 * N)
        + (C.T @ J).sum() / (4 * A**2 * N**2)
        + aCC / (16 * A**4 * N**4)
        + aBC * 3.0 / (8 * A**4 * N**3)
    )


def bigZ(mc: MomentCoefficients) -> float:
    """Error growth factor from the imaginary parts; always >= 1."""
    A, N = mc.Ahat, mc.N
    ia = np.imag(mc.a)
    iB = np.imag(mc.B)
    iC = np.imag(mc.C)
    icrow = iC.sum(axis=1)
    exponent = (
        (ia**2).sum() / (4 * A**2 * N**2)
        + 15.0 * (iB**2).sum() / (16 * A**3 * N)
        + 3.0 * (iB @ icrow) / (8 * A**3 * N**2)
        + (icrow**2).sum() / (16 * A**3 * N**3)
    )
    value = math.exp(exponent)
    # the exponent is a positive-semidefinite quadratic form in the
    # imaginary parts, so anything below 1 is a rounding artifact
    return max(value, 1.0)


def mw3_estimate(mc: MomentCoefficients, tail_correction=False) -> complex:
    """Log of the closed-form estimate: (N/2) log(pi/(Ahat N)) + Theta1 + Theta2.

    With tail_correction=True, adds the leading Gaussian tail factor
    sum_j log erf(sqrt(Ahat N - Re a_j) * half_width), making the value
    directly comparable to the box quadrature at small N.
    """
    A, N = mc.Ahat, mc.N
    value = 0.5 * N * (math.log(math.pi) - math.log(A * N)) + theta1(mc) + theta2(mc)
    if tail_correction:
        L = mc.half_width
        for re_a in np.real(mc.a):
            coeff = A * N - re_a
            if coeff <= 0:
                raise DomainError("tail correction needs Ahat N > Re a_j")
            value += math.log(math.erf(math.sqrt(coeff) * L))
    return complex(value)


def _exponent_on_grid(mc, grids):
    A, N = mc.Ahat, mc.N
    z2 = [g * g for g in grids]
    acc = np.zeros(grids[0].shape, dtype=complex)
    for j in range(N):
        acc += (-A * N + mc.a[j]) * z2[j]
        acc += N * mc.B[j] * z2[j] * grids[j]
        acc += N * mc.E[j] * z2[j] * z2[j]
        acc += mc.J[j] * grids[j]
        for k in range(N):
            acc += mc.C[j, k] * grids[j] * z2[k]
            acc += mc.F[j, k] * z2[j] * z2[k]
    return acc


def integrate_f_direct(mc: MomentCoefficients, nodes_per_dim=61) -> complex:
    """Tensor-product Simpson quadrature of f over the box (oracle path)."""
    N = mc.N
    if N > DIRECT_MAX_N:
        raise DomainError(f"direct quadrature supports N <= {DIRECT_MAX_N}")
    if nodes_per_dim % 2 == 0:
        nodes_per_dim += 1  # Simpson needs an odd node count
    if nodes_per_dim**N > DIRECT_EVAL_CAP:
        raise ResourceLimit("node count exceeds evaluation cap")
    L = mc.half_width
    x = np.linspace(-L, L, nodes_per_dim)
    h = x[1] - x[0]
    w = np.ones(nodes_per_dim)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= h / 3.0
    grids = np.meshgrid(*([x] * N), indexing="ij")
    values = np.exp(_exponent_on_grid(mc, grids))
    for _ in range(N):
        values = np.tensordot(values, w, axes=([-1], [0]))
    return complex(values)


def _truncated_sums(sol: SaddleSolution):
    """alpha/beta sums over the truncated index ranges j<m, k<n."""
    alpha = sol.alpha_jk[: sol.m - 1, : sol.n - 1]
    beta = sol.beta_jk[: sol.m - 1, : sol.n - 1]
    return alpha, beta, alpha.sum(axis=1), alpha.sum(axis=0), beta.sum(axis=1), beta.sum(axis=0)


def _scalars(sol: SaddleSolution):
    lam = float(np.rint(sol.lambda_jk.sum()) / (sol.m * sol.n))
    A = lam * (1 - lam) / 2
    A3 = lam * (1 - lam) * (1 - 2 * lam) / 6
    A4 = lam * (1 - lam) * (1 - 6 * lam + 6 * lam * lam) / 24
    return A, A3, A4


def _eps_hat_for(N, n, eps):
    """Box-exponent match: 2 n^(-1/2+eps) = N^(-1/2+eps_hat), clamped to (0, 1/2)."""
    raw = 0.5 + (math.log(2.0) + (-0.5 + eps) * math.log(n)) / math.log(N) if N > 1 else 0.25
    return min(max(raw, 1e-3), 0.499)


def sigma_stage_coefficients(sol: SaddleSolution, tau=None, eps=0.1) -> MomentCoefficients:
    """Coefficient set for the row-block (sigma) reduction, N = m-1.

    tau is the frozen column-block variable vector (length n-1) appearing
    linearly in the a and J coefficients; defaults to zero.
    """
    m, n = sol.m, sol.n
    if m < 2 or n < 2:
        raise DomainError("builders need m, n >= 2")
    A, A3, A4 = _scalars(sol)
    alpha, beta, arow, acol, brow, bcol = _truncated_sums(sol)
    c = -1.0 / (m + math.sqrt(m))
    d = -1.0 / (n + math.sqrt(n))
    if tau is None:
        tau = np.zeros(n - 1)
    tau = np.asarray(tau, dtype=float)
    nu2 = float((tau**2).sum())
    N = m - 1
    v = (3.0 * A3 / (2 * A * m)) * (
        m * alpha + (1.0 + c * m) * acol[None, :] + d * m * arow[:, None]
    ) - 3.0 * beta
    u = (3.0 * A3 / (2 * A * n)) * (
        n * alpha + (1.0 + d * n) * arow[:, None] + c * n * acol[None, :]
    ) - 3.0 * beta
    g = (3.0 * A3 / (2 * A * m)) * (
        (1.0 + c * m + c * c * m * m) * arow[:, None] + c * m * arow[None, :]
    )
    a_coef = (
        -arow
        + (6.0 * A4 - 9.0 * A3**2 / (2.0 * A)) * nu2
        + 1j * (v @ tau)
    )
    B_coef = -1j * A3 * n / N - 1j * brow / N
    C_coef = -3j * A3 * c * n + 1j * g
    E_coef = np.full(N, A4 * n / N, dtype=complex)
    F_coef = np.full((N, N), -9.0 * A3**2 * n / (4.0 * A * m), dtype=complex)
    J_coef = 1j * (u @ (tau**2))
    return MomentCoefficients(
        N=N, Ahat=A * n / N, a=a_coef.astype(complex), B=B_coef.astype(complex),
        C=C_coef.astype(complex), E=E_coef, F=F_coef, J=J_coef.astype(complex),
        eps_hat=_eps_hat_for(N, n, eps),
    )


def tau_stage_coefficients(sol: SaddleSolution, eps=0.1) -> MomentCoefficients:
    """Coefficient set for the column-block (tau) reduction, N = n-1."""
    m, n = sol.m, sol.n
    if m < 2 or n < 2:
        raise DomainError("builders need m, n >= 2")
    A, A3, A4 = _scalars(sol)
    alpha, beta, arow, acol, brow, bcol = _truncated_sums(sol)
    c = -1.0 / (m + math.sqrt(m))
    d = -1.0 / (n + math.sqrt(n))
    N = n - 1
    h = (3.0 * A3 / (2 * A * n)) * (
        (1.0 + d * n + d * d * n * n) * acol[:, None] + d * n * acol[None, :]
    )
    v = (3.0 * A3 / (2 * A * m)) * (
        m * alpha + (1.0 + c * m) * acol[None, :] + d * m * arow[:, None]
    ) - 3.0 * beta
    a_coef = 3.0 * A4 * m / (A * n) - 9.0 * A3**2 * m / (4.0 * A**2 * n) - acol
    B_coef = -1j * A3 * m / N - 1j * bcol / N
    C_coef = -3j * A3 * d * m + 1j * h
    E_coef = np.full(N, A4 * m / N, dtype=complex)
    F_coef = np.full((N, N), -9.0 * A3**2 * m / (4.0 * A * n), dtype=complex)
    J_coef = 1j * v.sum(axis=0) / (2.0 * A * n)
    return MomentCoefficients(
        N=N, Ahat=A * m / N, a=a_coef.astype(complex), B=B_coef.astype(complex),
        C=C_coef.astype(complex), E=E_coef, F=F_coef, J=J_coef.astype(complex),
        eps_hat=_eps_hat_for(N, m, eps),
    )
