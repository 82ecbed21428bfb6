"""Two driven qubits coupled through the line: Lindblad dynamics and concurrence.

Master equation in the frame rotating at the drive frequency omega_d,

    d rho / dt = -i [H, rho] - sum_ij gamma_ij ([sigma_i^+, sigma_j^- rho] + h.c.),

with H = (Delta/2)(sz1 + sz2) + f (s1^+ + s1^-) + J12 (s1^+ s2^- + s2^+ s1^-),
Delta = epsilon - omega_d, and the drive acting on qubit 1 only. The rates
follow from the line's total (R, T) at the qubit splitting:

    gamma_ii = gamma0 (1 - Re(R e^{-ikD})) + lambda,
    gamma_12 = gamma0 Re(T e^{-2ikD}),
    J_12     = gamma0 Im(T e^{-2ikD}) / 2,

with k = 2 pi epsilon / v and D the qubit-scatterer separation (symmetric
placement). Basis ordering |ee>, |eg>, |ge>, |gg>; density matrices are
vectorized row-major, so vec(A rho B) = (A kron B^T) vec(rho).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import DegenerateSteadyState, ModelInvariantError
from .scattering import LineSpec, ScatteringSummary, wavenumber

__all__ = [
    "LindbladModel",
    "DensityMatrix",
    "rates_from_line",
    "liouvillian_basis",
    "build_liouvillian",
    "steady_state",
    "evolve",
    "concurrence",
    "trace_distance",
    "reduced_qubit",
]

# second-smallest singular value below this means the null space is not unique
DEGENERACY_TOL = 1e-8

_SM = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)   # |g><e|
_SP = _SM.conj().T
_SZ = np.diag([1.0, -1.0]).astype(complex)
_I2 = np.eye(2, dtype=complex)
_I4 = np.eye(4, dtype=complex)

# sigma_y (x) sigma_y, the spin-flip matrix of the concurrence
_YY = np.array(
    [[0, 0, 0, -1],
     [0, 0, 1, 0],
     [0, 1, 0, 0],
     [-1, 0, 0, 0]], dtype=complex)


def _op(which: int, single: np.ndarray) -> np.ndarray:
    """Embed a single-qubit operator; qubit 1 is the left tensor factor."""
    return np.kron(single, _I2) if which == 1 else np.kron(_I2, single)


@dataclass(frozen=True, eq=False)
class LindbladModel:
    """Rates and drive of the two-qubit master equation.

    gamma is the full symmetric 2x2 rate matrix (non-radiative lambda
    already folded into the diagonal); lambda_nr is kept for bookkeeping.
    """

    epsilon: float
    gamma: np.ndarray
    J12: float
    gamma0: float
    lambda_nr: float = 0.0
    f: float = 0.0
    omega_d: float | None = None

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float)
        if g.shape != (2, 2):
            raise ValueError("gamma must be a 2x2 real matrix")
        object.__setattr__(self, "gamma", g)
        if self.omega_d is None:
            object.__setattr__(self, "omega_d", self.epsilon)
        if not self.gamma0 > 0:
            raise ModelInvariantError("gamma0 must be > 0")
        if abs(g[0, 1] - g[1, 0]) > 1e-12:
            raise ModelInvariantError("gamma matrix must be symmetric")
        if g[0, 0] < 0 or g[1, 1] < 0:
            raise ModelInvariantError("diagonal rates must be >= 0")
        if abs(g[0, 1]) > np.sqrt(g[0, 0] * g[1, 1]) + 1e-9:
            raise ModelInvariantError(
                f"|gamma12| = {abs(g[0, 1]):.6g} exceeds sqrt(gamma11 gamma22) "
                f"= {np.sqrt(g[0, 0] * g[1, 1]):.6g}: dissipator not positive")

    @property
    def detuning(self) -> float:
        return self.epsilon - self.omega_d

    def with_drive(self, f: float) -> "LindbladModel":
        return replace(self, f=f)

    def coefficients(self) -> np.ndarray:
        """Expansion coefficients matching liouvillian_basis() ordering."""
        return np.array([self.gamma[0, 0], self.gamma[1, 1], self.gamma[0, 1],
                         self.J12, self.f, self.detuning])


def rates_from_line(region: ScatteringSummary, D: float, epsilon: float,
                    gamma0: float, lambda_nr: float,
                    line: LineSpec | None = None) -> LindbladModel:
    """Line-mediated rates for qubits at distance D on either side of the region.

    region must hold the chain's total (R, T) evaluated at omega = epsilon
    (resonant drive). The drive amplitude starts at zero; set it with
    model.with_drive(f).
    """
    if abs(region.omega - epsilon) > 1e-9 * max(1.0, abs(epsilon)):
        raise ValueError(
            f"region was computed at omega = {region.omega}, rates need epsilon = {epsilon}")
    if D < 0:
        raise ValueError("D must be >= 0")
    k = wavenumber(epsilon, line)
    R, T = region.r_total, region.t_total
    g_self = gamma0 * (1.0 - (R * np.exp(-1j * k * D)).real) + lambda_nr
    cross = T * np.exp(-2j * k * D)
    gamma = np.array([[g_self, gamma0 * cross.real],
                      [gamma0 * cross.real, g_self]])
    return LindbladModel(epsilon=epsilon, gamma=gamma,
                         J12=gamma0 * cross.imag / 2.0,
                         gamma0=gamma0, lambda_nr=lambda_nr)


def _hamiltonian_super(h: np.ndarray) -> np.ndarray:
    """-i [h, .] as a superoperator on row-major vectorized rho."""
    return -1j * (np.kron(h, _I4) - np.kron(_I4, h.T))


def _dissipator_pair(i: int, j: int) -> np.ndarray:
    """Superoperator of -([sigma_i^+, sigma_j^- rho] + h.c.) at unit rate."""
    sp_i = _op(i, _SP)
    sm_i = _op(i, _SM)
    sp_j = _op(j, _SP)
    sm_j = _op(j, _SM)
    return (-np.kron(sp_i @ sm_j, _I4)
            - np.kron(_I4, (sp_j @ sm_i).T)
            + np.kron(sm_j, sp_i.T)
            + np.kron(sm_i, sp_j.T))


@lru_cache(maxsize=1)
def _basis_cached() -> np.ndarray:
    sz = _op(1, _SZ) + _op(2, _SZ)
    h_j = _op(1, _SP) @ _op(2, _SM) + _op(2, _SP) @ _op(1, _SM)
    h_f = _op(1, _SP) + _op(1, _SM)
    basis = np.stack([
        _dissipator_pair(1, 1),                      # gamma11
        _dissipator_pair(2, 2),                      # gamma22
        _dissipator_pair(1, 2) + _dissipator_pair(2, 1),  # gamma12
        _hamiltonian_super(h_j),                     # J12
        _hamiltonian_super(h_f),                     # f, drive on qubit 1
        _hamiltonian_super(sz / 2.0),                # detuning
    ])
    basis.setflags(write=False)
    return basis


def liouvillian_basis() -> np.ndarray:
    """The six 16x16 generators multiplying (g11, g22, g12, J12, f, Delta).

    Shared single source of truth for build_liouvillian and the batched
    kernels; read-only.
    """
    return _basis_cached()


def build_liouvillian(model: LindbladModel) -> np.ndarray:
    """16x16 generator of d vec(rho)/dt in the rotating frame."""
    return np.einsum("k,kab->ab", model.coefficients(), liouvillian_basis())


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated 4x4 two-qubit state, basis |ee>, |eg>, |ge>, |gg>."""

    matrix: np.ndarray
    herm_tol: float = field(default=1e-10, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError("density matrix must be 4x4")
        if np.max(np.abs(m - m.conj().T)) > self.herm_tol:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-10 or abs(np.trace(m).imag) > 1e-10:
            raise ValueError(f"trace = {np.trace(m)} is not 1")
        if np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))) < -1e-9:
            raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", m)


def steady_state(L: np.ndarray) -> DensityMatrix:
    """Null vector of the Liouvillian as a trace-one Hermitian state.

    Raises DegenerateSteadyState when the null space is not
    one-dimensional (second-smallest singular value under 1e-8); reports
    rather than guessing a mixture.
    """
    L = np.asarray(L, dtype=complex)
    if L.shape != (16, 16):
        raise ValueError("Liouvillian must be 16x16")
    _, s, vh = np.linalg.svd(L)
    if s[14] < DEGENERACY_TOL:
        raise DegenerateSteadyState(
            f"null space is (at least) two-dimensional: s13..s15 = {s[13:]}")
    rho = np.conj(vh[15]).reshape(4, 4)
    tr = np.trace(rho)
    if abs(tr) < 1e-14:
        raise DegenerateSteadyState("null vector is traceless; no stationary state")
    rho = rho / tr
    rho = 0.5 * (rho + rho.conj().T)
    residual = np.linalg.norm(L @ rho.reshape(16))
    if residual > 1e-10:
        raise ModelInvariantError(f"steady-state residual {residual:.3e} exceeds 1e-10")
    return DensityMatrix(matrix=rho)


def evolve(L: np.ndarray, rho0: np.ndarray, t: float) -> np.ndarray:
    """Propagate rho0 to time t with expm(L t); returns a plain 4x4 array."""
    r0 = np.asarray(rho0, dtype=complex).reshape(16)
    return (expm(np.asarray(L, dtype=complex) * t) @ r0).reshape(4, 4)


def _as_matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def concurrence(rho) -> float:
    """Wootters concurrence, max(0, l1 - l2 - l3 - l4).

    The l_i are the decreasing square roots of the eigenvalues of
    rho (sy x sy) rho* (sy x sy).
    """
    m = _as_matrix(rho)
    w = np.linalg.eigvals(m @ _YY @ m.conj() @ _YY)
    lam = np.sort(np.sqrt(np.clip(w.real, 0.0, None)))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def trace_distance(a, b) -> float:
    """(1/2) tr |a - b| via singular values of the difference."""
    d = _as_matrix(a) - _as_matrix(b)
    return float(0.5 * np.sum(np.linalg.svd(d, compute_uv=False)))


def reduced_qubit(rho, which: int) -> np.ndarray:
    """Partial trace onto qubit 1 or 2."""
    m = _as_matrix(rho).reshape(2, 2, 2, 2)
    if which == 1:
        return np.einsum("ikjk->ij", m)
    if which == 2:
        return np.einsum("kikj->ij", m)
    raise ValueError("which must be 1 or 2")
