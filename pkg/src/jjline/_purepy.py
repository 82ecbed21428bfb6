"""Pure numpy implementations of the hot kernels.

Reference semantics for the compiled extension in jjline._core; selected by
jjline._kernels when the extension is missing or JJLINE_PURE_PYTHON is set.
Everything here is vectorized but allocation-heavy, which is what the
compiled path removes.
"""

from __future__ import annotations

import numpy as np

IMPL_NAME = "purepy"

# spin-flip matrix sigma_y (x) sigma_y, used by the concurrence
_YY = np.array(
    [[0, 0, 0, -1],
     [0, 0, 1, 0],
     [0, 1, 0, 0],
     [-1, 0, 0, 0]], dtype=complex)


def chain_transfer_grid(kinds, p1, p2, omegas, v, tol):
    """Left-to-right transfer-matrix product of a chain over a frequency grid.

    kinds[i] = 0 marks a free segment (p1[i] = length) and 1 a junction
    (p1[i] = omega_p, p2[i] = z_ratio). Returns (T, ok) with T of shape
    (m, 2, 2); where ok[i] is False some junction sat exactly on resonance
    and T[i] is NaN.
    """
    m = omegas.shape[0]
    T = np.zeros((m, 2, 2), dtype=complex)
    T[:, 0, 0] = 1.0
    T[:, 1, 1] = 1.0
    ok = np.ones(m, dtype=bool)
    for i in range(kinds.shape[0]):
        if kinds[i] == 0:
            ph = np.exp(2j * np.pi * omegas * (p1[i] / v))
            T[:, 0, :] *= ph[:, None]
            T[:, 1, :] *= np.conj(ph)[:, None]
        else:
            wb = omegas / p1[i]
            q = 2.0 * p2[i] * (wb * wb - 1.0) / wb
            r = 1.0 / (1.0 + 1j * q)
            t = 1.0 - r
            bad = np.abs(t) < tol
            ok &= ~bad
            t = np.where(bad, 1.0, t)  # placeholder; rows are NaN-ed below
            a = 1.0 / np.conj(t)
            c = -r / t
            # element matrix is [[a, conj(c)], [c, conj(a)]]
            t00 = a * T[:, 0, 0] + np.conj(c) * T[:, 1, 0]
            t01 = a * T[:, 0, 1] + np.conj(c) * T[:, 1, 1]
            t10 = c * T[:, 0, 0] + np.conj(a) * T[:, 1, 0]
            t11 = c * T[:, 0, 1] + np.conj(a) * T[:, 1, 1]
            T[:, 0, 0] = t00
            T[:, 0, 1] = t01
            T[:, 1, 0] = t10
            T[:, 1, 1] = t11
    T[~ok] = np.nan
    return T, ok


def _concurrence_block(rho):
    R = rho @ _YY @ np.conj(rho) @ _YY
    w = np.linalg.eigvals(R)
    lam = np.sqrt(np.clip(w.real, 0.0, None))
    lam.sort(axis=-1)
    return np.maximum(0.0, lam[..., 3] - lam[..., 2] - lam[..., 1] - lam[..., 0])


def steady_concurrence_batch(coeffs, basis, sv_tol=1e-8):
    """Steady-state concurrence for a batch of Liouvillian coefficient rows.

    L_m = sum_k coeffs[m, k] basis[k]; the steady state is the right
    singular vector of the smallest singular value, reshaped row-major to a
    4x4 density matrix and trace-normalized. Returns (C, status) with
    status 0 = ok, 1 = degenerate null space (second singular value below
    sv_tol) or vanishing trace, 2 = linear algebra failure; C is NaN
    wherever status is nonzero.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    m = coeffs.shape[0]
    C = np.full(m, np.nan)
    status = np.zeros(m, dtype=np.int8)
    L = np.einsum("mk,kab->mab", coeffs, basis, optimize=True)
    try:
        _, s, vh = np.linalg.svd(L)
    except np.linalg.LinAlgError:
        # retry one by one so a single bad matrix cannot poison the batch
        for i in range(m):
            try:
                _, si, vhi = np.linalg.svd(L[i])
            except np.linalg.LinAlgError:
                status[i] = 2
                continue
            C[i], status[i] = _steady_one(si, vhi, sv_tol)
        return C, status
    status[s[:, 14] < sv_tol] = 1
    vec = np.conj(vh[:, 15, :])
    rho = vec.reshape(m, 4, 4)
    tr = np.einsum("mii->m", rho)
    status[(np.abs(tr) < 1e-14) & (status == 0)] = 1
    good = status == 0
    if np.any(good):
        rg = rho[good] / tr[good][:, None, None]
        rg = 0.5 * (rg + np.conj(np.swapaxes(rg, 1, 2)))
        C[good] = _concurrence_block(rg)
    return C, status


def _steady_one(s, vh, sv_tol):
    if s[14] < sv_tol:
        return np.nan, 1
    rho = np.conj(vh[15]).reshape(4, 4)
    tr = np.trace(rho)
    if abs(tr) < 1e-14:
        return np.nan, 1
    rho = rho / tr
    rho = 0.5 * (rho + rho.conj().T)
    return float(_concurrence_block(rho)), 0
