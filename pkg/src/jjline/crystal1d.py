"""Bloch bands of a one-dimensional junction crystal.

For a periodic chain with unit-cell transfer matrix T(omega), the Bloch
phase p per cell satisfies 2 cos p = Tr T. Lossless cells have a real
trace, so |Tr| <= 2 marks a propagating band and |Tr| > 2 a gap, where
Im p = arccosh(|Tr|/2) is the attenuation per cell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BandEdge, InsideGap, ModelInvariantError
from .scattering import CrystalChain, LineSpec, chain_T_grid

__all__ = [
    "BandStructure",
    "cell_trace",
    "bloch_phase",
    "band_structure",
    "find_gaps",
    "group_velocity",
    "write_band_csv",
]

# tolerated imaginary part of the cell trace, relative to max(1, |Re Tr|)
_TRACE_IMAG_TOL = 1e-9


@dataclass(frozen=True)
class BandStructure:
    """Bloch phase over a frequency grid for one unit cell."""

    omegas: np.ndarray
    bloch: np.ndarray        # complex p per cell, Im p >= 0
    trace: np.ndarray        # real part of Tr T(omega)
    in_gap: np.ndarray       # bool, |Tr| > 2 (or cell singular on resonance)
    cell_length: float


def cell_trace(cell: CrystalChain, omegas: np.ndarray, line: LineSpec | None = None
               ) -> tuple[np.ndarray, np.ndarray]:
    """Real trace of the cell transfer matrix on a grid.

    Returns (trace, ok); trace is NaN where ok is False (a junction exactly
    on resonance, which sits inside a gap). Raises ModelInvariantError if
    the trace develops an imaginary part, which a lossless cell cannot.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    T, ok = chain_T_grid(cell, omegas, line)
    tr = T[:, 0, 0] + T[:, 1, 1]
    im = np.abs(tr.imag[ok])
    ref = np.maximum(1.0, np.abs(tr.real[ok]))
    if im.size and np.max(im / ref) > _TRACE_IMAG_TOL:
        raise ModelInvariantError(
            f"cell trace has imaginary part {np.max(im):.3e}; cell is not lossless")
    return tr.real, ok


def _phase_from_trace(tr_half: np.ndarray) -> np.ndarray:
    p = np.arccos(tr_half.astype(complex))
    return np.where(p.imag < 0, np.conj(p), p)


def bloch_phase(cell: CrystalChain, omega: float, line: LineSpec | None = None) -> complex:
    """Bloch phase p at one frequency, principal branch with Im p >= 0."""
    tr, ok = cell_trace(cell, np.array([omega]), line)
    if not ok[0]:
        raise InsideGap(f"cell is singular (junction on resonance) at omega = {omega}")
    return complex(_phase_from_trace(tr / 2.0)[0])


def band_structure(cell: CrystalChain, omegas: np.ndarray, line: LineSpec | None = None
                   ) -> BandStructure:
    """Bloch phase over a frequency grid; resonant points are marked in-gap."""
    omegas = np.asarray(omegas, dtype=float)
    tr, ok = cell_trace(cell, omegas, line)
    # a resonant junction is a perfect mirror: deep inside a gap
    tr_safe = np.where(ok, tr, 3.0)
    p = _phase_from_trace(tr_safe / 2.0)
    p = np.where(ok, p, np.pi + 1j * np.inf)
    in_gap = (np.abs(tr_safe) > 2.0) | ~ok
    return BandStructure(omegas=omegas, bloch=p, trace=np.where(ok, tr, np.nan),
                         in_gap=in_gap, cell_length=cell.total_length)


def _gap_fn(cell, line):
    def g(w: float) -> float:
        tr, ok = cell_trace(cell, np.array([w]), line)
        if not ok[0]:
            return np.inf
        return abs(tr[0]) / 2.0 - 1.0
    return g


def _bisect_edge(g, a: float, b: float, rel_tol: float) -> float:
    """Root of g between a and b (opposite signs), to relative rel_tol."""
    ga = g(a)
    if a > b:
        a, b = b, a
        ga = g(a)
    for _ in range(200):
        if b - a <= rel_tol * max(abs(a), abs(b)):
            break
        mid = 0.5 * (a + b)
        gm = g(mid)
        if (gm > 0) == (ga > 0):
            a, ga = mid, gm
        else:
            b = mid
    return 0.5 * (a + b)


def find_gaps(cell: CrystalChain, omega_min: float, omega_max: float,
              n_scan: int = 2000, line: LineSpec | None = None,
              rel_tol: float = 1e-8) -> tuple[tuple[float, float], ...]:
    """Band gaps of the cell inside [omega_min, omega_max].

    Scans n_scan points for sign changes of |Tr|/2 - 1, then bisects each
    edge to relative tolerance rel_tol. Gaps truncated by the scan window
    are reported with the window boundary as their edge.
    """
    if not (0 < omega_min < omega_max):
        raise ValueError("need 0 < omega_min < omega_max")
    omegas = np.linspace(omega_min, omega_max, n_scan)
    tr, ok = cell_trace(cell, omegas, line)
    gvals = np.where(ok, np.abs(tr) / 2.0 - 1.0, np.inf)
    g = _gap_fn(cell, line)
    gaps = []
    i = 0
    while i < n_scan:
        if gvals[i] > 0:
            j = i
            while j + 1 < n_scan and gvals[j + 1] > 0:
                j += 1
            lo = omegas[i] if i == 0 else _bisect_edge(g, omegas[i - 1], omegas[i], rel_tol)
            hi = omegas[j] if j == n_scan - 1 else _bisect_edge(g, omegas[j + 1], omegas[j], rel_tol)
            gaps.append((float(min(lo, hi)), float(max(lo, hi))))
            i = j + 1
        else:
            i += 1
    return tuple(gaps)


def group_velocity(cell: CrystalChain, omega: float, line: LineSpec | None = None,
                   rel_step: float = 1e-5) -> float:
    """|v_g| = 2 pi v L_cell |d omega / d p| by central difference.

    The factor 2 pi v converts the dimensionless slope to units of the wave
    speed (lengths are measured in lambda_ref = 2 pi v / omega_ref).
    Raises InsideGap at gap frequencies and BandEdge when the stencil
    straddles a band edge.
    """
    v = 1.0 if line is None else line.v
    h = rel_step * omega
    tr, ok = cell_trace(cell, np.array([omega - h, omega, omega + h]), line)
    if not ok[1] or abs(tr[1]) > 2.0:
        raise InsideGap(f"omega = {omega} lies in a band gap")
    if not (ok[0] and ok[2]) or abs(tr[0]) > 2.0 or abs(tr[2]) > 2.0:
        raise BandEdge(f"finite-difference stencil at omega = {omega} crosses a band edge")
    p = _phase_from_trace(tr / 2.0).real
    dp = p[2] - p[0]
    if dp == 0.0:
        raise BandEdge(f"flat Bloch phase at omega = {omega}; cannot resolve v_g")
    return abs(2.0 * np.pi * v * cell.total_length * (2.0 * h) / dp)


def write_band_csv(path, bs: BandStructure) -> None:
    """Write omega, re_p, im_p rows; attenuation at resonant points is inf."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("omega,re_p,im_p\n")
        for w, p in zip(bs.omegas, bs.bloch):
            fh.write(f"{w:.17g},{p.real:.17g},{p.imag:.17g}\n")
