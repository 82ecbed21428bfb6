"""Two-dimensional junction networks: Bloch matrix, contours, refraction.

The crystal is a square network of transmission lines with one junction
chain per bond. In the rotated-wave basis each bond contributes a 2x2
block Q = E T E / 2 with E = [[1, 1], [1, -1]], a similarity transform of
the bond transfer matrix T, so Tr Q = Tr T and det Q = 1. Matching the
four waves that meet at a node gives a 4x4 Bloch matrix M(omega, px, py)
whose determinant factorizes (for identical horizontal and vertical bonds)
as

    det M = 2 B e^{-i(px+py)} (cos px + cos py - Tr T),

so nontrivial solutions exist exactly on the dispersion surface
cos px + cos py = Tr T(omega).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BandEdge, EmptyContour, TotalReflection
from .scattering import CrystalChain, LineSpec, chain_T, chain_T_grid

__all__ = [
    "RefractionResult",
    "branch_Q",
    "build_M",
    "det_M_closed_form",
    "dispersion_residual",
    "isofrequency_contour",
    "group_velocity_2d",
    "refract",
    "write_contour_csv",
]

_E = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex)


def branch_Q(cell: CrystalChain, omega: float, line: LineSpec | None = None) -> np.ndarray:
    """Bond block Q = E T E / 2; inherits Tr Q = Tr T and det Q = 1."""
    T = chain_T(cell, omega, line)
    return _E @ T @ _E / 2.0


def build_M(cell: CrystalChain, omega: float, px: float, py: float,
            line: LineSpec | None = None, cell_v: CrystalChain | None = None) -> np.ndarray:
    """Bloch matching matrix of the node, 4x4.

    Unknowns are the two rotated-wave amplitudes on the horizontal bond
    followed by the two on the vertical bond. cell_v defaults to cell
    (symmetric network).
    """
    Qh = branch_Q(cell, omega, line)
    Qv = Qh if cell_v is None else branch_Q(cell_v, omega, line)
    x = np.exp(-1j * px)
    y = np.exp(-1j * py)
    Ah, Bh, Ch, Dh = Qh[0, 0], Qh[0, 1], Qh[1, 0], Qh[1, 1]
    Av, Bv, Cv, Dv = Qv[0, 0], Qv[0, 1], Qv[1, 0], Qv[1, 1]
    return np.array([
        [x * Ah - 1.0, x * Bh, 0.0, 0.0],
        [0.0, 0.0, y * Av - 1.0, y * Bv],
        [1.0, 0.0, -1.0, 0.0],
        [x * Ch, x * Dh - 1.0, y * Cv, y * Dv - 1.0],
    ], dtype=complex)


def det_M_closed_form(cell: CrystalChain, omega: float, px: float, py: float,
                      line: LineSpec | None = None) -> complex:
    """Factorized det M for a symmetric network; vanishes on the dispersion."""
    Q = branch_Q(cell, omega, line)
    tr = (Q[0, 0] + Q[1, 1]).real
    B = Q[0, 1]
    return 2.0 * B * np.exp(-1j * (px + py)) * (np.cos(px) + np.cos(py) - tr)


def _cell_trace(cell: CrystalChain, omegas: np.ndarray, line) -> np.ndarray:
    T, ok = chain_T_grid(cell, omegas, line)
    if not np.all(ok):
        raise EmptyContour(
            "bond chain is singular (junction on resonance); the network is fully gapped")
    return (T[:, 0, 0] + T[:, 1, 1]).real


def dispersion_residual(cell: CrystalChain, omega: float, px: float, py: float,
                        line: LineSpec | None = None) -> float:
    """cos px + cos py - Tr T(omega); zero on a propagating Bloch state."""
    tr = _cell_trace(cell, np.array([omega]), line)[0]
    return float(np.cos(px) + np.cos(py) - tr)


def isofrequency_contour(cell: CrystalChain, omega: float, n: int = 96,
                         line: LineSpec | None = None) -> np.ndarray:
    """Points (px, py) on the contour cos px + cos py = Tr T(omega).

    Marching squares on an n x n grid over [-pi, pi]^2 followed by one
    Newton step per point along the gradient. Points are returned sorted
    lexicographically, so the output is grid-deterministic. Raises
    EmptyContour when the frequency lies in a full gap of the network
    (|Tr| > 2) or no crossing is found.
    """
    tr = _cell_trace(cell, np.array([omega]), line)[0]
    if abs(tr) > 2.0:
        raise EmptyContour(f"|Tr T| = {abs(tr):.6g} > 2 at omega = {omega}: full gap")
    ax = np.linspace(-np.pi, np.pi, n)
    f = np.cos(ax)[:, None] + np.cos(ax)[None, :] - tr  # f[i, j] at (px=ax[i], py=ax[j])
    pts = []
    # crossings along px (vary i) and along py (vary j)
    for i in range(n - 1):
        for j in range(n):
            a, b = f[i, j], f[i + 1, j]
            if a == 0.0 or (a < 0) != (b < 0):
                s = a / (a - b) if a != b else 0.0
                pts.append((ax[i] + s * (ax[i + 1] - ax[i]), ax[j]))
    for i in range(n):
        for j in range(n - 1):
            a, b = f[i, j], f[i, j + 1]
            if a == 0.0 or (a < 0) != (b < 0):
                s = a / (a - b) if a != b else 0.0
                pts.append((ax[i], ax[j] + s * (ax[j + 1] - ax[j])))
    if not pts:
        raise EmptyContour(f"no contour crossings at omega = {omega} (Tr = {tr:.6g})")
    out = np.array(sorted(pts))
    # one Newton step: p -> p - f grad f / |grad f|^2
    fv = np.cos(out[:, 0]) + np.cos(out[:, 1]) - tr
    gx = -np.sin(out[:, 0])
    gy = -np.sin(out[:, 1])
    n2 = gx * gx + gy * gy
    scale = np.where(n2 > 1e-18, fv / np.where(n2 > 1e-18, n2, 1.0), 0.0)
    out[:, 0] -= scale * gx
    out[:, 1] -= scale * gy
    return out


def _trace_slope(cell, omega, line, rel_step=1e-5):
    h = rel_step * omega
    tr = _cell_trace(cell, np.array([omega - h, omega, omega + h]), line)
    return tr[1], (tr[2] - tr[0]) / (2.0 * h)


def group_velocity_2d(cell: CrystalChain, omega: float, px: float, py: float,
                      line: LineSpec | None = None) -> np.ndarray:
    """Group velocity (vx, vy) on the dispersion surface, lattice frame.

    Implicit differentiation of cos px + cos py = Tr T(omega):
    v_i = -2 pi v L sin(p_i) / Tr'(omega), with L the bond length. Raises
    BandEdge where Tr'(omega) is too small to invert.
    """
    v = 1.0 if line is None else line.v
    _, slope = _trace_slope(cell, omega, line)
    if abs(slope) < 1e-12:
        raise BandEdge(f"flat dispersion at omega = {omega}; Tr' = {slope:.2e}")
    pref = -2.0 * np.pi * v * cell.total_length / slope
    return np.array([pref * np.sin(px), pref * np.sin(py)])


@dataclass(frozen=True)
class RefractionResult:
    """Refraction of a plane wave into the 45-degree-cut crystal."""

    omega: float
    theta_in: float
    theta_out: float
    px: float               # Bloch phase along the interface normal (lab frame)
    py: float               # Bloch phase along the interface (lab frame)
    vx: float
    vy: float

    @property
    def negative(self) -> bool:
        return self.theta_in * self.theta_out < 0


def _wrap_pi(x: float) -> float:
    """Fold into (-pi, pi]."""
    y = (x + np.pi) % (2.0 * np.pi) - np.pi
    return np.pi if y == -np.pi else y


def refract(cell: CrystalChain | None, omega: float, theta_in: float,
            line: LineSpec | None = None) -> RefractionResult:
    """Plane-wave refraction at a bare line / crystal interface.

    The crystal is cut along a lattice diagonal, so the interface period is
    sqrt(2) d with d the bond length. The interface-parallel Bloch phase is
    fixed by momentum matching, P_y = 2 pi omega sin(theta_in) sqrt(2) d
    folded into (-pi, pi] (first diffraction order only), and the
    normal phase follows from cos(P_x/2) = Tr T / (2 cos(P_y/2)). Of the
    two P_x branches the causal one is kept: energy must flow into the
    crystal (v_x > 0). Raises TotalReflection when no propagating Bloch
    state matches.

    With cell=None there is no interface and the ray continues straight.
    """
    if not -np.pi / 2 < theta_in < np.pi / 2:
        raise ValueError("theta_in must lie in (-pi/2, pi/2)")
    v = 1.0 if line is None else line.v
    if cell is None:
        return RefractionResult(omega=omega, theta_in=theta_in, theta_out=theta_in,
                                px=np.nan, py=np.nan,
                                vx=v * np.cos(theta_in), vy=v * np.sin(theta_in))
    d = cell.total_length
    if d <= 0:
        raise ValueError("crystal bond must have positive length")
    py = _wrap_pi(2.0 * np.pi * omega * np.sin(theta_in) * np.sqrt(2.0) * d / v)
    tr, slope = _trace_slope(cell, omega, line)
    cy = np.cos(py / 2.0)
    if abs(cy) < 1e-12:
        raise TotalReflection(f"interface phase at zone boundary, omega = {omega}")
    arg = tr / (2.0 * cy)
    if abs(arg) > 1.0:
        raise TotalReflection(
            f"no propagating Bloch state at omega = {omega}, theta_in = {theta_in}")
    px = 2.0 * np.arccos(arg)  # in [0, 2 pi]; branch fixed below by causality
    s = -np.sign(slope) if slope != 0 else 1.0
    if s * np.sin(px / 2.0) < 0:
        px = -px
    # ties (sin = 0) keep the smaller |px|
    if np.sin(px / 2.0) == 0.0 and px > np.pi:
        px -= 2.0 * np.pi
    pref = 2.0 * np.pi * v * np.sqrt(2.0) * d / abs(slope) if slope != 0 else 1.0
    vx = pref * s * np.cos(py / 2.0) * np.sin(px / 2.0)
    vy = pref * s * np.sin(py / 2.0) * np.cos(px / 2.0)
    theta_out = float(np.arctan2(vy, vx))
    return RefractionResult(omega=omega, theta_in=theta_in, theta_out=theta_out,
                            px=float(px), py=float(py), vx=float(vx), vy=float(vy))


def write_contour_csv(path, pts: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("px,py\n")
        for px, py in pts:
            fh.write(f"{px:.17g},{py:.17g}\n")
