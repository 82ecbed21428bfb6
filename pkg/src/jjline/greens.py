"""One-dimensional Green function of a line with an embedded scatterer.

The free line obeys (d^2/dx^2 + k^2) G = -delta(x - x'), solved by
G = (i/2k) e^{ik|x-x'|} with k = 2 pi omega / v in internal units. A
scatterer region [0, L] with total reflection R and transmission T adds an
image term with a minus sign in front of R (the Green function couples
through the field gradient), and transmits (i/2k) T e^{ik(|x-x'|-L)}
across the region. The local coupling density of a qubit at x follows
from the spectral weight Im G(x, x).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import ModelInvariantError, PositionInsideScatterer
from .scattering import LineSpec, ScatteringSummary, wavenumber

__all__ = [
    "GreenGeometry",
    "free_green",
    "scatterer_green",
    "coupling_density",
    "qubit_coupling_g",
]


@dataclass(frozen=True)
class GreenGeometry:
    """Scatterer region [0, L] with qubit positions on either side."""

    region: ScatteringSummary
    x1: float
    x2: float

    def __post_init__(self):
        if not self.x1 < 0:
            raise ValueError("x1 must lie left of the scatterer (x1 < 0)")
        if not self.x2 > self.region.length:
            raise ValueError("x2 must lie right of the scatterer (x2 > L)")


def free_green(x: float, xp: float, omega: float, line: LineSpec | None = None) -> complex:
    """G(x, x') of the bare line, (i/2k) e^{ik|x-x'|}."""
    if not omega > 0:
        raise ValueError("omega must be > 0")
    k = wavenumber(omega, line)
    return (1j / (2.0 * k)) * np.exp(1j * k * abs(x - xp))


def _check_outside(x: float, L: float) -> None:
    if 0.0 < x < L:
        raise PositionInsideScatterer(f"x = {x} lies inside the scatterer region [0, {L}]")


def scatterer_green(geom: GreenGeometry, x: float, xp: float, omega: float,
                    line: LineSpec | None = None) -> complex:
    """G(x, x') with the scatterer region of geom occupying [0, L].

    Same side of the region: free term minus the R-reflected image,
    G = (i/2k)(e^{ik|x-x'|} - R e^{-ik(x+x')}) on the left and its mirror
    on the right (the stored R is reused there; the target geometries are
    symmetric). Opposite sides: G = (i/2k) T e^{ik(|x-x'|-L)}. The x' > L
    source case follows by reciprocity.
    """
    reg = geom.region
    if abs(omega - reg.omega) > 1e-9 * max(1.0, abs(omega)):
        raise ValueError(
            f"geometry holds R, T at omega = {reg.omega}, asked to evaluate at {omega}")
    L = reg.length
    _check_outside(x, L)
    _check_outside(xp, L)
    k = wavenumber(omega, line)
    pref = 1j / (2.0 * k)
    left = (x <= 0.0, xp <= 0.0)
    if left[0] and left[1]:
        return pref * (np.exp(1j * k * abs(x - xp)) - reg.r_total * np.exp(-1j * k * (x + xp)))
    if not left[0] and not left[1]:
        return pref * (np.exp(1j * k * abs(x - xp))
                       - reg.r_total * np.exp(1j * k * (x + xp - 2.0 * L)))
    return pref * reg.t_total * np.exp(1j * k * (abs(x - xp) - L))


def coupling_density(x: float, omega: float, g_ref: float,
                     line: LineSpec | None = None,
                     geom: GreenGeometry | None = None) -> float:
    """|g(x, omega)|^2 = 2 pi (g_ref^2 / v) Im G(x, x, omega).

    Without a geometry the free line is used and the density is position
    independent. Im G below -1e-12 is a broken spectral function and
    raises; tiny negative roundoff is clipped to zero.
    """
    v = 1.0 if line is None else line.v
    if geom is None:
        img = free_green(x, x, omega, line).imag
    else:
        img = scatterer_green(geom, x, x, omega, line).imag
    if img < -1e-12:
        raise ModelInvariantError(f"Im G(x, x) = {img:.3e} < 0 at x = {x}, omega = {omega}")
    return 2.0 * np.pi * (g_ref**2 / v) * max(img, 0.0)


def qubit_coupling_g(Ip: float, A: float, plate_gap: float, omega0: float, Z0: float) -> float:
    """Qubit-line coupling per mode from loop and line parameters, SI in.

    g = Ip A (mu0 / pi^{3/2} d) omega0 sqrt(1 / (hbar Z0)) with d the plate
    gap. The combination on the right carries angular-frequency units (the
    leading hbar of the interaction Hamiltonian is conventional), so g is
    returned in units of the line fundamental omega0, which doubles as the
    reference frequency.
    """
    for name, val in (("Ip", Ip), ("A", A), ("plate_gap", plate_gap),
                      ("omega0", omega0), ("Z0", Z0)):
        if not val > 0:
            raise ValueError(f"{name} must be > 0")
    g = (Ip * A * constants.mu_0 * omega0
         * np.sqrt(1.0 / (constants.hbar * Z0)) / (np.pi**1.5 * plate_gap))
    return float(g / omega0)
