"""Single-junction scattering and transfer-matrix composition.

A Josephson junction embedded in a transmission line reflects microwave
photons with amplitude

    r(omega) = 1 / (1 + 2i (Z0/Z_J) (wb^2 - 1) / wb),    wb = omega / omega_p,

and transmits t = 1 - r, so the junction is a perfect mirror exactly on
resonance. Chains of junctions and free segments compose through 2x2
transfer matrices acting on (right-moving, left-moving) amplitude pairs.

Internal units: the wave speed v = 1, frequencies are expressed in units of
a global reference omega_ref, and lengths in units of the reference
wavelength lambda_ref = 2 pi v / omega_ref. A segment of length d therefore
advances the phase by 2 pi omega d / v.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import SingularAtResonance

__all__ = [
    "LineSpec",
    "JunctionSpec",
    "Segment",
    "CrystalChain",
    "ScatteringSummary",
    "wavenumber",
    "junction_rt",
    "junction_T",
    "propagator",
    "chain_T",
    "chain_T_grid",
    "chain_scattering",
]

# |t| below this is treated as exactly on resonance.
RESONANCE_TOL = 1e-12


@dataclass(frozen=True)
class LineSpec:
    """Bare transmission line: impedance scale and wave speed.

    The physics depends on impedances only through the ratios Z0/Z_J stored
    per junction, so z0 is a bookkeeping reference; v is 1 in internal units.
    """

    z0: float = 1.0
    v: float = 1.0

    def __post_init__(self):
        if not (self.z0 > 0 and self.v > 0):
            raise ValueError("LineSpec requires z0 > 0 and v > 0")


@dataclass(frozen=True)
class JunctionSpec:
    """Junction parameters: plasma frequency (units of omega_ref) and Z0/Z_J."""

    omega_p: float
    z_ratio: float

    def __post_init__(self):
        if not (self.omega_p > 0 and self.z_ratio > 0):
            raise ValueError("JunctionSpec requires omega_p > 0 and z_ratio > 0")


@dataclass(frozen=True)
class Segment:
    """Free line segment of length d (units of lambda_ref)."""

    length: float

    def __post_init__(self):
        if not self.length >= 0:
            raise ValueError("Segment length must be >= 0")


@dataclass(frozen=True)
class CrystalChain:
    """Ordered left-to-right sequence of junctions and segments.

    May be empty (bare line). Used both as a periodic unit cell and as a
    finite scattering region.
    """

    elements: tuple = field(default_factory=tuple)

    def __post_init__(self):
        for e in self.elements:
            if not isinstance(e, (JunctionSpec, Segment)):
                raise ValueError(f"unsupported chain element {e!r}")
        object.__setattr__(self, "elements", tuple(self.elements))

    @classmethod
    def periodic(cls, junction: JunctionSpec, n_cells: int, spacing: float) -> "CrystalChain":
        """n_cells repetitions of [junction, segment(spacing)], total length n*spacing."""
        if n_cells < 1:
            raise ValueError("n_cells must be >= 1")
        return cls(elements=(junction, Segment(spacing)) * n_cells)

    @property
    def junctions(self) -> tuple:
        return tuple(e for e in self.elements if isinstance(e, JunctionSpec))

    @property
    def total_length(self) -> float:
        return float(sum(e.length for e in self.elements if isinstance(e, Segment)))


@dataclass(frozen=True)
class ScatteringSummary:
    """Total (r, t) of a finite chain at one frequency, plus its length."""

    omega: float
    r_total: complex
    t_total: complex
    length: float

    def __post_init__(self):
        flux = abs(self.r_total) ** 2 + abs(self.t_total) ** 2
        if flux > 1 + 1e-9:
            raise ValueError(f"|r|^2+|t|^2 = {flux} exceeds 1 (lossless bound)")


def wavenumber(omega: float, line: LineSpec | None = None) -> float:
    """k = 2 pi omega / v in internal units (lengths measured in lambda_ref)."""
    v = 1.0 if line is None else line.v
    return 2.0 * np.pi * omega / v


def junction_rt(j: JunctionSpec, omega: float, line: LineSpec | None = None) -> tuple[complex, complex]:
    """Reflection and transmission amplitudes of a single junction.

    Finite for all omega > 0; on resonance r = 1, t = 0 exactly. The line
    argument is accepted for signature symmetry; the amplitudes depend on
    the line only through the stored ratio Z0/Z_J.
    """
    if not omega > 0:
        raise ValueError("omega must be > 0")
    wb = omega / j.omega_p
    q = 2.0 * j.z_ratio * (wb * wb - 1.0) / wb
    r = 1.0 / (1.0 + 1j * q)
    return r, 1.0 - r


def junction_T(r: complex, t: complex) -> np.ndarray:
    """Transfer matrix [[1/t*, -r*/t*], [-r/t, 1/t]] of a pointlike scatterer.

    Raises SingularAtResonance for |t| < 1e-12; exactly on resonance the
    entries diverge and the caller must detune or use (r, t) directly.
    """
    if abs(t) < RESONANCE_TOL:
        raise SingularAtResonance(f"|t| = {abs(t):.2e} below {RESONANCE_TOL}")
    tc = np.conj(t)
    rc = np.conj(r)
    return np.array([[1.0 / tc, -rc / tc], [-r / t, 1.0 / t]], dtype=complex)


def propagator(d: float, omega: float, line: LineSpec | None = None) -> np.ndarray:
    """Free propagation through distance d: diag(e^{ikd}, e^{-ikd})."""
    if d < 0:
        raise ValueError("d must be >= 0")
    ph = np.exp(1j * wavenumber(omega, line) * d)
    return np.array([[ph, 0.0], [0.0, np.conj(ph)]], dtype=complex)


def _encode(chain: CrystalChain) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pack chain elements into flat arrays for the transfer kernels.

    kind 0 = segment (p1 = length), kind 1 = junction (p1 = omega_p,
    p2 = z_ratio).
    """
    n = len(chain.elements)
    kinds = np.zeros(n, dtype=np.int8)
    p1 = np.zeros(n)
    p2 = np.zeros(n)
    for i, e in enumerate(chain.elements):
        if isinstance(e, JunctionSpec):
            kinds[i] = 1
            p1[i] = e.omega_p
            p2[i] = e.z_ratio
        else:
            p1[i] = e.length
    return kinds, p1, p2


def chain_T_grid(chain: CrystalChain, omegas: np.ndarray, line: LineSpec | None = None
                 ) -> tuple[np.ndarray, np.ndarray]:
    """Transfer matrices of a chain over a frequency grid.

    Returns (T, ok) with T of shape (n, 2, 2); ok[i] is False where some
    junction sits exactly on resonance (the corresponding T[i] is NaN).
    Elements are listed left to right, so the total is E_n ... E_2 E_1.
    """
    kinds, p1, p2 = _encode(chain)
    omegas = np.ascontiguousarray(omegas, dtype=float)
    if np.any(omegas <= 0):
        raise ValueError("frequencies must be > 0")
    v = 1.0 if line is None else line.v
    return _kernels.chain_transfer_grid(kinds, p1, p2, omegas, v, RESONANCE_TOL)


def chain_T(chain: CrystalChain, omega: float, line: LineSpec | None = None) -> np.ndarray:
    """Total transfer matrix at a single frequency."""
    T, ok = chain_T_grid(chain, np.array([omega], dtype=float), line)
    if not ok[0]:
        raise SingularAtResonance(f"chain transfer matrix singular at omega = {omega}")
    return T[0]


def chain_scattering(chain: CrystalChain, omega: float, line: LineSpec | None = None
                     ) -> ScatteringSummary:
    """Total reflection/transmission of a finite chain.

    With the left-to-right transfer matrix M and unit amplitude incident
    from the left, r = -M21/M22 and t = 1/M22. Lossless chains have
    det M = 1 analytically, so 1/M22 is used directly instead of
    det(M)/M22: deep in a gap the entries grow like e^{kappa L} and the
    numerically evaluated determinant loses all significance to
    cancellation while the analytic value stays 1.

    The sign/conjugation convention is pinned by round-trip consistency:
    a single-junction chain reproduces junction_rt exactly.
    """
    M = chain_T(chain, omega, line)
    if abs(M[1, 1]) < RESONANCE_TOL:
        raise SingularAtResonance(f"M22 = {M[1, 1]:.2e} too small at omega = {omega}")
    t = 1.0 / M[1, 1]
    r = -M[1, 0] / M[1, 1]
    return ScatteringSummary(omega=omega, r_total=complex(r), t_total=complex(t),
                             length=chain.total_length)
