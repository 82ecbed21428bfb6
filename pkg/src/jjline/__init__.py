"""Photon transport in transmission lines with embedded Josephson junctions.

Internal units everywhere: wave speed v = 1, frequencies in units of a
reference omega_ref, lengths in units of lambda_ref = 2 pi v / omega_ref,
so the wavenumber of a frequency-omega photon is k = 2 pi omega.
"""

from .scattering import (
    LineSpec,
    JunctionSpec,
    Segment,
    CrystalChain,
    ScatteringSummary,
    junction_rt,
    junction_T,
    propagator,
    chain_T,
    chain_scattering,
)

__version__ = "0.1.0"


def kernel_backend() -> str:
    """Name of the active kernel implementation: "core" or "purepy"."""
    from ._kernels import IMPL_NAME
    return IMPL_NAME


__all__ = [
    "kernel_backend",
    "LineSpec",
    "JunctionSpec",
    "Segment",
    "CrystalChain",
    "ScatteringSummary",
    "junction_rt",
    "junction_T",
    "propagator",
    "chain_T",
    "chain_scattering",
    "__version__",
]
