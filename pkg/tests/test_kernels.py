"""Compiled kernels against the numpy fallback and the reference routines."""

import os
import subprocess
import sys

import numpy as np
import pytest

from jjline import _kernels, _purepy
from jjline.openqubits import (
    LindbladModel,
    build_liouvillian,
    concurrence,
    liouvillian_basis,
    steady_state,
)
from jjline.scattering import (
    RESONANCE_TOL,
    CrystalChain,
    JunctionSpec,
    LineSpec,
    Segment,
    _encode,
    chain_T_grid,
)

try:
    from jjline import _core
except ImportError:
    _core = None

needs_core = pytest.mark.skipif(_core is None, reason="compiled extension not built")


def _random_chain(rng, n=6):
    elems = []
    for _ in range(n):
        elems.append(JunctionSpec(omega_p=float(rng.uniform(0.5, 1.5)),
                                  z_ratio=float(rng.uniform(0.5, 15.0))))
        elems.append(Segment(length=float(rng.uniform(0.0, 0.3))))
    return CrystalChain(elements=tuple(elems))


def _random_coeff_batch(rng, n=50):
    g11 = rng.uniform(0.3, 1.5, size=n)
    g22 = rng.uniform(0.3, 1.5, size=n)
    g12 = rng.uniform(-0.9, 0.9, size=n) * np.sqrt(g11 * g22)
    j12 = rng.uniform(-0.5, 0.5, size=n)
    f = rng.uniform(0.02, 0.4, size=n)
    det = rng.uniform(-0.1, 0.1, size=n)
    return np.column_stack([g11, g22, g12, j12, f, det])


@needs_core
def test_transfer_grid_core_matches_purepy():
    rng = np.random.default_rng(71)
    omegas = np.linspace(0.1, 2.0, 400)
    for _ in range(10):
        chain = _random_chain(rng)
        kinds, p1, p2 = _encode(chain)
        Tc, okc = _core.chain_transfer_grid(kinds, p1, p2, omegas, 1.0, RESONANCE_TOL)
        Tp, okp = _purepy.chain_transfer_grid(kinds, p1, p2, omegas, 1.0, RESONANCE_TOL)
        np.testing.assert_array_equal(okc, okp)
        np.testing.assert_allclose(Tc[okc], Tp[okp], rtol=1e-12, atol=1e-12)


@needs_core
def test_transfer_grid_core_flags_resonance():
    chain = CrystalChain(elements=(JunctionSpec(omega_p=1.0, z_ratio=5.0),
                                   Segment(length=0.1)))
    kinds, p1, p2 = _encode(chain)
    omegas = np.array([0.9, 1.0, 1.1])
    Tc, okc = _core.chain_transfer_grid(kinds, p1, p2, omegas, 1.0, RESONANCE_TOL)
    np.testing.assert_array_equal(okc, [True, False, True])
    assert np.all(np.isnan(Tc[1].real))


@needs_core
def test_steady_concurrence_core_matches_purepy():
    rng = np.random.default_rng(72)
    coeffs = _random_coeff_batch(rng, n=80)
    basis = np.ascontiguousarray(liouvillian_basis())
    Cc, sc = _core.steady_concurrence_batch(coeffs, basis, 1e-8)
    Cp, sp = _purepy.steady_concurrence_batch(coeffs, basis, 1e-8)
    np.testing.assert_array_equal(sc, sp)
    good = sc == 0
    assert good.any()
    np.testing.assert_allclose(Cc[good], Cp[good], atol=1e-10)


def test_steady_concurrence_matches_reference():
    # whichever implementation is active must agree with the direct
    # steady_state + concurrence route
    rng = np.random.default_rng(73)
    coeffs = _random_coeff_batch(rng, n=30)
    basis = np.ascontiguousarray(liouvillian_basis())
    C, status = _kernels.steady_concurrence_batch(coeffs, basis, 1e-8)
    for i in range(coeffs.shape[0]):
        if status[i] != 0:
            continue
        model = LindbladModel(
            epsilon=1.0,
            gamma=np.array([[coeffs[i, 0], coeffs[i, 2]],
                            [coeffs[i, 2], coeffs[i, 1]]]),
            J12=coeffs[i, 3], gamma0=1.0, f=coeffs[i, 4],
            omega_d=1.0 - coeffs[i, 5])
        rho = steady_state(build_liouvillian(model))
        np.testing.assert_allclose(C[i], concurrence(rho), atol=1e-9)


def test_steady_concurrence_degenerate_status():
    basis = np.ascontiguousarray(liouvillian_basis())
    coeffs = np.zeros((2, 6))
    coeffs[1] = [1.0, 1.0, 0.0, 0.0, 0.1, 0.0]
    C, status = _kernels.steady_concurrence_batch(coeffs, basis, 1e-8)
    assert status[0] == 1  # zero generator: fully degenerate
    assert status[1] == 0
    assert np.isnan(C[0])


def test_transfer_grid_dispatch_equals_chain_T_grid():
    rng = np.random.default_rng(74)
    chain = _random_chain(rng)
    omegas = np.linspace(0.2, 1.8, 100)
    T, ok = chain_T_grid(chain, omegas, LineSpec())
    kinds, p1, p2 = _encode(chain)
    T2, ok2 = _kernels.chain_transfer_grid(kinds, p1, p2, omegas, 1.0, RESONANCE_TOL)
    np.testing.assert_array_equal(ok, ok2)
    np.testing.assert_array_equal(T, T2)


def test_env_var_forces_fallback():
    code = (
        "import jjline._kernels as k; print(k.IMPL_NAME)"
    )
    env = dict(os.environ, JJLINE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True,
                         text=True, env=env, check=True)
    assert out.stdout.strip() == "purepy"
    env = dict(os.environ, JJLINE_PURE_PYTHON="0")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True,
                         text=True, env=env, check=True)
    # "0" means do not force; either implementation is legal
    assert out.stdout.strip() in ("core", "purepy")


@needs_core
def test_core_is_default_when_built():
    env = {k: v for k, v in os.environ.items() if k != "JJLINE_PURE_PYTHON"}
    out = subprocess.run(
        [sys.executable, "-c", "import jjline._kernels as k; print(k.IMPL_NAME)"],
        capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "core"
