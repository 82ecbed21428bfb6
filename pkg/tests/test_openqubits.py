"""Two-qubit Lindblad dynamics, rates from the line, concurrence."""

import numpy as np
import pytest

from jjline.errors import DegenerateSteadyState, ModelInvariantError
from jjline.greens import GreenGeometry, scatterer_green
from jjline.openqubits import (
    DensityMatrix,
    LindbladModel,
    build_liouvillian,
    concurrence,
    evolve,
    liouvillian_basis,
    rates_from_line,
    reduced_qubit,
    steady_state,
    trace_distance,
)
from jjline.scattering import (
    CrystalChain,
    JunctionSpec,
    LineSpec,
    ScatteringSummary,
    Segment,
    chain_scattering,
    wavenumber,
)

LINE = LineSpec()

BELL_PLUS = np.zeros((4, 4), dtype=complex)
BELL_PLUS[1:3, 1:3] = 0.5  # (|eg> + |ge>)/sqrt(2)

GG = np.diag([0.0, 0.0, 0.0, 1.0]).astype(complex)


def _free_region(omega):
    return ScatteringSummary(omega=omega, r_total=0j, t_total=1.0 + 0j, length=0.0)


def _random_model(rng):
    g11 = float(rng.uniform(0.2, 2.0))
    g22 = float(rng.uniform(0.2, 2.0))
    g12 = float(rng.uniform(-1.0, 1.0)) * np.sqrt(g11 * g22)
    return LindbladModel(
        epsilon=1.0,
        gamma=np.array([[g11, g12], [g12, g22]]),
        J12=float(rng.uniform(-0.5, 0.5)),
        gamma0=1.0,
        f=float(rng.uniform(0.01, 0.5)),
        omega_d=1.0 + float(rng.uniform(-0.2, 0.2)),
    )


def _random_relaxing_model(rng, min_gap=0.35):
    # near |gamma12| = sqrt(g11 g22) a subradiant mode decays arbitrarily
    # slowly and no fixed evolution time reaches the steady state; keep
    # models whose slowest relaxation rate resolves t = 50/gamma0
    for _ in range(200):
        model = _random_model(rng)
        ev = np.linalg.eigvals(build_liouvillian(model))
        rates = np.abs(ev.real[np.abs(ev) > 1e-10])
        if rates.min() >= min_gap:
            return model
    raise AssertionError("no relaxing model found")


# ---------------------------------------------------------------- rates

def test_rates_free_line_quadrature():
    # T = 1, R = 0: gamma12 = g0 cos(2kD), J12 = -g0 sin(2kD)/2,
    # gamma_ii = g0 + lambda for every separation
    eps, g0, lam = 0.9, 1.3, 0.25
    k = wavenumber(eps, LINE)
    reg = _free_region(eps)
    for D in np.linspace(0.0, 0.5 / eps, 40):
        m = rates_from_line(reg, float(D), eps, g0, lam)
        np.testing.assert_allclose(m.gamma[0, 0], g0 + lam, rtol=1e-12)
        np.testing.assert_allclose(m.gamma[1, 1], g0 + lam, rtol=1e-12)
        np.testing.assert_allclose(m.gamma[0, 1], g0 * np.cos(2 * k * D), atol=1e-12)
        np.testing.assert_allclose(m.J12, -g0 * np.sin(2 * k * D) / 2.0, atol=1e-12)


def test_cross_rates_match_green_function():
    # gamma12 + 2i J12 and 2 k G(x1, x2) carry the same transmission
    # amplitude; the separation phase winds the opposite way (the rate
    # convention rotates with e^{-ikD}), so compare the full complex value
    # only at D = 0 and magnitudes elsewhere
    chain = CrystalChain.periodic(JunctionSpec(omega_p=1.0, z_ratio=10.0),
                                  n_cells=5, spacing=0.1)
    eps, g0 = 0.83, 1.0
    reg = chain_scattering(chain, eps, LINE)
    k = wavenumber(eps, LINE)
    L = reg.length

    geom0 = GreenGeometry(region=reg, x1=-1e-12, x2=L + 1e-12)
    g = scatterer_green(geom0, -1e-12, L + 1e-12, eps, LINE)
    m = rates_from_line(reg, 0.0, eps, g0, 0.0)
    np.testing.assert_allclose(m.gamma[0, 1], 2.0 * g0 * k * g.imag, rtol=1e-9)
    np.testing.assert_allclose(abs(m.J12), g0 * k * abs(g.real), rtol=1e-9)

    # the pinned rate combination is not positive for every D; a
    # non-radiative floor keeps the model valid without touching the
    # cross rates under test
    for D in (0.01, 0.13, 0.29, 0.44):
        geom = GreenGeometry(region=reg, x1=-D, x2=L + D)
        g = scatterer_green(geom, -D, L + D, eps, LINE)
        m = rates_from_line(reg, D, eps, g0, 0.5)
        np.testing.assert_allclose(abs(m.gamma[0, 1] + 2j * m.J12),
                                   2.0 * g0 * k * abs(g), rtol=1e-10)


def test_rates_psd_violation_raises():
    # a fictitious lossless region with |T| = 1 and R = 0 at lambda = 0
    # saturates the bound; pushing |gamma12| above it must raise
    with pytest.raises(ModelInvariantError):
        LindbladModel(epsilon=1.0, gamma=np.array([[0.5, 0.8], [0.8, 0.5]]),
                      J12=0.0, gamma0=1.0)


def test_rates_frequency_mismatch_rejected():
    with pytest.raises(ValueError):
        rates_from_line(_free_region(0.9), 0.1, 1.0, 1.0, 0.0)


def test_rates_negative_separation_rejected():
    with pytest.raises(ValueError):
        rates_from_line(_free_region(1.0), -0.1, 1.0, 1.0, 0.0)


# ----------------------------------------------------- liouvillian structure

def test_liouvillian_preserves_trace():
    # tr(d rho/dt) = 0 for every generator: the trace functional is a left
    # null vector of each basis element
    tr_vec = np.eye(4, dtype=complex).reshape(16)
    for b in liouvillian_basis():
        assert np.linalg.norm(tr_vec @ b) < 1e-12


def test_liouvillian_unique_zero_eigenvalue():
    rng = np.random.default_rng(61)
    for _ in range(10):
        L = build_liouvillian(_random_model(rng))
        ev = np.sort(np.abs(np.linalg.eigvals(L)))
        assert ev[0] < 1e-12
        assert ev[1] > 1e-8


def test_liouvillian_keeps_states_physical():
    rng = np.random.default_rng(62)
    model = _random_model(rng)
    L = build_liouvillian(model)
    rho = evolve(L, BELL_PLUS, 0.7)
    DensityMatrix(matrix=rho, herm_tol=1e-9)  # validates trace/hermiticity/psd


def test_single_qubit_decay_rate():
    # no drive, no cross terms: populations decay at 2 gamma_ii
    g11, g22 = 0.7, 1.1
    model = LindbladModel(epsilon=1.0, gamma=np.diag([g11, g22]), J12=0.0,
                          gamma0=1.0, f=0.0)
    L = build_liouvillian(model)
    rho0 = np.diag([0.0, 1.0, 0.0, 0.0]).astype(complex)  # |eg>
    t = 0.37
    rho = evolve(L, rho0, t)
    np.testing.assert_allclose(rho[1, 1].real, np.exp(-2.0 * g11 * t), rtol=1e-10)
    rho0 = np.diag([0.0, 0.0, 1.0, 0.0]).astype(complex)  # |ge>
    rho = evolve(L, rho0, t)
    np.testing.assert_allclose(rho[2, 2].real, np.exp(-2.0 * g22 * t), rtol=1e-10)


def test_undriven_state_relaxes_to_ground():
    model = LindbladModel(epsilon=1.0, gamma=np.diag([1.0, 1.0]), J12=0.1,
                          gamma0=1.0, f=0.0)
    L = build_liouvillian(model)
    rho = evolve(L, BELL_PLUS, 40.0)
    assert trace_distance(rho, GG) < 1e-10


# ------------------------------------------------------------- steady state

def test_steady_state_matches_long_time_evolution():
    rng = np.random.default_rng(63)
    for _ in range(8):
        model = _random_relaxing_model(rng)
        L = build_liouvillian(model)
        rho_ss = steady_state(L)
        rho_t = evolve(L, GG, 50.0 / model.gamma0)
        assert trace_distance(rho_ss, rho_t) < 1e-6


def test_steady_state_residual_and_trace():
    rng = np.random.default_rng(64)
    model = _random_model(rng)
    L = build_liouvillian(model)
    rho = steady_state(L).matrix
    assert abs(np.trace(rho) - 1.0) < 1e-12
    assert np.linalg.norm(L @ rho.reshape(16)) < 1e-10


def test_steady_state_degenerate_raises():
    # all rates zero and no drive: every diagonal state is stationary
    model = LindbladModel(epsilon=1.0, gamma=np.zeros((2, 2)), J12=0.0,
                          gamma0=1.0, f=0.0)
    with pytest.raises(DegenerateSteadyState):
        steady_state(build_liouvillian(model))


def test_steady_state_rejects_wrong_shape():
    with pytest.raises(ValueError):
        steady_state(np.zeros((4, 4)))


def test_weak_drive_steady_state_is_separable():
    # f -> 0: the stationary state approaches |gg><gg| and C -> 0
    reg = _free_region(1.0)
    model = rates_from_line(reg, 0.2, 1.0, 1.0, 0.1).with_drive(1e-4)
    rho = steady_state(build_liouvillian(model))
    assert concurrence(rho) < 1e-6
    assert trace_distance(rho, GG) < 1e-3


# -------------------------------------------------------------- concurrence

def test_concurrence_bell_state():
    assert concurrence(BELL_PLUS) == pytest.approx(1.0, abs=1e-12)


def test_concurrence_product_states():
    assert concurrence(GG) == pytest.approx(0.0, abs=1e-12)
    plus = np.full((2, 2), 0.5, dtype=complex)
    rho = np.kron(plus, plus)
    assert concurrence(rho) == pytest.approx(0.0, abs=1e-10)


def test_concurrence_werner_closed_form():
    # p |Bell><Bell| + (1-p)/4 I: C = max(0, (3p - 1)/2)
    for p in (0.2, 0.5, 0.9):
        rho = p * BELL_PLUS + (1.0 - p) * np.eye(4) / 4.0
        expect = max(0.0, (3.0 * p - 1.0) / 2.0)
        np.testing.assert_allclose(concurrence(rho), expect, atol=1e-12)


def test_concurrence_werner_negativity_cross_check():
    # for Werner states C = 2 N with N the negativity (partial transpose)
    for p in (0.5, 0.7, 0.9):
        rho = p * BELL_PLUS + (1.0 - p) * np.eye(4) / 4.0
        pt = rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
        neg = (np.sum(np.abs(np.linalg.eigvalsh(pt))) - 1.0) / 2.0
        np.testing.assert_allclose(concurrence(rho), 2.0 * neg, atol=1e-10)


def test_concurrence_local_unitary_invariant():
    rng = np.random.default_rng(65)
    model = _random_model(rng)
    rho = steady_state(build_liouvillian(model)).matrix
    c0 = concurrence(rho)
    for _ in range(10):
        q1, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        q2, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        u = np.kron(q1, q2)
        assert abs(concurrence(u @ rho @ u.conj().T) - c0) < 1e-10


# ------------------------------------------------------------------- misc

def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix(matrix=np.eye(4))  # trace 4
    bad = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
    bad[0, 1] = 0.3
    with pytest.raises(ValueError):
        DensityMatrix(matrix=bad)  # not hermitian
    neg = np.diag([1.2, -0.2, 0.0, 0.0]).astype(complex)
    with pytest.raises(ValueError):
        DensityMatrix(matrix=neg)  # negative eigenvalue


def test_model_validation():
    with pytest.raises(ModelInvariantError):
        LindbladModel(epsilon=1.0, gamma=np.array([[1.0, 0.2], [0.3, 1.0]]),
                      J12=0.0, gamma0=1.0)
    with pytest.raises(ModelInvariantError):
        LindbladModel(epsilon=1.0, gamma=np.diag([-0.1, 1.0]), J12=0.0, gamma0=1.0)
    with pytest.raises(ModelInvariantError):
        LindbladModel(epsilon=1.0, gamma=np.eye(2), J12=0.0, gamma0=0.0)


def test_model_detuning_and_drive():
    m = LindbladModel(epsilon=1.2, gamma=np.eye(2), J12=0.0, gamma0=1.0)
    assert m.omega_d == 1.2  # resonant by default
    assert m.detuning == 0.0
    m2 = m.with_drive(0.3)
    assert m2.f == 0.3
    coeffs = m2.coefficients()
    np.testing.assert_allclose(coeffs, [1.0, 1.0, 0.0, 0.0, 0.3, 0.0])


def test_reduced_qubit_of_product_state():
    a = np.array([[0.7, 0.2], [0.2, 0.3]], dtype=complex)
    b = np.array([[0.4, -0.1j], [0.1j, 0.6]], dtype=complex)
    rho = np.kron(a, b)
    np.testing.assert_allclose(reduced_qubit(rho, 1), a, atol=1e-14)
    np.testing.assert_allclose(reduced_qubit(rho, 2), b, atol=1e-14)
    with pytest.raises(ValueError):
        reduced_qubit(rho, 3)


def test_mirror_decouples_far_qubit():
    # R = -1 not reachable here; use a resonant junction (R = 1, T = 0):
    # the cross rates vanish and qubit 2 never gets excited
    chain = CrystalChain(elements=(JunctionSpec(omega_p=1.0, z_ratio=5.0),))
    eps = 1.0 * (1 - 1e-13)
    reg = chain_scattering(chain, eps, LINE)
    model = rates_from_line(reg, 0.17, eps, 1.0, 0.3).with_drive(0.2)
    assert abs(model.gamma[0, 1]) < 1e-9
    assert abs(model.J12) < 1e-9
    rho = steady_state(build_liouvillian(model))
    r2 = reduced_qubit(rho, 2)
    np.testing.assert_allclose(r2, np.diag([0.0, 1.0]), atol=1e-9)
    assert concurrence(rho) < 1e-9
