"""Seeded disorder ensembles and the disorder-vs-frequency concurrence map.

Fabrication error is modeled as uniform relative disorder on each junction:
omega_p -> omega_p (1 + u_j) and Z_J -> Z_J (1 + w_j) with independent
u_j, w_j ~ U[-delta, +delta]. Draws come from a counter-based generator
keyed by (seed, realization, junction, parameter slot), so any scheduling
of the parallel map sees identical streams. For every realization the
qubit separation D is re-optimized over a uniform grid on [0, lambda/2),
one period of the e^{-ikD} rate dependence.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from ._kernels import steady_concurrence_batch
from .errors import DegenerateSteadyState, ModelInvariantError, SingularAtResonance
from .openqubits import liouvillian_basis
from .scattering import CrystalChain, JunctionSpec, LineSpec, chain_scattering, wavenumber

__all__ = [
    "DisorderSpec",
    "QubitParams",
    "EnsembleResult",
    "sample_chain",
    "separation_grid",
    "realization_concurrence",
    "ensemble_map",
    "write_ensemble_csv",
]


@dataclass(frozen=True)
class DisorderSpec:
    """Base chain plus disorder strength, ensemble size, and seed."""

    base_chain: CrystalChain
    delta: float
    n_realizations: int
    seed: int
    correlated_draws: bool = False

    def __post_init__(self):
        if not 0 <= self.delta < 1:
            raise ValueError("delta must lie in [0, 1)")
        if self.n_realizations < 1:
            raise ValueError("n_realizations must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class QubitParams:
    """Drive amplitude and rates, all in units of gamma0 unless stated."""

    f: float
    lambda_nr: float
    gamma0: float = 1.0

    def __post_init__(self):
        if self.gamma0 <= 0 or self.lambda_nr < 0:
            raise ValueError("need gamma0 > 0 and lambda_nr >= 0")


@dataclass(frozen=True)
class EnsembleResult:
    """Realization means on the (omega, delta) grid; NaN where every
    realization of a cell failed."""

    omega_grid: np.ndarray
    delta_grid: np.ndarray
    mean_concurrence: np.ndarray
    mean_T: np.ndarray
    D_opt: np.ndarray
    n_failed: np.ndarray

    def __post_init__(self):
        shape = (len(self.omega_grid), len(self.delta_grid))
        for name in ("mean_concurrence", "mean_T", "D_opt", "n_failed"):
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, grids give {shape}")
        c = self.mean_concurrence
        finite = c[np.isfinite(c)]
        if finite.size and (finite.min() < 0 or finite.max() > 1 + 1e-12):
            raise ValueError("mean concurrence escaped [0, 1]")


def _draw(seed: int, realization: int, junction: int, slot: int, delta: float) -> float:
    bg = np.random.Philox(key=np.uint64(seed),
                          counter=[realization, junction, slot, 0])
    return float(np.random.Generator(bg).uniform(-delta, delta))


def sample_chain(spec: DisorderSpec, realization_index: int) -> CrystalChain:
    """Disordered copy of the base chain; bit-reproducible per (seed, index)."""
    if not 0 <= realization_index < spec.n_realizations:
        raise ValueError("realization_index out of range")
    if spec.delta == 0.0:
        return spec.base_chain
    elements = []
    j = 0
    for e in spec.base_chain.elements:
        if isinstance(e, JunctionSpec):
            u = _draw(spec.seed, realization_index, j, 0, spec.delta)
            w = u if spec.correlated_draws else _draw(spec.seed, realization_index,
                                                      j, 1, spec.delta)
            # Z_J -> Z_J (1 + w) means the stored ratio Z0/Z_J divides
            elements.append(JunctionSpec(omega_p=e.omega_p * (1.0 + u),
                                         z_ratio=e.z_ratio / (1.0 + w)))
            j += 1
        else:
            elements.append(e)
    return CrystalChain(elements=tuple(elements))


def separation_grid(omega: float, n: int = 64) -> np.ndarray:
    """n separations uniform on [0, lambda/2), lambda = 1/omega internally."""
    if n < 1:
        raise ValueError("need at least one separation")
    return np.arange(n) * (0.5 / omega / n)


def realization_concurrence(chain: CrystalChain, omega: float, gamma0: float,
                            lambda_nr: float, f: float, D_grid: np.ndarray,
                            line: LineSpec | None = None) -> tuple[float, float]:
    """Best steady-state concurrence over the separation grid.

    Computes the chain's total (R, T) once, builds the rate coefficients
    for every D, and solves the steady states in one batch. Grid points
    whose rate matrix is not positive (|gamma12| > gamma_ii, possible at
    phase coincidences when |T| + |R| > 1 is approached) are skipped;
    if every point is skipped or degenerate the realization fails with
    DegenerateSteadyState. Returns (C_max, D_opt), ties resolved toward
    the smallest D.
    """
    D_grid = np.asarray(D_grid, dtype=float)
    summary = chain_scattering(chain, omega, line)   # raises on resonance
    k = wavenumber(omega, line)
    phase_self = np.exp(-1j * k * D_grid)
    cross = summary.t_total * np.exp(-2j * k * D_grid)
    g_self = gamma0 * (1.0 - (summary.r_total * phase_self).real) + lambda_nr
    g12 = gamma0 * cross.real
    j12 = gamma0 * cross.imag / 2.0
    valid = (g_self >= 0) & (np.abs(g12) <= g_self + 1e-9)
    if not np.any(valid):
        raise DegenerateSteadyState(
            f"no positive rate matrix on the separation grid at omega = {omega}")
    nv = int(np.count_nonzero(valid))
    coeffs = np.empty((nv, 6))
    coeffs[:, 0] = g_self[valid]
    coeffs[:, 1] = g_self[valid]
    coeffs[:, 2] = g12[valid]
    coeffs[:, 3] = j12[valid]
    coeffs[:, 4] = f
    coeffs[:, 5] = 0.0                       # resonant drive
    C, status = steady_concurrence_batch(coeffs, liouvillian_basis())
    good = status == 0
    if not np.any(good):
        raise DegenerateSteadyState(
            f"steady state degenerate on the whole separation grid at omega = {omega}")
    Cv = np.where(good, C, -np.inf)
    best = int(np.argmax(Cv))                # first maximum: smallest D wins ties
    return float(C[best]), float(D_grid[valid][best])


def _cell_mean(spec: DisorderSpec, omega: float, params: QubitParams,
               n_separations: int, line: LineSpec | None):
    """Realization means of one (omega, delta) cell, in fixed index order."""
    D_grid = separation_grid(omega, n_separations)
    c_sum = 0.0
    t_sum = 0.0
    d_sum = 0.0
    n_ok = 0
    n_failed = 0
    for r in range(spec.n_realizations):
        chain = sample_chain(spec, r)
        try:
            c_max, d_opt = realization_concurrence(
                chain, omega, params.gamma0, params.lambda_nr, params.f, D_grid, line)
            t2 = abs(chain_scattering(chain, omega, line).t_total) ** 2
        except (SingularAtResonance, DegenerateSteadyState, ModelInvariantError):
            n_failed += 1
            continue
        c_sum += c_max
        t_sum += t2
        d_sum += d_opt
        n_ok += 1
    if n_ok == 0:
        return np.nan, np.nan, np.nan, n_failed
    return c_sum / n_ok, t_sum / n_ok, d_sum / n_ok, n_failed


def _cell_task(args):
    i, j, spec, omega, params, n_separations, line = args
    return i, j, _cell_mean(spec, omega, params, n_separations, line)


def ensemble_map(spec: DisorderSpec, omega_grid, delta_grid,
                 qubit_params: QubitParams, n_separations: int = 64,
                 workers: int = 1, line: LineSpec | None = None) -> EnsembleResult:
    """Realization-averaged concurrence and transmission over (omega, delta).

    Each grid cell is an independent task (delta overrides spec.delta per
    column); results are written back by index, so the output is
    bit-identical for any worker count.
    """
    omega_grid = np.asarray(omega_grid, dtype=float)
    delta_grid = np.asarray(delta_grid, dtype=float)
    if omega_grid.size == 0 or delta_grid.size == 0:
        raise ValueError("grids must be nonempty")
    shape = (omega_grid.size, delta_grid.size)
    mean_c = np.full(shape, np.nan)
    mean_t = np.full(shape, np.nan)
    d_opt = np.full(shape, np.nan)
    n_failed = np.zeros(shape, dtype=int)
    tasks = [(i, j, replace(spec, delta=float(d)), float(w), qubit_params,
              n_separations, line)
             for i, w in enumerate(omega_grid) for j, d in enumerate(delta_grid)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell_task, tasks))
    else:
        results = [_cell_task(t) for t in tasks]
    for i, j, (c, t2, d, nf) in results:
        mean_c[i, j] = c
        mean_t[i, j] = t2
        d_opt[i, j] = d
        n_failed[i, j] = nf
    return EnsembleResult(omega_grid=omega_grid, delta_grid=delta_grid,
                          mean_concurrence=mean_c, mean_T=mean_t,
                          D_opt=d_opt, n_failed=n_failed)


def write_ensemble_csv(path, result: EnsembleResult) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("omega,delta,mean_C,mean_T2,n_failed\n")
        for i, w in enumerate(result.omega_grid):
            for j, d in enumerate(result.delta_grid):
                fh.write(f"{w:.17g},{d:.17g},"
                         f"{result.mean_concurrence[i, j]:.17g},"
                         f"{result.mean_T[i, j]:.17g},"
                         f"{int(result.n_failed[i, j])}\n")
