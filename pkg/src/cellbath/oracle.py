"""Brute-force ground truth: exact evolution in the full product Hilbert space.

The models here carry an atom (or two atoms) together with every spin of the
unit cell explicitly, with no collective-basis shortcuts, and evolve the
product state by full diagonalization.  They exist to validate the closed
forms and the sector engine; dimensions are capped at 8192 to keep runtimes
at seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .meanfield import FieldVector, LatticeSpec, MeanFieldSolution, ThermalPoint, effective_field, free_energy
from .spinops import SpinMagnitude, hermitian_spectral, spin_matrices, thermal_state

DIMENSION_CAP = 8192

BELL_PHI = np.zeros((4, 4), dtype=complex)
BELL_PHI[0, 0] = BELL_PHI[0, 3] = BELL_PHI[3, 0] = BELL_PHI[3, 3] = 0.5
BELL_PHI.setflags(write=False)


def _op_on(slot_ops: dict, dims: list) -> np.ndarray:
    """Kronecker product placing the given operators on their slots."""
    mats = [slot_ops.get(i, np.eye(d, dtype=complex)) for i, d in enumerate(dims)]
    return reduce(np.kron, mats)


def _per_site_couplings(couplings, eta: int) -> list:
    if np.isscalar(couplings):
        return [float(couplings)] * eta
    vals = [float(c) for c in couplings]
    if len(vals) != eta:
        raise ValueError(f"expected {eta} per-site couplings, got {len(vals)}")
    return vals


@dataclass(frozen=True)
class FullCellModel:
    """Atom(s) plus an explicit cell of spins, ready for exact evolution."""

    eta: int
    s: SpinMagnitude
    dim: int
    hamiltonian: np.ndarray
    bath_state: np.ndarray
    n_atoms: int


def full_cell_model(
    b,
    beta: float,
    omega0: float,
    eta: int,
    s,
    alphas,
    gammas,
    lambdas,
) -> FullCellModel:
    """Exact model of one atom coupled to eta cell spins in effective field b.

    The generator is omega0 S0z - sum_i b . S_i + sum_i (alpha_i S0x Sx_i +
    gamma_i S0y Sy_i + lambda_i S0z Sz_i); the bath starts in the product of
    per-site thermal states exp(+beta b . S_i)/tr.  Couplings may be scalars
    (uniform) or per-site sequences.
    """
    s = SpinMagnitude.parse(s)
    d = s.dimension
    dim = 2 * d**eta
    if dim > DIMENSION_CAP:
        raise ValueError(f"full model dimension {dim} exceeds cap {DIMENSION_CAP}")
    alphas = _per_site_couplings(alphas, eta)
    gammas = _per_site_couplings(gammas, eta)
    lambdas = _per_site_couplings(lambdas, eta)

    atom = spin_matrices(SpinMagnitude(1))
    site = spin_matrices(s)
    b = np.asarray(b, dtype=float)
    dims = [2] + [d] * eta

    h = omega0 * _op_on({0: atom.sz}, dims)
    site_field = site.dot(b)
    for i in range(eta):
        h = h - _op_on({1 + i: site_field}, dims)
        h = h + alphas[i] * _op_on({0: atom.sx, 1 + i: site.sx}, dims)
        h = h + gammas[i] * _op_on({0: atom.sy, 1 + i: site.sy}, dims)
        h = h + lambdas[i] * _op_on({0: atom.sz, 1 + i: site.sz}, dims)

    single = thermal_state(site_field, beta)
    bath = reduce(np.kron, [single] * eta)
    return FullCellModel(eta=eta, s=s, dim=dim, hamiltonian=h, bath_state=bath, n_atoms=1)


def model_from_mean_field(sol: MeanFieldSolution, h: FieldVector, atom, lat: LatticeSpec, eta: int | None = None) -> FullCellModel:
    """Convenience wrapper: build the exact single-atom model from a gap solution."""
    b = effective_field(sol, h, lat)
    n = lat.eta if eta is None else eta
    return full_cell_model(b, sol.beta, atom.omega0, n, lat.s, atom.alpha, atom.gamma, atom.lam)


def pair_cell_model(
    b,
    beta: float,
    omega0: float,
    eta: int,
    s,
    alpha: float,
    gamma: float,
    lam: float,
) -> FullCellModel:
    """Two atoms in disjoint cells of eta spins each, no shared spins.

    Slot order is (atom1, atom2, cell1 sites..., cell2 sites...), so the
    reduced two-atom matrix lives on the first two slots.
    """
    s = SpinMagnitude.parse(s)
    d = s.dimension
    dim = 4 * d ** (2 * eta)
    if dim > DIMENSION_CAP:
        raise ValueError(f"pair model dimension {dim} exceeds cap {DIMENSION_CAP}")
    atom = spin_matrices(SpinMagnitude(1))
    site = spin_matrices(s)
    b = np.asarray(b, dtype=float)
    dims = [2, 2] + [d] * (2 * eta)

    h = omega0 * (_op_on({0: atom.sz}, dims) + _op_on({1: atom.sz}, dims))
    site_field = site.dot(b)
    for which_atom, offset in ((0, 2), (1, 2 + eta)):
        for i in range(eta):
            slot = offset + i
            h = h - _op_on({slot: site_field}, dims)
            h = h + alpha * _op_on({which_atom: atom.sx, slot: site.sx}, dims)
            h = h + gamma * _op_on({which_atom: atom.sy, slot: site.sy}, dims)
            h = h + lam * _op_on({which_atom: atom.sz, slot: site.sz}, dims)

    single = thermal_state(site_field, beta)
    bath = reduce(np.kron, [single] * (2 * eta))
    return FullCellModel(eta=eta, s=s, dim=dim, hamiltonian=h, bath_state=bath, n_atoms=2)


def _reduced_series(model: FullCellModel, rho_sys0: np.ndarray, grid) -> np.ndarray:
    """Evolve rho_sys0 (x) bath and trace out the bath at each grid time."""
    n_sys = 2**model.n_atoms
    n_bath = model.dim // n_sys
    rho_sys0 = np.asarray(rho_sys0, dtype=complex)
    if rho_sys0.shape != (n_sys, n_sys):
        raise ValueError(f"expected a {n_sys}x{n_sys} system state, got {rho_sys0.shape}")
    dec = hermitian_spectral(model.hamiltonian)
    v = dec.eigenvectors
    rho0 = np.kron(rho_sys0, model.bath_state)
    rho0_eig = v.conj().T @ rho0 @ v
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    out = np.empty((grid.size, n_sys, n_sys), dtype=complex)
    for k, t in enumerate(grid):
        phase = np.exp(-1j * t * dec.eigenvalues)
        rho_t = (v * phase) @ rho0_eig @ (v * phase).conj().T
        out[k] = np.trace(rho_t.reshape(n_sys, n_bath, n_sys, n_bath), axis1=1, axis2=3)
    return out


def full_evolve(model: FullCellModel, rho_atom0: np.ndarray, t: float) -> np.ndarray:
    """Reduced 2x2 atom state after exact evolution for time t."""
    if model.n_atoms != 1:
        raise ValueError("full_evolve expects a single-atom model; use pair_evolve")
    return _reduced_series(model, rho_atom0, [t])[0]


def full_evolve_series(model: FullCellModel, rho_atom0: np.ndarray, grid) -> np.ndarray:
    """Reduced 2x2 atom states over a whole time grid (diagonalize once)."""
    if model.n_atoms != 1:
        raise ValueError("full_evolve_series expects a single-atom model")
    return _reduced_series(model, rho_atom0, grid)


def pair_evolve(model: FullCellModel, t: float, rho_pair0: np.ndarray | None = None) -> np.ndarray:
    """Reduced 4x4 two-atom state after exact evolution for time t.

    The default initial state is the Bell state (|gg> + |ee>)/sqrt(2).
    """
    if model.n_atoms != 2:
        raise ValueError("pair_evolve expects a two-atom model")
    rho0 = BELL_PHI if rho_pair0 is None else rho_pair0
    return _reduced_series(model, rho0, [t])[0]


def pair_evolve_series(model: FullCellModel, grid, rho_pair0: np.ndarray | None = None) -> np.ndarray:
    if model.n_atoms != 2:
        raise ValueError("pair_evolve_series expects a two-atom model")
    rho0 = BELL_PHI if rho_pair0 is None else rho_pair0
    return _reduced_series(model, rho0, grid)


def grid_minimize_free_energy(
    lat: LatticeSpec,
    h: FieldVector,
    t: ThermalPoint,
    n_grid: int = 201,
) -> float:
    """Order-parameter magnitude by direct free-energy minimization.

    Scans n_grid magnitudes in [0, S] along the field direction (z when the
    field vanishes), then refines the bracketing interval by golden-section
    search to an absolute tolerance of 1e-6.  Serves as an independent check
    on the fixed-point solver.
    """
    if n_grid < 41:
        raise ValueError(f"n_grid must be >= 41, got {n_grid}")
    if h.norm == 0:
        direction = (0.0, 0.0, 1.0)
    else:
        direction = tuple(c / h.norm for c in h.components())

    def f(m: float) -> float:
        return free_energy((m * direction[0], m * direction[1], m * direction[2]), h, t, lat)

    s_val = lat.s.s
    grid = [s_val * k / (n_grid - 1) for k in range(n_grid)]
    values = [f(m) for m in grid]
    best = min(range(n_grid), key=values.__getitem__)
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, n_grid - 1)]

    # golden-section search on [lo, hi]
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > 1e-6:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2
