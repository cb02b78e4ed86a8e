"""Two-atom dynamics in independent cells and Wootters concurrence.

Two atoms sitting in non-adjacent unit cells see statistically independent
baths, so the pair state is the tensor product of the single-atom channel
with itself applied to the initial Bell state.  That channel route is the
authoritative one; the closed-form pair matrices built from the Xi factors
are fast paths whose deviations (including their trace defect) are
quantified by `verify` rather than assumed away.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .meanfield import FieldVector, LatticeSpec, MeanFieldSolution
from .oracle import BELL_PHI
from .transitions import (
    AtomChannel,
    _axis_field,
    _coherence_product,
    _require_isotropic,
    _sector_weight_table,
    coherence_factor_z,
)

DEATH_THRESHOLD = 1e-12
REVIVAL_THRESHOLD = 0.01

_SIGMA_YY = np.kron(
    np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]])
).real.astype(float)


@dataclass(frozen=True)
class PairState:
    """Two-atom density matrix in the basis (|ee>, |eg>, |ge>, |gg>)."""

    t: float
    rho4: np.ndarray


@dataclass(frozen=True)
class ConcurrenceSeries:
    """Concurrence history with its zero-concurrence (death) intervals."""

    grid: np.ndarray
    c: np.ndarray
    death_intervals: tuple


def pair_state(t: float, channel: AtomChannel, initial: np.ndarray | None = None) -> PairState:
    """Apply the single-atom channel to both halves of a two-atom state.

    The default initial state is the Bell state (|gg> + |ee>)/sqrt(2).
    """
    rho0 = BELL_PHI if initial is None else np.asarray(initial, dtype=complex)
    m = channel.map16.reshape(2, 2, 2, 2)  # m[a', b', a, b] = <a'|E(|a><b|)|b'>
    tensor = rho0.reshape(2, 2, 2, 2)  # tensor[a1, a2, b1, b2]
    tensor = np.einsum("xuab,aibj->xiuj", m, tensor)
    tensor = np.einsum("yvij,xiuj->xyuv", m, tensor)
    return PairState(t=float(t), rho4=tensor.reshape(4, 4))


def _sqrtm_psd(rho: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh((rho + rho.conj().T) / 2)
    evals = np.clip(evals, 0.0, None)
    return (evecs * np.sqrt(evals)) @ evecs.conj().T


def concurrence(rho4: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    Computed from the Hermitian equivalent sqrt(rho) (YY rho* YY) sqrt(rho) of
    the spin-flipped product, whose eigenvalues are clamped at zero before the
    square roots; returns max(0, l1 - l2 - l3 - l4) with l's descending.
    """
    rho = np.asarray(rho4, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 state, got shape {rho.shape}")
    flipped = _SIGMA_YY @ rho.conj() @ _SIGMA_YY
    root = _sqrtm_psd(rho)
    evals = np.linalg.eigvalsh(root @ flipped @ root)
    lams = np.sqrt(np.clip(evals, 0.0, None))[::-1]
    return float(max(0.0, lams[0] - lams[1] - lams[2] - lams[3]))


def _death_intervals(grid, c) -> tuple:
    intervals = []
    start = None
    for k, val in enumerate(c):
        if val <= DEATH_THRESHOLD:
            if start is None:
                start = k
        else:
            if start is not None and k - start >= 2:
                intervals.append((float(grid[start]), float(grid[k - 1])))
            start = None
    if start is not None and len(c) - start >= 2:
        intervals.append((float(grid[start]), float(grid[-1])))
    return tuple(intervals)


def detect_death_revival(series: ConcurrenceSeries) -> tuple:
    """Maximal intervals where the concurrence vanishes on >= 2 grid nodes."""
    return _death_intervals(series.grid, series.c)


def has_revival(series: ConcurrenceSeries) -> bool:
    """True when the concurrence exceeds 0.01 again after a death interval."""
    if not series.death_intervals:
        return False
    t_end = series.death_intervals[0][1]
    later = series.c[series.grid > t_end]
    return bool(np.any(later > REVIVAL_THRESHOLD))


def concurrence_series(grid, channel_maps: np.ndarray, initial: np.ndarray | None = None) -> ConcurrenceSeries:
    """Concurrence history from per-time channel matrices (see channel_series)."""
    grid = np.asarray(grid, dtype=float)
    c = np.empty(grid.size)
    for k in range(grid.size):
        state = pair_state(grid[k], AtomChannel(t=grid[k], map16=channel_maps[k]), initial)
        c[k] = concurrence(state.rho4)
    return ConcurrenceSeries(grid=grid, c=c, death_intervals=_death_intervals(grid, c))


# ---------------------------------------------------------------------------
# closed-form pair matrices (fast paths under verification)
# ---------------------------------------------------------------------------


def _xi_values(
    t,
    b_axis: float,
    beta: float,
    alpha: float,
    omega0: float,
    lat: LatticeSpec,
    printed_literal: bool = False,
) -> tuple:
    """Xi_pm(t): thermally weighted sector sums entering the pair matrices.

    The default reading sums the survival probabilities of the two-level
    blocks, cos^2(tau) + (n^2 / M) sin^2(tau) with n = (B + omega0) +
    alpha (ell +- 1/2), which makes Xi_+ = 1 - 2 P(e->g flip) and
    Xi_- = 2 P(g->e flip) - 1 — the z expectations of the evolved basis
    states, constant when alpha = 0 and bounded by 1 in magnitude.  The
    ``printed_literal`` variant (minus sign, omega0 dropped from the
    numerators) violates both properties and exists only for `verify`.
    """
    grid = np.atleast_1d(np.asarray(t, dtype=float))
    table, norm = _sector_weight_table(beta, b_axis, lat.eta, lat.s)
    sums = {+1: np.zeros(grid.size), -1: np.zeros(grid.size)}
    c = b_axis + omega0
    for j_val, ells, w in table:
        for sign in (+1, -1):
            n_freq = c + alpha * (ells + sign * 0.5)
            numer = (b_axis + alpha * (ells + sign * 0.5)) ** 2 if printed_literal else n_freq**2
            m = alpha**2 * (j_val * (j_val + 1) - ells * (ells + sign)) + n_freq**2
            safe = np.where(m > 0, m, 1.0)
            tau = np.outer(grid, np.sqrt(safe)) / 2
            term = np.where(m > 0, numer / safe, 0.0) * np.sin(tau) ** 2
            bracket = np.cos(tau) ** 2 + (-term if printed_literal else term)
            sums[sign] += bracket @ w
    xi_plus = -1 + 2 * sums[+1] / norm
    xi_minus = 1 - 2 * sums[-1] / norm
    return xi_plus, xi_minus


def xi_factors(t, sol: MeanFieldSolution, h: FieldVector, atom, lat: LatticeSpec) -> tuple:
    """(Xi_+, Xi_-) for a field along z; scalar or array times."""
    _require_isotropic(atom)
    b_z = _axis_field(sol, h, lat, 2)
    xp, xm = _xi_values(t, b_z, sol.beta, atom.alpha, atom.omega0, lat)
    if np.isscalar(t):
        return float(xp[0]), float(xm[0])
    return xp, xm


def xi_factors_printed(t, sol: MeanFieldSolution, h: FieldVector, atom, lat: LatticeSpec) -> tuple:
    """Literal-variant Xi factors retained for the `verify` report."""
    _require_isotropic(atom)
    b_z = _axis_field(sol, h, lat, 2)
    return _xi_values(t, b_z, sol.beta, atom.alpha, atom.omega0, lat, printed_literal=True)


def closed_form_pair_z(t: float, sol: MeanFieldSolution, h: FieldVector, atom, lat: LatticeSpec) -> PairState:
    """Closed-form pair matrix for a z-aligned field.

    Diagonal from the Xi factors, corners from the squared single-atom
    coherence ratio.  Hermitian by construction; its trace defect
    (Xi_+ + Xi_-)^2 / 4 is reported by `verify`, not silently renormalized.
    """
    xi_p, xi_m = xi_factors(t, sol, h, atom, lat)
    psi = coherence_factor_z(t, sol, h, atom, lat)
    corner = psi**2 / 2
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 0.25 + xi_p**2 / 4
    rho[1, 1] = rho[2, 2] = 0.25 + xi_p * xi_m / 4
    rho[3, 3] = 0.25 + xi_m**2 / 4
    rho[0, 3] = corner
    rho[3, 0] = np.conj(corner)
    return PairState(t=float(t), rho4=rho)


def closed_form_pair_x(t: float, sol: MeanFieldSolution, h: FieldVector, atom, lat: LatticeSpec) -> PairState:
    """Closed-form pair matrix for an x-aligned field and degenerate levels."""
    _require_isotropic(atom)
    if atom.omega0 != 0:
        raise ValueError("the x-field pair matrix requires omega0 = 0")
    b_x = _axis_field(sol, h, lat, 0)
    xi_p, xi_m = _xi_values(t, b_x, sol.beta, atom.alpha, 0.0, lat)
    xi_p, xi_m = float(xi_p[0]), float(xi_m[0])
    psi_sq = complex(_coherence_product(t, b_x, sol.beta, atom.alpha, 0.0, lat)[0]) ** 2
    delta = xi_p**2 - xi_m**2
    off = (delta - 4j * psi_sq.imag) / 16
    cross = (xi_p**2 * xi_m**2 - psi_sq.real) / 4
    corner = (xi_p**2 * xi_m**2 + psi_sq.real) / 4
    diag_top = (1 + psi_sq.real) / 4
    diag_mid = (1 - psi_sq.real) / 4
    rho = np.array(
        [
            [diag_top, off, off, corner],
            [np.conj(off), diag_mid, cross, np.conj(off)],
            [np.conj(off), cross, diag_mid, np.conj(off)],
            [corner, off, off, diag_top],
        ],
        dtype=complex,
    )
    return PairState(t=float(t), rho4=rho)
