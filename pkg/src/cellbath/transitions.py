"""Level-transition dynamics for isotropic atom-cell coupling.

With alpha = gamma = lambda the coupling commutes with the total-cell-spin
Casimir, so the eta-spin cell decomposes into collective sectors of total
spin j with multiplicity nu(j, eta; S), and the joint dynamics reduces to
independent blocks of dimension 2(2j+1).  The engine built here is the
authoritative route; the closed-form fast paths (z-field excited population,
x-field coherence product) are checked against it, and deliberately
typo-prone variants are kept only for the `verify` report.

Sign conventions match :mod:`cellbath.dephasing`: sector generator
omega0 S0z - b . J + alpha S0 . J, thermal weights exp(+beta |b| ell).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .meanfield import FieldVector, LatticeSpec, MeanFieldSolution, effective_field
from .spinops import (
    SpinMagnitude,
    hermitian_spectral,
    multiplicity,
    sector_spins,
    spin_matrices,
)

#: cap on eta * S for the sector engine (desk scale)
SECTOR_CAP_TWICE = 24
#: guard against overflowing thermal weights exp(beta |b| j)
_WEIGHT_EXP_CAP = 700.0

STATE_TOL = 1e-10


@dataclass(frozen=True)
class SectorBlock:
    """One collective-spin block of the atom + cell dynamics.

    ``bath_thermal`` holds the unnormalized weights exp(beta |b| ell) for
    ell = -j .. j (ascending); ``_bath_vecs`` maps that weight basis back to
    the Jz product basis used by ``hamiltonian``.
    """

    j: SpinMagnitude
    weight: int
    hamiltonian: np.ndarray
    bath_thermal: np.ndarray
    _bath_vecs: np.ndarray = field(repr=False)
    _evals: np.ndarray = field(repr=False)
    _evecs: np.ndarray = field(repr=False)

    @property
    def dimension(self) -> int:
        return 2 * self.j.dimension

    def bath_matrix(self) -> np.ndarray:
        """Unnormalized cell thermal state on this sector, in the Jz basis."""
        v = self._bath_vecs
        return (v * self.bath_thermal) @ v.conj().T


@dataclass(frozen=True)
class MDiscriminant:
    """Squared Rabi frequencies of the two-level blocks at one (j, ell)."""

    m_plus: float
    m_minus: float


def m_discriminants(j_val: float, ell: float, alpha: float, axis_field_plus_omega: float) -> MDiscriminant:
    """M_pm(j, ell) for a signed axis field B:  here axis_field_plus_omega = B + omega0.

    M_minus governs the |g, ell> <-> |e, ell-1> block and M_plus the
    |e, ell> <-> |g, ell+1> block; they obey M_plus(j, ell-1) = M_minus(j, ell).
    """
    c = axis_field_plus_omega
    m_minus = alpha**2 * (j_val * (j_val + 1) - ell * (ell - 1)) + 0.25 * (2 * c + alpha * (2 * ell - 1)) ** 2
    m_plus = alpha**2 * (j_val * (j_val + 1) - ell * (ell + 1)) + 0.25 * (2 * c + alpha * (2 * ell + 1)) ** 2
    return MDiscriminant(m_plus=m_plus, m_minus=m_minus)


def _require_isotropic(atom):
    if not atom.is_isotropic:
        raise ValueError(
            "the sector engine requires isotropic coupling alpha = gamma = lambda; "
            "use the oracle module for anisotropic couplings"
        )


def build_sectors(sol: MeanFieldSolution, h: FieldVector, atom, lat: LatticeSpec) -> list:
    """Collective-sector blocks of the atom + cell dynamics.

    Sector j carries the Hamiltonian omega0 S0z - b . J + alpha S0 . J on
    2(2j+1) dimensions and the thermal weights exp(beta |b| ell); the weights
    of all sectors sum (with multiplicities) to the cell normalizer
    (2S+1-state bracket)**eta.
    """
    _require_isotropic(atom)
    if lat.eta * lat.s.twice_s > SECTOR_CAP_TWICE:
        raise ValueError(
            f"eta * S = {lat.eta * lat.s.s} exceeds the desk-scale cap {SECTOR_CAP_TWICE / 2}"
        )
    b = np.asarray(effective_field(sol, h, lat), dtype=float)
    lam_b = float(np.linalg.norm(b))
    top_j = lat.eta * lat.s.s
    if sol.beta * lam_b * top_j > _WEIGHT_EXP_CAP:
        raise ValueError(
            "thermal weights would overflow (beta * |b| * eta * S too large); "
            "this regime is outside the desk-scale scope of the sector engine"
        )
    atom_ops = spin_matrices(SpinMagnitude(1))
    alpha = atom.alpha
    blocks = []
    for j in sector_spins(lat.eta, lat.s):
        jops = spin_matrices(j)
        dj = j.dimension
        eye_j = np.eye(dj, dtype=complex)
        ham = atom.omega0 * np.kron(atom_ops.sz, eye_j)
        ham = ham - np.kron(np.eye(2, dtype=complex), jops.dot(b))
        for a_k, j_k in ((atom_ops.sx, jops.sx), (atom_ops.sy, jops.sy), (atom_ops.sz, jops.sz)):
            ham = ham + alpha * np.kron(a_k, j_k)
        bath_dec = hermitian_spectral(jops.dot(b))
        weights = np.exp(sol.beta * bath_dec.eigenvalues)
        dec = hermitian_spectral(ham)
        blocks.append(
            SectorBlock(
                j=j,
                weight=multiplicity(j, lat.eta, lat.s),
                hamiltonian=ham,
                bath_thermal=weights,
                _bath_vecs=bath_dec.eigenvectors,
                _evals=dec.eigenvalues,
                _evecs=dec.eigenvectors,
            )
        )
    return blocks


def sector_normalizer(sectors: list) -> float:
    """The bath-trace normalizer consistent with the sector weights."""
    return float(sum(blk.weight * blk.bath_thermal.sum() for blk in sectors))


def _check_density_matrix(rho: np.ndarray, tol: float = STATE_TOL) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a 2x2 state, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("initial state is not Hermitian")
    if abs(np.trace(rho).real - 1) > tol or abs(np.trace(rho).imag) > tol:
        raise ValueError("initial state does not have unit trace")
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() < -tol:
        raise ValueError("initial state is not positive semidefinite")
    return rho


def _sector_reduced_series(blk: SectorBlock, rho_atom0: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Unnormalized atom contribution of one sector over a time grid."""
    dj = blk.j.dimension
    dim = 2 * dj
    rho0 = np.kron(rho_atom0, blk.bath_matrix())
    v = blk._evecs
    rho0_eig = v.conj().T @ rho0 @ v
    vr = v.reshape(2, dj, dim)
    # out[t, a, b] = sum_{i,j} e^{-i t (e_i - e_j)} sum_m V[(a,m),i] rho0_eig[i,j] V*[(b,m),j]
    coeff = np.einsum("ami,ij,bmj->abij", vr, rho0_eig, vr.conj()).reshape(4, dim * dim)
    freqs = np.subtract.outer(blk._evals, blk._evals).ravel()
    phases = np.exp(-1j * np.outer(grid, freqs))
    return (phases @ coeff.T).reshape(grid.size, 2, 2)


def evolve_atom_series(rho_atom0: np.ndarray, grid, sectors: list, z_tilde: float) -> np.ndarray:
    """Reduced atom states over a time grid, summed over sectors."""
    rho0 = _check_density_matrix(rho_atom0)
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    out = np.zeros((grid.size, 2, 2), dtype=complex)
    for blk in sectors:
        out += blk.weight * _sector_reduced_series(blk, rho0, grid)
    return out / z_tilde


def evolve_atom(rho_atom0: np.ndarray, t: float, sectors: list, z_tilde: float) -> np.ndarray:
    """Reduced 2x2 atom state at time t."""
    return evolve_atom_series(rho_atom0, [t], sectors, z_tilde)[0]


# ---------------------------------------------------------------------------
# channel tomography
# ---------------------------------------------------------------------------

_PROBE_EE = np.array([[1, 0], [0, 0]], dtype=complex)
_PROBE_GG = np.array([[0, 0], [0, 1]], dtype=complex)
_PROBE_X = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
_PROBE_Y = np.array([[0.5, -0.5j], [0.5j, 0.5]], dtype=complex)


@dataclass(frozen=True)
class AtomChannel:
    """The linear map on atom operators induced by the traced-out cell.

    ``map16`` acts on row-major vectorized 2x2 operators in the basis
    (|e><e|, |e><g|, |g><e|, |g><g|).
    """

    t: float
    map16: np.ndarray

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return (self.map16 @ rho.reshape(4)).reshape(2, 2)

    def choi(self) -> np.ndarray:
        """Normalized Choi matrix (trace 1 for a trace-preserving map)."""
        c = np.zeros((4, 4), dtype=complex)
        for i in range(2):
            for j in range(2):
                e_ij = self.map16[:, 2 * i + j].reshape(2, 2)
                unit = np.zeros((2, 2), dtype=complex)
                unit[i, j] = 1.0
                c += np.kron(e_ij, unit)
        return c / 2


def _maps_from_probe_series(series_by_probe: dict) -> np.ndarray:
    """Recombine Hermitian probe evolutions into map16 per grid point."""
    e_ee = series_by_probe["ee"]
    e_gg = series_by_probe["gg"]
    e_eg = series_by_probe["x"] + 1j * series_by_probe["y"] - (1 + 1j) / 2 * (e_ee + e_gg)
    e_ge = np.conj(np.swapaxes(e_eg, -1, -2))
    n = e_ee.shape[0]
    maps = np.empty((n, 4, 4), dtype=complex)
    for col, block in ((0, e_ee), (1, e_eg), (2, e_ge), (3, e_gg)):
        maps[:, :, col] = block.reshape(n, 4)
    return maps


def channel_series(grid, sectors: list, z_tilde: float) -> np.ndarray:
    """AtomChannel map16 matrices for every grid time, shape (n, 4, 4)."""
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    probes = {
        "ee": evolve_atom_series(_PROBE_EE, grid, sectors, z_tilde),
        "gg": evolve_atom_series(_PROBE_GG, grid, sectors, z_tilde),
        "x": evolve_atom_series(_PROBE_X, grid, sectors, z_tilde),
        "y": evolve_atom_series(_PROBE_Y, grid, sectors, z_tilde),
    }
    return _maps_from_probe_series(probes)


def channel_tomography(t: float, sectors: list, z_tilde: float) -> AtomChannel:
    """The atom channel at time t, reconstructed from four Hermitian probes."""
    return AtomChannel(t=float(t), map16=channel_series([t], sectors, z_tilde)[0])


# ---------------------------------------------------------------------------
# closed-form fast paths (z-aligned and x-aligned fields)
# ---------------------------------------------------------------------------


def _axis_field(sol: MeanFieldSolution, h: FieldVector, lat: LatticeSpec, axis: int) -> float:
    """Signed effective-field component along the given axis, rejecting others."""
    b = effective_field(sol, h, lat)
    others = [b[k] for k in range(3) if k != axis]
    if max(abs(c) for c in others) > 1e-12:
        name = "xyz"[axis]
        raise ValueError(f"this fast path requires the field along {name}")
    return b[axis]


def _sector_weight_table(beta: float, b_axis: float, eta: int, s) -> tuple:
    """(j, ell array, shifted thermal weights) per sector, plus the normalizer."""
    table = []
    top = eta * SpinMagnitude.parse(s).s
    shift = beta * abs(b_axis) * top
    norm = 0.0
    for j in sector_spins(eta, s):
        ells = np.arange(-j.s, j.s + 1)
        w = np.exp(beta * b_axis * ells - shift) * multiplicity(j, eta, s)
        norm += w.sum()
        table.append((j.s, ells, w))
    return table, norm


def excited_population_z(t, sol: MeanFieldSolution, h: FieldVector, atom, lat: LatticeSpec):
    """Excited-state population for initial |g> and field along z (fast path).

    Sums over sectors the two-level transition probabilities
    4 V^2 / M_minus * sin^2(t sqrt(M_minus) / 2) with thermal weights; agrees
    with the sector engine to rounding.  Accepts scalar or array times.
    """
    _require_isotropic(atom)
    b_z = _axis_field(sol, h, lat, 2)
    values = _population_sum_z(t, b_z, sol.beta, atom, lat, printed_denominator=False)
    return values[0] if np.isscalar(t) else values


def printed_excited_population_z(t, sol: MeanFieldSolution, h: FieldVector, atom, lat: LatticeSpec):
    """Variant with a square-root denominator under sin^2, for `verify` only.

    A Rabi analysis of the two-level blocks forces the 1/M_minus reading used
    by :func:`excited_population_z`; this 1/sqrt(M_minus) variant is retained
    so the report can quantify how far it drifts from the engine.
    """
    _require_isotropic(atom)
    b_z = _axis_field(sol, h, lat, 2)
    values = _population_sum_z(t, b_z, sol.beta, atom, lat, printed_denominator=True)
    return values[0] if np.isscalar(t) else values


def _population_sum_z(t, b_z, beta, atom, lat, printed_denominator: bool) -> np.ndarray:
    grid = np.atleast_1d(np.asarray(t, dtype=float))
    alpha = atom.alpha
    c = b_z + atom.omega0
    table, norm = _sector_weight_table(beta, b_z, lat.eta, lat.s)
    total = np.zeros(grid.size)
    for j_val, ells, w in table:
        v_sq = alpha**2 * (j_val * (j_val + 1) - ells * (ells - 1))
        m_minus = v_sq + 0.25 * (2 * c + alpha * (2 * ells - 1)) ** 2
        safe = np.where(m_minus > 0, m_minus, 1.0)
        root = np.sqrt(safe)
        sin_sq = np.sin(np.outer(grid, root) / 2) ** 2
        denom = root if printed_denominator else safe
        amp = np.where(m_minus > 0, v_sq / denom, 0.0)
        total += sin_sq @ (w * amp)
    return total / norm


def _block_amplitude_product(grid, ells, j_val, alpha, b_axis, omega0):
    """Product of the upper- and lower-block survival amplitudes, per (t, ell).

    Each factor is cos(tau) - i (n / sqrt(M)) sin(tau) with tau = t sqrt(M)/2,
    n_pm = (B + omega0) + alpha (ell +- 1/2); the pair phases combine to the
    global factor exp(i t B) applied by the caller.
    """
    c = b_axis + omega0
    out = np.ones((grid.size, ells.size), dtype=complex)
    for sign in (+1, -1):
        n = c + alpha * (ells + sign * 0.5)
        m = alpha**2 * (j_val * (j_val + 1) - ells * (ells + sign)) + n**2
        safe = np.where(m > 0, m, 1.0)
        root = np.sqrt(safe)
        tau = np.outer(grid, root) / 2
        coef = np.where(m > 0, n / root, 0.0)
        out *= np.cos(tau) - 1j * coef * np.sin(tau)
    return out


def coherence_factor_z(t, sol: MeanFieldSolution, h: FieldVector, atom, lat: LatticeSpec):
    """Coherence ratio rho_eg(t)/rho_eg(0) for field along z (fast path).

    Closed form built from the same two-level blocks as the populations, with
    the level splitting omega0 entering both the frequencies and the
    numerators; reduces to exp(-i omega0 t) at alpha = 0.
    """
    _require_isotropic(atom)
    b_z = _axis_field(sol, h, lat, 2)
    values = _coherence_product(t, b_z, sol.beta, atom.alpha, atom.omega0, lat)
    return values[0] if np.isscalar(t) else values


def psi_factor(t, sol: MeanFieldSolution, h: FieldVector, atom, lat: LatticeSpec):
    """Coherence product Psi(t) for field along x and degenerate levels.

    Requires omega0 = 0 (the rotation that maps the x-field problem onto the
    z-axis blocks would not leave a level-splitting term invariant).  The
    excited population for initial |g> is (1 - Re Psi)/2.
    """
    _require_isotropic(atom)
    if atom.omega0 != 0:
        raise ValueError("the x-field fast path requires degenerate levels (omega0 = 0)")
    b_x = _axis_field(sol, h, lat, 0)
    values = _coherence_product(t, b_x, sol.beta, atom.alpha, 0.0, lat)
    return values[0] if np.isscalar(t) else values


def excited_population_x(t, sol: MeanFieldSolution, h: FieldVector, atom, lat: LatticeSpec):
    """Excited-state population (1 - Re Psi)/2 for initial |g>, x-field, omega0 = 0."""
    return (1 - np.real(psi_factor(t, sol, h, atom, lat))) / 2


def _coherence_product(t, b_axis, beta, alpha, omega0, lat) -> np.ndarray:
    grid = np.atleast_1d(np.asarray(t, dtype=float))
    table, norm = _sector_weight_table(beta, b_axis, lat.eta, lat.s)
    total = np.zeros(grid.size, dtype=complex)
    for j_val, ells, w in table:
        amps = _block_amplitude_product(grid, ells, j_val, alpha, b_axis, omega0)
        total += amps @ w
    return np.exp(1j * b_axis * grid) * total / norm
