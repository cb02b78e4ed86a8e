"""Pure-dephasing dynamics for Ising coupling of the atom to its cell.

With only the z-z coupling active (alpha = gamma = 0) the atom populations
are frozen and the coherence evolves as

    rho_eg(t) = rho_eg(0) exp(-i omega0 t) F(t)**eta,

where the per-spin factor F(t) is a bath trace of conditional propagators.
Sign conventions are centralized in :func:`conditional_hamiltonians`: the
reduced generator is omega0 S0z + sum_i (-b + K) . S_i, the atom basis is
(|e>, |g>) with S0z = diag(+1/2, -1/2), coherences are <e|rho|g>, and the
thermal weight of the cell is exp(+beta b . S) per spin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .meanfield import FieldVector, LatticeSpec, MeanFieldSolution, effective_field
from .spinops import SpinMagnitude, hermitian_spectral, spin_matrices, thermal_state

#: |F| below this is treated as a zero crossing when differentiating log|F|
RATE_FLOOR = 1e-12


@dataclass(frozen=True)
class AtomParams:
    """Atom level splitting omega0 and couplings to the cell spins.

    ``lam`` is the z-z (Ising) coupling; the config-file/CLI spelling of this
    field is ``lambda``.
    """

    omega0: float
    alpha: float = 0.0
    gamma: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        for c in (self.omega0, self.alpha, self.gamma, self.lam):
            if not math.isfinite(c):
                raise ValueError(f"atom parameters must be finite, got {self}")

    @property
    def is_ising(self) -> bool:
        return self.alpha == 0.0 and self.gamma == 0.0

    @property
    def is_isotropic(self) -> bool:
        return self.alpha == self.gamma == self.lam


@dataclass(frozen=True)
class DephasingResult:
    """Per-spin factor, coherence, Bloch trajectory, and dephasing rate."""

    grid: np.ndarray
    f_values: np.ndarray
    coherence: np.ndarray
    bloch: np.ndarray  # shape (n, 3)
    kappa: np.ndarray


def conditional_hamiltonians(b, lam: float, s) -> tuple:
    """Cell-spin operators conditioned on the atom state.

    Returns (h_plus, h_minus, h_bath) with h_bath = b . S and
    h_pm = b . S +- (lam/2) Sz.  The atom in |e> drives the cell with -h_minus
    and in |g> with -h_plus, which is what makes F(t) below a trace of
    exp(+i t h_minus) against exp(-i t h_plus).
    """
    ops = spin_matrices(s)
    h_bath = ops.dot(np.asarray(b, dtype=float))
    shift = (lam / 2) * ops.sz
    return h_bath + shift, h_bath - shift, h_bath


def _require_ising(atom: AtomParams):
    if not atom.is_ising:
        raise ValueError(
            "dephasing formulas require alpha = gamma = 0; "
            "use the transitions module for isotropic coupling"
        )


def _factor_series(grid, b, beta: float, lam: float, s) -> np.ndarray:
    """F(t) = tr[exp(+i t h_minus) rho_b exp(-i t h_plus)] on a whole grid.

    Expanded in the eigenbases of h_minus and h_plus the trace is a finite
    Fourier sum, so the grid evaluation is a single complex matrix product.
    """
    h_plus, h_minus, h_bath = conditional_hamiltonians(b, lam, s)
    rho_b = thermal_state(h_bath, beta)
    dec_m = hermitian_spectral(h_minus)
    dec_p = hermitian_spectral(h_plus)
    vm, vp = dec_m.eigenvectors, dec_p.eigenvectors
    cross = (vm.conj().T @ rho_b @ vp) * (vp.conj().T @ vm).T
    freqs = np.subtract.outer(dec_m.eigenvalues, dec_p.eigenvalues).ravel()
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    return np.exp(1j * np.outer(grid, freqs)) @ cross.ravel()


def dephasing_factor(t, sol: MeanFieldSolution, h: FieldVector, atom: AtomParams, lat: LatticeSpec):
    """Per-spin dephasing factor F(t); F(0) = 1 and |F| <= 1.

    Accepts a scalar time or an array of times.
    """
    _require_ising(atom)
    b = effective_field(sol, h, lat)
    values = _factor_series(t, b, sol.beta, atom.lam, lat.s)
    return values[0] if np.isscalar(t) else values


def dephasing_rate(grid, f_eta) -> np.ndarray:
    """kappa(t) = -d/dt ln|F(t)**eta| by central differences.

    The first node is exactly 0 (|F| is even in t, so its log-derivative
    vanishes at t = 0); the last node uses a one-sided second-order stencil.
    Nodes where |F**eta| < 1e-12 come out as NaN, as do neighbors whose
    stencil would touch them.
    """
    grid = np.asarray(grid, dtype=float)
    mag = np.abs(np.asarray(f_eta))
    ok = mag > RATE_FLOOR
    logmag = np.where(ok, np.log(np.where(ok, mag, 1.0)), np.nan)
    n = grid.size
    kappa = np.full(n, np.nan)
    kappa[0] = 0.0
    for i in range(1, n - 1):
        kappa[i] = -(logmag[i + 1] - logmag[i - 1]) / (grid[i + 1] - grid[i - 1])
    if n >= 3:
        dt = grid[-1] - grid[-2]
        kappa[-1] = -(3 * logmag[-1] - 4 * logmag[-2] + logmag[-3]) / (2 * dt)
    kappa[~ok] = np.nan  # the rate is undefined where the coherence vanishes
    return kappa


def coherence_series(
    grid,
    rho12_0: complex,
    sol: MeanFieldSolution,
    h: FieldVector,
    atom: AtomParams,
    lat: LatticeSpec,
    r3_0: float = 0.0,
) -> DephasingResult:
    """Coherence, Bloch vector, and dephasing rate on a time grid.

    The grid must be strictly increasing from 0.  ``r3_0`` is the (conserved)
    initial population imbalance; the default 0 corresponds to the equal
    superposition (|g> + |e>)/sqrt(2), for which rho12_0 = 1/2.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or grid[0] != 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing and start at 0")
    _require_ising(atom)
    f = dephasing_factor(grid, sol, h, atom, lat)
    f_eta = f**lat.eta
    coherence = rho12_0 * np.exp(-1j * atom.omega0 * grid) * f_eta
    bloch = np.column_stack([
        2 * coherence.real,
        -2 * coherence.imag,
        np.full(grid.size, r3_0),
    ])
    kappa = dephasing_rate(grid, f_eta)
    return DephasingResult(grid=grid, f_values=f, coherence=coherence, bloch=bloch, kappa=kappa)


# ---------------------------------------------------------------------------
# closed forms kept for the verify report
# ---------------------------------------------------------------------------


def lambda_pm(sol: MeanFieldSolution, h: FieldVector, atom: AtomParams, lat: LatticeSpec) -> tuple:
    """Conditional level splittings |b +- (lam/2) z_hat| (spin-1/2 spectra)."""
    bx, by, bz = effective_field(sol, h, lat)
    lam = atom.lam
    plus = math.sqrt(bx**2 + by**2 + (bz + lam / 2) ** 2)
    minus = math.sqrt(bx**2 + by**2 + (bz - lam / 2) ** 2)
    return plus, minus


def lambda_pm_printed(sol: MeanFieldSolution, h: FieldVector, atom: AtomParams, lat: LatticeSpec) -> tuple:
    """Dimensionally inconsistent variant of the conditional splittings.

    The cross term here multiplies the coupling by the dimensionless field
    scale factor instead of by the field z-component; kept only so `verify`
    can quantify the difference against :func:`lambda_pm`.  Arguments whose
    square would go negative yield NaN.
    """
    hnorm = h.norm
    if hnorm == 0:
        return math.nan, math.nan
    two_jm = 2 * lat.coupling_sum * sol.m
    scale = two_jm / hnorm + 1
    base = (two_jm + hnorm) ** 2 + atom.lam**2 / 4
    vals = []
    for sign in (+1, -1):
        arg = base + sign * atom.lam * scale
        vals.append(math.sqrt(arg) if arg >= 0 else math.nan)
    return tuple(vals)


def spin_half_closed_factor(
    grid,
    sol: MeanFieldSolution,
    h: FieldVector,
    atom: AtomParams,
    lat: LatticeSpec,
    splittings: tuple | None = None,
) -> np.ndarray:
    """Closed cos/sin form of F(t) for spin-1/2 cells.

    With the conditional splittings Lambda_pm = |b +- (lam/2) z_hat| this is
    analytically identical to the spectral trace; passing the printed
    splittings instead lets `verify` quantify that variant.
    """
    if lat.s.twice_s != 1:
        raise ValueError("closed factor applies to spin-1/2 cells only")
    _require_ising(atom)
    b = np.asarray(effective_field(sol, h, lat), dtype=float)
    lam_p, lam_m = splittings if splittings is not None else lambda_pm(sol, h, atom, lat)
    ops = spin_matrices(lat.s)
    h_plus, h_minus, h_bath = conditional_hamiltonians(b, atom.lam, lat.s)
    lam_b = float(np.linalg.norm(b))
    beta = sol.beta
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    eye = np.eye(2, dtype=complex)
    out = np.empty(grid.size, dtype=complex)
    thermal = math.cosh(beta * lam_b / 2) * eye + (
        (2 / lam_b) * math.sinh(beta * lam_b / 2) * h_bath if lam_b > 0 else 0 * eye
    )
    for k, t in enumerate(grid):
        left = math.cos(t * lam_m / 2) * eye + (2j / lam_m) * math.sin(t * lam_m / 2) * h_minus if lam_m > 0 else eye
        right = math.cos(t * lam_p / 2) * eye - (2j / lam_p) * math.sin(t * lam_p / 2) * h_plus if lam_p > 0 else eye
        out[k] = np.trace(left @ thermal @ right) / (2 * math.cosh(beta * lam_b / 2))
    return out


def spin_one_printed_factor(
    grid,
    sol: MeanFieldSolution,
    h: FieldVector,
    atom: AtomParams,
    lat: LatticeSpec,
) -> np.ndarray:
    """Literal polynomial expansion of F(t) for spin-1 cells, for `verify`.

    This expansion pairs the first matrix power with the (cos - 1)/(cosh - 1)
    coefficients and the squared power with the sin/sinh ones — the opposite
    of what the spectral identity for a generator with spectrum
    {-Lambda, 0, +Lambda} requires — so it generally disagrees with the
    spectral trace; `verify` reports by how much.
    """
    if lat.s.twice_s != 2:
        raise ValueError("printed spin-1 expansion applies to spin-1 cells only")
    _require_ising(atom)
    b = np.asarray(effective_field(sol, h, lat), dtype=float)
    lam_p, lam_m = lambda_pm(sol, h, atom, lat)
    h_plus, h_minus, h_bath = conditional_hamiltonians(b, atom.lam, lat.s)
    lam_b = float(np.linalg.norm(b))
    beta = sol.beta
    eye = np.eye(3, dtype=complex)
    if lam_b > 0:
        thermal = (
            eye
            + (math.cosh(beta * lam_b) - 1) / lam_b * h_bath
            + math.sinh(beta * lam_b) / lam_b**2 * (h_bath @ h_bath)
        )
        norm = 1 + 2 * math.cosh(beta * lam_b)
    else:
        thermal = eye
        norm = 3.0
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    out = np.empty(grid.size, dtype=complex)
    for k, t in enumerate(grid):
        left = eye
        if lam_m > 0:
            left = (
                eye
                + (math.cos(t * lam_m) - 1) / lam_m * h_minus
                + 1j * math.sin(t * lam_m) / lam_m**2 * (h_minus @ h_minus)
            )
        right = eye
        if lam_p > 0:
            right = (
                eye
                + (math.cos(t * lam_p) - 1) / lam_p * h_plus
                - 1j * math.sin(t * lam_p) / lam_p**2 * (h_plus @ h_plus)
            )
        out[k] = np.trace(left @ thermal @ right) / norm
    return out
