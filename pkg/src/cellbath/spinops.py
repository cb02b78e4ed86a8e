"""Exact spin operators, spectral utilities, and angular-momentum counting.

Everything here works on small dense matrices (dimension 2S+1, at most a few
dozen), so full Hermitian diagonalization is used throughout.  Spin magnitudes
are stored as doubled integers (2S) so that half-integer arithmetic and the
parity bookkeeping of angular-momentum addition stay exact.

Units convention for the whole package: J = k_B = hbar = 1.  Energies and
temperatures are quoted in units of J, times in units of 1/J.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

#: absolute tolerance accepted when an input is required to be Hermitian
HERMITICITY_TOL = 1e-10


@dataclass(frozen=True, order=True)
class SpinMagnitude:
    """A spin quantum number stored as 2S, so half-integers are exact.

    ``SpinMagnitude(1)`` is spin 1/2, ``SpinMagnitude(2)`` spin 1, and so on.
    ``twice_s = 0`` is allowed so collective sectors with total spin 0 can be
    represented; elementary lattice spins always have ``twice_s >= 1``.
    """

    twice_s: int

    def __post_init__(self):
        if not isinstance(self.twice_s, int):
            raise TypeError(f"twice_s must be int, got {type(self.twice_s).__name__}")
        if self.twice_s < 0:
            raise ValueError(f"twice_s must be non-negative, got {self.twice_s}")

    @classmethod
    def parse(cls, value) -> "SpinMagnitude":
        """Coerce 0.5, 1, '1/2', '1.5', or a SpinMagnitude into a SpinMagnitude."""
        if isinstance(value, SpinMagnitude):
            return value
        if isinstance(value, str):
            if "/" in value:
                num, den = value.split("/")
                frac = Fraction(int(num), int(den))
            else:
                frac = Fraction(value)
            twice = frac * 2
            if twice.denominator != 1:
                raise ValueError(f"{value!r} is not an integer or half-integer spin")
            return cls(int(twice))
        twice = 2 * value
        if abs(twice - round(twice)) > 1e-9:
            raise ValueError(f"{value!r} is not an integer or half-integer spin")
        return cls(int(round(twice)))

    @property
    def s(self) -> float:
        return self.twice_s / 2

    @property
    def dimension(self) -> int:
        return self.twice_s + 1

    def __str__(self):
        return f"{self.twice_s}/2" if self.twice_s % 2 else f"{self.twice_s // 2}"


@dataclass(frozen=True)
class SpinOperatorSet:
    """The three spin component matrices for one spin magnitude."""

    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    dimension: int

    def dot(self, vec) -> np.ndarray:
        """The operator vec . S for a real 3-vector vec."""
        vx, vy, vz = vec
        return vx * self.sx + vy * self.sy + vz * self.sz


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def _spin_matrices_cached(twice_s: int) -> SpinOperatorSet:
    dim = twice_s + 1
    s = twice_s / 2
    # projections m = S, S-1, ..., -S down the diagonal
    proj = np.array([s - k for k in range(dim)], dtype=float)
    sz = np.diag(proj).astype(complex)
    # ladder matrix elements <m+1| S+ |m> = sqrt(S(S+1) - m(m+1))
    raise_elems = np.sqrt(s * (s + 1) - proj[1:] * (proj[1:] + 1))
    sp = np.zeros((dim, dim), dtype=complex)
    sp[np.arange(dim - 1), np.arange(1, dim)] = raise_elems
    sm = sp.conj().T
    sx = (sp + sm) / 2
    sy = (sp - sm) / 2j
    return SpinOperatorSet(_readonly(sx), _readonly(sy), _readonly(sz), dim)


def spin_matrices(s) -> SpinOperatorSet:
    """Spin component matrices for magnitude ``s`` via the ladder construction.

    ``sz`` is diagonal with entries S, S-1, ..., -S.  The returned matrices are
    read-only and cached, so they are safe to share.
    """
    return _spin_matrices_cached(SpinMagnitude.parse(s).twice_s)


def require_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Return the symmetrized matrix, rejecting inputs non-Hermitian beyond tol."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    dev = np.max(np.abs(m - m.conj().T))
    if dev > tol:
        raise ValueError(f"matrix is non-Hermitian: max |m - m^dag| = {dev:.3e} > {tol:.1e}")
    return (m + m.conj().T) / 2


def hermitian_spectral(m: np.ndarray) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    h = require_hermitian(m)
    evals, evecs = np.linalg.eigh(h)
    return SpectralDecomposition(_readonly(evals), _readonly(evecs))


def evolve_unitary(h: np.ndarray, t: float) -> np.ndarray:
    """The propagator exp(-i t h) of a Hermitian generator, built spectrally."""
    dec = hermitian_spectral(h)
    v = dec.eigenvectors
    return (v * np.exp(-1j * t * dec.eigenvalues)) @ v.conj().T


def thermal_state(h: np.ndarray, beta: float) -> np.ndarray:
    """The normalized Gibbs weight exp(+beta h) / tr exp(+beta h).

    Note the POSITIVE exponent: ``h`` here is the field operator b . S whose
    aligned eigenstates are thermally favored (the bath Hamiltonian proper is
    -b . S).  Exponents are shifted by their maximum before exponentiating, so
    arbitrarily large beta*h is safe.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    dec = hermitian_spectral(h)
    w = np.exp(beta * (dec.eigenvalues - dec.eigenvalues[-1]))
    w /= w.sum()
    v = dec.eigenvectors
    return (v * w) @ v.conj().T


# ---------------------------------------------------------------------------
# angular-momentum multiplicities of the eta-fold product of spin S
# ---------------------------------------------------------------------------


def _parity_ok(twice_j: int, eta: int, twice_s: int) -> bool:
    return 0 <= twice_j <= eta * twice_s and (twice_j - eta * twice_s) % 2 == 0


def multiplicity(j, eta: int, s) -> int:
    """Number of spin-j multiplets in the eta-fold tensor power of spin s.

    Evaluates the closed multinomial sum over occupation numbers
    L_2, ..., L_{2S} (each 0..eta) of

        eta! / prod(L_rho!) * (A + 1 - B) / ((A + 1)! * B!)

    with A = S*eta + j - sum(rho * L_rho) and
    B = (1 - S)*eta - j + sum((rho - 1) * L_rho).  Terms whose factorial
    arguments are negative vanish (reciprocal-gamma convention); note A = -1
    still contributes through the (A+1)! grouping.  A parity mismatch between
    j and eta*S returns 0 rather than raising.  All arithmetic is exact.
    """
    j = SpinMagnitude.parse(j)
    s = SpinMagnitude.parse(s)
    if eta < 1:
        raise ValueError(f"eta must be >= 1, got {eta}")
    if not _parity_ok(j.twice_s, eta, s.twice_s):
        return 0
    # doubled bookkeeping: A and B are integers exactly when parity matches
    twice_j, twice_s = j.twice_s, s.twice_s
    total = Fraction(0)
    eta_fact = math.factorial(eta)

    def scan(rho_idx: int, l_sum: int, rho_l_sum: int, denom: int):
        nonlocal total
        if rho_idx > twice_s:  # occupation indices rho = 2 .. 2S exhausted
            a = (twice_s * eta + twice_j) // 2 - rho_l_sum
            b = ((2 - twice_s) * eta - twice_j) // 2 + rho_l_sum - l_sum
            if a + 1 < 0 or b < 0:
                return
            total += Fraction(eta_fact * (a + 1 - b), denom * math.factorial(a + 1) * math.factorial(b))
            return
        for l in range(eta + 1):
            scan(rho_idx + 1, l_sum + l, rho_l_sum + rho_idx * l, denom * math.factorial(l))

    scan(2, 0, 0, 1)
    if total.denominator != 1:
        raise AssertionError(f"multiplicity sum is not an integer: {total}")
    return int(total)


def multiplicity_oracle(j, eta: int, s) -> int:
    """Independent multiplicity count by weight enumeration.

    Convolves the z-weight distribution of a single spin eta times (exact
    integer dynamic programming) to get n(M), the number of product states
    with total z-projection M, and returns n(j) - n(j+1).
    """
    j = SpinMagnitude.parse(j)
    s = SpinMagnitude.parse(s)
    if eta < 1:
        raise ValueError(f"eta must be >= 1, got {eta}")
    if not _parity_ok(j.twice_s, eta, s.twice_s):
        return 0
    counts = _weight_counts(eta, s.twice_s)
    top = eta * s.twice_s

    def n_of(twice_m: int) -> int:
        if twice_m > top:
            return 0
        return counts[(twice_m + top) // 2]

    return n_of(j.twice_s) - n_of(j.twice_s + 2)


@lru_cache(maxsize=None)
def _weight_counts(eta: int, twice_s: int) -> tuple:
    """Counts of product states per doubled weight 2M = -eta*2S .. eta*2S step 2."""
    counts = [1] * (twice_s + 1)
    single = [1] * (twice_s + 1)
    for _ in range(eta - 1):
        new = [0] * (len(counts) + twice_s)
        for i, c in enumerate(counts):
            for k, w in enumerate(single):
                new[i + k] += c * w
        counts = new
    return tuple(counts)


def sector_spins(eta: int, s) -> list:
    """Total-spin values j with nonzero multiplicity, ascending.

    These are eta*S, eta*S - 1, ... down to 0 or 1/2 depending on parity.
    """
    s = SpinMagnitude.parse(s)
    top = eta * s.twice_s
    return [SpinMagnitude(tj) for tj in range(top % 2, top + 1, 2)]
