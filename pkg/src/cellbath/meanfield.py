"""Self-consistent order parameter of the mean-field Heisenberg ferromagnet.

A lattice spin sees the effective field b = 2 m sum_J + h, where m is the
thermal spin expectation determined by the fixed point of the magnetization
map.  The right-hand side of that map is the log-derivative of the single-spin
partition function,

    B(y) = (S + 1/2) coth((S + 1/2) y) - (1/2) coth(y/2),   y = beta * |b|,

which rises with slope S(S+1)/3 and saturates at S.  All of the dynamics
modules take their field magnitude and thermal weights from the solution
produced here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .spinops import SpinMagnitude

#: below this y = beta*Lambda the coth difference is evaluated by series to
#: avoid the 1/y - 1/y cancellation
_SERIES_CROSSOVER = 1e-4


@dataclass(frozen=True)
class LatticeSpec:
    """Lattice couplings seen by one spin and by the atom's unit cell.

    ``coupling_sum`` is the sum of exchange couplings over a site's neighbor
    vectors (6 J for a nearest-neighbor simple cubic lattice); ``eta`` is the
    number of spins in the unit cell hosting the atom (8 for simple cubic).
    """

    coupling_sum: float = 6.0
    eta: int = 8
    s: SpinMagnitude = field(default_factory=lambda: SpinMagnitude(1))

    def __post_init__(self):
        if self.coupling_sum <= 0:
            raise ValueError(f"coupling_sum must be positive, got {self.coupling_sum}")
        if self.eta < 1:
            raise ValueError(f"eta must be >= 1, got {self.eta}")
        object.__setattr__(self, "s", SpinMagnitude.parse(self.s))


@dataclass(frozen=True)
class FieldVector:
    """Applied magnetic field in units of J."""

    hx: float = 0.0
    hy: float = 0.0
    hz: float = 0.0

    def __post_init__(self):
        for c in (self.hx, self.hy, self.hz):
            if not math.isfinite(c):
                raise ValueError(f"field components must be finite, got {self}")

    @property
    def norm(self) -> float:
        return math.sqrt(self.hx**2 + self.hy**2 + self.hz**2)

    def components(self) -> tuple:
        return (self.hx, self.hy, self.hz)


@dataclass(frozen=True)
class ThermalPoint:
    """Temperature in units of J (k_B = 1); beta is derived."""

    temperature: float

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")

    @property
    def beta(self) -> float:
        return 1.0 / self.temperature


@dataclass(frozen=True)
class MeanFieldSolution:
    """Converged order parameter and the effective-field magnitude it implies."""

    m_vec: tuple
    m: float
    lambda_norm: float
    beta: float
    residual: float
    iterations: int
    converged: bool


class GapEquationError(RuntimeError):
    """Raised when the damped fixed-point iteration does not converge.

    Carries the last iterate in ``solution`` (with ``converged=False``).
    """

    def __init__(self, solution: MeanFieldSolution):
        self.solution = solution
        super().__init__(
            f"gap equation did not converge in {solution.iterations} iterations "
            f"(last residual {solution.residual:.3e})"
        )


def gap_rhs(lambda_norm: float, beta: float, s) -> float:
    """Thermal spin expectation along an effective field of magnitude lambda_norm.

    Monotone in lambda_norm, ~ S(S+1)/3 * beta * lambda_norm for small
    arguments and saturating at S.  Returns 0 exactly at lambda_norm = 0.
    """
    if lambda_norm < 0:
        raise ValueError(f"lambda_norm must be >= 0, got {lambda_norm}")
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    s_val = SpinMagnitude.parse(s).s
    y = beta * lambda_norm
    a = s_val + 0.5
    if y < _SERIES_CROSSOVER:
        # coth difference by series; the cubic term keeps ~1e-20 relative error
        return y * s_val * (s_val + 1) / 3 - y**3 * (16 * a**4 - 1) / 720
    return a / math.tanh(a * y) - 0.5 / math.tanh(y / 2)


def printed_gap_rhs(lambda_norm: float, beta: float, s) -> float:
    """Alternative closed form of the magnetization map kept for comparison.

    This variant (a cosh/sinh bracket divided by sinh((2S+1)y/2)) grows without
    bound for large beta*lambda instead of saturating at S; the `verify`
    report quantifies its disagreement with :func:`gap_rhs`.  Returns inf when
    the hyperbolics overflow.
    """
    s_val = SpinMagnitude.parse(s).s
    y = beta * lambda_norm
    if y == 0:
        return 0.0
    try:
        bracket = math.cosh(y * (s_val + 1) / 2) * (
            s_val * math.cosh(y * s_val) - math.sinh(y * s_val / 2) / math.tanh(y / 2)
        ) + (1 + s_val) * math.sinh(y * s_val / 2) * math.sinh(y * (s_val + 1) / 2)
        return bracket / math.sinh(y * (1 + 2 * s_val) / 2)
    except OverflowError:
        return math.inf


def curie_temperature(lat: LatticeSpec) -> float:
    """Zero-field ordering temperature 2 S (S+1) coupling_sum / 3."""
    s_val = lat.s.s
    return 2 * s_val * (s_val + 1) * lat.coupling_sum / 3


def solve_gap(
    lat: LatticeSpec,
    h: FieldVector,
    t: ThermalPoint,
    *,
    damping: float = 0.5,
    tol: float = 1e-12,
    max_iter: int = 10_000,
    initial: tuple | None = None,
) -> MeanFieldSolution:
    """Damped fixed-point solution of the vector magnetization equation.

    Iterates m <- (1-d) m + d * (b/|b|) B(beta |b|) with b = 2 m coupling_sum
    + h until the undamped residual |map(m) - m| drops below ``tol``.  For
    h = 0 the symmetry is broken along +z (so the ordered branch is returned
    below the Curie temperature and m = 0 above it).  Raises
    :class:`GapEquationError` when the iteration budget runs out.
    """
    if not 0 < damping <= 1:
        raise ValueError(f"damping must be in (0, 1], got {damping}")
    beta = t.beta
    s_val = lat.s.s
    two_j = 2 * lat.coupling_sum
    hx, hy, hz = h.components()
    if initial is not None:
        mx, my, mz = (float(c) for c in initial)
    elif h.norm == 0:
        mx, my, mz = 0.0, 0.0, s_val
    else:
        mx, my, mz = (s_val * c / h.norm for c in h.components())

    residual = math.inf
    for iteration in range(1, max_iter + 1):
        bx = two_j * mx + hx
        by = two_j * my + hy
        bz = two_j * mz + hz
        lam = math.sqrt(bx * bx + by * by + bz * bz)
        if lam == 0.0:
            tx = ty = tz = 0.0
        else:
            rhs = gap_rhs(lam, beta, lat.s)
            tx, ty, tz = rhs * bx / lam, rhs * by / lam, rhs * bz / lam
        residual = math.sqrt((tx - mx) ** 2 + (ty - my) ** 2 + (tz - mz) ** 2)
        if residual <= tol:
            m = math.sqrt(mx * mx + my * my + mz * mz)
            return MeanFieldSolution(
                m_vec=(mx, my, mz),
                m=m,
                lambda_norm=lam,
                beta=beta,
                residual=residual,
                iterations=iteration,
                converged=True,
            )
        mx += damping * (tx - mx)
        my += damping * (ty - my)
        mz += damping * (tz - mz)

    m = math.sqrt(mx * mx + my * my + mz * mz)
    lam = math.sqrt((two_j * mx + hx) ** 2 + (two_j * my + hy) ** 2 + (two_j * mz + hz) ** 2)
    failed = MeanFieldSolution(
        m_vec=(mx, my, mz),
        m=m,
        lambda_norm=lam,
        beta=beta,
        residual=residual,
        iterations=max_iter,
        converged=False,
    )
    raise GapEquationError(failed)


def log_partition_bracket(y: float, s) -> float:
    """ln sum_{k=-S..S} exp(y k), evaluated stably for any y >= 0.

    This is the log of the single-spin partition function at y = beta*Lambda;
    equal to ln(2S+1) at y = 0.
    """
    if y < 0:
        raise ValueError(f"y must be >= 0, got {y}")
    s_val = SpinMagnitude.parse(s).s
    if y < 1e-8:
        return math.log(2 * s_val + 1) + y * y * s_val * (s_val + 1) / 6
    # expm1 keeps 1 - exp(-y) at full relative precision for small y
    return s_val * y + math.log(-math.expm1(-(2 * s_val + 1) * y)) - math.log(-math.expm1(-y))


def free_energy(m_vec, h: FieldVector, t: ThermalPoint, lat: LatticeSpec) -> float:
    """Per-spin free energy coupling_sum m^2 - T ln(partition bracket)."""
    mx, my, mz = (float(c) for c in m_vec)
    m_sq = mx * mx + my * my + mz * mz
    two_j = 2 * lat.coupling_sum
    lam = math.sqrt((two_j * mx + h.hx) ** 2 + (two_j * my + h.hy) ** 2 + (two_j * mz + h.hz) ** 2)
    return lat.coupling_sum * m_sq - t.temperature * log_partition_bracket(t.beta * lam, lat.s)


def effective_field(sol: MeanFieldSolution, h: FieldVector, lat: LatticeSpec) -> tuple:
    """The field b = 2 m_vec coupling_sum + h driving the reduced dynamics.

    Its norm equals the solution's lambda_norm.  When both m and h vanish the
    zero vector is returned (free evolution).
    """
    if not sol.converged:
        raise ValueError("effective_field requires a converged solution")
    two_j = 2 * lat.coupling_sum
    return (
        two_j * sol.m_vec[0] + h.hx,
        two_j * sol.m_vec[1] + h.hy,
        two_j * sol.m_vec[2] + h.hz,
    )


@dataclass(frozen=True)
class CellPartition:
    """Partition data of the atom's unit cell.

    ``normalizer`` is the bath-trace normalizer bracket**eta used by every
    dynamics formula; ``z_tilde`` additionally carries the order-parameter
    prefactor exp(-beta eta coupling_sum m^2), which cancels from all
    observables.
    """

    z_tilde: float
    normalizer: float
    log_normalizer: float


def cell_partition(sol: MeanFieldSolution, h: FieldVector, t: ThermalPoint, lat: LatticeSpec) -> CellPartition:
    """Unit-cell partition function of the converged mean-field state."""
    if not sol.converged:
        raise ValueError("cell_partition requires a converged solution")
    log_bracket = log_partition_bracket(t.beta * sol.lambda_norm, lat.s)
    log_norm = lat.eta * log_bracket
    prefactor = -t.beta * lat.eta * lat.coupling_sum * sol.m ** 2
    return CellPartition(
        z_tilde=math.exp(prefactor + log_norm),
        normalizer=math.exp(log_norm),
        log_normalizer=log_norm,
    )
