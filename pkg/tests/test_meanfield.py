import math

import numpy as np
import pytest

from cellbath.meanfield import (
    FieldVector,
    GapEquationError,
    LatticeSpec,
    ThermalPoint,
    cell_partition,
    curie_temperature,
    effective_field,
    free_energy,
    gap_rhs,
    printed_gap_rhs,
    solve_gap,
)
from cellbath.spinops import SpinMagnitude

LAT_HALF = LatticeSpec(coupling_sum=6.0, eta=8, s=SpinMagnitude(1))
LAT_ONE = LatticeSpec(coupling_sum=6.0, eta=8, s=SpinMagnitude(2))


def scalar_bisection_m(temperature):
    """Independent zero-field fixed point for S = 1/2: root of tanh(6m/T)/2 - m."""

    def f(m):
        # beta * Lambda / 2 = 12 m / (2 T)
        return 0.5 * math.tanh(6 * m / temperature) - m

    lo, hi = 1e-9, 0.5
    assert f(lo) > 0 and f(hi) <= 0
    for _ in range(80):
        mid = (lo + hi) / 2
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def test_gap_rhs_spin_half_identity():
    # (S+1/2) coth y - (1/2) coth(y/2) collapses to tanh(y/2)/2 for S = 1/2
    assert gap_rhs(2.0, 1.0, "1/2") == pytest.approx(math.tanh(1.0) / 2, abs=1e-14)
    assert gap_rhs(2.0, 1.0, "1/2") == pytest.approx(0.3807970779778824, abs=1e-12)


def test_gap_rhs_limits():
    assert gap_rhs(0.0, 1.0, "1/2") == 0.0
    assert gap_rhs(1e3, 1.0, "1/2") == pytest.approx(0.5, abs=1e-12)
    assert gap_rhs(1e3, 2.0, "3/2") == pytest.approx(1.5, abs=1e-12)
    # linear slope S(S+1)/3 drives the Curie temperature
    slope = gap_rhs(1e-9, 1.0, 1) / 1e-9
    assert slope == pytest.approx(2.0 / 3.0, rel=1e-6)


@pytest.mark.parametrize("twice_s", [1, 2, 3])
def test_gap_rhs_monotone_and_bounded(twice_s):
    s = SpinMagnitude(twice_s)
    y = np.logspace(-8, 3, 400)
    vals = np.array([gap_rhs(v, 1.0, s) for v in y])
    assert np.all(np.diff(vals) >= 0)
    assert np.all(vals <= s.s + 1e-12)


def test_solve_gap_zero_field_anchor():
    sol = solve_gap(LAT_HALF, FieldVector(), ThermalPoint(2.0))
    assert sol.converged
    assert sol.residual <= 1e-12
    assert sol.m == pytest.approx(0.4291, abs=1e-3)
    assert sol.m == pytest.approx(scalar_bisection_m(2.0), abs=1e-10)
    # fixed-point consistency at the returned solution
    assert abs(sol.m - gap_rhs(sol.lambda_norm, sol.beta, LAT_HALF.s)) <= 1e-11
    # symmetry breaking along +z
    assert sol.m_vec[0] == 0.0 and sol.m_vec[1] == 0.0 and sol.m_vec[2] > 0


def test_solve_gap_paramagnetic_phase():
    sol = solve_gap(LAT_HALF, FieldVector(), ThermalPoint(3.5))
    assert sol.m <= 1e-10


def test_solve_gap_field_aligned():
    sol = solve_gap(LAT_HALF, FieldVector(hz=0.5), ThermalPoint(2.0))
    assert sol.m_vec[0] == 0.0 and sol.m_vec[1] == 0.0
    assert sol.m > 0.4291  # field increases the order parameter


def test_solve_gap_rotational_covariance():
    t = ThermalPoint(2.0)
    ref = solve_gap(LAT_HALF, FieldVector(hz=0.5), t)
    for h, axis in [(FieldVector(hx=0.5), 0), (FieldVector(hy=0.5), 1)]:
        sol = solve_gap(LAT_HALF, h, t)
        assert sol.m_vec[axis] == pytest.approx(ref.m_vec[2], abs=1e-10)
        assert sol.m == pytest.approx(ref.m, abs=1e-10)


def test_solve_gap_parallel_to_field():
    h = FieldVector(0.3, -0.2, 0.1)
    sol = solve_gap(LAT_HALF, h, ThermalPoint(2.0))
    m = np.array(sol.m_vec)
    b = np.array(effective_field(sol, h, LAT_HALF))
    assert np.linalg.norm(np.cross(m, b)) <= 1e-8


def test_solve_gap_nonconvergence_is_explicit():
    with pytest.raises(GapEquationError) as err:
        solve_gap(LAT_HALF, FieldVector(), ThermalPoint(2.9999), max_iter=5)
    assert err.value.solution.converged is False
    assert err.value.solution.residual > 0


def test_curie_temperature():
    assert curie_temperature(LAT_HALF) == pytest.approx(3.0, abs=0)
    assert curie_temperature(LAT_ONE) == pytest.approx(8.0, abs=0)
    doubled = LatticeSpec(coupling_sum=12.0, eta=8, s=SpinMagnitude(1))
    assert curie_temperature(doubled) == 2 * curie_temperature(LAT_HALF)


def test_free_energy_entropy_limit():
    t = ThermalPoint(2.0)
    assert free_energy((0, 0, 0), FieldVector(), t, LAT_HALF) == pytest.approx(
        -2.0 * math.log(2), abs=1e-12
    )
    assert free_energy((0, 0, 0), FieldVector(), t, LAT_ONE) == pytest.approx(
        -2.0 * math.log(3), abs=1e-12
    )


def test_free_energy_stationary_at_solution():
    t = ThermalPoint(2.0)
    h = FieldVector(hz=0.5)
    sol = solve_gap(LAT_HALF, h, t)
    eps = 1e-5
    for axis in range(3):
        up = list(sol.m_vec)
        dn = list(sol.m_vec)
        up[axis] += eps
        dn[axis] -= eps
        grad = (free_energy(up, h, t, LAT_HALF) - free_energy(dn, h, t, LAT_HALF)) / (2 * eps)
        assert abs(grad) <= 1e-6


def test_free_energy_ordered_phase_is_minimum():
    t = ThermalPoint(2.0)
    h = FieldVector()
    sol = solve_gap(LAT_HALF, h, t)
    f_star = free_energy(sol.m_vec, h, t, LAT_HALF)
    assert f_star <= free_energy((0, 0, 0), h, t, LAT_HALF)
    # grid oracle: no trial magnitude on [0, S] does better (within slack)
    for m in np.linspace(0, 0.5, 41):
        assert f_star <= free_energy((0, 0, m), h, t, LAT_HALF) + 1e-9


def test_effective_field():
    t = ThermalPoint(2.0)
    h = FieldVector(hz=0.5)
    sol = solve_gap(LAT_HALF, h, t)
    b = effective_field(sol, h, LAT_HALF)
    assert abs(np.linalg.norm(b) - sol.lambda_norm) <= 1e-10
    assert b[0] == 0.0 and b[1] == 0.0
    # above the transition with no order the effective field is the bare field
    sol_pm = solve_gap(LAT_HALF, FieldVector(), ThermalPoint(3.5))
    b_pm = effective_field(sol_pm, FieldVector(hz=0.0), LAT_HALF)
    assert np.linalg.norm(b_pm) <= 1e-9
    sol_x = solve_gap(LAT_HALF, FieldVector(hx=0.5), t)
    b_x = effective_field(sol_x, FieldVector(hx=0.5), LAT_HALF)
    assert b_x[1] == 0.0 and b_x[2] == 0.0 and b_x[0] > 0.5


def test_cell_partition_normalizers():
    t = ThermalPoint(2.0)
    h = FieldVector(hz=0.5)
    lat1 = LatticeSpec(coupling_sum=6.0, eta=1, s=SpinMagnitude(1))
    sol = solve_gap(lat1, h, t)
    part = cell_partition(sol, h, t, lat1)
    y = t.beta * sol.lambda_norm
    assert part.normalizer == pytest.approx(2 * math.cosh(y / 2), rel=1e-12)

    lat1s1 = LatticeSpec(coupling_sum=6.0, eta=1, s=SpinMagnitude(2))
    sol1 = solve_gap(lat1s1, h, ThermalPoint(7.0))
    part1 = cell_partition(sol1, h, ThermalPoint(7.0), lat1s1)
    y1 = sol1.beta * sol1.lambda_norm
    assert part1.normalizer == pytest.approx(1 + 2 * math.cosh(y1), rel=1e-12)

    # z_tilde carries the order-parameter prefactor on top of the bracket power
    part8 = cell_partition(solve_gap(LAT_HALF, h, t), h, t, LAT_HALF)
    sol8 = solve_gap(LAT_HALF, h, t)
    prefactor = math.exp(-t.beta * 8 * 6.0 * sol8.m**2)
    assert part8.z_tilde == pytest.approx(prefactor * part8.normalizer, rel=1e-12)


def test_cell_partition_free_spin_limit():
    # no order and no field: the bracket counts states
    t = ThermalPoint(3.5)
    sol = solve_gap(LAT_HALF, FieldVector(), t)
    part = cell_partition(sol, FieldVector(), t, LAT_HALF)
    assert part.normalizer == pytest.approx(2.0**8, rel=1e-9)


def test_printed_gap_rhs_grows_unbounded():
    # the retained alternative bracket exceeds the S = 1/2 saturation value
    assert printed_gap_rhs(20.0, 1.0, "1/2") > 10 * 0.5
    assert printed_gap_rhs(40.0, 1.0, "1/2") > printed_gap_rhs(20.0, 1.0, "1/2")
