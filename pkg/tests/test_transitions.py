import numpy as np
import pytest

from cellbath.dephasing import AtomParams
from cellbath.meanfield import FieldVector, LatticeSpec, ThermalPoint, effective_field, solve_gap
from cellbath.meanfield import cell_partition
from cellbath.oracle import full_evolve_series, model_from_mean_field
from cellbath.spinops import SpinMagnitude, spin_matrices
from cellbath.transitions import (
    build_sectors,
    channel_series,
    channel_tomography,
    coherence_factor_z,
    evolve_atom,
    evolve_atom_series,
    excited_population_x,
    excited_population_z,
    m_discriminants,
    psi_factor,
    sector_normalizer,
)

GROUND = np.array([[0, 0], [0, 1]], dtype=complex)
EXCITED = np.array([[1, 0], [0, 0]], dtype=complex)
PLUS = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
ISO = AtomParams(omega0=2.0, alpha=1.0, gamma=1.0, lam=1.0)


def lat_of(eta, twice_s=1):
    return LatticeSpec(coupling_sum=6.0, eta=eta, s=SpinMagnitude(twice_s))


def setup_engine(eta=8, twice_s=1, h=None, temperature=2.0, atom=ISO):
    lat = lat_of(eta, twice_s)
    h = h or FieldVector(hz=0.5)
    sol = solve_gap(lat, h, ThermalPoint(temperature))
    sectors = build_sectors(sol, h, atom, lat)
    return lat, h, sol, sectors, sector_normalizer(sectors)


def test_sector_structure_eta8_half():
    lat, h, sol, sectors, z_tilde = setup_engine()
    assert [blk.j.twice_s for blk in sectors] == [0, 2, 4, 6, 8]
    assert [blk.dimension for blk in sectors] == [2, 6, 10, 14, 18]
    assert [blk.weight for blk in sectors] == [14, 28, 20, 7, 1]
    assert sum(blk.weight * blk.dimension for blk in sectors) == 2 * 2**8


def test_sector_normalizer_matches_cell_partition():
    lat, h, sol, sectors, z_tilde = setup_engine()
    part = cell_partition(sol, h, ThermalPoint(2.0), lat)
    assert z_tilde == pytest.approx(part.normalizer, rel=1e-12)


def test_build_sectors_rejects_anisotropic_and_oversize():
    lat, h, sol, _, _ = setup_engine()
    with pytest.raises(ValueError, match="oracle"):
        build_sectors(sol, h, AtomParams(omega0=2.0, alpha=1.0, gamma=0.5, lam=1.0), lat)
    big = lat_of(16, 2)
    sol_big = solve_gap(big, h, ThermalPoint(10.0))
    with pytest.raises(ValueError, match="cap"):
        build_sectors(sol_big, h, ISO, big)


def test_evolve_atom_identity_at_t0_and_state_validity():
    lat, h, sol, sectors, z_tilde = setup_engine()
    assert np.max(np.abs(evolve_atom(PLUS, 0.0, sectors, z_tilde) - PLUS)) <= 1e-12
    for t in (0.5, 3.0, 17.0):
        rho = evolve_atom(GROUND, t, sectors, z_tilde)
        assert abs(np.trace(rho) - 1) <= 1e-12
        assert np.max(np.abs(rho - rho.conj().T)) <= 1e-12
        assert np.linalg.eigvalsh(rho).min() >= -1e-10


def test_evolve_atom_validates_input():
    lat, h, sol, sectors, z_tilde = setup_engine()
    with pytest.raises(ValueError):
        evolve_atom(np.array([[1.0, 0.5], [0.1, 0.0]]), 1.0, sectors, z_tilde)
    with pytest.raises(ValueError):
        evolve_atom(2 * GROUND, 1.0, sectors, z_tilde)


def test_zero_coupling_freezes_populations():
    atom0 = AtomParams(omega0=2.0, alpha=0.0, gamma=0.0, lam=0.0)
    lat, h, sol, sectors, z_tilde = setup_engine(atom=atom0)
    grid = np.linspace(0, 20, 41)
    states = evolve_atom_series(PLUS, grid, sectors, z_tilde)
    assert np.max(np.abs(states[:, 0, 0] - 0.5)) <= 1e-13
    assert np.max(np.abs(states[:, 0, 1] - 0.5 * np.exp(-2j * grid))) <= 1e-12


@pytest.mark.parametrize(
    "eta,twice_s,temp,h",
    [
        (2, 1, 2.0, FieldVector(hz=0.5)),
        (2, 1, 2.0, FieldVector(hx=0.5)),
        (2, 2, 7.0, FieldVector(0.2, 0.3, 0.4)),
    ],
)
def test_engine_matches_oracle(eta, twice_s, temp, h):
    lat = lat_of(eta, twice_s)
    sol = solve_gap(lat, h, ThermalPoint(temp))
    sectors = build_sectors(sol, h, ISO, lat)
    z_tilde = sector_normalizer(sectors)
    grid = np.linspace(0, 25, 101)
    engine = evolve_atom_series(GROUND, grid, sectors, z_tilde)
    model = model_from_mean_field(sol, h, ISO, lat)
    states = full_evolve_series(model, GROUND, grid)
    assert np.max(np.abs(engine - states)) <= 1e-10


def test_population_z_fast_path():
    lat, h, sol, sectors, z_tilde = setup_engine()
    grid = np.linspace(0, 50, 501)
    fast = excited_population_z(grid, sol, h, ISO, lat)
    engine = evolve_atom_series(GROUND, grid, sectors, z_tilde)
    assert fast[0] == pytest.approx(0.0, abs=1e-14)
    assert np.max(np.abs(fast - engine[:, 0, 0].real)) <= 1e-10
    assert np.max(np.abs(engine[:, 0, 1])) <= 1e-12  # coherence stays zero
    assert np.all((fast >= 0) & (fast <= 1))
    # scalar call and alpha = 0 edge
    assert excited_population_z(1.3, sol, h, ISO, lat) == pytest.approx(fast[13], abs=1e-12)
    atom0 = AtomParams(omega0=2.0, alpha=0.0, gamma=0.0, lam=0.0)
    assert np.max(excited_population_z(grid, sol, h, atom0, lat)) <= 1e-14


def test_population_z_rejects_misaligned_field():
    lat = lat_of(8)
    h = FieldVector(hx=0.5)
    sol = solve_gap(lat, h, ThermalPoint(2.0))
    with pytest.raises(ValueError, match="along z"):
        excited_population_z(1.0, sol, h, ISO, lat)


def test_coherence_factor_z_matches_engine():
    lat, h, sol, sectors, z_tilde = setup_engine()
    grid = np.linspace(0, 50, 501)
    ratio = coherence_factor_z(grid, sol, h, ISO, lat)
    engine = evolve_atom_series(PLUS, grid, sectors, z_tilde)
    assert np.max(np.abs(0.5 * ratio - engine[:, 0, 1])) <= 1e-10
    # alpha = 0 reduces to free precession
    atom0 = AtomParams(omega0=2.0, alpha=0.0, gamma=0.0, lam=0.0)
    assert np.max(np.abs(coherence_factor_z(grid, sol, h, atom0, lat) - np.exp(-2j * grid))) <= 1e-12


def test_psi_factor():
    atom0 = AtomParams(omega0=0.0, alpha=1.0, gamma=1.0, lam=1.0)
    h = FieldVector(hx=0.5)
    lat, h, sol, sectors, z_tilde = setup_engine(h=h, atom=atom0)
    grid = np.linspace(0, 50, 501)
    psi = psi_factor(grid, sol, h, atom0, lat)
    assert psi[0] == pytest.approx(1.0, abs=1e-13)
    engine = evolve_atom_series(GROUND, grid, sectors, z_tilde)
    assert np.max(np.abs((1 - psi.real) / 2 - engine[:, 0, 0].real)) <= 1e-10
    assert np.max(np.abs(excited_population_x(grid, sol, h, atom0, lat) - engine[:, 0, 0].real)) <= 1e-10
    # no coupling: Re Psi stays 1 and the population stays 0
    free = AtomParams(omega0=0.0, alpha=0.0, gamma=0.0, lam=0.0)
    assert np.max(np.abs(psi_factor(grid, sol, h, free, lat) - 1.0)) <= 1e-12


def test_psi_factor_preconditions():
    lat = lat_of(8)
    h = FieldVector(hx=0.5)
    sol = solve_gap(lat, h, ThermalPoint(2.0))
    with pytest.raises(ValueError, match="omega0"):
        psi_factor(1.0, sol, h, ISO, lat)
    h_z = FieldVector(hz=0.5)
    sol_z = solve_gap(lat, h_z, ThermalPoint(2.0))
    atom0 = AtomParams(omega0=0.0, alpha=1.0, gamma=1.0, lam=1.0)
    with pytest.raises(ValueError, match="along x"):
        psi_factor(1.0, sol_z, h_z, atom0, lat)


def test_m_discriminant_shift_identity():
    # M_plus(j, ell-1) = M_minus(j, ell) ties the two block families together
    for ell in (-1.0, 0.0, 1.5):
        a = m_discriminants(2.0, ell - 1, 0.7, 1.9).m_plus
        b = m_discriminants(2.0, ell, 0.7, 1.9).m_minus
        assert a == pytest.approx(b, abs=1e-14)


def test_channel_tomography_basics():
    lat, h, sol, sectors, z_tilde = setup_engine()
    chan0 = channel_tomography(0.0, sectors, z_tilde)
    assert np.max(np.abs(chan0.map16 - np.eye(4))) <= 1e-12
    chan = channel_tomography(3.7, sectors, z_tilde)
    # trace preservation as a left identity
    tp = np.array([1, 0, 0, 1.0])
    assert np.max(np.abs(tp @ chan.map16 - tp)) <= 1e-12
    # Hermiticity preservation and agreement with direct evolution
    rng = np.random.default_rng(5)
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = m @ m.conj().T
    rho /= np.trace(rho)
    out = chan.apply(rho)
    assert np.max(np.abs(out - out.conj().T)) <= 1e-12
    direct = evolve_atom(rho, 3.7, sectors, z_tilde)
    assert np.max(np.abs(out - direct)) <= 1e-12
    # Choi positivity
    assert np.linalg.eigvalsh(chan.choi()).min() >= -1e-10


def test_channel_pure_phase_when_decoupled():
    atom0 = AtomParams(omega0=2.0, alpha=0.0, gamma=0.0, lam=0.0)
    lat, h, sol, sectors, z_tilde = setup_engine(atom=atom0)
    t = 1.23
    chan = channel_tomography(t, sectors, z_tilde)
    expected = np.diag([1.0, np.exp(-2j * t), np.exp(2j * t), 1.0])
    assert np.max(np.abs(chan.map16 - expected)) <= 1e-12


def test_channel_reproduces_population_series():
    lat, h, sol, sectors, z_tilde = setup_engine()
    grid = np.linspace(0, 10, 21)
    maps = channel_series(grid, sectors, z_tilde)
    fast = excited_population_z(grid, sol, h, ISO, lat)
    for k in range(grid.size):
        rho = (maps[k] @ GROUND.reshape(4)).reshape(2, 2)
        assert abs(rho[0, 0].real - fast[k]) <= 1e-12


def test_rotational_covariance_populations():
    # rotating the field z -> x while rotating the initial state leaves
    # populations in the rotated frame unchanged (omega0 = 0, isotropic)
    atom0 = AtomParams(omega0=0.0, alpha=1.0, gamma=1.0, lam=1.0)
    grid = np.linspace(0, 15, 61)

    lat = lat_of(4)
    h_z = FieldVector(hz=0.5)
    sol_z = solve_gap(lat, h_z, ThermalPoint(2.0))
    sec_z = build_sectors(sol_z, h_z, atom0, lat)
    states_z = evolve_atom_series(GROUND, grid, sec_z, sector_normalizer(sec_z))

    h_x = FieldVector(hx=0.5)
    sol_x = solve_gap(lat, h_x, ThermalPoint(2.0))
    sec_x = build_sectors(sol_x, h_x, atom0, lat)
    # rotation mapping z to x: exp(+i pi/2 S0y) conjugates the atom state
    sy = spin_matrices("1/2").sy
    from cellbath.spinops import evolve_unitary

    u = evolve_unitary(sy, -np.pi / 2)  # exp(+i pi/2 sy)
    rho0 = u @ GROUND @ u.conj().T
    states_x = evolve_atom_series(rho0, grid, sec_x, sector_normalizer(sec_x))
    back = np.einsum("ab,tbc,cd->tad", u.conj().T, states_x, u)
    assert np.max(np.abs(back - states_z)) <= 1e-10


def test_effective_field_drives_weights():
    # the sector thermal weights are exp(beta |b| ell), ell ascending
    lat, h, sol, sectors, z_tilde = setup_engine()
    b = np.linalg.norm(effective_field(sol, h, lat))
    blk = sectors[-1]  # j = 4
    ells = np.arange(-4, 5)
    assert np.max(np.abs(blk.bath_thermal - np.exp(sol.beta * b * ells))) <= 1e-10
