import math

import numpy as np
import pytest

from cellbath.spinops import (
    SpinMagnitude,
    evolve_unitary,
    hermitian_spectral,
    multiplicity,
    multiplicity_oracle,
    sector_spins,
    spin_matrices,
    thermal_state,
)


def random_hermitian(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + m.conj().T) / 2


def test_spin_magnitude_parse():
    assert SpinMagnitude.parse(0.5).twice_s == 1
    assert SpinMagnitude.parse("1/2").twice_s == 1
    assert SpinMagnitude.parse("1").twice_s == 2
    assert SpinMagnitude.parse(1.5).twice_s == 3
    assert SpinMagnitude.parse(SpinMagnitude(4)).twice_s == 4
    assert SpinMagnitude(1).s == 0.5
    assert SpinMagnitude(3).dimension == 4
    assert str(SpinMagnitude(1)) == "1/2"
    assert str(SpinMagnitude(2)) == "1"
    with pytest.raises(ValueError):
        SpinMagnitude.parse(0.3)
    with pytest.raises(ValueError):
        SpinMagnitude(-1)


def test_spin_half_matrices():
    ops = spin_matrices("1/2")
    assert np.allclose(ops.sz, np.diag([0.5, -0.5]))
    assert np.allclose(ops.sx, np.array([[0, 0.5], [0.5, 0]]))
    assert np.allclose(ops.sy, np.array([[0, -0.5j], [0.5j, 0]]))


def test_spin_one_matrices():
    ops = spin_matrices(1)
    assert np.allclose(ops.sz, np.diag([1.0, 0.0, -1.0]))
    r = 1 / math.sqrt(2)
    assert np.allclose(ops.sx, np.array([[0, r, 0], [r, 0, r], [0, r, 0]]))


@pytest.mark.parametrize("twice_s", [1, 2, 3, 4, 5, 8])
def test_spin_matrix_invariants(twice_s):
    ops = spin_matrices(SpinMagnitude(twice_s))
    s = twice_s / 2
    for m in (ops.sx, ops.sy, ops.sz):
        assert np.max(np.abs(m - m.conj().T)) <= 1e-14
    comm = ops.sx @ ops.sy - ops.sy @ ops.sx
    assert np.max(np.abs(comm - 1j * ops.sz)) <= 1e-12
    casimir = ops.sx @ ops.sx + ops.sy @ ops.sy + ops.sz @ ops.sz
    assert np.max(np.abs(casimir - s * (s + 1) * np.eye(ops.dimension))) <= 1e-12


def test_casimir_spin_three_half():
    ops = spin_matrices("3/2")
    casimir = ops.sx @ ops.sx + ops.sy @ ops.sy + ops.sz @ ops.sz
    assert np.allclose(casimir, (15 / 4) * np.eye(4), atol=1e-12)


def test_spectral_simple_cases():
    dec = hermitian_spectral(np.diag([2.0, -1.0]))
    assert np.allclose(dec.eigenvalues, [-1.0, 2.0])
    dec = hermitian_spectral(spin_matrices("1/2").sx)
    assert np.allclose(dec.eigenvalues, [-0.5, 0.5])


def test_spectral_roundtrip_and_unitarity():
    rng = np.random.default_rng(7)
    m = random_hermitian(rng, 17)
    dec = hermitian_spectral(m)
    scale = np.linalg.norm(m)
    assert np.max(np.abs(dec.reconstruct() - m)) <= 1e-12 * scale
    v = dec.eigenvectors
    assert np.max(np.abs(v.conj().T @ v - np.eye(17))) <= 1e-12
    assert np.all(np.diff(dec.eigenvalues) >= 0)


def test_spectral_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_spectral(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_evolve_unitary():
    rng = np.random.default_rng(3)
    h = random_hermitian(rng, 9)
    assert np.allclose(evolve_unitary(h, 0.0), np.eye(9), atol=1e-14)
    u = evolve_unitary(h, 1.7)
    assert np.max(np.abs(u @ u.conj().T - np.eye(9))) <= 1e-12
    # diagonal case: h = w * sz for spin 1/2
    w = 2.3
    u = evolve_unitary(w * spin_matrices("1/2").sz, 0.9)
    assert np.allclose(u, np.diag([np.exp(-1j * w * 0.45), np.exp(1j * w * 0.45)]))
    # group property for a shared generator
    u12 = evolve_unitary(h, 0.4) @ evolve_unitary(h, 1.1)
    assert np.max(np.abs(u12 - evolve_unitary(h, 1.5))) <= 1e-11


def test_thermal_state():
    rng = np.random.default_rng(11)
    h = random_hermitian(rng, 6)
    rho = thermal_state(h, beta=0.7)
    assert abs(np.trace(rho) - 1) <= 1e-14
    assert np.max(np.abs(rho - rho.conj().T)) <= 1e-13
    assert np.linalg.eigvalsh(rho).min() >= -1e-14
    # commutes with its generator
    assert np.max(np.abs(rho @ h - h @ rho)) <= 1e-12
    # beta -> 0 gives the maximally mixed state
    assert np.max(np.abs(thermal_state(h, 1e-12) - np.eye(6) / 6)) <= 1e-10


def test_thermal_state_two_level_gibbs():
    b = 1.3
    beta = 0.8
    rho = thermal_state(b * spin_matrices("1/2").sz, beta)
    z = 2 * math.cosh(beta * b / 2)
    # positive-exponent convention: the aligned (sz = +1/2) state is favored
    assert rho[0, 0].real == pytest.approx(math.exp(beta * b / 2) / z, abs=1e-14)
    assert rho[1, 1].real == pytest.approx(math.exp(-beta * b / 2) / z, abs=1e-14)
    with pytest.raises(ValueError):
        thermal_state(spin_matrices("1/2").sz, beta=0.0)


def test_multiplicity_reference_values():
    # frozen from the weight-counting oracle (n(M) differences of binomials)
    expected = {0: 14, 1: 28, 2: 20, 3: 7, 4: 1}
    for j, nu in expected.items():
        assert multiplicity(j, 8, "1/2") == nu
        assert multiplicity_oracle(j, 8, "1/2") == nu
    assert multiplicity_oracle(1, 8, "1/2") == math.comb(8, 3) - math.comb(8, 2)
    assert multiplicity_oracle(4, 8, "1/2") == math.comb(8, 0)


def test_multiplicity_edges():
    for s in ("1/2", "1", "3/2"):
        assert multiplicity(s, 1, s) == 1  # single spin
    assert multiplicity(4, 8, "1/2") == 1  # fully stretched
    assert multiplicity(6, 6, 1) == 1
    # parity mismatch and out-of-range return 0 rather than raising
    assert multiplicity("1/2", 8, "1/2") == 0
    assert multiplicity(5, 8, "1/2") == 0
    assert multiplicity_oracle("1/2", 8, "1/2") == 0


def test_multiplicity_triangle_decompositions():
    # 1 (x) 1 = 0 + 1 + 2, each once
    assert [multiplicity(j, 2, 1) for j in (0, 1, 2)] == [1, 1, 1]
    # three spin-1/2: one doublet pair plus a quartet
    assert multiplicity("1/2", 3, "1/2") == 2
    assert multiplicity("3/2", 3, "1/2") == 1


@pytest.mark.parametrize("twice_s", [1, 2, 3])
def test_multiplicity_matches_oracle_exactly(twice_s):
    s = SpinMagnitude(twice_s)
    for eta in range(1, 9):
        for j in sector_spins(eta, s):
            assert multiplicity(j, eta, s) == multiplicity_oracle(j, eta, s)


@pytest.mark.parametrize("twice_s", [1, 2, 3])
def test_dimension_sum_rule(twice_s):
    s = SpinMagnitude(twice_s)
    for eta in range(1, 9):
        total = sum((j.twice_s + 1) * multiplicity(j, eta, s) for j in sector_spins(eta, s))
        assert total == (twice_s + 1) ** eta


def test_sector_spins_parity():
    assert [j.twice_s for j in sector_spins(3, "1/2")] == [1, 3]
    assert [j.twice_s for j in sector_spins(2, 1)] == [0, 2, 4]
