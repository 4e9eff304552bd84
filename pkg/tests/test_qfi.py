import numpy as np
import pytest

from qfirob import eigh, optimal_state, qfi, qfig_exact
from qfirob.single_qubit import PAULI_X, PAULI_Z, equator_state
from conftest import fd_qfi, rand_hermitian, rand_state, simpson_conjugation_integral


def test_commuting_case_gives_linear_generator():
    g = qfig_exact(0.8 * PAULI_Z, PAULI_Z, 1.7)
    assert np.abs(g.generator - 1.7 * PAULI_Z).max() < 1e-12


def test_generator_matches_simpson_quadrature():
    h = 1.0 * PAULI_Z
    g = qfig_exact(h, PAULI_X, 1.0)
    # integrand in conjugated form: e^{iHs} X e^{-iHs}
    oracle = simpson_conjugation_integral(h, PAULI_X, 1.0, panels=10_000)
    assert np.abs(g.generator - oracle).max() < 1e-8


def test_generator_matches_quadrature_random(rng):
    h = rand_hermitian(rng, 5)
    dh = rand_hermitian(rng, 5)
    g = qfig_exact(h, dh, 0.9)
    oracle = simpson_conjugation_integral(h, dh, 0.9, panels=10_000)
    assert np.abs(g.generator - oracle).max() < 1e-8


def test_generator_vanishes_linearly_at_small_time(rng):
    h = rand_hermitian(rng, 4)
    dh = rand_hermitian(rng, 4)
    t = 1e-6
    g = qfig_exact(h, dh, t)
    assert np.abs(g.generator - t * dh).max() < 5.0 * t**2 * np.abs(h).max() * np.abs(dh).max()


def test_clean_single_qubit_qfi():
    for beta in (0.0, 0.4, 2.2):
        g = qfig_exact(4.0 * PAULI_Z, PAULI_Z, 1.3)
        assert qfi(equator_state(beta), g) == pytest.approx(4 * 1.3**2, rel=1e-12)


def test_qfi_vanishes_on_eigenstate(rng):
    h = rand_hermitian(rng, 5)
    g = qfig_exact(h, rand_hermitian(rng, 5), 1.0)
    vec = eigh(g.generator).basis[:, 2]
    assert qfi(vec, g) < 1e-18


def test_qfi_matches_finite_difference_oracle(rng):
    h = rand_hermitian(rng, 6)
    dh = rand_hermitian(rng, 6)
    psi = rand_state(rng, 6)
    g = qfig_exact(h, dh, 0.7)
    assert qfi(psi, g) == pytest.approx(fd_qfi(h, dh, psi, 0.7), rel=1e-6, abs=1e-8)


def test_optimal_state_of_z_generator():
    g = qfig_exact(1.0 * PAULI_Z, PAULI_Z, 1.0)  # generator t*Z
    psi = optimal_state(g, beta=0.0)
    # equal superposition of the extremal Z eigenvectors, up to global phase
    overlap = abs(np.vdot(psi, np.array([1.0, 1.0]) / np.sqrt(2)))
    assert overlap == pytest.approx(1.0, abs=1e-12)


def test_optimal_state_reaches_spectral_span(rng):
    for _ in range(50):
        d = int(rng.integers(2, 10))
        g = qfig_exact(rand_hermitian(rng, d), rand_hermitian(rng, d), 1.1)
        lam = eigh(g.generator).eigenvalues
        best = qfi(optimal_state(g, float(rng.uniform(0, 2 * np.pi))), g)
        assert best == pytest.approx((lam[-1] - lam[0]) ** 2, rel=1e-10)


def test_no_state_beats_optimal(rng):
    for _ in range(3):
        d = int(rng.integers(2, 17))
        g = qfig_exact(rand_hermitian(rng, d), rand_hermitian(rng, d), 0.8)
        cap = qfi(optimal_state(g), g) + 1e-9
        for _ in range(1000):
            assert qfi(rand_state(rng, d), g) <= cap


def test_beta_periodicity():
    rng = np.random.default_rng(1)
    g = qfig_exact(rand_hermitian(rng, 4), rand_hermitian(rng, 4), 1.0)
    a = optimal_state(g, beta=0.7)
    b = optimal_state(g, beta=0.7 + 2 * np.pi)
    assert abs(abs(np.vdot(a, b)) - 1.0) < 1e-12


def test_commuting_identity_property(rng):
    # polynomials of a common matrix commute with it
    h = rand_hermitian(rng, 5)
    dh = 0.3 * h @ h + 0.7 * h
    assert np.abs(h @ dh - dh @ h).max() < 1e-10
    g = qfig_exact(h, dh, 1.4)
    assert np.abs(g.generator - 1.4 * dh).max() < 1e-10


def test_qfi_invariant_under_global_rotation(rng):
    h = rand_hermitian(rng, 5)
    dh = rand_hermitian(rng, 5)
    psi = rand_state(rng, 5)
    u = np.linalg.qr(rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))[0]
    f1 = qfi(psi, qfig_exact(h, dh, 0.9))
    f2 = qfi(u @ psi, qfig_exact(u @ h @ u.conj().T, u @ dh @ u.conj().T, 0.9))
    assert f1 == pytest.approx(f2, rel=1e-9)
