"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's spectral code paths:
matrix exponentials come from a scaled Taylor series or scipy's Pade
approximation, integrals from composite Simpson rules, and derivatives from
central finite differences.
"""

import numpy as np
import pytest
import scipy.linalg


def rand_hermitian(rng, dim, scale=1.0):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (m + m.conj().T) / 2.0


def rand_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def taylor_expm(a, terms=40):
    """exp(a) by scaling-and-squaring a plain Taylor series."""
    a = np.asarray(a, dtype=complex)
    norm = np.abs(a).sum(axis=1).max()
    squarings = max(0, int(np.ceil(np.log2(max(norm, 1e-300)))) + 1)
    b = a / (2**squarings)
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms + 1):
        term = term @ b / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def simpson_conjugation_integral(h, x, t, panels=2000):
    """Composite Simpson for int_0^t e^{iHs} X e^{-iHs} ds via scipy expm."""
    steps = 2 * panels
    ds = t / steps
    u_step = scipy.linalg.expm(1j * np.asarray(h, dtype=complex) * ds)
    f = np.asarray(x, dtype=complex).copy()
    acc = f.copy()  # endpoint s=0
    u = np.eye(h.shape[0], dtype=complex)
    for k in range(1, steps + 1):
        u = u_step @ u
        f = u @ x @ u.conj().T
        weight = 1.0 if k == steps else (4.0 if k % 2 == 1 else 2.0)
        acc = acc + weight * f
    return acc * ds / 3.0


def fd_qfi(h, dh, psi, t, step=1e-5):
    """QFI from central finite differences of the evolved state family."""
    h = np.asarray(h, dtype=complex)
    dh = np.asarray(dh, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    u_p = scipy.linalg.expm(-1j * (h + step * dh) * t)
    u_m = scipy.linalg.expm(-1j * (h - step * dh) * t)
    psi_t = scipy.linalg.expm(-1j * h * t) @ psi
    dpsi = (u_p @ psi - u_m @ psi) / (2.0 * step)
    return float(4.0 * (np.vdot(dpsi, dpsi).real - abs(np.vdot(psi_t, dpsi)) ** 2))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
