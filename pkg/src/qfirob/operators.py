"""Dense complex-Hermitian linear algebra: spectra, states, expectation values.

Matrices are plain complex ndarrays validated at the data boundary via
:func:`hermitian`; pure states are normalized complex vectors validated via
:func:`pure_state`. Everything downstream works in the energy eigenbasis
produced by :func:`eigh`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonHermitianInput

HERMITICITY_TOL = 1e-12
DEG_FACTOR = 1e-9


def hermitian(matrix) -> np.ndarray:
    """Validate and return a square Hermitian matrix as complex ndarray.

    Raises NonHermitianInput when max|M - M^dag| exceeds
    1e-12 * max|entry| (absolute 1e-12 for the zero matrix).
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    scale = np.abs(m).max()
    if np.abs(m - m.conj().T).max() > HERMITICITY_TOL * max(scale, 1.0):
        raise NonHermitianInput("matrix is not Hermitian within tolerance")
    return m


def pure_state(amplitudes) -> np.ndarray:
    """Validate and return a normalized complex state vector."""
    v = np.asarray(amplitudes, dtype=complex).ravel()
    norm2 = float(np.vdot(v, v).real)
    if abs(norm2 - 1.0) > 1e-12:
        raise DimensionMismatch(f"state norm^2 = {norm2} is not 1 within 1e-12")
    return v


def _check_dims(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and diagonalizing unitary of a Hermitian matrix."""

    eigenvalues: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def gap_threshold(self) -> float:
        """Relative threshold under which two eigenvalues count as degenerate."""
        e = self.eigenvalues
        return DEG_FACTOR * (float(e[-1] - e[0]) + 1.0)

    def reconstruct(self) -> np.ndarray:
        return (self.basis * self.eigenvalues) @ self.basis.conj().T


def eigh(matrix) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix, eigenvalues ascending."""
    m = hermitian(matrix)
    evals, basis = np.linalg.eigh(m)
    return SpectralDecomposition(eigenvalues=evals, basis=basis)


def expectation(operator, psi) -> float:
    """<psi|A|psi> for Hermitian A; asserts the imaginary residue is tiny."""
    a = np.asarray(operator, dtype=complex)
    v = np.asarray(psi, dtype=complex).ravel()
    _check_dims(a, v)
    val = complex(np.vdot(v, a @ v))
    assert abs(val.imag) < 1e-10 * max(1.0, abs(val.real)), "non-real expectation"
    return val.real


def variance(operator, psi) -> float:
    """<A^2> - <A>^2 in the state psi, clamped to zero within tolerance."""
    a = np.asarray(operator, dtype=complex)
    v = np.asarray(psi, dtype=complex).ravel()
    _check_dims(a, v)
    av = a @ v
    mean = float(np.vdot(v, av).real)
    second = float(np.vdot(av, av).real)
    var = second - mean * mean
    if var < 0.0:
        if var < -1e-10 * max(1.0, second):
            raise AssertionError(f"variance {var} below tolerance")
        var = 0.0
    return var


def evolve(psi, hamiltonian, t: float) -> np.ndarray:
    """Propagate psi with exp(-i H t) through the spectral decomposition."""
    v = np.asarray(psi, dtype=complex).ravel()
    dec = eigh(hamiltonian)
    _check_dims(dec.basis, v)
    phases = np.exp(-1j * dec.eigenvalues * t)
    return dec.basis @ (phases * (dec.basis.conj().T @ v))
