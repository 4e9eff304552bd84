"""Exact sensitivity generator and quantum Fisher information for pure states.

The generator of parameter sensitivity for evolution exp(-i H t) is
G = int_0^t U_s^dag (dH/dtheta) U_s ds. In the eigenbasis of H its matrix
elements are the derivative operator's elements multiplied by the phase
integral t_kernel(E_i - E_j); the QFI is four times the variance of G in the
initial state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .operators import eigh, hermitian, variance


def phase_integral(gaps: np.ndarray, t: float, eps: float) -> np.ndarray:
    """int_0^t exp(i * gap * s) ds with the exact degenerate limit t."""
    gaps = np.asarray(gaps, dtype=float)
    mask = np.abs(gaps) < eps
    safe = np.where(mask, 1.0, gaps)
    return np.where(mask, t, -1j * (np.exp(1j * gaps * t) - 1.0) / safe)


@dataclass(frozen=True)
class QfigResult:
    """Sensitivity generator G (Hermitian) for encoding time t."""

    generator: np.ndarray
    time: float


def qfig_exact(hamiltonian, dtheta_h, t: float) -> QfigResult:
    """Exact generator for arbitrary Hermitian H and dH/dtheta."""
    if t <= 0:
        raise ValueError("encoding time must be positive")
    dh = hermitian(dtheta_h)
    dec = eigh(hamiltonian)
    if dec.dim != dh.shape[0]:
        raise DimensionMismatch("H and dH/dtheta dimensions differ")
    gaps = dec.eigenvalues[:, None] - dec.eigenvalues[None, :]
    tk = phase_integral(gaps, t, dec.gap_threshold())
    dh_tilde = dec.basis.conj().T @ dh @ dec.basis
    gen = dec.basis @ (dh_tilde * tk) @ dec.basis.conj().T
    gen = 0.5 * (gen + gen.conj().T)  # scrub rounding asymmetry
    return QfigResult(generator=gen, time=t)


def qfi(psi, g: QfigResult) -> float:
    """Quantum Fisher information 4 * Var_psi(G)."""
    return 4.0 * variance(g.generator, psi)


def qfig_batch(hamiltonians: np.ndarray, dtheta_h: np.ndarray, t: float) -> np.ndarray:
    """Generators for a stack of Hamiltonians (n, d, d) in one batched pass.

    Entrywise identical to mapping :func:`qfig_exact` over the stack; used by
    the Monte Carlo loop where per-matrix Python overhead would dominate.
    """
    from .operators import DEG_FACTOR

    h = np.asarray(hamiltonians, dtype=complex)
    dh = np.asarray(dtheta_h, dtype=complex)
    evals, vecs = np.linalg.eigh(h)
    gaps = evals[:, :, None] - evals[:, None, :]
    eps = (DEG_FACTOR * (evals[:, -1] - evals[:, 0] + 1.0))[:, None, None]
    mask = np.abs(gaps) < eps
    tk = np.where(mask, t, -1j * (np.exp(1j * gaps * t) - 1.0) / np.where(mask, 1.0, gaps))
    vh = vecs.conj().transpose(0, 2, 1)
    gen = vecs @ ((vh @ dh @ vecs) * tk) @ vh
    return 0.5 * (gen + gen.conj().transpose(0, 2, 1))


def optimal_state(g: QfigResult, beta: float = 0.0) -> np.ndarray:
    """Equal superposition of extremal eigenvectors of G with relative phase.

    Within a degenerate extremal subspace the first eigenvector is taken,
    phase-fixed so its largest-magnitude component is real positive, which
    makes the output deterministic.
    """
    dec = eigh(g.generator)
    lo = _phase_fixed(dec.basis[:, 0])
    hi = _phase_fixed(dec.basis[:, -1])
    return (lo + np.exp(1j * beta) * hi) / np.sqrt(2.0)


def _phase_fixed(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec)))
    phase = vec[k] / abs(vec[k])
    return vec / phase
