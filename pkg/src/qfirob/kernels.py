"""Time-ordered phase-integral kernels over a fixed spectrum.

Given the eigenvalues E_k of the clean Hamiltonian and the encoding time t,
these kernels tabulate the single, double and triple nested integrals of
energy-gap phases that appear in the perturbative expansion of the
sensitivity generator:

    T_ij      ~ int_0^t e^{i dE_ij s} ds
    S_ijk     ~ i int_0^t ds e^{i dE_kj s} int_0^s ds1 e^{i dE_ik s1}
    R, Rbar   ~ the two independent triple integrals at second order

Every coincidence of gaps (decided by a relative threshold, not index
equality) is handled by its exact analytic limit, so degenerate spectra are
safe. Full tensors are materialized only up to MATERIALIZE_LIMIT; larger
problems stream R/Rbar slices through :func:`r_slice` / :func:`rbar_slice`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import SpectralDecomposition

MATERIALIZE_LIMIT = 64


def t_matrix(energies: np.ndarray, t: float, eps: float) -> np.ndarray:
    de = energies[:, None] - energies[None, :]
    mask = np.abs(de) < eps
    safe = np.where(mask, 1.0, de)
    return np.where(mask, t, -1j * (np.exp(1j * de * t) - 1.0) / safe)


def s_tensor(energies: np.ndarray, t: float, eps: float) -> np.ndarray:
    """S[i, j, k] with branches on the gaps dE_ik and dE_ij."""
    d = len(energies)
    de = energies[:, None] - energies[None, :]
    tm = t_matrix(energies, t, eps)

    dik = np.broadcast_to(de[:, None, :], (d, d, d))
    dij = np.broadcast_to(de[:, :, None], (d, d, d))
    tij = np.broadcast_to(tm[:, :, None], (d, d, d))
    tkj = np.broadcast_to(tm.T[None, :, :], (d, d, d))

    near_ik = np.abs(dik) < eps
    near_ij = np.abs(dij) < eps

    safe_ik = np.where(near_ik, 1.0, dik)
    generic = (tij - tkj) / safe_ik

    safe_ij = np.where(near_ij, 1.0, dij)
    eij = np.exp(1j * dij * t)
    equal_ik = (t * dij * eij + 1j * (eij - 1.0)) / safe_ij**2

    return np.where(near_ik, np.where(near_ij, 1j * t * t / 2.0, equal_ik), generic)


def _coincident_plane(energies, i, t, eps, kind):
    """R/Rbar values over (j, l) for a coincident pair dE_ik ~ 0."""
    de_ij = energies[i] - energies  # (j,)
    de_il = energies[i] - energies  # (l,)
    dij = de_ij[:, None]
    dil = de_il[None, :]
    djl = energies[:, None] - energies[None, :]

    nij = np.abs(dij) >= eps
    nil_ = np.abs(dil) >= eps
    njl = np.abs(djl) >= eps

    sij = np.where(nij, dij, 1.0)
    sil = np.where(nil_, dil, 1.0)
    sjl = np.where(njl, djl, 1.0)

    if kind == "R":
        full = (
            1j * np.exp(-1j * djl * t) * sij**2
            - 1j * sil**2
            + np.exp(1j * sij * t) * sjl * (1j * (sij + sil) + sij * sil * t)
        ) / (sij**2 * sil**2 * sjl)
        dli = -sil
        j_eq_l = (2j + dli * t + np.exp(1j * sil * t) * (dli * t - 2j)) / dli**3
        i_eq_l = 1j * (2 + np.exp(1j * sij * t) * (-2 + 2j * t * sij + sij**2 * t * t)) / (2 * sij**3)
        i_eq_j = 1j * t * t / (2 * sil) - (1j * (1 - np.exp(-1j * sil * t)) + sil * t) / sil**3
        all_eq = -(t**3) / 6.0
    else:
        full = (
            1j * (sij + sil) * sjl
            + np.exp(-1j * sij * t) * sil**2 * (-1j + sij * t)
            + np.exp(-1j * sil * t) * sij**2 * (1j - sil * t)
        ) / (sij**2 * sil**2 * sjl)
        dli = -sil
        j_eq_l = 1j * (2 + np.exp(1j * dli * t) * (-2 + 2j * t * dli + dli**2 * t * t)) / sil**3
        i_eq_l = (2 * np.exp(-1j * sij * t) * (1j - sij * t) - 1j * (2 + sij**2 * t * t)) / (2 * sij**3)
        i_eq_j = (2 * np.exp(-1j * sil * t) * (1j - sil * t) - 1j * (2 + sil**2 * t * t)) / (2 * sil**3)
        all_eq = t**3 / 3.0

    conds = [
        nij & nil_ & njl,
        nij & nil_ & ~njl,
        nij & ~nil_,
        ~nij & nil_,
    ]
    choices = [full, j_eq_l, i_eq_l, i_eq_j]
    return np.select(conds, choices, default=all_eq)


def r_slice(energies, s_tensor_, i, t, eps):
    """R[i, :, :, :] over (j, k, l), generic branch (S_ijl - S_kjl)/dE_ik."""
    d = len(energies)
    out = np.empty((d, d, d), dtype=complex)
    dik = energies[i] - energies
    for k in range(d):
        if abs(dik[k]) >= eps:
            out[:, k, :] = (s_tensor_[i] - s_tensor_[k]) / dik[k]
        else:
            out[:, k, :] = _coincident_plane(energies, i, t, eps, "R")
    return out


def rbar_slice(energies, s_tensor_, i, t, eps):
    """Rbar[i, :, :, :] over (j, k, l), generic branch (S_lij - S_lkj)/dE_ik."""
    d = len(energies)
    out = np.empty((d, d, d), dtype=complex)
    dik = energies[i] - energies
    for k in range(d):
        if abs(dik[k]) >= eps:
            out[:, k, :] = (s_tensor_[:, i, :] - s_tensor_[:, k, :]).T / dik[k]
        else:
            out[:, k, :] = _coincident_plane(energies, i, t, eps, "Rbar")
    return out


@dataclass(frozen=True)
class KernelTensors:
    """Materialized phase-integral kernels for one spectrum and time."""

    T: np.ndarray
    S: np.ndarray
    R: np.ndarray
    Rbar: np.ndarray
    time: float


def build_kernels(decomposition: SpectralDecomposition, t: float) -> KernelTensors:
    """Materialize all kernels; memory is O(dim^4), capped at MATERIALIZE_LIMIT."""
    if t <= 0:
        raise ValueError("encoding time must be positive")
    d = decomposition.dim
    if d > MATERIALIZE_LIMIT:
        raise ValueError(
            f"kernel tensors are materialized only up to dim {MATERIALIZE_LIMIT}; "
            "use the streaming slices instead"
        )
    e = decomposition.eigenvalues
    eps = decomposition.gap_threshold()
    tm = t_matrix(e, t, eps)
    st = s_tensor(e, t, eps)
    r = np.empty((d, d, d, d), dtype=complex)
    rb = np.empty((d, d, d, d), dtype=complex)
    for i in range(d):
        r[i] = r_slice(e, st, i, t, eps)
        rb[i] = rbar_slice(e, st, i, t, eps)
    return KernelTensors(T=tm, S=st, R=r, Rbar=rb, time=t)
