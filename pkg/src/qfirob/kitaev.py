"""Disordered 1D fermion chain probe: quadratic-form numerics and oracle.

The chain Hamiltonian with nearest-neighbor hopping tau_i, pairing eta_i and
uniform chemical potential mu (the parameter to estimate, open boundaries)
is quadratic in fermions, H = (1/2) c^dag M c in the doubled single-particle
(Nambu) space. The sensitivity generator stays quadratic for every disorder
realization, so all state moments of the GHZ initial state reduce to traces
over 2N x 2N matrices through Wick contractions of the vacuum and filled
sectors. A dense 2^N spin-space construction of the same chain provides the
exact-diagonalization oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidSize, LengthMismatch, TooLarge
from .expansion import RobustnessReport, build_expansion, report_from_terms
from .probes import DisorderDistribution, DisorderRealization, DisorderTerm, DisorderedProbeSpec
from .qfi import QfigResult, qfig_exact


@dataclass(frozen=True)
class KitaevParams:
    """Chain size, couplings, disorder strengths and encoding time."""

    n: int
    mu: float
    tau0: np.ndarray
    eta0: np.ndarray
    sigma_tau: float = 0.0
    sigma_eta: float = 0.0
    t: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise InvalidSize("need at least two sites")
        if self.t <= 0:
            raise ValueError("encoding time must be positive")
        tau = np.broadcast_to(np.asarray(self.tau0, dtype=float).ravel(), (self.n - 1,)).copy() \
            if np.ndim(self.tau0) == 0 else np.asarray(self.tau0, dtype=float)
        eta = np.broadcast_to(np.asarray(self.eta0, dtype=float).ravel(), (self.n - 1,)).copy() \
            if np.ndim(self.eta0) == 0 else np.asarray(self.eta0, dtype=float)
        if len(tau) != self.n - 1 or len(eta) != self.n - 1:
            raise LengthMismatch("coupling vectors must have length n - 1")
        object.__setattr__(self, "tau0", tau)
        object.__setattr__(self, "eta0", eta)


@dataclass(frozen=True)
class BdGModel:
    """Single-particle blocks and the doubled-space matrices."""

    A: np.ndarray
    B: np.ndarray
    M: np.ndarray
    M_mu: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.A.shape[0]


def build_bdg(p: KitaevParams, delta_tau: Optional[Sequence[float]] = None,
              delta_eta: Optional[Sequence[float]] = None) -> BdGModel:
    """Assemble A, B and M for couplings tau0 + delta_tau, eta0 + delta_eta."""
    n = p.n
    for delta in (delta_tau, delta_eta):
        if delta is not None and len(np.atleast_1d(delta)) != n - 1:
            raise LengthMismatch("fluctuation vectors must have length n - 1")
    tau = p.tau0 + (0.0 if delta_tau is None else np.asarray(delta_tau, dtype=float))
    eta = p.eta0 + (0.0 if delta_eta is None else np.asarray(delta_eta, dtype=float))
    a = np.zeros((n, n))
    b = np.zeros((n, n))
    for i in range(n - 1):
        a[i, i + 1] = a[i + 1, i] = -tau[i]
        b[i, i + 1] = -eta[i]
        b[i + 1, i] = eta[i]
    a -= p.mu * np.eye(n)
    m = np.block([[a, b], [-b, -a]]).astype(complex)
    return BdGModel(A=a, B=b, M=m, M_mu=chemical_potential_generator(n))


def chemical_potential_generator(n: int) -> np.ndarray:
    """Doubled-space matrix of -sum_i (n_i - 1/2), i.e. dH/dmu."""
    return np.diag(np.concatenate([-np.ones(n), np.ones(n)])).astype(complex)


def bond_operators(n: int) -> tuple[list, list]:
    """Doubled-space derivative matrices dM/dtau_i and dM/deta_i."""
    zero = np.zeros((n, n))
    tau_ops, eta_ops = [], []
    for i in range(n - 1):
        a = np.zeros((n, n))
        a[i, i + 1] = a[i + 1, i] = -1.0
        tau_ops.append(np.block([[a, zero], [zero, -a]]).astype(complex))
    for i in range(n - 1):
        b = np.zeros((n, n))
        b[i, i + 1] = -1.0
        b[i + 1, i] = 1.0
        eta_ops.append(np.block([[zero, b], [-b, zero]]).astype(complex))
    return tau_ops, eta_ops


@dataclass(frozen=True)
class NambuJ:
    """Doubled-space matrix of the sensitivity generator, G = (1/2) c^dag J c."""

    J: np.ndarray
    time: float


def qfig_j(model: BdGModel, t: float) -> NambuJ:
    """J = int_0^t e^{iMs} M_mu e^{-iMs} ds via the spectral phase integral."""
    res: QfigResult = qfig_exact(model.M, model.M_mu, t)
    return NambuJ(J=res.generator, time=t)


# ---------------------------------------------------------------------------
# GHZ-state moments through sector correlation matrices
# ---------------------------------------------------------------------------

class GhzWickExpectations:
    """Moments of quadratic observables in the vacuum/filled superposition.

    Valid for n > 4, where products of two quadratic operators cannot bridge
    the two particle-number sectors. Observables are passed as their doubled
    space matrices X, representing (1/2) c^dag X c.
    """

    def __init__(self, n: int):
        if n <= 4:
            raise InvalidSize("sector-split moments need more than four sites")
        self.n = n
        eye, zero = np.eye(n), np.zeros((n, n))
        self._r = {
            "v": np.block([[eye, zero], [zero, zero]]),
            "f": np.block([[zero, zero], [zero, eye]]),
        }

    def _sector_mean(self, a, sector: str) -> complex:
        r = self._r[sector]
        return 0.5 * np.trace(a @ (np.eye(2 * self.n) - r))

    def _sector_pair(self, a, b, sector: str) -> complex:
        n = self.n
        r = self._r[sector]
        eye = np.eye(2 * n)
        t1 = np.trace(a @ (eye - r)) * np.trace(b @ (eye - r))
        t2 = np.trace(b @ (eye - r) @ a @ r)
        if sector == "v":
            t3 = np.sum(a[n:, :n] * b[:n, n:])
        else:
            t3 = np.sum(a[:n, n:] * b[n:, :n])
        return 0.25 * (t1 + t2 - t3)

    def mean(self, a) -> float:
        val = 0.5 * (self._sector_mean(a, "v") + self._sector_mean(a, "f"))
        return float(val.real)

    def pair(self, a, b) -> complex:
        return 0.5 * (self._sector_pair(a, b, "v") + self._sector_pair(a, b, "f"))

    def variance(self, a) -> float:
        mv = self._sector_mean(a, "v").real
        mf = self._sector_mean(a, "f").real
        vv = self._sector_pair(a, a, "v").real - mv * mv
        vf = self._sector_pair(a, a, "f").real - mf * mf
        return float(0.5 * (vv + vf) + 0.25 * (mv - mf) ** 2)

    def variance_batch(self, stack: np.ndarray) -> np.ndarray:
        """Variances for a stack of doubled-space observables (m, 2n, 2n)."""
        n = self.n
        occ_v = np.concatenate([np.ones(n), np.zeros(n)])  # diag of R_v
        occ_f = 1.0 - occ_v
        diag = np.einsum("mkk->mk", stack)
        mv = 0.5 * np.einsum("mk,k->m", diag, 1.0 - occ_v).real
        mf = 0.5 * np.einsum("mk,k->m", diag, 1.0 - occ_f).real
        t2v = np.einsum("mij,j,mji,i->m", stack, 1.0 - occ_v, stack, occ_v)
        t2f = np.einsum("mij,j,mji,i->m", stack, 1.0 - occ_f, stack, occ_f)
        anom_v = np.einsum("mab,mab->m", stack[:, n:, :n], stack[:, :n, n:])
        anom_f = np.einsum("mab,mab->m", stack[:, :n, n:], stack[:, n:, :n])
        # per sector, pair(a,a) - mean^2 reduces to (t2 - anomalous)/4
        vv = 0.25 * (t2v - anom_v).real
        vf = 0.25 * (t2f - anom_f).real
        return 0.5 * (vv + vf) + 0.25 * (mv - mf) ** 2


def ghz_mean_var(j: NambuJ, n: int) -> tuple[float, float]:
    """Mean and variance of the generator in the GHZ state; QFI = 4 * var."""
    ex = GhzWickExpectations(n)
    return ex.mean(j.J), ex.variance(j.J)


# ---------------------------------------------------------------------------
# Probe spec in the doubled space and the robustness report
# ---------------------------------------------------------------------------

def kitaev_spec(p: KitaevParams) -> DisorderedProbeSpec:
    """Chain probe as a generic disordered spec over doubled-space matrices.

    All expansion and averaging machinery applies unchanged because the
    generator map M -> J shares the clean generator's integral form and the
    GHZ moments are supplied by the Wick provider.
    """
    clean = build_bdg(p)
    m_mu = clean.M_mu
    tau_ops, eta_ops = bond_operators(p.n)
    terms = []
    for i, op in enumerate(tau_ops):
        terms.append(DisorderTerm(
            operator=op,
            distribution=DisorderDistribution("gaussian", mean=p.tau0[i], sigma=p.sigma_tau),
            label=f"tau_{i + 1}",
        ))
    for i, op in enumerate(eta_ops):
        terms.append(DisorderTerm(
            operator=op,
            distribution=DisorderDistribution("gaussian", mean=p.eta0[i], sigma=p.sigma_eta),
            label=f"eta_{i + 1}",
        ))
    return DisorderedProbeSpec(
        h_theta=p.mu * m_mu,
        dtheta_h=m_mu,
        clean_rest=clean.M - p.mu * m_mu,
        disorder_terms=tuple(terms),
        encoding_time=p.t,
        initial_state=None,
        expectations=GhzWickExpectations(p.n),
    )


def kitaev_robustness(p: KitaevParams, order: int = 2) -> RobustnessReport:
    """Robustness report of the chain probe in the GHZ state."""
    if p.n <= 4:
        raise InvalidSize("sector-split moments need more than four sites")
    spec = kitaev_spec(p)
    terms = build_expansion(spec, order=order)
    return report_from_terms(terms, spec.expectations)


def plane_scan(n: int, mu: float, t: float, tau_values: Sequence[float],
               eta_values: Sequence[float]) -> np.ndarray:
    """Total second-order coefficient over a (tau0, eta0) grid.

    Returns C2[i, j] for tau_values[i], eta_values[j]; the zero contour
    separates enhancement from sensitivity regions.
    """
    out = np.empty((len(tau_values), len(eta_values)))
    for i, tau in enumerate(tau_values):
        for j, eta in enumerate(eta_values):
            rep = kitaev_robustness(KitaevParams(n=n, mu=mu, tau0=float(tau),
                                                 eta0=float(eta), t=t))
            out[i, j] = rep.c2_total
    return out


# ---------------------------------------------------------------------------
# Dense spin-space oracle
# ---------------------------------------------------------------------------

JW_MAX_SITES = 12

_LOWER = np.array([[0, 1], [0, 0]], dtype=complex)   # kills |1>, occupation 1 -> 0
_NUMBER = _LOWER.conj().T @ _LOWER
_EYE2 = np.eye(2, dtype=complex)


def _chain_op(ops: dict[int, np.ndarray], n: int) -> np.ndarray:
    mats = [ops.get(i, _EYE2) for i in range(n)]
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def jw_dense_hamiltonian(p: KitaevParams,
                         realization: Optional[DisorderRealization] = None) -> np.ndarray:
    """Dense 2^n spin-space matrix of the chain via the string mapping.

    With site occupation identified with the computational-basis bit, the
    string operators reduce nearest-neighbor terms to two-site products:
    c_i^dag c_{i+1} -> a_i^dag a_{i+1} and c_{i+1}^dag c_i^dag -> -a_i^dag
    a_{i+1}^dag. ``realization`` holds fluctuations ordered as in
    :func:`kitaev_spec` (all tau bonds, then all eta bonds).
    """
    n = p.n
    if n > JW_MAX_SITES:
        raise TooLarge(f"dense construction supported up to {JW_MAX_SITES} sites")
    tau = p.tau0.copy()
    eta = p.eta0.copy()
    if realization is not None:
        deltas = np.asarray(realization.deltas, dtype=float)
        if len(deltas) != 2 * (n - 1):
            raise LengthMismatch("expected tau and eta fluctuations for every bond")
        tau = tau + deltas[: n - 1]
        eta = eta + deltas[n - 1:]
    dim = 2**n
    h = np.zeros((dim, dim), dtype=complex)
    raise_op = _LOWER.conj().T
    for i in range(n - 1):
        hop = _chain_op({i: raise_op, i + 1: _LOWER}, n)
        h += -tau[i] * (hop + hop.conj().T)
        pair = _chain_op({i: raise_op, i + 1: raise_op}, n)
        h += -eta[i] * (pair + pair.conj().T)
    for i in range(n):
        h += -p.mu * (_chain_op({i: _NUMBER}, n) - 0.5 * np.eye(dim))
    return h


def jw_dmu(n: int) -> np.ndarray:
    """Dense spin-space matrix of dH/dmu = -sum_i (n_i - 1/2)."""
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    for i in range(n):
        out -= _chain_op({i: _NUMBER}, n) - 0.5 * np.eye(dim)
    return out


def ghz_state(n: int) -> np.ndarray:
    """(|0...0> + |1...1>)/sqrt(2) in the computational basis."""
    v = np.zeros(2**n, dtype=complex)
    v[0] = v[-1] = 1.0 / np.sqrt(2.0)
    return v


def free_fermion_spectrum(model: BdGModel) -> np.ndarray:
    """Sorted many-body spectrum from the positive quasiparticle modes."""
    lam = np.linalg.eigvalsh(model.M)
    pos = lam[lam > 0]
    energies = np.zeros(1)
    for lk in pos:
        energies = np.concatenate([energies - 0.5 * lk, energies + 0.5 * lk])
    return np.sort(energies)
