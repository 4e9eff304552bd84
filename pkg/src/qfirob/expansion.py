"""Moment expansion of the quenched-averaged QFI and the robustness report.

For a probe H = H_0 + sum_n dphi_n H_n, the sensitivity generator expands
order by order in the fluctuations. With uncorrelated zero-mean disorder,
the quenched mean of the QFI picks up only same-term contractions, giving

    mean(F) = F_0 + 4 sum_n [ q_n^(2) Gt2_n + q_n^(3) Gt3_n + ... ]

with q_n^(r) the central moments of each term's distribution and the Gt's
state expectations of the expansion matrices. The relative deviation

    g = mean(F)/F_0 - 1 = sum_n sigma_n^2 C2_n + sum_n gamma_n sigma_n^3 C3_n

defines the per-term coefficients C2_n, C3_n computed here entirely from the
clean Hamiltonian. For a disorder-sensitive probe (C2 < 0 with equal
strengths) the marker saturates at -1 when sigma reaches
sigma_max = |C2|^(-1/2), the probe's intrinsic robustness scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyGrid, MissingThirdOrder, ZeroCleanQfi
from .kernels import _coincident_plane, s_tensor, t_matrix
from .operators import eigh
from .ordered import third_order_term
from .probes import DisorderedProbeSpec, clean_hamiltonian

CLASS_EPS = 1e-10  # |C2| below this counts as disorder-immune

CLASS_DIP = "DIP"
CLASS_DSP = "DSP"
CLASS_DEP = "DEP"


@dataclass(frozen=True)
class ExpansionTerms:
    """Expansion matrices of the generator in the working basis.

    g0 is the clean generator; g1[n]/g2[n] (and optionally g3[n]) are the
    per-term matrices multiplying dphi_n, dphi_n^2, dphi_n^3 for a same-term
    fluctuation. Cross-term second-order matrices are intentionally not
    built: uncorrelated zero-mean disorder removes them from the quenched
    average, and the Monte Carlo path covers cross effects exactly.
    """

    g0: np.ndarray
    g1: tuple[np.ndarray, ...]
    g2: tuple[np.ndarray, ...]
    g3: Optional[tuple[np.ndarray, ...]] = None
    time: float = 0.0


@dataclass(frozen=True)
class RobustnessReport:
    """Per-term and total second (and optionally third) order coefficients."""

    f0: float
    c2_per_term: np.ndarray
    c2_total: float
    classification: str
    sigma_max: Optional[float] = None
    c3_per_term: Optional[np.ndarray] = None
    c3_total: Optional[float] = None
    c32: Optional[float] = None


def build_expansion(spec: DisorderedProbeSpec, order: int = 2) -> ExpansionTerms:
    """Expansion matrices from the clean spectrum via the kernel tensors.

    The second-order contraction exploits the tensors' gap recursion, so the
    four-index kernels are never materialized: memory stays O(dim^3) and the
    work is dominated by matrix products. Gap coincidences (always the
    diagonal, plus near-degenerate pairs) are patched with their exact
    limits, identical to the materialized tensors entry by entry.
    """
    if order not in (2, 3):
        raise ValueError("order must be 2 or 3")
    t = spec.encoding_time
    dec = eigh(clean_hamiltonian(spec))
    eps = dec.gap_threshold()
    basis = dec.basis
    w = basis.conj().T @ spec.dtheta_h @ basis
    v_ops = [basis.conj().T @ term.operator @ basis for term in spec.disorder_terms]

    tm = t_matrix(dec.eigenvalues, t, eps)
    st = s_tensor(dec.eigenvalues, t, eps)
    g0 = basis @ (w * tm) @ basis.conj().T

    ctx = _SecondOrderContext(dec.eigenvalues, st, t, eps)
    g1, g2 = [], []
    for v in v_ops:
        m1 = np.einsum("ik,kj,ijk->ij", v, w, st) + np.einsum(
            "ik,kj,jik->ij", w, v, st.conj())
        m2 = ctx.contract(v, w)
        g1.append(basis @ m1 @ basis.conj().T)
        g2.append(basis @ m2 @ basis.conj().T)

    g3 = None
    if order == 3:
        g3 = tuple(
            basis @ third_order_term(dec.eigenvalues, v, w, t, eps) @ basis.conj().T
            for v in v_ops
        )
    return ExpansionTerms(g0=g0, g1=tuple(g1), g2=tuple(g2), g3=g3, time=t)


class _SecondOrderContext:
    """Second-order contraction through the gap recursion of the kernels.

    For well-separated gaps the triple kernels reduce to gap-divided
    differences of the double kernel, which turns each of the three
    contraction patterns into O(dim^3) products. Pairs of levels closer than
    the degeneracy threshold are excluded from the divided differences and
    added back from the exact coincident-limit planes.
    """

    def __init__(self, energies, s_tensor_, t, eps):
        self.e = np.asarray(energies, dtype=float)
        self.s = s_tensor_
        self.sc = s_tensor_.conj()
        self.t = t
        self.eps = eps
        de = self.e[:, None] - self.e[None, :]
        near = np.abs(de) < eps
        self.inv_gap = np.where(near, 0.0, 1.0 / np.where(near, 1.0, de))
        self.near_pairs = np.argwhere(near)
        self._plane_cache: dict[tuple[int, str], np.ndarray] = {}

    def _plane(self, i: int, kind: str) -> np.ndarray:
        key = (i, kind)
        if key not in self._plane_cache:
            self._plane_cache[key] = _coincident_plane(self.e, i, self.t, self.eps, kind)
        return self._plane_cache[key]

    def contract(self, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        s, sc = self.s, self.sc
        vd = v * self.inv_gap            # V_ik / dE_ik, coincident pairs zeroed
        vdj = v * self.inv_gap           # same matrix, used over the (l, j) slots

        # pattern 1: V_ik V_kl W_lj R_ijkl with R_ijkl = (S_ijl - S_kjl)/dE_ik
        p1 = np.einsum("ijl,il,lj->ij", s, vd @ v, w)
        p1 -= vd @ np.einsum("kl,kjl,lj->kj", v, s, w)
        # pattern 2: V_ik W_kl V_lj conj(Rbar_ijkl), Rbar_ijkl = (S_lij - S_lkj)/dE_ik
        p2 = np.einsum("lij,il,lj->ij", sc, vd @ w, v)
        p2 -= vd @ np.einsum("kl,lkj,lj->kj", w, sc, v)
        # pattern 3: W_ik V_kl V_lj conj(R_lijk), R_lijk = (S_lik - S_jik)/dE_lj
        p3 = np.einsum("ik,kl,lik->il", w, v, sc) @ vdj
        p3 -= np.einsum("ik,jik,kj->ij", w, sc, v @ vdj)

        out = p1 + p2 + p3
        for i, k in self.near_pairs:
            plane_r = self._plane(i, "R")
            plane_rb = self._plane(i, "Rbar")
            # patterns 1 and 2 coincide in the (i, k) slots
            out[i] += v[i, k] * np.einsum("l,lj,jl->j", v[k], w, plane_r)
            out[i] += v[i, k] * np.einsum("l,lj,jl->j", w[k], v, plane_rb.conj())
            # pattern 3 coincides in the (l, j) slots; reuse (i, k) as (l, j)
            l, j = i, k
            plane_l = self._plane(l, "R")
            out[:, j] += v[l, j] * np.einsum("ik,k,ik->i", w, v[:, l], plane_l.conj())
        return out


def tilde_g1(terms: ExpansionTerms, psi_or_expect, n: int) -> float:
    """First-order expectation combination for term n."""
    ex = _as_expectations(psi_or_expect)
    g0, g1 = terms.g0, terms.g1[n]
    val = 2.0 * ex.pair(g0, g1).real - 2.0 * ex.mean(g0) * ex.mean(g1)
    return float(val)


def tilde_g2(terms: ExpansionTerms, psi_or_expect, n: int) -> float:
    """Same-term second-order expectation combination for term n."""
    ex = _as_expectations(psi_or_expect)
    g0, g1, g2 = terms.g0, terms.g1[n], terms.g2[n]
    val = (
        ex.pair(g1, g1)
        + ex.pair(g0, g2)
        + ex.pair(g2, g0)
        - 2.0 * ex.mean(g0) * ex.mean(g2)
        - ex.mean(g1) ** 2
    )
    assert abs(val.imag) < 1e-9 * max(1.0, abs(val.real)), "non-real expectation combo"
    return float(val.real)


def tilde_g3(terms: ExpansionTerms, psi_or_expect, n: int) -> float:
    """Same-term third-order expectation combination for term n."""
    if terms.g3 is None:
        raise MissingThirdOrder("expansion was built with order=2")
    ex = _as_expectations(psi_or_expect)
    g0, g1, g2, g3 = terms.g0, terms.g1[n], terms.g2[n], terms.g3[n]
    val = (
        ex.pair(g0, g3)
        + ex.pair(g3, g0)
        + ex.pair(g1, g2)
        + ex.pair(g2, g1)
        - 2.0 * ex.mean(g0) * ex.mean(g3)
        - 2.0 * ex.mean(g1) * ex.mean(g2)
    )
    assert abs(val.imag) < 1e-9 * max(1.0, abs(val.real)), "non-real expectation combo"
    return float(val.real)


def _as_expectations(psi_or_expect):
    if hasattr(psi_or_expect, "pair"):
        return psi_or_expect
    from .expectations import StateExpectations

    return StateExpectations(psi_or_expect)


def robustness_report(spec: DisorderedProbeSpec, order: int = 2) -> RobustnessReport:
    """C coefficients, classification and robustness scale of a probe."""
    terms = build_expansion(spec, order=order)
    ex = spec.state_expectations()
    return report_from_terms(terms, ex)


def report_from_terms(terms: ExpansionTerms, expectations) -> RobustnessReport:
    f0 = 4.0 * (expectations.pair(terms.g0, terms.g0).real - expectations.mean(terms.g0) ** 2)
    if f0 <= 1e-14:
        raise ZeroCleanQfi("clean QFI vanishes; the disorder marker is undefined")
    c2 = np.array([4.0 * tilde_g2(terms, expectations, n) / f0 for n in range(len(terms.g1))])
    c2_total = float(c2.sum())
    if abs(c2_total) < CLASS_EPS:
        classification, sigma_max = CLASS_DIP, None
    elif c2_total > 0:
        classification, sigma_max = CLASS_DEP, None
    else:
        classification, sigma_max = CLASS_DSP, float(1.0 / np.sqrt(abs(c2_total)))
    c3 = c3_total = c32 = None
    if terms.g3 is not None:
        c3 = np.array([4.0 * tilde_g3(terms, expectations, n) / f0 for n in range(len(terms.g3))])
        c3_total = float(c3.sum())
        c32 = float(c3_total / c2_total) if abs(c2_total) >= CLASS_EPS else None
    return RobustnessReport(
        f0=float(f0),
        c2_per_term=c2,
        c2_total=c2_total,
        classification=classification,
        sigma_max=sigma_max,
        c3_per_term=c3,
        c3_total=c3_total,
        c32=c32,
    )


def predicted_marker(report: RobustnessReport, sigmas: Sequence[float],
                     gammas: Optional[Sequence[float]] = None) -> float:
    """Second-order marker sum_n sigma_n^2 C2_n, plus the skewness correction."""
    sigmas = np.asarray(sigmas, dtype=float)
    if len(sigmas) != len(report.c2_per_term):
        raise DimensionMismatch("sigma vector length does not match term count")
    g = float(np.sum(sigmas**2 * report.c2_per_term))
    if gammas is not None:
        if report.c3_per_term is None:
            raise MissingThirdOrder("report lacks third-order coefficients")
        gammas = np.asarray(gammas, dtype=float)
        if len(gammas) != len(report.c2_per_term):
            raise DimensionMismatch("gamma vector length does not match term count")
        g += float(np.sum(gammas * sigmas**3 * report.c3_per_term))
    return g


def optimize_resilience(spec: DisorderedProbeSpec,
                        state_family: Callable[[object], np.ndarray],
                        grid: Sequence) -> tuple[object, float]:
    """Exhaustive search for the family member minimizing |marker|.

    The expansion matrices depend only on the clean Hamiltonian, so they are
    built once and re-evaluated per state; disorder strengths are taken from
    the spec's term distributions.
    """
    grid = list(grid)
    if not grid:
        raise EmptyGrid("parameter grid is empty")
    terms = build_expansion(spec, order=2)
    sigmas = spec.sigmas()
    best_param, best_val = None, np.inf
    for param in grid:
        psi = state_family(param)
        ex = _as_expectations(psi)
        f0 = 4.0 * (ex.pair(terms.g0, terms.g0).real - ex.mean(terms.g0) ** 2)
        if f0 <= 1e-14:
            continue
        g = sum(
            sigmas[n] ** 2 * 4.0 * tilde_g2(terms, ex, n) / f0
            for n in range(spec.n_terms)
        )
        if abs(g) < best_val:
            best_param, best_val = param, abs(g)
    if best_param is None:
        raise ZeroCleanQfi("clean QFI vanished for every grid state")
    return best_param, float(best_val)
