"""Disordered probe Hamiltonians H = H_0 + sum_n dphi_n H_n and their sampling.

A probe is a clean Hamiltonian (the parameter-carrying term plus the rest),
a list of disorder terms with per-term fluctuation distributions, an encoding
time, and an initial state. Sampling draws the zero-mean fluctuations
dphi_n; the distribution means are already part of the clean Hamiltonian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, UnsupportedOrder
from .expectations import StateExpectations
from .operators import hermitian, pure_state

_SKEW_CONST = (4.0 - math.pi) / 2.0
# largest |skewness| a skew-normal can represent (|shape| -> infinity)
MAX_SKEWNESS = _SKEW_CONST * (2.0 / (math.pi - 2.0)) ** 1.5


@dataclass(frozen=True)
class DisorderDistribution:
    """Per-term fluctuation law with mean, standard deviation and skewness."""

    kind: str  # 'gaussian' | 'uniform' | 'skew_normal'
    mean: float = 0.0
    sigma: float = 0.0
    skewness: float = 0.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "uniform", "skew_normal"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.kind != "skew_normal" and self.skewness != 0.0:
            raise ValueError(f"{self.kind} distributions carry zero skewness")
        if self.kind == "skew_normal" and abs(self.skewness) >= MAX_SKEWNESS:
            raise ValueError(f"|skewness| must be < {MAX_SKEWNESS:.6f}")

    def _skew_shape(self) -> tuple[float, float]:
        """(delta, omega): shape and scale solving the target (sigma, skewness)."""
        g = self.skewness
        if g == 0.0:
            return 0.0, self.sigma
        r = (abs(g) / _SKEW_CONST) ** (2.0 / 3.0)
        s2 = r / (1.0 + r) * (math.pi / 2.0)
        delta = math.copysign(math.sqrt(s2), g)
        omega = self.sigma / math.sqrt(1.0 - 2.0 * delta * delta / math.pi)
        return delta, omega

    def sample(self, rng: np.random.Generator, size=None) -> np.ndarray:
        """Draw zero-mean fluctuations dphi = phi - mean."""
        if self.sigma == 0.0:
            return np.zeros(size if size is not None else ())
        if self.kind == "gaussian":
            return rng.normal(0.0, self.sigma, size=size)
        if self.kind == "uniform":
            half = math.sqrt(3.0) * self.sigma
            return rng.uniform(-half, half, size=size)
        delta, omega = self._skew_shape()
        z0 = np.abs(rng.normal(size=size))
        z1 = rng.normal(size=size)
        raw = omega * (delta * z0 + math.sqrt(1.0 - delta * delta) * z1)
        return raw - omega * delta * math.sqrt(2.0 / math.pi)


def central_moment(dist: DisorderDistribution, r: int) -> float:
    """r-th central moment: 0, sigma^2, skewness*sigma^3 for r = 1, 2, 3."""
    if r == 1:
        return 0.0
    if r == 2:
        return dist.sigma**2
    if r == 3:
        return dist.skewness * dist.sigma**3
    raise UnsupportedOrder(f"central moments implemented for r in 1..3, got {r}")


@dataclass(frozen=True)
class DisorderTerm:
    """One fluctuating operator with its distribution."""

    operator: np.ndarray
    distribution: DisorderDistribution
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "operator", hermitian(self.operator))


@dataclass(frozen=True)
class DisorderRealization:
    """One draw of fluctuations, aligned with the spec's disorder terms."""

    deltas: np.ndarray
    seed_index: int = 0


@dataclass(frozen=True)
class DisorderedProbeSpec:
    """Full description of a disordered probe.

    ``h_theta`` is the parameter-carrying term already multiplied by its mean
    value; ``dtheta_h`` its parameter derivative; ``clean_rest`` collects the
    remaining mean terms. ``expectations`` optionally overrides how state
    moments are evaluated (used by the free-fermion chain probe, where the
    operator matrices live in Nambu space).
    """

    h_theta: np.ndarray
    dtheta_h: np.ndarray
    clean_rest: np.ndarray
    disorder_terms: tuple[DisorderTerm, ...]
    encoding_time: float
    initial_state: Optional[np.ndarray] = None
    expectations: object = None

    def __post_init__(self):
        object.__setattr__(self, "h_theta", hermitian(self.h_theta))
        object.__setattr__(self, "dtheta_h", hermitian(self.dtheta_h))
        object.__setattr__(self, "clean_rest", hermitian(self.clean_rest))
        object.__setattr__(self, "disorder_terms", tuple(self.disorder_terms))
        if self.encoding_time <= 0:
            raise ValueError("encoding_time must be positive")
        dim = self.h_theta.shape[0]
        for m in (self.dtheta_h, self.clean_rest):
            if m.shape[0] != dim:
                raise DimensionMismatch("operator dimensions differ")
        for term in self.disorder_terms:
            if term.operator.shape[0] != dim:
                raise DimensionMismatch(f"term {term.label!r} has wrong dimension")
        if self.initial_state is not None:
            state = pure_state(self.initial_state)
            if state.shape[0] != dim:
                raise DimensionMismatch("initial state has wrong dimension")
            object.__setattr__(self, "initial_state", state)
        elif self.expectations is None:
            raise ValueError("need an initial state or an expectations provider")

    @property
    def dim(self) -> int:
        return self.h_theta.shape[0]

    @property
    def n_terms(self) -> int:
        return len(self.disorder_terms)

    def sigmas(self) -> np.ndarray:
        return np.array([t.distribution.sigma for t in self.disorder_terms])

    def state_expectations(self):
        if self.expectations is not None:
            return self.expectations
        return StateExpectations(self.initial_state)


def clean_hamiltonian(spec: DisorderedProbeSpec) -> np.ndarray:
    """Disorder-free Hamiltonian H_0 = h_theta + clean_rest."""
    return spec.h_theta + spec.clean_rest


def sample_realization(spec: DisorderedProbeSpec, master_seed: int, index: int) -> DisorderRealization:
    """Draw the fluctuation vector for realization ``index``.

    Seeding is counter-based on (master_seed, index), so realizations are
    reproducible independently of execution order or thread count.
    """
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    rng = np.random.default_rng(seq)
    deltas = np.array([term.distribution.sample(rng) for term in spec.disorder_terms])
    return DisorderRealization(deltas=deltas, seed_index=index)


def realized_hamiltonian(spec: DisorderedProbeSpec, realization: DisorderRealization) -> np.ndarray:
    """H_0 plus the sampled fluctuation operators."""
    if len(realization.deltas) != spec.n_terms:
        raise DimensionMismatch("realization length does not match term count")
    h = clean_hamiltonian(spec).copy()
    for delta, term in zip(realization.deltas, spec.disorder_terms):
        h += delta * term.operator
    return h


def with_sigmas(spec: DisorderedProbeSpec, sigmas: Sequence[float]) -> DisorderedProbeSpec:
    """Copy of the spec with per-term standard deviations replaced."""
    if len(sigmas) != spec.n_terms:
        raise DimensionMismatch("sigma vector length does not match term count")
    terms = tuple(
        DisorderTerm(
            operator=t.operator,
            distribution=replace(t.distribution, sigma=float(s)),
            label=t.label,
        )
        for t, s in zip(spec.disorder_terms, sigmas)
    )
    return replace(spec, disorder_terms=terms)
