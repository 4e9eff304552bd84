"""Expectation-value providers for quadratic observables.

The moment expansion and the Monte Carlo averaging only ever need first and
second moments <A> and <A B> of Hermitian observables in a fixed initial
state. A provider abstracts how those moments are computed: directly from a
state vector here, or through fermionic correlation matrices for the chain
probe (see :mod:`qfirob.kitaev`).
"""

from __future__ import annotations

import numpy as np

from .operators import expectation


class StateExpectations:
    """Moments taken in an explicit pure state vector."""

    def __init__(self, psi):
        self.psi = np.asarray(psi, dtype=complex).ravel()

    def mean(self, a) -> float:
        return expectation(a, self.psi)

    def pair(self, a, b) -> complex:
        av = np.asarray(a, dtype=complex) @ self.psi
        bv = np.asarray(b, dtype=complex) @ self.psi
        return complex(np.vdot(av, bv))

    def variance(self, a) -> float:
        m = self.mean(a)
        var = self.pair(a, a).real - m * m
        return max(var, 0.0)

    def variance_batch(self, stack: np.ndarray) -> np.ndarray:
        """Variances for a stack of observables (n, d, d)."""
        av = stack @ self.psi
        mean = np.einsum("i,ni->n", self.psi.conj(), av).real
        second = np.einsum("ni,ni->n", av.conj(), av).real
        return np.clip(second - mean * mean, 0.0, None)
