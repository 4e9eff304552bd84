"""Exact time-ordered integrals of gap phases via exponential polynomials.

Any nested integral of products of e^{i x s} factors over an ordered simplex
is a finite combination sum_j p_j(s) e^{i mu_j s} with polynomial p_j. This
module manipulates that representation exactly, so arbitrary gap
coincidences need no piecewise case analysis: frequencies closer than the
tolerance are merged and integrated with the polynomial rule.

It powers the third-order expansion terms and serves as an independent
cross-check of the closed-form kernel tensors.
"""

from __future__ import annotations

import numpy as np


class ExpPoly:
    """Finite sum of polynomial * exp(i mu s) terms."""

    __slots__ = ("terms", "tol")

    def __init__(self, terms=None, tol=1e-9):
        self.terms: list[tuple[float, np.ndarray]] = terms if terms is not None else []
        self.tol = tol

    @classmethod
    def one(cls, tol=1e-9) -> "ExpPoly":
        return cls([(0.0, np.array([1.0 + 0.0j]))], tol=tol)

    def _add_term(self, mu: float, coeffs: np.ndarray) -> None:
        for idx, (m, c) in enumerate(self.terms):
            if abs(m - mu) <= self.tol:
                n = max(len(c), len(coeffs))
                merged = np.zeros(n, dtype=complex)
                merged[: len(c)] += c
                merged[: len(coeffs)] += coeffs
                self.terms[idx] = (m, merged)
                return
        self.terms.append((float(mu), np.asarray(coeffs, dtype=complex)))

    def mul_phase(self, mu: float) -> "ExpPoly":
        """Multiply by exp(i mu s)."""
        out = ExpPoly(tol=self.tol)
        for m, c in self.terms:
            out._add_term(m + mu, c)
        return out

    def mul(self, other: "ExpPoly") -> "ExpPoly":
        out = ExpPoly(tol=self.tol)
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                out._add_term(m1 + m2, np.convolve(c1, c2))
        return out

    def integrate(self) -> "ExpPoly":
        """Antiderivative vanishing at s = 0."""
        out = ExpPoly(tol=self.tol)
        for mu, c in self.terms:
            if abs(mu) <= self.tol:
                anti = np.zeros(len(c) + 1, dtype=complex)
                anti[1:] = c / np.arange(1, len(c) + 1)
                out._add_term(0.0, anti)
            else:
                # integral of p(s) e^{i mu s}: e^{i mu s} q(s) - q(0), with
                # q = sum_r (-1)^r p^(r) / (i mu)^(r+1)
                q = np.zeros_like(c)
                deriv = c.copy()
                sign = 1.0
                power = 1j * mu
                for _ in range(len(c)):
                    q += sign * deriv / power
                    deriv = deriv[1:] * np.arange(1, len(deriv))
                    deriv = np.pad(deriv, (0, len(c) - len(deriv)))
                    sign = -sign
                    power *= 1j * mu
                out._add_term(mu, q)
                out._add_term(0.0, np.array([-q[0]]))
        out.terms = [(m, c) for m, c in out.terms if np.abs(c).max() > 0.0]
        return out

    def eval(self, s: float) -> complex:
        total = 0.0 + 0.0j
        powers_cache: dict[int, np.ndarray] = {}
        for mu, c in self.terms:
            n = len(c)
            if n not in powers_cache:
                powers_cache[n] = s ** np.arange(n)
            total += np.exp(1j * mu * s) * np.dot(c, powers_cache[n])
        return total


def ordered_exponential(exponents, tol=1e-9) -> ExpPoly:
    """E(x_1..x_a; s) = ordered integral over s > s_1 > ... > s_a > 0.

    x_1 attaches to the outermost (largest) time.
    """
    poly = ExpPoly.one(tol=tol)
    for x in reversed(tuple(exponents)):
        poly = poly.mul_phase(x).integrate()
    return poly


def dyson_kernel(left, mid, right, t, tol=1e-9) -> complex:
    """Scalar kernel of one expansion pattern.

    ``left``/``right`` are the gap exponents of the perturbation factors on
    each side of the derivative operator, in matrix order (left to right);
    ``mid`` is the derivative operator's gap. The prefactor (+i)^a (-i)^b
    from the expansion of the two propagators is included.
    """
    a, b = len(left), len(right)
    el = ordered_exponential(tuple(reversed(tuple(left))), tol=tol)
    er = ordered_exponential(tuple(right), tol=tol)
    integrand = el.mul(er).mul_phase(mid)
    value = integrand.integrate().eval(t)
    return (1j) ** a * (-1j) ** b * value


class KernelCache:
    """Memoized dyson_kernel evaluations for one spectrum."""

    def __init__(self, t: float, tol: float):
        self.t = t
        self.tol = tol
        self._memo: dict = {}

    def __call__(self, left, mid, right) -> complex:
        key = (tuple(round(x, 10) for x in left), round(mid, 10),
               tuple(round(x, 10) for x in right))
        val = self._memo.get(key)
        if val is None:
            val = dyson_kernel(left, mid, right, self.t, tol=self.tol)
            self._memo[key] = val
        return val


def third_order_term(energies, v_tilde, w_tilde, t, eps) -> np.ndarray:
    """Third-order expansion matrix for one disorder operator.

    ``v_tilde`` and ``w_tilde`` are the disorder operator and the parameter
    derivative in the eigenbasis. Assembled from the two independent
    orderings (derivative first, and one factor to its left); the other two
    are their Hermitian conjugates.
    """
    d = len(energies)
    de = energies[:, None] - energies[None, :]
    kern = KernelCache(t, eps)
    p03 = np.zeros((d, d), dtype=complex)
    p12 = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            acc03 = 0.0 + 0.0j
            acc12 = 0.0 + 0.0j
            for k in range(d):
                for l in range(d):
                    if v_tilde[k, l] == 0 and w_tilde[k, l] == 0:
                        continue
                    for m in range(d):
                        chain = v_tilde[k, l] * v_tilde[l, m] * v_tilde[m, j]
                        if w_tilde[i, k] != 0 and chain != 0:
                            acc03 += w_tilde[i, k] * chain * kern(
                                (), de[i, k], (de[k, l], de[l, m], de[m, j]))
                        chain12 = v_tilde[i, k] * w_tilde[k, l] * v_tilde[l, m] * v_tilde[m, j]
                        if chain12 != 0:
                            acc12 += chain12 * kern(
                                (de[i, k],), de[k, l], (de[l, m], de[m, j]))
            p03[i, j] = acc03
            p12[i, j] = acc12
    total = p03 + p03.conj().T + p12 + p12.conj().T
    return total
