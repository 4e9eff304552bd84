"""Closed forms for the single-qubit probe in a disordered magnetic field.

The probe is H = h0z * Z plus stray-field fluctuations along all three axes,
prepared in the equatorial state (|0> + e^{i beta}|1>)/sqrt(2) that maximizes
the clean QFI. The transverse coefficients evaluate in closed form to

    C2_n = -[ (x u_n(beta) - v_n(x + beta) sin x)^2
              + (cos 2x + 2 x^2 - 1)/2 ] / (h0z^4 t^2),   x = h0z * t,

with (u, v) = (cos, cos) for the x axis and (sin, sin) for the y axis, and
C2_z = 0 exactly. These match the generic moment-expansion engine for all
parameters and serve as its independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSigmas, SingularField, SingularPoint
from .probes import DisorderDistribution, DisorderTerm, DisorderedProbeSpec

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_SMALL_FIELD = 1e-6


@dataclass(frozen=True)
class SingleQubitParams:
    """Field strength, encoding time and equatorial-state phase."""

    h0z: float
    t: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError("encoding time must be positive")


def equator_state(beta: float) -> np.ndarray:
    return np.array([1.0, np.exp(1j * beta)]) / math.sqrt(2.0)


def c2_closed_form(p: SingleQubitParams, axis: str) -> float:
    """Second-order coefficient for disorder along one axis."""
    if axis not in ("x", "y", "z"):
        raise ValueError(f"axis must be x, y or z, got {axis!r}")
    if axis == "z":
        return 0.0
    if abs(p.h0z) < 1e-12:
        raise SingularField("closed form has an h0z^-4 prefactor")
    x = p.h0z * p.t
    if axis == "x":
        u, v = math.cos(p.beta), math.cos(x + p.beta)
    else:
        u, v = math.sin(p.beta), math.sin(x + p.beta)
    bracket = (x * u - v * math.sin(x)) ** 2 + 0.5 * (math.cos(2 * x) + 2 * x * x - 1.0)
    return -bracket / (p.h0z**4 * p.t**2)


def c2_transverse_total(h0z: float, t: float) -> float:
    """C2_x + C2_y, independent of beta."""
    if abs(h0z) < 1e-12:
        raise SingularField("closed form has an h0z^-4 prefactor")
    x = h0z * t
    return -(3 * x * x - math.sin(x) ** 2 - x * math.sin(2 * x)) / (h0z**4 * t**2)


def beta_optima(p: SingleQubitParams) -> tuple[float, float]:
    """Phases maximizing the x- and y-axis coefficients, both in (-pi, pi]."""
    x = p.h0z * p.t
    s = math.sin(x)
    if abs(s) < 1e-9:
        raise SingularPoint("optimal phase undefined where sin(h0z t) vanishes")
    beta_x = math.atan((0.5 * math.sin(2 * x) - x) / (s * s))
    beta_y = beta_x - math.pi / 2.0
    return _wrap(beta_x), _wrap(beta_y)


def _wrap(angle: float) -> float:
    wrapped = (angle + math.pi) % (2.0 * math.pi) - math.pi
    return math.pi if wrapped == -math.pi else wrapped


def select_beta(sigma_x: float, sigma_y: float, p: SingleQubitParams) -> float:
    """Phase minimizing |g|: the weaker axis is placed at its maximum."""
    if sigma_x == sigma_y:
        raise DegenerateSigmas("equal transverse strengths leave beta free")
    bx, by = beta_optima(p)
    return by if sigma_x < sigma_y else bx


def crossover_time(h0z: float) -> tuple[float, float, float]:
    """Roots of the fixed-time marker model and the small-field approximation.

    The quadratic-in-time model (see :func:`crossover_marker_model`) vanishes
    at t_plus/t_minus; for small fields t_plus approaches 1 - (5/12) h0z^2.
    Near h0z = 0 the closed roots are returned through their series limits.
    """
    tau_approx = 1.0 - (5.0 / 12.0) * h0z * h0z
    if abs(h0z) < _SMALL_FIELD:
        return tau_approx, -1.0 / 3.0, tau_approx
    root = math.sqrt(math.cos(h0z) ** 2 + 3.0)
    pref = math.sin(h0z) / (3.0 * h0z)
    t_plus = pref * (math.cos(h0z) + root)
    t_minus = pref * (math.cos(h0z) - root)
    return t_plus, t_minus, tau_approx


def crossover_marker_model(h0z: float, sigma: float):
    """Quadratic-in-time marker model underlying the crossover roots.

    Returns the curve t -> sigma^2 * (-(3 h^2 t^2 - sin^2 h - h t sin 2h)
    / (h^4 t^2)). It coincides with the exact transverse marker at t = 1 and
    changes sign at the roots returned by :func:`crossover_time`; the exact
    marker itself stays negative for all t (see the module tests).
    """
    if abs(h0z) < 1e-12:
        raise SingularField("model has an h0z^-4 prefactor")
    s2 = math.sin(h0z) ** 2
    hs2 = h0z * math.sin(2.0 * h0z)

    def marker(t: float) -> float:
        return -sigma * sigma * (3.0 * h0z * h0z * t * t - s2 - hs2 * t) / (h0z**4 * t * t)

    return marker


def single_qubit_spec(p: SingleQubitParams, sigma_x: float = 0.0, sigma_y: float = 0.0,
                      sigma_z: float = 0.0, kind: str = "gaussian",
                      skewness: float = 0.0) -> DisorderedProbeSpec:
    """Probe spec for the generic engines: H = h0z Z + stray fields.

    Axes with zero strength carry no disorder term at all, so a z-only
    configuration is classified from the z coefficient alone.
    """

    def dist(s):
        sk = skewness if kind == "skew_normal" else 0.0
        return DisorderDistribution(kind=kind, mean=0.0, sigma=s, skewness=sk)

    axes = (("x", PAULI_X, sigma_x), ("y", PAULI_Y, sigma_y), ("z", PAULI_Z, sigma_z))
    terms = tuple(
        DisorderTerm(operator=op, distribution=dist(s), label=label)
        for label, op, s in axes
        if s > 0.0
    )
    return DisorderedProbeSpec(
        h_theta=p.h0z * PAULI_Z,
        dtheta_h=PAULI_Z,
        clean_rest=np.zeros((2, 2), dtype=complex),
        disorder_terms=terms,
        encoding_time=p.t,
        initial_state=equator_state(p.beta),
    )
