"""Parameter relations and probe states of the generalized entangling probe.

Everything here is real-valued and lives in the two-dimensional probe space
spanned by the orthonormal pair ``|w0>``, ``|w3>``.  The attack is driven by a
single number, either the induced error rate ``E`` in ``[0, 1/3]`` or the
POVM inconclusive rate ``R?`` in ``[0, 1]``; the two are related by
``E = (1 - R?) / (3 - R?)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ERROR_RATE_MAX = 1.0 / 3.0
SQRT2 = math.sqrt(2.0)

__all__ = [
    "DomainError",
    "ErrorRate",
    "InconclusiveRate",
    "ProbeParams",
    "ProbeVector",
    "sgn",
    "eta_from_error",
    "probe_params",
    "state_A1",
    "state_A2",
    "alpha_plus",
    "alpha_minus",
    "alpha_error",
    "error_from_inconclusive",
    "inconclusive_from_error",
    "reflection_coefficient",
    "eta_from_inconclusive",
    "state_A1_of_Rq",
    "state_A2_of_Rq",
]


class DomainError(ValueError):
    """A rate or probability lies outside the interval on which it is defined."""


class ErrorRate(float):
    """Probe-induced error rate, validated to the closed interval [0, 1/3]."""

    def __new__(cls, value: float) -> "ErrorRate":
        value = float(value)
        if not (0.0 <= value <= ERROR_RATE_MAX):
            raise DomainError(
                f"error rate must lie in [0, 1/3], got {value!r}"
            )
        return super().__new__(cls, value)


class InconclusiveRate(float):
    """POVM inconclusive probability, validated to the closed interval [0, 1]."""

    def __new__(cls, value: float) -> "InconclusiveRate":
        value = float(value)
        if not (0.0 <= value <= 1.0):
            raise DomainError(
                f"inconclusive rate must lie in [0, 1], got {value!r}"
            )
        return super().__new__(cls, value)


@dataclass(frozen=True)
class ProbeVector:
    """Real amplitudes over the probe basis ``(|w0>, |w3>)``."""

    w0: float
    w3: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.w0) and math.isfinite(self.w3)):
            raise ValueError(f"non-finite probe amplitudes ({self.w0}, {self.w3})")

    def dot(self, other: "ProbeVector") -> float:
        return self.w0 * other.w0 + self.w3 * other.w3

    def norm_squared(self) -> float:
        return self.dot(self)

    def norm(self) -> float:
        return math.hypot(self.w0, self.w3)

    def normalized(self) -> "ProbeVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero probe vector")
        return ProbeVector(self.w0 / n, self.w3 / n)

    def swapped(self) -> "ProbeVector":
        return ProbeVector(self.w3, self.w0)

    def as_array(self) -> np.ndarray:
        return np.array([self.w0, self.w3], dtype=np.float64)

    def __iter__(self):
        yield self.w0
        yield self.w3


@dataclass(frozen=True)
class ProbeParams:
    error_rate: ErrorRate
    eta: float
    sign_factor: int
    cos_mu: float
    sin_mu: float


def sgn(x: float) -> int:
    """Three-valued sign with an exact zero (no tolerance band)."""
    if not math.isfinite(x):
        raise ValueError(f"sgn is undefined for non-finite input {x!r}")
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def eta_from_error(E: float) -> float:
    """Probe geometry parameter ``sqrt(8 E (1 - 2E))``, in [0, 1]."""
    E = ErrorRate(E)
    # 8E(1-2E) peaks at exactly 1 for E = 1/4; rounding may overshoot by an ulp
    return min(1.0, math.sqrt(8.0 * E * (1.0 - 2.0 * E)))


def _one_minus_eta(E: float, eta: float) -> float:
    # 1 - eta**2 == (1 - 4E)**2; avoids cancellation near E = 1/4
    return (1.0 - 4.0 * E) ** 2 / (1.0 + eta)


def probe_params(E: float) -> ProbeParams:
    E = ErrorRate(E)
    eta = eta_from_error(E)
    s = sgn(1.0 - 4.0 * E)
    return ProbeParams(
        error_rate=E,
        eta=eta,
        sign_factor=s,
        cos_mu=math.sqrt((1.0 + eta) / 2.0),
        sin_mu=s * math.sqrt(_one_minus_eta(E, eta) / 2.0),
    )


def _initial_states(eta: float, one_minus_eta: float, s: int) -> tuple[ProbeVector, ProbeVector]:
    big = math.sqrt(0.5 * (1.0 + eta))
    small = s * math.sqrt(0.5 * one_minus_eta)
    return ProbeVector(big, small), ProbeVector(small, big)


def _error_states(E: float) -> tuple[ProbeVector, ProbeVector]:
    E = ErrorRate(E)
    eta = eta_from_error(E)
    return _initial_states(eta, _one_minus_eta(E, eta), sgn(1.0 - 4.0 * E))


def state_A1(E: float) -> ProbeVector:
    return _error_states(E)[0]


def state_A2(E: float) -> ProbeVector:
    return _error_states(E)[1]


def _p_m(E: float) -> tuple[float, float]:
    E = ErrorRate(E)
    eta = eta_from_error(E)
    return math.sqrt(1.0 + eta), sgn(1.0 - 4.0 * E) * math.sqrt(_one_minus_eta(E, eta))


def alpha_plus(E: float) -> ProbeVector:
    """Unnormalized probe state correlated with a correct bit-0 reading.

    Squared norm is ``16 (1 - E)``.
    """
    p, m = _p_m(E)
    a, b = SQRT2 + 1.0, SQRT2 - 1.0
    return ProbeVector(a * p + b * m, a * m + b * p)


def alpha_minus(E: float) -> ProbeVector:
    """Unnormalized probe state correlated with a correct bit-1 reading.

    The component swap of :func:`alpha_plus`.
    """
    p, m = _p_m(E)
    a, b = SQRT2 + 1.0, SQRT2 - 1.0
    return ProbeVector(b * p + a * m, b * m + a * p)


def alpha_error(E: float) -> ProbeVector:
    """Unnormalized probe state left behind by an induced error.

    Always proportional to ``(-1, 1)``; squared norm ``16 E``.
    """
    p, m = _p_m(E)
    return ProbeVector(m - p, p - m)


def error_from_inconclusive(Rq: float) -> ErrorRate:
    Rq = InconclusiveRate(Rq)
    return ErrorRate((1.0 - Rq) / (3.0 - Rq))


def inconclusive_from_error(E: float) -> InconclusiveRate:
    """Inverse of :func:`error_from_inconclusive`; equals the overlap ``(1-3E)/(1-E)``."""
    E = ErrorRate(E)
    return InconclusiveRate(max(0.0, (1.0 - 3.0 * E) / (1.0 - E)))


def reflection_coefficient(Rq: float) -> float:
    """Beam-splitter reflection coefficient ``R1`` of the POVM receiver."""
    Rq = InconclusiveRate(Rq)
    return (1.0 - Rq) / (1.0 + Rq)


def eta_from_inconclusive(Rq: float) -> float:
    Rq = InconclusiveRate(Rq)
    return min(1.0, 2.0 * math.sqrt(2.0 * (1.0 - Rq * Rq)) / (3.0 - Rq))


def _inconclusive_states(Rq: float) -> tuple[ProbeVector, ProbeVector]:
    Rq = InconclusiveRate(Rq)
    eta = eta_from_inconclusive(Rq)
    # 1 - eta**2 == ((1 - 3R?)/(3 - R?))**2
    one_minus_eta = ((1.0 - 3.0 * Rq) / (3.0 - Rq)) ** 2 / (1.0 + eta)
    return _initial_states(eta, one_minus_eta, sgn(3.0 * Rq - 1.0))


def state_A1_of_Rq(Rq: float) -> ProbeVector:
    return _inconclusive_states(Rq)[0]


def state_A2_of_Rq(Rq: float) -> ProbeVector:
    """Probe initial state tuned to a target inconclusive rate."""
    return _inconclusive_states(Rq)[1]
