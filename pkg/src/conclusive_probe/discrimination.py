"""POVM receiver for unambiguous discrimination of the correlated probe states.

The receiver has three outcomes.  ``CONCLUSIVE_PLUS`` never fires on the
``alpha_minus`` state and ``CONCLUSIVE_MINUS`` never fires on ``alpha_plus``;
the price is an inconclusive outcome whose probability on either state equals
their overlap ``Q = (1 - 3E)/(1 - E)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .probe_model import (
    ErrorRate,
    InconclusiveRate,
    ProbeVector,
    alpha_minus,
    alpha_plus,
    error_from_inconclusive,
    reflection_coefficient,
)

# Born values in [-PROB_TOL, 0) are rounding noise and are clamped to zero
PROB_TOL = 1e-12
SUM_TOL = 1e-10


class UniformStream(Protocol):
    def random(self) -> float: ...


class Outcome(enum.IntEnum):
    CONCLUSIVE_PLUS = 0
    CONCLUSIVE_MINUS = 1
    INCONCLUSIVE = 2


@dataclass(frozen=True)
class PovmSet:
    conclusive_plus: np.ndarray
    conclusive_minus: np.ndarray
    inconclusive: np.ndarray
    # states the set is meant to discriminate; used by the unambiguity check
    targets: tuple[ProbeVector, ProbeVector] | None = field(default=None, compare=False)

    def elements(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.conclusive_plus, self.conclusive_minus, self.inconclusive


def _projector(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v)


def build_povm(E: float) -> PovmSet:
    """Optimal symmetric unambiguous-discrimination POVM for the correlated states.

    Each conclusive element is the projector onto the direction orthogonal to
    the *other* state, scaled by ``1/(1 + Q)``; the inconclusive element takes
    up the rest of the identity.  At ``E = 0`` the two states coincide and the
    set degenerates to an always-inconclusive measurement.
    """
    E = ErrorRate(E)
    plus = alpha_plus(E).normalized()
    minus = alpha_minus(E).normalized()
    if E == 0.0:
        zero = np.zeros((2, 2))
        return PovmSet(zero, zero.copy(), np.eye(2), targets=(plus, minus))

    q = abs(plus.dot(minus))
    perp_minus = np.array([minus.w3, -minus.w0])
    perp_plus = np.array([-plus.w3, plus.w0])
    # orient so the conclusive direction has positive overlap with its target
    if perp_minus @ plus.as_array() < 0:
        perp_minus = -perp_minus
    if perp_plus @ minus.as_array() < 0:
        perp_plus = -perp_plus
    scale = 1.0 / (1.0 + q)
    cplus = scale * _projector(perp_minus)
    cminus = scale * _projector(perp_plus)
    inc = np.eye(2) - cplus - cminus
    # enforce exact symmetry of the remainder
    inc[0, 1] = inc[1, 0] = 0.5 * (inc[0, 1] + inc[1, 0])
    return PovmSet(cplus, cminus, inc, targets=(plus, minus))


def _born(state: ProbeVector, element: np.ndarray) -> float:
    v = state.as_array()
    return float(v @ element @ v)


def outcome_probabilities(state: ProbeVector, povm: PovmSet) -> tuple[float, float, float]:
    """Born probabilities ``(plus, minus, inconclusive)`` for the normalized state."""
    if state.norm() == 0.0:
        raise ValueError("cannot measure the zero probe vector")
    s = state.normalized()
    probs = []
    for element in povm.elements():
        p = _born(s, element)
        if p < -PROB_TOL:
            raise ValueError(f"negative Born probability {p!r}; POVM element is not positive")
        probs.append(min(1.0, max(0.0, p)))
    total = sum(probs)
    if abs(total - 1.0) > SUM_TOL:
        raise ValueError(f"Born probabilities sum to {total!r}; POVM is incomplete")
    return probs[0], probs[1], probs[2]


def categorical(probs: tuple[float, float, float], u: float) -> Outcome:
    """Map a uniform ``u`` in [0, 1) onto the outcome ordering of :class:`Outcome`."""
    if u < probs[0]:
        return Outcome.CONCLUSIVE_PLUS
    if u < probs[0] + probs[1]:
        return Outcome.CONCLUSIVE_MINUS
    return Outcome.INCONCLUSIVE


def sample_outcome(state: ProbeVector, povm: PovmSet, rng: UniformStream) -> Outcome:
    return categorical(outcome_probabilities(state, povm), rng.random())


def projective_probability(state: ProbeVector) -> float:
    """Probability of outcome 0 in the ``{|w0>, |w3>}`` basis.

    This is the minimum-error basis for the mirror-image pair
    ``alpha_plus``/``alpha_minus``: outcome 0 points to ``alpha_plus``.
    """
    if state.norm() == 0.0:
        raise ValueError("cannot measure the zero probe vector")
    s = state.normalized()
    return s.w0 * s.w0


def projective_measure(state: ProbeVector, rng: UniformStream) -> int:
    return 0 if rng.random() < projective_probability(state) else 1


def _eigenvalues(m: np.ndarray) -> tuple[float, float]:
    tr = m[0, 0] + m[1, 1]
    half_gap = math.hypot(0.5 * (m[0, 0] - m[1, 1]), m[0, 1])
    return 0.5 * tr - half_gap, 0.5 * tr + half_gap


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float
    tolerance: float


@dataclass(frozen=True)
class PovmReport:
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate_povm(povm: PovmSet, tol: float = PROB_TOL) -> PovmReport:
    """Check symmetry, positivity, completeness and (if targets are known) unambiguity."""
    elements = povm.elements()
    sym = float(max(abs(m[0, 1] - m[1, 0]) for m in elements))
    min_eig = float(min(_eigenvalues(m)[0] for m in elements))
    completeness = float(np.max(np.abs(sum(elements) - np.eye(2))))
    checks = [
        Check("symmetry", sym == 0.0, sym, 0.0),
        Check("positivity", min_eig >= -tol, max(0.0, -min_eig), tol),
        Check("completeness", completeness <= tol, completeness, tol),
    ]
    if povm.targets is not None:
        plus, minus = povm.targets
        cross = max(_born(minus, povm.conclusive_plus), _born(plus, povm.conclusive_minus))
        checks.append(Check("unambiguity", cross <= tol, max(0.0, cross), tol))
    return PovmReport(tuple(checks))


@dataclass(frozen=True)
class ReflectionCheck:
    r1_residual: float
    achieved_inconclusive: float
    inconclusive_residual: float


def check_reflection_relation(Rq: float) -> ReflectionCheck:
    """Cross-check the receiver's R1 setting against the POVM actually built.

    ``r1_residual`` compares the reflection coefficient with the one implied by
    the inconclusive probability the constructed POVM achieves on the
    correlated states.
    """
    Rq = InconclusiveRate(Rq)
    E = error_from_inconclusive(Rq)
    povm = build_povm(E)
    achieved = 0.5 * (
        outcome_probabilities(alpha_plus(E), povm)[Outcome.INCONCLUSIVE]
        + outcome_probabilities(alpha_minus(E), povm)[Outcome.INCONCLUSIVE]
    )
    implied_r1 = (1.0 - achieved) / (1.0 + achieved)
    return ReflectionCheck(
        r1_residual=abs(reflection_coefficient(Rq) - implied_r1),
        achieved_inconclusive=achieved,
        inconclusive_residual=abs(achieved - Rq),
    )


def renyi_plugin(counts: np.ndarray) -> float:
    """Plug-in Renyi (order-2) information from a joint count table.

    ``counts[s, o]`` is the number of times the hidden bit ``s`` produced
    measurement outcome ``o``.  Assumes an equiprobable hidden bit, so the
    prior contributes exactly one bit.
    """
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total == 0:
        raise ValueError("empty count table")
    collision = 0.0
    for o in range(counts.shape[1]):
        col = counts[:, o]
        n_o = col.sum()
        if n_o == 0:
            continue
        collision += (n_o / total) * float(np.sum((col / n_o) ** 2))
    return 1.0 + math.log2(collision)
