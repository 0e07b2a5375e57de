"""Dense-grid analytic invariant suite behind ``conclusive-probe validate``."""
from __future__ import annotations

import dataclasses

import numpy as np

from .discrimination import (
    Check,
    Outcome,
    build_povm,
    check_reflection_relation,
    outcome_probabilities,
    validate_povm,
)
from .information import overlap_closed_form, overlap_from_vectors, renyi_information
from .probe_model import (
    ERROR_RATE_MAX,
    alpha_error,
    alpha_minus,
    alpha_plus,
    error_from_inconclusive,
    eta_from_error,
    eta_from_inconclusive,
    inconclusive_from_error,
    state_A1,
    state_A1_of_Rq,
    state_A2,
    state_A2_of_Rq,
)

IDENTITY_TOL = 1e-12
NORM_TOL = 1e-10
RATE_TOL = 1e-10


def error_grid(n: int) -> np.ndarray:
    """``n`` evenly spaced error rates over [0, 1/3], plus the sign-flip point 1/4."""
    if n < 2:
        raise ValueError("grid needs at least 2 points")
    return np.union1d(np.linspace(0.0, ERROR_RATE_MAX, n), [0.25])


def _max(values) -> float:
    return float(max(values, default=0.0))


def _check(name: str, residual: float, tol: float) -> Check:
    return Check(name, residual <= tol, residual, tol)


def run_validation(grid_points: int = 1000, inject_fault: bool = False) -> list[Check]:
    """Evaluate every analytic identity on the grid and return one :class:`Check` each.

    ``inject_fault`` scales the plus-conclusive POVM element by 1.1 before
    validation, which must trip the completeness check.
    """
    grid = [float(e) for e in error_grid(grid_points)]
    rq_grid = [float(r) for r in np.linspace(0.0, 1.0, grid_points)]
    checks = []

    checks.append(_check(
        "state_normalization",
        _max(abs(s(E).norm() - 1.0) for E in grid for s in (state_A1, state_A2)),
        IDENTITY_TOL,
    ))
    checks.append(_check(
        "initial_state_overlap",
        _max(abs(state_A1(E).dot(state_A2(E)) - (1.0 - 4.0 * E)) for E in grid),
        IDENTITY_TOL,
    ))
    checks.append(_check(
        "correlated_norms",
        _max(
            max(abs(alpha_plus(E).norm_squared() - 16 * (1 - E)), abs(alpha_minus(E).norm_squared() - 16 * (1 - E)))
            for E in grid
        ),
        NORM_TOL,
    ))
    checks.append(_check(
        "error_state_norm",
        _max(abs(alpha_error(E).norm_squared() - 16 * E) for E in grid),
        NORM_TOL,
    ))
    checks.append(_check(
        "swap_symmetry",
        _max(abs(alpha_plus(E).swapped().w0 - alpha_minus(E).w0) + abs(alpha_plus(E).swapped().w3 - alpha_minus(E).w3) for E in grid),
        0.0,
    ))
    checks.append(_check(
        "error_state_direction",
        _max(abs(alpha_error(E).w0 + alpha_error(E).w3) for E in grid),
        0.0,
    ))
    checks.append(_check(
        "parameter_round_trip",
        _max(abs(error_from_inconclusive(inconclusive_from_error(E)) - E) for E in grid),
        IDENTITY_TOL,
    ))
    checks.append(_check(
        "eta_parameterizations",
        _max(abs(eta_from_inconclusive(r) - eta_from_error(error_from_inconclusive(r))) for r in rq_grid),
        IDENTITY_TOL,
    ))
    checks.append(_check(
        "tuned_initial_states",
        _max(
            max(
                abs(a.w0 - b.w0) + abs(a.w3 - b.w3)
                for a, b in (
                    (state_A1_of_Rq(r), state_A1(error_from_inconclusive(r))),
                    (state_A2_of_Rq(r), state_A2(error_from_inconclusive(r))),
                )
            )
            for r in rq_grid
        ),
        IDENTITY_TOL,
    ))
    checks.append(_check(
        "overlap_route_equivalence",
        _max(abs(overlap_from_vectors(E) - overlap_closed_form(E)) for E in grid),
        IDENTITY_TOL,
    ))
    checks.append(_check(
        "renyi_endpoints",
        max(abs(renyi_information(overlap_closed_form(0.0))), abs(renyi_information(overlap_closed_form(ERROR_RATE_MAX)) - 1.0)),
        IDENTITY_TOL,
    ))
    qs = [overlap_closed_form(E) for E in grid]
    info = [renyi_information(q) for q in qs]
    worst_step = min(
        min(a - b for a, b in zip(qs, qs[1:])),
        min(b - a for a, b in zip(info, info[1:])),
    )
    checks.append(Check("monotonicity", worst_step > 0.0, max(0.0, -worst_step), 0.0))

    povm_residuals = {"symmetry": 0.0, "positivity": 0.0, "completeness": 0.0, "unambiguity": 0.0}
    rate_residual = 0.0
    for E in grid:
        if E == 0.0:
            continue
        povm = build_povm(E)
        if inject_fault:
            povm = dataclasses.replace(povm, conclusive_plus=1.1 * povm.conclusive_plus)
        report = validate_povm(povm)
        for c in report.checks:
            povm_residuals[c.name] = max(povm_residuals[c.name], c.residual)
        if not inject_fault:
            q = overlap_closed_form(E)
            for state in (alpha_plus(E), alpha_minus(E)):
                rate_residual = max(rate_residual, abs(outcome_probabilities(state, povm)[Outcome.INCONCLUSIVE] - q))
    for name, residual in povm_residuals.items():
        tol = 0.0 if name == "symmetry" else IDENTITY_TOL
        checks.append(_check(f"povm_{name}", residual, tol))
    checks.append(_check("povm_inconclusive_rate", rate_residual, RATE_TOL))

    reflection = [check_reflection_relation(r) for r in rq_grid]
    checks.append(_check(
        "reflection_relation",
        _max(max(c.r1_residual, c.inconclusive_residual) for c in reflection),
        RATE_TOL,
    ))
    return checks
