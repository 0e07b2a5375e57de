"""Exit criteria.  Each test prints one PASS/FAIL line (also collected in the terminal summary)."""
import json
import time

import mpmath
import numpy as np
import sympy as sp

from conclusive_probe.attack_sim import (
    ProtocolConfig,
    binomial_sigma,
    loss_matched_config,
    run_counts,
    run_simulation,
)
from conclusive_probe.cli import main
from conclusive_probe.discrimination import Outcome, build_povm, outcome_probabilities, validate_povm
from conclusive_probe.information import overlap_closed_form, overlap_from_vectors, renyi_information
from conclusive_probe.probe_model import (
    alpha_error,
    alpha_minus,
    alpha_plus,
    error_from_inconclusive,
    eta_from_error,
    eta_from_inconclusive,
    inconclusive_from_error,
    reflection_coefficient,
    state_A1,
    state_A1_of_Rq,
    state_A2,
    state_A2_of_Rq,
)

from oracles import expansion_identities, mp_pm_product

GRID = np.union1d(np.linspace(0.0, 1.0 / 3.0, 1000), [0.25])
RQ_GRID = np.linspace(0.0, 1.0, 1000)
TRIALS = 10**6
SEED = 42


def test_criterion_1_closed_form_endpoints(acceptance_line):
    i0 = renyi_information(overlap_closed_form(0.0))
    i13 = renyi_information(overlap_closed_form(1 / 3))
    q13 = overlap_closed_form(1 / 3)
    ok = abs(i0) <= 1e-12 and abs(i13 - 1.0) <= 1e-12 and abs(q13) <= 1e-12
    acceptance_line(1, "closed-form endpoints", ok, f"I(0)={i0:.3e}, I(1/3)={i13!r}, Q(1/3)={q13:.3e}")
    assert ok


def test_criterion_2_route_equivalence(acceptance_line):
    start = time.perf_counter()
    resid = max(abs(overlap_from_vectors(E) - overlap_closed_form(E)) for E in GRID)
    elapsed = time.perf_counter() - start
    branches = {int(np.sign(1 - 4 * E)) for E in GRID}
    ok = resid <= 1e-12 and branches == {-1, 0, 1} and elapsed < 1.0
    acceptance_line(2, "route equivalence", ok, f"max residual {resid:.2e} over {len(GRID)} points, {elapsed:.3f}s")
    assert ok


def test_criterion_3_parameterization_duality(acceptance_line):
    round_trip = max(abs(error_from_inconclusive(inconclusive_from_error(E)) - E) for E in GRID)
    q_equals_rq = max(abs(inconclusive_from_error(E) - overlap_closed_form(E)) for E in GRID)
    r1_ends = (reflection_coefficient(0.0), reflection_coefficient(1.0))
    eta_resid = max(abs(eta_from_inconclusive(r) - eta_from_error(error_from_inconclusive(r))) for r in RQ_GRID)
    state_resid = max(
        max(abs(a.w0 - b.w0), abs(a.w3 - b.w3))
        for r in RQ_GRID
        for a, b in (
            (state_A1_of_Rq(r), state_A1(error_from_inconclusive(r))),
            (state_A2_of_Rq(r), state_A2(error_from_inconclusive(r))),
        )
    )
    ok = max(round_trip, q_equals_rq, eta_resid, state_resid) <= 1e-12 and r1_ends == (1.0, 0.0)
    acceptance_line(
        3, "parameterization duality", ok,
        f"round trip {round_trip:.1e}, eta {eta_resid:.1e}, states {state_resid:.1e}, R1 ends {r1_ends}",
    )
    assert ok


def test_criterion_4_norm_identities(acceptance_line):
    ids = expansion_identities()
    k = ids["k"]
    symbolic_ok = (
        sp.simplify(ids["norm_plus"] - (12 + 4 * k)) == 0
        and sp.simplify(ids["norm_minus"] - (12 + 4 * k)) == 0
        and sp.simplify(ids["norm_alpha"] - (4 - 4 * k)) == 0
        and sp.simplify(ids["a1_dot_a2"] - k) == 0
        and all(abs(mp_pm_product(e) - (1 - 4 * mpmath.mpf(e))) < 1e-40 for e in ("0.1", "0.25", "0.3"))
    )
    resid = max(
        max(
            abs(alpha_plus(E).norm_squared() - 16 * (1 - E)),
            abs(alpha_minus(E).norm_squared() - 16 * (1 - E)),
            abs(alpha_error(E).norm_squared() - 16 * E),
            abs(state_A1(E).dot(state_A2(E)) - (1 - 4 * E)),
        )
        for E in GRID
    )
    ok = symbolic_ok and resid <= 1e-10
    acceptance_line(4, "derived norm identities", ok, f"symbolic oracle {'ok' if symbolic_ok else 'MISMATCH'}, max residual {resid:.2e}")
    assert ok


def test_criterion_5_povm_validity(acceptance_line):
    start = time.perf_counter()
    grid = np.linspace(1 / 3 / 50, 1 / 3, 50)
    all_valid = True
    rate_resid = 0.0
    for E in grid:
        povm = build_povm(E)
        all_valid &= validate_povm(povm).passed
        q = (1 - 3 * E) / (1 - E)
        for state in (alpha_plus(E), alpha_minus(E)):
            rate_resid = max(rate_resid, abs(outcome_probabilities(state, povm)[Outcome.INCONCLUSIVE] - q))
    elapsed = time.perf_counter() - start
    ok = bool(all_valid) and rate_resid <= 1e-10 and elapsed < 1.0
    acceptance_line(5, "POVM validity and rates", ok, f"50 POVMs valid={all_valid}, rate residual {rate_resid:.2e}, {elapsed:.3f}s")
    assert ok


def test_criterion_6_monte_carlo_fidelity(acceptance_line):
    start = time.perf_counter()
    details, ok = [], True
    for E in (0.1, 0.2, 0.25, 0.3):
        s = run_simulation(ProtocolConfig.from_error_rate(E, TRIALS, seed=SEED))
        z_err = abs(s.sifted_error_rate - E) / binomial_sigma(E, s.sifted_count)
        config = ProtocolConfig.from_error_rate(E, TRIALS, seed=SEED, measurement_mode="povm")
        c = run_counts(config)
        q = overlap_closed_form(E)
        z_inc = abs(c.sifted_correct_inconclusive / c.sifted_correct - q) / binomial_sigma(q, c.sifted_correct)
        accuracy = c.conclusive_correct_hits / c.conclusive_correct_delivered
        ok &= z_err <= 3 and z_inc <= 3 and accuracy == 1.0
        details.append(f"E={E}: z_err={z_err:.2f} z_inc={z_inc:.2f} acc={accuracy}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 30
    acceptance_line(6, "Monte Carlo fidelity", ok, "; ".join(details) + f"; {elapsed:.1f}s")
    assert ok


def test_criterion_7_renyi_convergence(acceptance_line):
    details, ok = [], True
    for E in (0.1, 0.2, 0.3):
        s = run_simulation(ProtocolConfig.from_error_rate(E, TRIALS, seed=SEED))
        target = renyi_information(overlap_closed_form(E))
        diff = abs(s.empirical_renyi_bits - target)
        ok &= diff <= 0.01
        details.append(f"E={E}: {s.empirical_renyi_bits:.4f} vs {target:.4f}")
    acceptance_line(7, "empirical Renyi convergence", ok, "; ".join(details))
    assert ok


def test_criterion_8_loss_matching(acceptance_line):
    config = loss_matched_config(0.5, TRIALS, seed=SEED)
    s = run_simulation(config)
    sigma = binomial_sigma(0.5, TRIALS)
    z = abs(s.delivered_fraction - 0.5) / sigma
    accuracy_ok = s.eve_conclusive_accuracy == 1.0
    delivered_ok = z <= 3
    ok = accuracy_ok and delivered_ok
    acceptance_line(
        8, "loss-matching scenario", ok,
        f"conclusive accuracy {s.eve_conclusive_accuracy}, delivered fraction {s.delivered_fraction:.6f} "
        f"(target 0.5, {z:.1f} sigma); all-delivered-sifted accuracy {s.eve_accuracy_overall:.4f}",
    )
    assert accuracy_ok, "Eve mislabelled a conclusive correct round"
    assert delivered_ok, (
        f"delivered fraction {s.delivered_fraction} is {z:.0f} sigma from 0.5; error rounds leave the probe "
        "in a state the POVM always resolves, so the suppressed fraction is (1-E)Q, not Q"
    )


def test_criterion_9_determinism(acceptance_line, tmp_path, capsys):
    outputs = []
    for workers in ("1", "1", "4"):
        path = tmp_path / f"run_{len(outputs)}.json"
        code = main(["simulate", "--loss-match", "0.3", "--trials", "200000", "--seed", "9",
                     "--format", "json", "--workers", workers, "--output", str(path)])
        assert code == 0
        outputs.append(path.read_bytes())
    sweeps = []
    for _ in range(2):
        main(["sweep", "--steps", "50"])
        sweeps.append(capsys.readouterr().out)
    ok = outputs[0] == outputs[1] == outputs[2] and sweeps[0] == sweeps[1]
    json.loads(outputs[0])
    acceptance_line(9, "determinism", ok, f"{len(outputs[0])}-byte JSON identical across runs and worker counts 1/4")
    assert ok
