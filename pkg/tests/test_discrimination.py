import dataclasses
import math

import numpy as np
import pytest

from conclusive_probe.discrimination import (
    Outcome,
    build_povm,
    categorical,
    check_reflection_relation,
    outcome_probabilities,
    projective_measure,
    projective_probability,
    renyi_plugin,
    sample_outcome,
    validate_povm,
)
from conclusive_probe.information import overlap_closed_form, renyi_information
from conclusive_probe.probe_model import ProbeVector, alpha_error, alpha_minus, alpha_plus

E_GRID = np.linspace(1 / 3 / 50, 1 / 3, 50)


def test_povm_rates_at_0_2():
    povm = build_povm(0.2)
    assert validate_povm(povm).passed
    plus = outcome_probabilities(alpha_plus(0.2), povm)
    minus = outcome_probabilities(alpha_minus(0.2), povm)
    assert plus == (pytest.approx(0.5, abs=1e-12), pytest.approx(0.0, abs=1e-12), pytest.approx(0.5, abs=1e-12))
    assert minus == (pytest.approx(0.0, abs=1e-12), pytest.approx(0.5, abs=1e-12), pytest.approx(0.5, abs=1e-12))


def test_povm_projective_limit():
    povm = build_povm(1 / 3)
    report = validate_povm(povm)
    assert report.passed
    assert np.trace(povm.inconclusive) <= 1e-12


def test_povm_degenerate_at_zero():
    povm = build_povm(0.0)
    assert np.array_equal(povm.inconclusive, np.eye(2))
    for v in (alpha_plus(0.0), ProbeVector(0.3, -0.7)):
        assert outcome_probabilities(v, povm) == (0.0, 0.0, 1.0)


@pytest.mark.parametrize("E", E_GRID)
def test_povm_valid_on_grid(E):
    povm = build_povm(E)
    report = validate_povm(povm)
    assert report.passed, report
    q = overlap_closed_form(E)
    p_plus = outcome_probabilities(alpha_plus(E), povm)
    p_minus = outcome_probabilities(alpha_minus(E), povm)
    assert p_plus[Outcome.INCONCLUSIVE] == pytest.approx(q, abs=1e-10)
    assert p_minus[Outcome.INCONCLUSIVE] == pytest.approx(q, abs=1e-10)
    assert p_plus[Outcome.CONCLUSIVE_MINUS] <= 1e-12
    assert p_minus[Outcome.CONCLUSIVE_PLUS] <= 1e-12


def test_error_state_is_always_conclusive():
    # the error state is orthogonal to the inconclusive direction (1, 1)
    for E in (0.05, 0.2, 0.3):
        p = outcome_probabilities(alpha_error(E), build_povm(E))
        assert p == (pytest.approx(0.5, abs=1e-12), pytest.approx(0.5, abs=1e-12), pytest.approx(0.0, abs=1e-12))


def test_validate_detects_scaled_element():
    povm = build_povm(0.2)
    bad = dataclasses.replace(povm, conclusive_plus=1.1 * povm.conclusive_plus)
    report = validate_povm(bad)
    assert not report.passed
    assert not report["completeness"].passed
    assert report["symmetry"].passed


def test_validate_detects_asymmetry_and_negativity():
    povm = build_povm(0.2)
    skew = povm.conclusive_plus.copy()
    skew[0, 1] += 1e-6
    assert not validate_povm(dataclasses.replace(povm, conclusive_plus=skew))["symmetry"].passed
    neg = dataclasses.replace(povm, inconclusive=povm.inconclusive - 0.01 * np.eye(2))
    assert not validate_povm(neg)["positivity"].passed


def test_outcome_probabilities_rejects_zero_state():
    with pytest.raises(ValueError):
        outcome_probabilities(ProbeVector(0.0, 0.0), build_povm(0.2))


def test_sample_outcome_matches_categorical():
    povm = build_povm(0.2)
    state = alpha_plus(0.2)
    probs = outcome_probabilities(state, povm)
    a, b = np.random.default_rng(5), np.random.default_rng(5)
    for _ in range(5000):
        assert sample_outcome(state, povm, a) == categorical(probs, b.random())


def test_sampling_statistics_at_0_2():
    """10**6 draws of alpha_plus: inconclusive within 3 sigma of 1/2, never minus."""
    n = 10**6
    probs = outcome_probabilities(alpha_plus(0.2), build_povm(0.2))
    u = np.random.default_rng(2024).random(n)
    outcomes = np.array([categorical(probs, x) for x in u])
    sigma = math.sqrt(0.25 / n)
    assert abs(np.mean(outcomes == Outcome.INCONCLUSIVE) - 0.5) <= 3 * sigma
    assert np.sum(outcomes == Outcome.CONCLUSIVE_MINUS) == 0


def test_sampling_replay():
    povm = build_povm(0.1)
    state = alpha_minus(0.1)
    a = [sample_outcome(state, povm, np.random.default_rng(9)) for _ in range(3)]
    rng1, rng2 = np.random.default_rng(77), np.random.default_rng(77)
    seq1 = [sample_outcome(state, povm, rng1) for _ in range(200)]
    seq2 = [sample_outcome(state, povm, rng2) for _ in range(200)]
    assert seq1 == seq2 and len(set(a)) == 1


def test_projective_eigenstates():
    rng = np.random.default_rng(0)
    assert {projective_measure(ProbeVector(1.0, 0.0), rng) for _ in range(100)} == {0}
    assert {projective_measure(ProbeVector(0.0, 1.0), rng) for _ in range(100)} == {1}
    with pytest.raises(ValueError):
        projective_measure(ProbeVector(0.0, 0.0), rng)


def test_projective_success_probability():
    q = 0.5
    # Born-rule oracle: c**2 with 2cs = Q and c**2 + s**2 = 1
    expected = (1 + math.sqrt(1 - q * q)) / 2
    assert projective_probability(alpha_plus(0.2)) == pytest.approx(expected, abs=1e-12)
    assert 1 - projective_probability(alpha_minus(0.2)) == pytest.approx(expected, abs=1e-12)


def test_renyi_plugin_exact_table():
    # posterior collision sum for a perfect channel is 1 -> one bit
    assert renyi_plugin([[10, 0], [0, 10]]) == pytest.approx(1.0)
    assert renyi_plugin([[5, 5], [5, 5]]) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        renyi_plugin([[0, 0], [0, 0]])


@pytest.mark.parametrize("E", [0.1, 0.2, 0.3])
def test_projective_renyi_convergence(E):
    n = 10**6
    rng = np.random.default_rng(31)
    bits = rng.random(n) < 0.5
    p0 = np.where(bits, projective_probability(alpha_minus(E)), projective_probability(alpha_plus(E)))
    outcome = (rng.random(n) >= p0).astype(int)
    table = np.zeros((2, 2), dtype=int)
    np.add.at(table, (bits.astype(int), outcome), 1)
    assert renyi_plugin(table) == pytest.approx(renyi_information(overlap_closed_form(E)), abs=0.01)


def test_reflection_relation():
    c = check_reflection_relation(0.5)
    assert c.r1_residual <= 1e-10 and c.inconclusive_residual <= 1e-10
    assert check_reflection_relation(0.0).achieved_inconclusive == pytest.approx(0.0, abs=1e-12)
    assert check_reflection_relation(1.0).achieved_inconclusive == 1.0
