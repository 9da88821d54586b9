import math

import numpy as np
import pytest

from treepressure import (
    AssumptionAViolation,
    CertificateCapError,
    InteractionSystem,
    PowerIterationError,
    ProbVector,
    StochMatrix,
    SupportViolationError,
    alpha_beta_gamma,
    finite_pressure,
    lambda_sequence,
    lambda_step,
    objective_Fk,
    parry_transition,
    pressure_certificate,
    r_E,
    reachability,
    spectral_radius,
    tail_coefficient,
)
from sysdefs import all_ones, golden_mean, identity_system, random_systems, weighted_example

PHI = (1.0 + math.sqrt(5.0)) / 2.0


def test_alpha_beta_gamma_examples():
    assert alpha_beta_gamma(golden_mean()) == pytest.approx((0.0, math.log(2), 0.0))
    assert alpha_beta_gamma(weighted_example()) == pytest.approx(
        (math.log(2), math.log(3), 0.0)
    )
    assert alpha_beta_gamma(identity_system()) == pytest.approx((0.0, 0.0, 0.0))
    with pytest.raises(AssumptionAViolation):
        alpha_beta_gamma(InteractionSystem.from_rows([[1, 0], [1, 0]]))


def test_r_E_examples():
    assert r_E(golden_mean()) == 2.0
    assert r_E(weighted_example()) == 3.0
    assert r_E(identity_system()) == 1.0


def test_spectral_radius_examples():
    assert spectral_radius(golden_mean()) == pytest.approx(PHI, abs=1e-10)
    assert spectral_radius(weighted_example()) == pytest.approx(1 + math.sqrt(3), abs=1e-10)
    assert spectral_radius(identity_system()) == pytest.approx(1.0, abs=1e-12)


def test_spectral_radius_nonconvergent_carries_bracket():
    # irreducible but periodic: plain power iteration cannot settle
    sysm = InteractionSystem.from_rows([[0, 2], [1, 0]])
    with pytest.raises(PowerIterationError) as err:
        spectral_radius(sysm, tol=1e-13, max_iter=500)
    lo, hi = err.value.bracket
    assert lo <= math.sqrt(2.0) <= hi


def test_reachability_examples():
    data = reachability(golden_mean())
    assert data.a_inf == frozenset({0, 1})
    assert data.L == 2
    data = reachability(identity_system(3))
    assert data.a_inf == frozenset({0, 1, 2})
    assert data.L == 1
    data = reachability(all_ones(3))
    assert data.a_inf == frozenset({0, 1, 2})
    assert data.L == 1


def test_lambda_step_hand_values():
    G = golden_mean()
    lam1, trans0 = lambda_step(np.zeros(2), 1, 2.0, G)
    assert lam1 == pytest.approx([math.log(2) / 2, 0.0], abs=1e-12)
    assert trans0.entries[:, 0] == pytest.approx([0.5, 0.5], abs=1e-12)
    assert trans0.entries[:, 1] == pytest.approx([1.0, 0.0], abs=1e-12)

    lam2, _ = lambda_step(lam1, 2, 2.0, G)
    assert lam2 == pytest.approx([math.log(5) / 4, math.log(4) / 4], abs=1e-12)


def test_lambda_step_rejects_bad_d():
    with pytest.raises(ValueError):
        lambda_step(np.zeros(2), 1, 1.0, golden_mean())


def test_lambda_step_columns_sum_to_one():
    rng = np.random.default_rng(3)
    for sysm in random_systems(5, rng):
        lam = rng.normal(size=sysm.size) * 0.3
        _, trans = lambda_step(lam, 3, 1.7, sysm)
        assert np.abs(trans.entries.sum(axis=0) - 1.0).max() <= 1e-12


def test_transition_support_matches_interaction_support():
    # at moderate depths (before the softmax weights can underflow) the
    # transitions are zero exactly where E is zero
    rng = np.random.default_rng(19)
    for sysm in random_systems(6, rng):
        d = float(rng.uniform(1.5, 3.0))
        seq = lambda_sequence(sysm, d, 6)
        for trans in seq.transitions:
            assert np.array_equal(trans.entries == 0.0, sysm.E == 0.0)


def test_lambda_step_constant_input_reduces_to_column_sums():
    # with all exponents equal the log-sum-exp must reduce to a plain log of
    # the scaled column sum, with no drift
    rng = np.random.default_rng(5)
    for sysm in random_systems(5, rng):
        c = float(rng.normal()) * 0.2
        i = int(rng.integers(1, 6))
        d = float(rng.uniform(1.3, 4.0))
        s = d**i / (d - 1.0)
        lam, _ = lambda_step(np.full(sysm.size, c), i, d, sysm)
        expected = c + np.log(sysm.E.sum(axis=0)) / s
        assert lam == pytest.approx(expected, abs=1e-12)


def test_lambda_sequence_k0_and_hand_values():
    G = golden_mean()
    seq = lambda_sequence(G, 2.0, 0)
    assert seq.k == 0
    assert seq.levels[0].tolist() == [0.0, 0.0]
    assert seq.transitions == ()

    seq = lambda_sequence(G, 2.0, 3)
    assert seq.levels[3] == pytest.approx([math.log(41) / 8, math.log(25) / 8], abs=1e-12)


def test_lambda_envelope_bounds():
    rng = np.random.default_rng(17)
    for sysm in random_systems(8, rng):
        d = float(rng.uniform(1.2, 5.0))
        alpha, beta, _ = alpha_beta_gamma(sysm)
        seq = lambda_sequence(sysm, d, 12)
        for k, lam in enumerate(seq.levels):
            scale = 1.0 - d ** (-k)
            assert lam.min() >= scale * alpha - 1e-9
            assert lam.max() <= scale * beta + 1e-9


def test_finite_pressure_values():
    G = golden_mean()
    assert finite_pressure(G, 2.0, 0) == 0.0
    assert finite_pressure(G, 2.0, 1) == pytest.approx(math.log(2) / 2, abs=1e-12)
    assert finite_pressure(G, 2.0, 3) == pytest.approx(math.log(41) / 8, abs=1e-12)


def test_objective_empty_transitions_is_zero():
    G = golden_mean()
    assert objective_Fk(ProbVector.unit(G.alphabet, 0), [], 2.0, G) == 0.0


def test_objective_matches_hand_value_and_lambda():
    G = golden_mean()
    seq = lambda_sequence(G, 2.0, 1)
    F1 = objective_Fk(ProbVector.unit(G.alphabet, 0), list(seq.transitions), 2.0, G)
    assert F1 == pytest.approx(math.log(2) / 2, abs=1e-12)
    assert F1 == pytest.approx(seq.levels[1][0], abs=1e-12)


def test_objective_normalized_columns_collapse_to_log_normalizer():
    rng = np.random.default_rng(23)
    for sysm in random_systems(5, rng):
        d = float(rng.uniform(1.5, 3.0))
        cols = sysm.E / sysm.E.sum(axis=0)
        trans = StochMatrix(sysm.alphabet, cols)
        p_raw = rng.random(sysm.size) + 0.05
        p = ProbVector(sysm.alphabet, p_raw / p_raw.sum())
        value = objective_Fk(p, [trans], d, sysm)
        expected = (d - 1.0) / d * float(p.entries @ np.log(sysm.E.sum(axis=0)))
        assert value == pytest.approx(expected, abs=1e-12)


def test_objective_rejects_support_violation():
    G = golden_mean()
    bad = StochMatrix(G.alphabet, [[0.5, 0.5], [0.5, 0.5]])  # mass at the zero entry
    with pytest.raises(SupportViolationError):
        objective_Fk(ProbVector.unit(G.alphabet, 0), [bad], 2.0, G)


def test_objective_consistency_with_lambda():
    rng = np.random.default_rng(29)
    for sysm in random_systems(8, rng):
        d = float(rng.uniform(1.2, 4.0))
        k = int(rng.integers(1, 8))
        seq = lambda_sequence(sysm, d, k)
        for a in range(sysm.size):
            value = objective_Fk(ProbVector.unit(sysm.alphabet, a), list(seq.transitions), d, sysm)
            assert value == pytest.approx(float(seq.levels[k][a]), abs=1e-9)


def _perturb(trans: StochMatrix, rng, scale=0.3) -> StochMatrix:
    M = trans.entries * np.exp(scale * rng.normal(size=trans.entries.shape))
    M = np.where(trans.entries > 0, M, 0.0)
    return StochMatrix(trans.alphabet, M / M.sum(axis=0))


def test_optimality_under_perturbations():
    rng = np.random.default_rng(31)
    for sysm in random_systems(4, rng):
        d = float(rng.uniform(1.3, 3.0))
        k = 5
        seq = lambda_sequence(sysm, d, k)
        for _ in range(25):
            perturbed = [_perturb(t, rng) for t in seq.transitions]
            for a in range(sysm.size):
                e_a = ProbVector.unit(sysm.alphabet, a)
                assert (
                    objective_Fk(e_a, perturbed, d, sysm)
                    <= float(seq.levels[k][a]) + 1e-9
                )


def test_gamma_adjusted_monotonicity():
    rng = np.random.default_rng(37)
    for sysm in random_systems(6, rng):
        d = float(rng.uniform(1.3, 3.0))
        _, _, gamma = alpha_beta_gamma(sysm)
        data = reachability(sysm)
        L = data.L
        k_max = 4 * L + L - 1
        seq = lambda_sequence(sysm, d, k_max)
        for a in sorted(data.a_inf):
            for i in range(L):
                ks = [L * n + i for n in range(5) if L * n + i <= k_max]
                vals = [
                    float(seq.levels[k][a]) - (1.0 - d ** (-k)) * gamma for k in ks
                ]
                assert all(v >= -1e-9 for v in vals)
                assert all(b >= a2 - 1e-9 for a2, b in zip(vals, vals[1:]))


def test_certificate_forced_k_matches_tail_coefficient():
    G = golden_mean()
    cert = pressure_certificate(G, 2.0, k=10)
    assert cert.k == 10
    c_k = tail_coefficient(2.0, 10)
    assert c_k == pytest.approx(2.0**-9, abs=1e-18)
    assert cert.lo == cert.p_k  # gamma = 0 for a 0/1 matrix
    assert cert.width == pytest.approx(c_k * math.log(2), abs=1e-15)


def test_certificate_hits_target_width():
    for sysm in (golden_mean(), weighted_example()):
        for d in (1.5, 2.0, 17.0):
            cert = pressure_certificate(sysm, d, 1e-6)
            assert cert.width <= 1e-6 + 1e-18
            spread = cert.beta - cert.gamma
            if cert.k > 1:
                # one step shallower must miss the target
                assert tail_coefficient(d, cert.k - 1) * spread > 1e-6


def test_certificate_cap_carries_best():
    with pytest.raises(CertificateCapError) as err:
        pressure_certificate(golden_mean(), 2.0, 1e-6, k_cap=5)
    best = err.value.best
    assert best.k == 5
    assert best.width > 1e-6


def test_certificate_zero_spread_identity():
    cert = pressure_certificate(identity_system(), 2.0, 1e-6)
    assert cert.k == 1
    assert cert.p_k == 0.0
    assert cert.lo == cert.hi == 0.0


def test_lambda_step_overflowed_scale_takes_max():
    # past i ~ 1075/log2(d) the exponent scale overflows; the step must fall
    # back to the hard max over the support instead of producing nan
    G = golden_mean()
    prev = np.array([0.2, 0.5])
    lam, trans = lambda_step(prev, 2000, 2.0, G)
    assert lam == pytest.approx([0.5, 0.2], abs=0)  # max over each column's support
    assert np.all(np.isfinite(lam))
    assert np.abs(trans.entries.sum(axis=0) - 1.0).max() <= 1e-12
    deep = lambda_sequence(G, 2.0, 1100)
    assert np.all(np.isfinite(deep.final))
    assert deep.final.max() <= math.log(2) + 1e-9


def test_certificate_large_d_contains_log2():
    # at depth 1 the enclosure still straddles the d -> inf limit
    cert = pressure_certificate(golden_mean(), 512.0, k=1)
    assert cert.lo - 1e-12 <= math.log(2) <= cert.hi + 1e-12


def test_enclosure_nesting():
    for sysm in (golden_mean(), weighted_example()):
        for d in (2.0, 3.0):
            seq = lambda_sequence(sysm, d, 25)
            _, beta, gamma = alpha_beta_gamma(sysm)
            p = [float(level.max()) for level in seq.levels]
            for k in range(1, 16):
                c_k = tail_coefficient(d, k)
                for k2 in range(k + 1, 26):
                    assert p[k] + c_k * gamma - 1e-9 <= p[k2] <= p[k] + c_k * beta + 1e-9


def test_limit_sandwich():
    for sysm in (golden_mean(), weighted_example()):
        log_rho = math.log(spectral_radius(sysm))
        log_r = math.log(r_E(sysm))
        low = pressure_certificate(sysm, 1.001, 1e-6)
        assert max(low.lo - log_rho, log_rho - low.hi, 0.0) <= 0.02
        high = pressure_certificate(sysm, 256.0, 1e-6)
        assert max(high.lo - log_r, log_r - high.hi, 0.0) <= 0.01


def test_parry_all_ones_is_uniform():
    trans, p = parry_transition(all_ones(2))
    assert np.allclose(trans.entries, 0.5, atol=1e-10)
    assert np.allclose(p.entries, 0.5, atol=1e-10)


def test_parry_golden_mean_stationary():
    trans, p = parry_transition(golden_mean(), tol=1e-13)
    assert np.abs(trans.entries.sum(axis=0) - 1.0).max() <= 1e-12
    assert np.allclose(trans.entries @ p.entries, p.entries, atol=1e-10)
    # stationary vector of the two-symbol chain: (phi^2, 1) / (phi^2 + 1)
    assert p.entries[0] == pytest.approx(PHI**2 / (PHI**2 + 1.0), abs=1e-9)


def test_parry_support_is_transpose_pattern():
    asymmetric = InteractionSystem.from_rows(
        [[1.0, 2.0, 0.0], [0.0, 1.0, 3.0], [0.5, 0.0, 1.0]]
    )
    for sysm in (golden_mean(), weighted_example(), asymmetric):
        trans, p = parry_transition(sysm)
        assert np.array_equal(trans.entries > 0, sysm.E.T > 0)
        assert np.allclose(trans.entries @ p.entries, p.entries, atol=1e-9)
