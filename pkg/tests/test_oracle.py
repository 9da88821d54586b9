import math

import numpy as np
import pytest

from treepressure import (
    InadmissibleBlockError,
    InteractionSystem,
    OracleGuardError,
    TreeBlock,
    TreeSupport,
    admissible_blocks,
    block_weight,
    class_partition,
    finite_pressure,
    log_partition_function,
    omega_counts,
    partition_function,
    partition_function_enumerated,
    pattern_stats,
    pressure_sequence,
    stirling_residual,
    tail_coefficient,
    alpha_beta_gamma,
)
from sysdefs import all_ones, golden_mean, random_systems, weighted_example


def test_tree_support_counts():
    s = TreeSupport(2, 0, 2)
    assert list(s.levels) == [0, 1, 2]
    assert s.node_count == 7
    assert TreeSupport(3, 1, 2).node_count == 3 + 9
    with pytest.raises(ValueError):
        TreeSupport(2, 2, 1)
    with pytest.raises(ValueError):
        TreeSupport(0, 0, 1)


def test_block_weight_examples():
    G = golden_mean()
    support = TreeSupport(2, 0, 1)
    block = TreeBlock(support, ((0,), (0, 1)))
    assert block_weight(block, G) == 1.0

    E2 = weighted_example()
    assert block_weight(block, E2) == 2.0  # w0 * E[0,0] * E[1,0] = 1 * 2 * 1

    single = TreeBlock(TreeSupport(2, 0, 0), ((1,),))
    sysw = InteractionSystem.from_rows([[1, 1], [1, 0]], w=[2.0, 3.0])
    assert block_weight(single, sysw) == 3.0


def test_block_weight_rejects_inadmissible():
    G = golden_mean()
    bad = TreeBlock(TreeSupport(2, 0, 1), ((1,), (1, 0)))  # child 1 under parent 1
    assert not bad.is_admissible(G)
    with pytest.raises(InadmissibleBlockError):
        block_weight(bad, G)


def test_partition_function_small_counts():
    G = golden_mean()
    assert partition_function(G, 2, 0, 0) == 2.0
    assert partition_function(G, 2, 0, 1) == 5.0
    assert partition_function(G, 2, 0, 2) == 41.0
    sysw = InteractionSystem.from_rows([[1, 1], [1, 0]], w=[2.0, 3.0])
    assert partition_function(sysw, 2, 0, 0) == 5.0


def test_partition_function_independent_recursion():
    # labelings of the depth-h binary tree split by the root symbol:
    # z(h+1) = (z + o)^2, o(h+1) = z^2 from z(0) = o(0) = 1
    G = golden_mean()
    z, o = 1, 1
    for h in range(1, 11):
        z, o = (z + o) ** 2, z**2
        if h <= 3:  # value form stays within the enumeration guard
            assert partition_function(G, 2, 0, h) == float(z + o)
        assert log_partition_function(G, 2, 0, h) == pytest.approx(
            math.log(z + o), rel=1e-12
        )


def test_dp_equals_enumeration():
    rng = np.random.default_rng(43)
    cases = [
        (golden_mean(), 2, 0, 2),
        (golden_mean(), 2, 0, 3),
        (golden_mean(), 3, 0, 2),
        (golden_mean(), 2, 1, 2),
        (golden_mean(), 2, 2, 3),
        (weighted_example(), 2, 0, 2),
        (weighted_example(), 2, 1, 3),
        (all_ones(2), 2, 0, 2),
    ]
    for sysm in random_systems(4, rng, sizes=(2, 3)):
        cases.append((sysm, 2, 0, 2))
    for sysm, d, n, m in cases:
        dp = partition_function(sysm, d, n, m)
        raw = partition_function_enumerated(sysm, d, n, m)
        assert dp == pytest.approx(raw, rel=1e-9)
        assert log_partition_function(sysm, d, n, m) == pytest.approx(
            math.log(raw), rel=1e-9
        )


def test_enumeration_guard():
    with pytest.raises(OracleGuardError):
        partition_function_enumerated(golden_mean(), 2, 0, 5)
    with pytest.raises(OracleGuardError):
        log_partition_function(golden_mean(), 2, 0, 40)
    # DP path has a wider reach than raw enumeration
    assert math.isfinite(log_partition_function(golden_mean(), 2, 0, 20))


def _random_hard_systems(count, rng, sizes=(2, 3)):
    out = []
    while len(out) < count:
        k = int(rng.choice(sizes))
        E = (rng.random((k, k)) < 0.6).astype(float)
        if (E.sum(axis=0) > 0).all() and (E.sum(axis=1) > 0).all():
            out.append(InteractionSystem.from_rows(E))
    return out


def test_pressure_sequence_values_and_monotone():
    G = golden_mean()
    a = pressure_sequence(G, 2, 2)
    assert a == pytest.approx([math.log(2), math.log(5) / 3, math.log(41) / 7], abs=1e-12)

    # nonincreasing for hard-constraint systems with unit weights
    rng = np.random.default_rng(47)
    for sysm in [golden_mean(), all_ones(2)] + _random_hard_systems(5, rng):
        seq = pressure_sequence(sysm, 2, 12)
        assert all(b <= a2 + 1e-9 for a2, b in zip(seq, seq[1:]))


def test_pressure_sequence_weighted_approaches_from_below():
    # interaction weights above 1 undercount edge energy on shallow supports
    E2 = weighted_example()
    seq = pressure_sequence(E2, 2, 10)
    limit = finite_pressure(E2, 2.0, 25)
    assert all(b >= a2 - 1e-9 for a2, b in zip(seq, seq[1:]))
    assert seq[-1] <= limit


def test_pressure_sequence_full_matrix_is_constant():
    for k in (2, 3):
        seq = pressure_sequence(all_ones(k), 2, 6)
        assert seq == pytest.approx([math.log(k)] * 7, abs=1e-12)


def test_slab_shift_multiplicativity():
    # shifting a constant-depth slab one level down raises its partition
    # function to the d-th power (the slab splits into d independent copies)
    assert partition_function_enumerated(golden_mean(), 2, 1, 2) == pytest.approx(
        partition_function_enumerated(golden_mean(), 2, 0, 1) ** 2, rel=1e-12
    )
    assert partition_function_enumerated(weighted_example(), 2, 1, 3) == pytest.approx(
        partition_function_enumerated(weighted_example(), 2, 0, 2) ** 2, rel=1e-12
    )
    for sysm in (golden_mean(), weighted_example()):
        for depth in (0, 1, 3):
            for i in range(4):
                assert log_partition_function(sysm, 2, i + 1, i + depth + 1) == pytest.approx(
                    2 * log_partition_function(sysm, 2, i, i + depth), rel=1e-12
                )


def test_pattern_stats_constant_block():
    G = golden_mean()
    block = TreeBlock(TreeSupport(2, 0, 2), ((0,), (0, 0), (0, 0, 0, 0)))
    pair = pattern_stats(block, G)
    for v in pair.v:
        assert v.entries == pytest.approx([1.0, 0.0], abs=0)
    for M in pair.M:
        assert M.entries[:, 0] == pytest.approx([1.0, 0.0], abs=0)
        assert M.entries[:, 1] == pytest.approx([1.0, 0.0], abs=0)  # fallback column


def test_pattern_stats_hand_example():
    G = golden_mean()
    block = TreeBlock(TreeSupport(2, 0, 1), ((0,), (0, 1)))
    pair = pattern_stats(block, G)
    assert pair.v[0].entries == pytest.approx([1.0, 0.0])
    assert pair.v[1].entries == pytest.approx([0.5, 0.5])
    assert pair.M[0].entries[:, 0] == pytest.approx([0.5, 0.5])
    assert pair.M[0].entries[:, 1] == pytest.approx([1.0, 0.0])  # normalized E column


def test_pattern_stats_compatibility_everywhere():
    G = golden_mean()
    for support in (TreeSupport(2, 0, 2), TreeSupport(2, 1, 2)):
        for block in admissible_blocks(G, support):
            pair = pattern_stats(block, G)
            for j in range(len(pair.M)):
                pushed = pair.M[j].entries @ pair.v[j].entries
                assert np.abs(pushed - pair.v[j + 1].entries).max() <= 1e-12


def test_class_partition_reconciles_with_partition_function():
    for sysm, d, n, m in [
        (golden_mean(), 2, 0, 1),
        (golden_mean(), 2, 0, 2),
        (golden_mean(), 2, 1, 2),
        (weighted_example(), 2, 0, 2),
    ]:
        classes = class_partition(sysm, d, n, m)
        total = sum(classes.values())
        assert total == pytest.approx(partition_function(sysm, d, n, m), rel=1e-9)
        heaviest = max(classes.values())
        assert heaviest <= total <= len(classes) * heaviest + 1e-9


def test_class_partition_single_level_classes_are_frequency_vectors():
    G = golden_mean()
    classes = class_partition(G, 2, 1, 1)
    # two nodes, no constraint inside one level: counts (2,0), (1,1), (0,2)
    assert {key.level_counts[0] for key in classes} == {(2, 0), (1, 1), (0, 2)}
    assert all(key.child_counts == () for key in classes)
    weights = {key.level_counts[0]: wt for key, wt in classes.items()}
    assert weights == {(2, 0): 1.0, (1, 1): 2.0, (0, 2): 1.0}


def test_class_pattern_reconstruction():
    G = golden_mean()
    classes = class_partition(G, 2, 0, 1)
    for key in classes:
        pair = key.pattern(G)
        assert len(pair.v) == 2
        for j in range(len(pair.M)):
            pushed = pair.M[j].entries @ pair.v[j].entries
            assert np.abs(pushed - pair.v[j + 1].entries).max() <= 1e-12


def test_omega_counts_examples_and_bounds():
    G = golden_mean()
    counts = omega_counts(G, 2, 0, 0)
    assert counts.v_count == 2
    assert counts.v_bound == 4
    assert counts.m_count == 1  # the empty transition sequence
    assert counts.m_bound == 2**6

    full = all_ones(2)
    counts = omega_counts(full, 2, 0, 0)
    assert counts.v_count == 2 <= counts.v_bound

    for sysm, d, n, m in [
        (G, 2, 0, 1),
        (G, 2, 0, 2),
        (G, 2, 1, 2),
        (weighted_example(), 2, 0, 2),
        (all_ones(2), 2, 0, 2),
    ]:
        counts = omega_counts(sysm, d, n, m)
        assert 1 <= counts.v_count <= counts.v_bound
        assert 1 <= counts.m_count <= counts.m_bound


def test_stirling_residual_golden_mean_trend():
    G = golden_mean()
    r0 = stirling_residual(G, 2, 0, 1)
    assert 0.0 <= r0 <= 1.0
    r1 = stirling_residual(G, 2, 1, 1)
    r2 = stirling_residual(G, 2, 2, 1)
    assert r1 <= r0 + 0.1
    assert r2 <= r1 + 0.1


def test_stirling_residual_one_class_system():
    one = InteractionSystem.from_rows([[1.0]])
    assert stirling_residual(one, 2, 0, 2) <= 1e-12
    scaled = InteractionSystem.from_rows([[1.7]], w=[0.3])
    assert stirling_residual(scaled, 2, 0, 2) <= 1e-12


def test_pressure_bracket_against_recursion():
    # lower approximants from the recursion never exceed the oracle uppers,
    # in the regime where the a_n majorize the pressure (0/1 systems, or
    # unit weights with interaction entries at most 1)
    rng = np.random.default_rng(53)
    systems = [golden_mean(), all_ones(2)] + _random_hard_systems(3, rng)
    while len(systems) < 8:
        k = int(rng.choice((2, 3)))
        E = np.where(rng.random((k, k)) < 0.4, 0.0, rng.uniform(0.2, 1.0, (k, k)))
        if (E.sum(axis=0) > 0).all() and (E.sum(axis=1) > 0).all():
            systems.append(InteractionSystem.from_rows(E))
    for sysm in systems:
        _, _, gamma = alpha_beta_gamma(sysm)
        uppers = pressure_sequence(sysm, 2, 10)
        for k in (1, 3, 7, 12):
            lower = finite_pressure(sysm, 2, k) + tail_coefficient(2.0, k) * gamma
            assert all(lower <= a_n + 1e-9 for a_n in uppers)
