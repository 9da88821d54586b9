#!/usr/bin/env python3
"""Walk the exact enumeration oracle on the golden-mean system at d = 2.

Small partition function values, the normalized pressure sequence a_n, the
pattern classes of the depth-2 tree, the distinct-pattern counts with their
counting bounds, and the two-sided bracket pinning the pressure between the
recursion's lower approximants and the oracle's upper ones.
"""

import math

from treepressure import (
    InteractionSystem,
    bracket_report,
    class_partition,
    omega_counts,
    partition_function,
    partition_function_enumerated,
    pressure_sequence,
    stirling_residual,
)


def main():
    G = InteractionSystem.from_rows([[1, 1], [1, 0]])

    print("partition function of the rooted binary tree, levels 0..m:")
    for m in range(4):
        dp = partition_function(G, 2, 0, m)
        raw = partition_function_enumerated(G, 2, 0, m)
        print(f"  m = {m}: DP = {dp:.0f}, enumeration = {raw:.0f}")
    print()

    print("normalized sequence a_n = log Z_n / nodes (nats), via log-space DP:")
    for n, a_n in enumerate(pressure_sequence(G, 2, 10)):
        print(f"  a_{n:<2d} = {a_n:.8f}")
    print()

    classes = class_partition(G, 2, 0, 2)
    total = sum(classes.values())
    print(f"pattern classes on levels 0..2: {len(classes)} classes, total weight {total:.0f}")
    heaviest = max(classes.items(), key=lambda kv: kv[1])
    print(f"  heaviest class weight {heaviest[1]:.0f}, level counts {heaviest[0].level_counts}")
    print()

    counts = omega_counts(G, 2, 0, 2)
    print("distinct pattern sequences on levels 0..2:")
    print(f"  frequency sequences: {counts.v_count} (bound {counts.v_bound})")
    print(f"  transition sequences: {counts.m_count} (bound {counts.m_bound})")
    print()

    print("entropy-form residual of the heaviest class (shrinks with n):")
    for n in range(3):
        print(f"  levels {n}..{n + 1}: residual = {stirling_residual(G, 2, n, 1):.6f}")
    print()

    report = bracket_report(G, 2, k_max=20, n_max=18)
    print("bracket between recursion lowers (k <= 20) and DP uppers (n <= 18):")
    print(f"  max lower = {report.max_lower:.9f}")
    print(f"  min upper = {report.min_upper:.9f}")
    print(f"  width     = {report.width:.2e}")
    print(f"  midpoint  = {report.midpoint:.9f}  (~{report.midpoint / math.log(10):.6f} in log10)")


if __name__ == "__main__":
    main()
