#!/usr/bin/env python3
"""Check the two ends of the pressure curve against their closed-form anchors.

As the branching parameter d drops to 1 the pressure approaches the log of
the Perron root of the interaction matrix (the one-dimensional subshift
value); as d grows it approaches the log of the largest column sum.  The
script certifies the pressure near both ends and prints the signed gaps.
"""

import math

from treepressure import InteractionSystem, verify_limits

LN10 = math.log(10.0)


def show(name, system, d_low=1.001, d_high=256.0):
    report = verify_limits(system, d_low=d_low, d_high=d_high)
    print(f"{name}:")
    print(f"  log10 rho(E)      = {report.log_rho / LN10:.6f}")
    print(f"  log10 max col sum = {report.log_r / LN10:.6f}")
    for tag, check in (("d -> 1+", report.low), ("d -> inf", report.high)):
        cert = check.certificate
        print(
            f"  {tag}: d = {check.d:g}, k = {cert.k}, "
            f"pressure = {cert.p_k / LN10:.6f} (log10), "
            f"gap = {check.gap / LN10:+.2e}, ok = {check.ok}"
        )
    print()


def main():
    show("golden mean [[1,1],[1,0]]", InteractionSystem.from_rows([[1, 1], [1, 0]]))
    show("weighted [[2,2],[1,0]]", InteractionSystem.from_rows([[2, 2], [1, 0]]))
    show("full shift (all ones)", InteractionSystem.from_rows([[1, 1], [1, 1]]))


if __name__ == "__main__":
    main()
