"""How the kernel and curvatures behave approaching each boundary circle.

The diagonal kernel blows up at a precise rate at each wall while the
curvatures, classical and higher order, settle to the disc values.
The probe below halves the distance to a wall repeatedly and prints
the scaled quantities so the convergence is visible digit by digit.
"""

import math

from annulus_metrics.metrics import boundary_asymptotics_probe, higher_curvature, sample

TWO_PI = 2.0 * math.pi


def main():
    r = 0.5
    ks = range(3, 13)
    outer = [1.0 - 2.0**-k for k in ks]
    inner = [r / (1.0 - 2.0**-k) for k in ks]

    po = boundary_asymptotics_probe(r, 0, 0, outer, "outer").values
    pi_ = boundary_asymptotics_probe(r, 0, 0, inner, "inner").values

    print(f"annulus r = {r}: halving the gap to each wall")
    print()
    print("scaled kernel, both normalized to approach 1:")
    print(f"  {'k':>3}  {'2pi S (1-rho^2), outer':>24}  {'(2pi/r) S (rho^2-r^2), inner':>30}")
    for k, vo, vi in zip(ks, po, pi_):
        print(f"  {k:>3}  {TWO_PI * vo:>24.12f}  {TWO_PI * vi / r:>30.12f}")
    print()

    print("curvatures at the closest pair of points:")
    for label, rho in (("outer", outer[-1]), ("inner", inner[-1])):
        ms = sample(r, rho)
        k2 = higher_curvature(r, rho, 2, "caratheodory")
        print(
            f"  {label:>6}: kappa_c = {ms.kappa_c:+.10f}   kappa_s = {ms.kappa_s:+.10f}"
            f"   order-2 = {k2:+.10f}"
        )
    print()
    print("every curvature forgets the annulus at the wall: the classical")
    print("ones go to -4 and the order-2 determinant version to -16, the")
    print("same ladder the disc produces.")


if __name__ == "__main__":
    main()
