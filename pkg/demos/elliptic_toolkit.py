"""The rectangular-lattice Weierstrass layer behind the closed forms.

Everything the package computes in closed form routes through the
Weierstrass functions on the lattice with half-periods (-log r, i pi).
This script builds a context, evaluates wp, zeta, and sigma at a point,
and verifies the relations those functions must satisfy.
"""

import cmath
import math

from annulus_metrics.elliptic import (
    make_elliptic_context,
    sigma,
    wp,
    wp_prime,
    zeta,
)


def main():
    r = 0.4
    ctx = make_elliptic_context(r)
    print(f"lattice for r = {r}: omega1 = {ctx.omega1:.12f}, omega3 = i pi")
    print(f"  invariants  g2 = {ctx.g2:.12f}, g3 = {ctx.g3:.12f}")
    print(f"  half-period values  e1 = {ctx.e1:.12f}, e2 = {ctx.e2:.12f}, e3 = {ctx.e3:.12f}")
    print(f"  quasi-periods  eta1 = {ctx.eta1:.12f}, eta3 = i {ctx.eta3_im:.12f}")
    print()

    z = 0.3 + 0.2j
    P = wp(ctx, z)
    Pp = wp_prime(ctx, z)
    Z = zeta(ctx, z)
    S = sigma(ctx, z)
    print(f"values at z = {z}:")
    print(f"  wp(z)     = {P:.12f}")
    print(f"  wp'(z)    = {Pp:.12f}")
    print(f"  zeta(z)   = {Z:.12f}")
    print(f"  sigma(z)  = {S:.12f}")
    print()

    ode = abs(Pp**2 - (4 * P**3 - ctx.g2 * P - ctx.g3)) / (1 + abs(P)) ** 3
    print(f"differential equation wp'^2 = 4 wp^3 - g2 wp - g3: residual {ode:.3e}")

    sum_e = ctx.e1 + ctx.e2 + ctx.e3
    print(f"root sum e1 + e2 + e3 = {sum_e:.3e}  (zero for a depressed cubic)")

    legendre = ctx.eta1 * math.pi - ctx.omega1 * ctx.eta3_im
    print(f"Legendre relation eta1 omega3 - eta3 omega1 = i pi/2: residual {abs(legendre - math.pi / 2):.3e}")

    quasi_zeta = zeta(ctx, z + 2 * ctx.omega1) - Z - 2 * ctx.eta1
    print(f"zeta quasi-periodicity along 2 omega1: residual {abs(quasi_zeta):.3e}")

    lhs = sigma(ctx, z + 2 * ctx.omega1)
    rhs = -S * cmath.exp(2 * ctx.eta1 * (z + ctx.omega1))
    print(f"sigma quasi-periodicity along 2 omega1: residual {abs(lhs - rhs) / abs(rhs):.3e}")


if __name__ == "__main__":
    main()
