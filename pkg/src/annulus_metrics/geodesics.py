"""Geodesics of the invariant conformal densities on the annulus.

A conformal density m on A_r = {r < |z| < 1} measures paths by the
integral of m |dz|.  Affinely parametrized geodesics solve

    sigma'' = -(d/dz log m^2)(sigma) * (sigma')^2,

so the only field data the integrator needs is m and the logarithmic
z-derivative of m^2.  Rotation invariance of both densities gives two
conserved quantities along every geodesic: the metric speed
E = m |sigma'| and the angular momentum L = m^2 Im(conj(sigma) sigma').
The integrator is a Dormand-Prince 5(4) pair whose acceptance test also
bounds the per-step change of E, so long traces conserve the speed to
roughly the step tolerance without any re-projection.

Radial structure: both densities blow up like 1/dist at the boundary,
so f(rho) = rho * m(rho) tends to +inf at both ends and circle
geodesics sit at its interior critical points.  By the Clairaut
relation cos(psi) = L / (E f(rho)) an orbit can only visit radii where
f >= |L|/E, so the shape of f decides everything.  Two regimes occur:

  * waist curvature negative (e.g. s at r = 0.1): f is U-shaped, the
    single circle at the minimum is unstable, and every other geodesic
    eventually slides into a boundary funnel.  Orbits can hug the
    circle only as long as their distance from the separatrix level
    |L|/E = f(rho*) stays small; that distance grows by a factor
    exp(sqrt(-K) * L_circle) per winding, which caps the number of
    windings any double-precision launch can spend near the circle.

  * waist curvature positive (s for r below roughly 0.04): f is
    W-shaped, the symmetric circle at sqrt(r) is a stable local
    maximum of f flanked by two length-minimizing circles, and
    tangential launches near sqrt(r) oscillate radially forever.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError, InternalConsistencyError
from .hardy import HARD_CAP, Truncation

TWO_PI = 2.0 * math.pi

#: |z| within this distance of a boundary circle stops a trace as escaped.
ESCAPE_COLLAR = 1e-9

#: closure distances below this mean the trace returned to its start.
CLOSURE_TOL = 1e-6

# Dormand-Prince 5(4) tableau.  The last row of _A equals _B5, so the
# seventh stage sits at the accepted point and is reused as the first
# stage of the next step.
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (
    5179 / 57600,
    0.0,
    7571 / 16695,
    393 / 640,
    -92097 / 339200,
    187 / 2100,
    1 / 40,
)
_ERR = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


@dataclass(frozen=True)
class GeodesicState:
    """Position and velocity of a geodesic at one parameter value."""

    position: complex
    velocity: complex

    def __post_init__(self) -> None:
        p = complex(self.position)
        v = complex(self.velocity)
        if not (cmath.isfinite(p) and cmath.isfinite(v)):
            raise DomainError(f"state must be finite, got ({p!r}, {v!r})")
        object.__setattr__(self, "position", p)
        object.__setattr__(self, "velocity", v)


@dataclass(frozen=True)
class GeodesicTrace:
    """Sampled geodesic: one entry per accepted integrator step.

    speeds[i] is the metric speed m|v| at sample i, which is the
    conserved quantity; thetas[i] is the unwrapped angle swept since the
    start.  winding_count is the signed number of crossings of the
    radial ray opposite the initial point, length the metric length of
    the sampled path.
    """

    ts: tuple
    positions: tuple
    velocities: tuple
    speeds: tuple
    thetas: tuple
    winding_count: int
    length: float
    escaped: bool
    band_exit: str | None
    energy_drift: float
    angular_drift: float

    def final_state(self) -> GeodesicState:
        return GeodesicState(self.positions[-1], self.velocities[-1])

    def __len__(self) -> int:
        return len(self.ts)


class ClosedGeodesic(NamedTuple):
    rho_star: float
    length: float
    residual: float


class SpiralReport(NamedTuple):
    trace: GeodesicTrace
    rho_min: float
    rho_max: float
    closed: bool
    closure_distance: float
    launch_angle: float
    succeeded: bool


class _StageOutside(Exception):
    """An internal stage point left the open annulus."""


def _check_radius(r: float) -> float:
    if not (isinstance(r, (int, float)) and math.isfinite(r) and 0.0 < r < 1.0):
        raise DomainError(f"inner radius must lie strictly between 0 and 1, got {r!r}")
    return float(r)


class MetricField:
    """Evaluator for one density m and d/dz log m^2 at fixed (r, metric).

    Every quantity reduces to Laurent sums p_jk = sum over n of
    (n)_j (n)_k rho^(2n-j-k) / (1 + r^(2n+1)), all real, with the angular
    dependence a constant phase.  For fixed r the n-dependent weights are
    cached, so one evaluation is a single shared exponential array plus a
    few dot products.  Arrays grow by doubling as points approach the
    boundary.  Plain dot summation gives ~1e-15 relative accuracy, ample
    for integration at 1e-9 tolerance; tests cross-check this evaluator
    against the compensated kernel-jet route.
    """

    def __init__(self, r: float, metric: str, tr: Truncation = Truncation()):
        if metric not in ("c", "s"):
            raise DomainError(f"metric must be 'c' or 's', got {metric!r}")
        self.r = _check_radius(r)
        self.metric = metric
        self.tr = tr
        self._log_r = math.log(self.r)
        self._npairs = 0
        self._grow(256)

    def _grow(self, npairs: int) -> None:
        npairs = min(npairs, HARD_CAP)
        if npairs <= self._npairs:
            return
        p = np.arange(npairs, dtype=float)
        n = np.empty(2 * npairs)
        n[0::2] = p
        n[1::2] = -p - 1.0
        self._n = n
        self._two_n = 2.0 * n
        # log(1 + r^(2n+1)); logaddexp keeps the huge negative-n branch finite
        self._lg = np.logaddexp(0.0, (2.0 * n + 1.0) * self._log_r)
        self._w10 = n
        self._w11 = n * n
        self._w20 = n * (n - 1.0)
        self._w21 = n * n * (n - 1.0)
        self._npairs = npairs

    def _pairs_needed(self, q: float) -> int:
        # terms decay like |n|^3 * q^|n|; aim the bare tail at ~1e-18
        lq = -math.log(q)
        m0 = 42.0 / lq
        m = m0 + 4.0 * math.log(m0 + 8.0) / lq
        return max(32, int(m) + 1)

    def _sums(self, rho: float):
        q = max(rho * rho, (self.r / rho) ** 2)
        npairs = self._pairs_needed(q)
        while True:
            if npairs > HARD_CAP:
                raise ConvergenceError(
                    f"density series too slow at |z| = {rho:.6g} within {HARD_CAP} pairs"
                )
            self._grow(max(npairs, 2 * self._npairs if npairs > self._npairs else 0))
            m = 2 * npairs
            base = np.exp(self._two_n[:m] * math.log(rho) - self._lg[:m])
            # a-posteriori tail check on the heaviest weight, |n|^3
            growth = ((npairs + 4) / max(npairs - 3, 1)) ** 3
            qg = q * growth
            last = max(base[m - 2], base[m - 1]) * (npairs + 1) ** 3
            if qg < 1.0 and last * qg / (1.0 - qg) <= self.tr.tail_tol * max(
                float(np.sum(base)), 1e-300
            ):
                return base, m
            npairs *= 2

    def density_and_log_gradient(self, z: complex) -> tuple:
        """Return (m(z), d/dz log m(z)^2)."""
        z = complex(z)
        rho = abs(z)
        if not (self.r < rho < 1.0):
            raise DomainError(f"z = {z!r} is outside the open annulus ({self.r}, 1)")
        base, m = self._sums(rho)
        p00 = float(np.sum(base))
        p10 = float(base @ self._w10[:m]) / rho
        phase = complex(z.real / rho, -z.imag / rho)  # e^{-i arg z}
        if self.metric == "c":
            return p00, 2.0 * phase * (p10 / p00)
        r2 = rho * rho
        p11 = float(base @ self._w11[:m]) / r2
        p20 = float(base @ self._w20[:m]) / r2
        p21 = float(base @ self._w21[:m]) / (r2 * rho)
        a = p10 / p00
        h = p11 / p00 - a * a
        if h <= 0.0:
            raise InternalConsistencyError(
                f"log-kernel Laplacian came out nonpositive ({h}) at |z| = {rho:.6g}"
            )
        f21 = p21 / p00 - (2.0 * p11 * p10 + p10 * p20) / (p00 * p00) + 2.0 * a**3
        return math.sqrt(h), phase * (f21 / h)

    def density(self, z: complex) -> float:
        return self.density_and_log_gradient(z)[0]


def geodesic_rhs(
    r: float, metric: str, state: GeodesicState, tr: Truncation = Truncation()
) -> complex:
    """Acceleration -(d/dz log m^2) v^2 of the geodesic flow at a state."""
    field = MetricField(r, metric, tr)
    _, g = field.density_and_log_gradient(state.position)
    v = state.velocity
    return -g * v * v


def _eval(field: MetricField, z: complex, near: float):
    """Field evaluation for one integrator stage.

    Out-of-annulus points and series blowup right next to the boundary
    both surface as _StageOutside so the step controller can retreat.
    """
    try:
        return field.density_and_log_gradient(z)
    except DomainError:
        raise _StageOutside from None
    except ConvergenceError:
        rho = abs(z)
        if rho - field.r < near or 1.0 - rho < near:
            raise _StageOutside from None
        raise


def _integrate(
    field: MetricField,
    initial: GeodesicState,
    t_end: float,
    step_tol: float = 1e-9,
    band: tuple | None = None,
    project: bool = False,
    max_steps: int = 400_000,
) -> GeodesicTrace:
    r = field.r
    z = initial.position
    v = initial.velocity
    rho = abs(z)
    if not (r < rho < 1.0):
        raise DomainError(f"initial position {z!r} is outside the open annulus ({r}, 1)")
    if v == 0:
        raise DomainError("initial velocity must be nonzero")
    if not (isinstance(t_end, (int, float)) and math.isfinite(t_end) and t_end > 0):
        raise DomainError(f"t_end must be a positive finite number, got {t_end!r}")
    if not (0.0 < step_tol <= 1e-3):
        raise DomainError(f"step_tol must lie in (0, 1e-3], got {step_tol!r}")

    near = 1e-3 * (1.0 - r)
    m0, g0 = field.density_and_log_gradient(z)
    e0 = m0 * abs(v)
    l0 = m0 * m0 * (z.conjugate() * v).imag
    # scale for angular-momentum drift; l0 itself vanishes for radial shots
    l_scale = max(abs(l0), 1e-3 * e0 * m0 * rho)
    k1 = (v, -g0 * v * v)
    e_prev = e0

    ts = [0.0]
    zs = [z]
    vs = [v]
    speeds = [e0]
    thetas = [0.0]
    drift = 0.0
    angular = 0.0
    escaped = False
    band_exit = None

    t = 0.0
    theta = 0.0
    h = min(t_end, 0.02 * min(rho - r, 1.0 - rho) / abs(v))
    rejects = 0

    while t < t_end:
        h = min(h, t_end - t)
        fail = None
        errnorm = math.inf
        try:
            ks = [k1]
            for i in range(1, 6):
                row = _A[i]
                zz = z + h * sum(row[j] * ks[j][0] for j in range(i))
                vv = v + h * sum(row[j] * ks[j][1] for j in range(i))
                _, gi = _eval(field, zz, near)
                ks.append((vv, -gi * vv * vv))
            z_new = z + h * sum(_B5[j] * ks[j][0] for j in range(6))
            v_new = v + h * sum(_B5[j] * ks[j][1] for j in range(6))
            m_new, g_new = _eval(field, z_new, near)
            k7 = (v_new, -g_new * v_new * v_new)
            ks.append(k7)
            err_z = h * sum(_ERR[j] * ks[j][0] for j in range(7))
            err_v = h * sum(_ERR[j] * ks[j][1] for j in range(7))
            sc_z = 1e-30 + step_tol * max(abs(z), abs(z_new))
            sc_v = 1e-30 + step_tol * max(abs(v), abs(v_new))
            errnorm = math.sqrt(0.5 * ((abs(err_z) / sc_z) ** 2 + (abs(err_v) / sc_v) ** 2))
            if errnorm > 1.0:
                fail = "accuracy"
            elif abs(z_new - z) > 0.2 * abs(z):
                fail = "jump"
            else:
                # gross conservation guard only; the accuracy test above
                # is what actually sizes the steps
                e_new = m_new * abs(v_new)
                if abs(e_new - e_prev) > max(4.0 * step_tol, 1e-12) * e0:
                    fail = "energy"
                elif project:
                    # re-impose the two first integrals (speed and
                    # angular momentum); along unstable waists this is
                    # what keeps the trace on its Clairaut level set
                    rho_n = abs(z_new)
                    u_r = z_new / rho_n
                    w = u_r.conjugate() * v_new
                    b_t = l0 / (m_new * m_new * rho_n)
                    a_sq = (e0 / m_new) ** 2 - b_t * b_t
                    a_t = math.copysign(math.sqrt(max(a_sq, 0.0)), w.real)
                    v_proj = complex(a_t, b_t) * u_r
                    if abs(v_proj - v_new) > 1e-6 * abs(v_new):
                        fail = "energy"
                    else:
                        v_new = v_proj
                        k7 = (v_new, -g_new * v_new * v_new)
                        e_new = m_new * abs(v_new)
        except _StageOutside:
            fail = "outside"

        if fail is None:
            t += h
            dtheta = cmath.phase(z_new / z)
            theta += dtheta
            z, v = z_new, v_new
            k1 = k7
            e_prev = e_new
            drift = max(drift, abs(e_new - e0) / e0)
            l_new = m_new * m_new * (z.conjugate() * v).imag
            angular = max(angular, abs(l_new - l0) / l_scale)
            ts.append(t)
            zs.append(z)
            vs.append(v)
            speeds.append(e_new)
            thetas.append(theta)
            rho = abs(z)
            if rho - r <= ESCAPE_COLLAR or 1.0 - rho <= ESCAPE_COLLAR:
                escaped = True
                break
            if band is not None:
                if rho <= band[0]:
                    band_exit = "inner"
                    break
                if rho >= band[1]:
                    band_exit = "outer"
                    break
            if len(ts) > max_steps:
                raise ConvergenceError(f"geodesic exceeded {max_steps} accepted steps")
            h *= min(5.0, max(0.2, 0.9 * errnorm ** -0.2)) if errnorm > 0 else 5.0
            rejects = 0
        else:
            if fail == "accuracy":
                h *= min(0.9, max(0.1, 0.9 * errnorm ** -0.2))
            else:
                h *= 0.5
            rejects += 1
            if fail == "outside" and h < 1e-10:
                # the trajectory is pressed against the boundary harder
                # than the series can resolve
                escaped = True
                break
            if rejects > 80 or h < 1e-15 * max(t, 1.0):
                raise ConvergenceError(
                    f"step size collapsed at t = {t:.6g} (|z| = {abs(z):.6g})"
                )

    length = 0.0
    for i in range(1, len(ts)):
        length += 0.5 * (speeds[i] + speeds[i - 1]) * (ts[i] - ts[i - 1])
    winding = math.floor((thetas[-1] + math.pi) / TWO_PI)
    return GeodesicTrace(
        ts=tuple(ts),
        positions=tuple(zs),
        velocities=tuple(vs),
        speeds=tuple(speeds),
        thetas=tuple(thetas),
        winding_count=int(winding),
        length=length,
        escaped=escaped,
        band_exit=band_exit,
        energy_drift=drift,
        angular_drift=angular,
    )


def integrate(
    r: float,
    metric: str,
    initial: GeodesicState,
    t_end: float,
    step_tol: float = 1e-9,
    tr: Truncation = Truncation(),
    project: bool = False,
) -> GeodesicTrace:
    """Trace the geodesic from the given state for parameter length t_end.

    The trace stops early, with escaped=True, if the trajectory comes
    within ESCAPE_COLLAR of a boundary circle.  With project=True each
    accepted step is pulled back onto the level set of the two first
    integrals (metric speed and angular momentum), the standard manifold
    projection for integrable flows.
    """
    field = MetricField(r, metric, tr)
    return _integrate(field, initial, t_end, step_tol, project=project)


def find_closed_geodesic(
    r: float, metric: str, tr: Truncation = Truncation()
) -> ClosedGeodesic:
    """Radius and length of the length-minimizing closed geodesic circle.

    A circle |z| = rho is a geodesic exactly when rho * m(rho) is
    critical, i.e. when R(rho) = 1 + rho * Re(d/dz log m^2)(rho)
    vanishes.  Local minima of rho * m(rho) are located on a grid,
    verified to be interior, and the smallest is polished by root
    bracketing.  In the U-shaped regime there is exactly one circle; in
    the W-shaped regime (positive waist curvature at small r) the two
    flanking minima tie by the inversion symmetry and one of them is
    returned, while the symmetric circle at sqrt(r) survives as a
    saddle, not reported here.
    """
    field = MetricField(r, metric, tr)

    def radial_condition(rho: float) -> float:
        _, g = field.density_and_log_gradient(complex(rho, 0.0))
        return 1.0 + rho * g.real

    w = 1e-3 * (1.0 - field.r)
    lo, hi = field.r + w, 1.0 - w
    grid = np.exp(np.linspace(math.log(lo), math.log(hi), 121))
    fvals = np.array([rho * field.density(rho) for rho in grid])
    jmin = int(np.argmin(fvals))
    if jmin == 0 or jmin == len(grid) - 1:
        raise InternalConsistencyError(
            "minimum of rho * m(rho) sits at the search boundary; the density"
            " is not behaving like a complete metric"
        )
    rvals = [radial_condition(rho) for rho in grid]
    ups = [i for i in range(len(grid) - 1) if rvals[i] < 0.0 <= rvals[i + 1]]
    downs = [i for i in range(len(grid) - 1) if rvals[i] >= 0.0 > rvals[i + 1]]
    if len(ups) not in (1, 2) or len(downs) != len(ups) - 1:
        raise InternalConsistencyError(
            f"unexpected sign pattern of the circle condition:"
            f" {len(ups)} minima and {len(downs)} interior maxima on the grid"
        )
    i = min(ups, key=lambda i: min(fvals[i], fvals[i + 1]))
    rho_star = brentq(radial_condition, grid[i], grid[i + 1], xtol=1e-14, rtol=8.9e-16)
    residual = abs(radial_condition(rho_star))
    length = TWO_PI * rho_star * field.density(rho_star)
    return ClosedGeodesic(rho_star=float(rho_star), length=float(length), residual=residual)


def spiral_trace(
    r: float,
    metric: str,
    z0: complex,
    t_end: float,
    band: tuple | None = None,
    step_tol: float = 1e-9,
    tr: Truncation = Truncation(),
) -> SpiralReport:
    """Launch a winding, non-closing trace through z0 confined to a band.

    The launch direction is chosen by shooting: tilt angles away from
    the counterclockwise tangent are scanned (positive tilt points
    inward), each integrated with first-integral projection and early
    exit on leaving the band, and exits to opposite sides bracket a
    bisection.  The first direction that survives the whole window
    inside the band is reported with succeeded=True.

    Around an unstable waist no double-precision launch can survive
    arbitrarily long: the distance from the separatrix level grows by
    exp(sqrt(-K) * L_circle) per winding, so the best achievable trace
    hugs the circle for roughly 36 / (sqrt(-K) * L_circle) windings on
    the way in and as many on the way out.  In that regime the report
    carries the longest-lived trace found and succeeded=False if it
    still exits before t_end.
    """
    field = MetricField(r, metric, tr)
    z0 = complex(z0)
    rho0 = abs(z0)
    if not (field.r < rho0 < 1.0):
        raise DomainError(f"z0 = {z0!r} is outside the open annulus ({r}, 1)")
    circle = find_closed_geodesic(r, metric, tr)
    if abs(rho0 - circle.rho_star) < 1e-6:
        raise DomainError(
            f"|z0| = {rho0:.8g} sits on the closed geodesic circle"
            f" (rho* = {circle.rho_star:.8g}); a spiral launch is degenerate there"
        )
    if band is None:
        band = (field.r + 0.02, 0.98)
    if not (field.r < band[0] < band[1] < 1.0):
        raise DomainError(f"band {band!r} must be strictly inside the annulus")
    if not (band[0] < rho0 < band[1]):
        raise DomainError(f"z0 = {z0!r} lies outside the band {band!r}")

    u = z0 / rho0
    m0 = field.density(z0)

    def attempt(psi: float) -> GeodesicTrace:
        v0 = (1j * u * math.cos(psi) - u * math.sin(psi)) / m0
        return _integrate(
            field, GeodesicState(z0, v0), t_end, step_tol, band=band, project=True
        )

    def finish(psi: float, trace: GeodesicTrace, ok: bool) -> SpiralReport:
        radii = [abs(p) for p in trace.positions]
        v0 = trace.velocities[0]
        dist = math.inf
        for i in range(1, len(trace)):
            if -math.pi <= trace.thetas[i] <= math.pi:
                continue
            d = abs(trace.positions[i] - z0) + abs(trace.velocities[i] - v0)
            dist = min(dist, d)
        return SpiralReport(
            trace=trace,
            rho_min=min(radii),
            rho_max=max(radii),
            closed=dist < CLOSURE_TOL,
            closure_distance=dist,
            launch_angle=psi,
            succeeded=ok,
        )

    def side(trace: GeodesicTrace) -> str:
        if trace.band_exit is not None:
            return trace.band_exit
        return "inner" if abs(trace.positions[-1]) < circle.rho_star else "outer"

    best = None

    def consider(psi: float, trace: GeodesicTrace):
        nonlocal best
        if best is None or trace.ts[-1] > best[1].ts[-1]:
            best = (psi, trace)

    exits = {}
    for psi in (0.0, 0.1, -0.1, 0.25, -0.25, 0.45, -0.45, 0.7, -0.7):
        trace = attempt(psi)
        consider(psi, trace)
        if not trace.escaped and trace.band_exit is None:
            return finish(psi, trace, True)
        exits[psi] = side(trace)

    inner = [p for p, s in exits.items() if s == "inner"]
    outer = [p for p, s in exits.items() if s == "outer"]
    if inner and outer:
        a = min(outer, key=lambda p: min(abs(p - q) for q in inner))
        b = min(inner, key=lambda p: abs(p - a))
        for _ in range(60):
            mid = 0.5 * (a + b)
            if mid == a or mid == b:
                break
            trace = attempt(mid)
            consider(mid, trace)
            if not trace.escaped and trace.band_exit is None:
                return finish(mid, trace, True)
            if side(trace) == "outer":
                a = mid
            else:
                b = mid
    return finish(best[0], best[1], False)
