"""Hardy-space data on annuli: basis norms, moment sums, kernel series.

The round annulus A(r_in, r_out) has the monomials z^n as an orthogonal
basis of the Hardy space of its boundary, with squared norms
alpha_n = 2*pi*(r_in^(2n+1) + r_out^(2n+1)).  Everything downstream
(kernel diagonal, maximal domain functions, extremal functions) reduces
to weighted sums of 1/alpha_n.

Summation conventions used throughout:
  - terms are paired n with -n-1 and the pairs summed in ascending n;
  - pair values are accumulated with math.fsum;
  - magnitudes are built as exponentials of logarithms, so sweeps down
    to r = 1e-8 and beyond stay inside double range;
  - truncation starts at Truncation.n_max pairs and doubles until the
    geometric tail bound drops below tail_tol relative to the sum of
    absolute values, up to a hard cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    ConvergenceError,
    DomainError,
    InternalConsistencyError,
    RangeError,
)
from .jets import MAX_ORDER, WirtingerJet

TWO_PI = 2.0 * math.pi

HARD_CAP = 2**20


@dataclass(frozen=True)
class GeneralAnnulus:
    """Round annulus {z : r_in < |z| < r_out}."""

    r_in: float
    r_out: float

    def __post_init__(self):
        if not (
            isinstance(self.r_in, (int, float))
            and isinstance(self.r_out, (int, float))
            and math.isfinite(self.r_in)
            and math.isfinite(self.r_out)
            and 0.0 < self.r_in < self.r_out
        ):
            raise DomainError(
                f"annulus radii must satisfy 0 < r_in < r_out, got ({self.r_in!r}, {self.r_out!r})"
            )

    @property
    def contains_one(self) -> bool:
        return self.r_in < 1.0 < self.r_out


def unit_annulus(r: float) -> GeneralAnnulus:
    """The normalized annulus A_r = {r < |z| < 1}."""
    if not (isinstance(r, (int, float)) and math.isfinite(r) and 0.0 < r < 1.0):
        raise DomainError(f"inner radius must lie strictly between 0 and 1, got {r!r}")
    return GeneralAnnulus(float(r), 1.0)


@dataclass(frozen=True)
class Truncation:
    """Summation budget: initial pair count and relative tail tolerance."""

    n_max: int = 512
    tail_tol: float = 1e-12

    def __post_init__(self):
        if not (isinstance(self.n_max, int) and self.n_max >= 1):
            raise DomainError(f"n_max must be a positive integer, got {self.n_max!r}")
        if not (
            isinstance(self.tail_tol, (int, float))
            and math.isfinite(self.tail_tol)
            and self.tail_tol > 0.0
        ):
            raise DomainError(f"tail_tol must be positive, got {self.tail_tol!r}")


@dataclass(frozen=True)
class MomentSums:
    """Weighted sums s_j = sum_n n^j / alpha_n with summation metadata."""

    s: tuple
    annulus: GeneralAnnulus
    n_used: int
    tail_bound: float


@dataclass(frozen=True)
class ExtremalCoefficients:
    """Orthogonality coefficients for the derivative-extremal functions.

    gap is the Cauchy-Schwarz margin s0*s2 - s1^2 that conditions the
    2x2 solve for (gamma, delta).
    """

    beta: float
    gamma: float
    delta: float
    gap: float


class JAtOne(NamedTuple):
    j0: float
    j1: float
    j2: float
    coeffs: ExtremalCoefficients


class JOnAr(NamedTuple):
    j0: float
    j1: float
    j2: float


def _logaddexp(x: float, y: float) -> float:
    if x == y:
        return x + math.log(2.0)
    m = x if x > y else y
    return m + math.log1p(math.exp(-abs(x - y)))


def _log_alpha(log_rin: float, log_rout: float, n) -> np.ndarray:
    """log alpha_n, vectorized over n (numpy array or scalar)."""
    e = 2 * np.asarray(n, dtype=float) + 1.0
    return math.log(TWO_PI) + np.logaddexp(e * log_rin, e * log_rout)


def alpha_n(a: GeneralAnnulus, n: int) -> float:
    """Squared Hardy norm of z^n on the annulus boundary."""
    la = float(
        _log_alpha(math.log(a.r_in), math.log(a.r_out), int(n))
    )
    if la > 709.0:
        raise RangeError(f"alpha overflow at n={n} for annulus ({a.r_in}, {a.r_out})")
    return math.exp(la)


def _doubling_schedule(tr: Truncation):
    n = tr.n_max
    while n <= HARD_CAP:
        yield n
        n *= 2


def moment_sums(a: GeneralAnnulus, j_max: int, tr: Truncation = Truncation()) -> MomentSums:
    """s_j = sum over all integers n of n^j / alpha_n, j = 0..j_max.

    The annulus must contain the unit circle, which is what makes the
    two geometric tails decay.  Pairs (n, -n-1) are summed together in
    ascending n with compensated accumulation.
    """
    if not isinstance(j_max, int) or not (0 <= j_max <= 8):
        raise DomainError(f"j_max must be an integer in [0, 8], got {j_max!r}")
    if not a.contains_one:
        raise DomainError(
            f"moment sums require r_in < 1 < r_out, got ({a.r_in}, {a.r_out})"
        )
    log_rin = math.log(a.r_in)
    log_rout = math.log(a.r_out)

    for n_pairs in _doubling_schedule(tr):
        n = np.arange(n_pairs + 1)
        inv_pos = np.exp(-_log_alpha(log_rin, log_rout, n))
        inv_neg = np.exp(-_log_alpha(log_rin, log_rout, -n - 1))
        values = []
        tails = []
        ok = True
        for j in range(j_max + 1):
            wp_ = n.astype(float) ** j if j else np.ones_like(inv_pos)
            wn = (-1.0) ** j * (n + 1.0) ** j if j else np.ones_like(inv_neg)
            pairs = wp_ * inv_pos + wn * inv_neg
            total = math.fsum(pairs)
            abs_scale = math.fsum(np.abs(wp_ * inv_pos)) + math.fsum(np.abs(wn * inv_neg))
            log_growth = j * math.log1p(1.0 / n_pairs)
            # Decay ratios in log space: raw r_out**2 can overflow for
            # very wide annuli even though the ratio itself is tiny.
            lq_pos = log_growth - 2 * log_rout
            lq_neg = log_growth + 2 * log_rin
            q_pos = math.exp(lq_pos) if lq_pos < 0 else 1.0
            q_neg = math.exp(lq_neg) if lq_neg < 0 else 1.0
            t_pos = abs(wp_[-1] * inv_pos[-1])
            t_neg = abs(wn[-1] * inv_neg[-1])
            if q_pos >= 1.0 or q_neg >= 1.0:
                ok = False
                break
            tail = t_pos * q_pos / (1 - q_pos) + t_neg * q_neg / (1 - q_neg)
            if tail > tr.tail_tol * max(abs_scale, 1e-300):
                ok = False
                break
            values.append(total)
            tails.append(tail)
        if ok:
            return MomentSums(tuple(values), a, n_pairs, max(tails))
    raise ConvergenceError(
        f"moment sums did not meet tail_tol={tr.tail_tol} within {HARD_CAP} pairs"
    )


def szego_kernel(r: float, z: complex, w: complex, tr: Truncation = Truncation()) -> complex:
    """Boundary reproducing kernel S(z, w) of the annulus {r < |.| < 1}."""
    if not (isinstance(r, (int, float)) and math.isfinite(r) and 0.0 < r < 1.0):
        raise DomainError(f"inner radius must lie strictly between 0 and 1, got {r!r}")
    z = complex(z)
    w = complex(w)
    for name, p in (("z", z), ("w", w)):
        if not (r < abs(p) < 1.0):
            raise DomainError(f"{name} = {p!r} is outside the open annulus ({r}, 1)")
    t = z * w.conjugate()
    log_t = math.log(abs(t))
    theta = math.atan2(t.imag, t.real)
    log_r = math.log(r)

    for n_pairs in _doubling_schedule(tr):
        n = np.arange(n_pairs + 1)
        # 1/(1+r^(2n+1)) and its negative-index mirror r^(2n+1)/(1+r^(2n+1))
        lg = np.logaddexp(0.0, (2 * n + 1) * log_r)
        mag_pos = np.exp(n * log_t - lg)
        mag_neg = np.exp(-(n + 1) * log_t + (2 * n + 1) * log_r - lg)
        ang = (n + 0.0) * theta
        ang_neg = -(n + 1.0) * theta
        re = math.fsum(mag_pos * np.cos(ang)) + math.fsum(mag_neg * np.cos(ang_neg))
        im = math.fsum(mag_pos * np.sin(ang)) + math.fsum(mag_neg * np.sin(ang_neg))
        abs_scale = math.fsum(mag_pos) + math.fsum(mag_neg)
        q_pos = abs(t)
        q_neg = r * r / abs(t)
        tail = mag_pos[-1] * q_pos / (1 - q_pos) + mag_neg[-1] * q_neg / (1 - q_neg)
        if tail <= tr.tail_tol * max(abs_scale, 1e-300):
            return complex(re, im) / TWO_PI
    raise ConvergenceError(
        f"kernel series too slow for |z w̄| = {abs(t):.6g} within {HARD_CAP} pairs"
    )


def _falling(n: np.ndarray, j: int) -> np.ndarray:
    out = np.ones_like(n, dtype=float)
    for i in range(j):
        out = out * (n - i)
    return out


def szego_kernel_jet(
    r: float, z: complex, order: int, tr: Truncation = Truncation()
) -> WirtingerJet:
    """Jet of the kernel diagonal S(z, z), mixed derivatives to order.

    Each entry (j, k) carries the constant phase e^{i(k-j) arg z} times
    a real weighted sum, so the table is assembled from shared
    magnitude arrays.
    """
    if not (isinstance(r, (int, float)) and math.isfinite(r) and 0.0 < r < 1.0):
        raise DomainError(f"inner radius must lie strictly between 0 and 1, got {r!r}")
    if not isinstance(order, int) or not (0 <= order <= MAX_ORDER):
        raise DomainError(f"order must be an integer in [0, {MAX_ORDER}], got {order!r}")
    z = complex(z)
    rho = abs(z)
    if not (r < rho < 1.0):
        raise DomainError(f"z = {z!r} is outside the open annulus ({r}, 1)")
    theta = math.atan2(z.imag, z.real)
    log_rho = math.log(rho)
    log_r = math.log(r)

    for n_pairs in _doubling_schedule(tr):
        npos = np.arange(n_pairs + 1)
        nneg = -npos - 1
        lg_pos = np.logaddexp(0.0, (2 * npos + 1) * log_r)
        lg_neg = np.logaddexp(0.0, (2 * nneg + 1) * log_r)
        table = np.zeros((order + 1, order + 1), dtype=complex)
        ok = True
        worst_margin = None
        for j in range(order + 1):
            for k in range(order + 1):
                w_pos = _falling(npos.astype(float), j) * _falling(npos.astype(float), k)
                w_neg = _falling(nneg.astype(float), j) * _falling(nneg.astype(float), k)
                m_pos = w_pos * np.exp((2 * npos - j - k) * log_rho - lg_pos)
                m_neg = w_neg * np.exp((2 * nneg - j - k) * log_rho - lg_neg)
                total = math.fsum(m_pos) + math.fsum(m_neg)
                abs_scale = math.fsum(np.abs(m_pos)) + math.fsum(np.abs(m_neg))
                growth = ((n_pairs + 1 + order) / max(n_pairs - order, 1)) ** (j + k)
                q_pos = growth * rho * rho
                q_neg = growth * (r / rho) ** 2
                if q_pos >= 1.0 or q_neg >= 1.0:
                    ok = False
                    break
                tail = abs(m_pos[-1]) * q_pos / (1 - q_pos) + abs(m_neg[-1]) * q_neg / (
                    1 - q_neg
                )
                if tail > tr.tail_tol * max(abs_scale, 1e-300):
                    ok = False
                    break
                phase = complex(math.cos((k - j) * theta), math.sin((k - j) * theta))
                table[j, k] = total / TWO_PI * phase
                worst_margin = tail
            if not ok:
                break
        if ok:
            return WirtingerJet(order, table)
    raise ConvergenceError(
        f"kernel jet series too slow at |z| = {rho:.6g} within {HARD_CAP} pairs"
    )


def j_functions_at_one(a: GeneralAnnulus, tr: Truncation = Truncation()) -> JAtOne:
    """Maximal domain functions J0, J1, J2 at the point 1.

    J0 is the plain moment sum; J1 and J2 come from projecting away the
    lower-order vanishing conditions, which reduces to the closed 2x2
    solve for (gamma, delta).
    """
    ms = moment_sums(a, 4, tr)
    s0, s1, s2, s3, s4 = ms.s
    if s0 <= 0:
        raise InternalConsistencyError(f"s0 must be positive, got {s0}")
    gap = s0 * s2 - s1 * s1
    if gap <= 0:
        # The gap scales like (r_in / r_out) * s0^2; once that ratio is
        # below double-precision resolution the moment matrix rounds to
        # rank one and no amount of summation care recovers it.
        if a.r_in / a.r_out < 1e-13:
            raise RangeError(
                "Cauchy-Schwarz gap underflows double precision for the"
                f" annulus ({a.r_in!r}, {a.r_out!r})"
            )
        raise InternalConsistencyError(
            f"Cauchy-Schwarz gap s0*s2 - s1^2 = {gap} is not positive; summation is broken"
        )
    beta = s1 / s0
    det = s1 * s1 - s0 * s2  # = -gap, nonzero by the check above
    gamma = (s1 * s2 - s0 * s3) / det
    delta = (s1 * s3 - s2 * s2) / det
    j0 = s0
    j1 = gap / s0
    j2 = s4 - gamma * s3 - delta * s2
    if j1 <= 0 or j2 <= 0:
        raise InternalConsistencyError(f"J values must be positive, got J1={j1}, J2={j2}")
    return JAtOne(j0, j1, j2, ExtremalCoefficients(beta, gamma, delta, gap))


def j_functions_on_A_r(r: float, lam: float, tr: Truncation = Truncation()) -> JOnAr:
    """J0, J1, J2 for the annulus {r < |.| < 1} at the point r^lambda.

    Uses the scaling map w = z/r^lambda, which sends A_r to the annulus
    (r^(1-lambda), r^(-lambda)) containing 1; a j-th derivative picks up
    r^(-(2j+1)lambda) on the way back.
    """
    if not (isinstance(r, (int, float)) and math.isfinite(r) and 0.0 < r < 1.0):
        raise DomainError(f"inner radius must lie strictly between 0 and 1, got {r!r}")
    if not (isinstance(lam, (int, float)) and 0.0 < lam < 1.0):
        raise DomainError(f"lambda must lie strictly between 0 and 1, got {lam!r}")
    sub = GeneralAnnulus(r ** (1.0 - lam), r ** (-lam))
    at_one = j_functions_at_one(sub, tr)
    log_r = math.log(r)
    out = []
    for j, val in enumerate((at_one.j0, at_one.j1, at_one.j2)):
        log_scale = -(2 * j + 1) * lam * log_r
        if log_scale + math.log(val) > 709.0:
            raise RangeError(
                f"J{j} rescaling overflow at r={r!r}, lambda={lam!r}"
                f" (exponent {log_scale + math.log(val):.1f})"
            )
        out.append(val * math.exp(log_scale))
    return JOnAr(*out)


def extremal_function_value(
    a: GeneralAnnulus, which: str, z: complex, tr: Truncation = Truncation()
) -> complex:
    """Value at z of one of the three derivative-extremal basis series.

    which selects the polynomial weight: "f0" -> 1, "f_beta" -> n-beta,
    "f_gammadelta" -> n^2 - gamma*n - delta, with the coefficients that
    make the lower-order values at 1 vanish.
    """
    if which not in ("f0", "f_beta", "f_gammadelta"):
        raise DomainError(f"unknown extremal function {which!r}")
    z = complex(z)
    rho = abs(z)
    if not (a.r_in <= rho <= a.r_out):
        raise DomainError(f"z = {z!r} is outside the closed annulus ({a.r_in}, {a.r_out})")
    if which == "f0":
        poly = (1.0, 0.0, 0.0)
        deg = 0
    elif which == "f_beta":
        cf = j_functions_at_one(a, tr).coeffs
        poly = (-cf.beta, 1.0, 0.0)
        deg = 1
    else:
        cf = j_functions_at_one(a, tr).coeffs
        poly = (-cf.delta, -cf.gamma, 1.0)
        deg = 2
    log_rin = math.log(a.r_in)
    log_rout = math.log(a.r_out)
    log_rho = math.log(rho)
    theta = math.atan2(z.imag, z.real)

    def weight(narr):
        return poly[0] + poly[1] * narr + poly[2] * narr * narr

    for n_pairs in _doubling_schedule(tr):
        npos = np.arange(n_pairs + 1).astype(float)
        nneg = -npos - 1.0
        m_pos = weight(npos) * np.exp(npos * log_rho - _log_alpha(log_rin, log_rout, npos))
        m_neg = weight(nneg) * np.exp(nneg * log_rho - _log_alpha(log_rin, log_rout, nneg))
        re = math.fsum(m_pos * np.cos(npos * theta)) + math.fsum(m_neg * np.cos(nneg * theta))
        im = math.fsum(m_pos * np.sin(npos * theta)) + math.fsum(m_neg * np.sin(nneg * theta))
        abs_scale = math.fsum(np.abs(m_pos)) + math.fsum(np.abs(m_neg))
        growth = ((n_pairs + 1) / n_pairs) ** deg
        q_pos = growth * rho / a.r_out**2
        q_neg = growth * a.r_in**2 / rho
        if q_pos < 1.0 and q_neg < 1.0:
            tail = abs(m_pos[-1]) * q_pos / (1 - q_pos) + abs(m_neg[-1]) * q_neg / (1 - q_neg)
            if tail <= tr.tail_tol * max(abs_scale, 1e-300):
                return complex(re, im)
    raise ConvergenceError(
        f"extremal series too slow at |z| = {rho:.6g} within {HARD_CAP} pairs"
    )
