"""Genus-zero and genus-one modulation quantities.

Conventions used throughout:

* ``R(z; lam) = prod_k sqrt(z - lam_k)`` with principal square roots, so ``R``
  is positive right of the largest branch point, continued through the upper
  half-plane, and boundary values on the real axis are limits from above.
* ``N(z) = 2 P1(z) + xi P0(z)`` so that ``dg = N(z)/R(z) dz``.
* ``tau = i K(m')/K(m)``, the classical normalization (the quarter-scaled
  variant fails the theta/cn identity checked in the tests).
* The theta argument of the one-phase wave at time ``t`` is
  ``(t*gamma + gamma_hat)/(2 pi)``; since ``gamma = 4 pi i d (xi - V)`` and
  ``gamma_hat = 4 pi i d phi1`` this reproduces the x-resolved cn profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import scattering as sc
from .errors import AccuracyError, ConsistencyError, DomainError, RegionError
from .quad import integrate_contour, integrate_finite, integrate_semi_infinite
from .specfun import ellip_K, ellip_K_minus_E, ellip_KE

_REAL_TOL = 1e-8
_QUAD_TOL = 1e-12


@dataclass(frozen=True)
class LambdaVec:
    lam1: float
    lam2: float
    lam3: float
    lam4: float

    def __post_init__(self):
        if not (self.lam1 > self.lam2 > self.lam3 > self.lam4):
            raise DomainError(f"branch points must be strictly decreasing: {self.as_tuple()}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.lam1, self.lam2, self.lam3, self.lam4)

    @property
    def sigma1(self) -> float:
        return self.lam1 + self.lam2 + self.lam3 + self.lam4

    @property
    def sigma2(self) -> float:
        l = self.as_tuple()
        return sum(l[i] * l[j] for i in range(4) for j in range(i + 1, 4))


def _as_tuple(lam) -> tuple[float, float, float, float]:
    if isinstance(lam, LambdaVec):
        return lam.as_tuple()
    t = tuple(float(v) for v in lam)
    if len(t) != 4:
        raise DomainError("need four branch points")
    return t


def modulus(lam) -> float:
    l1, l2, l3, l4 = _as_tuple(lam)
    m2 = (l1 - l2) * (l3 - l4) / ((l1 - l3) * (l2 - l4))
    return math.sqrt(min(max(m2, 0.0), 1.0))


def whitham_velocity(k: int, lam) -> float:
    """Characteristic velocity ``v_k`` of the genus-one Whitham system.

    Accepts non-strict orderings with a single tie (``l1 = l2``, ``l2 = l3`` or
    ``l3 = l4``), returning the degenerate limit.
    """
    if k not in (1, 2, 3, 4):
        raise DomainError("k must be 1..4")
    l1, l2, l3, l4 = _as_tuple(lam)
    if not (l1 >= l2 >= l3 >= l4) or l1 == l3 or l2 == l4:
        raise DomainError(f"invalid branch-point ordering {lam}")
    h = -0.5 * (l1 + l2 + l3 + l4)
    if l1 == l2:
        lim = 2.0 * (l1 - l3) * (l1 - l4) / (-2.0 * l1 + l3 + l4)
        return (h + lim, h + lim, h + (l2 - l3), h + (l1 - l4))[k - 1]
    if l3 == l4:
        lim = 2.0 * (l2 - l4) * (l1 - l4) / (l1 + l2 - 2.0 * l4)
        return (h - (l1 - l4), h - (l2 - l3), h + lim, h + lim)[k - 1]
    m = modulus((l1, l2, l3, l4))
    if l2 == l3 or m >= 1.0:
        return (h - (l1 - l2), h, h, h + (l3 - l4))[k - 1]
    K, E = ellip_KE(m)
    D = ellip_K_minus_E(m)
    if k == 1:
        return h - (l1 - l4) * (l1 - l2) * K / ((l1 - l4) * D + (l1 - l2) * E)
    if k == 2:
        return h + (l2 - l3) * (l1 - l2) * K / ((l2 - l3) * D - (l1 - l2) * E)
    if k == 3:
        return h - (l2 - l3) * (l3 - l4) * K / ((l2 - l3) * D - (l3 - l4) * E)
    return h + (l1 - l4) * (l3 - l4) * K / ((l1 - l4) * D + (l3 - l4) * E)


# soft-edge relations in their ratio form, kept separate from whitham_velocity


def modulus_v2(lam_s: float, lr_p: float, ll_p: float, ll_m: float) -> float:
    return math.sqrt((lr_p - lam_s) * (ll_p - ll_m) / ((lr_p - ll_p) * (lam_s - ll_m)))


def modulus_v3(lam_s: float, lr_p: float, lr_m: float, ll_m: float) -> float:
    return math.sqrt((lr_p - lr_m) * (lam_s - ll_m) / ((lr_p - lam_s) * (lr_m - ll_m)))


def soft_edge_velocity_v2(lam_s: float, lr_p: float, ll_p: float, ll_m: float) -> float:
    K, E = ellip_KE(modulus_v2(lam_s, lr_p, ll_p, ll_m))
    ratio = (lr_p - ll_p) / (lam_s - ll_p) * E / K
    return -0.5 * (lr_p + lam_s + ll_p + ll_m) + (lr_p - lam_s) / (1.0 - ratio)


def soft_edge_velocity_v3(lam_s: float, lr_p: float, lr_m: float, ll_m: float) -> float:
    K, E = ellip_KE(modulus_v3(lam_s, lr_p, lr_m, ll_m))
    ratio = (lr_m - ll_m) / (lr_m - lam_s) * E / K
    return -0.5 * (lr_p + lr_m + lam_s + ll_m) - (lam_s - ll_m) / (1.0 - ratio)


def _solve(f: Callable[[float], float], lo: float, hi: float, xi: float, what: str) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise RegionError(f"xi = {xi} lies outside the {what} soft-edge bracket")
    root = brentq(f, lo, hi, xtol=1e-16, rtol=8.9e-16, maxiter=200)
    res = abs(f(root))
    if res > 1e-11:
        raise AccuracyError(f"{what} soft-edge residual {res:.3g} above 1e-11", estimate=root, error=res)
    return root


def solve_soft_edge_v2(xi: float, lr_p: float, ll_p: float, ll_m: float) -> float:
    """Soft edge ``lam_s`` in ``[ll_p, lr_p]`` with ``v2(lr_p, lam_s, ll_p, ll_m) = xi``."""

    def f(s):
        return whitham_velocity(2, (lr_p, s, ll_p, ll_m)) - xi

    return _solve(f, ll_p, lr_p, xi, "v2")


def solve_soft_edge_v3(xi: float, lr_p: float, lr_m: float, ll_m: float) -> float:
    """Soft edge ``lam_s`` in ``[ll_m, lr_m]`` with ``v3(lr_p, lr_m, lam_s, ll_m) = xi``."""

    def f(s):
        return whitham_velocity(3, (lr_p, lr_m, s, ll_m)) - xi

    return _solve(f, ll_m, lr_m, xi, "v3")


def rarefaction_edges(xi: float, side: str, inv) -> tuple[float, float]:
    """Soft edge and the second stationary point of a rarefaction fan."""
    if side == "left":
        s = -(inv.lam_l_minus + 2.0 * xi) / 3.0
        lo, hi, anchor = inv.lam_l_minus, inv.lam_l_plus, inv.lam_l_minus
    elif side == "right":
        s = -(inv.lam_r_plus + 2.0 * xi) / 3.0
        lo, hi, anchor = inv.lam_r_minus, inv.lam_r_plus, inv.lam_r_plus
    else:
        raise DomainError("side must be 'left' or 'right'")
    tol = 1e-12 * max(1.0, abs(lo), abs(hi))
    if not (lo - tol <= s <= hi + tol):
        raise RegionError(f"xi = {xi} is outside the {side} rarefaction fan")
    return s, 0.25 * (s + 3.0 * anchor)


def pq_polynomials(lam) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients (highest degree first) of the monic ``P0`` and ``P1``."""
    lv = lam if isinstance(lam, LambdaVec) else LambdaVec(*_as_tuple(lam))
    l1, l2, l3, l4 = lv.as_tuple()
    s1, s2 = lv.sigma1, lv.sigma2
    K, E = ellip_KE(modulus(lv))
    eok = E / K
    g0 = 0.5 * (l1 * l2 + l3 * l4) - 0.5 * (l1 - l3) * (l2 - l4) * eok
    g1 = 0.125 * (l1 * l2 - l3 * l4) * (l1 + l2 - l3 - l4) - 0.125 * s1 * (l1 - l3) * (l2 - l4) * eok
    p0 = np.array([1.0, -0.5 * s1, g0])
    p1 = np.array([1.0, -0.5 * s1, 0.5 * s2 - s1 * s1 / 8.0, g1])
    return p0, p1


def dg_numerator(lam, xi: float) -> np.ndarray:
    p0, p1 = pq_polynomials(lam)
    return 2.0 * p1 + xi * np.concatenate(([0.0], p0))


def eta_points(lam, xi: float) -> tuple[float, float, float]:
    """Real zeros of ``2 P1 + xi P0`` in ascending order."""
    c = dg_numerator(lam, xi)
    roots = np.roots(c)
    scale = max(1.0, float(np.max(np.abs(_as_tuple(lam)))))
    if np.max(np.abs(roots.imag)) > 1e-6 * scale:
        raise ConsistencyError(f"dg numerator has complex zeros {roots}")
    r = np.sort(roots.real)
    dc = np.polyder(c)
    for _ in range(3):
        fv, dv = np.polyval(c, r), np.polyval(dc, r)
        step = np.where(dv != 0, fv / np.where(dv != 0, dv, 1.0), 0.0)
        r = r - step
    return float(r[0]), float(r[1]), float(r[2])


def rho_triple(lam) -> tuple[float, float, float]:
    l1, l2, l3, l4 = _as_tuple(lam)
    r1 = 0.25 * (l1 + l2 - l3 - l4) ** 2
    r2 = 0.25 * (l1 - l2 + l3 - l4) ** 2
    r3 = 0.25 * (l1 - l2 - l3 + l4) ** 2
    if not (r1 >= r2 >= r3 >= 0):
        raise ConsistencyError("rho ordering violated")
    return r1, r2, r3


# genus-zero g-function constants


def g_inf_plane(lam_plus: float, lam_minus: float, xi: float) -> float:
    """``g_inf`` of ``R(z; a, b)(z + (a+b)/2 + xi)`` minus ``z^2 + xi z``."""
    s, w = lam_plus + lam_minus, lam_plus - lam_minus
    return -0.25 * s * s - 0.5 * s * xi - 0.125 * w * w


def g_inf_rarefaction(anchor: float, xi: float) -> float:
    """Rarefaction fan anchored at ``lam_l^-`` (left) or ``lam_r^+`` (right)."""
    return -(2.0 * anchor * anchor + 2.0 * anchor * xi - xi * xi) / 6.0


def g_infinity(kind: str, inv, xi: float, lam=None) -> float:
    if kind == "left_plane":
        return g_inf_plane(inv.lam_l_plus, inv.lam_l_minus, xi)
    if kind == "right_plane":
        return g_inf_plane(inv.lam_r_plus, inv.lam_r_minus, xi)
    if kind == "middle_plane":
        return g_inf_plane(inv.lam_r_plus, inv.lam_l_minus, xi)
    if kind == "left_rarefaction":
        return g_inf_rarefaction(inv.lam_l_minus, xi)
    if kind == "right_rarefaction":
        return g_inf_rarefaction(inv.lam_r_plus, xi)
    if kind == "genus_one":
        if lam is None:
            raise DomainError("genus-one g_inf needs the branch points")
        return _g_inf_genus1(LambdaVec(*_as_tuple(lam)), xi)
    raise DomainError(f"unknown g-function kind {kind!r}")


# integrals along the real axis with exact endpoint offsets


def sqrt_plus(d):
    """Boundary value from above of the principal ``sqrt(d)`` for real ``d``."""
    d = np.asarray(d, dtype=float)
    return np.where(d >= 0, np.sqrt(np.abs(d)) + 0j, 1j * np.sqrt(np.abs(d)))


def _diff_factory(x, a, b, da, db):
    # measure from the nearer endpoint: (b - p) is exact when p is close to b
    def diff(p):
        if p == a:
            return da
        if p == b:
            return -db
        if b is not None and (a is None or abs(p - b) < abs(p - a)):
            return (b - p) - db
        if a is not None:
            return (a - p) + da
        return x - p

    return diff


def real_axis_integral(kernel: Callable, a: float, b: float, tol: float = _QUAD_TOL) -> complex:
    """Integrate ``kernel(x, diff)`` over ``(a, b)``; ``diff(p)`` returns ``x - p``.

    ``diff`` is exact whenever ``p`` is one of the endpoints, so integrable
    singularities anchored at ``a`` or ``b`` keep full precision.
    """
    if math.isinf(a) and a < 0:

        def f(x, d):
            return kernel(x, _diff_factory(x, None, b, None, d))

        return integrate_semi_infinite(f, b=b, tol=tol, offsets=True)
    if math.isinf(b) and b > 0:

        def g(x, d):
            return kernel(x, _diff_factory(x, a, None, d, None))

        return integrate_semi_infinite(g, a=a, tol=tol, offsets=True)

    def h(x, da, db):
        return kernel(x, _diff_factory(x, a, b, da, db))

    return integrate_finite(h, a, b, tol, offsets=True)


def refine_pieces(pieces, points: Sequence[float]):
    """Split labelled pieces at any interior branch point."""
    out = []
    for a, b, kind in pieces:
        inner = sorted(p for p in set(points) if a < p < b)
        edges = [a] + inner + [b]
        out.extend((lo, hi, kind) for lo, hi in zip(edges[:-1], edges[1:]))
    return out


def phase_integrals(branch: Sequence[float], ctx: sc.ScatterContext, cut: float, shift: float | None = None):
    """``I0 = int f/R_+`` and ``I1 = int f (z + shift)/R_+`` over ``(-inf, cut)``.

    ``f`` is the scattering density of each piece (with ``ln r_+ = i arg r_+``)
    and ``R_+`` the boundary value of ``prod sqrt(z - p)`` over ``branch``.
    Returns complex values; callers check realness.
    """
    lp, lm, rp, rm = ctx.points
    pieces = refine_pieces(ctx.pieces(cut), branch)
    i0 = 0j
    i1 = 0j
    for a, b, kind in pieces:
        fac = 1j if kind == sc.LEFT else 1.0

        def k0(x, diff, kind=kind, fac=fac):
            dens = sc.density(kind, diff(lp), diff(lm), diff(rp), diff(rm))
            r = np.ones_like(x, dtype=complex)
            for p in branch:
                r = r * sqrt_plus(diff(p))
            return fac * dens / r

        i0 += real_axis_integral(k0, a, b)
        if shift is not None:

            def k1(x, diff, k0=k0):
                return k0(x, diff) * (x + shift)

            i1 += real_axis_integral(k1, a, b)
    return i0, i1


@dataclass(frozen=True)
class GenusOneData:
    lam: LambdaVec
    xi: float
    m: float
    tau: complex
    d: complex
    A_inf: complex
    gamma: float
    gamma_hat: float
    g_inf: float
    g_hat_inf: float
    phi1: float
    phi0: float
    V: float
    rho1: float
    rho2: float
    rho3: float
    eta_minus: float
    eta_mid: float
    eta_plus: float

    @property
    def theta_shift(self) -> complex:
        return 2.0 * self.A_inf


def _R_real(diff, lam4) -> np.ndarray:
    r = np.ones_like(diff(lam4[0]), dtype=complex)
    for p in lam4:
        r = r * sqrt_plus(diff(p))
    return r


def _tail_split(lv: LambdaVec, xi: float) -> float:
    return lv.lam1 + 2.0 * (lv.lam1 - lv.lam4) + abs(xi) + 1.0


def _g_inf_genus1(lv: LambdaVec, xi: float) -> float:
    lam = lv.as_tuple()
    N = dg_numerator(lv, xi)
    lin = np.array([2.0, xi])
    R2 = np.poly(lam)
    num = np.polysub(np.polymul(N, N), np.polymul(np.polymul(lin, lin), R2))
    lead = np.max(np.abs(num))
    if np.max(np.abs(num[:3])) > 1e-9 * lead:
        raise ConsistencyError("dg does not match 2z + xi at infinity")
    num = num[3:]
    X = _tail_split(lv, xi)

    def near(x, diff):
        return np.polyval(N, x) / _R_real(diff, lam).real - (2.0 * x + xi)

    def far(x, diff):
        R = np.sqrt(np.prod([x - p for p in lam], axis=0))
        den = R * (np.polyval(N, x) + (2.0 * x + xi) * R)
        return np.polyval(num, x) / den

    val = real_axis_integral(near, lv.lam1, X) + real_axis_integral(far, X, math.inf)
    return float(val) - (lv.lam1 ** 2 + xi * lv.lam1)


def _g_hat_tail(lv: LambdaVec) -> float:
    """``int_{lam1}^inf (P0/R - 1) dz - lam1``."""
    lam = lv.as_tuple()
    p0, _ = pq_polynomials(lv)
    R2 = np.poly(lam)
    num = np.polysub(np.polymul(p0, p0), R2)
    if np.max(np.abs(num[:2])) > 1e-9 * np.max(np.abs(num)):
        raise ConsistencyError("P0/R does not tend to 1")
    num = num[2:]
    X = _tail_split(lv, 0.0)

    def near(x, diff):
        return np.polyval(p0, x) / _R_real(diff, lam).real - 1.0

    def far(x, diff):
        R = np.sqrt(np.prod([x - p for p in lam], axis=0))
        return np.polyval(num, x) / (R * (np.polyval(p0, x) + R))

    return float(real_axis_integral(near, lv.lam1, X) + real_axis_integral(far, X, math.inf)) - lv.lam1


def gap_integral(lv: LambdaVec, poly: np.ndarray) -> float:
    """``int_{lam3}^{lam2} poly(z)/R(z) dz`` (``R < 0`` on the gap)."""
    lam = lv.as_tuple()

    def k(x, diff):
        return np.polyval(poly, x) / _R_real(diff, lam).real

    return float(real_axis_integral(k, lv.lam3, lv.lam2))


def abel_infinity(lv: LambdaVec, d: complex) -> complex:
    lam = lv.as_tuple()

    def k(x, diff):
        return 1.0 / _R_real(diff, lam).real

    return d * real_axis_integral(k, lv.lam1, math.inf)


def normalization_d(lv: LambdaVec) -> complex:
    l1, l2, l3, l4 = lv.as_tuple()
    return 1j * math.sqrt((l1 - l3) * (l2 - l4)) / (4.0 * ellip_K(modulus(lv)))


def riemann_period(m: float) -> complex:
    mp = math.sqrt((1.0 - m) * (1.0 + m))
    return 1j * ellip_K(mp) / ellip_K(m)


def _real(z: complex, what: str, scale: float = 1.0) -> float:
    if abs(complex(z).imag) > _REAL_TOL * max(1.0, scale):
        raise ConsistencyError(f"{what} should be real, got {z}")
    return float(complex(z).real)


def band_constants(lam, xi: float, ctx: sc.ScatterContext, cut: float) -> GenusOneData:
    """All constants of the one-phase leading order at ``xi``.

    ``cut`` is the upper end of the interval carrying the scattering phase
    densities (the soft edge for a shock, the gap zero for the unmodulated
    wave).
    """
    lv = lam if isinstance(lam, LambdaVec) else LambdaVec(*_as_tuple(lam))
    l1, l2, l3, l4 = lv.as_tuple()
    m = modulus(lv)
    if not (0.0 < m < 1.0):
        raise DomainError(f"modulus {m} outside (0, 1)")
    tau = riemann_period(m)
    d = normalization_d(lv)
    A_inf = abel_infinity(lv, d)
    V = -0.5 * lv.sigma1
    r1, r2, r3 = rho_triple(lv)
    em, e0, ep = eta_points(lv, xi)
    N = dg_numerator(lv, xi)
    p0, _ = pq_polynomials(lv)

    gamma = -2.0 * gap_integral(lv, N)
    i0, i1 = phase_integrals(lv.as_tuple(), ctx, cut, shift=V)
    phi1 = _real(i0 / (2.0 * math.pi), "phi1")
    phi0 = _real(i1 / (2.0 * math.pi), "phi0")
    gamma_hat = -2.0 * phi1 * gap_integral(lv, p0)
    g_inf = _g_inf_genus1(lv, xi)
    g_hat_inf = phi1 * _g_hat_tail(lv)
    if abs(A_inf.real) > 1e-10 * max(1.0, abs(A_inf)):
        raise ConsistencyError("Abel map at infinity is not purely imaginary")
    return GenusOneData(
        lam=lv, xi=xi, m=m, tau=tau, d=d, A_inf=complex(0.0, A_inf.imag), gamma=gamma,
        gamma_hat=gamma_hat, g_inf=g_inf, g_hat_inf=g_hat_inf, phi1=phi1, phi0=phi0, V=V,
        rho1=r1, rho2=r2, rho3=r3, eta_minus=em, eta_mid=e0, eta_plus=ep,
    )


def g_boundary_sum(lam, xi: float, z: float, height: float = 0.25) -> complex:
    """``g_+(z) + g_-(z)`` by complex contour integration of ``dg`` from ``lam1``.

    The two paths leave ``lam1`` vertically, run parallel to the real axis at
    ``+-height`` and drop back onto ``z``. Used as an independent check of the
    gap-integral value of ``gamma``.
    """
    lv = lam if isinstance(lam, LambdaVec) else LambdaVec(*_as_tuple(lam))
    lam_t = lv.as_tuple()
    N = dg_numerator(lv, xi)

    def R_complex(zz, anchor=None, dz=None):
        out = np.ones_like(zz, dtype=complex)
        for p in lam_t:
            dp = dz if (anchor is not None and p == anchor) else zz - p
            out = out * np.sqrt(dp)
        return out

    total = 0j
    for sgn in (1.0, -1.0):
        h = sgn * height
        # the first segment starts at the branch point lam1
        def k_first(zz, dz0, dz1):
            return np.polyval(N, zz) / R_complex(zz, lv.lam1, dz0)

        def k_rest(zz, dz0, dz1):
            return np.polyval(N, zz) / R_complex(zz)

        total += integrate_contour(k_first, [lv.lam1, lv.lam1 + 1j * h], tol=1e-12, offsets=True)
        total += integrate_contour(k_rest, [lv.lam1 + 1j * h, z + 1j * h, z], tol=1e-12, offsets=True)
    return total
