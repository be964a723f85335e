"""Scattering data of a pure step: beta_j, a, b, r and the phase densities.

Every density used in the phase integrals depends on the spectral point only
through the single log-ratio

    u(z) = 1/2 ln|(z - lam_l+)/(z - lam_l-)| - 1/2 ln|(z - lam_r+)/(z - lam_r-)|

which is computed from exact endpoint offsets so that the logarithmic band-edge
singularities keep full relative precision:

* off both bands            ln(1 - |r|^2)    = -2 ln cosh(u/2)
* on I_r minus I_l          -ln(a_+ a_-^*)   = ln 2 - ln cosh(u)
* on I_l minus I_r          arg r_+          = -2 atan(tanh(u/2))

The last branch is continuous on the whole band and runs from -pi/2 at the
left endpoint to +pi/2 at the right endpoint.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, RegionError, ZeroReflection
from .quad import integrate_finite, integrate_semi_infinite

OFF = "off"  # ln(1 - |r|^2)
RIGHT = "right"  # -ln(a_+ a_-^*)
LEFT = "left"  # arg r_+ (ln r_+ = i arg r_+)
ABOVE = "above"
BELOW = "below"


@dataclass(frozen=True)
class ScatterContext:
    """Band data of the step: ``I_l = (l_minus, l_plus)``, ``I_r = (r_minus, r_plus)``."""

    l_plus: float
    l_minus: float
    r_plus: float
    r_minus: float

    def __post_init__(self):
        if not (self.l_plus > self.l_minus and self.r_plus > self.r_minus):
            raise DomainError("each band needs lam_plus > lam_minus")

    @classmethod
    def from_invariants(cls, inv) -> "ScatterContext":
        return cls(inv.lam_l_plus, inv.lam_l_minus, inv.lam_r_plus, inv.lam_r_minus)

    @property
    def points(self) -> tuple[float, float, float, float]:
        return (self.l_plus, self.l_minus, self.r_plus, self.r_minus)

    @property
    def identical(self) -> bool:
        return self.l_plus == self.r_plus and self.l_minus == self.r_minus

    def in_left(self, z: float) -> bool:
        return self.l_minus < z < self.l_plus

    def in_right(self, z: float) -> bool:
        return self.r_minus < z < self.r_plus

    def pieces(self, cut: float) -> list[tuple[float, float, str]]:
        """Elementary pieces of ``(-inf, cut)`` labelled with their density kind.

        Pieces inside both bands carry no density and are omitted; the
        remaining labels realize the interval algebra
        ``(-inf,cut) minus closure(I_l u I_r)``, ``I_r minus I_l``, ``I_l minus I_r``.
        """
        brk = sorted({p for p in self.points if p < cut})
        edges = [-math.inf] + brk + [cut]
        out = []
        for a, b in zip(edges[:-1], edges[1:]):
            if not b > a:
                continue
            mid = b - 1.0 if math.isinf(a) else 0.5 * (a + b)
            kind = self.kind_at(mid)
            if kind is not None:
                out.append((a, b, kind))
        return out

    def kind_at(self, z: float) -> str | None:
        left, right = self.in_left(z), self.in_right(z)
        if left and right:
            return None
        if left:
            return LEFT
        if right:
            return RIGHT
        return OFF


def _log_ratio(dlp, dlm, drp, drm):
    return 0.5 * (np.log(np.abs(dlp)) - np.log(np.abs(dlm)) - np.log(np.abs(drp)) + np.log(np.abs(drm)))


def _log_cosh(y):
    y = np.abs(y)
    return y + np.log1p(np.exp(-2.0 * y)) - math.log(2.0)


def density(kind: str, dlp, dlm, drp, drm):
    """Phase density of ``kind`` from the four signed offsets ``z - lam``."""
    u = _log_ratio(dlp, dlm, drp, drm)
    if kind == OFF:
        return -2.0 * _log_cosh(0.5 * u)
    if kind == RIGHT:
        return math.log(2.0) - _log_cosh(u)
    if kind == LEFT:
        return -2.0 * np.arctan(np.tanh(0.5 * u))
    raise DomainError(f"unknown density kind {kind!r}")


def density_at(kind: str, z, ctx: ScatterContext):
    z = np.asarray(z, dtype=float)
    return density(kind, z - ctx.l_plus, z - ctx.l_minus, z - ctx.r_plus, z - ctx.r_minus)


def _side_log(d: complex, side: str | None) -> complex:
    if d == 0:
        raise DomainError("evaluation at a branch point")
    if side is None or d.imag != 0 or d.real > 0:
        return cmath.log(d)
    sgn = 1.0 if side == ABOVE else -1.0
    return complex(math.log(-d.real), sgn * math.pi)


def beta(z: complex, which: str, ctx: ScatterContext, side: str | None = None) -> complex:
    """Quarter root ``((z - lam_j+)/(z - lam_j-))^{1/4}``, cut on ``I_j``, tending to 1."""
    if which == "l":
        lp, lm = ctx.l_plus, ctx.l_minus
    elif which == "r":
        lp, lm = ctx.r_plus, ctx.r_minus
    else:
        raise DomainError("which must be 'l' or 'r'")
    z = complex(z)
    if side is None and z.imag == 0 and lm < z.real < lp:
        raise DomainError("point on the cut needs a side")
    return cmath.exp(0.25 * (_side_log(z - lp, side) - _side_log(z - lm, side)))


def a_coeff(z: complex, ctx: ScatterContext, side: str | None = None) -> complex:
    bl, br = beta(z, "l", ctx, side), beta(z, "r", ctx, side)
    return 0.5 * (bl / br + br / bl)


def b_coeff(z: complex, ctx: ScatterContext, side: str | None = None) -> complex:
    bl, br = beta(z, "l", ctx, side), beta(z, "r", ctx, side)
    return (bl / br - br / bl) / 2j


def reflection(z: complex, ctx: ScatterContext, side: str | None = None) -> complex:
    """``r = -i (beta_l^2 - beta_r^2)/(beta_l^2 + beta_r^2)``, optionally a boundary value."""
    bl2 = beta(z, "l", ctx, side) ** 2
    br2 = beta(z, "r", ctx, side) ** 2
    den = bl2 + br2
    if den == 0:
        raise DomainError("reflection coefficient has a pole here")
    return -1j * (bl2 - br2) / den


def schwarz(f: Callable, z: complex, ctx: ScatterContext, side: str | None = None) -> complex:
    """``f^*(z) = conj f(conj z)``; the side flips under conjugation."""
    flip = {ABOVE: BELOW, BELOW: ABOVE, None: None}[side]
    return complex(f(complex(z).conjugate(), ctx, flip)).conjugate()


def a_plus_a_minus_star(z: float, ctx: ScatterContext) -> float:
    """``a_+(z) a_-^*(z) = |a_+(z)|^2`` on ``I_r minus I_l``."""
    if not (ctx.in_right(z) and not ctx.in_left(z)):
        raise DomainError("a_+ a_-^* is only defined on I_r minus I_l")
    ap = a_coeff(z, ctx, ABOVE)
    am_star = schwarz(a_coeff, z, ctx, BELOW)
    val = ap * am_star
    return float(val.real)


def arg_r_plus(band: tuple[float, float], ctx: ScatterContext, n_scan: int = 2048):
    """Continuous branch of ``arg r_+`` on ``band``, unwrapped from its left end.

    The closed form is validated against a direct boundary-value scan before
    the callable is returned.
    """
    if ctx.identical:
        raise ZeroReflection("identical steps have r = 0; arg r_+ is undefined")
    lo, hi = band
    if not hi > lo:
        raise DomainError("empty band")
    if not all(ctx.kind_at(z) == LEFT for z in (lo + 1e-9 * (hi - lo), 0.5 * (lo + hi), hi - 1e-9 * (hi - lo))):
        raise DomainError("band is not inside I_l minus I_r")
    zs = lo + (hi - lo) * (np.arange(n_scan) + 0.5) / n_scan
    direct = np.unwrap(np.array([cmath.phase(reflection(z, ctx, ABOVE)) for z in zs]))
    closed = density_at(LEFT, zs, ctx)
    shift = np.round((direct - closed) / (2 * math.pi))
    if np.any(shift != shift[0]) or np.max(np.abs(np.diff(closed))) > math.pi / 8:
        raise DomainError("phase branch of r_+ is not continuous on the band")

    def f(z):
        return density_at(LEFT, z, ctx)

    return f


@dataclass(frozen=True)
class VacuumData:
    nu: float
    chi_imag: float  # chi_tilde(z0) = i * chi_imag
    arg_r: float


def vacuum_nu_chi(xi: float, ctx: ScatterContext, tol: float = 1e-11) -> VacuumData:
    """``nu(z0)`` and the regularized ``chi_tilde(z0)`` at ``z0 = -xi/2`` in the vacuum gap."""
    z0 = -0.5 * xi
    if not (ctx.r_plus < z0 < ctx.l_minus):
        raise RegionError(f"z0 = {z0} is not inside the vacuum gap ({ctx.r_plus}, {ctx.l_minus})")
    lp, lm, rp, rm = ctx.points
    f0 = float(density(OFF, z0 - lp, z0 - lm, z0 - rp, z0 - rm))
    nu = -f0 / (2.0 * math.pi)

    def outer(x, d):
        # piece (-inf, r_minus); d = r_minus - x
        return density(OFF, x - lp, x - lm, x - rp, -d) / (x - z0)

    def gap(x, da, db):
        # piece (r_plus, z0) with f(z0) subtracted; l_minus may sit just past z0
        fz = density(OFF, x - lp, (z0 - lm) - db, da, x - rm)
        return (fz - f0) / (-db)

    def band(x, da, db):
        # piece (r_minus, r_plus)
        return density(RIGHT, x - lp, x - lm, -db, da) / ((rp - z0) - db)

    total = integrate_semi_infinite(outer, b=rm, tol=tol, offsets=True)
    total += integrate_finite(gap, rp, z0, tol, offsets=True)
    total += integrate_finite(band, rm, rp, tol, offsets=True)
    total -= f0 * math.log(z0 - rp)
    # chi = total / (2 pi i)
    chi_imag = -total / (2.0 * math.pi)
    r0 = reflection(z0, ctx)
    arg_r = cmath.phase(r0) if abs(r0) > 0 else 0.0
    return VacuumData(nu=nu, chi_imag=chi_imag, arg_r=arg_r)
