"""Special functions used by the asymptotic formulas.

All elliptic routines take the *modulus* ``m`` (so ``K(m) = int_0^{pi/2}
dtheta / sqrt(1 - m^2 sin^2 theta)``), not the parameter ``m^2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DomainError

_AGM_TOL = 1e-16
_MAX_THETA_TERMS = 10_000


@dataclass(frozen=True)
class Nome:
    """Nome ``q = exp(i*pi*tau)`` for purely imaginary ``tau``."""

    q: float

    def __post_init__(self):
        if not (0.0 <= self.q < 1.0):
            raise DomainError(f"nome must lie in [0, 1), got {self.q}")

    @classmethod
    def from_tau_im(cls, tau_im: float) -> "Nome":
        if tau_im <= 0:
            raise DomainError("Im tau must be positive")
        return cls(math.exp(-math.pi * tau_im))

    @property
    def tau_im(self) -> float:
        return math.inf if self.q == 0.0 else -math.log(self.q) / math.pi


def _check_modulus(m: float, allow_one: bool) -> None:
    if not (m >= 0.0) or m > 1.0 or (m == 1.0 and not allow_one):
        raise DomainError(f"elliptic modulus out of range: {m}")


def _agm_sequence(m: float):
    """Return lists (a_n, b_n, c_n) of the AGM started at (1, m', m)."""
    a, b, c = 1.0, math.sqrt((1.0 - m) * (1.0 + m)), m
    As, Bs, Cs = [a], [b], [c]
    while abs(c) > _AGM_TOL * a and len(As) < 64:
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        As.append(a)
        Bs.append(b)
        Cs.append(c)
    return As, Bs, Cs


def ellip_K(m: float) -> float:
    """Complete elliptic integral of the first kind, modulus convention."""
    _check_modulus(m, allow_one=False)
    As, _, _ = _agm_sequence(m)
    return math.pi / (2.0 * As[-1])


def ellip_E(m: float) -> float:
    """Complete elliptic integral of the second kind, modulus convention."""
    _check_modulus(m, allow_one=True)
    if m == 1.0:
        return 1.0
    As, _, Cs = _agm_sequence(m)
    s = 0.5 * Cs[0] ** 2
    for n in range(1, len(Cs)):
        s += 2.0 ** (n - 1) * Cs[n] ** 2
    return math.pi / (2.0 * As[-1]) * (1.0 - s)


def ellip_KE(m: float) -> tuple[float, float]:
    """Both complete integrals from a single AGM run."""
    _check_modulus(m, allow_one=False)
    As, _, Cs = _agm_sequence(m)
    K = math.pi / (2.0 * As[-1])
    s = 0.5 * Cs[0] ** 2
    for n in range(1, len(Cs)):
        s += 2.0 ** (n - 1) * Cs[n] ** 2
    return K, K * (1.0 - s)


def ellip_K_minus_E(m: float) -> float:
    """``K(m) - E(m)`` without cancellation for small ``m``."""
    _check_modulus(m, allow_one=False)
    As, _, Cs = _agm_sequence(m)
    s = 0.5 * Cs[0] ** 2
    for n in range(1, len(Cs)):
        s += 2.0 ** (n - 1) * Cs[n] ** 2
    return math.pi / (2.0 * As[-1]) * s


def jacobi_cn_sn_dn(u, m: float):
    """Jacobi ``(cn, sn, dn)`` by descending Landen transformation.

    ``u`` may be a scalar or an array. The argument is first reduced modulo
    the real period ``4K(m)``.
    """
    _check_modulus(m, allow_one=True)
    u_arr = np.asarray(u, dtype=float)
    if m == 1.0:
        sech = 1.0 / np.cosh(u_arr)
        return sech, np.tanh(u_arr), sech
    if m == 0.0:
        return np.cos(u_arr), np.sin(u_arr), np.ones_like(u_arr)
    As, _, Cs = _agm_sequence(m)
    K = math.pi / (2.0 * As[-1])
    period = 4.0 * K
    ur = u_arr - period * np.round(u_arr / period)
    n = len(As) - 1
    phi = (2.0 ** n) * As[n] * ur
    for k in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(Cs[k] / As[k] * np.sin(phi)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(1.0 - (m * sn) ** 2)
    return cn, sn, dn


def _theta_terms(q: float, im_max: float, half: bool) -> int:
    """Smallest N with q^{N^2} e^{2 N |Im z|} below 1e-17."""
    if q == 0.0:
        return 1
    lq = math.log(q)
    for N in range(1, _MAX_THETA_TERMS + 1):
        k = N + 0.5 if half else N
        if k * k * lq + 2.0 * k * im_max < -39.0:
            return N
    raise AccuracyError("theta series needs more than 1e4 terms")


def theta_j(z, nome: Nome | float, j: int):
    """Jacobi theta function ``vartheta_j(z; q)`` for ``j`` in 1..4."""
    q = nome.q if isinstance(nome, Nome) else Nome(float(nome)).q
    if j not in (1, 2, 3, 4):
        raise DomainError("theta index must be 1..4")
    z_arr = np.asarray(z, dtype=complex)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    im_max = float(np.max(np.abs(z_arr.imag))) if z_arr.size else 0.0
    if q == 0.0:
        val = np.ones_like(z_arr) if j in (3, 4) else np.zeros_like(z_arr)
        return val[0] if scalar else val
    lq = math.log(q)
    if j in (3, 4):
        N = _theta_terms(q, im_max, half=False)
        n = np.arange(1, N + 1)
        coef = np.exp(n * n * lq)
        if j == 4:
            coef = coef * (-1.0) ** n
        val = 1.0 + 2.0 * np.cos(2.0 * np.outer(z_arr, n)) @ coef
    else:
        N = _theta_terms(q, im_max, half=True)
        n = np.arange(0, N + 1)
        k = n + 0.5
        coef = np.exp(k * k * lq)
        if j == 1:
            val = 2.0 * np.sin(np.outer(z_arr, 2 * n + 1)) @ (coef * (-1.0) ** n)
        else:
            val = 2.0 * np.cos(np.outer(z_arr, 2 * n + 1)) @ coef
    return val[0] if scalar else val


def theta1_prime0(nome: Nome | float) -> float:
    """Derivative of vartheta_1 at the origin."""
    q = nome.q if isinstance(nome, Nome) else float(nome)
    if q == 0.0:
        return 0.0
    N = _theta_terms(q, 0.0, half=True)
    n = np.arange(0, N + 1)
    k = n + 0.5
    return float(2.0 * np.sum((-1.0) ** n * (2 * n + 1) * np.exp(k * k * math.log(q))))


def riemann_theta(z, tau: complex):
    """Genus-one Riemann theta ``sum_n exp(2 pi i n z + pi i n^2 tau)``."""
    tau = complex(tau)
    if tau.imag <= 0:
        raise DomainError("Im tau must be positive")
    z_arr = np.asarray(z, dtype=complex)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    im_max = float(np.max(np.abs(z_arr.imag))) if z_arr.size else 0.0
    N = None
    for cand in range(1, _MAX_THETA_TERMS + 1):
        if -math.pi * cand * cand * tau.imag + 2.0 * math.pi * cand * im_max < -39.0:
            N = cand
            break
    if N is None:
        raise AccuracyError("riemann_theta needs more than 1e4 terms")
    n = np.arange(-N, N + 1)
    expo = 2j * math.pi * np.outer(z_arr, n) + 1j * math.pi * tau * (n * n)
    val = np.exp(expo).sum(axis=1)
    return val[0] if scalar else val


_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)


def log_gamma(z: complex) -> complex:
    """Principal-branch complex log-gamma (upward shift plus Stirling series)."""
    z = complex(z)
    if z.real <= 0 and z.imag == 0 and z.real == math.floor(z.real):
        raise DomainError("log_gamma pole")
    shift = 0j
    w = z
    while abs(w) < 16.0 or w.real < 8.0:
        shift += cmath.log(w)
        w += 1.0
    lw = cmath.log(w)
    s = (w - 0.5) * lw - w + 0.5 * math.log(2.0 * math.pi)
    w2 = w * w
    p = w
    for c in _STIRLING:
        s += c / p
        p *= w2
    return s - shift


def log_gamma_arg(nu: float) -> float:
    """``arg Gamma(i nu)`` folded into (-pi, pi]."""
    if nu == 0 or not math.isfinite(nu):
        raise DomainError("arg Gamma(i nu) needs finite nonzero nu")
    a = log_gamma(1j * nu).imag
    a = math.remainder(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    return a
