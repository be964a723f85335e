"""Leading-order long-time asymptotics, region by region.

``AsymModel`` binds a step to its layout and scattering data and evaluates the
leading-order field at any ``(x, t)``. Per-``xi`` constants (phase shifts,
soft edges, band constants) are x-independent and cached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import genus1 as g1
from . import scattering as sc
from .errors import ConsistencyError, DomainError, RegionError
from .hydro import DSW, LP, MP, RP, RW, UE, VAC, RegionKind, StepData, invariants, region_layout
from .specfun import ellip_K, jacobi_cn_sn_dn, log_gamma_arg, riemann_theta

ERR_ORDER = {
    LP: "t^-1/2",
    RP: "t^-1/2",
    RW: "t^-1",
    VAC: "o(t^-1/2)",
    MP: "e^-ct",
    DSW: "t^-1",
    UE: "t^-1/2",
}

THETA_CN_RTOL = 1e-6
_COLLAPSE = 1e-10  # relative width below which a branch cut counts as collapsed


@dataclass(frozen=True)
class AsymSample:
    x: float
    t: float
    xi: float
    region: RegionKind
    label: str
    q: complex
    density: float
    err_order: str
    density_cn: float | None = None  # Jacobi-cn density for one-phase regions


@dataclass(frozen=True)
class PhaseShift:
    value: float
    kind: str  # lp, rp, lr, rr, mp, va


@dataclass(frozen=True)
class _Const:
    kind: RegionKind
    side: str | None
    phase: PhaseShift | None = None
    lam_s: float | None = None
    eta: float | None = None
    genus1: g1.GenusOneData | None = None
    amp: float | None = None
    nu: float | None = None
    delegate: int | None = None
    extra: dict = field(default_factory=dict)


def plane_stationary_points(lam_plus: float, lam_minus: float, xi: float) -> tuple[float, float]:
    """Zeros ``(eta_-, eta_+)`` of the genus-zero plane-wave ``dg``."""
    s, w = lam_plus + lam_minus, lam_plus - lam_minus
    root = math.sqrt((s + xi) ** 2 + 2.0 * w * w)
    return (s - xi - root) / 4.0, (s - xi + root) / 4.0


def genus0_phase(branch: tuple[float, float], ctx: sc.ScatterContext, cut: float) -> float:
    """``(1/pi) int f/R_+`` over ``(-inf, cut)`` for the two-point ``R``."""
    i0, _ = g1.phase_integrals(branch, ctx, cut)
    if abs(i0.imag) > 1e-8 * max(1.0, abs(i0)):
        raise ConsistencyError(f"genus-zero phase integral not real: {i0}")
    return i0.real / math.pi


def theta_ratio(G: g1.GenusOneData, w: float) -> complex:
    th = lambda z: riemann_theta(z, G.tau)  # noqa: E731
    a2 = 2.0 * G.A_inf
    return th(0.0) * th(a2 + w) / (th(w) * th(a2))


def cn_density(G: g1.GenusOneData, x: float, t: float) -> float:
    u = math.sqrt(G.rho1 - G.rho3) * (x - G.V * t + G.phi1) - ellip_K(G.m)
    cn, _, _ = jacobi_cn_sn_dn(u, G.m)
    return float(G.rho2 - (G.rho2 - G.rho3) * cn * cn)


class AsymModel:
    """Leading-order asymptotic solution for one step."""

    def __init__(self, step: StepData, cache_size: int = 8192):
        self.step = step
        self.inv = invariants(step)
        self.layout = region_layout(self.inv)
        self.ctx = sc.ScatterContext.from_invariants(self.inv)
        self._scale = max(1.0, *(abs(v) for v in self.inv.as_tuple()))
        self._cached = lru_cache(maxsize=cache_size)(self._compute)

    # constants

    def constants(self, index: int, xi: float) -> _Const:
        return self._cached(index, float(xi))

    def _compute(self, index: int, xi: float) -> _Const:
        kind = self.layout.kinds[index]
        side = self.layout.side(index)
        inv, ctx = self.inv, self.ctx
        lp, lm, rp, rm = inv.as_tuple()
        if kind == LP:
            _, ep = plane_stationary_points(lp, lm, xi)
            return _Const(kind, None, PhaseShift(genus0_phase((lp, lm), ctx, ep), "lp"), eta=ep)
        if kind == RP:
            em, _ = plane_stationary_points(rp, rm, xi)
            return _Const(kind, None, PhaseShift(genus0_phase((rp, rm), ctx, em), "rp"), eta=em)
        if kind == MP:
            eta0 = -0.5 * (rp + lm + 2.0 * xi)
            return _Const(kind, None, PhaseShift(genus0_phase((rp, lm), ctx, eta0), "mp"), eta=eta0, amp=0.5 * (rp - lm))
        if kind == RW:
            s, eta = g1.rarefaction_edges(xi, side, inv)
            branch = (s, lm) if side == "left" else (rp, s)
            if branch[0] - branch[1] <= _COLLAPSE * self._scale:
                # collapsed branch cut at the vacuum edge: amplitude is ~0 there
                return _Const(kind, side, PhaseShift(0.0, "lr" if side == "left" else "rr"), lam_s=s, eta=eta)
            tag = "lr" if side == "left" else "rr"
            return _Const(kind, side, PhaseShift(genus0_phase(branch, ctx, s), tag), lam_s=s, eta=eta)
        if kind == VAC:
            z0 = -0.5 * xi
            if not (rp + _COLLAPSE * self._scale < z0 < lm - _COLLAPSE * self._scale):
                # nu is log-singular at the gap ends; q -> 0 is the limit there
                return _Const(kind, None, PhaseShift(0.0, "va"), nu=0.0)
            return self._vacuum(xi)
        if kind == UE:
            lam = g1.LambdaVec(rp, rm, lp, lm)
            _, eta0, _ = g1.eta_points(lam, xi)
            tol = 1e-9 * max(1.0, abs(lp), abs(rm))
            if not (lp - tol <= eta0 <= rm + tol):
                raise ConsistencyError(f"gap zero {eta0} outside ({lp}, {rm})")
            eta0 = min(max(eta0, lp), rm)  # it reaches the gap ends at the region boundaries
            G = g1.band_constants(lam, xi, ctx, cut=eta0)
            return _Const(kind, None, genus1=G, amp=0.5 * (rp - rm + lp - lm), eta=eta0)
        # DSW
        if side == "left":
            s = g1.solve_soft_edge_v2(xi, rp, lp, lm)
            lam_t = (rp, s, lp, lm)
            amp = 0.5 * (rp - s + lp - lm)
        else:
            s = g1.solve_soft_edge_v3(xi, rp, rm, lm)
            lam_t = (rp, rm, s, lm)
            amp = 0.5 * (rp - rm + s - lm)
        if not (lam_t[0] > lam_t[1] > lam_t[2] > lam_t[3]) or not (0.0 < g1.modulus(lam_t) < 1.0):
            # exact edge of the shock: the neighbour's formula is the limit
            left_edge = xi <= self.layout.boundaries[index - 1]
            return _Const(kind, side, lam_s=s, amp=amp, delegate=index - 1 if left_edge else index + 1)
        G = g1.band_constants(g1.LambdaVec(*lam_t), xi, ctx, cut=s)
        return _Const(kind, side, lam_s=s, genus1=G, amp=amp)

    def _vacuum(self, xi: float) -> _Const:
        vd = sc.vacuum_nu_chi(xi, self.ctx)
        if vd.nu == 0.0:
            return _Const(VAC, None, PhaseShift(0.0, "va"), nu=0.0)
        phi = -2.0 * math.log(2.0) * vd.nu + math.pi / 4.0 + log_gamma_arg(vd.nu) - vd.arg_r + 2.0 * vd.chi_imag
        return _Const(VAC, None, PhaseShift(phi, "va"), nu=vd.nu, extra={"chi_imag": vd.chi_imag, "arg_r": vd.arg_r})

    # evaluation

    def region_index(self, xi: float) -> int:
        return self.layout.index(xi)

    def sample(self, x: float, t: float) -> AsymSample:
        if not t > 0:
            raise DomainError("t must be positive")
        xi = x / t
        index = self.region_index(xi)
        return self._sample_in(index, x, t, xi, index)

    def _sample_in(self, index: int, x: float, t: float, xi: float, label_index: int) -> AsymSample:
        c = self.constants(index, xi)
        if c.delegate is not None:
            return self._sample_in(c.delegate, x, t, xi, label_index)
        q, dens_cn = self._field(c, x, t, xi)
        kind = self.layout.kinds[label_index]
        return AsymSample(
            x=float(x), t=float(t), xi=xi, region=kind, label=self.layout.label(label_index), q=q,
            density=float(q.real * q.real + q.imag * q.imag), err_order=ERR_ORDER[kind], density_cn=dens_cn,
        )

    def _field(self, c: _Const, x: float, t: float, xi: float) -> tuple[complex, float | None]:
        s = self.step
        inv = self.inv
        if c.kind == LP:
            ph = -2.0 * s.mu_l * x - (2.0 * s.mu_l ** 2 + s.A_l ** 2) * t - c.phase.value
            return s.A_l * complex(math.cos(ph), math.sin(ph)), None
        if c.kind == RP:
            ph = -2.0 * s.mu_r * x - (2.0 * s.mu_r ** 2 + s.A_r ** 2) * t - c.phase.value
            return s.A_r * complex(math.cos(ph), math.sin(ph)), None
        if c.kind == MP:
            k = -(inv.lam_r_plus + inv.lam_l_minus)
            om = 0.5 * (inv.lam_r_plus + inv.lam_l_minus) ** 2 + 0.25 * (inv.lam_r_plus - inv.lam_l_minus) ** 2
            ph = k * x - om * t - c.phase.value
            return c.amp * complex(math.cos(ph), math.sin(ph)), None
        if c.kind == RW:
            if c.side == "left":
                a, amp = inv.lam_l_minus, -(x + 2.0 * inv.lam_l_minus * t) / (3.0 * t)
            else:
                a, amp = inv.lam_r_plus, (x + 2.0 * inv.lam_r_plus * t) / (3.0 * t)
            ph = -(2.0 * a * a * t + 2.0 * a * x - x * x / t) / 3.0 - c.phase.value
            return amp * complex(math.cos(ph), math.sin(ph)), None
        if c.kind == VAC:
            if c.nu == 0.0:
                return 0j, None
            ph = t * xi * xi / 2.0 - c.nu * math.log(t) + c.phase.value
            return c.nu / math.sqrt(t) * complex(math.cos(ph), math.sin(ph)), None
        G = c.genus1
        w = (t * G.gamma + G.gamma_hat) / (2.0 * math.pi)
        ph = 2.0 * (t * G.g_inf + G.g_hat_inf - G.phi0)
        q = c.amp * complex(theta_ratio(G, w)) * complex(math.cos(ph), math.sin(ph))
        dens_cn = cn_density(G, x, t)
        dens = abs(q) ** 2
        if abs(dens - dens_cn) > THETA_CN_RTOL * G.rho2:
            raise ConsistencyError(f"theta and cn densities disagree at x={x}, t={t}: {dens} vs {dens_cn}")
        return q, dens_cn

    def sample_many(self, xs, t: float) -> list[AsymSample]:
        return [self.sample(float(x), t) for x in xs]

    # envelopes

    def envelope(self, xi: float, index: int | None = None) -> float:
        """O(1) envelope of |q|: plane-wave amplitudes, sqrt(rho2) for one-phase waves, 0 in vacuum.

        ``index`` forces a region so one-sided limits at a boundary can be
        taken by evaluating both neighbours exactly at the boundary.
        """
        i = self.region_index(xi) if index is None else index
        kind, side = self.layout.kinds[i], self.layout.side(i)
        inv = self.inv
        lp, lm, rp, rm = inv.as_tuple()
        if kind == LP:
            return self.step.A_l
        if kind == RP:
            return self.step.A_r
        if kind == MP:
            return 0.5 * (rp - lm)
        if kind == VAC:
            return 0.0
        if kind == RW:
            lo, hi = (lm, lp) if side == "left" else (rm, rp)
            s = -(lm + 2.0 * xi) / 3.0 if side == "left" else -(rp + 2.0 * xi) / 3.0
            s = min(max(s, lo), hi)
            return 0.5 * (s - lm) if side == "left" else 0.5 * (rp - s)
        if kind == UE:
            return 0.5 * (rp - rm + lp - lm)
        if side == "left":
            s = g1.solve_soft_edge_v2(xi, rp, lp, lm)
            return 0.5 * (rp - s + lp - lm)
        s = g1.solve_soft_edge_v3(xi, rp, rm, lm)
        return 0.5 * (rp - rm + s - lm)

    def boundary_jumps(self) -> list[float]:
        """|left limit - right limit| of the envelope at each boundary."""
        out = []
        for k, b in enumerate(self.layout.boundaries):
            out.append(abs(self.envelope(b, k) - self.envelope(b, k + 1)))
        return out

    def density_bounds(self, xi: float) -> tuple[float, float] | None:
        """``(rho3, rho2)`` inside a one-phase region, else None."""
        i = self.region_index(xi)
        c = self.constants(i, xi)
        if c.genus1 is None:
            return None
        return c.genus1.rho3, c.genus1.rho2


# per-region entry points


def _checked(model: AsymModel, x: float, t: float, kinds, side=None) -> AsymSample:
    xi = x / t
    i = model.region_index(xi)
    if model.layout.kinds[i] not in kinds or (side is not None and model.layout.side(i) != side):
        raise RegionError(f"xi = {xi} lies in {model.layout.label(i)}")
    return model.sample(x, t)


def eval_left_plane(x: float, t: float, model: AsymModel) -> AsymSample:
    return _checked(model, x, t, (LP,))


def eval_right_plane(x: float, t: float, model: AsymModel) -> AsymSample:
    return _checked(model, x, t, (RP,))


def eval_rarefaction(x: float, t: float, side: str, model: AsymModel) -> AsymSample:
    return _checked(model, x, t, (RW,), side)


def eval_vacuum(x: float, t: float, model: AsymModel) -> AsymSample:
    return _checked(model, x, t, (VAC,))


def eval_middle_plane(x: float, t: float, model: AsymModel) -> AsymSample:
    return _checked(model, x, t, (MP,))


def eval_dsw(x: float, t: float, which: str, model: AsymModel) -> AsymSample:
    return _checked(model, x, t, (DSW,), which)


def eval_unmodulated(x: float, t: float, model: AsymModel) -> AsymSample:
    return _checked(model, x, t, (UE,))


def evaluate(x: float, t: float, model: AsymModel) -> AsymSample:
    return model.sample(x, t)


def sample_grid(model: AsymModel, xs, t: float):
    """Arrays ``(q, density, labels)`` on a grid at time ``t``."""
    samples = model.sample_many(xs, t)
    q = np.array([s.q for s in samples])
    dens = np.array([s.density for s in samples])
    labels = [s.label for s in samples]
    return q, dens, labels
