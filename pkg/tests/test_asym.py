import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlsstep import PRESETS, asym
from nlsstep import scattering as sc
from nlsstep.asym import AsymModel, genus0_phase, theta_ratio
from nlsstep.errors import ConsistencyError, RegionError
from nlsstep.hydro import DSW, LP, MP, RP, RW, UE, VAC
from nlsstep.specfun import ellip_K

MODELS = {k: AsymModel(v) for k, v in PRESETS.items()}
A, B, C = MODELS["a"], MODELS["b"], MODELS["c"]


def test_dispatch_examples():
    assert A.sample(-5.0, 1.0).region == LP
    assert B.sample(1.0, 1.0).region == VAC
    assert C.sample(-1.0, 1.0).region == MP


def test_exact_boundary_goes_right():
    t = 20.0
    for k, m in MODELS.items():
        for i, b in enumerate(m.layout.boundaries):
            s = m.sample(b * t, t)
            assert s.label == m.layout.label(i + 1)


def test_density_and_tags():
    for m in MODELS.values():
        for x in np.linspace(-100, 100, 41):
            s = m.sample(float(x), 20.0)
            assert abs(s.density - abs(s.q) ** 2) <= 1e-12
            assert s.err_order == asym.ERR_ORDER[s.region]
    assert asym.ERR_ORDER[VAC] == "o(t^-1/2)" and asym.ERR_ORDER[MP] == "e^-ct"


def test_plane_wave_moduli():
    assert abs(A.sample(-80.0, 20.0).q) == pytest.approx(0.5, abs=1e-15)
    assert abs(A.sample(80.0, 20.0).q) == pytest.approx(0.5, abs=1e-15)


def test_identical_steps_have_zero_phase():
    same = sc.ScatterContext(1.0, -1.0, 1.0, -1.0)
    assert genus0_phase((1.0, -1.0), same, 2.3) == pytest.approx(0.0, abs=1e-15)


def test_left_plane_phase_gauge():
    st_ = PRESETS["a"]
    om = 2 * st_.mu_l ** 2 + st_.A_l ** 2
    x, t = -100.0, 20.0
    for f in (0.9, 1.3):
        q1 = A.sample(x, t).q
        q2 = A.sample(x * f, t * f).q
        expect = -2 * st_.mu_l * (x - x * f) - om * (t - t * f)
        assert math.remainder(cmath.phase(q1) - cmath.phase(q2) - expect, 2 * math.pi) == pytest.approx(0.0, abs=1e-10)


def _sqrt_side(d, sign):
    """Boundary value of sqrt(z - p) at real d = x - p from above (+1) or below (-1)."""
    return mp.sqrt(d) if d > 0 else sign * 1j * mp.sqrt(-d)


def _r_mp(x, ctx, sign):
    """Reflection coefficient on the real axis from the quarter-root formula, in mpmath."""
    s = lambda p: _sqrt_side(x - p, sign)
    bl2 = s(ctx.l_plus) / s(ctx.l_minus)
    br2 = s(ctx.r_plus) / s(ctx.r_minus)
    return -1j * (bl2 - br2) / (bl2 + br2)


def _density_mp(kind, x, ctx):
    """Jump density straight from r and a; independent of the closed forms in scattering."""
    if kind == sc.OFF:
        return mp.log(1 - abs(_r_mp(x, ctx, 1)) ** 2)
    if kind == sc.RIGHT:
        q4 = lambda d: mp.sqrt(_sqrt_side(d, 1))  # quarter root from above
        bl = q4(x - ctx.l_plus) / q4(x - ctx.l_minus)
        br = q4(x - ctx.r_plus) / q4(x - ctx.r_minus)
        return -mp.log(abs((bl / br + br / bl) / 2) ** 2)
    return mp.log(_r_mp(x, ctx, 1))  # = i arg r_+ on |r_+| = 1


def _phase_oracle(ctx, branch, cut):
    """int over (-inf, cut) of density / R_+, all in 40-digit arithmetic."""
    with mp.workdps(40):
        pts = sorted({p for p in (*ctx.points, *branch) if p < cut}) + [cut]
        edges = [-mp.inf] + [mp.mpf(p) for p in pts]
        total = mp.mpc(0)
        for a, b in zip(edges[:-1], edges[1:]):
            mid = float(b - 1) if a == -mp.inf else float(0.5 * (a + b))
            kind = ctx.kind_at(mid)
            if kind is None:
                continue

            def f(x, kind=kind):
                if any(x == p for p in pts):
                    return mp.mpf(0)  # node rounded onto an integrable singularity
                R = mp.fprod([_sqrt_side(x - p, 1) for p in branch])
                return _density_mp(kind, x, ctx) / R

            total += mp.quad(f, [a, b])
        return complex(total)


def test_left_plane_phase_oracle():
    xi = -5.0
    c = A.constants(0, xi)
    em, ep = asym.plane_stationary_points(0.0, -1.0, xi)
    assert c.eta == ep
    ref = _phase_oracle(A.ctx, (0.0, -1.0), ep)
    assert abs(ref.imag) < 1e-9
    assert c.phase.value == pytest.approx(ref.real / math.pi, abs=1e-9)


def test_right_plane_phase_oracle():
    for key, xi in (("a", 2.5), ("e", 3.0), ("f", 4.2)):
        m = MODELS[key]
        c = m.constants(4, xi)
        inv = m.inv
        em, _ = asym.plane_stationary_points(inv.lam_r_plus, inv.lam_r_minus, xi)
        ref = _phase_oracle(m.ctx, (inv.lam_r_plus, inv.lam_r_minus), em)
        assert c.phase.kind == "rp"
        assert c.phase.value == pytest.approx(ref.real / math.pi, abs=1e-9)


def test_middle_and_rarefaction_phase_oracles():
    d = MODELS["d"]
    inv = d.inv
    for idx, xi in ((2, 1.0), (1, 0.0), (3, 2.0)):
        c = d.constants(idx, xi)
        if c.kind == MP:
            branch, cut = (inv.lam_r_plus, inv.lam_l_minus), c.eta
        elif idx == 1:
            branch, cut = (c.lam_s, inv.lam_l_minus), c.lam_s
        else:
            branch, cut = (inv.lam_r_plus, c.lam_s), c.lam_s
        ref = _phase_oracle(d.ctx, branch, cut)
        assert c.phase.value == pytest.approx(ref.real / math.pi, abs=1e-9)


def test_genus_one_phase_oracle():
    c = A.constants(1, -3.12)
    G = c.genus1
    ref = _phase_oracle(A.ctx, G.lam.as_tuple(), c.lam_s)
    assert G.phi1 == pytest.approx(ref.real / (2 * math.pi), abs=1e-9)
    assert G.phi1 == pytest.approx(-0.0280244, abs=1e-7)


def test_rarefaction_examples():
    inv = B.inv
    assert B.envelope(-1.5) == pytest.approx(PRESETS["b"].A_l)
    assert abs(B.sample(-1.5 * 20 + 1e-12, 20.0).q) == pytest.approx(0.5, abs=1e-12)
    assert abs(B.sample(-1e-9, 1.0).q) == pytest.approx(0.0, abs=1e-9)
    t = 20.0
    xs = np.linspace(-1.4, -0.1, 7) * t
    mods = [abs(B.sample(float(x), t).q) for x in xs]
    slopes = np.diff(mods) / np.diff(xs / t)
    assert slopes == pytest.approx(-1 / 3, abs=1e-12)
    xs = np.linspace(2.1, 3.4, 7) * t
    mods = [abs(B.sample(float(x), t).q) for x in xs]
    assert np.diff(mods) / np.diff(xs / t) == pytest.approx(1 / 3, abs=1e-12)
    assert inv.lam_l_minus == 0.0


def test_vacuum_bound_and_phase_reassembly():
    t = 20.0
    xis = np.linspace(0.05, 1.95, 39)
    nus = [B.constants(2, float(x)).nu for x in xis]
    C_ = max(nus)
    for xi in xis:
        assert abs(B.sample(float(xi) * t, t).q) <= C_ / math.sqrt(t) + 1e-15
    xi = 1.0
    c = B.constants(2, xi)
    vd = sc.vacuum_nu_chi(xi, B.ctx)
    argr = cmath.phase(sc.reflection(-xi / 2, B.ctx))
    ref = -2 * math.log(2) * vd.nu + math.pi / 4 + float(mp.im(mp.loggamma(1j * vd.nu))) - argr + 2 * vd.chi_imag
    assert c.phase.value == pytest.approx(ref, abs=1e-10)
    assert c.phase.kind == "va"


def test_middle_plane_example():
    c = C.constants(2, -1.0)
    assert c.amp == 1.5
    t, x = 20.0, -20.0
    q0 = C.sample(x, t).q
    dx = 1e-3
    # the phase shift is xi-independent here, so k and omega read off directly
    k = cmath.phase(C.sample(x + dx, t).q / q0) / dx
    assert k == pytest.approx(-1.0, abs=1e-9)
    om = -cmath.phase(C.sample(x * 1.001, t * 1.001).q / q0 * cmath.exp(-1j * k * x * 0.001)) / (t * 0.001)
    assert om == pytest.approx(2.75, abs=1e-8)
    assert C.envelope(-1.5, 1) == pytest.approx(C.envelope(-1.5, 2), abs=1e-12)


def test_dsw_envelope_bounds():
    xi = -3.12
    t = 20.0
    lo, hi = A.density_bounds(xi)
    for x in np.linspace(xi * t - 0.5, xi * t + 0.5, 201):
        s = A.sample(float(x), t)
        assert lo - 1e-12 <= s.density <= hi + 1e-12


def test_dsw_edges():
    assert A.envelope(-3.9 + 1e-9) == pytest.approx(0.5, abs=1e-6)
    assert A.envelope(-2.349491959187106 - 1e-12, 1) == pytest.approx(1.0, abs=1e-6)
    assert A.envelope(-3.9, 1) == pytest.approx(0.5, abs=1e-12)


def test_theta_prefactor_at_cn_maximum():
    for xi in (-3.7, -3.12, -2.6):
        G = A.constants(1, xi).genus1
        amp = A.constants(1, xi).amp
        w = (2j * G.d * 2 * ellip_K(G.m) / math.sqrt(G.rho1 - G.rho3)).real
        assert abs(amp * theta_ratio(G, w)) == pytest.approx(math.sqrt(G.rho2), abs=1e-6)


def test_theta_argument_is_x_resolved():
    G = A.constants(1, -3.12).genus1
    t = 17.0
    x = -3.12 * t
    w = (t * G.gamma + G.gamma_hat) / (2 * math.pi)
    assert w == pytest.approx((2j * G.d * (x - G.V * t + G.phi1)).real, abs=1e-9)


@pytest.mark.parametrize("key", ["a", "c", "e", "f"])
def test_theta_cn_agreement(key):
    m = MODELS[key]
    for i, kind in enumerate(m.layout.kinds):
        if kind != DSW:
            continue
        lo, hi = m.layout.boundaries[i - 1], m.layout.boundaries[i]
        for xi in np.linspace(lo, hi, 12)[1:-1]:
            s = m.sample(float(xi) * 20.0, 20.0)
            assert abs(s.density - s.density_cn) <= 1e-6 * m.density_bounds(s.xi)[1]


def test_unmodulated_region():
    lo, hi = A.layout.boundaries[1], A.layout.boundaries[2]
    ms = [A.constants(2, float(x)).genus1.m for x in np.linspace(lo, hi, 6)[:-1]]
    assert np.var(ms) <= 1e-12
    assert A.constants(2, -1.0).amp == 1.0
    assert A.envelope(lo, 1) == pytest.approx(A.envelope(lo, 2), abs=1e-9)


def test_modulus_trend_along_dsw():
    lo, hi = A.layout.boundaries[0], A.layout.boundaries[1]
    ms = [A.constants(1, float(x)).genus1.m for x in np.linspace(lo, hi, 22)[1:-1]]
    assert all(0 < v < 1 for v in ms)
    assert all(b > a for a, b in zip(ms, ms[1:]))


@pytest.mark.parametrize("key", sorted(PRESETS))
def test_envelope_continuity(key):
    assert max(MODELS[key].boundary_jumps()) <= 1e-6


@pytest.mark.parametrize("key", sorted(PRESETS))
def test_mirror_moduli(key):
    m, mm = MODELS[key], AsymModel(PRESETS[key].mirrored())
    for x in np.linspace(-90, 90, 37) + 0.321:
        assert abs(abs(m.sample(float(x), 20.0).q) - abs(mm.sample(float(-x), 20.0).q)) <= 1e-9


def test_region_mismatch_errors():
    with pytest.raises(RegionError):
        asym.eval_left_plane(0.0, 1.0, A)
    with pytest.raises(RegionError):
        asym.eval_dsw(-3.12, 1.0, "right", A)
    assert asym.eval_dsw(-3.12, 1.0, "left", A).label == "DSW-left"
    assert asym.eval_unmodulated(-1.0, 1.0, A).region == UE
    assert asym.eval_right_plane(3.0, 1.0, A).region == RP
    assert asym.eval_rarefaction(-1.0, 1.0, "left", B).region == RW
    assert asym.eval_vacuum(1.0, 1.0, B).region == VAC
    assert asym.eval_middle_plane(-1.0, 1.0, C).region == MP
    assert asym.evaluate(-5.0, 1.0, A).region == LP


def test_theta_cn_mismatch_is_reported(monkeypatch):
    monkeypatch.setattr(asym, "THETA_CN_RTOL", -1.0)
    with pytest.raises(ConsistencyError):
        AsymModel(PRESETS["a"]).sample(-3.12 * 20, 20.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(-6.0, 6.0), st.floats(1.0, 60.0))
def test_samples_are_finite(xi, t):
    for m in (A, B, C):
        s = m.sample(xi * t, t)
        assert math.isfinite(s.density)


@pytest.mark.parametrize("key", sorted(PRESETS))
def test_near_boundary_samples(key):
    m = MODELS[key]
    for b in m.layout.boundaries:
        for eps in (0.0, 1e-12, 1e-8, 1e-4):
            for xi in (b - eps, b + eps):
                s = m.sample(xi * 20.0, 20.0)
                assert math.isfinite(s.density)
                if s.region in (DSW, UE, LP, RP, MP, RW):
                    assert abs(s.q) <= m.envelope(xi) + 1e-9
