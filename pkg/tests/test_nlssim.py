import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlsstep import PRESETS
from nlsstep.errors import ConfigError
from nlsstep.hydro import StepData
from nlsstep.nlssim import (
    BlowUp,
    SimConfig,
    Stepper,
    discrete_norm,
    fft_workers,
    init_step,
    max_speed,
    momentum,
    run,
    snapshot_at,
    step,
)

L0 = 200.0 * math.pi


def test_plane_wave_is_preserved():
    cfg = SimConfig(L=L0, N=2 ** 12, dt=1e-3, t_end=10.0)
    res = run(cfg, StepData(1.0, 0.0, 1.0, 0.0))
    q = res.snapshots[-1].q
    assert np.max(np.abs(q - cmath.exp(-10j))) <= 1e-10


def test_moving_plane_wave_is_preserved():
    A, mu = 0.7, 0.5
    cfg = SimConfig(L=L0, N=2 ** 12, dt=1e-3, t_end=10.0)
    res = run(cfg, StepData(A, mu, A, mu))
    x = cfg.grid()
    exact = A * np.exp(-2j * mu * x - 1j * (2 * mu * mu + A * A) * 10.0)
    assert np.max(np.abs(res.snapshots[-1].q - exact)) <= 1e-10


def test_identical_steps_initialize_exactly():
    cfg = SimConfig(L=L0, N=2 ** 12)
    s = init_step(cfg, StepData(0.8, 0.25, 0.8, 0.25))
    assert np.max(np.abs(s.q - 0.8 * np.exp(-0.5j * s.x))) <= 1e-14


def test_initial_data_far_from_seams():
    cfg = SimConfig(L=L0, N=2 ** 14)
    st_a = PRESETS["a"]
    s = init_step(cfg, st_a)
    j = int(np.argmin(np.abs(s.x + cfg.L / 2)))
    assert s.x[j] == -cfg.L / 2
    assert abs(s.q[j] - st_a.A_l * cmath.exp(-2j * st_a.mu_l * s.x[j])) <= 1e-14
    j = int(np.argmin(np.abs(s.x - cfg.L / 2)))
    assert abs(s.q[j] - st_a.A_r * cmath.exp(-2j * st_a.mu_r * s.x[j])) <= 1e-13


@pytest.mark.parametrize("key", sorted(PRESETS))
def test_seam_and_jump_are_continuous(key):
    cfg = SimConfig(L=L0, N=2 ** 14)
    stp = PRESETS[key]
    q = init_step(cfg, stp).q
    jumps = np.abs(np.diff(np.append(q, q[0])))
    amax = max(stp.A_l, stp.A_r)
    mmax = max(abs(stp.mu_l), abs(stp.mu_r))
    # smoothstep slope <= 15/8 over 2w, plus the carrier's own 2 mu dx
    bound = amax * cfg.dx / cfg.width * 2.0 + 2.0 * amax * mmax * cfg.dx * 1.5
    assert jumps.max() <= bound


def test_linear_gaussian_oracle():
    eps, s2, t = 1e-6, 4.0, 1.0
    L = 60.0
    x = -L + 2 * L / 2 ** 11 * np.arange(2 ** 11)
    q0 = eps * np.exp(-x * x / (2 * s2))
    q = Stepper(2 ** 11, L, 1e-3).advance(q0.astype(complex), 1000)
    exact = eps / np.sqrt(1 + 1j * t / s2) * np.exp(-x * x / (2 * (s2 + 1j * t)))
    assert np.max(np.abs(q - exact)) / eps <= 1e-8


def test_norm_conserved_per_thousand_steps():
    cfg = SimConfig(L=L0, N=2 ** 14, dt=1e-3)
    s = init_step(cfg, PRESETS["a"])
    q = Stepper(cfg.N, cfg.L, cfg.dt).advance(s.q, 1000)
    assert abs(discrete_norm(q, cfg.dx) - s.mass0) / s.mass0 <= 1e-12


def test_single_step_matches_stepper():
    cfg = SimConfig(L=L0, N=2 ** 10, dt=1e-2)
    s = init_step(cfg, PRESETS["c"])
    s1 = step(s, cfg.dt, cfg.L)
    assert s1.t == pytest.approx(cfg.dt) and s1.steps == 1
    q = Stepper(cfg.N, cfg.L, cfg.dt).advance(s.q, 1)
    assert np.max(np.abs(s1.q - q)) <= 1e-15


def test_norm_and_momentum_drift_in_run():
    cfg = SimConfig(L=L0, N=2 ** 14, dt=1e-3, t_end=5.0)
    res = run(cfg, PRESETS["b"])
    assert res.norm_drift <= 1e-10
    assert res.momentum_drift <= 1e-8 * cfg.t_end


def test_momentum_of_plane_wave():
    cfg = SimConfig(L=L0, N=2 ** 10)
    q = 0.5 * np.exp(-2j * 0.75 * cfg.grid())
    # Im conj(q) q_x = -2 mu A^2 per unit length
    assert momentum(q, cfg.L) == pytest.approx(-2 * 0.75 * 0.25 * 2 * cfg.L, rel=1e-12)


def test_splitting_order():
    base = dict(L=L0, N=2 ** 14, smooth_w=2.0, t_end=10.0)
    fields = [run(SimConfig(dt=dt, **base), PRESETS["a"]).snapshots[-1].q for dt in (2e-3, 1e-3, 5e-4)]
    d1 = np.linalg.norm(fields[0] - fields[1])
    d2 = np.linalg.norm(fields[1] - fields[2])
    order = math.log2(d1 / d2)
    assert 1.8 <= order <= 2.2


def test_non_commensurate_mu_rejected():
    with pytest.raises(ConfigError, match="commensurate"):
        init_step(SimConfig(L=L0, N=2 ** 10), StepData(1.0, 0.1234, 1.0, 0.0))


def test_seam_winding_parity_rejected():
    with pytest.raises(ConfigError, match="winding"):
        init_step(SimConfig(L=L0, N=2 ** 10), StepData(1.0, 0.0025, 1.0, 0.0))


def test_t_end_beyond_trust_window_names_bound():
    with pytest.raises(ConfigError, match="max admissible t_end"):
        run(SimConfig(L=L0, N=2 ** 10, dt=1e-2, t_end=500.0), PRESETS["a"])


def test_resonant_dt_rejected():
    with pytest.raises(ConfigError, match="resonance"):
        SimConfig(L=L0, N=2 ** 16, dt=2.5e-4)
    assert SimConfig().dt < SimConfig().dt_resonance


@pytest.mark.parametrize(
    "kw",
    [dict(L=-1.0), dict(N=1000), dict(dt=0.0), dict(smooth_w=-1.0), dict(t_end=0.0), dict(t_end=1.0, snapshot_ts=(2.0,))],
)
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        SimConfig(**kw)


def test_trust_window_for_fig_scale_run():
    cfg = SimConfig()
    v = max_speed(PRESETS["a"])
    assert v == pytest.approx(3.9 + 2.0)
    hw = cfg.L - v * 20.0 - cfg.pad
    assert hw >= 100.0


@pytest.mark.parametrize("key", sorted(PRESETS))
def test_forty_time_units_fit_default_domain(key):
    cfg = SimConfig()
    assert cfg.L - max_speed(PRESETS[key]) * 40.0 - cfg.pad > 50.0


def test_snapshot_time_rounds_to_step_grid():
    cfg = SimConfig(L=L0, N=2 ** 10, dt=0.03, t_end=0.3, snapshot_ts=(0.1,))
    res = run(cfg, PRESETS["a"])
    s = snapshot_at(res, 0.1)
    assert s.t == pytest.approx(0.09) and s.t_requested == 0.1
    lo, hi = s.trust
    assert hi == pytest.approx(cfg.L - res.vmax * s.t - cfg.pad) and lo == -hi
    with pytest.raises(KeyError):
        snapshot_at(res, 0.2)


def test_blow_up_detected():
    q = np.zeros(64, complex)
    q[3] = np.nan
    with pytest.raises(BlowUp):
        Stepper(64, 10.0, 1e-3).advance(q, 2)


def test_fft_workers_env(monkeypatch):
    monkeypatch.setenv("DSW_NUM_THREADS", "3")
    assert fft_workers() == 3
    monkeypatch.setenv("DSW_NUM_THREADS", "junk")
    assert fft_workers() == 1
    monkeypatch.delenv("DSW_NUM_THREADS")
    assert fft_workers() == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.1, 2.0))
def test_steps_are_isometries(seed, amp):
    rng = np.random.default_rng(seed)
    q = amp * (rng.standard_normal(256) + 1j * rng.standard_normal(256))
    q1 = Stepper(256, 20.0, 1e-3).advance(q, 50)
    assert discrete_norm(q1, 1.0) == pytest.approx(discrete_norm(q, 1.0), rel=1e-12)
