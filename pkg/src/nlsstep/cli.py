"""Command-line front end: ``nlsstep classify|asym|simulate|compare``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import PRESETS
from .asym import AsymModel
from .errors import (
    AccuracyError,
    ConfigError,
    ConsistencyError,
    DegenerateStep,
    DomainError,
    NlsStepError,
    RegionError,
)
from .hydro import DSW, LP, MP, RP, UE, VAC, StepData, invariants, region_layout
from .nlssim import DEFAULT_DT, DEFAULT_L, DEFAULT_N, SimConfig, run

EXIT_OK, EXIT_USER, EXIT_INTERNAL = 0, 2, 3
PLANE_KINDS = (LP, RP, MP)
TOLERANCES = {
    "plane_linf": 0.05,
    "dsw_band_slack": 0.05,
    "dsw_in_band_fraction": 0.99,
    "vacuum_bound_factor": 4.0,
    "decay_ratio_t_vs_2t_max": 0.8,
}


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def _tag(v: float) -> str:
    """Shortest round-trip text for file names: 20.0 -> '20', 0.333 -> '0.333'."""
    r = repr(float(v))
    return r[:-2] if r.endswith(".0") else r


def _json_float(v):
    return float(fmt(v))


def classify_report(step: StepData) -> dict:
    inv = invariants(step)
    layout = region_layout(inv)
    return {
        "invariants": {
            "lambda_l_plus": inv.lam_l_plus,
            "lambda_l_minus": inv.lam_l_minus,
            "lambda_r_plus": inv.lam_r_plus,
            "lambda_r_minus": inv.lam_r_minus,
        },
        "case": layout.case.case,
        "boundaries": [_json_float(b) for b in layout.boundaries],
        "regions": [layout.label(i) for i in range(len(layout.kinds))],
    }


def asym_rows(model: AsymModel, xs, times):
    for t in times:
        for x in xs:
            s = model.sample(float(x), float(t))
            yield s


def write_asym_csv(samples, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["x", "t", "xi", "region", "re_q", "im_q", "density", "err_order"])
    for s in samples:
        w.writerow([fmt(s.x), fmt(s.t), fmt(s.xi), s.label, fmt(s.q.real), fmt(s.q.imag), fmt(s.density), s.err_order])


def read_asym_csv(fh) -> list[dict]:
    out = []
    for row in csv.DictReader(fh):
        out.append({k: (v if k in ("region", "err_order") else float(v)) for k, v in row.items()})
    return out


def compare_snapshot(model: AsymModel, x: np.ndarray, q: np.ndarray, t: float, trust: tuple[float, float], stride: int = 1):
    """Per-sample comparison rows and per-region error summary inside the trust window."""
    lo, hi = trust
    sel = np.nonzero((x >= lo) & (x <= hi))[0][::stride]
    rows, regions = [], {}
    nu_max = 0.0
    for j in sel:
        s = model.sample(float(x[j]), t)
        dn = float(abs(q[j]) ** 2)
        err = abs(dn - s.density)
        rows.append((float(x[j]), dn, s.density, err, s.label))
        r = regions.setdefault(s.label, {"kind": s.region.value, "errs": [], "num": [], "in_band": []})
        r["errs"].append(err)
        r["num"].append(dn)
        if s.region in (DSW, UE):
            rho3, rho2 = model.density_bounds(s.xi)
            r["in_band"].append(rho3 - 0.05 <= dn <= rho2 + 0.05)
        if s.region == VAC:
            c = model.constants(model.region_index(s.xi), s.xi)
            if c.nu is not None:
                nu_max = max(nu_max, c.nu)
    summary = {}
    dx = float(x[1] - x[0]) * stride
    for label, r in regions.items():
        e = np.array(r["errs"])
        d = {"kind": r["kind"], "n": int(e.size), "linf": float(e.max()), "l2": float(math.sqrt(np.sum(e * e) * dx)),
             "max_density_num": float(max(r["num"]))}
        if r["in_band"]:
            d["frac_in_band"] = float(np.mean(r["in_band"]))
        if r["kind"] == VAC.value:
            d["nu_max"] = nu_max
            d["vacuum_bound"] = 4.0 * nu_max ** 2 / t
        summary[label] = d
    return rows, summary


def write_compare_csv(rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["x", "density_num", "density_asym", "abs_err", "region"])
    for x, dn, da, e, lab in rows:
        w.writerow([fmt(x), fmt(dn), fmt(da), fmt(e), lab])


# argument handling

_SIM_KEYS = ("L", "N", "dt", "t_end")


@dataclass(frozen=True)
class Scenario:
    step: StepData
    times: tuple[float, ...] = (20.0,)
    x_range: tuple[float, float, int] = (-100.0, 100.0, 4001)
    sim: dict = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        xmin, xmax, nx = self.x_range
        if not xmin < xmax:
            raise ConfigError("need xmin < xmax")
        if nx < 2:
            raise ConfigError("need nx >= 2")
        if not self.times or any(not t > 0 for t in self.times):
            raise ConfigError("times must be positive")
        unknown = set(self.sim) - set(_SIM_KEYS)
        if unknown:
            raise ConfigError(f"unknown sim overrides {sorted(unknown)}")

    @classmethod
    def from_json(cls, data: dict) -> "Scenario":
        try:
            st = data.get("step", data)
            step = StepData(float(st["A_l"]), float(st["mu_l"]), float(st["A_r"]), float(st["mu_r"]))
            kw = {}
            if "times" in data:
                kw["times"] = tuple(float(t) for t in data["times"])
            if "x_range" in data:
                xmin, xmax, nx = data["x_range"]
                kw["x_range"] = (float(xmin), float(xmax), int(nx))
            if "sim" in data:
                kw["sim"] = dict(data["sim"])
            return cls(step, label=str(data.get("label", "")), **kw)
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"malformed scenario: {e!r}") from e


def _scenario(a) -> Scenario:
    if a.scenario:
        try:
            sc = Scenario.from_json(json.loads(Path(a.scenario).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read scenario {a.scenario}: {e}") from e
    elif a.preset:
        sc = Scenario(PRESETS[a.preset], label=a.preset)
    else:
        vals = (a.Al, a.mul, a.Ar, a.mur)
        if any(v is None for v in vals):
            raise ConfigError("give --preset, --scenario, or all of --Al --mul --Ar --mur")
        sc = Scenario(StepData(*vals))
    xmin, xmax, nx = sc.x_range
    sim = dict(sc.sim)
    for k in _SIM_KEYS:
        if getattr(a, k) is not None:
            sim[k] = getattr(a, k)
    return Scenario(
        sc.step,
        tuple(a.t) if a.t else sc.times,
        (xmin if a.xmin is None else a.xmin, xmax if a.xmax is None else a.xmax, nx if a.nx is None else a.nx),
        sim,
        sc.label,
    )


def _xgrid(sc: Scenario) -> np.ndarray:
    xmin, xmax, nx = sc.x_range
    return np.linspace(xmin, xmax, nx)


def _sim_cfg(sc: Scenario, t_end: float, snaps) -> SimConfig:
    o = sc.sim
    return SimConfig(
        L=float(o.get("L", DEFAULT_L)), N=int(o.get("N", DEFAULT_N)), dt=float(o.get("dt", DEFAULT_DT)),
        t_end=t_end, snapshot_ts=tuple(snaps),
    )


def _emit(text: str, out: str | None, name: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / name).write_text(text, encoding="utf-8", newline="")


def cmd_classify(a) -> int:
    sc = _scenario(a)
    _emit(json.dumps(classify_report(sc.step), indent=2) + "\n", a.out, "classify.json")
    return EXIT_OK


def cmd_asym(a) -> int:
    sc = _scenario(a)
    model = AsymModel(sc.step)
    buf = io.StringIO()
    write_asym_csv(asym_rows(model, _xgrid(sc), sc.times), buf)
    _emit(buf.getvalue(), a.out, "asym.csv")
    return EXIT_OK


def _manifest(res, sc: Scenario) -> dict:
    cfg = res.cfg
    return {
        "label": sc.label,
        "step": asdict(sc.step),
        "config": {"L": cfg.L, "N": cfg.N, "dt": cfg.dt, "smooth_w": cfg.width, "pad": cfg.pad, "t_end": cfg.t_end,
                   "dt_bound": cfg.dt_bound, "dt_resonance": cfg.dt_resonance},
        "vmax": res.vmax,
        "steps": res.steps,
        "norm_drift": res.norm_drift,
        "momentum_drift": res.momentum_drift,
        "snapshots": [{"t_requested": s.t_requested, "t": s.t, "trust_window": list(s.trust)} for s in res.snapshots],
    }


def cmd_simulate(a) -> int:
    sc = _scenario(a)
    t_end = float(sc.sim.get("t_end", max(sc.times)))
    res = run(_sim_cfg(sc, t_end, sc.times), sc.step)
    out = a.out or "."
    for s in res.snapshots:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "re_q", "im_q", "density"])
        for x, q in zip(s.x, s.q):
            w.writerow([fmt(x), fmt(q.real), fmt(q.imag), fmt(q.real * q.real + q.imag * q.imag)])
        _emit(buf.getvalue(), out, f"snapshot_t{_tag(s.t_requested)}.csv")
    _emit(json.dumps(_manifest(res, sc), indent=2) + "\n", out, "manifest.json")
    return EXIT_OK


def cmd_compare(a) -> int:
    sc = _scenario(a)
    t = sc.times[0]
    res = run(_sim_cfg(sc, 2.0 * t, (t, 2.0 * t)), sc.step)
    model = AsymModel(sc.step)
    out = a.out or "."
    s1, s2 = res.snapshots[0], res.snapshots[1]
    xmin, xmax = max(sc.x_range[0], s1.trust[0]), min(sc.x_range[1], s1.trust[1])
    rows, summary = compare_snapshot(model, s1.x, s1.q, s1.t, (xmin, xmax), a.stride)
    _, summary2 = compare_snapshot(model, s2.x, s2.q, s2.t, (xmin * 2.0, xmax * 2.0), a.stride)
    for label, d in summary.items():
        if d["kind"] in (k.value for k in PLANE_KINDS) and label in summary2:
            d["decay_ratio"] = d["linf"] / summary2[label]["linf"] if summary2[label]["linf"] > 0 else math.inf
    buf = io.StringIO()
    write_compare_csv(rows, buf)
    _emit(buf.getvalue(), out, "compare.csv")
    report = {"t": s1.t, "t2": s2.t, "window": [xmin, xmax], "regions": summary, "tolerances": TOLERANCES,
              "manifest": _manifest(res, sc)}
    _emit(json.dumps(report, indent=2) + "\n", out, "summary.json")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlsstep", description="Defocusing NLS step problem: asymptotics and simulation.")
    sub = p.add_subparsers(dest="command", required=True)
    cmds = {
        "classify": cmd_classify,
        "asym": cmd_asym,
        "simulate": cmd_simulate,
        "compare": cmd_compare,
    }
    for name, fn in cmds.items():
        s = sub.add_parser(name)
        s.set_defaults(func=fn)
        g = s.add_argument_group("step data")
        g.add_argument("--preset", choices=sorted(PRESETS))
        g.add_argument("--scenario", help="JSON file with A_l, mu_l, A_r, mu_r (optionally under 'step')")
        for flag in ("Al", "mul", "Ar", "mur"):
            g.add_argument(f"--{flag}", type=float)
        s.add_argument("--t", type=float, action="append", help="time (repeatable)")
        s.add_argument("--xmin", type=float, help="default -100")
        s.add_argument("--xmax", type=float, help="default 100")
        s.add_argument("--nx", type=int, help="default 4001")
        s.add_argument("--out", help="output directory (stdout if omitted, except for simulate/compare)")
        s.add_argument("--L", type=float, help="half-domain, default 200 pi")
        s.add_argument("--N", type=int, help="grid size, default 2^16")
        s.add_argument("--dt", type=float, help=f"time step, default {DEFAULT_DT}")
        s.add_argument("--t-end", dest="t_end", type=float)
        s.add_argument("--stride", type=int, default=1, help="grid stride for compare")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError, DegenerateStep, RegionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USER
    except (ConsistencyError, AccuracyError) as e:
        print(f"internal consistency error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except NlsStepError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
