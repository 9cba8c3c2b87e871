"""Named, reproducible simulation scenarios.

Each scenario writes trajectory CSVs, one summary CSV and SVG plots into
``<out>/<scenario name>/``. Everything is deterministic, so two runs of the
same scenario produce byte-identical files.

The pulse scenarios place the measurement pulse at ``t_d = fraction * T_c``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Optional, Sequence

import numpy as np

from ..auxcontrollers import (
    AuxController,
    PolyParams,
    bounded_exp_controller,
    linear_controller,
    poly_fixed_time,
    second_order_sliding,
)
from ..errors import ConfigError, DomainError, NumericalError
from ..simulator import (
    Disturbance,
    SimConfig,
    Trajectory,
    make_pulse,
    simulate,
    sinusoid,
    write_csv,
    zero_disturbance,
)
from ..synthesis import SynthesizedController, predicted_settling_bound, sign_terminal, synthesize
from ..timescale import kappa_max
from .config import apply_overrides, fmt
from .svg import export_svg

FIXED_TIME_POLY = {"a": 4.0, "b": 0.25, "p": 0.9, "q": 1.1, "k": 1.0}
SOSM_DEFAULTS = {"a1": 4.0, "b1": 0.25, "a2": 4.0, "b2": 0.25, "p": 0.5, "q": 1.0, "k": 1.5,
                 "T_f1": 5.0, "T_f2": 5.0, "zeta": 1.0}
PULSE_FRACTIONS = (0.995, 0.996, 0.997, 0.998)
SWEEP_ALPHAS = (0.001, 0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0)


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    defaults: Mapping[str, Any]
    runner: Callable[[dict, Path], list[Path]] = field(repr=False)


@dataclass(frozen=True)
class SweepResult:
    alphas: np.ndarray
    energy: np.ndarray
    sup_u: np.ndarray
    settling: np.ndarray  # nan where the run never settled
    predicted: np.ndarray
    kappa_max: np.ndarray
    kappa_peak: np.ndarray
    trajectories: tuple = field(repr=False, default=())

    @property
    def argmin(self) -> float:
        return float(self.alphas[int(np.argmin(self.energy))])


@dataclass(frozen=True)
class ProbeResult:
    t_d: np.ndarray
    peaks: np.ndarray
    trajectories: tuple = field(repr=False, default=())

    @property
    def spread(self) -> float:
        """max / min peak over the grid."""
        return float(self.peaks.max() / self.peaks.min())


def _sim(p: dict, horizon: float, settle_eps: float = 1e-3) -> SimConfig:
    return SimConfig(h=p["h"], horizon=horizon, record_stride=p["record_stride"],
                     settle_eps=p.get("settle_eps", settle_eps))


def _label(x0) -> str:
    parts = []
    for v in np.atleast_1d(x0):
        parts.append(format(float(v), ".6g").replace("-", "m").replace(".", "p"))
    return "_".join(parts)


def _within(observed: Optional[float], predicted: float, h: float) -> str:
    if observed is None:
        return "false"
    return "true" if observed <= predicted + 2 * h else "false"


def write_table(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


# --- sweeps and probes ------------------------------------------------------

def energy_sweep(aux: AuxController, T_c: float, alphas: Sequence[float], x0, *,
                 rho: float = 0.0, beta: float = 1.0,
                 cfg: Optional[SimConfig] = None) -> SweepResult:
    """Redesign ``aux`` for each rate in ``alphas`` and record energy and effort over [0, T_c]."""
    if not math.isfinite(aux.T_f):
        raise DomainError("the energy sweep needs an auxiliary controller with finite T_f", "aux")
    alphas = [float(a) for a in alphas]
    if not alphas or any(a <= 0 for a in alphas):
        raise DomainError("alphas must be positive", "alphas")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise DomainError("alphas must be strictly increasing", "alphas")
    cfg = cfg or SimConfig(horizon=T_c)
    cols = {k: [] for k in ("E", "u", "s", "pred", "kmax", "kpeak")}
    trajs = []
    for a in alphas:
        ctrl = synthesize(aux, T_c, a, rho, beta=beta)
        try:
            tr = simulate(ctrl, x0, zero_disturbance(), cfg)
        except NumericalError as exc:
            raise NumericalError(f"alpha = {a}: {exc}", exc.step) from exc
        cols["E"].append(energy_until(tr, T_c))
        cols["u"].append(tr.max_control)
        cols["s"].append(math.nan if tr.settle_time is None else tr.settle_time)
        cols["pred"].append(predicted_settling_bound(ctrl, x0))
        cols["kmax"].append(kappa_max(ctrl.timescale))
        cols["kpeak"].append(tr.kappa_peak)
        trajs.append(tr)
    arr = {k: np.array(v, dtype=float) for k, v in cols.items()}
    return SweepResult(np.array(alphas), arr["E"], arr["u"], arr["s"], arr["pred"], arr["kmax"],
                       arr["kpeak"], tuple(trajs))


def energy_until(tr: Trajectory, t: float) -> float:
    """Energy at the last recorded time not after ``t``."""
    idx = int(np.searchsorted(tr.times, t + 0.5 * tr.h, side="right")) - 1
    return float(tr.energy[max(idx, 0)])


def uniform_stability_probe(ctrl: SynthesizedController, t_d_list: Sequence[float], x0,
                            height: float = 0.1, width: float = 1e-3, *,
                            dist: Optional[Disturbance] = None, h: float = 1e-5,
                            record_stride: int = 100,
                            horizon_factor: float = 1.05) -> ProbeResult:
    """Peak |x_n| after a pulse in the measured x1, for each pulse start in ``t_d_list``."""
    tds = [float(t) for t in t_d_list]
    if not tds:
        raise DomainError("t_d_list is empty", "t_d_list")
    if any(b <= a for a, b in zip(tds, tds[1:])):
        raise DomainError("t_d_list must be strictly increasing", "t_d_list")
    if tds[0] < 0 or tds[-1] >= ctrl.T_c:
        raise DomainError("every t_d must lie in [0, T_c)", "t_d_list")
    if width < 2 * h:
        raise DomainError(f"pulse width {width} is below 2h = {2 * h}", "width")
    cfg = SimConfig(h=h, horizon=horizon_factor * ctrl.T_c, record_stride=record_stride)
    dist = dist or zero_disturbance()
    peaks, trajs = [], []
    for td in tds:
        tr = simulate(ctrl, x0, dist, cfg, measurement=make_pulse(td, width, height), peak_from=td)
        peaks.append(tr.tail_peak)
        trajs.append(tr)
    return ProbeResult(np.array(tds), np.array(peaks), tuple(trajs))


# --- scenario runners -------------------------------------------------------

def _summary_row(ctrl, tr: Trajectory, x0, horizon_energy: float) -> list:
    pred = predicted_settling_bound(ctrl, x0)
    return [pred, tr.settle_time, _within(tr.settle_time, pred, tr.h), horizon_energy,
            tr.max_control, tr.kappa_peak]


SUMMARY_TAIL = ["predicted_bound", "observed_settling", "within_bound", "E_T", "sup_u",
                "kappa_peak"]


def _run_tstop(p: dict, out: Path, aux: AuxController) -> list[Path]:
    ctrl = synthesize(aux, p["T_c"], p["alpha"], 0.0, beta=1.0, terminal=sign_terminal(0.0))
    cfg = _sim(p, p["T_c"])
    paths, rows = [], []
    for x0 in p["x0"]:
        tr = simulate(ctrl, [x0], zero_disturbance(), cfg, switch_time=p["t_stop"])
        x_stop = float(np.interp(p["t_stop"], tr.times, tr.states[:, 0]))
        paths.append(write_csv(tr, out / f"traj_x0_{_label(x0)}.csv"))
        rows.append([x0, x_stop, x_stop / x0 if x0 else math.nan,
                     *_summary_row(ctrl, tr, [x0], energy_until(tr, p["T_c"]))])
    summary = write_table(out / "summary.csv", ["x0", "x_tstop", "ratio", *SUMMARY_TAIL], rows)
    return [*paths, summary, export_svg(paths, "state", out / "state.svg")]


def run_linear_tstop(p: dict, out: Path) -> list[Path]:
    return _run_tstop(p, out, linear_controller([1.0]))


def run_bounded_tstop(p: dict, out: Path) -> list[Path]:
    return _run_tstop(p, out, bounded_exp_controller(p["c"]))


def run_motivating(p: dict, out: Path) -> list[Path]:
    ctrl = synthesize(linear_controller([1.0]), p["T_c"], 1.0, 0.0, beta=1.0)
    cfg = _sim(p, p["horizon_factor"] * p["T_c"])
    paths, rows = [], []
    for x0 in p["x0"]:
        tr = simulate(ctrl, [x0], zero_disturbance(), cfg)
        paths.append(write_csv(tr, out / f"traj_x0_{_label(x0)}.csv"))
        rows.append([x0, *_summary_row(ctrl, tr, [x0], energy_until(tr, p["T_c"]))])
    summary = write_table(out / "summary.csv", ["x0", *SUMMARY_TAIL], rows)
    return [*paths, summary, export_svg(paths, "state", out / "state.svg")]


def run_energy_sweep(p: dict, out: Path) -> list[Path]:
    aux = poly_fixed_time(PolyParams(**{k: p[k] for k in FIXED_TIME_POLY}))
    res = energy_sweep(aux, p["T_c"], p["alphas"], [p["x0"]], cfg=_sim(p, p["T_c"]))
    paths = [write_csv(tr, out / f"traj_alpha_{_label(a)}.csv")
             for a, tr in zip(res.alphas, res.trajectories)]
    rows = []
    for i, a in enumerate(res.alphas):
        s = res.settling[i]
        obs = None if math.isnan(s) else float(s)
        rows.append([a, res.energy[i], res.sup_u[i], res.predicted[i], obs,
                     _within(obs, res.predicted[i], p["h"]), res.kappa_max[i], res.kappa_peak[i]])
    summary = write_table(out / "summary.csv",
                          ["alpha", "E_T", "sup_u", "predicted_bound", "observed_settling",
                           "within_bound", "kappa_max", "kappa_peak"], rows)
    write_table(out / "argmin.csv", ["alpha_argmin", "E_argmin"],
                [[res.argmin, float(res.energy.min())]])
    return [*paths, summary, out / "argmin.csv",
            export_svg(paths, "energy", out / "energy.svg"),
            export_svg(paths, "state", out / "state.svg")]


def _sosm_aux(p: dict) -> AuxController:
    return second_order_sliding(**{k: p[k] for k in SOSM_DEFAULTS})


def second_order_pair(p: dict) -> tuple[SynthesizedController, SynthesizedController]:
    """(autonomous, redesigned) controllers for the second-order comparison.

    The autonomous one is the auxiliary law applied directly: the static
    branch with T_c = T_f and rho = n gives exactly u = v(x).
    """
    aux = _sosm_aux(p)
    delta = abs(p["amplitude"])
    auto = synthesize(aux, aux.T_f, 0.0, float(aux.n), beta=1.0, delta=delta)
    redesigned = synthesize(aux, p["T_c"], p["alpha"], p["rho"], beta=p["beta"], delta=delta)
    return auto, redesigned


def run_second_order_compare(p: dict, out: Path) -> list[Path]:
    auto, redesigned = second_order_pair(p)
    dist = sinusoid(p["amplitude"], p["frequency"])
    x0 = list(p["x0"])
    paths, rows = [], []
    for name, ctrl in (("autonomous", auto), ("redesigned", redesigned)):
        cfg = _sim(p, max(p["T_c"], ctrl.T_c))
        tr = simulate(ctrl, x0, dist, cfg)
        paths.append(write_csv(tr, out / f"traj_{name}.csv"))
        rows.append([name, *_summary_row(ctrl, tr, x0, energy_until(tr, p["T_c"]))])
    summary = write_table(out / "summary.csv", ["controller", *SUMMARY_TAIL], rows)
    return [*paths, summary, export_svg(paths, "state", out / "state.svg"),
            export_svg(paths, "control", out / "control.svg"),
            export_svg(paths, "energy", out / "energy.svg")]


def _run_probe(p: dict, out: Path, ctrl: SynthesizedController, dist: Disturbance) -> list[Path]:
    x0 = list(p["x0"])
    tds = [f * ctrl.T_c for f in p["td_fractions"]]
    base_cfg = SimConfig(h=p["h"], horizon=p["horizon_factor"] * ctrl.T_c,
                         record_stride=p["record_stride"])
    base = simulate(ctrl, x0, dist, base_cfg)
    paths = [write_csv(base, out / "traj_unperturbed.csv")]
    res = uniform_stability_probe(ctrl, tds, x0, p["height"], p["width"], dist=dist, h=p["h"],
                                  record_stride=p["record_stride"],
                                  horizon_factor=p["horizon_factor"])
    pred = predicted_settling_bound(ctrl, x0)
    rows = []
    for frac, td, peak, tr in zip(p["td_fractions"], res.t_d, res.peaks, res.trajectories):
        paths.append(write_csv(tr, out / f"traj_td_{_label(frac)}.csv"))
        rows.append([frac, td, peak, pred, tr.settle_time, tr.max_control])
    summary = write_table(out / "summary.csv",
                          ["td_fraction", "t_d", "peak_abs_xn", "predicted_bound",
                           "observed_settling", "sup_u"], rows)
    write_table(out / "peaks.csv", ["last_over_first", "max_over_min"],
                [[res.peaks[-1] / res.peaks[0], res.spread]])
    return [*paths, summary, out / "peaks.csv", export_svg(paths, "state", out / "state.svg")]


def run_prescribed_pulse(p: dict, out: Path) -> list[Path]:
    ctrl = synthesize(linear_controller(p["gains"]), p["T_c"], p["alpha"], 0.0, beta=1.0)
    return _run_probe(p, out, ctrl, zero_disturbance())


def run_bounded_gain_pulse(p: dict, out: Path) -> list[Path]:
    _, ctrl = second_order_pair(p)
    return _run_probe(p, out, ctrl, sinusoid(p["amplitude"], p["frequency"]))


_GRID = {"h": 1e-5, "record_stride": 100}
_PROBE = {"td_fractions": PULSE_FRACTIONS, "height": 0.1, "width": 1e-3, "horizon_factor": 1.05}
_SECOND = {**SOSM_DEFAULTS, "T_c": 10.0, "alpha": 0.5, "rho": 2.0, "beta": 1.0,
           "x0": (50.0, 50.0), "amplitude": 1.0, "frequency": 1.0}

SCENARIOS: dict[str, Scenario] = {s.name: s for s in (
    Scenario("fig2-linear-tstop", "linear law stopped early at t_stop",
             {"T_c": 1.0, "alpha": 1.0, "t_stop": 0.9,
              "x0": tuple(float(i) for i in range(1, 11)), **_GRID}, run_linear_tstop),
    Scenario("fig3-kamal-tstop", "bounded exponential law stopped early at t_stop",
             {"T_c": 1.0, "alpha": 1.0, "t_stop": 0.9, "c": 10.0,
              "x0": tuple(float(i) for i in range(1, 11)), **_GRID}, run_bounded_tstop),
    Scenario("fig5-energy-sweep", "energy versus alpha for the first-order fixed-time law",
             {**FIXED_TIME_POLY, "T_c": 1.0, "x0": 100.0, "alphas": SWEEP_ALPHAS, **_GRID},
             run_energy_sweep),
    Scenario("fig6-second-order-compare", "autonomous vs redesigned second-order controller",
             {**_SECOND, "settle_eps": 1e-2, **_GRID}, run_second_order_compare),
    Scenario("fig7-prescribed-pulse", "measurement pulse under an unbounded-gain controller",
             {"T_c": 10.0, "alpha": 1.0, "gains": (18.0, 9.0), "x0": (10.0, 10.0),
              **_PROBE, **_GRID}, run_prescribed_pulse),
    Scenario("fig8-bounded-gain-pulse", "measurement pulse under a bounded-gain controller",
             {**_SECOND, **_PROBE, **_GRID}, run_bounded_gain_pulse),
    Scenario("motivating-first-order", "first-order linear law reaching the origin at T_c",
             {"T_c": 1.0, "x0": (-5.0, -1.0, 1.0, 5.0, 10.0), "horizon_factor": 1.0,
              "settle_eps": 1e-4, **_GRID},
             run_motivating),
)}


def run_scenario(name: str, overrides: Sequence[str] = (), out_dir="out") -> list[Path]:
    """Run a named scenario and return the paths of every file it wrote."""
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; expected one of {sorted(SCENARIOS)}")
    sc = SCENARIOS[name]
    params = apply_overrides(sc.defaults, overrides)
    out = Path(out_dir) / name
    out.mkdir(parents=True, exist_ok=True)
    return sc.runner(params, out)
