"""Command-line front end.

Subcommands:
  simulate       run the grid solver, write series.csv (+ figures, manifest)
  closed-form    sample the balanced-parameter exact solution
  tstar          print the blowup time of the exact solution
  verify         run a named verification scenario, write report.json
  sweep          run a batch of (lam, kappa) simulations
  compare-euler  magnetic run against its magnetic-free companion

Every run writes a manifest.json echoing the fully-resolved configuration
(config_version 1). Passing that manifest back via --config reproduces the
delimited outputs byte for byte. Files are written atomically (temp file,
then rename). The output directory defaults to $GMHD_OUT, then '.'.

Exit codes: 0 success (for verify: all assertions pass), 1 runtime fault or
failed verification, 2 configuration errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .closedform import jac_along, make_context, tstar, ux_along
from .dynamics import (
    Params,
    SERIES_COLUMNS,
    StepControl,
    make_initial_state,
    run,
)
from .errors import ConfigError, Fault
from .grid import BC, GridSpec
from .lagrangian import TrajectoryTracker, default_labels
from .presets import parse_preset
from .reduced_ode import comparison_scenario
from .verify import SCENARIO_IDS, _jsonable, run_scenario, sweep
from . import plots

CONFIG_VERSION = 1


# ---------------------------------------------------------------------------
# small IO helpers

def _atomic_write(path: Path, text: str):
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text)
    os.replace(tmp, path)


def _fmt(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def _csv_text(columns, rows) -> str:
    lines = ["# columns: " + ",".join(columns)]
    for row in rows:
        lines.append(",".join(x if isinstance(x, str) else _fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def _write_manifest(out: Path, command: str, config: dict, results: dict, outputs: dict):
    manifest = {
        "config_version": CONFIG_VERSION,
        "command": command,
        "config": _jsonable(config),
        "results": _jsonable(results),
        "outputs": outputs,
        "versions": {
            "gmhdlab": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
    }
    _atomic_write(out / "manifest.json", json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def _load_config(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    version = data.get("config_version", CONFIG_VERSION)
    if int(version) != CONFIG_VERSION:
        raise ConfigError(f"unsupported config_version {version!r}")
    if isinstance(data.get("config"), dict):
        data = data["config"]
    data = dict(data)
    data.pop("config_version", None)
    return data


def _resolve(defaults: dict, args, config_path) -> dict:
    """defaults, then config file, then explicit command-line flags."""
    cfg = dict(defaults)
    if config_path:
        loaded = _load_config(config_path)
        unknown = set(loaded) - set(defaults)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg.update(loaded)
    for key in defaults:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _out_dir(args) -> Path:
    root = args.out or os.environ.get("GMHD_OUT") or "."
    path = Path(root)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _bc(name: str) -> BC:
    try:
        return BC(str(name))
    except ValueError:
        raise ConfigError(f"unknown boundary condition {name!r}") from None


# ---------------------------------------------------------------------------
# simulate

_SIM_DEFAULTS = dict(
    lam=1.0, kappa=-1.0, bc="dirichlet", n=256, horizon=2.0,
    u0="quadratic", b0="zero", dt_max=1e-3, dt_floor=1e-12, cfl=0.5,
    m_stop=1e6, sample_dt=None, dealias=None, track=False, labels=9,
)


def _cmd_simulate(args) -> int:
    cfg = _resolve(_SIM_DEFAULTS, args, args.config)
    out = _out_dir(args)
    bc = _bc(cfg["bc"])
    grid = GridSpec(int(cfg["n"]), bc)
    state = make_initial_state(parse_preset(cfg["u0"]), parse_preset(cfg["b0"]), grid)
    control = StepControl(
        dt_max=float(cfg["dt_max"]), dt_floor=float(cfg["dt_floor"]), cfl=float(cfg["cfl"]),
        m_stop=float(cfg["m_stop"]),
        sample_dt=None if cfg["sample_dt"] is None else float(cfg["sample_dt"]),
        dealias=cfg["dealias"],
    )
    tracker = None
    if cfg["track"]:
        tracker = TrajectoryTracker(default_labels(int(cfg["labels"])), m_max=1)
    rec = run(state, Params(float(cfg["lam"]), float(cfg["kappa"]), bc),
              float(cfg["horizon"]), control, tracker)

    outputs = {"series": "series.csv"}
    rows = list(zip(*(rec.series[name] for name in SERIES_COLUMNS)))
    _atomic_write(out / "series.csv", _csv_text(SERIES_COLUMNS, rows))
    if tracker is not None:
        ts = tracker.result()
        cols = ["t"]
        for a in ts.alphas:
            cols += [f"gamma[{a:g}]", f"logjac[{a:g}]", f"slope[{a:g}]", f"b[{a:g}]"]
        trows = []
        for k, t in enumerate(ts.times):
            row = [t]
            for j in range(ts.alphas.size):
                row += [ts.gamma[k, j], ts.logjac[k, j], ts.slope_trace[k, j],
                        ts.b_traces[k, j, 0]]
            trows.append(tuple(row))
        _atomic_write(out / "trajectories.csv", _csv_text(cols, trows))
        outputs["trajectories"] = "trajectories.csv"
        if not args.no_plot:
            plots.render_trajectories(ts, out / "trajectories.png")
            outputs["trajectories_figure"] = "trajectories.png"
    if not args.no_plot:
        plots.render_series(rec, out / "series.png")
        outputs["series_figure"] = "series.png"

    results = {
        "verdict": rec.verdict.value,
        "t_blowup_estimate": rec.t_blowup_estimate,
        "steps": rec.steps,
        "final_time": rec.final_state.t,
        "initial_energy": rec.initial_energy,
        "max_shift": rec.max_shift,
    }
    _write_manifest(out, "simulate", cfg, results, outputs)
    print(f"verdict: {rec.verdict.value}")
    if rec.t_blowup_estimate is not None:
        print(f"t_blowup_estimate: {rec.t_blowup_estimate:.8g}")
    print(f"steps: {rec.steps}")
    print(f"wrote {', '.join(sorted(outputs.values()))} in {out}")
    return 0


# ---------------------------------------------------------------------------
# closed-form and tstar

_CLOSED_DEFAULTS = dict(lam=1.0, u0="quadratic", fractions=(0.25, 0.5, 0.75, 0.9), points=201)


def _cmd_closed_form(args) -> int:
    cfg = _resolve(_CLOSED_DEFAULTS, args, args.config)
    if isinstance(cfg["fractions"], str):
        cfg["fractions"] = tuple(float(x) for x in cfg["fractions"].split(","))
    out = _out_dir(args)
    ctx = make_context(float(cfg["lam"]), parse_preset(cfg["u0"]))
    alphas = np.linspace(0.0, 1.0, int(cfg["points"]))
    taus = [fr * ctx.tau_star if math.isfinite(ctx.tau_star) else fr
            for fr in cfg["fractions"]]
    cols = ["alpha"]
    series = [alphas]
    for tau in taus:
        cols += [f"jac[tau={tau:g}]", f"ux[tau={tau:g}]"]
        series.append(np.array([jac_along(float(a), tau, ctx) for a in alphas]))
        series.append(np.array([ux_along(float(a), tau, ctx) for a in alphas]))
    rows = list(zip(*series))
    _atomic_write(out / "closedform.csv", _csv_text(cols, rows))
    outputs = {"closedform": "closedform.csv"}
    if not args.no_plot:
        plots.render_closedform(ctx, out / "closedform.png", cfg["fractions"])
        outputs["figure"] = "closedform.png"
    res = tstar(ctx)
    results = {"tau_star": ctx.tau_star, "tstar_kind": res.kind, "tstar": res.value}
    _write_manifest(out, "closed-form", cfg, results, outputs)
    print(f"tau*: {ctx.tau_star:.8g}; blowup time: {res.kind}"
          + (f" {res.value:.8g}" if res.kind == "finite" else ""))
    print(f"wrote {', '.join(sorted(outputs.values()))} in {out}")
    return 0


def _cmd_tstar(args) -> int:
    ctx = make_context(float(args.lam), parse_preset(args.u0))
    res = tstar(ctx)
    if res.kind == "finite":
        print(f"{res.value:.6f}")
    elif res.kind == "infinite":
        print("inf")
    else:
        print("indeterminate")
    return 0


# ---------------------------------------------------------------------------
# verify

def _parse_set(items) -> dict:
    overrides = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            val = json.loads(raw)
        except ValueError:
            val = raw
        overrides[key.strip()] = val
    return overrides


def _cmd_verify(args) -> int:
    overrides = _parse_set(args.set)
    out = _out_dir(args)
    if args.scenario == "all":
        if overrides:
            raise ConfigError("--set cannot be combined with --scenario all")
        ids = SCENARIO_IDS
    else:
        ids = (args.scenario,)
    all_pass = True
    for sid in ids:
        report = run_scenario(sid, overrides)
        name = "report.json" if len(ids) == 1 else f"report-{report.scenario}.json"
        _atomic_write(out / name, report.to_json() + "\n")
        npass = sum(1 for c in report.assertions if c.passed)
        print(f"{report.scenario}: status {report.status}, "
              f"{npass}/{len(report.assertions)} assertions pass -> {name}")
        for check in report.assertions:
            word = "PASS" if check.passed else "FAIL"
            print(f"  {word} {check.name}: measured {check.measured:.6g} "
                  f"(tolerance {check.tolerance:.6g})")
        for note in report.notes:
            print(f"  note: {note}")
        all_pass = all_pass and report.passed
    return 0 if all_pass else 1


# ---------------------------------------------------------------------------
# sweep

_SWEEP_DEFAULTS = dict(
    pairs=None, lams=None, kappas=None, u0="quadratic", b0="zero", bc="dirichlet",
    n=256, horizon=10.0, dt_max=1e-3, m_stop=1e4, workers=4,
)


def _parse_pairs(cfg) -> list:
    if cfg["pairs"]:
        pairs = []
        spec = cfg["pairs"]
        if isinstance(spec, str):
            for chunk in spec.split(";"):
                parts = chunk.split(",")
                if len(parts) != 2:
                    raise ConfigError(f"bad pair {chunk!r}; expected 'lam,kappa'")
                pairs.append((float(parts[0]), float(parts[1])))
        else:
            pairs = [(float(a), float(b)) for a, b in spec]
        return pairs
    if cfg["lams"] is None or cfg["kappas"] is None:
        raise ConfigError("sweep needs --pairs or both --lams and --kappas")
    lams = cfg["lams"]
    kappas = cfg["kappas"]
    if isinstance(lams, str):
        lams = [float(x) for x in lams.split(",")]
    if isinstance(kappas, str):
        kappas = [float(x) for x in kappas.split(",")]
    return [(float(a), float(b)) for a in lams for b in kappas]


def _cmd_sweep(args) -> int:
    cfg = _resolve(_SWEEP_DEFAULTS, args, args.config)
    out = _out_dir(args)
    pairs = _parse_pairs(cfg)
    rows = sweep(
        pairs, u0=cfg["u0"], b0=cfg["b0"], bc=cfg["bc"], n=int(cfg["n"]),
        horizon=float(cfg["horizon"]), dt_max=float(cfg["dt_max"]),
        m_stop=float(cfg["m_stop"]), workers=int(cfg["workers"]),
    )
    cols = ["lam", "kappa", "verdict", "t_blowup_estimate", "sup_omega_final", "steps", "fault"]
    csv_rows = []
    for r in rows:
        csv_rows.append((
            r.lam, r.kappa, r.verdict,
            float("nan") if r.t_blowup_estimate is None else r.t_blowup_estimate,
            float("nan") if r.sup_omega_final is None else r.sup_omega_final,
            -1 if r.steps is None else r.steps,
            r.fault or "",
        ))
    _atomic_write(out / "sweep.csv", _csv_text(cols, csv_rows))
    outputs = {"sweep": "sweep.csv"}
    if not args.no_plot:
        plots.render_sweep(rows, out / "sweep.png")
        outputs["figure"] = "sweep.png"
    results = {"rows": [r.to_dict() for r in rows]}
    _write_manifest(out, "sweep", cfg, results, outputs)
    for r in rows:
        extra = f" t_est={r.t_blowup_estimate:.6g}" if r.t_blowup_estimate is not None else ""
        extra += f" fault={r.fault}" if r.fault else ""
        print(f"lam={r.lam:g} kappa={r.kappa:g}: {r.verdict}{extra}")
    print(f"wrote {', '.join(sorted(outputs.values()))} in {out}")
    return 0 if all(r.fault is None for r in rows) else 1


# ---------------------------------------------------------------------------
# compare-euler

_COMPARE_DEFAULTS = dict(
    u0="quadratic", b0="scale:0.1:bump2:0", n=512, horizon=2.0,
    dt_max=1e-3, m_stop=1e4, sample_dt=None,
)


def _cmd_compare(args) -> int:
    cfg = _resolve(_COMPARE_DEFAULTS, args, args.config)
    out = _out_dir(args)
    res = comparison_scenario(
        parse_preset(cfg["u0"]), parse_preset(cfg["b0"]), n=int(cfg["n"]),
        horizon=float(cfg["horizon"]), dt_max=float(cfg["dt_max"]),
        m_stop=float(cfg["m_stop"]),
        sample_dt=None if cfg["sample_dt"] is None else float(cfg["sample_dt"]),
    )
    cols = ["t", "slope_with_b", "slope_companion", "ordering_gap", "hypothesis_slack"]
    rows = list(zip(res.times, res.z_mhd, res.z_plain, res.sigma, res.hypothesis_slack))
    _atomic_write(out / "comparison.csv", _csv_text(cols, rows))
    outputs = {"comparison": "comparison.csv"}
    if not args.no_plot:
        plots.render_comparison(res, out / "comparison.png")
        outputs["figure"] = "comparison.png"
    results = {
        "verdict": res.verdict,
        "sigma_min": res.sigma_min,
        "hypothesis_ok": res.hypothesis_ok,
        "first_violation": res.first_violation,
        "plain_t_estimate": res.plain_t_estimate,
        "steps": res.steps,
    }
    _write_manifest(out, "compare-euler", cfg, results, outputs)
    print(f"verdict: {res.verdict}; ordering gap min {res.sigma_min:.3e}; "
          f"hypothesis held: {res.hypothesis_ok}")
    if res.plain_t_estimate is not None:
        print(f"companion t_blowup_estimate: {res.plain_t_estimate:.8g}")
    print(f"wrote {', '.join(sorted(outputs.values()))} in {out}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def _add_common(sub):
    sub.add_argument("--config", help="JSON config or a previous manifest.json")
    sub.add_argument("--out", help="output directory (default: $GMHD_OUT or '.')")
    sub.add_argument("--no-plot", action="store_true", help="skip figure rendering")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmhdlab",
        description="Numerical laboratory for a nonlocal 1-D MHD-type model.",
    )
    parser.add_argument("--version", action="version", version=f"gmhdlab {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="run the grid solver")
    sim.add_argument("--lambda", "--lam", dest="lam", type=float)
    sim.add_argument("--kappa", type=float)
    sim.add_argument("--bc", choices=("dirichlet", "periodic"))
    sim.add_argument("--n", type=int)
    sim.add_argument("--horizon", type=float)
    sim.add_argument("--u0")
    sim.add_argument("--b0")
    sim.add_argument("--dt-max", dest="dt_max", type=float)
    sim.add_argument("--dt-floor", dest="dt_floor", type=float)
    sim.add_argument("--cfl", type=float)
    sim.add_argument("--m-stop", dest="m_stop", type=float)
    sim.add_argument("--sample-dt", dest="sample_dt", type=float)
    sim.add_argument("--dealias", action=argparse.BooleanOptionalAction, default=None)
    sim.add_argument("--track", action=argparse.BooleanOptionalAction, default=None)
    sim.add_argument("--labels", type=int)
    _add_common(sim)
    sim.set_defaults(func=_cmd_simulate)

    cf = subs.add_parser("closed-form", help="sample the exact balanced solution")
    cf.add_argument("--lambda", "--lam", dest="lam", type=float)
    cf.add_argument("--u0")
    cf.add_argument("--fractions")
    cf.add_argument("--points", type=int)
    _add_common(cf)
    cf.set_defaults(func=_cmd_closed_form)

    ts = subs.add_parser("tstar", help="print the exact-solution blowup time")
    ts.add_argument("--lambda", "--lam", dest="lam", type=float, required=True)
    ts.add_argument("--u0", default="quadratic")
    ts.set_defaults(func=_cmd_tstar)

    ver = subs.add_parser("verify", help="run a verification scenario")
    ver.add_argument("--scenario", required=True,
                     choices=SCENARIO_IDS + ("all",))
    ver.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override a scenario option (JSON or raw string)")
    _add_common(ver)
    ver.set_defaults(func=_cmd_verify)

    sw = subs.add_parser("sweep", help="batch of (lam, kappa) simulations")
    sw.add_argument("--pairs", help="semicolon-separated 'lam,kappa' pairs")
    sw.add_argument("--lams", help="comma-separated lam values (cross product)")
    sw.add_argument("--kappas", help="comma-separated kappa values (cross product)")
    sw.add_argument("--u0")
    sw.add_argument("--b0")
    sw.add_argument("--bc", choices=("dirichlet", "periodic"))
    sw.add_argument("--n", type=int)
    sw.add_argument("--horizon", type=float)
    sw.add_argument("--dt-max", dest="dt_max", type=float)
    sw.add_argument("--m-stop", dest="m_stop", type=float)
    sw.add_argument("--workers", type=int)
    _add_common(sw)
    sw.set_defaults(func=_cmd_sweep)

    cmp_ = subs.add_parser("compare-euler", help="magnetic run vs magnetic-free companion")
    cmp_.add_argument("--u0")
    cmp_.add_argument("--b0")
    cmp_.add_argument("--n", type=int)
    cmp_.add_argument("--horizon", type=float)
    cmp_.add_argument("--dt-max", dest="dt_max", type=float)
    cmp_.add_argument("--m-stop", dest="m_stop", type=float)
    cmp_.add_argument("--sample-dt", dest="sample_dt", type=float)
    _add_common(cmp_)
    cmp_.set_defaults(func=_cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Fault as exc:
        print(f"fault: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
