"""Command-line front end.

Exit codes: 0 ok, 2 configuration or input data error, 3 integration
failure, 4 numerical-health violation (including Fock truncation), 5 fit did
not converge.
"""

import argparse
import datetime
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__, analysis, device, dynamics
from . import io as qio
from . import scenarios
from . import schedule as sched
from .constants import HBAR_MEV_NS
from .fitting import RankDeficiencyError

EXIT_OK, EXIT_CONFIG, EXIT_INTEGRATION, EXIT_HEALTH, EXIT_FIT = 0, 2, 3, 4, 5

TRAJECTORY_COLUMNS = ["t_ns", "pop_ground", "pop_exciton", "pop_pump", "photon_number",
                      "emission_rate", "detuning_rad_per_ns", "trace_error"]


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _clean(obj):
    """JSON-safe copy: non-finite floats become null, numpy scalars become Python."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dump_json(path, obj):
    text = json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _load(args):
    if bool(args.config) == bool(args.preset):
        raise CliError(EXIT_CONFIG, "give exactly one of --config or --preset")
    try:
        cfg = scenarios.load_config(args.config) if args.config else scenarios.preset(args.preset)
        if getattr(args, "sample_dt", None) is not None:
            cfg = scenarios.set_dotted(cfg, "run.sample_dt_ps", args.sample_dt)
    except OSError as exc:
        raise CliError(EXIT_CONFIG, f"cannot read config: {exc}") from None
    except scenarios.ConfigError as exc:
        raise CliError(EXIT_CONFIG, f"config error: {exc}") from None
    return cfg


def simulate_to(cfg, out_dir):
    """Run one scenario and write its artifacts; returns the metrics dict."""
    os.makedirs(out_dir, exist_ok=True)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", dynamics.TruncationWarning)
            result = scenarios.run_scenario(cfg)
    except dynamics.TruncationWarning as exc:
        raise CliError(EXIT_HEALTH, f"health violation: {exc}") from None
    except dynamics.IntegrationError as exc:
        raise CliError(EXIT_INTEGRATION, f"integration failed: {exc}") from None
    except dynamics.NumericalHealthError as exc:
        raise CliError(EXIT_HEALTH, f"health violation: {exc}") from None
    except (scenarios.ConfigError, qio.DataFormatError, OSError) as exc:
        raise CliError(EXIT_CONFIG, f"config error: {exc}") from None

    traj, wave = result.trajectory, result.waveform
    artifacts = cfg["outputs"]["artifacts"]
    written = []
    if "trajectory" in artifacts:
        path = os.path.join(out_dir, "trajectory.csv")
        qio.write_csv(path, TRAJECTORY_COLUMNS, [
            traj.times, traj.pop_ground, traj.pop_exciton, traj.pop_pump, traj.photon_number,
            traj.emission_rate, traj.detuning, traj.trace_error])
        written.append(path)
    if "waveform" in artifacts:
        path = os.path.join(out_dir, "waveform.csv")
        norm = analysis.emission_waveform(traj, normalize=True).intensity
        qio.write_csv(path, ["t_ns", "intensity_per_ns", "normalized_intensity"], [wave.times, wave.intensity, norm])
        written.append(path)
        if result.reference is not None:
            path = os.path.join(out_dir, "modulation.csv")
            ref = analysis.emission_waveform(result.reference)
            peak = float(np.max(wave.intensity))
            ratio = analysis.modulation_ratio(wave, ref, floor=1e-6 * peak)
            qio.write_csv(path, ["t_ns", "intensity_per_ns", "reference_intensity_per_ns", "ratio"],
                          [wave.times, wave.intensity, ref.intensity, ratio.intensity])
            written.append(path)
    if "metrics" in artifacts:
        path = os.path.join(out_dir, "metrics.json")
        _dump_json(path, result.metrics)
        written.append(path)
    manifest = {
        "tool": "qdcavity",
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config": result.resolved.echo,
        "source_config": cfg,
        "artifacts": {os.path.basename(p): qio.sha256_file(p) for p in written},
        "diagnostics": traj.diagnostics(),
    }
    _dump_json(os.path.join(out_dir, "manifest.json"), manifest)
    return result.metrics


def cmd_simulate(args):
    cfg = _load(args)
    metrics = simulate_to(cfg, args.out)
    print(f"{cfg['name']}: wrote {args.out}")
    for key in ("peak_intensity_per_ns", "lifetime_ns", "rate_transition_time_ns", "symmetry_metric",
                "gaussian_residual_rms", "effective_delay_ns", "rabi_frequency_ghz"):
        if metrics.get(key) is not None:
            print(f"  {key} = {metrics[key]:.6g}")
    return EXIT_OK


def _parse_values(raw):
    values = []
    for chunk in raw or []:
        for item in chunk.split(","):
            item = item.strip()
            if not item:
                continue
            try:
                values.append(float(item))
            except ValueError:
                raise CliError(EXIT_CONFIG, f"sweep value {item!r} is not a number") from None
    if not values:
        raise CliError(EXIT_CONFIG, "sweep needs at least one value")
    return values


def _sweep_one(job):
    cfg, out_dir = job
    try:
        return simulate_to(cfg, out_dir), None
    except CliError as exc:
        return None, (exc.code, str(exc))


def cmd_sweep(args):
    cfg = _load(args)
    values = _parse_values(args.values)
    jobs = []
    for i, v in enumerate(values):
        try:
            cfg_v = scenarios.set_dotted(cfg, args.param, v)
        except scenarios.ConfigError as exc:
            raise CliError(EXIT_CONFIG, f"config error: {exc}") from None
        cfg_v["name"] = f"{cfg['name']}[{args.param}={v:g}]"
        jobs.append((cfg_v, os.path.join(args.out, f"{i:03d}_{args.param}={v:g}")))
    os.makedirs(args.out, exist_ok=True)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(j) for j in jobs]
    for _, err in results:
        if err is not None:
            raise CliError(*err)
    keys = sorted({k for m, _ in results for k, v in m.items()
                   if isinstance(v, (int, float)) and not isinstance(v, bool)})
    cols = [values] + [[_as_float(m.get(k)) for m, _ in results] for k in keys]
    qio.write_csv(os.path.join(args.out, "summary.csv"), [args.param] + keys, cols)
    print(f"sweep over {args.param}: {len(values)} runs in {args.out}")
    return EXIT_OK


def _as_float(v):
    return float("nan") if v is None else float(v)


def _window_arg(text):
    if text is None:
        return None
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError:
        raise CliError(EXIT_CONFIG, f"window must be 'start,end', got {text!r}") from None
    return a, b


def cmd_fit(args):
    try:
        if args.kind == "lorentzian":
            res = device.lorentzian_q(qio.read_spectrum(args.data))
        elif args.kind == "s11":
            f, s = qio.read_s11(args.data)
            res = device.extract_rc(f, s, z0=args.z0)
        else:
            w = qio.read_waveform(args.data)
            window = _window_arg(args.window)
            if args.kind == "exp":
                res = analysis.fit_exponential(w, window)
            elif args.kind == "biexp":
                res = analysis.fit_biexponential(w, window)
            else:
                res = analysis.fit_gaussian(w)
    except (OSError, qio.DataFormatError, RankDeficiencyError, analysis.DomainError, ValueError) as exc:
        raise CliError(EXIT_CONFIG, f"data error: {exc}") from None
    report = res.report()
    sys.stdout.write(report)
    out = args.out or f"{args.data}.fit.txt"
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report)
    return EXIT_OK if res.converged else EXIT_FIT


def cmd_schedule(args):
    cfg = _load(args)
    try:
        rs = scenarios.resolve(cfg)
    except (scenarios.ConfigError, qio.DataFormatError, OSError) as exc:
        raise CliError(EXIT_CONFIG, f"config error: {exc}") from None
    dt = (args.sample_dt if args.sample_dt is not None else 1.0) * 1e-3
    if rs.schedule.kind == "rc_square_wave":
        t0 = rs.t_span[0]
        t = dynamics.sample_grid(t0, t0 + rs.schedule.payload.period, dt)
    else:
        t = dynamics.sample_grid(*rs.t_span, dt)
    det = np.asarray(rs.schedule(t), dtype=float) * np.ones_like(t)
    energy = sched.energy_mev(rs.schedule, t)
    qio.write_csv(args.out, ["t_ns", "energy_meV", "detuning_rad_per_ns"], [t, energy, det])
    print(f"{cfg['name']}: {t.size} samples written to {args.out}")
    return EXIT_OK


def cmd_presets(args):
    if args.show:
        try:
            sys.stdout.write(scenarios.to_toml(scenarios.preset(args.show)))
        except scenarios.ConfigError as exc:
            raise CliError(EXIT_CONFIG, str(exc)) from None
        return EXIT_OK
    for name, p in scenarios.PRESETS.items():
        print(f"{name:24s} {p['description']}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="qdcavity", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_args(p):
        p.add_argument("--config", help="scenario TOML file")
        p.add_argument("--preset", help="name of a shipped preset")
        p.add_argument("--sample-dt", type=float, help="sampling step in ps (overrides the config)")
        p.add_argument("--seedless", action="store_true",
                       help="accepted for scripting; every run is deterministic and uses no RNG")

    p = sub.add_parser("simulate", help="run one scenario")
    scenario_args(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run a scenario for several values of one numeric parameter")
    scenario_args(p)
    p.add_argument("--param", required=True, help="dotted parameter name, e.g. schedule.delay_ns")
    p.add_argument("--values", nargs="*", help="values, comma- or space-separated")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="fit a model to a data file")
    p.add_argument("kind", choices=["lorentzian", "exp", "biexp", "gaussian", "s11"])
    p.add_argument("data", help="input data file")
    p.add_argument("--out", help="report file (default: <data>.fit.txt)")
    p.add_argument("--window", help="fit window 'start,end' in ns (exp, biexp)")
    p.add_argument("--z0", type=float, default=50.0, help="reference impedance for s11 (Ohm)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("schedule", help="write the detuning schedule of a scenario as CSV")
    scenario_args(p)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("presets", help="list shipped presets")
    p.add_argument("--show", metavar="NAME", help="print one preset as TOML")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"qdcavity {args.command}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
