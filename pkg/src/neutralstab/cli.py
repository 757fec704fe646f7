"""Command-line entry point: bind TOML problem configs to the analyses.

Subcommands: ``check`` (criteria table), ``simulate`` (trajectory + decay
report), ``sweep`` (threshold summary + verdict grid), ``fundamental``
(fundamental-function trajectory).  Exit codes: 0 = analysis certified
stability (or ran cleanly where certification does not apply), 10 =
analysis ran but nothing was certified / the run was flagged, 2 = config
or extraction error.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from dataclasses import asdict
from pathlib import Path

from .criteria import CriterionId, check_all
from .funcspec import DelayFunc, ParamBounds, extract_bounds, func_range, parse
from .logistic import LogisticProblem, integrate_logistic
from .simulator import NDDEProblem, estimate_decay, fundamental, integrate
from .sweep import SweepSpec, find_threshold, sweep_grid

EXIT_OK = 0
EXIT_ERROR = 2
EXIT_UNCERTIFIED = 10

_DEFAULT_CRITERIA_NEUTRAL = ("THM1_A", "THM1_B", "TANGZOU_1", "TANGZOU_2")
_DEFAULT_CRITERIA_LOGISTIC = ("LOG_THM_A", "LOG_THM_B", "LOG_COR", "YU_PROP1")


class ConfigError(ValueError):
    pass


def _load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc


def _delay_from_cfg(eq: dict, name: str, params: dict, t0: float,
                    swept: str | None = None) -> DelayFunc:
    text = eq.get(f"lag_{name}", "0")
    expr = parse(text, params)
    max_key, min_key = f"lag_{name}_max", f"lag_{name}_min"
    uses_param = swept is not None and re.search(rf"\b{swept}\b", text)
    if max_key in eq and not uses_param:
        lag_max = float(eq[max_key])
        lag_min = float(eq.get(min_key, 0.0))
    else:
        lo, hi, _ = func_range(expr, t0, t0 + 50.0, n_samples=100_000)
        lag_max, lag_min = hi, max(lo, 0.0)
    return DelayFunc(expr, lag_max, lag_min)


def _build_problem(cfg: dict, params: dict, swept: str | None = None):
    eq = cfg.get("equation")
    if not isinstance(eq, dict):
        raise ConfigError("missing [equation] section")
    kind = eq.get("kind")
    t0 = float(eq.get("t0", 0.0))
    g = _delay_from_cfg(eq, "g", params, t0, swept)
    h = _delay_from_cfg(eq, "h", params, t0, swept)
    phi = parse(eq.get("phi", "1"), params)
    psi = parse(eq.get("psi", "0"), params)
    if kind == "neutral":
        return NDDEProblem(
            a=parse(eq.get("a", "0"), params),
            b=parse(eq["b"], params),
            g=g, h=h,
            f=parse(eq.get("f", "0"), params),
            phi=phi, psi=psi, t0=t0)
    if kind == "logistic":
        return LogisticProblem(
            r=parse(eq["r"], params),
            K=float(eq.get("K", 1.0)),
            rho=float(eq["rho"]),
            g=g, h=h, phi=phi, psi=psi, t0=t0)
    raise ConfigError("equation.kind must be 'neutral' or 'logistic'")


def _resolve_bounds(cfg: dict, problem) -> ParamBounds | None:
    """Extraction result with any explicit [bounds] overrides applied."""
    if not isinstance(problem, NDDEProblem):
        return None
    over = cfg.get("bounds", {})
    fields = ("a0", "A0", "b0", "B0", "tau", "sigma", "h_lag_inf")
    if all(k in over for k in fields):
        vals = {k: float(over[k]) for k in fields}
        return ParamBounds(**vals, exact=True, inflation=1.0)
    extracted = extract_bounds(problem)
    if not over:
        return extracted
    vals = {k: float(over.get(k, getattr(extracted, k))) for k in fields}
    return ParamBounds(**vals, exact=extracted.exact,
                       inflation=extracted.inflation)


def _out_dir(cfg: dict, args) -> Path:
    out = args.out_dir or cfg.get("output", {}).get("dir", ".")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _out_format(cfg: dict, args) -> str:
    fmt = args.format or cfg.get("output", {}).get("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError("output format must be 'json' or 'csv'")
    return fmt


def _write_records(records: list, path: Path, fmt: str) -> Path:
    path = path.with_suffix("." + fmt)
    if fmt == "json":
        path.write_text(json.dumps(records, sort_keys=True, indent=2) + "\n")
    else:
        with open(path, "w", newline="") as fh:
            if records:
                writer = csv.DictWriter(fh, fieldnames=list(records[0]))
                writer.writeheader()
                writer.writerows(records)
    return path


def _bounds_record(bounds: ParamBounds | None) -> dict | None:
    return None if bounds is None else asdict(bounds)


def _print_verdicts(verdicts) -> None:
    print(f"{'criterion':<18} {'lhs':>12} {'rhs':>12} {'margin':>12} "
          f"{'ok':>4}  notes")
    for v in verdicts:
        print(f"{v.criterion.value:<18} {v.lhs:>12.6g} {v.rhs:>12.6g} "
              f"{v.margin:>12.6g} {'yes' if v.satisfied else 'no':>4}  "
              f"{'; '.join(v.notes)}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_check(args) -> int:
    cfg = _load_config(args.config)
    params = dict(cfg.get("params", {}))
    problem = _build_problem(cfg, params)
    bounds = _resolve_bounds(cfg, problem)
    result = check_all(problem, bounds=bounds)
    _print_verdicts(result.verdicts)
    report = {
        "bounds": _bounds_record(result.bounds),
        "certified_stable": result.certified,
        "verdicts": result.to_records(),
    }
    out = _out_dir(cfg, args)
    fmt = _out_format(cfg, args)
    path = _write_records([report] if fmt == "json" else result.to_records(),
                          out / "check", fmt)
    print(f"certified stable: {result.certified}  (report: {path})")
    return EXIT_OK if result.certified else EXIT_UNCERTIFIED


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    params = dict(cfg.get("params", {}))
    problem = _build_problem(cfg, params)
    sim = cfg.get("simulate", {})
    T = float(args.horizon or sim.get("T", 100.0))
    dt = float(args.dt or sim.get("dt", 0.01))
    if isinstance(problem, LogisticProblem):
        tr = integrate_logistic(problem, T, dt)
    else:
        tr = integrate(problem, T, dt)
    out = _out_dir(cfg, args)
    traj_path = out / "trajectory.txt"
    tr.to_text(traj_path)
    report = {"t0": tr.t0, "T": tr.T, "dt": tr.dt, "flag": tr.flag,
              "diverged_at": tr.diverged_at}
    if tr.flag is None:
        dec = estimate_decay(tr)
        report["decay"] = asdict(dec)
        print(f"decay verdict: {dec.verdict} (gamma_est={dec.gamma_est:.6g})")
    else:
        print(f"trajectory flagged: {tr.flag} at t={tr.diverged_at}")
    path = _write_records([report], out / "decay", "json")
    print(f"trajectory: {traj_path}  report: {path}")
    return EXIT_OK if tr.flag is None else EXIT_UNCERTIFIED


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    params = dict(cfg.get("params", {}))
    sw = cfg.get("sweep")
    if not isinstance(sw, dict):
        raise ConfigError("missing [sweep] section")
    parameter = sw["parameter"]
    lo, hi = (float(v) for v in sw["range"])
    kind = cfg.get("equation", {}).get("kind")
    default = (_DEFAULT_CRITERIA_LOGISTIC if kind == "logistic"
               else _DEFAULT_CRITERIA_NEUTRAL)
    criteria = tuple(sw.get("criteria", default))
    spec = SweepSpec(parameter=parameter, lo=lo, hi=hi, criteria=criteria,
                     tol=float(sw.get("tol", 1e-6)),
                     scan_points=int(sw.get("scan_points", 64)))

    def template(value: float):
        local = dict(params)
        local[parameter] = value
        problem = _build_problem(cfg, local, swept=parameter)
        result = check_all(problem)
        return {v.criterion: v for v in result.verdicts}

    thresholds = find_threshold(spec, template)
    rows = sweep_grid(spec, template)
    out = _out_dir(cfg, args)
    summary = [t.to_record() for t in thresholds]
    spath = _write_records(summary, out / "thresholds", "json")
    gpath = _write_records(rows, out / "sweep_grid", "csv")
    for t in thresholds:
        print(f"{t.criterion.value:<12} {t.direction:<16} "
              f"lower={t.lower} upper={t.upper} "
              f"verified={t.bracket_verified}")
    print(f"summary: {spath}  grid: {gpath}")
    return EXIT_OK


def cmd_fundamental(args) -> int:
    cfg = _load_config(args.config)
    params = dict(cfg.get("params", {}))
    problem = _build_problem(cfg, params)
    if not isinstance(problem, NDDEProblem):
        raise ConfigError("fundamental requires a neutral equation config")
    sim = cfg.get("simulate", {})
    T = float(args.horizon or sim.get("T", 100.0))
    dt = float(args.dt or sim.get("dt", 0.01))
    tr = fundamental(problem, float(args.s), T, dt)
    out = _out_dir(cfg, args)
    path = out / f"fundamental_s{args.s}.txt"
    tr.to_text(path)
    print(f"fundamental function written to {path}")
    return EXIT_OK if tr.flag is None else EXIT_UNCERTIFIED


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="neutralstab",
        description="Stability analysis of scalar neutral delay equations")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in (("check", cmd_check), ("simulate", cmd_simulate),
                     ("sweep", cmd_sweep), ("fundamental", cmd_fundamental)):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True)
        sp.add_argument("--out-dir", default=None)
        sp.add_argument("--format", default=None, choices=["json", "csv"])
        sp.add_argument("--dt", type=float, default=None)
        sp.add_argument("--horizon", type=float, default=None)
        if name == "fundamental":
            sp.add_argument("--s", type=float, required=True)
        sp.set_defaults(fn=fn)
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
