"""Command-line front end.

    maassmean [--config FILE] SUBCOMMAND [flags]

Exit status: 0 when every check passes, 1 on a tolerance failure, 2 on a
usage or data error.  Settings come from built-in defaults, then the
config file (flat ``key = value`` lines), then command-line flags.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import explicit, spectral, suites
from .numkernel import MaassMeanError, SeriesBudget
from .zetal import riemann_zeta

REPORT_FORMAT = "maassmean.report/1"

DEFAULTS = {
    "data": None,
    "tol": None,
    "seed": 0,
    "cmax": 10_000,
    "kmax": 12,
    "nodes": 24,
    "out": "text",
    "delta": None,
    "m": 1,
    "n": 1,
    "T": None,
    "Pi": None,
    "center": 12.0,
    "width": 3.0,
    "points": 20,
    "inject_fault": None,
}
_CASTS = {
    "tol": float, "seed": int, "cmax": int, "kmax": int, "nodes": int, "delta": int,
    "m": int, "n": int, "center": float, "width": float, "points": int,
}


class UsageError(Exception):
    pass


@dataclass
class Report:
    command: str
    params: dict
    rows: list[dict]
    passed: bool
    summary: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"format": REPORT_FORMAT, "command": self.command, "params": self.params,
                "passed": self.passed, "summary": self.summary, "rows": self.rows}


# ---------------------------------------------------------------------------
# encodings

def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def to_json(report: Report) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def to_csv(report: Report) -> str:
    buf = io.StringIO()
    keys: list[str] = []
    for row in report.rows:
        keys.extend(k for k in row if k not in keys)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["# format", REPORT_FORMAT, "command", report.command, "passed", report.passed])
    w.writerow(keys)
    for row in report.rows:
        w.writerow([_cell(row.get(k)) for k in keys])
    return buf.getvalue()


def to_text(report: Report) -> str:
    lines = [f"{REPORT_FORMAT} {report.command}  {'PASS' if report.passed else 'FAIL'}"]
    lines += [f"  {k} = {_cell(v)}" for k, v in sorted(report.params.items())]
    for row in report.rows:
        lines.append("  " + "  ".join(f"{k}={_cell(v)}" for k, v in row.items()))
    for k, v in sorted(report.summary.items()):
        lines.append(f"  [{k}] {_cell(v) if not isinstance(v, dict) else json.dumps(v, sort_keys=True)}")
    return "\n".join(lines) + "\n"


def render(report: Report, out: str) -> str:
    return {"json": to_json, "csv": to_csv, "text": to_text}[out](report)


def read_csv_rows(text: str) -> list[dict]:
    """Parse rows written by to_csv back into dicts of floats where possible."""
    lines = text.splitlines()
    reader = csv.DictReader(lines[1:])
    out = []
    for row in reader:
        parsed = {}
        for k, v in row.items():
            if v == "":
                parsed[k] = None
                continue
            try:
                parsed[k] = int(v) if v.lstrip("-").isdigit() else float(v)
            except ValueError:
                parsed[k] = {"True": True, "False": False}.get(v, v)
        out.append(parsed)
    return out


# ---------------------------------------------------------------------------
# settings

def read_config(path: str | Path) -> dict:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    try:
        parser.read_string("[main]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"bad config {path}: {exc}") from None
    out = {}
    for k, v in parser["main"].items():
        key = k.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"unknown config key {k!r}")
        out[key] = v
    return out


def _cast(key: str, value):
    if value is None or key not in _CASTS or not isinstance(value, str):
        return value
    try:
        return _CASTS[key](value)
    except ValueError:
        raise UsageError(f"bad value for {key}: {value!r}") from None


def resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(read_config(args.config))
    for k in DEFAULTS:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    cfg = {k: _cast(k, v) for k, v in cfg.items()}
    if cfg["out"] not in ("text", "csv", "json"):
        raise UsageError(f"--out must be text, csv or json, not {cfg['out']!r}")
    if cfg["delta"] not in (None, 0, 1):
        raise UsageError("--delta must be 0 or 1")
    for k in ("m", "n", "cmax", "kmax", "nodes", "points"):
        if cfg[k] < 1:
            raise UsageError(f"--{k} must be positive")
    return cfg


def _budget(cfg: dict) -> SeriesBudget:
    return SeriesBudget(c_max=cfg["cmax"], k_max=cfg["kmax"], quad_nodes=cfg["nodes"])


def _floats(text, default: list[float]) -> list[float]:
    if text is None:
        return default
    try:
        vals = [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad number list {text!r}") from None
    if not vals or any(not v > 0 for v in vals):
        raise UsageError(f"number list {text!r} must hold positive values")
    return vals


def _dataset(cfg: dict, required: bool):
    path = cfg["data"]
    if path is None:
        if required:
            raise UsageError("this command needs --data PATH (or --data bundled)")
        return None, None
    if path == "bundled":
        return spectral.load_dataset(spectral.bundled_dataset_path()), spectral.BUNDLED_T_MAX
    return spectral.load_dataset(path), None


def _c(z: complex) -> tuple[float, float]:
    z = complex(z)
    return float(z.real), float(z.imag)


def _params(cfg: dict, *keys: str) -> dict:
    return {k: cfg[k] for k in keys}


# ---------------------------------------------------------------------------
# commands

def _suite_report(command: str, results, params: dict) -> Report:
    rows = [r.to_dict() for r in results]
    failed = [r.name for r in results if not r.passed]
    return Report(command, params, rows, not failed, {"failed": ",".join(failed)})


def cmd_verify_identities(cfg: dict) -> Report:
    results = suites.run_identities(cfg["seed"], cfg["tol"], cfg["inject_fault"])
    return _suite_report("verify-identities", results, _params(cfg, "seed", "tol", "inject_fault"))


def cmd_verify_fourier(cfg: dict) -> Report:
    results = suites.run_fourier(cfg["seed"], cfg["tol"], cfg["points"])
    return _suite_report("verify-fourier", results, _params(cfg, "seed", "tol", "points"))


def cmd_trace(cfg: dict) -> Report:
    forms, t_max = _dataset(cfg, required=True)
    delta = 0 if cfg["delta"] is None else cfg["delta"]
    tol = 1e-3 if cfg["tol"] is None else cfg["tol"]
    h = spectral.GaussianPair(cfg["center"], cfg["width"])
    rep = spectral.kuznetsov_sides(delta, cfg["m"], cfg["n"], h, forms, _budget(cfg), t_max=t_max)
    allowed = rep.tail_budget + tol * abs(rep.diag)
    rows = []
    for name in ("cusp", "eisen", "diag", "kb_plus", "kb_minus"):
        if name == "diag" and cfg["m"] != cfg["n"]:
            continue
        if name == "eisen" and delta == 1:
            continue
        re, im = _c(getattr(rep, name))
        rows.append({"quantity": name, "re": re, "im": im, "budget": rep.tail_budget})
    re, im = _c(rep.residual)
    rows.append({"quantity": "residual", "re": re, "im": im, "budget": allowed})
    passed = abs(rep.residual) <= allowed
    params = _params(cfg, "m", "n", "center", "width", "cmax", "data")
    params.update(delta=delta, tol=tol)
    return Report("trace", params, rows, passed, {"abs_residual": abs(rep.residual), "allowed": allowed})


def _breakdown_rows(bd: explicit.TermBreakdown) -> list[dict]:
    rows = []
    for name, tv in bd.terms.items():
        re, im = _c(tv.value)
        rows.append({"quantity": name, "sign": explicit.TERM_SIGNS[name], "re": re, "im": im,
                     "budget": tv.tail, "c_used": tv.c_used, "nodes": tv.nodes, "flagged": tv.flagged})
    return rows


def cmd_explicit(cfg: dict) -> Report:
    delta = 0 if cfg["delta"] is None else cfg["delta"]
    T = _floats(cfg["T"], [12.0])
    Pi = _floats(cfg["Pi"], [2.0])
    if len(T) != 1 or len(Pi) != 1:
        raise UsageError("explicit takes a single --T and a numeric --Pi")
    tol = 1e-2 if cfg["tol"] is None else cfg["tol"]
    w = explicit.TestWeight(T[0], Pi[0])
    bd = explicit.rhs_total(delta, w, cfg["m"], _budget(cfg))
    rows = _breakdown_rows(bd)
    re, im = _c(bd.total)
    rows.append({"quantity": "total", "sign": 0, "re": re, "im": im, "budget": bd.tail,
                 "c_used": None, "nodes": None, "flagged": bd.flagged})
    summary = {"term_breakdown": json.loads(bd.to_json())}
    passed = not bd.flagged
    forms, t_max = _dataset(cfg, required=False)
    if forms is not None:
        lhs, lhs_tail = spectral.lhs_mean(delta, w, forms, cfg["m"], t_max=t_max)
        resid = lhs - bd.total
        allowed = bd.tail + lhs_tail + tol * abs(bd.terms["D"].value)
        for name, z, b in (("lhs", lhs, lhs_tail), ("residual", resid, allowed)):
            re, im = _c(z)
            rows.append({"quantity": name, "sign": 0, "re": re, "im": im, "budget": b,
                         "c_used": None, "nodes": None, "flagged": False})
        summary.update(abs_residual=abs(resid), allowed=allowed,
                       relative_to_D=abs(resid) / abs(bd.terms["D"].value))
        passed = passed and abs(resid) <= allowed
    params = _params(cfg, "m", "cmax", "kmax", "nodes", "data")
    params.update(delta=delta, T=T[0], Pi=Pi[0], tol=tol)
    return Report("explicit", params, rows, passed, summary)


def _table_rows(delta: int, rows: list[explicit.AsymptoticRow]) -> list[dict]:
    out = []
    for r in rows:
        d = {"delta": delta}
        d.update({k: float(v) for k, v in vars(r).items()})
        d["D_relative_error"] = r.D / (r.Pi * r.T / math.pi ** 1.5) - 1
        out.append(d)
    return out


def _fit_summary(fit: explicit.SecondaryFit) -> dict:
    nearest = min(fit.candidates, key=lambda k: abs(fit.candidates[k] - fit.coefficient))
    return {"coefficient": fit.coefficient, "stderr": fit.stderr, "exponent": fit.exponent,
            "exponent_stderr": fit.exponent_stderr, "nearest_candidate": nearest,
            "candidates": dict(fit.candidates)}


def cmd_table(cfg: dict) -> Report:
    delta = 0 if cfg["delta"] is None else cfg["delta"]
    T = _floats(cfg["T"], [100.0, 400.0, 1600.0])
    rule = cfg["Pi"] or "sqrt"
    try:
        rows, fit = explicit.asymptotic_table(delta, T, rule, _budget(cfg))
    except MaassMeanError as exc:
        raise UsageError(str(exc)) from None
    out = _table_rows(delta, rows)
    flagged = any(r["tail"] > 1e-6 * abs(r["D"]) for r in out)
    params = _params(cfg, "cmax", "kmax", "nodes")
    params.update(delta=delta, T=",".join(repr(t) for t in T), Pi=rule)
    return Report("table", params, out, not flagged, {"fit": _fit_summary(fit)})


def cmd_probe_secondary(cfg: dict) -> Report:
    """Both parities: D against Pi T / pi^{3/2}, the excess exponent, and the fitted constant."""
    T = _floats(cfg["T"], [100.0, 400.0, 1600.0])
    rule = cfg["Pi"] or "sqrt"
    tol = 1e-6 if cfg["tol"] is None else cfg["tol"]
    deltas = (0, 1) if cfg["delta"] is None else (cfg["delta"],)
    rows, summary, passed = [], {}, True
    for delta in deltas:
        trows, fit = explicit.asymptotic_table(delta, T, rule, _budget(cfg))
        out = _table_rows(delta, trows)
        rows += out
        fs = _fit_summary(fit)
        d_ok = all(abs(r["D_relative_error"]) <= tol for r in out)
        e_ok = abs(fit.exponent - 0.5) <= 0.05
        fs.update(D_within_tol=d_ok, exponent_within_0_05=e_ok)
        summary[f"delta{delta}"] = fs
        passed = passed and d_ok and e_ok
    summary["zeta_half"] = riemann_zeta(0.5).real
    params = {"T": ",".join(repr(t) for t in T), "Pi": rule, "tol": tol, "cmax": cfg["cmax"],
              "delta": cfg["delta"]}
    return Report("probe-secondary", params, rows, passed, summary)


COMMANDS = {
    "verify-identities": cmd_verify_identities,
    "verify-fourier": cmd_verify_fourier,
    "trace": cmd_trace,
    "explicit": cmd_explicit,
    "table": cmd_table,
    "probe-secondary": cmd_probe_secondary,
}


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value settings file")
    common.add_argument("--data", help="dataset path, or 'bundled'")
    common.add_argument("--tol", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--cmax", type=int, help="modulus cutoff")
    common.add_argument("--kmax", type=int, help="minimum hypergeometric expansion depth")
    common.add_argument("--nodes", type=int, help="Gauss-Legendre nodes per panel")
    common.add_argument("--out", choices=("text", "csv", "json"))
    common.add_argument("--delta", type=int, choices=(0, 1))
    common.add_argument("--m", type=int)
    common.add_argument("--T", help="comma-separated list of centres")
    common.add_argument("--Pi", help="width: a number, or a rule sqrt | pow:a | const:x")
    p = argparse.ArgumentParser(prog="maassmean", description=__doc__.splitlines()[0],
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "trace":
            sp.add_argument("--n", type=int)
            sp.add_argument("--center", type=float)
            sp.add_argument("--width", type=float)
        if name == "verify-fourier":
            sp.add_argument("--points", type=int, help="sample points per kind")
        if name == "verify-identities":
            sp.add_argument("--inject-fault", dest="inject_fault", choices=suites._FAULTS,
                            help=argparse.SUPPRESS)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve(args)
        report = COMMANDS[args.command](cfg)
    except (UsageError, MaassMeanError, OSError, ValueError) as exc:
        print(f"maassmean: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(render(report, cfg["out"]))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
