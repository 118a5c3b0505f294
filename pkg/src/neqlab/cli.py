"""Command-line front end.

Exit codes: 0 success, 2 spec error, 3 numerical failure, 4 verification
failure.  No interactive mode: consumers are scripts and test harnesses.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from .equilibria import find_equilibria
from .errors import NumericalError, SpecError
from .exceptional import classify_exceptional
from .integrate import integrate_variational
from .levelsets import LEVEL_MARGIN_FACTOR, critical_points, level_report
from .perturb import bifurcation_sweep, perturbation_scan
from .problem import parse_spec
from .report import (
    RunManifest,
    emit_report,
    tolerances_dict,
    write_csv,
    write_json,
)
from .spectrum import classify_hyperbolic, eigenvalues_sl
from .verify import run_verification

COMMANDS = ("solve", "spectrum", "levelsums", "exceptional", "perturb", "sweep", "verify")


def _build_parser():
    ap = argparse.ArgumentParser(prog="neqlab", description=__doc__)
    ap.add_argument("--cmd", choices=COMMANDS, help="command (alternative to the positional form)")
    ap.add_argument("command", nargs="?", choices=COMMANDS)
    ap.add_argument("--spec", default=None, help="path to a key=value spec file")
    ap.add_argument("--out", default="out", help="output directory")
    ap.add_argument("--q-grid", type=int, default=21, help="levels for levelsums")
    ap.add_argument("--eps-list", default="1e-4,3e-4,1e-3,3e-3,1e-2",
                    help="comma-separated epsilons for perturb")
    ap.add_argument("--g-coeffs", default="0,1",
                    help="comma-separated perturbation polynomial (ascending)")
    ap.add_argument("--lambda-range", default="1:40:20", help="LO:HI:N for sweep")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--threads", type=int, default=1)
    return ap


def _solved(spec, threads):
    records, scan = find_equilibria(spec, threads=threads)
    for rec in records:
        rec.spectrum = eigenvalues_sl(spec, rec.u0 if rec.is_constant else rec.profile)
        rec.flags["hyperbolic"] = classify_hyperbolic(rec.spectrum, spec.tol)
    return records, scan


def _cmd_solve(spec, args):
    records, _ = _solved(spec, args.threads)
    return emit_report(records, args.out, spec, fmt=args.format)


def _cmd_spectrum(spec, args):
    records, _ = _solved(spec, args.threads)
    doc = {
        "spec_hash": spec.content_hash(),
        "reports": [
            {"u0": rec.u0, "is_constant": rec.is_constant, "spectrum": rec.spectrum.to_json_dict()}
            for rec in records
        ],
    }
    os.makedirs(args.out, exist_ok=True)
    return [write_json(doc, os.path.join(args.out, "spectrum.json"))]


def _cmd_levelsums(spec, args):
    records, _ = _solved(spec, args.threads)
    noncon = [r for r in records if not r.is_constant]
    os.makedirs(args.out, exist_ok=True)
    rows = []
    for i, rec in enumerate(noncon):
        phi = integrate_variational(spec, rec.profile)
        prof = rec.profile
        vals = prof.u(prof.sample_grid(2))
        vmin, vmax = float(np.min(vals)), float(np.max(vals))
        margin = 4 * LEVEL_MARGIN_FACTOR * (vmax - vmin)
        crit_vals = critical_points(prof, spec).values()
        for q in np.linspace(vmin + margin, vmax - margin, args.q_grid):
            if any(abs(q - v) < margin for v in crit_vals):
                continue
            rep = level_report(prof, phi.u, float(q), spec)
            rows.append(
                (i, rep.q, rep.n_regular, rep.n_critical,
                 rep.regular_sum if rep.regular_sum is not None else "",
                 rep.signed_sum,
                 rep.critical_sum if rep.critical_sum is not None else "")
            )
    path = os.path.join(args.out, "levelsums.csv")
    return [write_csv(rows, ["record", "q", "n_regular", "n_critical",
                             "regular_sum", "signed_sum", "critical_sum"], path)]


def _cmd_exceptional(spec, args):
    records, _ = _solved(spec, args.threads)
    docs = []
    for rec in records:
        if rec.is_constant:
            docs.append({"u0": rec.u0, "is_constant": True, "overall": "nonexceptional"})
            continue
        verdict = classify_exceptional(spec, rec)
        docs.append(
            {
                "u0": rec.u0,
                "is_constant": False,
                "condition1": verdict.condition1,
                "condition2": verdict.condition2,
                "condition3": verdict.condition3,
                "overall": verdict.overall,
                "witnesses": [list(w) for w in verdict.witnesses],
            }
        )
    os.makedirs(args.out, exist_ok=True)
    return [write_json({"spec_hash": spec.content_hash(), "verdicts": docs},
                       os.path.join(args.out, "exceptional.json"))]


def _cmd_perturb(spec, args):
    records, _ = _solved(spec, args.threads)
    target = [r for r in records if r.flags["hyperbolic"] != "hyperbolic"]
    if not target:
        raise NumericalError("no non-hyperbolic or undecided record to perturb")
    eps_list = [float(t) for t in args.eps_list.split(",") if t]
    g = [float(t) for t in args.g_coeffs.split(",") if t]
    sweep = perturbation_scan(spec, target[0], g, eps_list)
    return _emit_sweep(sweep, args.out, spec, "perturb")


def _cmd_sweep(spec, args):
    lo, hi, n = args.lambda_range.split(":")
    sweep = bifurcation_sweep(spec, (float(lo), float(hi)), int(n), threads=args.threads)
    return _emit_sweep(sweep, args.out, spec, "sweep")


def _emit_sweep(sweep, out_dir, spec, name):
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    for row in sweep.rows:
        for j, e in enumerate(row.entries):
            rows.append((row.parameter, j, e.u0, e.min_abs, e.min_signed, e.n_positive, e.hyperbolic))
    csv_path = write_csv(
        rows,
        ["parameter", "equilibrium", "u0", "min_abs_eig", "min_signed_eig", "n_positive", "hyperbolic"],
        os.path.join(out_dir, f"{name}.csv"),
    )
    doc = {
        "family": sweep.family,
        "crossings": [float(c) for c in sweep.crossings],
        "n_rows": len(sweep.rows),
        "warnings": [w for row in sweep.rows for w in row.warnings],
    }
    json_path = write_json(doc, os.path.join(out_dir, f"{name}_summary.json"))
    return [csv_path, json_path]


def _cmd_verify(args):
    results = run_verification()
    all_ok = all(ok for _, ok, _ in results)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")
    os.makedirs(args.out, exist_ok=True)
    doc = {
        "suite": "builtin-reference",
        "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in results],
        "all_passed": all_ok,
    }
    outputs = [write_json(doc, os.path.join(args.out, "verify_report.json"))]
    return outputs, all_ok


def main(argv=None):
    args = _build_parser().parse_args(argv)
    command = args.cmd or args.command
    if command is None:
        print("error: no command given", file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    try:
        if command == "verify":
            outputs, ok = _cmd_verify(args)
            spec_hash, tols = "builtin", {}
            exit_code = 0 if ok else 4
        else:
            if args.spec is None:
                print("error: --spec is required", file=sys.stderr)
                return 2
            with open(args.spec) as fh:
                spec = parse_spec(fh.read())
            handler = {
                "solve": _cmd_solve,
                "spectrum": _cmd_spectrum,
                "levelsums": _cmd_levelsums,
                "exceptional": _cmd_exceptional,
                "perturb": _cmd_perturb,
                "sweep": _cmd_sweep,
            }[command]
            outputs = handler(spec, args)
            spec_hash, tols = spec.content_hash(), tolerances_dict(spec.tol)
            exit_code = 0
    except SpecError as exc:
        print(f"spec error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3

    manifest = RunManifest(
        spec_hash=spec_hash,
        command=command,
        tolerances=tols,
        outputs=[os.path.basename(p) for p in outputs],
        wall_time_s=time.perf_counter() - t0,
    )
    write_json(manifest.to_json_dict(), os.path.join(args.out, "manifest.json"))
    for p in outputs:
        print(p)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
