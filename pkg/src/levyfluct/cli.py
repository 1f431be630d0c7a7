"""Command-line interface.

    levyfluct model show CFG
    levyfluct compute {h,b,psi,kappa,V,rho} CFG [--grid lo:hi:n] [--out FILE]
    levyfluct simulate {exit,supcdf} CFG [--out DIR]
    levyfluct verify CFG [--claims a,b,...] [--out DIR]
    levyfluct report DIR

Exit codes: 0 all pass or skip, 1 any claim failed, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import fluctuation as fl
from . import montecarlo as mc
from . import spectral as sp
from .concentration import b_r, concentration_table, h
from .config import load_config, parse_grid
from .errors import ConfigError, LevyFluctError
from .harness import compute_gates, exit_code, run_experiment
from .model import mean_x1, psi

def _R(v) -> str:
    return repr(float(v))


def _write_rows(header, rows, out=None):
    if out is None:
        wr = csv.writer(sys.stdout)
        wr.writerow(header)
        wr.writerows(rows)
    else:
        with open(out, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(header)
            wr.writerows(rows)
        print(f"wrote {out}")


def _cmd_model(args) -> int:
    cfg = load_config(args.config)
    spec = cfg.spec
    trip = spec.triplet()
    gates = compute_gates(spec)
    print(f"spec      : {cfg.spec_name} ({spec.label})")
    print(f"sigma     : {_R(trip.sigma)}")
    print(f"gamma     : {_R(trip.gamma)}")
    m = mean_x1(spec)
    print(f"E X_1     : {'undefined' if m is None else _R(m)}")
    print(f"gates     : zero_mean={gates.zero_mean} wlsc_alpha={gates.wlsc_alpha:g} "
          f"wlsc_theta={gates.wlsc_theta:.3g} unbounded_variation={gates.unbounded_variation}")
    print(f"eta_lower : {gates.eta_lower:.6g}")
    print("psi samples:")
    for xi in (0.1, 1.0, 10.0):
        v = complex(psi(spec, xi))
        print(f"  psi({xi:g}) = {_R(v.real)} {'+' if v.imag >= 0 else '-'} {_R(abs(v.imag))} i")
    return 0


def _cmd_compute(args) -> int:
    cfg = load_config(args.config)
    spec = cfg.spec
    grid = parse_grid(args.grid) if args.grid else cfg.grid("r", np.geomspace(1e-2, 1e2, 21))
    what = args.what
    if what == "h":
        table = concentration_table(spec, grid)
        _write_rows(["r", "h", "b_r", "sup_re_psi"],
                    [[_R(v) for v in row] for row in table], args.out)
    elif what == "b":
        _write_rows(["r", "b_r"],
                    [[_R(float(r)), _R(float(b_r(spec, float(r))))] for r in grid],
                    args.out)
    elif what == "psi":
        vals = np.asarray(psi(spec, grid), dtype=complex)
        _write_rows(["xi", "re_psi", "im_psi"],
                    [[_R(float(x)), _R(float(v.real)), _R(float(v.imag))]
                     for x, v in zip(grid, vals)], args.out)
    elif what == "rho":
        _write_rows(["t", "rho"],
                    [[_R(float(t)), _R(sp.positivity(spec, float(t)))] for t in grid],
                    args.out)
    elif what == "kappa":
        _write_rows(["z", "kappa_time", "kappa_space"],
                    [[_R(float(z)), _R(fl.kappa_time(spec, float(z))),
                      _R(fl.kappa_space(spec, float(z)))] for z in grid], args.out)
    elif what == "V":
        V = fl.renewal_V(spec, grid)
        Vh = V if spec.is_symmetric() else fl.renewal_V_hat(spec, grid)
        _write_rows(["r", "V", "V_hat"],
                    [[_R(float(r)), _R(float(V(r))), _R(float(Vh(r)))] for r in grid],
                    args.out)
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown compute target {what!r}")
    return 0


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    spec, plan, R = cfg.spec, cfg.plan, cfg.R
    outdir = Path(args.out) if args.out else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    if args.what == "exit":
        xs = cfg.grid("x", np.linspace(0.1, 0.9, 5))
        rows = []
        for xf in xs:
            est = mc.exit_time(spec, float(xf) * R, R, plan)
            rows.append([_R(float(xf) * R), _R(R), _R(est.mean), _R(est.std_error),
                         _R(est.censored_fraction)])
        _write_rows(["x", "R", "estimate", "std_error", "censored_fraction"], rows,
                    outdir / "exit.csv" if outdir else None)
    else:
        t_grid = cfg.grid("t", np.geomspace(0.05, 5.0, 5) / float(h(spec, 1.0)))
        x_grid = cfg.grid("r", np.geomspace(0.1, 10.0, 5))
        rows = []
        for i, t in enumerate(t_grid):
            sup, _, _ = mc.extrema_samples(spec, float(t), replace(plan, seed=plan.seed + i))
            for x in x_grid:
                p = float(np.mean(sup < x))
                se = float(np.sqrt(max(p * (1 - p), 1.0 / sup.size) / sup.size))
                rows.append([_R(float(t)), _R(float(x)), _R(p), _R(se), _R(0.0)])
        _write_rows(["t", "x", "estimate", "std_error", "censored_fraction"], rows,
                    outdir / "supcdf.csv" if outdir else None)
    return 0


def _cmd_verify(args) -> int:
    cfg = load_config(args.config)
    if args.claims:
        cfg.claims = tuple(c.strip() for c in args.claims.split(",") if c.strip())
    if args.out:
        cfg.outdir = Path(args.out)
    results = run_experiment(cfg)
    for r in results:
        line = f"{r.claim:20s} {r.verdict:7s}"
        if r.reason:
            line += f"  ({r.reason})"
        if r.report is not None:
            line += f"  ratio=[{r.report.min_ratio:.4g}, {r.report.max_ratio:.4g}]"
        print(line + f"  [{r.wall_time:.1f}s]")
    return exit_code(results)


def _cmd_report(args) -> int:
    path = Path(args.dir) / "result.json"
    if not path.exists():
        raise ConfigError(f"no result.json under {args.dir}")
    data = json.loads(path.read_text())
    print(f"spec: {data.get('spec')}  seed: {data.get('seed')}")
    gates = data.get("gates", {})
    print(f"gates: zero_mean={gates.get('zero_mean')} wlsc_ok={gates.get('wlsc_ok')} "
          f"eta_lower={gates.get('eta_lower'):.4g}")
    any_fail = False
    for claim, entry in sorted(data.get("claims", {}).items()):
        verdict = entry.get("verdict")
        any_fail |= verdict == "fail"
        line = f"  {claim:20s} {verdict:7s}"
        rep = entry.get("report")
        if rep:
            line += f" ratio=[{rep['min_ratio']:.4g}, {rep['max_ratio']:.4g}]"
        if entry.get("reason"):
            line += f" ({entry['reason']})"
        print(line)
    return 1 if any_fail else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="levyfluct", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    pm = sub.add_parser("model", help="inspect a process spec")
    pm_sub = pm.add_subparsers(dest="model_cmd", required=True)
    pms = pm_sub.add_parser("show", help="print triplet, gates and psi samples")
    pms.add_argument("config")
    pms.set_defaults(func=_cmd_model)

    pc = sub.add_parser("compute", help="emit analytic tables as CSV")
    pc.add_argument("what", choices=["h", "b", "psi", "kappa", "V", "rho"])
    pc.add_argument("config")
    pc.add_argument("--grid", help="lo:hi:n (log-spaced)")
    pc.add_argument("--out", help="CSV path (default: stdout)")
    pc.set_defaults(func=_cmd_compute)

    ps = sub.add_parser("simulate", help="Monte Carlo estimates as CSV")
    ps.add_argument("what", choices=["exit", "supcdf"])
    ps.add_argument("config")
    ps.add_argument("--out", help="output directory (default: stdout)")
    ps.set_defaults(func=_cmd_simulate)

    pv = sub.add_parser("verify", help="run claim checkers")
    pv.add_argument("config")
    pv.add_argument("--claims", help="comma-separated claim ids (overrides config)")
    pv.add_argument("--out", help="output directory (overrides config)")
    pv.set_defaults(func=_cmd_verify)

    pr = sub.add_parser("report", help="summarize a verification output directory")
    pr.add_argument("dir")
    pr.set_defaults(func=_cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LevyFluctError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
