"""Command-line driver.

Subcommands: analytic, atomic, direct, vpaw, paw, fem, jumps, sweep.
Options may come from a flat `key = value` config file (--config), with
command-line flags taking precedence.  Exit status: 0 on success, 2 when
some grid points failed (rows carry an error column), 1 on fatal errors.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .analytic import ModelParams, SmoothPotential, atomic_spectrum, solve_spectrum
from .bench import SweepSpec, run_sweep, rows_to_csv, summary_table
from .jumps import default_eta_grid, edge_jump_slope, first_jump_slope, jump_sweep
from .vpaw_setup import RHO_POLY


def parse_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw.rstrip()}")
            key, val = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def _floats(s) -> tuple:
    return tuple(float(x) for x in str(s).split(","))


def _ints(s) -> tuple:
    return tuple(int(x) for x in str(s).split(","))


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key = value option file")
    p.add_argument("--Z0", type=float)
    p.add_argument("--Za", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--N", dest="N")
    p.add_argument("--d", dest="d")
    p.add_argument("--eta", help="comma list")
    p.add_argument("--M", help="comma list")
    p.add_argument("--eig", help="comma list of eigenvalue indices")
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--W-amp", dest="W_amp", type=float)
    p.add_argument("--W-freq", dest="W_freq", type=int)
    p.add_argument("--W-phase", dest="W_phase", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--eps-factor", dest="eps_factor", type=float,
                   help="PAW mollifier width as a fraction of eta")
    p.add_argument("--rho", dest="rho", help="projector weight id (poly | cos2)")


_DEFAULTS = {
    "Z0": 10.0, "Za": 10.0, "a": 0.4, "N": "2", "d": "2", "eta": "0.1",
    "M": "257", "eig": "0", "out": None, "W_amp": None, "W_freq": 1,
    "W_phase": 0.0, "seed": 0, "eps_factor": 0.25, "rho": RHO_POLY,
}


def _resolve(args) -> dict:
    opts = dict(_DEFAULTS)
    if getattr(args, "config", None):
        cfg = parse_config(args.config)
        for k, v in cfg.items():
            if k not in opts and k not in ("n", "method"):
                raise ValueError(f"unknown config key {k!r}")
            opts[k] = v
    for k in opts:
        v = getattr(args, k, None)
        if v is not None:
            opts[k] = v
    opts["Z0"] = float(opts["Z0"])
    opts["Za"] = float(opts["Za"])
    opts["a"] = float(opts["a"])
    opts["W_freq"] = int(opts["W_freq"])
    opts["W_phase"] = float(opts["W_phase"])
    opts["eps_factor"] = float(opts["eps_factor"])
    if opts["W_amp"] is not None:
        opts["W_amp"] = float(opts["W_amp"])
    return opts


def _model(opts) -> ModelParams:
    W = None
    if opts["W_amp"] is not None:
        W = SmoothPotential(amplitude=opts["W_amp"], frequency=opts["W_freq"],
                            phase=opts["W_phase"])
    return ModelParams(Z0=opts["Z0"], Za=opts["Za"], a=opts["a"], W=W)


def _cmd_analytic(args) -> int:
    opts = _resolve(args)
    n = max(_ints(opts["eig"])) + 1 if opts["eig"] else 1
    n = max(n, int(getattr(args, "n", 0) or n))
    pairs = solve_spectrum(_model(opts), n)
    print(f"{'idx':>4} {'branch':>9} {'omega':>22} {'E':>22}")
    for i, p in enumerate(pairs):
        print(f"{i:>4} {p.branch:>9} {p.omega:>22.15g} {p.E:>22.15g}")
    return 0


def _cmd_atomic(args) -> int:
    opts = _resolve(args)
    N = int(_ints(opts["N"])[0])
    fns = atomic_spectrum(opts["Z0"], N, site=0.0)
    print(f"{'k':>3} {'branch':>6} {'omega':>22} {'eps':>22} {'phi(0)':>18}")
    for f in fns:
        print(f"{f.index:>3} {f.branch:>6} {f.omega:>22.15g} {f.eps:>22.15g} "
              f"{f.value_at_site:>18.12g}")
    return 0


def _sweep_spec(method: str, opts) -> SweepSpec:
    return SweepSpec(
        method=method, model=_model(opts),
        Ms=_ints(opts["M"]), Ns=_ints(opts["N"]), ds=_ints(opts["d"]),
        etas=_floats(opts["eta"]), eig_indices=_ints(opts["eig"]),
        out=opts["out"], eps_factor=opts["eps_factor"], rho_id=opts["rho"])


def _run_and_report(spec: SweepSpec) -> int:
    result = run_sweep(spec)
    if not spec.out:
        sys.stdout.write(rows_to_csv(result.rows))
    print(summary_table(result))
    return 2 if result.has_failures else 0


def _cmd_method(method):
    def run(args) -> int:
        return _run_and_report(_sweep_spec(method, _resolve(args)))
    return run


def _cmd_sweep(args) -> int:
    opts = _resolve(args)
    method = getattr(args, "method", None)
    if method is None and args.config:
        method = parse_config(args.config).get("method")
    if method is None:
        raise ValueError("sweep needs --method or a method= config entry")
    return _run_and_report(_sweep_spec(method, opts))


def _cmd_jumps(args) -> int:
    opts = _resolve(args)
    model = _model(opts)
    if model.W is not None:
        raise ValueError("jump analysis applies to the pure Dirac model")
    N = _ints(opts["N"])[0]
    d = _ints(opts["d"])[0]
    eig = _ints(opts["eig"])[0]
    etas = _floats(opts["eta"]) if getattr(args, "eta", None) else tuple(default_eta_grid())
    pair = solve_spectrum(model, eig + 1)[eig]
    rows = jump_sweep(model, N, d, etas, pair, rho_id=opts["rho"])
    lines = ["site,kind,order,N,d,eta,value,cond_Atilde"]
    for r in rows:
        for order, val in sorted(r.jumps_at_zero.items()):
            lines.append(f"0,site,{order},{N},{d},{r.eta:.17g},{val:.17g},{r.cond_Atilde:.17g}")
        for order, val in sorted(r.jumps_at_eta.items()):
            lines.append(f"0,edge,{order},{N},{d},{r.eta:.17g},{val:.17g},{r.cond_Atilde:.17g}")
    text = "\n".join(lines) + "\n"
    if opts["out"]:
        with open(opts["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    fit = first_jump_slope(rows)
    print(f"first-jump slope at site: {fit.slope:+.3f} (r2={fit.r2:.4f})")
    for k in range(d, 2 * d - 1):
        fit = edge_jump_slope(rows, k)
        print(f"edge-jump slope, order {k}: {fit.slope:+.3f} (r2={fit.r2:.4f})")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="vpaw1d",
                                     description="double-Dirac VPAW solver laboratory")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in [("analytic", _cmd_analytic), ("atomic", _cmd_atomic),
                     ("direct", _cmd_method("direct")), ("vpaw", _cmd_method("vpaw")),
                     ("paw", _cmd_method("paw")), ("fem", _cmd_method("fem")),
                     ("jumps", _cmd_jumps)]:
        p = sub.add_parser(name)
        _add_common(p)
        if name == "analytic":
            p.add_argument("--n", type=int, help="number of eigenvalues")
        p.set_defaults(func=fn)
    p = sub.add_parser("sweep")
    _add_common(p)
    p.add_argument("--method", choices=["direct", "vpaw", "paw", "fem"])
    p.set_defaults(func=_cmd_sweep)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # fatal
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
