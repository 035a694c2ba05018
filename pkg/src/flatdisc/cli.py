"""Command line front end.

Exit codes: 0 success, 1 domain/singularity error, 2 Newton convergence
failure, 3 bad arguments.  A ``--config`` file holds ``key = value`` lines
using the long flag names (``reset-cycles = 10``); explicit flags win.
"""

from __future__ import annotations

import argparse
import configparser
import sys

import numpy as np

from .discmap import alpha_map, check_axioms, lift_map
from .errors import ArgumentError, ConvergenceError, DomainError, FlatdiscError, StepsizeError
from .harness import SimConfig, run_closed_loop, write_trace
from .paper_example import XI0, paper_quad, sample_tube
from .scheme import build_generic_stepper, build_lifted_stepper, discretize_linear, explicit_euler, measure_order
from .systems import brunovsky
from .tracking import (
    PAPER_GAIN,
    PRINTED_EIGENVALUES,
    TrackingLaw,
    eigenvalue_distances,
    paper_references,
)

SYSTEMS = {"paper-quad": paper_quad}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(message)


def _floats(text, name):
    try:
        return [float(t) for t in str(text).replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise ArgumentError(f"--{name}: expected comma separated numbers, got {text!r}") from None


def _matrix(text):
    rows = [r for r in str(text).split(";") if r.strip()]
    try:
        mat = np.array([[float(t) for t in r.split(",")] for r in rows])
    except ValueError:
        raise ArgumentError(f"--k: cannot parse matrix {text!r}") from None
    if mat.ndim != 2:
        raise ArgumentError(f"--k: ragged matrix {text!r}")
    return mat


def _fmt_matrix(mat):
    return "\n".join(" ".join(f"{v:12.6g}" for v in row) for row in np.atleast_2d(mat))


def _system(name):
    try:
        return SYSTEMS[name]()
    except KeyError:
        raise ArgumentError(f"unknown system {name!r}; known: {', '.join(SYSTEMS)}") from None


def _parse_map(spec, sys):
    if spec == "lifted":
        return lift_map(alpha_map(0.0, sys.phi.dim), sys.phi)
    if spec.startswith("alpha:"):
        return alpha_map(float(spec.split(":", 1)[1]), sys.phi.dim)
    if spec.startswith("lifted:"):
        return lift_map(alpha_map(float(spec.split(":", 1)[1]), sys.phi.dim), sys.phi)
    raise ArgumentError(f"--map must be alpha:<a>, lifted or lifted:<a>, got {spec!r}")


def _schemes(name, sys, alpha, h):
    inner = alpha_map(alpha, sys.phi.dim)
    if name == "lifted":
        return build_lifted_stepper(sys.phi, discretize_linear(inner, sys.linear, h))
    if name == "generic":
        return build_generic_stepper(lift_map(inner, sys.phi), sys.extended, h)
    if name == "euler":
        return explicit_euler(sys.extended, h)
    raise ArgumentError(f"unknown scheme {name!r}")


def cmd_check_map(args, out):
    sys_ = _system(args.system)
    dmap = _parse_map(args.map, sys_)
    points = sample_tube(args.samples, seed=args.seed)
    report = check_axioms(dmap, points, seed=args.seed)
    out.write(f"map={dmap.kind}\n")
    out.write(report.as_text())
    return 0


def cmd_discretize(args, out):
    chains = [int(c) for c in _floats(args.chains, "chains")]
    lin = brunovsky(chains)
    lind = discretize_linear(alpha_map(args.alpha, lin.state_dim), lin, args.h)
    out.write(f"alpha={args.alpha:g} h={args.h:g} chains={','.join(map(str, chains))}\n")
    out.write("A_h =\n" + _fmt_matrix(lind.a_h) + "\n")
    out.write("B_h =\n" + _fmt_matrix(lind.b_h) + "\n")
    return 0


def cmd_order_study(args, out):
    sys_ = _system(args.system)
    hs = _floats(args.h_list, "h")
    if args.point:
        vals = _floats(args.point, "point")
        if len(vals) not in (5, 7):
            raise ArgumentError("--point takes 5 state values, optionally followed by 2 inputs")
        xi = np.array(vals[:5])
        v = np.array(vals[5:]) if len(vals) == 7 else np.zeros(2)
    elif args.seed:
        xi = sample_tube(1, seed=args.seed)[0]
        v = np.zeros(2)
    else:
        xi, v = XI0.copy(), np.zeros(2)
    scheme = _schemes(args.scheme, sys_, args.alpha, hs[0])
    study = measure_order(scheme, sys_.extended, (xi, v), hs)
    out.write(f"scheme={scheme.name} point={','.join(f'{p:g}' for p in np.concatenate([xi, v]))}\n")
    out.write(study.as_text())
    return 0


def _run_loop(args, out, gain):
    sys_ = _system(args.system)
    cfg = SimConfig(
        h=args.h,
        horizon=args.horizon,
        reset_period_cycles=args.reset_cycles,
        seed=args.seed,
        output_path=args.out,
        reset_full=args.reset_full,
    )
    lind = discretize_linear(alpha_map(args.alpha, 5), sys_.linear, cfg.h)
    scheme = _schemes(args.scheme, sys_, args.alpha, cfg.h)
    law = TrackingLaw(gain, lind, paper_references(cfg.h, cfg.horizon))
    spec = law.spectrum
    out.write("eigenvalues=" + " ".join(f"{e.real:+.6f}{e.imag:+.6f}j" for e in spec) + "\n")
    out.write(f"spectral_radius={law.spectral_radius:.6f}\n")
    rows = run_closed_loop(cfg, scheme, law, sys_)
    out.write(f"{'k':>5} {'t':>8} {'rel_err':>12} {'e_z1':>12} {'e_z4':>12}\n")
    for k, r in enumerate(rows):
        out.write(f"{k:5d} {r.t:8.3f} {r.rel_err:12.4e} {r.z1 - r.z1_star:12.4e} {r.z4 - r.z4_star:12.4e}\n")
    if args.out:
        write_trace(rows, args.out)
        out.write(f"trace={args.out}\n")
    return law


def cmd_track(args, out):
    gain = _matrix(args.k) if args.k else PAPER_GAIN
    law = _run_loop(args, out, gain)
    if args.k is None and args.alpha == 0.0 and abs(args.h - 0.05) < 1e-15:
        dist = eigenvalue_distances(law.spectrum, PRINTED_EIGENVALUES)
        out.write("printed_eigenvalue_distance=" + " ".join(f"{d:.4f}" for d in dist) + "\n")
    return 0


def cmd_simulate(args, out):
    _run_loop(args, out, np.zeros((2, 5)))
    return 0


def _add_loop_flags(p):
    p.add_argument("--system", default="paper-quad")
    p.add_argument("--h", type=float, default=0.05)
    p.add_argument("--horizon", type=float, default=10.0)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--reset-cycles", type=int, default=20)
    p.add_argument("--reset-full", action="store_true")
    p.add_argument("--scheme", choices=("lifted", "generic", "euler"), default="lifted")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)


def build_parser():
    parser = _Parser(prog="flatdisc", description="Flatness-preserving discretization tools.")
    parser.add_argument("--config", default=None, help="key = value file with default flag values")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check-map", help="check discretization map axioms")
    p.add_argument("--map", default="lifted", help="alpha:<a>, lifted or lifted:<a>")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--system", default="paper-quad")
    p.set_defaults(func=cmd_check_map)

    p = sub.add_parser("discretize", help="print A_h and B_h of an alpha discretization")
    p.add_argument("--chains", default="3,2")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--h", type=float, default=0.05)
    p.set_defaults(func=cmd_discretize)

    p = sub.add_parser("order-study", help="observed order of a scheme")
    p.add_argument("--scheme", choices=("lifted", "generic", "euler"), default="lifted")
    p.add_argument("--h", dest="h_list", default="0.05,0.025,0.0125,0.00625")
    p.add_argument("--point", default=None)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--system", default="paper-quad")
    p.set_defaults(func=cmd_order_study)

    p = sub.add_parser("simulate", help="open-loop run (v = v*) of the scheme against the plant")
    _add_loop_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("track", help="closed-loop flat-output tracking")
    _add_loop_flags(p)
    p.add_argument("--k", default=None, help='gain rows separated by ";", e.g. "-10,-10,-10,0,0;0,0,0,-10,-10"')
    p.set_defaults(func=cmd_track)
    return parser


def _config_defaults(path):
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_string("[flags]\n" + fh.read())
    except OSError as exc:
        raise ArgumentError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ArgumentError(f"bad config {path}: {exc}") from None
    return {k.replace("-", "_"): v for k, v in cp["flags"].items()}


def _apply_config(parser, argv):
    pre = _Parser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if known.config is None:
        return
    values = _config_defaults(known.config)
    if "h" in values:
        values.setdefault("h_list", values["h"])
    for action in parser._subparsers._group_actions:
        for subparser in action.choices.values():
            dests = {a.dest: a for a in subparser._actions}
            overrides = {}
            for key, raw in values.items():
                if key not in dests:
                    continue
                act = dests[key]
                if isinstance(act, argparse._StoreTrueAction):
                    overrides[key] = raw.strip().lower() in ("1", "true", "yes", "on")
                elif act.type is not None:
                    try:
                        overrides[key] = act.type(raw)
                    except ValueError:
                        raise ArgumentError(f"config: bad value for {key}: {raw!r}") from None
                else:
                    overrides[key] = raw
            subparser.set_defaults(**overrides)


def _glue_negative_values(argv):
    # "--k -10,..." would otherwise be read as an unknown flag
    glued, i = [], 0
    while i < len(argv):
        if argv[i] in ("--k", "--point") and i + 1 < len(argv):
            glued.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            glued.append(argv[i])
            i += 1
    return glued


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args, out)
    except (ArgumentError, StepsizeError) as exc:
        print(f"argument error: {exc}", file=sys.stderr)
        return 3
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 1
    except FlatdiscError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
