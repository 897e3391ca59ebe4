"""Command-line front end.

Subcommands: ``estimate``, ``experiment``, ``bench``, ``ctrb``, ``simulate``.

Exit codes
----------
0  success, every declared output written
2  usage error (bad or missing flags, conflicting sources)
3  an assumption of the chosen data-driven formula does not hold
4  refusal to overwrite a non-empty output directory (use ``--force``)
5  invalid input data (malformed files, non-finite values, bad shapes)
"""

import argparse
import json
import secrets
import sys as _sys
from pathlib import Path

import numpy as np

from . import benchsuite as bs
from . import datagen as dg
from . import estimators as est
from . import fileio
from . import matops
from .errors import AssumptionViolatedError, ConfigurationError, InvalidInputError
from .sysmodel import ctrb_matrix, gramian, output_ctrb_matrix, simulate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ASSUMPTION = 3
EXIT_REFUSED = 4
EXIT_INVALID = 5

_STUDY_NAMES = {"vs-N": "vs_N", "vs-n": "vs_n", "noise-bias": "noise_bias", "demo-2d": "demo_2d"}


class UsageError(Exception):
    pass


class RefusedError(Exception):
    pass


def parse_vector(text):
    try:
        return np.array([float(x) for x in text.split(",") if x.strip()], dtype=float)
    except ValueError:
        raise UsageError(f"not a comma-separated list of reals: {text!r}") from None


def parse_floats(text):
    return tuple(parse_vector(text).tolist())


def parse_ints(text):
    vals = parse_vector(text)
    if np.any(vals != np.round(vals)):
        raise UsageError(f"expected integers: {text!r}")
    return tuple(int(v) for v in vals)


def _vector_from(inline, path, name, required=True):
    if inline is not None and path is not None:
        raise UsageError(f"give either --{name} or --{name}-file, not both")
    if inline is not None:
        return parse_vector(inline)
    if path is not None:
        return fileio.read_vector_csv(path)
    if required:
        raise UsageError(f"--{name} or --{name}-file is required")
    return None


def _resolve_seed(seed):
    if seed is None:
        seed = secrets.randbits(32)
        print(f"seed: {seed}")
    return seed


def _check_paths(*paths):
    for p in paths:
        if p is not None and not Path(p).exists():
            raise UsageError(f"no such file or directory: {p}")


def _prepare_out_dir(path, force):
    out = Path(path)
    if out.exists() and any(out.iterdir()) and not force:
        raise RefusedError(f"{out} exists and is not empty; pass --force to overwrite")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config_dict(args):
    return {k: v for k, v in vars(args).items() if k != "func"}


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# -- estimate -------------------------------------------------------------------

def cmd_estimate(args):
    _check_paths(args.system, args.data, args.xf_file, args.x0_file)
    target = _vector_from(args.target_value, args.xf_file, "xf")
    system = fileio.load_system(args.system) if args.system else None
    data = fileio.load_experiment(args.data) if args.data else None
    output = args.target == "output"
    seed = None if data is None else data.seed

    if args.method in est.MODEL_METHODS:
        if system is None:
            raise UsageError(f"method {args.method!r} needs --system")
        T = args.T if args.T is not None else (data.T if data is not None else None)
        if T is None:
            raise UsageError("--T is required for model-based methods without --data")
        x0 = _vector_from(args.x0_vector, args.x0_file, "x0-vector", required=False)
        if x0 is None:
            x0 = data.x0 if data is not None else np.zeros(system.n)
        task = est.ControlTask(x0, target, T, "output" if output else "state")
        if output and args.method == "gramian":
            raise UsageError("the gramian method takes state targets only")
        sol = est.estimate_from_model(args.method, system, task, tol=args.tol)
    else:
        if data is None:
            raise UsageError(f"method {args.method!r} needs --data")
        if args.T is not None and args.T != data.T:
            raise UsageError(f"--T {args.T} disagrees with the data horizon {data.T}")
        if system is not None:
            est.check_dimensions(system, data)
        augmented = None if args.x0 is None else args.x0 == "nonzero"
        sol = est.estimate_from_data(args.method, data, target, output=output,
                                     augmented=augmented, tol=args.tol, system=system,
                                     rank_rule=args.rank_rule)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fileio.write_vector_csv(out / "u.csv", sol.u.u)
    report = sol.to_report()
    if sol.final_error is None:
        report.pop("final_error")
        report.pop("achieved_final")
    report["seed"] = seed
    report["config"] = _config_dict(args)
    _write_json(out / "report.json", report)
    print(f"{sol.method}: |u| = {sol.input_norm:.6g}"
          + ("" if sol.final_error is None else f", final error = {sol.final_error:.3g}"))
    return EXIT_OK


# -- experiment -------------------------------------------------------------------

def cmd_experiment(args):
    if (args.system is None) == (args.random_system is None):
        raise UsageError("give exactly one of --system or --random-system N_STATES N_INPUTS")
    if args.sigma is not None and args.eps is not None:
        raise UsageError("give at most one of --sigma and --eps")
    _check_paths(args.system, args.x0_file)
    seed = _resolve_seed(args.seed)
    if args.system:
        system = fileio.load_system(args.system)
    else:
        n, m = args.random_system
        system = dg.random_system(n, m, dg.derive_seed(seed, 0))
    if args.output_matrix is not None:
        system = system.with_output(np.atleast_2d(parse_vector(args.output_matrix)).reshape(-1, system.n))
    mT = system.m * args.T
    if args.inputs == "identity":
        if args.N is not None and args.N != mT:
            raise UsageError(f"--inputs identity needs --N equal to m*T = {mT}")
        design = dg.InputDesign("identity_basis", mT)
    else:
        if args.N is None:
            raise UsageError("--N is required for random inputs")
        design = dg.InputDesign("iid_gaussian", args.N, dg.derive_seed(seed, 1))
    x0 = _vector_from(args.x0_vector, args.x0_file, "x0-vector", required=False)
    if x0 is None:
        x0 = np.zeros(system.n)
    out = _prepare_out_dir(args.out, args.force)

    designed = dg.design_inputs(design, system.m, args.T)
    data = dg.run_experiments(system, x0, designed.U, args.T, seed=seed)
    if args.sigma is not None or args.eps is not None:
        kind, scale = ("gaussian", args.sigma) if args.sigma is not None else ("uniform", args.eps)
        data = dg.add_noise(data, dg.NoiseModel(kind, scale, args.noise_on, dg.derive_seed(seed, 2)))
    fileio.save_experiment(data, out, extra_meta={
        "config": _config_dict(args), "full_row_rank_U": designed.full_row_rank})
    fileio.save_system(system, out / "system.json")
    print(f"wrote {data.N} experiments (n={data.n}, m={data.m}, T={data.T}) to {out}")
    return EXIT_OK


# -- bench ------------------------------------------------------------------------

def cmd_bench(args):
    study = _STUDY_NAMES[args.study]
    seed = _resolve_seed(args.seed)
    overrides = {"master_seed": seed, "workers": args.workers, "rank_rule": args.rank_rule}
    for key in ("trials", "n", "m", "T", "N"):
        if getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    if args.sweep is not None:
        overrides["sweep"] = parse_floats(args.sweep) if study == "noise_bias" else parse_ints(args.sweep)
    if args.methods is not None:
        overrides["methods"] = tuple(m.strip() for m in args.methods.split(","))
    try:
        cfg = bs.DEFAULT_CONFIGS[study](**overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = bs.run_study(cfg)
    bs.write_csv(records, out / f"{study}.csv")
    bs.write_summary_json(records, cfg, out / f"{study}_summary.json")
    _print_summary(bs.summarize(records), study)
    return EXIT_OK


def _print_summary(groups, study):
    point = "sigma" if study == "noise_bias" else ("n" if study == "vs_n" else "N")
    print(f"{point:>8} {'method':<14} {'median |u|':>12} {'median err':>12}"
          + (f" {'bias':>12}" if study == "noise_bias" else ""))
    for g in groups:
        def fmt(x):
            return f"{x:12.4g}" if x is not None else f"{'-':>12}"
        line = f"{g[point]!s:>8} {g['method']:<14} {fmt(g['input_norm_median'])} {fmt(g['final_error_median'])}"
        if study == "noise_bias":
            line += f" {fmt(g['bias'])}"
        print(line)


# -- ctrb / simulate ------------------------------------------------------------------

def cmd_ctrb(args):
    _check_paths(args.system)
    system = fileio.load_system(args.system)
    mats = {"C_T": ctrb_matrix(system, args.T), "W_T": gramian(system, args.T)}
    if system.C is not None:
        mats["C_OT"] = output_ctrb_matrix(system, args.T)
    if args.out is None:
        for name, M in mats.items():
            print(f"{name} ({M.shape[0]}x{M.shape[1]}, rank {matops.rank(M)}):")
            print(np.array2string(M, precision=6, max_line_width=120))
        return EXIT_OK
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, M in mats.items():
        fileio.write_matrix_csv(out / f"{name}.csv", M)
    _write_json(out / "ctrb.json", {"config": _config_dict(args),
                                    "ranks": {k: matops.rank(M) for k, M in mats.items()}})
    return EXIT_OK


def cmd_simulate(args):
    _check_paths(args.system, args.u_file, args.x0_file)
    system = fileio.load_system(args.system)
    u = _vector_from(args.u, args.u_file, "u")
    x0 = _vector_from(args.x0_vector, args.x0_file, "x0-vector", required=False)
    if x0 is None:
        x0 = np.zeros(system.n)
    traj = simulate(system, x0, u, args.T)
    if args.out is None:
        for t, x in enumerate(traj.states):
            print(t, " ".join(repr(float(v)) for v in x))
    else:
        fileio.write_matrix_csv(args.out, traj.states)
    return EXIT_OK


# -- parser -----------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="minenergy", description="Minimum-energy inputs from models or experiment data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="compute a minimum-energy input")
    p.add_argument("--method", required=True, choices=est.METHODS)
    p.add_argument("--system", help="system JSON (required by gramian/ctrb; optional ground truth otherwise)")
    p.add_argument("--data", help="experiment directory (required by dd-* methods)")
    p.add_argument("--xf", "--yf", dest="target_value", help="target vector, comma-separated")
    p.add_argument("--xf-file", help="target vector as a one-column CSV")
    p.add_argument("--target", choices=("state", "output"), default="state")
    p.add_argument("--x0", choices=("zero", "nonzero"),
                   help="data-driven routing; default follows the data's meta.json")
    p.add_argument("--x0-vector", help="initial state for model-based methods")
    p.add_argument("--x0-file")
    p.add_argument("--T", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--rank-rule", choices=("stacked", "tolerance"), default="stacked")
    p.add_argument("--out", default=".", help="directory for u.csv and report.json")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("experiment", help="run control experiments and store the data")
    p.add_argument("--system")
    p.add_argument("--random-system", nargs=2, type=int, metavar=("N_STATES", "N_INPUTS"))
    p.add_argument("--output-matrix", help="row-major entries of C, comma-separated")
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--N", type=int)
    p.add_argument("--inputs", choices=("iid", "identity"), default="iid")
    p.add_argument("--x0-vector")
    p.add_argument("--x0-file")
    p.add_argument("--sigma", type=float, help="Gaussian measurement noise std")
    p.add_argument("--eps", type=float, help="uniform measurement noise half-width")
    p.add_argument("--noise-on", choices=("inputs", "states", "both"), default="both")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("bench", help="run a benchmark study")
    p.add_argument("study", choices=tuple(_STUDY_NAMES))
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--sweep", help="comma-separated sweep values")
    p.add_argument("--methods", help="comma-separated method names")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--rank-rule", choices=("stacked", "tolerance"), default="stacked")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("ctrb", help="dump C_T, W_T and C_{O,T} for a system")
    p.add_argument("--system", required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ctrb)

    p = sub.add_parser("simulate", help="simulate a system under a stacked input")
    p.add_argument("--system", required=True)
    p.add_argument("--u", help="stacked input [u(T-1); ...; u(0)], comma-separated")
    p.add_argument("--u-file")
    p.add_argument("--x0-vector")
    p.add_argument("--x0-file")
    p.add_argument("--T", type=int)
    p.add_argument("--out", help="CSV for the (T+1) x n state sequence")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(_sys.stderr)
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE
    except AssumptionViolatedError as exc:
        print(f"assumption violated: {exc}", file=_sys.stderr)
        return EXIT_ASSUMPTION
    except RefusedError as exc:
        print(f"refused: {exc}", file=_sys.stderr)
        return EXIT_REFUSED
    except ConfigurationError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE
    except (InvalidInputError, OSError, json.JSONDecodeError) as exc:
        print(f"invalid input: {exc}", file=_sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    _sys.exit(main())
