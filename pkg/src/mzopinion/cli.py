"""Command-line entry point: ``python -m mzopinion <command> ...``.

Every command accepts ``--seed``, ``--config`` (a JSON object whose keys
mirror the long flag names with dashes replaced by underscores) and
``--out`` (output directory). Flags given on the command line override the
config file. On failure a single JSON line ``{"error": ..., "type": ...}`` is
written to stderr and the exit status is nonzero.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path


from . import experiments, fileio, henon, sinar

EXIT_USAGE = 2
EXIT_FAILURE = 1


class CliError(Exception):
    """Bad arguments or configuration."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _float_list(s: str) -> list:
    return [float(v) for v in s.split(",") if v.strip()]


def _int_list(s: str) -> list:
    out = []
    for part in s.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", type=Path, default=None, help="JSON config file")
    p.add_argument("--out", type=Path, default=None, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mzopinion", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def ensemble_flags(p):
        p.add_argument("--case", choices=sorted(experiments.CASES), default=None)
        p.add_argument("--network", choices=["complete", "clustered"], default=None)
        p.add_argument("--n-agents", type=int, default=None)
        p.add_argument("--n-clusters", type=int, default=None)
        p.add_argument("--p-between", type=float, default=None)
        p.add_argument("--alpha", type=Path, default=None, help="M x M adaption matrix CSV")
        p.add_argument("--x0", default=None,
                       help="JSON list: global percentages or one row per cluster")
        p.add_argument("--T", type=int, default=None)
        p.add_argument("--r", type=int, default=None)

    p = sub.add_parser("simulate", help="simulate an ABM ensemble")
    _shared(p)
    ensemble_flags(p)
    p.add_argument("--micro", action="store_true", default=None,
                   help="also write agent-level CSVs")

    p = sub.add_parser("fit", help="fit NAR models to trajectory CSVs")
    _shared(p)
    p.add_argument("trajectories", nargs="*", type=Path)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--lambdas", type=_float_list, default=None, help="comma-separated")
    p.add_argument("--dictionary", choices=["opinion", "linear", "quadratic", "henon"],
                   default=None)
    p.add_argument("--method", choices=list(sinar.FIT_METHODS), default=None)
    p.add_argument("--keep-last", action="store_true", default=None,
                   help="keep the last column (dropped by default as redundant)")

    p = sub.add_parser("predict", help="roll a fitted model forward")
    _shared(p)
    p.add_argument("--model", type=Path, default=None)
    p.add_argument("--history", type=Path, default=None,
                   help="trajectory CSV; its last p rows seed the rollout")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--keep-last", action="store_true", default=None)

    p = sub.add_parser("sweep", help="memory-depth sweep on a simulated ensemble")
    _shared(p)
    ensemble_flags(p)
    p.add_argument("--train", type=int, default=None)
    p.add_argument("--p-values", type=_int_list, default=None, help="e.g. 1-10 or 1,2,5")
    p.add_argument("--lambdas", type=_float_list, default=None)
    p.add_argument("--block-len", type=int, default=None)
    p.add_argument("--method", choices=list(sinar.FIT_METHODS), default=None)

    p = sub.add_parser("henon", help="extended Hénon benchmark")
    _shared(p)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--p-values", type=_int_list, default=None)
    p.add_argument("--lam", type=float, default=None)
    p.add_argument("--T-train", type=int, default=None)
    p.add_argument("--attractor-p", type=_int_list, default=None,
                   help="depths whose reconstructed attractors are exported")

    p = sub.add_parser("appendix-c", help="uncoupled two-cluster experiments")
    _shared(p)
    p.add_argument("--variant", choices=["symmetric", "nonsymmetric", "linear"], default=None)
    p.add_argument("--p-values", type=_int_list, default=None)
    p.add_argument("--T", type=int, default=None)
    p.add_argument("--n-train", type=int, default=None)
    p.add_argument("--lambda1", type=float, default=None)
    p.add_argument("--lambda2", type=float, default=None)

    p = sub.add_parser("hausdorff", help="Hausdorff distance between two point CSVs")
    _shared(p)
    p.add_argument("first", type=Path, nargs="?")
    p.add_argument("second", type=Path, nargs="?")
    p.add_argument("--method", choices=["brute", "kdtree"], default=None)
    return parser


DEFAULTS = {
    "simulate": {"case": "complete", "seed": 0, "out": "out", "micro": False},
    "fit": {"p": 1, "lambdas": [0.05], "dictionary": "opinion", "method": "stlsq",
            "keep_last": False, "seed": 0, "out": "out", "trajectories": []},
    "predict": {"steps": 100, "keep_last": False, "seed": 0, "out": "out"},
    "sweep": {"case": "complete", "seed": 0, "out": "out"},
    "henon": {"a": 1.3, "b": 0.3, "c": 0.3, "p_values": list(range(1, 31)), "lam": 0.0,
              "T_train": 920, "attractor_p": [], "seed": 0, "out": "out"},
    "appendix-c": {"variant": "symmetric", "p_values": [1, 2, 3, 4, 5], "T": 900,
                   "n_train": 500, "lambda1": 0.9, "lambda2": 0.5, "seed": 0, "out": "out"},
    "hausdorff": {"method": "kdtree", "seed": 0, "out": None},
}


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, then the config file, then explicit flags."""
    opts = dict(DEFAULTS[args.command])
    if args.config is not None:
        if not args.config.is_file():
            raise FileNotFoundError(f"config file not found: {args.config}")
        cfg = json.loads(args.config.read_text())
        if not isinstance(cfg, dict):
            raise CliError("config file must hold a JSON object")
        opts.update(cfg)
    for k, v in vars(args).items():
        if k in ("command", "config") or v is None:
            continue
        if isinstance(v, list) and not v and k in opts:
            continue
        opts[k] = v
    return opts


def _out_dir(opts) -> Path:
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _ensemble_config(opts) -> dict:
    cfg = experiments.case_config(opts.get("case") or "complete", seed=int(opts["seed"]))
    net = cfg["network"]
    if opts.get("network"):
        net["kind"] = opts["network"]
    for key in ("n_agents", "n_clusters", "p_between"):
        if opts.get(key) is not None:
            net[key] = opts[key]
    if net["kind"] == "complete":
        net.pop("n_clusters", None)
        net.pop("p_between", None)
    if opts.get("alpha") is not None:
        a = opts["alpha"]
        cfg["alpha"] = (fileio.read_matrix_csv(a).tolist() if isinstance(a, (str, Path))
                        else a)
    else:
        cfg["alpha"] = fileio.default_alpha().tolist()
    if opts.get("x0") is not None:
        cfg["x0"] = json.loads(opts["x0"]) if isinstance(opts["x0"], str) else opts["x0"]
    for key in ("T", "r", "train", "p_values", "lambdas", "block_len", "method"):
        if opts.get(key) is not None:
            cfg[key] = opts[key]
    return cfg


def cmd_simulate(opts) -> dict:
    cfg = _ensemble_config(opts)
    out = _out_dir(opts)
    _, _, res = experiments.simulate_config(cfg, keep_micro=bool(opts.get("micro")))
    files = []
    for i, macro in enumerate(res.macro):
        name = f"trajectory_{i:03d}.csv"
        fileio.write_trajectory_csv(out / name, macro)
        files.append(name)
        if res.micro is not None:
            mname = f"micro_{i:03d}.csv"
            fileio.write_micro_csv(out / mname, res.micro[i])
            files.append(mname)
    fileio.write_manifest(out / "manifest.json",
                          {"command": "simulate", "config": cfg, "files": files})
    return {"files": len(files), "out": str(out)}


def _dictionary(name: str, m: int, p: int) -> sinar.DictionarySpec:
    if name == "opinion":
        if m != 2:
            raise CliError(f"the opinion dictionary needs 2 observables, data has {m}")
        return sinar.opinion_dictionary(p)
    if name == "linear":
        return sinar.linear_dictionary(m, p)
    if name == "quadratic":
        return sinar.polynomial_dictionary(m, p, degree=2)
    if name == "henon":
        if m != 1:
            raise CliError(f"the Hénon dictionary needs 1 observable, data has {m}")
        return sinar.henon_dictionary(p)
    raise CliError(f"unknown dictionary {name!r}")


def _observable(x, keep_last: bool):
    return x if keep_last or x.shape[1] == 1 else x[:, :-1]


def cmd_fit(opts, stream=None) -> dict:
    stream = stream or sys.stdout
    paths = [Path(p) for p in opts["trajectories"]]
    if not paths:
        raise CliError("fit needs at least one trajectory file")
    trajs = [_observable(fileio.read_trajectory_csv(p), opts["keep_last"]) for p in paths]
    p = int(opts["p"])
    data = sinar.build_hankel(trajs, p)
    d = _dictionary(opts["dictionary"], trajs[0].shape[1], p)
    out = _out_dir(opts)
    written = []
    for lam in opts["lambdas"]:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sinar.RankDeficientWarning)
            model = sinar.fit(data, d, float(lam), method=opts["method"])
        name = f"model_p{p}_lam{lam:g}.json"
        sinar.save_model(model, out / name)
        written.append(name)
        print(f"# p={p} lambda={lam:g}", file=stream)
        print(sinar.format_model(model), file=stream)
    fileio.write_manifest(out / "manifest_fit.json",
                          {"command": "fit", "options": opts, "files": written})
    return {"files": len(written), "out": str(out)}


def cmd_predict(opts) -> dict:
    if opts.get("model") is None or opts.get("history") is None:
        raise CliError("predict needs --model and --history")
    model = sinar.load_model(opts["model"])
    hist = _observable(fileio.read_trajectory_csv(opts["history"]), opts["keep_last"])
    if hist.shape[0] < model.p:
        raise CliError(f"history has {hist.shape[0]} rows, model needs {model.p}")
    pred = sinar.rollout(model, hist[-model.p:], int(opts["steps"]))
    out = _out_dir(opts)
    fileio.write_trajectory_csv(out / "prediction.csv", pred)
    return {"steps": int(pred.shape[0]), "out": str(out)}


def cmd_sweep(opts) -> dict:
    cfg = _ensemble_config(opts)
    if not cfg["p_values"]:
        raise CliError("p-values must not be empty")
    out = _out_dir(opts)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sinar.RankDeficientWarning)
        res = experiments.run_sweep(cfg)
    res.to_csv(out / "sweep.csv")
    fileio.write_manifest(out / "manifest_sweep.json",
                          {"command": "sweep", "config": cfg, "files": ["sweep.csv"]})
    return {"cells": len(res.cells), "out": str(out)}


def cmd_henon(opts) -> dict:
    params = henon.HenonParams(opts["a"], opts["b"], opts["c"])
    out = _out_dir(opts)
    cells = henon.henon_recovery_experiment(params, opts["p_values"], lam=float(opts["lam"]),
                                            T_train=int(opts["T_train"]))
    fileio.write_table_csv(out / "henon_errors.csv",
                           ["p", "coefficient_error", "validation_error", "hausdorff"],
                           [[c.p, c.coefficient_error, c.validation_error, c.hausdorff]
                            for c in cells])
    files = ["henon_errors.csv"]
    if opts["attractor_p"]:
        x, _ = henon.simulate_henon(params, 1000 + 4000 - 1)
        x = x[1000:]
        train, truth = x[:1000], x[1000:4000]
        henon.save_attractor_csv(henon.delay_embed(truth, 2), out / "attractor_true.csv")
        files.append("attractor_true.csv")
        for p in opts["attractor_p"]:
            model = sinar.fit(sinar.build_hankel([train], p),
                              sinar.henon_dictionary(p), float(opts["lam"]))
            rec = sinar.rollout(model, train[-p:], truth.size)[:, 0]
            name = f"attractor_p{p}.csv"
            henon.save_attractor_csv(henon.delay_embed(rec, 2), out / name)
            files.append(name)
    fileio.write_manifest(out / "manifest_henon.json",
                          {"command": "henon", "options": opts, "files": files})
    return {"files": len(files), "out": str(out)}


def cmd_appendix_c(opts) -> dict:
    out = _out_dir(opts)
    variant = opts["variant"]
    if variant == "linear":
        res = experiments.linear_two_cluster_check(float(opts["lambda1"]),
                                                   float(opts["lambda2"]), T=int(opts["T"]))
        fileio.write_table_csv(out / "uncoupled_linear.csv",
                               ["c1", "c2", "max_abs_residual"],
                               [[res["c1"], res["c2"], res["max_abs_residual"]]])
        files = ["uncoupled_linear.csv"]
    else:
        rows = []
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sinar.RankDeficientWarning)
            for p in opts["p_values"]:
                r = experiments.uncoupled_experiment(variant, int(p), T=int(opts["T"]),
                                                     n_train=int(opts["n_train"]))
                rows.append([r.p, r.one_step_error, r.rollout_error])
        name = f"uncoupled_{variant}.csv"
        fileio.write_table_csv(out / name, ["p", "one_step_error", "rollout_error"], rows)
        fileio.write_trajectory_csv(out / f"uncoupled_{variant}_trajectory.csv", r.trajectory)
        files = [name, f"uncoupled_{variant}_trajectory.csv"]
    fileio.write_manifest(out / f"manifest_uncoupled_{variant}.json",
                          {"command": "appendix-c", "options": opts, "files": files})
    return {"files": len(files), "out": str(out)}


def cmd_hausdorff(opts, stream=None) -> dict:
    stream = stream or sys.stdout
    if opts.get("first") is None or opts.get("second") is None:
        raise CliError("hausdorff needs two point CSV files")
    d = henon.hausdorff_distance(fileio.read_points_csv(opts["first"]),
                                 fileio.read_points_csv(opts["second"]), opts["method"])
    print(f"{d:.17g}", file=stream)
    return {"distance": d}


COMMANDS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "sweep": cmd_sweep,
    "henon": cmd_henon,
    "appendix-c": cmd_appendix_c,
    "hausdorff": cmd_hausdorff,
}


def _fail(exc: BaseException, code: int) -> int:
    msg = " ".join(str(exc).split()) or type(exc).__name__
    print(json.dumps({"error": msg, "type": type(exc).__name__}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        opts = resolve(args)
    except CliError as exc:
        return _fail(exc, EXIT_USAGE)
    except (OSError, ValueError) as exc:
        return _fail(exc, EXIT_USAGE)
    try:
        COMMANDS[args.command](opts)
    except CliError as exc:
        return _fail(exc, EXIT_USAGE)
    except (OSError, ValueError, RuntimeError, NotImplementedError, KeyError) as exc:
        return _fail(exc, EXIT_FAILURE)
    return 0


if __name__ == "__main__":
    sys.exit(main())
