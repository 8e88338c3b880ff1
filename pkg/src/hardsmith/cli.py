"""Command-line interface: ``hardsmith <command> [flags]``.

Exit codes: 0 success, 2 usage/configuration, 3 I/O, 4 evaluator failure.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import checkpoint
from .analysis import diversity_report, mine_frequent_subgraphs, patterns_csv
from .baselines import GAConfig, ga_search, random_search, rule_based_er
from .graph import GraphFormatError, read_graph6, to_graph6, write_graph6
from .hardness import (
    ConfigurationError,
    CounterEvaluator,
    EvaluationCounter,
    EvaluationError,
    ExternalEvaluator,
    FunctionEvaluator,
    RatioConfig,
    RatioEvaluator,
    TimeEvaluator,
    edge_count,
)
from .policy import PolicyConfig, sample_graphs
from .trainer import TrainConfig, TrainingAborted, calibrate_pstar, train

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_EVAL = 0, 2, 3, 4
SOLVER_CHOICES = ("dsatur3", "vc_bb", "bk_clique", "vc_ratio", "edges")
COMPARE_METHODS = ("hisampler-per", "hisampler-vanilla", "ga", "random", "cheeseman", "hogg")


class UsageError(Exception):
    pass


class RunDirError(OSError):
    pass


# -- configuration ------------------------------------------------------------

# (section, key, type, default); flags use the key with '_' -> '-'
TRAIN_KEYS = [
    ("evaluator", "solver", str, "dsatur3"),
    ("evaluator", "max_calls", int, None),
    ("evaluator", "time_unit", int, None),
    ("evaluator", "time_repeats", int, 3),
    ("evaluator", "external", str, None),
    ("evaluator", "timeout", float, 60.0),
    ("evaluator", "timeout_ceiling", float, None),
    ("evaluator", "ratio_scale", float, 10.0),
    ("policy", "n", int, None),
    ("policy", "pstar", float, 0.5),
    ("policy", "lr", float, 1e-4),
    ("policy", "layer_dims", str, None),
    ("policy", "dtype", str, "float64"),
    ("train", "mode", str, "per"),
    ("train", "budget", int, 10000),
    ("train", "pool_size", int, 10),
    ("train", "transform", str, "identity"),
    ("train", "seed", int, 0),
    ("train", "strict_paper", bool, False),
    ("train", "checkpoint_every", int, None),
]


def _parse_value(kind, text):
    if kind is bool:
        return str(text).strip().lower() in ("1", "true", "yes", "on")
    return kind(text)


def resolve_config(args: argparse.Namespace, keys=TRAIN_KEYS) -> dict:
    """Defaults, then the ``--config`` file, then explicit flags."""
    cfg = {key: default for _, key, _, default in keys}
    if getattr(args, "config", None):
        parser = configparser.ConfigParser()
        try:
            with open(args.config) as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise RunDirError(f"cannot read config {args.config}: {exc}") from exc
        except configparser.Error as exc:
            raise UsageError(f"malformed config {args.config}: {exc}") from exc
        known = {(s, k): t for s, k, t, _ in keys}
        for section in parser.sections():
            for key, text in parser.items(section):
                if (section, key) not in known:
                    raise UsageError(f"unknown config key [{section}] {key}")
                try:
                    cfg[key] = _parse_value(known[(section, key)], text)
                except ValueError:
                    raise UsageError(f"bad value for [{section}] {key}: {text!r}") from None
    for _, key, _, _ in keys:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def config_text(cfg: dict, keys=TRAIN_KEYS) -> str:
    sections: dict[str, list[str]] = {}
    for sec, key, _, _ in keys:
        if cfg.get(key) is not None:
            sections.setdefault(sec, []).append(f"{key} = {cfg[key]}")
    return "\n\n".join(f"[{sec}]\n" + "\n".join(lines) for sec, lines in sections.items()) + "\n"


def config_hash(cfg: dict) -> str:
    canon = json.dumps({k: cfg[k] for k in sorted(cfg)}, sort_keys=True, default=str)
    return hashlib.sha256(canon.encode()).hexdigest()


def _layer_dims(text, n):
    if not text:
        return None
    hidden = tuple(int(x) for x in str(text).split(",") if x.strip())
    return hidden + (n * (n - 1) // 2,)


def build_evaluator(cfg: dict, counter: EvaluationCounter | None = None):
    solver = cfg.get("solver")
    if cfg.get("external"):
        return ExternalEvaluator(cfg["external"], cfg.get("timeout", 60.0),
                                 cfg.get("timeout_ceiling"), counter=counter)
    if solver not in SOLVER_CHOICES:
        raise UsageError(f"unknown solver {solver!r}; choose from {', '.join(SOLVER_CHOICES)}")
    if solver == "edges":
        return FunctionEvaluator(edge_count, "edges", counter=counter)
    if solver == "vc_ratio":
        return RatioEvaluator(RatioConfig(scale=cfg.get("ratio_scale", 10.0)),
                              undefined_value=0.0, counter=counter)
    if cfg.get("time_unit") is not None:
        return TimeEvaluator(solver, cfg["time_unit"], cfg.get("time_repeats", 3),
                             counter=counter)
    return CounterEvaluator(solver, cfg.get("max_calls"), counter=counter)


# -- run directories ----------------------------------------------------------

@dataclass
class RunManifest:
    command: str
    config_hash: str
    seed: int | None
    mode: str | None
    evaluator: str
    n: int | None
    p_star: float | None
    budget: int | None
    started: str
    finished: str | None = None
    status: str = "running"
    evaluations: int = 0
    artifacts: dict = field(default_factory=dict)

    def write(self, run_dir: Path) -> None:
        (run_dir / "manifest.json").write_text(json.dumps(asdict(self), indent=2) + "\n")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def prepare_run_dir(path: str | None, command: str, chash: str) -> Path:
    if path is None:
        root = Path(os.environ.get("HARDSMITH_RUNS_DIR", "runs"))
        stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S")
        path = root / f"{command}-{stamp}-{chash[:8]}"
    run_dir = Path(path)
    if run_dir.exists() and any(run_dir.iterdir()):
        raise RunDirError(f"run directory {run_dir} is not empty")
    run_dir.mkdir(parents=True, exist_ok=True)
    return run_dir


def _grid(text: str) -> list[float]:
    try:
        if ":" in text:
            lo, hi, step = (float(x) for x in text.split(":"))
            count = int(round((hi - lo) / step)) + 1
            return [round(lo + k * step, 10) for k in range(count)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad grid {text!r}; use lo:hi:step or a comma list") from None


# -- commands -------------------------------------------------------------------

def cmd_calibrate(args) -> int:
    cfg = resolve_config(args)
    if cfg["n"] is None:
        raise UsageError("--n is required")
    evaluator = build_evaluator(cfg)
    grid = _grid(args.grid)
    chash = config_hash(dict(cfg, grid=grid, samples=args.samples))
    run_dir = prepare_run_dir(args.run_dir, "calibrate", chash)
    manifest = RunManifest("calibrate", chash, cfg["seed"], None, evaluator.ident, cfg["n"],
                           None, None, _now())
    result = calibrate_pstar(cfg["n"], evaluator, grid, args.samples, cfg["seed"])
    lines = ["p,hardest"] + [f"{p!r},{h!r}" for p, h in zip(result.grid, result.hardest)]
    (run_dir / "calibration.csv").write_text("\n".join(lines) + "\n")
    (run_dir / "pstar.txt").write_text(f"{result.p_star!r}\n")
    manifest.p_star = result.p_star
    manifest.evaluations = result.evaluations
    manifest.status, manifest.finished = "ok", _now()
    manifest.artifacts = {"pstar": "pstar.txt", "calibration": "calibration.csv"}
    manifest.write(run_dir)
    print(result.p_star)
    return EXIT_OK


def _train_config(cfg: dict, mode: str | None = None, seed: int | None = None) -> TrainConfig:
    if cfg["n"] is None:
        raise UsageError("--n is required")
    try:
        pol = PolicyConfig(cfg["n"], _layer_dims(cfg["layer_dims"], cfg["n"]), cfg["lr"],
                           cfg["pstar"], cfg["dtype"])
        return TrainConfig(pol, cfg["budget"], cfg["pool_size"], mode or cfg["mode"],
                           cfg["transform"], cfg["seed"] if seed is None else seed,
                           cfg["strict_paper"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_train(args) -> int:
    cfg = resolve_config(args)
    tcfg = _train_config(cfg)
    evaluator = build_evaluator(cfg)
    chash = config_hash(cfg)
    run_dir = prepare_run_dir(args.run_dir, "train", chash)
    (run_dir / "config.ini").write_text(config_text(cfg))
    ckpt_dir = run_dir / "checkpoints"
    ckpt_dir.mkdir()
    every = cfg["checkpoint_every"] or max(1, tcfg.budget // 20)
    manifest = RunManifest("train", chash, tcfg.seed, tcfg.mode, evaluator.ident, cfg["n"],
                           cfg["pstar"], tcfg.budget, _now())
    manifest.write(run_dir)

    def on_iteration(it, params, log):
        if (it + 1) % every == 0 and it + 1 < tcfg.budget:
            checkpoint.save(params, ckpt_dir / f"iter_{it + 1:07d}.ckpt")

    def finish(params, log, status):
        log.write_csv(run_dir / "log.csv")
        checkpoint.save(params, run_dir / "final.ckpt")
        artifacts = {"log": "log.csv", "checkpoint": "final.ckpt", "config": "config.ini",
                     "checkpoints": "checkpoints/"}
        if log.best_graph is not None:
            (run_dir / "best.g6").write_text(to_graph6(log.best_graph) + "\n")
            (run_dir / "best.json").write_text(json.dumps({
                "reward": log.best_reward, "iteration": log.best_iteration,
                "evaluator": evaluator.ident, "seed": tcfg.seed, "config_hash": chash,
                "method": f"hisampler-{tcfg.mode}",
            }, indent=2) + "\n")
            artifacts.update(best="best.g6", best_meta="best.json")
        manifest.status, manifest.finished = status, _now()
        manifest.evaluations = evaluator.counter.count
        manifest.artifacts = artifacts
        manifest.write(run_dir)

    try:
        params, log = train(tcfg, evaluator, on_iteration=on_iteration)
    except TrainingAborted as exc:
        finish(exc.params, exc.log, f"aborted: {exc.cause}")
        raise EvaluationError(str(exc)) from exc
    finish(params, log, "ok")
    print(f"best reward {log.best_reward!r} at iteration {log.best_iteration}; run dir {run_dir}")
    return EXIT_OK


def _read_graphs(path: str):
    if path == "-":
        return list(read_graph6(sys.stdin))
    try:
        with open(path) as fh:
            return list(read_graph6(fh))
    except OSError as exc:
        raise RunDirError(f"cannot read {path}: {exc}") from exc


def cmd_sample(args) -> int:
    try:
        params = checkpoint.load(args.checkpoint)
    except checkpoint.CheckpointError as exc:
        raise RunDirError(str(exc)) from exc
    graphs = sample_graphs(params, args.count, np.random.default_rng(args.seed))
    try:
        with open(args.out, "w") as fh:
            write_graph6(graphs, fh)
    except OSError as exc:
        raise RunDirError(f"cannot write {args.out}: {exc}") from exc
    print(f"wrote {len(graphs)} graphs to {args.out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = resolve_config(args)
    evaluator = build_evaluator(cfg)
    graphs = _read_graphs(args.input)
    reports = [evaluator(g) for g in graphs]
    if args.value_only:
        for rep in reports:
            print(repr(rep.value))
        return EXIT_OK
    rows = ["index,graph6,n,edges,value,kind"]
    rows += [f"{k},{to_graph6(g)},{g.n},{g.num_edges},{rep.value!r},{rep.kind}"
             for k, (g, rep) in enumerate(zip(graphs, reports))]
    text = "\n".join(rows) + "\n"
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise RunDirError(f"cannot write {args.out}: {exc}") from exc
    else:
        sys.stdout.write(text)
    return EXIT_OK


def run_method(method: str, cfg: dict, seed: int, evaluator):
    """Best graph, best reward and log CSV of one comparison method under the shared budget."""
    n, budget, pstar = cfg["n"], cfg["budget"], cfg["pstar"]
    if method in ("hisampler-per", "hisampler-vanilla"):
        _, log = train(_train_config(cfg, method.split("-")[1], seed), evaluator)
        return log.best_graph, log.best_reward, log.to_csv()
    if method == "ga":
        res = ga_search(n, GAConfig(), budget, evaluator, seed, init_p=pstar)
    elif method == "random":
        res = random_search(n, pstar, budget, evaluator, seed)
    elif method in ("cheeseman", "hogg"):
        res = rule_based_er(method, n, budget, evaluator, seed)
    else:
        raise UsageError(f"unknown method {method!r}")
    lines = ["iteration,reward,best_so_far"]
    lines += [f"{k},{r!r},{b!r}" for k, (r, b) in
              enumerate(zip(res.rewards, res.best_so_far().tolist()))]
    return res.best_graph, res.best_reward, "\n".join(lines) + "\n"


def cmd_compare(args) -> int:
    cfg = resolve_config(args)
    if cfg["n"] is None:
        raise UsageError("--n is required")
    methods = args.methods.split(",") if args.methods else list(COMPARE_METHODS)
    for m in methods:
        if m not in COMPARE_METHODS:
            raise UsageError(f"unknown method {m!r}; choose from {', '.join(COMPARE_METHODS)}")
    seeds = [cfg["seed"] + k for k in range(args.seeds)]
    chash = config_hash(dict(cfg, methods=methods, seeds=seeds))
    run_dir = prepare_run_dir(args.run_dir, "compare", chash)
    build_evaluator(cfg)  # fail fast on a bad evaluator before any work
    rows = []
    ident = ""
    for method in methods:
        bests = []
        for seed in seeds:
            evaluator = build_evaluator(cfg)
            ident = evaluator.ident
            t0 = time.perf_counter()
            graph, reward, log_csv = run_method(method, cfg, seed, evaluator)
            bests.append(reward)
            stem = f"{method}_seed{seed}"
            (run_dir / f"best_{stem}.g6").write_text(to_graph6(graph) + "\n")
            (run_dir / f"best_{stem}.json").write_text(json.dumps({
                "method": method, "seed": seed, "reward": reward,
                "evaluator": evaluator.ident, "config_hash": chash}, indent=2) + "\n")
            (run_dir / f"log_{stem}.csv").write_text(log_csv)
            if evaluator.counter.count != cfg["budget"]:
                raise EvaluationError(f"{method} used {evaluator.counter.count} evaluations, "
                                      f"expected {cfg['budget']}")
            rows.append((method, seed, reward, time.perf_counter() - t0))
        rows.append((method, "mean", float(np.mean(bests)), None))

    csv_lines = ["method,seed,best_hardness,seconds"]
    for method, seed, reward, secs in rows:
        csv_lines.append(f"{method},{seed},{reward!r},{'' if secs is None else f'{secs:.3f}'}")
    (run_dir / "results.csv").write_text("\n".join(csv_lines) + "\n")
    width = max(len(m) for m in methods)
    table = [f"{'method':<{width}}  {'mean best hardness':>20}"]
    table += [f"{m:<{width}}  {r:>20.1f}" for m, s, r, _ in rows if s == "mean"]
    text = "\n".join(table) + "\n"
    (run_dir / "results.txt").write_text(text)
    RunManifest("compare", chash, cfg["seed"], None, ident, cfg["n"], cfg["pstar"],
                cfg["budget"], _now(), _now(), "ok", cfg["budget"] * len(methods) * len(seeds),
                {"results": "results.csv", "table": "results.txt"}).write(run_dir)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_analyze(args) -> int:
    cfg = resolve_config(args)
    source = Path(args.source)
    ckpt_path = source / "final.ckpt" if source.is_dir() else source
    try:
        params = checkpoint.load(ckpt_path)
    except checkpoint.CheckpointError as exc:
        raise RunDirError(str(exc)) from exc
    ref_path = args.reference or (source / "best.g6" if source.is_dir() else None)
    if ref_path is None:
        raise UsageError("--reference is required when analysing a bare checkpoint")
    refs = _read_graphs(str(ref_path))
    if len(refs) != 1:
        raise UsageError(f"reference file must hold exactly one graph, found {len(refs)}")
    reference = refs[0]
    evaluator = build_evaluator(cfg)
    samples = sample_graphs(params, args.count, np.random.default_rng(cfg["seed"]))
    rewards = [evaluator(g).value for g in samples]
    chash = config_hash(dict(cfg, source=str(source), count=args.count))
    run_dir = prepare_run_dir(args.run_dir, "analyze", chash)
    with open(run_dir / "samples.g6", "w") as fh:
        write_graph6(samples, fh)
    report = diversity_report(samples, rewards, reference, args.threshold)
    (run_dir / "diversity.csv").write_text(report.to_csv())
    summary = {k: getattr(report, k) for k in ("threshold", "count_below", "mean_jaccard",
                                                 "mean_reward", "max_reward",
                                                 "max_reward_jaccard")}
    summary["defined"] = report.defined
    summary["mean_jaccard_all"] = float(np.mean(report.jaccards))
    (run_dir / "diversity_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    min_support = args.min_support or max(1, int(0.95 * len(samples)))
    patterns = mine_frequent_subgraphs(samples, args.max_edges, min_support)
    (run_dir / "patterns.csv").write_text(patterns_csv(patterns))
    RunManifest("analyze", chash, cfg["seed"], None, evaluator.ident, reference.n, None, None,
                _now(), _now(), "ok", evaluator.counter.count,
                {"samples": "samples.g6", "diversity": "diversity.csv",
                 "summary": "diversity_summary.json", "patterns": "patterns.csv"}
                ).write(run_dir)
    print(json.dumps(summary))
    print(f"{len(patterns)} patterns with support >= {min_support}")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def _add_evaluator_flags(p):
    g = p.add_argument_group("evaluator")
    g.add_argument("--solver", choices=SOLVER_CHOICES, default=None,
                   help="hardness source (default dsatur3)")
    g.add_argument("--max-calls", dest="max_calls", type=int,
                   help="cap on recursive calls; capped runs score the cap")
    g.add_argument("--time-unit", dest="time_unit", type=int,
                   help="score wall-clock time in units of 10^EXP seconds instead of calls")
    g.add_argument("--time-repeats", dest="time_repeats", type=int)
    g.add_argument("--external", help="command reading graph6 on stdin, printing a number")
    g.add_argument("--timeout", type=float)
    g.add_argument("--timeout-ceiling", dest="timeout_ceiling", type=float)
    g.add_argument("--ratio-scale", dest="ratio_scale", type=float)


def _add_train_flags(p):
    p.add_argument("--config", help="key=value config file with [evaluator]/[policy]/[train]")
    p.add_argument("--n", type=int)
    p.add_argument("--pstar", type=float)
    p.add_argument("--lr", type=float)
    p.add_argument("--layer-dims", dest="layer_dims", help="hidden dims, e.g. 10,100,500")
    p.add_argument("--dtype", choices=("float32", "float64"))
    p.add_argument("--mode", choices=("per", "vanilla"))
    p.add_argument("--budget", type=int)
    p.add_argument("--pool-size", dest="pool_size", type=int)
    p.add_argument("--transform", choices=("identity", "log1p", "normalize"))
    p.add_argument("--seed", type=int)
    p.add_argument("--strict-paper", dest="strict_paper", action="store_true", default=None,
                   help="PER: weight replayed gradients by the fresh reward")
    p.add_argument("--checkpoint-every", dest="checkpoint_every", type=int)
    p.add_argument("--run-dir", dest="run_dir")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hardsmith",
                                     description="Learn distributions of hard graph instances.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="find the hardest ER edge probability")
    _add_train_flags(p)
    _add_evaluator_flags(p)
    p.add_argument("--grid", default="0.01:0.99:0.01")
    p.add_argument("--samples", type=int, default=10, help="graphs per grid point")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("train", help="train a sampler")
    _add_train_flags(p)
    _add_evaluator_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sample", help="draw graphs from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("evaluate", help="score graph6 graphs")
    p.add_argument("--input", required=True, help="graph6 file, or - for stdin")
    p.add_argument("--out", help="CSV destination (default stdout)")
    p.add_argument("--value-only", dest="value_only", action="store_true",
                   help="print one bare value per graph")
    p.add_argument("--config")
    _add_evaluator_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="run baselines and samplers under equal budget")
    _add_train_flags(p)
    _add_evaluator_flags(p)
    p.add_argument("--methods", help=f"comma list from {','.join(COMPARE_METHODS)}")
    p.add_argument("--seeds", type=int, default=1)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("analyze", help="diversity and frequent-pattern reports")
    p.add_argument("source", help="train run directory or checkpoint file")
    p.add_argument("--reference", help="graph6 file with the reference instance")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--threshold", type=float, default=0.7)
    p.add_argument("--max-edges", dest="max_edges", type=int, default=5)
    p.add_argument("--min-support", dest="min_support", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.add_argument("--run-dir", dest="run_dir")
    _add_evaluator_flags(p)
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigurationError) as exc:
        print(f"hardsmith {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, GraphFormatError, checkpoint.CheckpointError) as exc:
        print(f"hardsmith {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (EvaluationError, TrainingAborted) as exc:
        print(f"hardsmith {args.command}: evaluator failure: {exc}", file=sys.stderr)
        return EXIT_EVAL


if __name__ == "__main__":
    sys.exit(main())
