"""Command-line entry points.

Subcommands: generate (query design), answer (noisy answers for a truth),
infer (four-phase decoding), ml (exhaustive reference decoder), limit
(recovery threshold as JSON), experiment (error-rate sweep to CSV, with an
optional rendered figure), and plot (figure from existing CSVs).

Data goes to --out or stdout; diagnostics go to stderr.  Exit codes: 0 on
success, 1 for invalid usage, configs, or inputs, 2 for IO and runtime
failures.  A --seed flag overrides a config-file seed; commands that draw
randomness fail without one.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace

import numpy as np

from .harness import ExperimentConfig, run_experiment, write_csv
from .infer import InferenceConfig
from .infer import run as infer_run
from .limits import xor_limit
from .model import (
    LAMBDA_DEFAULT,
    ConfigError,
    DegreeDistribution,
    LabelVector,
    read_labels,
    read_query_file,
    read_reliability_csv,
    write_labels,
    write_query_file,
    write_reliability_csv,
)
from .noise import NoiseSpec, answer_queries, build_reliability
from .oracle import ml_decode
from .querygen import QueryGenConfig, generate_queries
from .report import plot_csv_files, plot_error_curves

__all__ = ["CliInvocation", "parse", "dispatch", "main"]


@dataclass(frozen=True)
class CliInvocation:
    """Parsed command line, normalized across subcommands."""

    command: str | None
    config: str | None = None
    queries: str | None = None
    answers: str | None = None
    out: str | None = None
    seed: int | None = None
    threads: int | None = None
    reliability: str | None = None
    eps_out: str | None = None
    figure: str | None = None
    timing: bool = False
    labels: str | None = None
    title: str | None = None
    inputs: tuple[str, ...] = ()


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="xorcrowd", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--seed", type=int, help="overrides the config seed")
        return p

    p = add("generate", "draw a query graph from a design config")
    p.add_argument("--config", required=True, help="query design JSON")

    p = add("answer", "draw noisy answers for a truth file")
    p.add_argument("--config", required=True, help="noise + truth JSON")
    p.add_argument("--queries", required=True, help="query file")

    p = add("infer", "four-phase decoding of a query/answer pair")
    p.add_argument("--config", help="inference JSON (default: iterative 10+10)")
    p.add_argument("--queries", required=True, help="query file")
    p.add_argument("--answers", required=True, help="answer file")
    p.add_argument("--eps-out", help="write estimated error rates as CSV here")

    p = add("ml", "exhaustive maximum-likelihood decoding (m <= 20)")
    p.add_argument("--queries", required=True, help="query file")
    p.add_argument("--answers", required=True, help="answer file")
    p.add_argument("--reliability", required=True, help="worker,degree,eps_hat CSV")

    p = add("limit", "recovery threshold for a design, as JSON")
    p.add_argument("--config", required=True, help="design + noise JSON")

    p = add("experiment", "error-rate sweep over query budgets, as CSV")
    p.add_argument("--config", required=True, help="experiment JSON")
    p.add_argument("--threads", type=int, help="trial parallelism (default: cores)")
    p.add_argument("--figure", help="also render the curves to this image")
    p.add_argument(
        "--timing",
        action="store_true",
        help="record wall times in the CSV (breaks byte-reproducibility)",
    )

    p = sub.add_parser("plot", help="render curves from result CSVs")
    p.add_argument("inputs", nargs="+", metavar="CSV", help="result files")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--labels", help="comma-separated legend labels")
    p.add_argument("--title", help="figure title")

    return parser


def parse(argv=None) -> CliInvocation:
    args = build_parser().parse_args(argv)
    fields = {
        k: v for k, v in vars(args).items() if k in CliInvocation.__dataclass_fields__
    }
    if "inputs" in fields and fields["inputs"] is not None:
        fields["inputs"] = tuple(fields["inputs"])
    return CliInvocation(**fields)


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return data


def _resolve_seed(flag: int | None, config: int | None) -> int:
    if flag is not None:
        return flag
    if config is not None:
        return config
    raise ConfigError("no seed given: pass --seed or set 'seed' in the config")


def _write_out(out: str | None, writer) -> None:
    if out is None:
        writer(sys.stdout)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            writer(fh)


def _cmd_generate(inv: CliInvocation) -> None:
    cfg = QueryGenConfig.from_dict(_load_json(inv.config))
    seed = _resolve_seed(inv.seed, cfg.seed)
    graph = generate_queries(cfg, rng=np.random.default_rng(seed))
    _write_out(inv.out, lambda fh: write_query_file(fh, graph))


def _cmd_answer(inv: CliInvocation) -> None:
    data = _load_json(inv.config)
    if "noise" not in data:
        raise ConfigError("answer config needs a 'noise' object")
    graph, _ = read_query_file(inv.queries)
    if "truth_path" in data:
        truth = read_labels(data["truth_path"])
    elif "truth" in data:
        truth = LabelVector(np.asarray(data["truth"], dtype=np.int8))
    else:
        raise ConfigError("answer config needs 'truth_path' or an inline 'truth'")
    lam = float(data.get("lambda", LAMBDA_DEFAULT))
    reliability = build_reliability(
        NoiseSpec.from_dict(data["noise"]), graph.w, graph.max_degree, lam
    )
    seed = _resolve_seed(inv.seed, data.get("seed"))
    answers = answer_queries(truth, graph, reliability, np.random.default_rng(seed))
    _write_out(inv.out, lambda fh: write_query_file(fh, graph, answers))


def _read_pair(inv: CliInvocation):
    graph, _ = read_query_file(inv.queries)
    answer_graph, answers = read_query_file(inv.answers, m=graph.m, w=graph.w)
    if answers is None:
        raise ConfigError(f"{inv.answers}: records carry no answers")
    if answer_graph != graph:
        raise ConfigError("query and answer files describe different graphs")
    return graph, answers


def _cmd_infer(inv: CliInvocation) -> None:
    data = _load_json(inv.config) if inv.config else {}
    cfg = InferenceConfig.from_dict(data)
    graph, answers = _read_pair(inv)
    seed = _resolve_seed(inv.seed, data.get("seed"))
    result = infer_run(answers, graph, cfg, np.random.default_rng(seed))
    _write_out(inv.out, lambda fh: write_labels(fh, result.final))
    if inv.eps_out:
        with open(inv.eps_out, "w", encoding="utf-8") as fh:
            write_reliability_csv(fh, result.eps_hat)


def _cmd_ml(inv: CliInvocation) -> None:
    graph, answers = _read_pair(inv)
    reliability = read_reliability_csv(inv.reliability)
    seed = _resolve_seed(inv.seed, None)
    report = ml_decode(answers, graph, reliability, np.random.default_rng(seed))
    payload = {
        "best": [int(v) for v in report.best.values],
        "log_likelihood": report.log_likelihood,
        "tie_count": report.tie_count,
    }
    _write_out(inv.out, lambda fh: fh.write(json.dumps(payload, indent=2) + "\n"))


def _cmd_limit(inv: CliInvocation) -> None:
    data = _load_json(inv.config)
    try:
        m = int(data["m"])
        w = int(data["w"])
        phi = DegreeDistribution(data["phi"])
        noise = NoiseSpec.from_dict(data["noise"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad limit config: {exc}") from exc
    lam = float(data.get("lambda", LAMBDA_DEFAULT))
    reliability = build_reliability(noise, w, phi.D, lam)
    report = xor_limit(
        m,
        phi,
        reliability,
        eta=float(data.get("eta", 0.0)),
        side=str(data.get("side", "upper")).lower(),
    )
    _write_out(inv.out, lambda fh: fh.write(json.dumps(report.to_dict(), indent=2) + "\n"))


def _cmd_experiment(inv: CliInvocation) -> None:
    cfg = ExperimentConfig.from_dict(_load_json(inv.config))
    cfg = replace(cfg, seed=_resolve_seed(inv.seed, cfg.seed))
    rows = run_experiment(cfg, threads=inv.threads)
    if not inv.timing:
        # wall times vary run to run; zero them so equal seeds give equal bytes
        rows = [replace(r, wall_time_s=0.0) for r in rows]
    _write_out(inv.out, lambda fh: write_csv(rows, fh))
    if inv.figure:
        plot_error_curves({cfg.decoder: rows}, inv.figure)


def _cmd_plot(inv: CliInvocation) -> None:
    labels = inv.labels.split(",") if inv.labels else None
    plot_csv_files(inv.inputs, inv.out, labels=labels, title=inv.title)


_HANDLERS = {
    "generate": _cmd_generate,
    "answer": _cmd_answer,
    "infer": _cmd_infer,
    "ml": _cmd_ml,
    "limit": _cmd_limit,
    "experiment": _cmd_experiment,
    "plot": _cmd_plot,
}


def dispatch(inv: CliInvocation) -> int:
    """Run one parsed invocation; returns the process exit status."""
    if inv.command is None:
        build_parser().print_usage(sys.stderr)
        print("xorcrowd: error: a subcommand is required", file=sys.stderr)
        return 1
    handler = _HANDLERS[inv.command]
    try:
        handler(inv)
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"xorcrowd {inv.command}: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"xorcrowd {inv.command}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - unexpected runtime failure
        print(f"xorcrowd {inv.command}: unexpected failure: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> int:
    try:
        inv = parse(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    return dispatch(inv)


if __name__ == "__main__":
    sys.exit(main())
