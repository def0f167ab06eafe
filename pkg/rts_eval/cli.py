# rts_eval/cli.py
from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional, Sequence

from rts_eval.config import DEFAULT_ALPHAS, EvalConfig, Windowing, normalize_mode, preset_for_year
from rts_eval.engine import evaluate_runs, rank_runs, window_gaps
from rts_eval.errors import GroundTruthInvalid, MissingEpochError, RtsEvalError, UsageError
from rts_eval.ingest import fmt6, write_report
from rts_eval.main import format_violations, load_ground_truth, load_runs, write_output
from rts_eval.models import ScoreReport, validate_ground_truth
from rts_eval.reusability import audit_epoch, compare_modes, compare_window_basis, leave_one_out, modes_to_tsv
from rts_eval.strategies import STRATEGY_NAMES
from rts_eval.strategies.sweep import sweep
from rts_eval.synth import SynthConfig, SynthSpec, default_systems, load_synth_config, write_synth

logger = logging.getLogger("rts_eval")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_DATA = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; usage errors here are 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _mode(value: str) -> str:
    try:
        return normalize_mode(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


# ----------------------------
# Shared flag groups
# ----------------------------

def _add_truth_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("ground truth")
    g.add_argument("--qrels", required=True, help="qrels file: profile Q0 tweet grade")
    g.add_argument("--clusters", required=True, help="clusters file: profile cluster tweet")
    g.add_argument("--epoch", required=True, help="epoch file: tweet epoch")
    g.add_argument(
        "--extra-epoch", action="append", default=[], metavar="FILE",
        help="supplementary epoch file merged into --epoch (repeatable)",
    )


def _add_run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--run", action="append", required=True, metavar="FILE",
        help="run file: profile tweet push_epoch [tag] (repeatable)",
    )


def _add_eval_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("evaluation")
    g.add_argument("--start-epoch", type=int, default=0, help="start of window 0 (UTC seconds)")
    g.add_argument("--window-seconds", type=int, default=86400, help="window length in seconds")
    g.add_argument("--windows", type=int, default=10, help="number of windows")
    g.add_argument("--cap", type=int, default=10, help="pushes per profile per day (N)")
    g.add_argument("--alpha", type=float, action="append", default=None, help=f"GMP alpha (repeatable, default {' '.join(map(str, DEFAULT_ALPHAS))})")
    g.add_argument("--mode", type=_mode, default="strict", help="strict | official-2016")
    g.add_argument("--window-basis", choices=["creation", "push"], default="creation", help="window each counted tweet is scored in")
    g.add_argument("--year", type=int, choices=[2016, 2017], default=None, help="headline metric preset (2016: EG-1, 2017: EG-p)")
    g.add_argument("--jobs", type=int, default=1, help="worker processes")


def _add_out(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="output file (default stdout)")


def _eval_config(args: argparse.Namespace) -> EvalConfig:
    kwargs = dict(
        windowing=Windowing(start_epoch=args.start_epoch, window_seconds=args.window_seconds, num_windows=args.windows),
        cap=args.cap,
        mode=args.mode,
        window_basis=args.window_basis,
    )
    if args.alpha:
        kwargs["alphas"] = tuple(args.alpha)
    if getattr(args, "gold_padding", None):
        kwargs["gold_padding"] = args.gold_padding
    return EvalConfig(**kwargs)


def _metric(args: argparse.Namespace, cfg: EvalConfig) -> str:
    metric = getattr(args, "metric", None) or preset_for_year(args.year)
    if metric not in cfg.metric_keys():
        raise UsageError(f"unknown metric {metric!r} (known: {', '.join(cfg.metric_keys())})")
    return metric


def _truth(args: argparse.Namespace, validate: bool = True):
    gt, _ = load_ground_truth(args.qrels, args.clusters, args.epoch, args.extra_epoch, validate=validate)
    return gt


# ----------------------------
# Handlers
# ----------------------------

def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _eval_config(args)
    headline = _metric(args, cfg)
    gt = _truth(args)
    runs = load_runs(args.run)
    reports = evaluate_runs(runs, gt, cfg, jobs=args.jobs)
    write_output(write_report(ScoreReport.combine(reports), args.format), args.out)
    for r in rank_runs(reports, headline):
        logger.info("rank %d\t%s\t%s=%s", r.rank, r.tag, headline, fmt6(r.score))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _eval_config(args)
    gt = _truth(args)
    runs = load_runs(args.run)
    result = sweep(
        runs, gt, cfg,
        strategy=args.strategy,
        metric=_metric(args, cfg),
        n_min=args.n_min,
        n_max=args.n_max,
        seed=args.seed,
        draws=args.draws,
        jobs=args.jobs,
    )
    write_output(result.to_tsv(), args.out)
    return EXIT_OK


def cmd_leave_one_out(args: argparse.Namespace) -> int:
    cfg = _eval_config(args)
    metric = _metric(args, cfg)
    gt = _truth(args)
    result = leave_one_out(load_runs(args.run), gt, cfg, metric=metric, jobs=args.jobs)
    write_output(result.to_tsv(), args.out)
    logger.info("mean rank delta (%s, %s): %s", metric, cfg.mode, fmt6(result.mean_delta))
    return EXIT_OK


def cmd_audit_epoch(args: argparse.Namespace) -> int:
    gt = _truth(args, validate=False)
    audit = audit_epoch(gt, load_runs(args.run))
    write_output(audit.to_tsv(), args.out)
    return EXIT_OK if audit.clean else EXIT_DATA


def cmd_compare_modes(args: argparse.Namespace) -> int:
    cfg = _eval_config(args)
    metric = _metric(args, cfg)
    gt = _truth(args)
    rows = compare_modes(load_runs(args.run), gt, cfg, metric=metric)
    write_output(modes_to_tsv(rows), args.out)
    return EXIT_OK


def cmd_window_gaps(args: argparse.Namespace) -> int:
    cfg = _eval_config(args)
    gt = _truth(args)
    runs = load_runs(args.run)
    rows = window_gaps(runs, gt, cfg)
    lines = ["\t".join(("run", "pushes", "cross_window", "fraction"))]
    lines += [f"{r.run}\t{r.pushes}\t{r.cross_window}\t{fmt6(r.fraction)}" for r in rows]
    lines.append(f"#runs_with_gaps\t{sum(1 for r in rows if r.cross_window)}")
    if args.with_ranks:
        metric = _metric(args, cfg)
        lines.append(f"#basis\t{metric}\trun\tcreation_score\tpush_score\tcreation_rank\tpush_rank")
        for b in compare_window_basis(runs, gt, cfg, metric=metric, jobs=args.jobs):
            lines.append(
                f"#basis\t{metric}\t{b.run}\t{fmt6(b.creation_score)}\t{fmt6(b.push_score)}\t{b.creation_rank}\t{b.push_rank}"
            )
    write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    gt = _truth(args, validate=False)
    violations = validate_ground_truth(gt)
    write_output(format_violations(violations), args.out)
    if violations:
        logger.error("ground truth has %d violations", len(violations))
        return EXIT_INVALID
    return EXIT_OK


def cmd_gen_synth(args: argparse.Namespace) -> int:
    config = load_synth_config(args.config) if args.config else SynthConfig()
    corpus_update = {}
    if args.seed is not None:
        corpus_update["seed"] = args.seed
    if args.profiles is not None:
        corpus_update["profiles"] = args.profiles
    if args.windows is not None:
        corpus_update["windows"] = args.windows
    corpus = SynthSpec.model_validate({**config.corpus.model_dump(), **corpus_update})
    systems = config.systems
    if args.systems is not None or not systems:
        systems = default_systems(args.systems if args.systems is not None else 5, seed=corpus.seed)
    config = SynthConfig(corpus=corpus, systems=systems, cap=config.cap)
    write_synth(args.out, config)
    return EXIT_OK


# ----------------------------
# Parser
# ----------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rts-eval", description="Batch evaluation toolkit for real-time push-notification runs.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("evaluate", help="score runs (EG, nCG, GMP, latency)")
    _add_truth_args(p)
    _add_run_args(p)
    _add_eval_args(p)
    p.add_argument("--format", choices=["tsv", "json"], default="tsv", help="per-cell TSV with #aggregate lines, or one JSON document")
    _add_out(p)
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("sweep-n", help="restrict runs to N pushes per day and average a metric")
    _add_truth_args(p)
    _add_run_args(p)
    _add_eval_args(p)
    p.add_argument("--strategy", choices=list(STRATEGY_NAMES), required=True, help="which N pushes per (profile, day) to keep")
    p.add_argument("--metric", default="EG-1", help="metric to average and rank by (default EG-1)")
    p.add_argument("--n-min", type=int, default=1, help="smallest N in the sweep")
    p.add_argument("--n-max", type=int, default=None, help="default: --cap")
    p.add_argument("--seed", type=int, default=0, help="random strategy seed")
    p.add_argument("--draws", type=int, default=100, help="random strategy draws")
    p.add_argument("--gold-padding", choices=["always", "never"], default=None, help="gold strategy: fill up to N with non-gaining pushes (default always)")
    _add_out(p)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("leave-one-out", help="re-rank each run without its unique tweets")
    _add_truth_args(p)
    _add_run_args(p)
    _add_eval_args(p)
    p.add_argument("--metric", default="EG-1", help="metric to average and rank by (default EG-1)")
    _add_out(p)
    p.set_defaults(handler=cmd_leave_one_out)

    p = sub.add_parser("audit-epoch", help="list pushed tweets missing from the epoch file (exit 3 if any)")
    _add_truth_args(p)
    _add_run_args(p)
    _add_out(p)
    p.set_defaults(handler=cmd_audit_epoch)

    p = sub.add_parser("compare-modes", help="score runs under strict and official-2016 modes")
    _add_truth_args(p)
    _add_run_args(p)
    _add_eval_args(p)
    p.add_argument("--metric", default="EG-1", help="metric to average and rank by (default EG-1)")
    _add_out(p)
    p.set_defaults(handler=cmd_compare_modes)

    p = sub.add_parser("window-gaps", help="count pushes whose push and creation windows differ")
    _add_truth_args(p)
    _add_run_args(p)
    _add_eval_args(p)
    p.add_argument("--metric", default="EG-1", help="metric to average and rank by (default EG-1)")
    p.add_argument("--with-ranks", action="store_true", help="also rank runs under both window bases")
    _add_out(p)
    p.set_defaults(handler=cmd_window_gaps)

    p = sub.add_parser("validate", help="check ground-truth invariants (exit 2 on violations)")
    _add_truth_args(p)
    _add_out(p)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("gen-synth", help="write a seeded synthetic corpus and runs")
    p.add_argument("--config", default=None, help="synthetic corpus YAML")
    p.add_argument("--seed", type=int, default=None, help="corpus seed (overrides the YAML)")
    p.add_argument("--profiles", type=int, default=None, help="number of profiles (overrides the YAML)")
    p.add_argument("--windows", type=int, default=None, help="number of windows (overrides the YAML)")
    p.add_argument("--systems", type=int, default=None, help="number of generated systems when the YAML lists none")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(handler=cmd_gen_synth)

    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format="[%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _configure_logging(args)

    try:
        return args.handler(args)
    except GroundTruthInvalid as exc:
        sys.stderr.write(format_violations(exc.violations))
        logger.error("%s", exc)
        return EXIT_INVALID
    except MissingEpochError as exc:
        for profile, tweet in exc.missing:
            sys.stderr.write(f"missing-epoch\t{profile}\t{tweet}\n")
        for profile, tweet in exc.early:
            sys.stderr.write(f"push-before-creation\t{profile}\t{tweet}\n")
        logger.error("%s", exc)
        return EXIT_DATA
    except (UsageError, ValueError) as exc:
        # pydantic.ValidationError is a ValueError
        logger.error("%s", exc)
        return EXIT_USAGE
    except OSError as exc:
        logger.error("%s", exc)
        return EXIT_DATA
    except RtsEvalError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE


def run(argv: Optional[List[str]] = None) -> None:
    sys.exit(main(argv))


if __name__ == "__main__":
    run()
