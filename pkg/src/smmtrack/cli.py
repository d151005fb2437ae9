"""Command-line interface.

Subcommands wire ingestion, the discrepancy engine, episode counting, the
predictor, and scoring into file-in/file-out pipelines:

* ``analyze``   per-team, per-level discrepancy counts
* ``predict``   weighted-sum forecasts for a target level
* ``score``     target-identification scorecards
* ``generate``  synthetic corpus with a planted-discrepancy ledger
* ``report``    analyze + predict in one document

Output is deterministic for identical inputs and flags: rows order by team,
then level, then kind name alphabetically.  Exit codes: 0 success, 1
validation error, 2 I/O error.  The ``SMM_LOG`` environment variable
(error, warn, info, debug) controls diagnostics on standard error only.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Iterable, Sequence

from .beliefs import LevelId, TeamId, UpdateEvent
from .discrepancies import replay
from .episodes import (
    KIND_ORDER,
    TOTAL,
    EpisodeCounts,
    TeamHistory,
    build_history,
    count_level,
    counts_to_csv,
)
from .errors import MissingLevel, SchemeMismatch, SmmError
from .ingest import Confirmation, Record, Scenario, load_events, load_scenario
from .prediction import (
    PredictionReport,
    WeightScheme,
    batch_report,
    kind_label,
    report_to_csv,
    report_to_json,
    uniform_weights,
)
from .scoring import (
    ConfirmationLog,
    ScoreCard,
    render_table,
    score,
    scorecards_to_csv,
    scorecards_to_json,
)
from .synth import GenConfig, generate, write_corpus

log = logging.getLogger("smmtrack")

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


def _configure_logging() -> None:
    name = os.environ.get("SMM_LOG", "warn").strip().lower()
    level = _LOG_LEVELS.get(name, logging.WARNING)
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
    )


# --- pipeline glue -----------------------------------------------------------

def analyze_records(scenario: Scenario, records: Sequence[Record]) -> list[EpisodeCounts]:
    """Count discrepancy episodes for every observed team at every declared
    level (absent combinations count zero)."""
    updates = [r for r in records if isinstance(r, UpdateEvent)]
    grouped: dict[tuple[TeamId, LevelId], list[UpdateEvent]] = {}
    for event in updates:
        grouped.setdefault((event.team, event.level), []).append(event)
    teams = sorted({event.team for event in updates})
    log.info("analyzing %d update events across %d teams", len(updates), len(teams))

    all_counts: list[EpisodeCounts] = []
    for team in teams:
        for level in scenario.level_ids():
            events = grouped.get((team, level), [])
            state = replay(
                team, level, scenario.roles, scenario.ground_truth[level], events
            )
            counts = count_level(state.all_records(), team, level)
            log.debug(
                "team %d level %d: %d events, %d discrepancies",
                team, level, len(events), counts.total,
            )
            all_counts.append(counts)
    return all_counts


def score_records(scenario: Scenario, records: Sequence[Record]) -> list[ScoreCard]:
    """Score every team observed in the records; teams without
    confirmations score zero."""
    if not scenario.targets:
        raise SmmError("scenario declares no targets to score")
    confirmed: dict[TeamId, set[str]] = {}
    for record in records:
        confirmed.setdefault(record.team, set())
        if isinstance(record, Confirmation):
            confirmed[record.team].add(record.element_id)
    cards = []
    for team in sorted(confirmed):
        log_entry = ConfirmationLog(team=team, confirmed=frozenset(confirmed[team]))
        cards.append(score(scenario.targets, log_entry))
    return cards


def parse_weight_spec(spec: str, predictor_levels: Iterable[LevelId]) -> WeightScheme:
    """``uniform`` or an explicit ``level:weight`` list like ``1:0.5,2:0.5``."""
    text = spec.strip()
    if text == "uniform":
        return uniform_weights(predictor_levels)
    weights: dict[LevelId, float] = {}
    for part in text.split(","):
        level_text, _, weight_text = part.partition(":")
        try:
            level = int(level_text)
            weight = float(weight_text)
        except ValueError:
            raise SchemeMismatch(
                f"cannot parse weight spec part {part.strip()!r} "
                "(expected level:weight)"
            ) from None
        if level in weights:
            raise SchemeMismatch(f"level {level} given twice in weight spec")
        weights[level] = weight
    return WeightScheme(weights)


def _resolve_target(scenario: Scenario, target: int | None) -> LevelId:
    declared = scenario.level_ids()
    if target is None:
        return max(declared)
    if target not in declared:
        raise MissingLevel(f"target level {target} not declared by the scenario")
    return target


def _predict_from_counts(
    scenario: Scenario,
    all_counts: Sequence[EpisodeCounts],
    target: int | None,
    weight_spec: str,
) -> PredictionReport:
    resolved = _resolve_target(scenario, target)
    histories = build_history(list(all_counts))
    if not histories:
        raise MissingLevel("no teams observed; nothing to predict")
    predictor_levels = set(scenario.level_ids()) - {resolved}
    scheme = parse_weight_spec(weight_spec, predictor_levels)
    return batch_report(histories, resolved, scheme)


# --- rendering ---------------------------------------------------------------

def _aligned(rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for index, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if index == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def counts_to_json(all_counts: Sequence[EpisodeCounts]) -> str:
    ordered = sorted(all_counts, key=lambda c: (c.team, c.level))
    doc = [
        {
            "team": c.team,
            "level": c.level,
            **{kind.value: c.get(kind) for kind in KIND_ORDER},
            "total": c.total,
        }
        for c in ordered
    ]
    return json.dumps(doc, indent=2) + "\n"


def counts_to_table(all_counts: Sequence[EpisodeCounts]) -> str:
    header = ["team", "level"] + [kind.value for kind in KIND_ORDER] + ["total"]
    rows = [header]
    for c in sorted(all_counts, key=lambda c: (c.team, c.level)):
        rows.append(
            [str(c.team), str(c.level)]
            + [str(c.get(kind)) for kind in KIND_ORDER]
            + [str(c.total)]
        )
    return _aligned(rows)


def prediction_to_table(report: PredictionReport) -> str:
    rows = [["team", "kind", "predicted", "actual", "error"]]
    for p in report.predictions:
        rows.append(
            [
                str(p.team),
                kind_label(p.kind),
                f"{p.predicted:.3f}",
                str(p.actual),
                f"{p.error:+.3f}",
            ]
        )
    out = _aligned(rows)
    mae = "  ".join(
        f"{label}={value:.3f}" for label, value in sorted(report.mae_by_kind.items())
    )
    out += f"MAE by kind: {mae}\n"
    if report.pearson is not None:
        out += (
            f"Pearson on totals: r={report.pearson.r:.4f} "
            f"p={report.pearson.p_value:.4g} n={report.pearson.n}\n"
        )
    else:
        out += f"Pearson on totals: {report.pearson_note}\n"
    out += report.caveat + "\n"
    return out


def prediction_to_csv_with_caveat(report: PredictionReport) -> str:
    return report_to_csv(report) + f"# {report.caveat}\n"


def plot_data_csv(
    all_counts: Sequence[EpisodeCounts], report: PredictionReport
) -> str:
    """Long-format series for external plotting tools."""
    lines = ["series,team,level,kind,value"]
    for c in sorted(all_counts, key=lambda c: (c.team, c.level)):
        for kind in sorted([*KIND_ORDER, TOTAL], key=kind_label):
            lines.append(f"count,{c.team},{c.level},{kind_label(kind)},{c.get(kind)}")
    for p in report.predictions:
        lines.append(
            f"predicted,{p.team},{report.target},{kind_label(p.kind)},{p.predicted!r}"
        )
        lines.append(
            f"actual,{p.team},{report.target},{kind_label(p.kind)},{p.actual}"
        )
    return "\n".join(lines) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)


# --- subcommands -------------------------------------------------------------

def _load_inputs(args: argparse.Namespace) -> tuple[Scenario, list[Record]]:
    scenario = load_scenario(args.scenario)
    records: list[Record] = []
    for path in args.events:
        records.extend(load_events(path, scenario))
    log.info(
        "loaded scenario %s (%d roles, %d levels) and %d records",
        args.scenario, len(scenario.roles), len(scenario.levels), len(records),
    )
    return scenario, records


def _cmd_analyze(args: argparse.Namespace) -> int:
    scenario, records = _load_inputs(args)
    all_counts = analyze_records(scenario, records)
    if args.format == "csv":
        text = counts_to_csv(all_counts)
    elif args.format == "json":
        text = counts_to_json(all_counts)
    else:
        text = counts_to_table(all_counts)
    _emit(text, args.output)
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    scenario, records = _load_inputs(args)
    all_counts = analyze_records(scenario, records)
    report = _predict_from_counts(scenario, all_counts, args.target, args.weights)
    if args.format == "csv":
        text = prediction_to_csv_with_caveat(report)
    elif args.format == "json":
        text = report_to_json(report)
    else:
        text = prediction_to_table(report)
    _emit(text, args.output)
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    scenario, records = _load_inputs(args)
    cards = score_records(scenario, records)
    if args.format == "csv":
        text = scorecards_to_csv(scenario.targets, cards)
    elif args.format == "json":
        text = scorecards_to_json(scenario.targets, cards)
    else:
        text = render_table(scenario.targets, cards)
    _emit(text, args.output)
    return 0


def _cmd_generate(args: argparse.Namespace) -> int:
    config = GenConfig(
        teams=args.teams,
        levels=args.levels,
        seed=args.seed,
        team_baseline_spread=args.spread,
        noise=args.noise,
    )
    corpus = generate(config)
    paths = write_corpus(corpus, args.out_dir)
    log.info("generated %d plantings", len(corpus.ledger.planted))
    sys.stdout.write("\n".join(paths) + "\n")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    scenario, records = _load_inputs(args)
    all_counts = analyze_records(scenario, records)
    report = _predict_from_counts(scenario, all_counts, args.target, args.weights)
    if args.format == "csv":
        text = counts_to_csv(all_counts) + "\n" + prediction_to_csv_with_caveat(report)
    elif args.format == "json":
        doc = {
            "counts": json.loads(counts_to_json(all_counts)),
            "prediction": json.loads(report_to_json(report)),
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        text = counts_to_table(all_counts) + "\n" + prediction_to_table(report)
    _emit(text, args.output)
    if args.plot_data is not None:
        with open(args.plot_data, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(plot_data_csv(all_counts, report))
    return 0


# --- argument parsing --------------------------------------------------------

def _add_io_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", required=True, help="scenario JSON file")
    parser.add_argument(
        "--events", required=True, nargs="+", metavar="PATH",
        help="one or more JSONL event streams",
    )
    parser.add_argument(
        "--format", choices=("csv", "json", "table"), default="table",
        help="output format (default: table)",
    )
    parser.add_argument("--output", help="write to this path instead of stdout")


def _add_predict_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--target", type=int, default=None,
        help="level to predict (default: the last declared level)",
    )
    parser.add_argument(
        "--weights", default="uniform",
        help='"uniform" or an explicit list like "1:0.5,2:0.3,3:0.2"',
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smmtrack",
        description="Track belief discrepancies in team dialogue streams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser(
        "analyze", help="count discrepancies per team and level")
    _add_io_arguments(analyze)
    analyze.set_defaults(func=_cmd_analyze)

    predict = sub.add_parser(
        "predict", help="forecast a target level from the other levels")
    _add_io_arguments(predict)
    _add_predict_arguments(predict)
    predict.set_defaults(func=_cmd_predict)

    score_p = sub.add_parser(
        "score", help="score target-identification confirmations")
    _add_io_arguments(score_p)
    score_p.set_defaults(func=_cmd_score)

    generate_p = sub.add_parser(
        "generate", help="write a synthetic corpus with a planted ledger")
    generate_p.add_argument("--out-dir", required=True, help="output directory")
    generate_p.add_argument("--seed", type=int, default=0)
    generate_p.add_argument("--teams", type=int, default=20)
    generate_p.add_argument("--levels", type=int, default=4)
    generate_p.add_argument(
        "--spread", type=float, default=0.35,
        help="cross-team baseline variation (default: 0.35)",
    )
    generate_p.add_argument(
        "--noise", type=float, default=0.3,
        help="level-to-level jitter (default: 0.3)",
    )
    generate_p.set_defaults(func=_cmd_generate)

    report = sub.add_parser(
        "report", help="combined counts + prediction document")
    _add_io_arguments(report)
    _add_predict_arguments(report)
    report.add_argument(
        "--plot-data", metavar="PATH",
        help="also write a long-format CSV (series,team,level,kind,value)",
    )
    report.set_defaults(func=_cmd_report)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SmmError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
