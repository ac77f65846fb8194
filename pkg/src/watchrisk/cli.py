"""Command-line front end: ``watchrisk {landscape,assess,rates,synth}``.

Exit codes: 0 success, 1 partial result, 2 input error, 3 config error.
Configuration precedence is flags, then ``--config`` JSON file, then
built-in defaults; the effective values are echoed into every report.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from .cost import landscape_csv
from .entropy import risk_from_divergences
from .errors import ConfigError, IngestError, InsufficientDataError, WatchRiskError
from .report import AnalysisConfig, build_assessment, build_landscape, dumps, metadata, travelers_csv
from .scores import read_scores_csv, write_scores_csv
from .synth import SynthSpec, generate_records, ground_truth_csv, benchmark_spec

EXIT_OK, EXIT_PARTIAL, EXIT_INPUT, EXIT_CONFIG = 0, 1, 2, 3

# flag dest -> AnalysisConfig field
_CONFIG_FLAGS = {
    "score_max": "score_max",
    "tail_fraction": "tail_fraction",
    "aggregator": "aggregator",
    "thresholds": "thresholds",
    "cfn": "cfn",
    "cfp": "cfp",
    "pg": "pg",
    "loss": "loss",
    "bins": "bins",
    "epsilon": "epsilon",
    "kl_orientation": "kl_orientation",
    "min_scores": "min_scores",
}


class InputError(WatchRiskError):
    module = "input"


def _analysis_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--scores", metavar="PATH", help="scores CSV (probe_id,gallery_id,score)")
    p.add_argument("--out", metavar="PATH", help="report JSON path; side tables are written next to it")
    p.add_argument("--config", metavar="PATH", help="JSON file with configuration values")
    p.add_argument("--timestamp", metavar="ISO", help="pin generated_at instead of using the current time")
    p.add_argument("--score-max", type=float)
    p.add_argument("--tail-fraction", type=float)
    p.add_argument("--aggregator", choices=("mean", "extreme"))
    p.add_argument("--thresholds", metavar="LIST", help="comma-separated thresholds, e.g. 10,50,100")
    p.add_argument("--cfn", type=float, help="cost of a false negative")
    p.add_argument("--cfp", type=float, help="cost of a false positive")
    p.add_argument("--pg", type=float, help="prior probability of a genuine comparison")
    p.add_argument("--loss", metavar="S,G,WL", help="losses for sheep, goat, wolf/lamb")
    p.add_argument("--bins", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--kl-orientation", choices=("ref-first", "traveler-first"))
    p.add_argument("--min-scores", type=int)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="watchrisk", description="Watchlist risk landscapes and per-traveler risk from match scores.")
    sub = parser.add_subparsers(dest="command", required=True)
    parent = _analysis_parent()
    sub.add_parser("landscape", parents=[parent], help="Level-I cost landscape")
    sub.add_parser("rates", parents=[parent], help="per-category FNR/FPR table (CSV)")
    assess = sub.add_parser("assess", parents=[parent], help="Level-II per-traveler entropy risk")
    assess.add_argument("--travelers", metavar="IDS", help="comma-separated traveler ids (default: all)")
    assess.add_argument(
        "--from-divergences",
        metavar="D_GOAT,D_WL,D_SHEEP",
        help="skip histogramming and score precomputed divergences",
    )
    synth = sub.add_parser("synth", help="write a seeded synthetic scores CSV and ground truth")
    synth.add_argument("--spec", metavar="PATH", help="synth spec JSON (default: 568-subject benchmark population)")
    synth.add_argument("--seed", type=int)
    synth.add_argument("--out", metavar="DIR", required=True)
    return parser


def effective_config(args) -> AnalysisConfig:
    values = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        values.update(loaded)
    for dest, key in _CONFIG_FLAGS.items():
        v = getattr(args, dest, None)
        if v is not None:
            values[key] = v
    cfg = AnalysisConfig.from_mapping(values)
    cfg.validate()
    return cfg


def _timestamp(args) -> str:
    if args.timestamp:
        return args.timestamp
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


def _load(args, cfg):
    if not args.scores:
        raise InputError("--scores is required")
    if not os.path.exists(args.scores):
        raise InputError(f"scores file not found: {args.scores}")
    pop = read_scores_csv(args.scores, cfg.score_max)
    if len(pop) == 0:
        raise IngestError(f"no match records in {args.scores}")
    return pop


def _side_path(out: Path, suffix: str) -> Path:
    return out.with_name(out.stem + suffix)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _emit(args, report: dict, side_tables: dict[str, str]) -> None:
    text = dumps(report)
    if args.out:
        out = Path(args.out)
        _write(out, text)
        for suffix, table in side_tables.items():
            _write(_side_path(out, suffix), table)
    else:
        sys.stdout.write(text)


def cmd_landscape(args) -> int:
    cfg = effective_config(args)
    pop = _load(args, cfg)
    result = build_landscape(pop, cfg)
    report = {
        "metadata": metadata("landscape", cfg, args.scores, _timestamp(args)),
        "level1": result.level1,
        "level2": None,
    }
    _emit(
        args,
        report,
        {
            ".assignment.csv": result.assignment.to_csv(),
            ".rates.csv": result.rates.to_csv(),
            ".landscape.csv": landscape_csv(result.entries),
        },
    )
    return EXIT_OK


def cmd_rates(args) -> int:
    cfg = effective_config(args)
    pop = _load(args, cfg)
    result = build_landscape(pop, cfg)
    text = result.rates.to_csv()
    if args.out:
        _write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _parse_divergences(text: str):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        vals = []
    if len(vals) != 3:
        raise ConfigError(f"--from-divergences needs d_goat,d_wl,d_sheep, got {text!r}")
    return vals


def cmd_assess(args) -> int:
    cfg = effective_config(args)
    if args.from_divergences:
        d_goat, d_wl, d_sheep = _parse_divergences(args.from_divergences)
        risk = risk_from_divergences(d_goat, d_wl, d_sheep, cfg.loss_vector(), traveler_id="from-divergences")
        level2 = {"menagerie": None, "references": None, "travelers": [risk.to_dict()], "skipped": []}
        report = {"metadata": metadata("assess", cfg, None, _timestamp(args)), "level1": None, "level2": level2}
        _emit(args, report, {".travelers.csv": travelers_csv(level2["travelers"])})
        return EXIT_OK

    pop = _load(args, cfg)
    ids = None
    if args.travelers:
        ids = [t.strip() for t in args.travelers.split(",") if t.strip()]
    level2, results, skipped = build_assessment(pop, cfg, ids)
    if not results:
        raise InsufficientDataError("no requested traveler could be assessed")
    report = {"metadata": metadata("assess", cfg, args.scores, _timestamp(args)), "level1": None, "level2": level2}
    _emit(args, report, {".travelers.csv": travelers_csv(level2["travelers"])})
    incomplete = any(not r.complete for r in results)
    return EXIT_PARTIAL if (skipped or incomplete) else EXIT_OK


def cmd_synth(args) -> int:
    if args.spec:
        if not os.path.exists(args.spec):
            raise InputError(f"synth spec file not found: {args.spec}")
        spec = SynthSpec.from_json(args.spec)
    else:
        spec = benchmark_spec()
    if args.seed is not None:
        spec = spec.with_seed(args.seed)
    records, planted = generate_records(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_scores_csv(records, out / "scores.csv")
    _write(out / "ground_truth.csv", ground_truth_csv(planted))
    _write(out / "synth_spec.json", json.dumps(spec.to_dict(), sort_keys=True, indent=2) + "\n")
    return EXIT_OK


COMMANDS = {"landscape": cmd_landscape, "rates": cmd_rates, "assess": cmd_assess, "synth": cmd_synth}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"watchrisk: config error [{exc.module}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WatchRiskError as exc:
        print(f"watchrisk: input error [{exc.module}]: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"watchrisk: input error [io]: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
