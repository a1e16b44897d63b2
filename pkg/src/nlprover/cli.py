"""Command-line surface.

Subcommands mirror the pipeline stages: ingest tables, inspect templates,
prove one hypothesis, answer one question, evaluate a question set, and
re-render stored outcomes. Exit codes: 0 success, 2 config error, 3 data
error, 4 provider error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import serialize
from .config import PROVIDER_KINDS, Engine, RunConfig, build_engine, load_run_config
from .errors import ConfigError, DataError, EngineError, ProviderError
from .factbase import extract_templates, ingest_tables, load_templates, looks_like_table, parse_table_file
from .qa import answer_question, compute_metrics, gold_map, load_questions
from .prover import prove

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_PROVIDER = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nlprover")
    parser.add_argument("--config", metavar="PATH", help="JSON run configuration file")
    parser.add_argument(
        "--factbase", metavar="PATH", action="append", default=None,
        help="table or plain-sentence file (repeatable)",
    )
    parser.add_argument("--templates", metavar="PATH", help="template file, one pattern per line")
    parser.add_argument("--timeout", metavar="SECONDS", type=float, help="per-search timeout")
    parser.add_argument("--max-depth", metavar="N", type=int, help="maximum proof tree depth")
    parser.add_argument("--max-proofs", metavar="N", type=int, help="proofs retained per search")
    parser.add_argument("--threshold", metavar="X", type=float, help="entailment filter threshold")
    parser.add_argument("--stub-seed", metavar="N", type=int, help="seed for stub providers")
    parser.add_argument("--cache-dir", metavar="PATH", help="provider response cache directory")
    parser.add_argument(
        "--endpoint", metavar="KIND=URL", action="append", default=None,
        help="provider endpoint (repeatable); KIND is embed|generate|entail|qa2d, "
        "URL may be 'stub'",
    )
    parser.add_argument("--out", metavar="PATH", help="write the structured result here")
    parser.add_argument("--no-pruning", action="store_true", help="disable branch-and-bound pruning")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", help="load factbase files and write a snapshot")

    templates_cmd = sub.add_parser("templates", help="load or extract infilling templates")
    templates_cmd.add_argument(
        "--from-tables", action="store_true", help="extract templates from the factbase tables"
    )

    prove_cmd = sub.add_parser("prove", help="search for proofs of one hypothesis")
    prove_cmd.add_argument("hypothesis", help="natural-language statement to prove")

    answer_cmd = sub.add_parser("answer", help="answer one multiple-choice question")
    answer_cmd.add_argument("--questions", required=True, metavar="PATH")
    answer_cmd.add_argument("--id", dest="question_id", metavar="QID",
                            help="question id (default: first in the file)")

    evaluate_cmd = sub.add_parser("evaluate", help="run a question set and report metrics")
    evaluate_cmd.add_argument("--questions", required=True, metavar="PATH")

    report_cmd = sub.add_parser("report", help="re-render a stored structured outcome")
    report_cmd.add_argument("--in", dest="infile", required=True, metavar="PATH")
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    doc: dict = {}
    if args.factbase:
        doc["factbase_paths"] = args.factbase
    if args.templates:
        doc["template_path"] = args.templates
    if args.timeout is not None:
        doc["timeout_seconds"] = args.timeout
    if args.max_depth is not None:
        doc["max_depth"] = args.max_depth
    if args.max_proofs is not None:
        doc["max_proofs"] = args.max_proofs
    if args.threshold is not None:
        doc["threshold"] = args.threshold
    if args.stub_seed is not None:
        doc["stub_seed"] = args.stub_seed
    if args.cache_dir:
        doc["cache_dir"] = args.cache_dir
    if args.no_pruning:
        doc["pruning"] = False
    if args.endpoint:
        endpoints: dict[str, list[str]] = {}
        for spec in args.endpoint:
            kind, sep, url = spec.partition("=")
            if not sep or kind not in PROVIDER_KINDS or not url:
                raise ConfigError(f"bad --endpoint {spec!r}; expected KIND=URL")
            endpoints.setdefault(kind, []).append(url)
        doc["endpoints"] = endpoints
    return doc


def _write_out(args: argparse.Namespace, doc: dict) -> None:
    text = serialize.dumps(doc)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_ingest(args, config: RunConfig) -> int:
    factbase = ingest_tables(config.factbase_paths)
    doc = {
        "schema": serialize.SCHEMA_VERSION,
        "kind": "factbase_snapshot",
        "facts": [
            {"id": f.id, "sentence": f.sentence, "source": f.source} for f in factbase.facts
        ],
        "stats": {
            "files": factbase.ingest_stats.files,
            "tables": factbase.ingest_stats.tables,
            "rows_seen": factbase.ingest_stats.rows_seen,
            "empty_rows": factbase.ingest_stats.empty_rows,
            "duplicates": factbase.ingest_stats.duplicates,
        },
    }
    _write_out(args, doc)
    print(f"ingested {len(factbase)} facts from {factbase.ingest_stats.files} files",
          file=sys.stderr)
    return EXIT_OK


def _cmd_templates(args, config: RunConfig) -> int:
    if getattr(args, "from_tables", False):
        templates = []
        for path in config.factbase_paths:
            if looks_like_table(path):
                templates.append(extract_templates(parse_table_file(path)))
    elif config.template_path:
        templates = load_templates(config.template_path)
    else:
        from .config import curated_templates

        templates = curated_templates()
    doc = {
        "schema": serialize.SCHEMA_VERSION,
        "kind": "templates",
        "templates": [
            {
                "pattern": t.pattern,
                "source_relation": t.source_relation,
                "support_count": t.support_count,
            }
            for t in templates
        ],
    }
    _write_out(args, doc)
    return EXIT_OK


def _cmd_prove(args, engine: Engine) -> int:
    if not args.hypothesis.strip():
        raise DataError("hypothesis must be non-empty")
    outcome = prove(
        args.hypothesis,
        engine.budget,
        engine.providers,
        engine.index,
        engine.factbase,
        engine.config,
        pruning=engine.pruning,
    )
    _write_out(args, serialize.outcome_to_dict(outcome))
    for proof in outcome.proofs:
        print(f"# score {proof.score:.9f}", file=sys.stderr)
        print(serialize.serialize_proof_text(proof), file=sys.stderr)
    if not outcome.proofs:
        print("no proof found" + (" (timed out)" if outcome.timed_out else ""), file=sys.stderr)
    return EXIT_OK


def _cmd_answer(args, engine: Engine) -> int:
    questions = load_questions(args.questions)
    if args.question_id:
        matches = [q for q in questions if q.id == args.question_id]
        if not matches:
            raise DataError(f"question id {args.question_id!r} not found in {args.questions}")
        question = matches[0]
    else:
        question = questions[0]
    record = answer_question(
        question,
        engine.budget,
        engine.providers,
        engine.index,
        engine.factbase,
        engine.config,
        pruning=engine.pruning,
    )
    _write_out(args, serialize.answer_record_to_dict(record))
    print(f"{question.id}: prediction={record.prediction}", file=sys.stderr)
    return EXIT_OK


def _cmd_evaluate(args, engine: Engine) -> int:
    questions = load_questions(args.questions)
    records = [
        answer_question(
            question,
            engine.budget,
            engine.providers,
            engine.index,
            engine.factbase,
            engine.config,
            pruning=engine.pruning,
        )
        for question in questions
    ]
    report = compute_metrics(records, gold_map(questions))
    doc = {
        "schema": serialize.SCHEMA_VERSION,
        "kind": "evaluation",
        "report": serialize.report_to_dict(report),
        "records": [serialize.answer_record_to_dict(record) for record in records],
    }
    _write_out(args, doc)
    print(_format_report_line(serialize.report_to_dict(report)), file=sys.stderr)
    return EXIT_OK


def _format_report_line(report: dict) -> str:
    return (
        f"Ans {report['answered_rate']:.3f} | Pr {report['proof_precision']:.3f} | "
        f"Re {report['proof_recall']:.3f} | OutScored {report['outscored_rate']:.3f} | "
        f"Ovr {report['accuracy_overall']:.3f} | Easy {report['accuracy_easy']:.3f} | "
        f"Chal {report['accuracy_challenge']:.3f}"
    )


def _cmd_report(args) -> int:
    try:
        doc = serialize.loads(Path(args.infile).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read {args.infile}: {exc}") from exc
    except ValueError as exc:
        raise DataError(f"{args.infile} is not valid JSON: {exc}") from exc
    kind = doc.get("kind") if isinstance(doc, dict) else None
    if kind == "search_outcome":
        outcome = serialize.outcome_from_dict(doc)
        for proof in outcome.proofs:
            print(f"# score {proof.score:.9f}")
            print(serialize.serialize_proof_text(proof))
        if not outcome.proofs:
            print("no proofs stored")
    elif kind == "answer_record":
        record = serialize.answer_record_from_dict(doc)
        print(f"{record.question_id}: prediction={record.prediction}")
        for result in record.per_option:
            score = "-" if result.best_score is None else f"{result.best_score:.9f}"
            print(f"  [{result.label}] {score} {result.hypothesis or '(no hypothesis)'}")
    elif kind == "evaluation":
        print(_format_report_line(doc["report"]))
        for entry in doc.get("records", []):
            print(f"  {entry['question_id']}: prediction={entry['prediction']}")
    elif kind == "eval_report":
        print(_format_report_line(doc))
    else:
        raise DataError(f"{args.infile}: unknown document kind {kind!r}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "report":
            return _cmd_report(args)
        config = load_run_config(args.config, _overrides(args))
        if args.command == "ingest":
            return _cmd_ingest(args, config)
        if args.command == "templates":
            return _cmd_templates(args, config)
        engine = build_engine(config)
        if args.command == "prove":
            return _cmd_prove(args, engine)
        if args.command == "answer":
            return _cmd_answer(args, engine)
        if args.command == "evaluate":
            return _cmd_evaluate(args, engine)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ProviderError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
