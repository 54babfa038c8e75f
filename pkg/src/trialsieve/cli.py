"""Command-line entry point.

Exit codes: 0 success, 1 user error, 2 internal error.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import demo as demo_mod
from . import metrics, pipeline
from .config import Config, ConfigError, load_config
from .corpus import CorpusError, Store, ingest
from .ruleset import CompileError, ParseError, RuleError, compile_rules_dir, \
    load_rules_dir

USER_ERRORS = (ConfigError, CorpusError, RuleError, metrics.EvalError,
               FileNotFoundError)


def _config(ctx) -> Config:
    params = ctx.obj or {}
    return load_config(params.get("config_path"), {
        "store_path": params.get("store"),
        "rules_dir": params.get("rules"),
        "output_dir": params.get("out"),
        "parallelism": params.get("parallelism"),
        "history_threshold_days": params.get("history_threshold"),
    })


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="key = value config file; flags override it")
@click.option("--store", help="store database path")
@click.option("--rules", help="rules directory")
@click.option("--out", help="output directory")
@click.option("--parallelism", type=int)
@click.option("--history-threshold", "history_threshold", type=int)
@click.pass_context
def cli(ctx, **params):
    """Rule-based clinical trial eligibility engine."""
    ctx.obj = params


@cli.command("ingest")
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.pass_context
def ingest_cmd(ctx, directory):
    """Load patient files from DIRECTORY into the store."""
    cfg = _config(ctx)
    store = Store(cfg.store_path)
    summary = ingest(directory, store, cfg.separator_pattern,
                     cfg.date_patterns)
    for w in summary.warnings:
        click.echo(f"warning: {w}", err=True)
    click.echo(f"ingested {summary.patients} patients, "
               f"{summary.documents} documents, "
               f"{len(summary.warnings)} warnings")
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    store.export_documents_tsv(out / "documents.tsv")


@cli.group("ruleset")
def ruleset_group():
    """Rule table utilities."""


@ruleset_group.command("lint")
@click.pass_context
def ruleset_lint(ctx):
    """Check every rule table; print schema violations with row numbers."""
    cfg = _config(ctx)
    problems = []
    tables = []
    try:
        tables = load_rules_dir(cfg.rules_dir)
    except ParseError as exc:
        problems.append(str(exc))
    if tables and not problems:
        try:
            compile_rules_dir(cfg.rules_dir)
        except CompileError as exc:
            problems.append(str(exc))
    if problems:
        for p in problems:
            click.echo(p, err=True)
        sys.exit(1)
    click.echo(f"ok: {len(tables)} rule tables lint clean")


@cli.group("trie")
def trie_group():
    """Trie debugging utilities."""


@trie_group.command("dump")
@click.pass_context
def trie_dump(ctx):
    """Print node/edge/accepting counts for each component trie."""
    cfg = _config(ctx)
    rs = compile_rules_dir(cfg.rules_dir)
    click.echo(f"fingerprint {rs.fingerprint}")
    for component, stats in rs.trie_stats().items():
        click.echo(f"{component}\tnodes={stats['nodes']}\t"
                   f"edges={stats['edges']}\t"
                   f"accepting={stats['accepting']}\t"
                   f"phrases={stats['phrases']}")


@cli.command("run")
@click.option("--trace", is_flag=True, help="write per-document trace files")
@click.option("--patient", "patient_id", help="process a single patient")
@click.pass_context
def run_cmd(ctx, trace, patient_id):
    """Process the ingested corpus and write predictions."""
    cfg = _config(ctx)
    store = Store(cfg.store_path)
    rs = compile_rules_dir(cfg.rules_dir)
    if patient_id:
        result = pipeline.process_patient(store.get_patient(patient_id), rs,
                                          trace, cfg.history_threshold_days)
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        metrics.write_predictions(result.decisions, out / "predictions",
                                  rs.criteria)
        for d in result.decisions:
            click.echo(f"{d.patient_id}\t{d.criterion}\t{d.decision}")
        return
    ids = store.patient_ids()
    if not ids:
        click.echo("warning: store is empty; nothing to run", err=True)
    result = pipeline.run_corpus(store, rs, cfg.output_dir, cfg.parallelism,
                                 trace, cfg.history_threshold_days)
    for e in result.errors:
        click.echo(f"error: {e}", err=True)
    click.echo(f"processed {len(ids)} patients, "
               f"{len(result.decisions)} decisions -> "
               f"{Path(cfg.output_dir) / 'predictions'}")


@cli.command("eval")
@click.option("--gold", required=True, type=click.Path(exists=True))
@click.option("--pred", required=True, type=click.Path(exists=True))
@click.pass_context
def eval_cmd(ctx, gold, pred):
    """Score predictions against gold labels, Table-style output."""
    cfg = _config(ctx)
    rs = compile_rules_dir(cfg.rules_dir)
    gold_labels = metrics.read_labels_dir(gold, rs.criteria)
    pred_labels = metrics.read_labels_dir(pred, rs.criteria)
    report = metrics.evaluate(gold_labels, pred_labels, rs.criteria)
    click.echo(report.format_table())
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    import json
    (out / "report.json").write_text(json.dumps(report.to_dict(), indent=2),
                                     encoding="utf-8")


@cli.command("trace")
@click.argument("doc_id")
@click.pass_context
def trace_cmd(ctx, doc_id):
    """Re-run one document with tracing and print the trace file path."""
    cfg = _config(ctx)
    store = Store(cfg.store_path)
    rs = compile_rules_dir(cfg.rules_dir)
    doc = store.get_document(doc_id)
    result = pipeline.process_document(doc, rs, trace_on=True,
                                       history_threshold_days=
                                       cfg.history_threshold_days)
    trace_dir = Path(cfg.output_dir) / "traces"
    trace_dir.mkdir(parents=True, exist_ok=True)
    path = trace_dir / f"{doc_id}.jsonl"
    result.trace.write(path)
    click.echo(str(path))


@cli.command("demo")
@click.argument("directory", type=click.Path())
@click.option("--patients", default=20, show_default=True)
@click.option("--seed", default=7, show_default=True)
def demo_cmd(directory, patients, seed):
    """Materialize the demo ruleset and seeded synthetic corpus."""
    demo_mod.init_demo(directory, n_patients=patients, seed=seed)
    click.echo(f"demo assets written under {directory} "
               f"(rules/, corpus/, gold/)")


@cli.command("serve")
@click.pass_context
def serve_cmd(ctx):
    """Serve the workbench HTTP API."""
    cfg = _config(ctx)
    from .server import create_app
    import uvicorn
    host, _, port = cfg.serve_address.partition(":")
    app = create_app(cfg)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8711))


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except SystemExit as exc:
        return int(exc.code or 0)
    except (click.UsageError, *USER_ERRORS) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except Exception as exc:  # noqa: BLE001 - internal failure boundary
        click.echo(f"internal error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
