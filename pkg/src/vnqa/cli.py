"""Command line interface.

    vnqa ask "có bao nhiêu sinh viên học lớp k50 khoa học máy tính?"
    vnqa ask "ai là sinh viên của lớp khoa học máy tính?" --auto
    vnqa repl
    vnqa eval --corpus questions.tsv [--choices choices.tsv] [--json-out r.json]
    vnqa serve --port 8000 [--config vnqa.conf]

Exit codes: 0 answered/served, 2 disambiguation needed in non-interactive
mode, 1 error.
"""

from __future__ import annotations

import json
import sys

import click

from .config import default_resource, load_config
from .evaluation import load_choices, run_eval
from .pipeline import ANSWERED, ERROR, NEEDS_DISAMBIGUATION, BadQuestionError, QAEngine

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEEDS_INTERACTION = 2


def _engine(config_path):
    return QAEngine(load_config(config_path))


def _print_options(request):
    click.echo(f"Ambiguous {request.slot}; candidates:")
    for i, option in enumerate(request.options):
        click.echo(f"  [{i}] {option.element.id} "
                   f"({option.element.kind}, score {option.score:.3f})")


def _print_answer(result, trace):
    click.echo(result.answer.rendered_text)
    if trace:
        click.echo("--- trace ---", err=True)
        click.echo(json.dumps(result.trace, ensure_ascii=False, indent=2,
                              sort_keys=True), err=True)


@click.group()
def main():
    """Ontology-backed Vietnamese question answering."""


@main.command()
@click.argument("text")
@click.option("--auto", is_flag=True,
              help="Resolve any disambiguation with the top-ranked option.")
@click.option("--trace", "show_trace", is_flag=True, help="Dump the pipeline trace.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def ask(text, auto, show_trace, config_path):
    """Answer one question and exit."""
    engine = _engine(config_path)
    try:
        result = engine.ask(text)
    except BadQuestionError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(EXIT_ERROR)
    while result.status == NEEDS_DISAMBIGUATION:
        _print_options(result.request)
        if not auto:
            sys.exit(EXIT_NEEDS_INTERACTION)
        click.echo("  -> taking [0]")
        result = engine.resolve_choice(result.request.token, 0)
    if result.status == ANSWERED:
        _print_answer(result, show_trace)
        sys.exit(EXIT_OK)
    click.echo(f"error ({result.failure_stage}): {result.message}", err=True)
    sys.exit(EXIT_ERROR)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def repl(config_path):
    """Interactive question loop; empty line quits."""
    engine = _engine(config_path)
    click.echo("vnqa — gõ câu hỏi, dòng trống để thoát.")
    while True:
        try:
            line = click.prompt("Câu hỏi", default="", show_default=False)
        except (EOFError, click.Abort):
            break
        if not line.strip():
            break
        try:
            result = engine.ask(line)
        except BadQuestionError as err:
            click.echo(f"error: {err}")
            continue
        while result.status == NEEDS_DISAMBIGUATION:
            _print_options(result.request)
            pick = click.prompt("Chọn", type=int, default=0)
            try:
                result = engine.resolve_choice(result.request.token, pick)
            except IndexError as err:
                click.echo(f"error: {err}")
                break
        if result.status == ANSWERED:
            click.echo("Câu trả lời:")
            click.echo(result.answer.rendered_text)
        elif result.status == ERROR:
            click.echo(f"error ({result.failure_stage}): {result.message}")


@main.command(name="eval")
@click.option("--corpus", type=click.Path(exists=True), default=None,
              help="Corpus TSV; defaults to the packaged 30-question corpus.")
@click.option("--choices", "choices_path", type=click.Path(exists=True), default=None,
              help="Scripted choices file (question number TAB indices).")
@click.option("--mode", type=click.Choice(["auto", "scripted-choices"]),
              default=None, help="Defaults to auto, or scripted-choices "
                                 "when --choices is given.")
@click.option("--json-out", type=click.Path(), default=None,
              help="Also write the full report as JSON.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def eval_command(corpus, choices_path, mode, json_out, config_path):
    """Run the batch evaluation and print the report."""
    engine = _engine(config_path)
    corpus = corpus or str(default_resource("corpus.tsv"))
    choices = load_choices(choices_path) if choices_path else None
    mode = mode or ("scripted-choices" if choices else "auto")
    report = run_eval(engine, corpus, mode=mode, choices=choices)
    click.echo(report.to_text())
    if json_out:
        with open(json_out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, ensure_ascii=False, indent=2)
        click.echo(f"report written to {json_out}")
    sys.exit(EXIT_OK)


@main.command()
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def serve(port, host, config_path):
    """Start the HTTP API (and the web UI when configured)."""
    import uvicorn

    from .service import create_app

    app = create_app(load_config(config_path))
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
