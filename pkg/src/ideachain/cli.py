"""Command-line entry points for every pipeline stage."""

from __future__ import annotations

import functools
import json
import os
import sys
from pathlib import Path

import click

from .arena.criteria import Track
from .arena.elo import compute_elo
from .arena.agreement import compute_agreement
from .arena.baseline import extract_baseline
from .arena.judging import LlmPairJudge
from .arena.records import MatchLog, ok_records
from .arena.report import format_agreement_table, format_elo_table
from .arena.tournament import MethodOutputs, load_topics, run_tournament
from .config import (
    ABLATION_FLAGS,
    EloConfig,
    PipelineConfig,
    ProviderSettings,
    load_cost_table,
)
from .errors import IdeaChainError, ValidationError, exit_code_for
from .gateway.client import LlmGateway
from .gateway.provider import HttpChatProvider, HttpEmbeddingProvider
from .pipeline import Runtime, run_pipeline
from .scholar.client import ScholarClient
from .scholar.service import HttpScholarTransport
from .serve import JudgingService, create_app, default_static_dir
from .store import RunStore

# Flag-to-config-field map; the doc-sync test checks it stays one-to-one.
CONFIG_FLAGS: dict[str, str] = {
    "--branches": "branches",
    "--max-length": "max_length",
    "--milestone-citations": "milestone_citations",
    "--forward-candidates": "forward_candidates",
    "--probe-depth": "relevance_probe_depth",
    "--max-novelty-iters": "max_novelty_iters",
    "--iterations": "refine_iterations",
    "--reasoning-model": "reasoning_model",
    "--digest-model": "digest_model",
    "--embedding-model": "embedding_model",
    "--seed": "seed",
}


def _add_config_options(command):
    defaults = PipelineConfig()
    for flag, field_name in reversed(list(CONFIG_FLAGS.items())):
        default = getattr(defaults, field_name)
        option = click.option(
            flag,
            field_name,
            type=type(default),
            default=default,
            show_default=True,
            help=f"configuration field {field_name}",
        )
        command = option(command)
    return command


def _handle_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except IdeaChainError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exit_code_for(exc))

    return wrapper


def build_runtime(
    config: PipelineConfig,
    store_root: str,
    cache_dir: str | None,
    *,
    refresh: bool = False,
    cost_table_path: str | None = None,
) -> Runtime:
    """Assemble a live runtime from environment-configured providers.

    Tests replace this function to inject mock providers.
    """
    settings = ProviderSettings.from_env(dict(os.environ))
    if not settings.llm_api_key:
        raise ValidationError(
            "no provider credentials: set IDEACHAIN_LLM_API_KEY (and optionally "
            "IDEACHAIN_LLM_BASE_URL, IDEACHAIN_SCHOLAR_API_KEY)"
        )
    gateway = LlmGateway(
        chat=HttpChatProvider(settings.llm_base_url, settings.llm_api_key),
        embeddings=HttpEmbeddingProvider(settings.llm_base_url, settings.llm_api_key),
        config=config,
        cost_table=load_cost_table(cost_table_path),
    )
    scholar = ScholarClient(
        HttpScholarTransport(settings.scholar_base_url, settings.scholar_api_key),
        cache_dir=cache_dir,
        content_char_budget=config.content_char_budget,
        refresh=refresh,
    )
    return Runtime(
        gateway=gateway, scholar=scholar, store=RunStore(store_root), config=config
    )


@click.group()
def main() -> None:
    """Research-ideation pipeline and pairwise-tournament evaluation."""


@main.command()
@click.argument("topic")
@_add_config_options
@click.option(
    "--ablate",
    "ablate",
    multiple=True,
    type=click.Choice(ABLATION_FLAGS),
    help="drop one pipeline stage's prompt bindings",
)
@click.option("--skip-experiment", is_flag=True, help="stop after idea selection")
@click.option("--store", "store_root", default="runs", show_default=True, help="run-artifact root directory")
@click.option("--cache-dir", default=".ideachain-cache", show_default=True, help="search-service response cache")
@click.option("--refresh", is_flag=True, help="bypass cache reads")
@click.option("--cost-table", default=None, help="JSON per-token price table")
@_handle_errors
def ideate(topic, ablate, skip_experiment, store_root, cache_dir, refresh, cost_table, **config_fields):
    """Run the full ideation pipeline for TOPIC."""
    config = PipelineConfig(**config_fields).with_ablations(tuple(ablate))
    runtime = build_runtime(
        config, store_root, cache_dir, refresh=refresh, cost_table_path=cost_table
    )
    result = run_pipeline(runtime, topic, skip_experiment=skip_experiment)
    click.echo(f"run: {result.run_id}")
    click.echo(f"manifest: {result.manifest_ref}")
    click.echo(f"winning branch: {result.ideation.final.draft.branch_index}")
    if result.plan is not None:
        click.echo(f"experiment steps: {len(result.plan.steps)} (revision {result.plan.revision})")
    for line in result.cost_lines:
        click.echo(line)


@main.command("arena-run")
@click.argument("methods_dir", type=click.Path(exists=True, file_okay=False))
@click.argument("topics_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--track", type=click.Choice([t.value for t in Track]), default=Track.IDEA.value, show_default=True)
@click.option("--log", "log_path", default="matches.jsonl", show_default=True, help="append-only match log")
@click.option("--judge-id", default=None, help="record judge identity (defaults to the judge model id)")
@click.option("--methods", "methods_filter", default=None, help="comma-separated subset of method dirs")
@_handle_errors
def arena_run(methods_dir, topics_file, track, log_path, judge_id, methods_filter):
    """Judge every pending pairwise match with the configured model."""
    outputs = MethodOutputs(methods_dir)
    methods = outputs.method_ids()
    if methods_filter:
        wanted = [m.strip() for m in methods_filter.split(",") if m.strip()]
        missing = sorted(set(wanted) - set(methods))
        if missing:
            raise ValidationError(f"no output directory for methods: {', '.join(missing)}")
        methods = wanted
    topics = load_topics(topics_file)
    config = PipelineConfig()
    runtime = build_runtime(config, store_root="runs", cache_dir=None)
    judge = LlmPairJudge(runtime.gateway, judge_id=judge_id or config.reasoning_model)
    log = MatchLog(log_path)
    new_records = run_tournament(outputs, methods, topics, Track(track), judge, log)
    completed = len(ok_records(new_records))
    click.echo(f"judged {completed} matches ({len(new_records) - completed} failed)")
    click.echo(f"log: {log_path}")


@main.command("arena-report")
@click.argument("log_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--initial-rating", default=1000.0, show_default=True)
@click.option("--k-factor", default=16.0, show_default=True)
@click.option("--shuffles", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--judge", "judge_filter", default=None, help="rate only this judge's records")
@click.option(
    "--agreement",
    nargs=2,
    default=None,
    help="two judge ids to compare on the shared matches",
)
@_handle_errors
def arena_report(log_path, initial_rating, k_factor, shuffles, seed, judge_filter, agreement):
    """Format rating and agreement tables from a match log."""
    records = MatchLog(log_path).load()
    if agreement:
        judge_a, judge_b = agreement
        records_a = [r for r in records if r.judge_id == judge_a]
        records_b = [r for r in records if r.judge_id == judge_b]
        report = compute_agreement(records_a, records_b)
        click.echo(format_agreement_table(report))
        return
    if judge_filter:
        records = [r for r in records if r.judge_id == judge_filter]
    config = EloConfig(
        initial_rating=initial_rating, k_factor=k_factor, shuffles=shuffles, seed=seed
    )
    table = compute_elo(records, config)
    click.echo(format_elo_table(table))


@main.command("arena-serve")
@click.argument("methods_dir", type=click.Path(exists=True, file_okay=False))
@click.argument("topics_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--track", type=click.Choice([t.value for t in Track]), default=Track.IDEA.value, show_default=True)
@click.option("--log", "log_path", default="matches.jsonl", show_default=True)
@click.option("--port", default=8350, show_default=True)
@click.option("--seed", default=0, show_default=True, help="session-shuffle seed")
@_handle_errors
def arena_serve(methods_dir, topics_file, track, log_path, port, seed):
    """Serve the blind human-judging UI until the schedule is judged."""
    outputs = MethodOutputs(methods_dir)
    topics = load_topics(topics_file)
    service = JudgingService(
        outputs,
        outputs.method_ids(),
        topics,
        Track(track),
        MatchLog(log_path),
        seed=seed,
    )
    if service.pending_count() == 0:
        raise ValidationError("no pending matches: the schedule is fully judged")
    import uvicorn

    app = create_app(service, static_dir=default_static_dir())
    click.echo(f"serving on http://127.0.0.1:{port} ({service.pending_count()} pending)")
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")


@main.command("extract-baseline")
@click.argument("paper_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", default=None, help="output record path (defaults next to input)")
@_handle_errors
def extract_baseline_cmd(paper_file, out_path):
    """Extract topic, idea, and experiment steps from a real paper.

    PAPER_FILE is JSON with "title", "abstract", "text", and optionally
    "introduction".
    """
    data = json.loads(Path(paper_file).read_text(encoding="utf-8"))
    for required in ("title", "abstract", "text"):
        if not data.get(required):
            raise ValidationError(f"paper file is missing {required!r}")
    config = PipelineConfig()
    runtime = build_runtime(config, store_root="runs", cache_dir=None)
    record = extract_baseline(
        runtime.gateway,
        paper_text=data["text"],
        title=data["title"],
        abstract=data["abstract"],
        introduction=data.get("introduction", ""),
    )
    target = Path(out_path) if out_path else Path(paper_file).with_suffix(".baseline.json")
    target.write_text(
        json.dumps(record.to_dict(), ensure_ascii=False, indent=2), encoding="utf-8"
    )
    click.echo(f"baseline record: {target}")


if __name__ == "__main__":
    main()
