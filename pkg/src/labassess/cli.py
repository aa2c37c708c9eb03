"""Batch front door: ingest, dedup, train, agreement, QA similarity, serve.

Every command is deterministic given (inputs, seed) and stamps a metadata
block (seed, config hash, input digest) into each artifact it writes.
Exit codes: 0 success, 1 validation error, 2 I/O error. Every flag can
also be set through the LABASSESS_* environment variables.
"""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path

import click

from . import analytics, core, textsim
from .evaluator import (
    GbtConfig,
    cross_validate,
    extract_features,
    load_model,
    model_to_json,
    train_gbt,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2

CONTEXT_SETTINGS = {"auto_envvar_prefix": "LABASSESS", "help_option_names": ["-h", "--help"]}


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _input_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _metadata(seed: int, config: dict, data: Path) -> dict:
    return {
        "seed": seed,
        "config_hash": _config_hash(config),
        "input_digest": _input_digest(data),
    }


def _write_json(path: Path, document: dict) -> None:
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_csv(path: Path, metadata: dict, body: str) -> None:
    stamp = json.dumps(metadata, sort_keys=True, separators=(",", ":"))
    path.write_text(f"# metadata {stamp}\n{body}", encoding="utf-8")


def _load_corpus(data: Path) -> core.CorpusLoadResult:
    if not data.exists():
        _fail(EXIT_IO, f"no such file: {data}")
    try:
        return core.load_corpus(data, strict=False)
    except OSError as exc:
        _fail(EXIT_IO, str(exc))


@click.group(context_settings=CONTEXT_SETTINGS)
def main():
    """Lab assessment toolkit."""


@main.command()
@click.option("--data", required=True, type=click.Path(path_type=Path), help="input JSONL corpus")
@click.option("--out", required=True, type=click.Path(path_type=Path), help="output directory")
@click.option("--seed", default=42, show_default=True)
def ingest(data: Path, out: Path, seed: int):
    """Validate a corpus and persist it in canonical form."""
    result = _load_corpus(data)
    if not result.records and result.rejected:
        for number, reason in result.rejected:
            click.echo(f"line {number}: {reason}", err=True)
        _fail(EXIT_VALIDATION, "no valid records in corpus")
    out.mkdir(parents=True, exist_ok=True)
    core.save_corpus(result.records, out / "corpus.jsonl")

    counts = {d.value: 0 for d in core.Difficulty}
    for record in result.records:
        counts[record.category.value] += 1
    summary = {
        "metadata": _metadata(seed, {"command": "ingest"}, data),
        "ingested": len(result.records),
        "rejected": [{"line": n, "reason": r} for n, r in result.rejected],
        "per_category": counts,
    }
    _write_json(out / "ingest_summary.json", summary)
    for category, count in counts.items():
        click.echo(f"{category}: {count}")
    for number, reason in result.rejected:
        click.echo(f"rejected line {number}: {reason}", err=True)
    click.echo(f"ingested {len(result.records)} records, rejected {len(result.rejected)}")


@main.command()
@click.option("--data", required=True, type=click.Path(path_type=Path))
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.option("--threshold", default=0.85, show_default=True, help="near-duplicate cutoff in (0,1]")
@click.option("--seed", default=42, show_default=True)
def dedup(data: Path, out: Path, threshold: float, seed: int):
    """Drop near-duplicate questions, keeping the first of each cluster."""
    result = _load_corpus(data)
    try:
        outcome = textsim.dedup_filter(
            [(r.id, r.question) for r in result.records], threshold=threshold
        )
    except textsim.BadThresholdError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    out.mkdir(parents=True, exist_ok=True)
    kept_ids = set(outcome.kept)
    core.save_corpus([r for r in result.records if r.id in kept_ids], out / "kept.jsonl")
    manifest = {
        "metadata": _metadata(seed, {"command": "dedup", "threshold": threshold}, data),
        "threshold": threshold,
        "kept": len(outcome.kept),
        "dropped": [{"id": d, "duplicate_of": k} for d, k in outcome.dropped],
    }
    _write_json(out / "drop_manifest.json", manifest)
    click.echo(f"kept {len(outcome.kept)}, dropped {len(outcome.dropped)}")


def _training_rows(records, vectorizer):
    rows = []
    ids = []
    for record in records:
        if record.marks_faculty is None:
            continue
        # bootstrap: the dataset answer stands in for both the graded
        # submission and the rubric it is graded against
        fv = extract_features(
            record.answer, record.question, record.answer, record.category, vectorizer
        )
        rows.append((fv, record.marks_faculty))
        ids.append(record.id)
    return rows, ids


@main.command()
@click.option("--data", required=True, type=click.Path(path_type=Path))
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.option("--seed", default=42, show_default=True)
@click.option("--folds", default=5, show_default=True)
@click.option("--trees", default=500, show_default=True)
@click.option("--depth", default=6, show_default=True)
@click.option("--lr", default=0.05, show_default=True)
@click.option("--subsample", default=0.8, show_default=True)
@click.option("--colsample", default=0.8, show_default=True)
def train(data: Path, out: Path, seed: int, folds: int, trees: int, depth: int,
          lr: float, subsample: float, colsample: float):
    """Cross-validate and train the grading model on faculty-marked rows."""
    result = _load_corpus(data)
    stats = textsim.CorpusStats.from_texts(
        [r.question for r in result.records] + [r.answer for r in result.records]
    )
    vectorizer = textsim.TfidfVectorizer(stats)
    rows, ids = _training_rows(result.records, vectorizer)
    if len(rows) < max(2, folds):
        _fail(EXIT_VALIDATION, f"need at least {max(2, folds)} faculty-marked rows, got {len(rows)}")

    config = GbtConfig(
        n_trees=trees, max_depth=depth, learning_rate=lr, subsample=subsample, colsample=colsample
    )
    config_dict = {
        "command": "train", "folds": folds, "trees": trees, "depth": depth,
        "lr": lr, "subsample": subsample, "colsample": colsample,
    }
    metadata = _metadata(seed, config_dict, data)

    report = cross_validate(rows, config, k=folds, seed=seed)
    model = train_gbt(rows, config, seed=seed)

    out.mkdir(parents=True, exist_ok=True)
    (out / "model.json").write_text(model_to_json(model), encoding="utf-8")
    _write_json(
        out / "cv_report.json",
        {
            "metadata": metadata,
            "fold_rmse": list(report.fold_rmse),
            "mean_rmse": report.mean_rmse,
            "pooled_rmse": report.pooled_rmse,
            "r_squared": report.r_squared,
            "rows": len(rows),
        },
    )
    error_rows = [
        (ids[i], rows[i][1], report.predictions[i], "") for i in range(len(rows))
    ]
    _write_csv(out / "errors.csv", metadata, analytics.error_rows_csv(error_rows))
    click.echo(
        f"rows={len(rows)} mean_rmse={report.mean_rmse:.4f} "
        f"pooled_rmse={report.pooled_rmse:.4f} r_squared={report.r_squared:.4f}"
    )


@main.command()
@click.option("--data", required=True, type=click.Path(path_type=Path))
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.option("--seed", default=42, show_default=True)
def agreement(data: Path, out: Path, seed: int):
    """Agreement statistics between marksAI and marksFaculty."""
    result = _load_corpus(data)
    pairs = [
        (r.marks_ai, r.marks_faculty)
        for r in result.records
        if r.marks_ai is not None and r.marks_faculty is not None
    ]
    try:
        report = analytics.agreement_report(pairs)
    except analytics.TooFewError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    out.mkdir(parents=True, exist_ok=True)
    document = json.loads(analytics.report_to_json(report, "agreement"))
    document["metadata"] = _metadata(seed, {"command": "agreement"}, data)
    _write_json(out / "agreement.json", document)
    _write_csv(out / "scatter.csv", document["metadata"], analytics.scatter_pairs_csv(pairs))
    click.echo(
        f"pairs={report.n_pairs} pearson={report.pearson_r:.4f} "
        f"spearman={report.spearman_rho:.4f} kappa={report.cohen_kappa:.4f}"
    )


@main.command(name="qa-sim")
@click.option("--data", required=True, type=click.Path(path_type=Path))
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.option("--seed", default=42, show_default=True)
def qa_sim(data: Path, out: Path, seed: int):
    """Question-answer similarity distribution over the corpus."""
    result = _load_corpus(data)
    try:
        report = textsim.qa_similarity_report(result.records)
    except textsim.EmptyCorpusError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    out.mkdir(parents=True, exist_ok=True)
    document = {
        "metadata": _metadata(seed, {"command": "qa-sim"}, data),
        "pair_count": report.pair_count,
        "histogram": list(report.histogram),
        "mean": report.mean,
        "std_dev": report.std_dev,
    }
    _write_json(out / "qa_similarity.json", document)
    click.echo(f"pairs={report.pair_count} mean={report.mean:.4f} sd={report.std_dev:.4f}")


def bootstrap_users(service, users_path: Path) -> int:
    """Load dev-bootstrap users (user_id/password/role lines) if present."""
    if not users_path.exists():
        return 0
    added = 0
    with open(users_path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            entry = json.loads(line)
            if entry["user_id"] in service._users:
                continue
            service.add_user(
                entry["user_id"],
                entry["password"],
                core.Role(entry["role"]),
                entry.get("display_name", ""),
            )
            added += 1
    return added


@main.command()
@click.option("--data", required=True, type=click.Path(path_type=Path), help="service data directory")
@click.option("--addr", default="127.0.0.1:8800", show_default=True)
@click.option("--model", "model_path", default=None, type=click.Path(path_type=Path))
@click.option("--seed", default=42, show_default=True)
def serve(data: Path, addr: str, model_path: Path | None, seed: int):
    """Run the lab service over HTTP until interrupted."""
    import uvicorn

    from .labsvc import FileEventLog, LabService, create_app

    model = None
    if model_path is not None:
        if not model_path.exists():
            _fail(EXIT_IO, f"no such model file: {model_path}")
        model = load_model(model_path)
    else:
        click.echo("warning: no --model given; grading routes will return 503", err=True)

    data.mkdir(parents=True, exist_ok=True)
    log = FileEventLog(data / "events.jsonl")
    service = LabService(log=log, model=model, seed=seed)
    added = bootstrap_users(service, data / "users.jsonl")
    if added:
        click.echo(f"bootstrapped {added} users from users.jsonl")

    host, _, port = addr.rpartition(":")
    try:
        uvicorn.run(create_app(service), host=host or "127.0.0.1", port=int(port), log_level="warning")
    except OSError as exc:
        _fail(EXIT_IO, f"cannot bind {addr}: {exc}")
    finally:
        log.close()


if __name__ == "__main__":
    main()
