import json
import signal
import socket
import subprocess
import sys
import time
import urllib.request

import pytest
from click.testing import CliRunner

from labassess.cli import main


def write_corpus(path, records):
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record) + "\n")


def record(i, category="Easy", question=None, answer=None, **marks):
    return {
        "Id": f"q{i}",
        "question": question or f"implement a widget number {i} with its own distinct tokens t{i}",
        "answer": answer or f"def solve_{i}(x):\n    # answer {i}\n    return x + {i}\n",
        "category": category,
        **marks,
    }


@pytest.fixture
def runner():
    return CliRunner()


def test_ingest_counts(tmp_path, runner):
    data = tmp_path / "data.jsonl"
    write_corpus(data, [record(1), record(2, "Medium"), record(3, "Hard")])
    out = tmp_path / "out"
    result = runner.invoke(main, ["ingest", "--data", str(data), "--out", str(out)])
    assert result.exit_code == 0, result.output
    summary = json.loads((out / "ingest_summary.json").read_text())
    assert summary["ingested"] == 3
    assert sum(summary["per_category"].values()) == 3
    assert (out / "corpus.jsonl").exists()
    assert "seed" in summary["metadata"]


def test_ingest_rejects_bad_line_with_number(tmp_path, runner):
    data = tmp_path / "data.jsonl"
    lines = [json.dumps(record(1)), "{broken json", json.dumps(record(2))]
    data.write_text("\n".join(lines) + "\n")
    out = tmp_path / "out"
    result = runner.invoke(main, ["ingest", "--data", str(data), "--out", str(out)])
    assert result.exit_code == 0
    summary = json.loads((out / "ingest_summary.json").read_text())
    assert summary["ingested"] == 2
    assert summary["rejected"][0]["line"] == 2
    assert "line 2" in result.output


def test_ingest_50_record_histogram_manual_tally(tmp_path, runner):
    records = (
        [record(i, "Easy") for i in range(20)]
        + [record(100 + i, "Medium") for i in range(18)]
        + [record(200 + i, "Hard") for i in range(12)]
    )
    data = tmp_path / "data.jsonl"
    write_corpus(data, records)
    out = tmp_path / "out"
    result = runner.invoke(main, ["ingest", "--data", str(data), "--out", str(out)])
    assert result.exit_code == 0
    summary = json.loads((out / "ingest_summary.json").read_text())
    assert summary["per_category"] == {"Easy": 20, "Medium": 18, "Hard": 12}


def test_ingest_missing_file_exit_2(tmp_path, runner):
    result = runner.invoke(main, ["ingest", "--data", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path)])
    assert result.exit_code == 2


def test_dedup_identical_pair(tmp_path, runner):
    data = tmp_path / "data.jsonl"
    text = "implement a decision tree on iris and report accuracy"
    write_corpus(data, [record(1, question=text), record(2, question=text)])
    out = tmp_path / "out"
    result = runner.invoke(main, ["dedup", "--data", str(data), "--out", str(out), "--threshold", "0.9"])
    assert result.exit_code == 0
    manifest = json.loads((out / "drop_manifest.json").read_text())
    assert manifest["kept"] == 1
    assert manifest["dropped"] == [{"id": "q2", "duplicate_of": "q1"}]
    kept_lines = (out / "kept.jsonl").read_text().strip().split("\n")
    assert len(kept_lines) == 1


def test_dedup_all_distinct(tmp_path, runner):
    data = tmp_path / "data.jsonl"
    write_corpus(data, [record(i) for i in range(6)])
    out = tmp_path / "out"
    result = runner.invoke(main, ["dedup", "--data", str(data), "--out", str(out)])
    assert result.exit_code == 0
    manifest = json.loads((out / "drop_manifest.json").read_text())
    assert manifest["kept"] == 6
    assert manifest["dropped"] == []


def test_dedup_bad_threshold_exit_1(tmp_path, runner):
    data = tmp_path / "data.jsonl"
    write_corpus(data, [record(1)])
    result = runner.invoke(main, ["dedup", "--data", str(data), "--out", str(tmp_path / "o"), "--threshold", "0"])
    assert result.exit_code == 1


def test_train_constant_labels_zero_rmse(tmp_path, runner):
    data = tmp_path / "data.jsonl"
    write_corpus(data, [record(i, marksFaculty=70) for i in range(8)])
    out = tmp_path / "out"
    result = runner.invoke(
        main,
        ["train", "--data", str(data), "--out", str(out),
         "--trees", "10", "--depth", "2", "--folds", "2"],
    )
    assert result.exit_code == 0, result.output
    report = json.loads((out / "cv_report.json").read_text())
    assert report["mean_rmse"] == pytest.approx(0.0, abs=1e-9)
    model = json.loads((out / "model.json").read_text())
    assert model["base_prediction"] == pytest.approx(70.0)
    assert (out / "errors.csv").read_text().startswith("# metadata {")


def test_train_rerun_byte_identical(tmp_path, runner):
    data = tmp_path / "data.jsonl"
    write_corpus(
        data,
        [record(i, marksFaculty=40 + 3 * (i % 9), answer="x = %d\n" % i + "y = x * 2\n" * (i % 5))
         for i in range(14)],
    )
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        result = runner.invoke(
            main,
            ["train", "--data", str(data), "--out", str(out),
             "--trees", "15", "--depth", "3", "--folds", "3", "--seed", "42"],
        )
        assert result.exit_code == 0, result.output
    assert (out1 / "model.json").read_bytes() == (out2 / "model.json").read_bytes()
    assert (out1 / "cv_report.json").read_bytes() == (out2 / "cv_report.json").read_bytes()
    assert (out1 / "errors.csv").read_bytes() == (out2 / "errors.csv").read_bytes()


def test_train_too_few_rows_exit_1(tmp_path, runner):
    data = tmp_path / "data.jsonl"
    write_corpus(data, [record(1, marksFaculty=70), record(2)])
    result = runner.invoke(main, ["train", "--data", str(data), "--out", str(tmp_path / "o")])
    assert result.exit_code == 1


def test_agreement_identical_columns(tmp_path, runner):
    data = tmp_path / "data.jsonl"
    write_corpus(
        data,
        [record(i, marksAI=m, marksFaculty=m) for i, m in enumerate([10, 35, 62, 88])],
    )
    out = tmp_path / "out"
    result = runner.invoke(main, ["agreement", "--data", str(data), "--out", str(out)])
    assert result.exit_code == 0
    document = json.loads((out / "agreement.json").read_text())
    assert document["pearson_r"] == pytest.approx(1.0)
    assert document["spearman_rho"] == pytest.approx(1.0)
    assert document["cohen_kappa"] == pytest.approx(1.0)
    assert (out / "scatter.csv").exists()


def test_agreement_matches_analytics_oracle(tmp_path, runner):
    from labassess.analytics import agreement_report

    marks = [(82, 85), (45, 40), (66, 70), (90, 95), (55, 52), (30, 38),
             (75, 72), (60, 65), (48, 44), (88, 84), (20, 25), (70, 68),
             (35, 30), (95, 92), (52, 58), (64, 60), (78, 82), (42, 45),
             (58, 55), (85, 88)]
    data = tmp_path / "data.jsonl"
    write_corpus(data, [record(i, marksAI=a, marksFaculty=b) for i, (a, b) in enumerate(marks)])
    out = tmp_path / "out"
    result = runner.invoke(main, ["agreement", "--data", str(data), "--out", str(out)])
    assert result.exit_code == 0
    document = json.loads((out / "agreement.json").read_text())
    expected = agreement_report([(float(a), float(b)) for a, b in marks])
    assert document["pearson_r"] == pytest.approx(expected.pearson_r, abs=1e-12)
    assert document["spearman_rho"] == pytest.approx(expected.spearman_rho, abs=1e-12)
    assert document["cohen_kappa"] == pytest.approx(expected.cohen_kappa, abs=1e-12)
    assert document["n_pairs"] == 20


def test_agreement_single_row_exit_1(tmp_path, runner):
    data = tmp_path / "data.jsonl"
    write_corpus(data, [record(1, marksAI=80, marksFaculty=82)])
    result = runner.invoke(main, ["agreement", "--data", str(data), "--out", str(tmp_path / "o")])
    assert result.exit_code == 1


def test_qa_sim_report(tmp_path, runner):
    data = tmp_path / "data.jsonl"
    write_corpus(data, [record(i) for i in range(5)])
    out = tmp_path / "out"
    result = runner.invoke(main, ["qa-sim", "--data", str(data), "--out", str(out)])
    assert result.exit_code == 0
    document = json.loads((out / "qa_similarity.json").read_text())
    assert document["pair_count"] == 5
    assert len(document["histogram"]) == 20
    assert sum(document["histogram"]) == 5


def test_env_var_flags(tmp_path, runner):
    data = tmp_path / "data.jsonl"
    write_corpus(data, [record(1), record(2)])
    out = tmp_path / "out"
    result = runner.invoke(
        main, ["ingest"], env={"LABASSESS_INGEST_DATA": str(data), "LABASSESS_INGEST_OUT": str(out)}
    )
    assert result.exit_code == 0, result.output
    assert (out / "corpus.jsonl").exists()


def _free_port():
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def _wait_healthz(port, timeout=20.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        try:
            with urllib.request.urlopen(f"http://127.0.0.1:{port}/healthz", timeout=1) as response:
                return json.loads(response.read())
        except Exception:
            time.sleep(0.2)
    raise TimeoutError("server did not come up")


def test_serve_healthz_and_model_missing(tmp_path):
    port = _free_port()
    data_dir = tmp_path / "svc"
    data_dir.mkdir()
    (data_dir / "users.jsonl").write_text(
        json.dumps({"user_id": "prof", "password": "pw", "role": "Faculty"}) + "\n"
    )
    process = subprocess.Popen(
        [sys.executable, "-m", "labassess.cli", "serve",
         "--data", str(data_dir), "--addr", f"127.0.0.1:{port}"],
        stdout=subprocess.PIPE, stderr=subprocess.PIPE,
    )
    try:
        body = _wait_healthz(port)
        assert body["status"] == "ok"
        assert body["grading_enabled"] is False  # no --model: grading disabled
        # login works against bootstrapped users
        request = urllib.request.Request(
            f"http://127.0.0.1:{port}/login",
            data=json.dumps({"username": "prof", "password": "pw"}).encode(),
            headers={"Content-Type": "application/json"},
        )
        with urllib.request.urlopen(request, timeout=3) as response:
            assert json.loads(response.read())["role"] == "Faculty"
    finally:
        process.send_signal(signal.SIGTERM)
        process.wait(timeout=10)
    # the event log survived shutdown and replays
    assert (data_dir / "events.jsonl").exists()
    from labassess.labsvc import FileEventLog, LabService

    restored = LabService(log=FileEventLog(data_dir / "events.jsonl"))
    assert "prof" in restored._users
