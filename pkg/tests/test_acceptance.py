"""Acceptance suite: one test per gate criterion, each printing a
pass/fail line and enforcing its runtime budget. Expected values come
from hand computation or an independent oracle coded inline, never from
the implementation under test.
"""

import json
import time
from datetime import datetime, timezone

import numpy as np
import pytest
from click.testing import CliRunner

from labassess import analytics, genpipe, textsim
from labassess.cli import main as cli_main
from labassess.core import Difficulty, GeneratorBackend, Lab, LabMode, LabState, Role
from labassess.evaluator import GbtConfig, cross_validate, train_gbt
from labassess.evaluator.gbt import _apply_tree
from labassess.labsvc import FileEventLog, LabService, ROUTE_ALLOWED_ROLES
from labassess.labsvc.service import PUBLIC, ForbiddenError

from conftest import FakeClock
from test_gbt import exhaustive_split_oracle, fv_from_values, toy_rows, DEPTH1_CONFIG, TOY_Y


class budget:
    """Assert the criterion body stays inside its runtime budget."""

    def __init__(self, name: str, seconds: float):
        self.name = name
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc_type is None:
            assert elapsed < self.seconds, f"{self.name} took {elapsed:.1f}s, budget {self.seconds}s"
            print(f"[PASS] {self.name} ({elapsed:.2f}s < {self.seconds:.0f}s)")
        else:
            print(f"[FAIL] {self.name} ({elapsed:.2f}s)")
        return False


# ---------------------------------------------------------------------------
# criterion 1: statistics fixtures


def test_criterion_statistics_fixtures():
    with budget("statistics fixtures", 1.0):
        # exact-arithmetic cases: every intermediate is a dyadic rational
        x = [1.0, 2.0, 3.0, 4.0]
        assert analytics.pearson(x, [2 * v + 3 for v in x]).value == 1.0
        assert analytics.pearson(x, [-v for v in x]).value == -1.0
        degenerate = analytics.pearson([5.0, 5.0, 5.0], x[:3])
        assert degenerate.value == 0.0 and degenerate.zero_variance
        assert analytics.spearman(x, [v**3 + 1 for v in x]).value == 1.0
        assert analytics.spearman(x, list(reversed(x))).value == -1.0
        assert analytics.cohen_kappa([5.0, 45.0, 85.0], [15.0, 55.0, 95.0]).value == 1.0

        # hand-computed oracles, frozen from exact rational evaluation
        assert analytics.pearson([1, 2, 3, 5], [2, 1, 4, 5]).value == pytest.approx(
            0.8552359741197579, abs=1e-9
        )
        assert analytics.pearson(
            [10, 20, 30, 40, 50], [12, 25, 31, 38, 59]
        ).value == pytest.approx(0.9727272727272728, abs=1e-9)
        assert analytics.pearson([3, 1, 4, 1, 5], [9, 2, 6, 5, 3]).value == pytest.approx(
            0.15309310892394865, abs=1e-9
        )

        assert analytics.spearman([1, 2, 2, 4], [10, 20, 30, 40]).value == pytest.approx(
            0.9486832980505138, abs=1e-9
        )
        assert analytics.spearman([1, 1, 2, 3], [2, 2, 2, 5]).value == pytest.approx(
            0.816496580927726, abs=1e-9
        )
        # hand ranks: x=(3,1,4,1,5) -> (3,1.5,4,1.5,5); y=(9,2,6,5,3) -> (5,1,4,3,2)
        assert analytics.spearman(
            [3, 1, 4, 1, 5], [9, 2, 6, 5, 3]
        ).value == pytest.approx(analytics.pearson([3, 1.5, 4, 1.5, 5], [5, 1, 4, 3, 2]).value, abs=1e-9)

        assert analytics.cohen_kappa(
            [10.0, 30.0, 55.0, 65.0, 85.0, 90.0], [15.0, 35.0, 45.0, 75.0, 65.0, 95.0]
        ).value == pytest.approx(23 / 29, abs=1e-9)
        assert analytics.cohen_kappa(
            [5.0, 25.0, 45.0, 61.0, 82.0, 99.0, 41.0, 78.0],
            [18.0, 22.0, 58.0, 79.0, 95.0, 88.0, 35.0, 60.0],
        ).value == pytest.approx(43 / 51, abs=1e-9)
        # third fixture: bands a=(0,0,2,4), b=(0,2,2,3); po=2/4,
        # pe = (2/4)(1/4) + (1/4)(2/4) = 4/16, so kappa = (1/2 - 1/4)/(3/4) = 1/3
        assert analytics.cohen_kappa(
            [10.0, 10.0, 50.0, 90.0], [10.0, 50.0, 50.0, 70.0]
        ).value == pytest.approx(1 / 3, abs=1e-9)


# ---------------------------------------------------------------------------
# criterion 2: GBT oracle equivalence


def test_criterion_gbt_oracle_equivalence():
    with budget("gbt oracle equivalence", 30.0):
        # depth-1 training on the two-cluster toy set == exhaustive oracle
        rows = toy_rows()
        model = train_gbt(rows, DEPTH1_CONFIG, seed=42)
        X = np.array([fv.to_array() for fv, _ in rows])
        base, best = exhaustive_split_oracle(X, TOY_Y)
        tree = model.trees[0]
        assert model.base_prediction == base == 50.0
        assert tree.feature == best[1]
        assert tree.threshold == best[2]
        assert tree.left.value == pytest.approx(best[3], abs=1e-12)
        assert tree.right.value == pytest.approx(best[4], abs=1e-12)
        from labassess.evaluator import predict

        assert predict(model, rows[0][0]) == pytest.approx(20.0, abs=1e-9)

        # constant-target training predicts the constant everywhere
        rng = np.random.default_rng(0)
        const_rows = [
            (fv_from_values(list(rng.uniform(0, 1, 7)) + [0.5, 0.5, 2.0]), 70.0)
            for _ in range(20)
        ]
        const_model = train_gbt(
            const_rows, GbtConfig(n_trees=30, max_depth=4, subsample=1.0, colsample=1.0), seed=42
        )
        for fv, _ in const_rows:
            assert predict(const_model, fv) == pytest.approx(70.0, abs=1e-9)

        # training MSE non-increasing across 500 rounds, 200-row synthetic
        rng = np.random.default_rng(42)
        telescope_rows = []
        for _ in range(200):
            values = [
                float(rng.integers(1, 120)), float(rng.integers(5, 400)),
                float(rng.integers(1, 60)), float(rng.integers(0, 7)),
                float(rng.integers(0, 25)), float(rng.uniform(0, 0.5)),
                float(rng.uniform(5, 80)), float(rng.uniform(0, 1)),
                float(rng.uniform(0, 1)), float(rng.integers(1, 4)),
            ]
            target = float(np.clip(15 + 50 * values[8] + 20 * values[7] + rng.normal(0, 5), 0, 100))
            telescope_rows.append((fv_from_values(values), target))
        config = GbtConfig(n_trees=500, max_depth=6, learning_rate=0.05, subsample=1.0, colsample=1.0)
        tele_model = train_gbt(telescope_rows, config, seed=42)
        Xt = np.array([fv.to_array() for fv, _ in telescope_rows])
        yt = np.array([t for _, t in telescope_rows])
        preds = np.full(len(yt), tele_model.base_prediction)
        mse = float(np.mean((yt - preds) ** 2))
        for round_index, tree in enumerate(tele_model.trees):
            preds += tele_model.learning_rate * _apply_tree(tree, Xt)
            new_mse = float(np.mean((yt - preds) ** 2))
            assert new_mse <= mse + 1e-9, f"MSE rose at round {round_index}"
            mse = new_mse


# ---------------------------------------------------------------------------
# criterion 3: cross-validation pipeline


def test_criterion_cross_validation_pipeline():
    with budget("cross-validation pipeline", 120.0):
        rng = np.random.default_rng(42)
        rows = []
        for _ in range(500):
            values = [
                float(rng.integers(1, 120)), float(rng.integers(5, 400)),
                float(rng.integers(1, 60)), float(rng.integers(0, 7)),
                float(rng.integers(0, 25)), float(rng.uniform(0, 0.5)),
                float(rng.uniform(5, 80)), float(rng.uniform(0, 1)),
                float(rng.uniform(0, 1)), float(rng.integers(1, 4)),
            ]
            target = (
                8.0 + 2.4 * values[3] + 2.2 * values[4] + 0.2 * values[6] + 8.0 * values[7]
                + float(rng.normal(0, 3.0))
            )
            rows.append((fv_from_values(values), float(np.clip(target, 0, 100))))

        report = cross_validate(rows, GbtConfig(), k=5, seed=42)
        assert report.r_squared >= 0.8
        assert report.mean_rmse <= 4.5

        error_rows = [
            (f"r{i:03d}", rows[i][1], report.predictions[i], "synthetic") for i in range(500)
        ]
        histogram = analytics.error_report(error_rows, k=10)
        assert abs(histogram.mean_error) <= 0.5
        assert sum(histogram.histogram) + histogram.underflow + histogram.overflow == 500


# ---------------------------------------------------------------------------
# criterion 4: dedup property at scale


def _dedup_corpus():
    """1,000 questions: 800 distinct template draws + 200 planted near-dupes."""
    texts = []
    keyword_pool = [
        ("decision tree",), ("random forest",), ("knn",), ("svm",), ("linear regression",),
        ("logistic regression",), ("cnn",), ("rnn",), ("lstm",), ("optimizer",),
    ]
    attempt = 0
    seen = set()
    while len(texts) < 800:
        keywords = keyword_pool[attempt % len(keyword_pool)]
        tier = (Difficulty.EASY, Difficulty.MEDIUM, Difficulty.HARD)[attempt % 3]
        question = genpipe.template_generate(keywords, tier, 1234, attempt).question_text
        attempt += 1
        if question not in seen:
            seen.add(question)
            texts.append(question)
    import random as pyrandom

    rng = pyrandom.Random(99)
    questions = [(f"q{i:04d}", t) for i, t in enumerate(texts)]
    for j in range(200):
        src_id, src_text = questions[rng.randrange(800)]
        mutated = src_text + " " + rng.choice(["please", "kindly", "carefully", "today"])
        questions.append((f"dup{j:03d}", mutated))
    return questions


def test_criterion_dedup_property_at_scale():
    with budget("dedup property", 60.0):
        questions = _dedup_corpus()
        assert len(questions) == 1000
        threshold = 0.85
        stats = textsim.CorpusStats.from_texts(t for _, t in questions)
        vec = textsim.TfidfVectorizer(stats)
        result = textsim.dedup_filter(questions, threshold, vectorizer=vec)

        # planted near-dupes must actually sit above the threshold
        by_id = dict(questions)
        dropped_ids = {d for d, _ in result.dropped}
        assert len(dropped_ids) >= 200

        # O(n^2) brute-force check: kept set pairwise below threshold
        kept_vectors = [vec.vectorize(by_id[k]) for k in result.kept]
        worst = 0.0
        for i in range(len(kept_vectors)):
            vi = kept_vectors[i]
            for j in range(i + 1, len(kept_vectors)):
                worst = max(worst, textsim.cosine(vi, kept_vectors[j]))
        assert worst < threshold

        # idempotent
        again = textsim.dedup_filter(
            [(k, by_id[k]) for k in result.kept], threshold, vectorizer=vec
        )
        assert again.kept == result.kept
        assert again.dropped == ()

        # exact match against an independently coded greedy oracle
        oracle_kept, oracle_dropped = [], []
        oracle_vectors = []
        for qid, text in questions:
            v = vec.vectorize(text)
            hit = None
            for kid, kv in zip(oracle_kept, oracle_vectors):
                if textsim.cosine(v, kv) >= threshold:
                    hit = kid
                    break
            if hit is None:
                oracle_kept.append(qid)
                oracle_vectors.append(v)
            else:
                oracle_dropped.append((qid, hit))
        assert list(result.kept) == oracle_kept
        assert list(result.dropped) == oracle_dropped


# ---------------------------------------------------------------------------
# criterion 5: allocation uniqueness


def test_criterion_allocation_uniqueness():
    with budget("allocation uniqueness", 60.0):
        lab = Lab(
            lab_id="lab-accept",
            title="Allocation acceptance",
            topic_keywords=("decision tree",),
            difficulty=Difficulty.MEDIUM,
            viva_duration_minutes=15,
            mode=LabMode.PROCTORED,
        )
        roster = [f"student-{i:02d}" for i in range(50)]
        fixed_now = datetime(2026, 3, 2, 12, 0, 0, tzinfo=timezone.utc)
        new_lab, allocations = genpipe.allocate_lab(lab, roster, seed=42, now=fixed_now)
        assert new_lab.state is LabState.ALLOCATED
        assert len(allocations) == 50
        assert [a.student_id for a in allocations] == roster

        vec = textsim.TfidfVectorizer()
        vectors = [vec.vectorize(a.question_text) for a in allocations]
        worst = 0.0
        for i in range(50):
            for j in range(i + 1, 50):
                worst = max(worst, textsim.cosine(vectors[i], vectors[j]))
        assert worst < genpipe.DEFAULT_DEDUP_THRESHOLD

        def serialize(allocs):
            return json.dumps(
                [
                    {
                        "allocation_id": a.allocation_id,
                        "student_id": a.student_id,
                        "question_text": a.question_text,
                        "rubric_answer": a.rubric_answer,
                        "generated_at": a.generated_at.isoformat(),
                    }
                    for a in allocs
                ],
                sort_keys=True,
            )

        _, repeat = genpipe.allocate_lab(lab, roster, seed=42, now=fixed_now)
        assert serialize(repeat) == serialize(allocations)


# ---------------------------------------------------------------------------
# criterion 6: service end-to-end


def test_criterion_service_end_to_end(tiny_model, tmp_path):
    with budget("service end-to-end", 120.0):
        clock = FakeClock()
        log_path = tmp_path / "events.jsonl"
        service = LabService(log=FileEventLog(log_path), model=tiny_model, clock=clock, seed=42)
        service.add_user("prof", "prof-pass", Role.FACULTY, "Professor")
        for i in range(1, 4):
            service.add_user(f"s{i}", f"s{i}-pass", Role.STUDENT)

        checkpoints = {}

        def checkpoint():
            checkpoints[len(service._events)] = service.state_fingerprint()

        # faculty: create -> allocate -> activate
        faculty = service.login("prof", "prof-pass").token
        lab = service.create_lab(
            faculty,
            title="Acceptance lab",
            topic_keywords=["knn"],
            difficulty="Easy",
            viva_duration_minutes=15,
            mode="NonProctored",
            section="A",
        )
        checkpoint()
        service.allocate(faculty, lab.lab_id, ["s1", "s2", "s3"])
        service.activate_lab(faculty, lab.lab_id)

        # student: submit -> viva -> report
        student = service.login("s1", "s1-pass").token
        alloc_id = service.list_labs(student)[0]["allocation"]["allocation_id"]
        view = service.submit_code(student, alloc_id, "def fit(x):\n    return x\n", "python")
        checkpoint()
        session_id = view["viva"]["session_id"]
        rubrics = [a for _, a in service._viva_sessions[session_id].questions]
        for index, rubric in enumerate(rubrics):
            result = service.answer_viva(student, session_id, index, rubric)
        viva_score = result["viva_score"]
        assert viva_score == pytest.approx(100.0)

        # final precedence: weighted mix first, then override wins
        mixed = service.submission_view(view["submission_id"])
        expected_mix = (1 - lab.viva_weight) * mixed["ai_score"] + lab.viva_weight * viva_score
        assert mixed["final_score"] == pytest.approx(expected_mix)
        service.override_score(faculty, view["submission_id"], 91.0, "acceptance check")
        checkpoint()
        overridden = service.submission_view(view["submission_id"])
        assert overridden["final_score"] == 91.0
        assert overridden["viva_score"] == pytest.approx(100.0)  # mix preserved underneath

        report = service.class_report(faculty, lab.lab_id)
        assert report.ranking[0][1] == view["submission_id"]

        # crash replay at three recorded event boundaries
        lines = log_path.read_text().strip().split("\n")
        assert len(checkpoints) == 3
        for count, expected in checkpoints.items():
            crash_file = tmp_path / f"crash-{count}.jsonl"
            crash_file.write_text("\n".join(lines[:count]) + "\n")
            recovered = LabService(log=FileEventLog(crash_file), model=tiny_model, seed=42)
            assert recovered.state_fingerprint() == expected

        # authorization walk: deny-by-default over all (route, role) pairs
        tokens = {Role.FACULTY: faculty, Role.STUDENT: student}
        for route, allowed in ROUTE_ALLOWED_ROLES.items():
            if allowed is PUBLIC:
                assert service.authorize(None, route) is None
                continue
            for role, token in tokens.items():
                if role in allowed:
                    assert service.authorize(token, route).role is role
                else:
                    with pytest.raises(ForbiddenError):
                        service.authorize(token, route)
        with pytest.raises(ForbiddenError):
            service.authorize(faculty, "unlisted_route")


# ---------------------------------------------------------------------------
# criterion 7: determinism sweep


def test_criterion_determinism_sweep(tmp_path):
    with budget("determinism sweep", 60.0):
        # cmd_train: byte-identical artifacts for the same seed
        data = tmp_path / "corpus.jsonl"
        with open(data, "w", encoding="utf-8") as handle:
            for i in range(16):
                handle.write(
                    json.dumps(
                        {
                            "Id": f"q{i}",
                            "question": f"implement routine {i} with tokens t{i} u{i}",
                            "answer": "def solve(x):\n" + f"    # step {i}\n" + "    return x\n" * (1 + i % 4),
                            "category": ["Easy", "Medium", "Hard"][i % 3],
                            "marksFaculty": 40 + (i * 7) % 55,
                        }
                    )
                    + "\n"
                )
        runner = CliRunner()
        outputs = []
        for name in ("first", "second"):
            out = tmp_path / name
            result = runner.invoke(
                cli_main,
                ["train", "--data", str(data), "--out", str(out),
                 "--trees", "25", "--depth", "3", "--folds", "4", "--seed", "42"],
            )
            assert result.exit_code == 0, result.output
            outputs.append(out)
        for artifact in ("model.json", "cv_report.json", "errors.csv"):
            assert (outputs[0] / artifact).read_bytes() == (outputs[1] / artifact).read_bytes()

        # generate_batch: byte-identical for the same seed
        request = genpipe.GenerationRequest(
            topic_keywords=("svm", "decision tree"),
            difficulty=Difficulty.HARD,
            student_count=25,
            seed=42,
            backend=GeneratorBackend.TEMPLATE,
        )
        first = genpipe.batch_to_json(genpipe.generate_batch(request))
        second = genpipe.batch_to_json(genpipe.generate_batch(request))
        assert first == second
