/** Student contract tests: My Labs, submit, timed viva, report. */

import { beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import type { VivaView } from "../src/types.js";
import {
  labListView,
  studentLabView,
  submissionReportView,
  vivaOutcomeView,
} from "../src/views.js";
import { facultyClient, studentClient } from "./helpers.js";

let faculty: ApiClient;

beforeAll(async () => {
  faculty = await facultyClient();
});

describe("student flow", () => {
  it("shows an empty state without labs", async () => {
    const student = await studentClient("s2");
    const labs = (await student.myLabs()).labs.filter((l) => l.title === "no-such-lab");
    expect(labListView(labs, "Student")).toContain('data-field="empty_state"');
  });

  it("My Labs -> open allocation -> submit -> viva -> report", async () => {
    const created = await faculty.createLab({
      title: "Student flow lab",
      topic_keywords: ["knn"],
      difficulty: "Easy",
      viva_duration_minutes: 15,
      mode: "NonProctored",
      section: "B",
    });
    await faculty.allocate(created.lab_id, ["s2"]);
    await faculty.activate(created.lab_id);

    const student = await studentClient("s2");
    const mine = (await student.myLabs()).labs.find((l) => l.lab_id === created.lab_id)!;
    expect(mine.allocation).toBeDefined();

    // the question on screen is exactly the allocated question
    const labHtml = studentLabView(mine);
    expect(labHtml).toContain('data-field="question_text"');
    expect(labHtml).toContain(
      mine.allocation!.question_text.replace(/&/g, "&amp;").replace(/</g, "&lt;"),
    );

    const submission = await student.submit(
      mine.allocation!.allocation_id,
      "# knn\nimport numpy as np\ndef predict(xs, ys, x, k):\n    d = ((xs - x) ** 2).sum(axis=1)\n    return ys[np.argsort(d)[:k]]\n",
      "python",
    );
    expect(submission.ai_score).not.toBeNull();
    const reportHtml = submissionReportView(submission);
    // displayed numbers are verbatim API values
    expect(reportHtml).toContain(`data-field="ai_score">${String(submission.ai_score)}<`);
    expect(reportHtml).toContain(`data-field="final_score">${String(submission.final_score)}<`);
    expect(reportHtml).toContain(
      `data-field="correctness_score">${String(submission.grade.correctness_score)}<`,
    );
    for (const line of submission.feedback) {
      expect(reportHtml).toContain(line.replace(/&/g, "&amp;"));
    }

    // viva: answer one question at a time, collecting per-question scores
    const viva = submission.viva!;
    expect(viva.state).toBe("Open");
    expect(viva.questions.length).toBe(3);
    const scores = new Map<number, number>();
    let vivaScore: number | null = null;
    let finalView = submission;
    for (let index = 0; index < viva.questions.length; index++) {
      const result = await student.answerViva(
        viva.session_id,
        index,
        "distances to stored rows are sorted and the k closest labels vote on the answer; "
          + "scaling features first keeps the distance meaningful",
      );
      scores.set(index, result.score);
      if (result.submission) {
        vivaScore = result.viva_score ?? null;
        finalView = result.submission;
      }
    }
    expect(vivaScore).not.toBeNull();

    const outcomeHtml = vivaOutcomeView(
      { ...viva, state: "Completed", answered: [0, 1, 2] },
      scores,
      vivaScore,
    );
    for (const score of scores.values()) {
      expect(outcomeHtml).toContain(`data-field="viva_question_score">${String(score)}<`);
    }
    expect(outcomeHtml).toContain(`data-field="viva_score">${String(vivaScore)}<`);

    // the post-viva report shows the new final, verbatim
    const finalHtml = submissionReportView(finalView);
    expect(finalHtml).toContain(`data-field="viva_score">${String(finalView.viva_score)}<`);
    expect(finalHtml).toContain(`data-field="final_score">${String(finalView.final_score)}<`);
  });

  it("renders zeros for unanswered questions when the timer expires", () => {
    // payload shape mirrors the server's Expired accounting (unanswered
    // questions are scored 0, covered by the service's own test suite)
    const expired: VivaView = {
      session_id: "viva-x",
      allocation_id: "alloc-x",
      state: "Expired",
      questions: ["q one", "q two", "q three"],
      answered: [0],
      started_at: "2026-03-02T09:00:00+00:00",
      duration_limit_minutes: 15,
    };
    const scores = new Map<number, number>([[0, 81.5]]);
    const html = vivaOutcomeView(expired, scores, 27.2);
    expect(html).toContain('data-state="Expired"');
    expect(html).toContain(`data-field="viva_question_score">81.5<`);
    // both unanswered questions render a zero, not a blank
    const zeroCells = html.match(/data-field="viva_question_score">0</g) ?? [];
    expect(zeroCells).toHaveLength(2);
    expect(html).toContain(`data-field="viva_score">27.2<`);
  });
});
