/** Pure render functions: API payloads in, HTML strings out.
 *
 * No score arithmetic happens here. Every number is printed with
 * show(), which stringifies the API value verbatim, and tagged with a
 * data-field attribute so contract tests can trace each displayed
 * number back to its API field.
 */

import type {
  AllocateSummary,
  ClassReport,
  LabView,
  ProgressProfile,
  SubmissionView,
  VivaView,
} from "./types.js";
import type { ViewState } from "./state.js";
import { allows } from "./state.js";
import { svgHeatmap, svgHistogram, svgProgressLine, svgScatter } from "./charts.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Verbatim projection of an API value; null renders as an em dash. */
export function show(value: number | string | null | undefined): string {
  return value === null || value === undefined ? "&mdash;" : escapeHtml(String(value));
}

function field(name: string, value: number | string | null | undefined): string {
  return `<span data-field="${name}">${show(value)}</span>`;
}

export function loginView(errorMessage = ""): string {
  const error = errorMessage
    ? `<p class="error" data-field="login_error">${escapeHtml(errorMessage)}</p>`
    : "";
  return `
  <section class="login">
    <h1>labassess</h1>
    ${error}
    <form id="login-form">
      <label>Username <input name="username" required></label>
      <label>Password <input name="password" type="password" required></label>
      <button type="submit">Sign in</button>
    </form>
  </section>`;
}

export function navView(state: ViewState): string {
  const links: string[] = [`<a href="#/labs">My Labs</a>`, `<a href="#/progress">Progress</a>`];
  if (allows(state.role, "create_lab")) {
    links.push(`<a href="#/labs/new" data-action="create_lab">Create lab</a>`);
  }
  return `<nav>${links.join(" ")} <span class="whoami">${show(state.userId)} (${show(
    state.role,
  )})</span></nav>`;
}

export function labListView(labs: LabView[], role: ViewState["role"]): string {
  if (labs.length === 0) {
    return `<section class="labs empty" data-field="empty_state">No labs yet.</section>`;
  }
  const rows = labs
    .map(
      (lab) => `
    <tr data-lab="${escapeHtml(lab.lab_id)}">
      <td><a href="#/labs/${escapeHtml(lab.lab_id)}">${escapeHtml(lab.title)}</a></td>
      <td>${escapeHtml(lab.difficulty)}</td>
      <td data-field="lab_state">${escapeHtml(lab.state)}</td>
      <td>${escapeHtml(lab.mode)}</td>
    </tr>`,
    )
    .join("");
  const heading = role === "Faculty" ? "Labs you conduct" : "My Labs";
  return `<section class="labs"><h2>${heading}</h2>
  <table><thead><tr><th>Title</th><th>Difficulty</th><th>State</th><th>Mode</th></tr></thead>
  <tbody>${rows}</tbody></table></section>`;
}

export function createLabFormView(fieldErrors: string[] = [], message = ""): string {
  const mark = (name: string) => (fieldErrors.includes(name) ? ` class="invalid"` : "");
  const banner = message
    ? `<p class="error" data-field="form_error">${escapeHtml(message)}</p>`
    : "";
  return `
  <section class="create-lab">
    <h2>Create lab</h2>
    ${banner}
    <form id="create-lab-form">
      <label${mark("title")}>Title <input name="title"></label>
      <label${mark("topic_keywords")}>Topic keywords (comma separated)
        <input name="topic_keywords" data-invalid="${fieldErrors.includes("topic_keywords")}"></label>
      <label${mark("difficulty")}>Difficulty
        <select name="difficulty"><option>Easy</option><option>Medium</option><option>Hard</option></select></label>
      <label${mark("viva_duration")}>Viva duration (minutes) <input name="viva_duration_minutes" type="number" value="15"></label>
      <label${mark("mode")}>Mode
        <select name="mode"><option>NonProctored</option><option>Proctored</option></select></label>
      <label>Section <input name="section"></label>
      <label>Description <textarea name="description"></textarea></label>
      <label>Instructions <textarea name="instructions"></textarea></label>
      <button type="submit">Create</button>
    </form>
  </section>`;
}

export function allocationTableView(lab: LabView): string {
  const allocations = lab.allocations ?? [];
  const rows = allocations
    .map(
      (entry) => `
    <tr data-allocation="${escapeHtml(entry.allocation_id)}">
      <td>${escapeHtml(entry.student_id)}</td>
      <td class="preview" data-field="question_preview">${escapeHtml(entry.question_text)}</td>
      <td>${entry.submission ? field("final_score", entry.submission.final_score) : "not submitted"}</td>
    </tr>`,
    )
    .join("");
  return `<table class="allocations" data-count="${allocations.length}">
  <thead><tr><th>Student</th><th>Question</th><th>Final</th></tr></thead>
  <tbody>${rows}</tbody></table>`;
}

export function facultyLabDetailView(lab: LabView): string {
  const controls: string[] = [];
  if (lab.state === "Draft") controls.push(`<button data-action="allocate">Allocate</button>`);
  if (lab.state === "Allocated") {
    controls.push(`<button data-action="activate_lab">Activate</button>`);
    controls.push(`<button data-action="deallocate">Deallocate</button>`);
  }
  if (lab.state === "Active") controls.push(`<button data-action="close_lab">Close</button>`);
  return `
  <section class="lab-detail faculty">
    <h2>${escapeHtml(lab.title)} <small data-field="lab_state">${escapeHtml(lab.state)}</small></h2>
    <p>${escapeHtml(lab.difficulty)} | viva ${show(lab.viva_duration_minutes)} min | ${escapeHtml(lab.mode)}</p>
    <div class="controls">${controls.join(" ")}
      <a href="#/labs/${escapeHtml(lab.lab_id)}/report" data-action="class_report">Class report</a></div>
    ${allocationTableView(lab)}
  </section>`;
}

export function allocateSummaryView(summary: AllocateSummary): string {
  const rows = summary.students
    .map(
      (entry) =>
        `<li data-allocation="${escapeHtml(entry.allocation_id)}">${escapeHtml(entry.student_id)}</li>`,
    )
    .join("");
  return `<section class="allocate-summary">
  Allocated ${field("allocated", summary.allocated)} students:
  <ul>${rows}</ul></section>`;
}

export function submissionReportView(submission: SubmissionView): string {
  const feedback = submission.feedback
    .map((line) => `<li data-field="feedback_line">${escapeHtml(line)}</li>`)
    .join("");
  const grade = submission.grade ?? {};
  return `
  <section class="submission-report" data-submission="${escapeHtml(submission.submission_id)}">
    <h3>Report</h3>
    <dl>
      <dt>Correctness</dt><dd>${field("correctness_score", grade.correctness_score ?? null)}</dd>
      <dt>Readability</dt><dd>${field("readability_score", grade.readability_score ?? null)}</dd>
      <dt>Complexity</dt><dd>${field("complexity_score", grade.complexity_score ?? null)}</dd>
      <dt>AI score</dt><dd>${field("ai_score", submission.ai_score)}</dd>
      <dt>Viva score</dt><dd>${field("viva_score", submission.viva_score)}</dd>
      <dt>Faculty override</dt><dd>${field("faculty_override", submission.faculty_override)}</dd>
      <dt>Final</dt><dd>${field("final_score", submission.final_score)}</dd>
    </dl>
    <h4>Feedback and recommendations</h4>
    <ul class="feedback">${feedback}</ul>
  </section>`;
}

export function studentLabView(lab: LabView): string {
  if (!lab.allocation) {
    return `<section class="lab-detail student" data-field="empty_state">No question allocated.</section>`;
  }
  const submission = lab.submission ? submissionReportView(lab.submission) : "";
  const submitForm =
    lab.state === "Active" && !lab.submission
      ? `<form id="submit-form" data-allocation="${escapeHtml(lab.allocation.allocation_id)}">
           <textarea name="code_text" rows="14"></textarea>
           <input name="language_tag" value="python">
           <button type="submit" data-action="submit_code">Submit</button>
         </form>`
      : "";
  return `
  <section class="lab-detail student">
    <h2>${escapeHtml(lab.title)} <small data-field="lab_state">${escapeHtml(lab.state)}</small></h2>
    <article class="question" data-field="question_text">${escapeHtml(lab.allocation.question_text)}</article>
    ${submitForm}
    ${submission}
  </section>`;
}

/** One-question-at-a-time viva screen with the countdown readout. */
export function vivaQuestionView(viva: VivaView, index: number, clockDisplay: string): string {
  const question = viva.questions[index] ?? "";
  return `
  <section class="viva" data-session="${escapeHtml(viva.session_id)}">
    <header>
      <span class="counter">Question ${index + 1} of ${viva.questions.length}</span>
      <span class="countdown" data-field="countdown">${escapeHtml(clockDisplay)}</span>
    </header>
    <p class="viva-question" data-field="viva_question">${escapeHtml(question)}</p>
    <form id="viva-form" data-index="${index}">
      <textarea name="answer_text" rows="6"></textarea>
      <button type="submit" data-action="answer_viva">Answer</button>
    </form>
  </section>`;
}

/** Per-question outcome; unanswered questions display the server's zero. */
export function vivaOutcomeView(
  viva: VivaView,
  scores: Map<number, number>,
  vivaScore: number | null,
): string {
  const rows = viva.questions
    .map((question, index) => {
      const answered = scores.has(index);
      // expired sessions score unanswered questions as 0 on the server
      const value = answered ? scores.get(index)! : viva.state === "Expired" ? 0 : null;
      const status = answered ? "answered" : viva.state === "Expired" ? "expired" : "pending";
      return `<tr class="${status}"><td>${escapeHtml(question)}</td>
      <td data-field="viva_question_score">${show(value)}</td></tr>`;
    })
    .join("");
  return `
  <section class="viva-outcome" data-state="${escapeHtml(viva.state)}">
    <h3>Viva ${escapeHtml(viva.state)}</h3>
    <table><thead><tr><th>Question</th><th>Score</th></tr></thead><tbody>${rows}</tbody></table>
    <p>Viva score: ${field("viva_score", vivaScore)}</p>
  </section>`;
}

export function overrideFormView(submission: SubmissionView, fieldErrors: string[] = []): string {
  const reasonClass = fieldErrors.includes("reason") ? ` class="invalid"` : "";
  return `
  <form id="override-form" data-submission="${escapeHtml(submission.submission_id)}">
    <label>New score <input name="override" type="number" min="0" max="100"></label>
    <label${reasonClass}>Reason (required) <input name="reason" required></label>
    <button type="submit" data-action="override_score">Override</button>
  </form>`;
}

export function classReportView(report: ClassReport): string {
  const agreement = report.agreement
    ? `<dl class="agreement">
        <dt>Pearson</dt><dd>${field("pearson_r", report.agreement.pearson_r)}</dd>
        <dt>Spearman</dt><dd>${field("spearman_rho", report.agreement.spearman_rho)}</dd>
        <dt>Kappa</dt><dd>${field("cohen_kappa", report.agreement.cohen_kappa)}</dd>
        <dt>Pairs</dt><dd>${field("n_pairs", report.agreement.n_pairs)}</dd>
      </dl>`
    : `<p class="note" data-field="agreement_note">${escapeHtml(report.agreement_note)}</p>`;
  const ranking = report.ranking
    .map(
      (row, position) => `
    <tr data-submission="${escapeHtml(row[1])}">
      <td>${position + 1}</td><td>${escapeHtml(row[0])}</td>
      <td data-field="final_score">${show(row[2])}</td>
    </tr>`,
    )
    .join("");
  const alerts = report.plagiarism_alerts
    .map(
      (pair) => `
    <li data-field="plagiarism_pair">${escapeHtml(pair[0])} vs ${escapeHtml(pair[1])}
      (similarity ${show(pair[2])})</li>`,
    )
    .join("");
  const histogram = report.errors
    ? svgHistogram(report.errors.histogram, -15)
    : `<p class="note">no error distribution yet</p>`;
  return `
  <section class="class-report" data-lab="${escapeHtml(report.lab_id)}">
    <h2>Class report</h2>
    <h3>AI vs faculty agreement</h3>${agreement}
    <h3>Error distribution</h3>${histogram}
    <h3>Ranking</h3>
    <table><thead><tr><th>#</th><th>Student</th><th>Final</th></tr></thead><tbody>${ranking}</tbody></table>
    <h3>Plagiarism alerts</h3>
    <ul class="alerts" data-count="${report.plagiarism_alerts.length}">${alerts || "<li>none</li>"}</ul>
  </section>`;
}

export function progressView(profile: ProgressProfile): string {
  const conducted = Object.entries(profile.labs_conducted)
    .map(
      ([section, count]) =>
        `<li>${escapeHtml(section)}: <span data-field="labs_conducted">${show(count)}</span></li>`,
    )
    .join("");
  const facultyBlock =
    profile.role === "Faculty"
      ? `<h3>Labs conducted per section</h3><ul>${conducted || "<li>none</li>"}</ul>
         <p>Mean class gain: ${field("mean_class_gain", profile.mean_class_gain)}</p>`
      : "";
  return `
  <section class="progress" data-subject="${escapeHtml(profile.subject_id)}">
    <h2>Progress</h2>
    <p>Completion ratio: ${field("completion_ratio", profile.completion_ratio)}</p>
    <h3>Score over time</h3>${svgProgressLine(profile.series)}
    <h3>Activity heatmap</h3>${svgHeatmap(profile.heatmap)}
    ${facultyBlock}
  </section>`;
}

export function scatterSection(pairs: [number, number][]): string {
  return `<section class="scatter"><h3>AI vs faculty marks</h3>${svgScatter(pairs)}</section>`;
}
