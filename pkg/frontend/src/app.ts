/** Browser bootstrap: hash routing and DOM wiring over the pure views.
 *
 * All rendering goes through views.ts and all data through api.ts, so
 * everything interesting is testable without a DOM; this file only
 * glues them to the page.
 */

import { ApiClient, ApiError } from "./api.js";
import { initialState, ViewState } from "./state.js";
import { createCountdown, startTicker, TickerHandle } from "./timer.js";
import type { LabView, SubmissionView, VivaAnswerResult, VivaView } from "./types.js";
import {
  classReportView,
  createLabFormView,
  facultyLabDetailView,
  labListView,
  loginView,
  navView,
  overrideFormView,
  progressView,
  studentLabView,
  submissionReportView,
  vivaOutcomeView,
  vivaQuestionView,
} from "./views.js";

const BASE_URL =
  new URLSearchParams(window.location.search).get("api") ?? "http://127.0.0.1:8800";

const api = new ApiClient(BASE_URL);
const state: ViewState = initialState();
const root = document.getElementById("app") as HTMLElement;

let ticker: TickerHandle | null = null;
const vivaScores = new Map<number, number>();

function render(body: string): void {
  const nav = state.token ? navView(state) : "";
  root.innerHTML = nav + body;
}

function onSubmit(formId: string, handler: (form: HTMLFormElement) => void): void {
  const form = document.getElementById(formId) as HTMLFormElement | null;
  form?.addEventListener("submit", (event) => {
    event.preventDefault();
    handler(form);
  });
}

function formValue(form: HTMLFormElement, name: string): string {
  return (form.elements.namedItem(name) as HTMLInputElement | HTMLTextAreaElement).value;
}

function showLogin(message = ""): void {
  render(loginView(message));
  onSubmit("login-form", async (form) => {
    try {
      const session = await api.login(formValue(form, "username"), formValue(form, "password"));
      state.token = session.token;
      state.userId = session.user_id;
      state.role = session.role;
      window.location.hash = "#/labs";
    } catch (error) {
      showLogin(error instanceof ApiError ? error.message : String(error));
    }
  });
}

async function showLabs(): Promise<void> {
  const { labs } = await api.myLabs();
  state.labs = labs;
  render(labListView(labs, state.role));
}

async function showLab(labId: string): Promise<void> {
  const lab = await api.getLab(labId);
  state.activeLab = lab;
  if (state.role === "Faculty") {
    render(facultyLabDetailView(lab));
    wireFacultyControls(lab);
  } else {
    render(studentLabView(lab));
    wireStudentControls(lab);
  }
}

function wireFacultyControls(lab: LabView): void {
  root.querySelector('[data-action="allocate"]')?.addEventListener("click", async () => {
    const roster = window.prompt("Comma-separated student ids:") ?? "";
    if (!roster.trim()) return;
    await api.allocate(lab.lab_id, roster.split(",").map((s) => s.trim()));
    await showLab(lab.lab_id);
  });
  root.querySelector('[data-action="activate_lab"]')?.addEventListener("click", async () => {
    await api.activate(lab.lab_id);
    await showLab(lab.lab_id);
  });
  root.querySelector('[data-action="deallocate"]')?.addEventListener("click", async () => {
    await api.deallocate(lab.lab_id);
    await showLab(lab.lab_id);
  });
  root.querySelector('[data-action="close_lab"]')?.addEventListener("click", async () => {
    await api.close(lab.lab_id);
    await showLab(lab.lab_id);
  });
}

function wireStudentControls(lab: LabView): void {
  onSubmit("submit-form", async (form) => {
    const allocationId = form.dataset.allocation as string;
    const submission = await api.submit(
      allocationId,
      formValue(form, "code_text"),
      formValue(form, "language_tag"),
    );
    state.activeSubmission = submission;
    if (submission.viva) startViva(submission.viva);
  });
}

function startViva(viva: VivaView): void {
  vivaScores.clear();
  const countdown = createCountdown(Date.now(), viva.duration_limit_minutes);
  let index = 0;

  const renderQuestion = (clockText: string) => {
    render(vivaQuestionView(viva, index, clockText));
    onSubmit("viva-form", async (form) => {
      try {
        const result: VivaAnswerResult = await api.answerViva(
          viva.session_id,
          index,
          formValue(form, "answer_text"),
        );
        vivaScores.set(index, result.score);
        index += 1;
        if (result.submission) {
          finishViva(result.submission, result.viva_score ?? null);
        } else {
          renderQuestion("");
        }
      } catch (error) {
        if (error instanceof ApiError && error.code === "session_expired") {
          await expireViva();
        } else {
          throw error;
        }
      }
    });
  };

  const expireViva = async () => {
    ticker?.stop();
    const expired = await api.vivaState(viva.session_id);
    render(vivaOutcomeView(expired, vivaScores, null));
  };

  ticker?.stop();
  ticker = startTicker(
    countdown,
    (display) => {
      const el = root.querySelector('[data-field="countdown"]');
      if (el) el.textContent = display;
    },
    () => void expireViva(),
  );
  renderQuestion("");
}

function finishViva(submission: SubmissionView, vivaScore: number | null): void {
  ticker?.stop();
  const viva: VivaView = {
    session_id: "",
    allocation_id: submission.allocation_id,
    state: "Completed",
    questions: [...vivaScores.keys()].map((i) => `Question ${i + 1}`),
    answered: [...vivaScores.keys()],
    started_at: "",
    duration_limit_minutes: 0,
  };
  render(vivaOutcomeView(viva, vivaScores, vivaScore) + submissionReportView(submission));
}

async function showReport(labId: string): Promise<void> {
  const report = await api.classReport(labId);
  render(classReportView(report));
  const first = report.ranking[0];
  if (first) {
    const submission = await api.exportSubmission(first[1]);
    void submission; // detail view on demand
  }
  root.querySelectorAll("tr[data-submission]").forEach((row) => {
    row.addEventListener("click", () => {
      const submissionId = (row as HTMLElement).dataset.submission as string;
      render(
        classReportView(report) +
          overrideFormView({ submission_id: submissionId } as SubmissionView),
      );
      onSubmit("override-form", async (form) => {
        await api.override(
          submissionId,
          Number(formValue(form, "override")),
          formValue(form, "reason"),
        );
        await showReport(labId);
      });
    });
  });
}

async function showCreateLab(fieldErrors: string[] = [], message = ""): Promise<void> {
  render(createLabFormView(fieldErrors, message));
  onSubmit("create-lab-form", async (form) => {
    try {
      const created = await api.createLab({
        title: formValue(form, "title"),
        topic_keywords: formValue(form, "topic_keywords")
          .split(",")
          .map((s) => s.trim())
          .filter(Boolean),
        difficulty: formValue(form, "difficulty"),
        viva_duration_minutes: Number(formValue(form, "viva_duration_minutes")),
        mode: formValue(form, "mode"),
        section: formValue(form, "section"),
        description: formValue(form, "description"),
        instructions: formValue(form, "instructions"),
      });
      window.location.hash = `#/labs/${created.lab_id}`;
    } catch (error) {
      if (error instanceof ApiError) {
        await showCreateLab(error.fields, error.message);
      } else {
        throw error;
      }
    }
  });
}

async function showProgress(): Promise<void> {
  render(progressView(await api.myProgress()));
}

async function route(): Promise<void> {
  if (!state.token) {
    showLogin();
    return;
  }
  const hash = window.location.hash || "#/labs";
  const reportMatch = hash.match(/^#\/labs\/([^/]+)\/report$/);
  const labMatch = hash.match(/^#\/labs\/([^/]+)$/);
  if (hash === "#/labs") await showLabs();
  else if (hash === "#/labs/new") await showCreateLab();
  else if (hash === "#/progress") await showProgress();
  else if (reportMatch) await showReport(reportMatch[1]);
  else if (labMatch && labMatch[1] !== "new") await showLab(labMatch[1]);
  else await showLabs();
}

window.addEventListener("hashchange", () => void route());
void route();
