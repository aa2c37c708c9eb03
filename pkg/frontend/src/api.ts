/** Typed client for the labassess HTTP API.
 *
 * One base-URL setting, bearer-token auth, structured errors. Every
 * method returns the server payload untouched so rendered numbers are
 * traceable to API fields.
 */

import type {
  AllocateSummary,
  ApiErrorBody,
  ClassReport,
  LabView,
  LoginResponse,
  ProgressProfile,
  SubmissionView,
  VivaAnswerResult,
  VivaView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public details: Record<string, unknown> = {},
  ) {
    super(message);
  }

  /** Field names the server flagged, for inline form highlighting. */
  get fields(): string[] {
    const fields = this.details["fields"];
    return Array.isArray(fields) ? fields.map(String) : [];
  }
}

export interface CreateLabRequest {
  title: string;
  topic_keywords: string[];
  difficulty: string;
  viva_duration_minutes: number;
  mode: string;
  description?: string;
  instructions?: string;
  deadline?: string | null;
  section?: string;
  viva_weight?: number;
  viva_question_count?: number;
}

export class ApiClient {
  private token: string | null = null;

  constructor(public baseUrl: string) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await fetch(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const payload = text ? JSON.parse(text) : {};
    if (!response.ok) {
      const err = payload as ApiErrorBody;
      throw new ApiError(
        response.status,
        err.code ?? "unknown",
        err.message ?? response.statusText,
        err.details ?? {},
      );
    }
    return payload as T;
  }

  healthz(): Promise<{ status: string; grading_enabled: boolean }> {
    return this.request("GET", "/healthz");
  }

  async login(username: string, password: string): Promise<LoginResponse> {
    const session = await this.request<LoginResponse>("POST", "/login", { username, password });
    this.setToken(session.token);
    return session;
  }

  createLab(lab: CreateLabRequest): Promise<{ lab_id: string; state: string }> {
    return this.request("POST", "/labs", lab);
  }

  allocate(labId: string, roster: string[]): Promise<AllocateSummary> {
    return this.request("POST", `/labs/${labId}/allocate`, { roster });
  }

  deallocate(labId: string): Promise<{ lab_id: string; state: string }> {
    return this.request("DELETE", `/labs/${labId}/allocations`);
  }

  activate(labId: string): Promise<{ lab_id: string; state: string }> {
    return this.request("POST", `/labs/${labId}/activate`);
  }

  close(labId: string): Promise<{ lab_id: string; state: string }> {
    return this.request("POST", `/labs/${labId}/close`);
  }

  myLabs(): Promise<{ labs: LabView[] }> {
    return this.request("GET", "/me/labs");
  }

  getLab(labId: string): Promise<LabView> {
    return this.request("GET", `/labs/${labId}`);
  }

  submit(allocationId: string, codeText: string, languageTag: string): Promise<SubmissionView> {
    return this.request("POST", `/allocations/${allocationId}/submissions`, {
      code_text: codeText,
      language_tag: languageTag,
    });
  }

  answerViva(sessionId: string, questionIndex: number, answerText: string): Promise<VivaAnswerResult> {
    return this.request("POST", `/viva/${sessionId}/answers`, {
      question_index: questionIndex,
      answer_text: answerText,
    });
  }

  vivaState(sessionId: string): Promise<VivaView> {
    return this.request("GET", `/viva/${sessionId}`);
  }

  override(submissionId: string, value: number, reason: string): Promise<SubmissionView> {
    if (!reason.trim()) {
      // mirror of the form's required-reason rule; the server records the reason
      return Promise.reject(new ApiError(0, "reason_required", "an override requires a reason"));
    }
    return this.request("POST", `/submissions/${submissionId}/override`, {
      override: value,
      reason,
    });
  }

  classReport(labId: string): Promise<ClassReport> {
    return this.request("GET", `/labs/${labId}/report`);
  }

  myProgress(): Promise<ProgressProfile> {
    return this.request("GET", "/me/progress");
  }

  exportSubmission(submissionId: string): Promise<Record<string, unknown>> {
    return this.request("GET", `/submissions/${submissionId}/export`);
  }
}
