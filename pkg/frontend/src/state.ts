/** Client view state and role gating.
 *
 * The gate mirrors the server's deny-by-default authorization matrix:
 * a control renders only when the session role is allowed to call the
 * route behind it, so a Student session never sees faculty-only UI.
 */

import type { LabView, RoleName, SubmissionView } from "./types.js";

export type UiAction =
  | "create_lab"
  | "allocate"
  | "deallocate"
  | "activate_lab"
  | "close_lab"
  | "list_labs"
  | "get_lab"
  | "submit_code"
  | "answer_viva"
  | "override_score"
  | "class_report"
  | "my_progress"
  | "export_submission";

/** Mirror of the server-side route/role matrix; unknown actions deny. */
export const ACTION_ROLES: Record<UiAction, RoleName[]> = {
  create_lab: ["Faculty"],
  allocate: ["Faculty"],
  deallocate: ["Faculty"],
  activate_lab: ["Faculty"],
  close_lab: ["Faculty"],
  list_labs: ["Faculty", "Student"],
  get_lab: ["Faculty", "Student"],
  submit_code: ["Student"],
  answer_viva: ["Student"],
  override_score: ["Faculty"],
  class_report: ["Faculty"],
  my_progress: ["Faculty", "Student"],
  export_submission: ["Faculty", "Student"],
};

export interface VivaTimerState {
  sessionId: string;
  endsAtMs: number;
  expired: boolean;
}

export interface ViewState {
  token: string | null;
  userId: string | null;
  role: RoleName | null;
  labs: LabView[];
  activeLab: LabView | null;
  activeSubmission: SubmissionView | null;
  vivaTimer: VivaTimerState | null;
}

export function initialState(): ViewState {
  return {
    token: null,
    userId: null,
    role: null,
    labs: [],
    activeLab: null,
    activeSubmission: null,
    vivaTimer: null,
  };
}

export function allows(role: RoleName | null, action: UiAction): boolean {
  if (role === null) return false;
  const allowed = ACTION_ROLES[action];
  return allowed !== undefined && allowed.includes(role);
}

/** Actions whose controls may render for this session. */
export function visibleActions(role: RoleName | null): UiAction[] {
  return (Object.keys(ACTION_ROLES) as UiAction[]).filter((action) => allows(role, action));
}
