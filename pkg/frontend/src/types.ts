/** Wire types for the labassess HTTP API. Scores stay as the server sent
 * them; the UI never computes or rounds a score. */

export type RoleName = "Faculty" | "Student";

export interface LoginResponse {
  token: string;
  user_id: string;
  role: RoleName;
  expires_at: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details: Record<string, unknown>;
}

export interface GradeParts {
  correctness_score: number;
  readability_score: number;
  complexity_score: number;
  weights: number[];
  final: number;
}

export interface SubmissionView {
  submission_id: string;
  allocation_id: string;
  language_tag: string;
  submitted_at: string;
  ai_score: number | null;
  faculty_override: number | null;
  viva_score: number | null;
  final_score: number | null;
  feedback: string[];
  grade: Partial<GradeParts>;
  viva?: VivaView;
}

export interface VivaView {
  session_id: string;
  allocation_id: string;
  state: "Open" | "Completed" | "Expired";
  questions: string[];
  answered: number[];
  started_at: string;
  duration_limit_minutes: number;
}

export interface AllocationPreview {
  allocation_id: string;
  student_id: string;
  question_text: string;
  submission: SubmissionView | null;
}

export interface LabView {
  lab_id: string;
  title: string;
  topic_keywords: string[];
  difficulty: string;
  viva_duration_minutes: number;
  mode: string;
  description: string;
  instructions: string;
  deadline: string | null;
  state: string;
  section: string;
  viva_weight: number;
  viva_question_count: number;
  allocation?: { allocation_id: string; question_text: string };
  submission?: SubmissionView;
  allocations?: AllocationPreview[];
}

export interface AllocateSummary {
  lab_id: string;
  allocated: number;
  students: { student_id: string; allocation_id: string }[];
}

export interface VivaAnswerResult {
  question_index: number;
  score: number;
  note: string;
  viva_score?: number;
  submission?: SubmissionView;
}

export interface AgreementSection {
  pearson_r: number;
  spearman_rho: number;
  cohen_kappa: number;
  n_pairs: number;
  band_confusion: number[][];
  band_edges: number[];
  zero_variance: boolean;
}

export interface ErrorSection {
  histogram: number[];
  underflow: number;
  overflow: number;
  mean_error: number;
  share_within_5: number;
  worst: {
    id: string;
    actual: number;
    predicted: number;
    deviation: number;
    topic_tag: string;
  }[];
}

/** ranking rows: [student_id, submission_id, final_score, completed_at] */
export type RankingRow = [string, string, number, string];

export interface ClassReport {
  lab_id: string;
  agreement: AgreementSection | null;
  agreement_note: string;
  errors: ErrorSection | null;
  ranking: RankingRow[];
  plagiarism_alerts: [string, string, number][];
}

export interface HeatmapCell {
  weekday: number;
  week: number;
  count: number;
}

export interface ProgressProfile {
  subject_id: string;
  role: RoleName;
  series: [string, number, string][];
  heatmap: HeatmapCell[];
  completion_ratio: number;
  labs_conducted: Record<string, number>;
  mean_class_gain: number;
}
