/** Typed client for the workbench HTTP API. The UI talks to nothing else. */

export interface ApiErrorBody {
  code: string;
  message: string;
  detail?: string;
}

export class ApiError extends Error {
  constructor(public status: number, public body: ApiErrorBody) {
    super(body.message);
  }
  get code(): string {
    return this.body.code;
  }
}

export interface CellSnapshot {
  id: string;
  candidates: string[];
  submitted: string | null;
}

export interface CellView {
  candidates: string[];
  submitted: string | null;
  stale: boolean;
  versions: CellSnapshot[];
}

export interface MatrixView {
  problem: string;
  complete: boolean;
  cells: Record<string, CellView>;
  submission_log: string[];
  context: Record<string, [string, string][]>;
}

export interface RequirementsView {
  selected: string[] | null;
  source: string | null;
  available: { name: string; label: string }[];
}

export interface SpecView {
  body: string;
  edited_by_user: boolean;
  sections: { title: string; start: number; end: number }[];
  history_length: number;
}

export interface DataView {
  raw_text: string;
  item_count: number;
  edited_by_user: boolean;
  length_warning: boolean;
}

export interface LintIssue {
  kind: string;
  detail: string;
  severity: string;
}

export interface VersionView {
  id: string;
  provenance: string;
  parent: string | null;
  created_at: string;
  lint: LintIssue[];
  error_count: number;
}

export interface StepView {
  index: number;
  description: string;
  status: string;
  current_version: string | null;
  versions: VersionView[];
}

export interface PlanView {
  stale: boolean;
  steps: StepView[];
  history_length: number;
}

export interface ProjectSummary {
  id: string;
  name: string;
  created_at: string;
  updated_at: string;
}

export interface ProjectView extends ProjectSummary {
  matrix: MatrixView;
  requirements: RequirementsView;
  spec: SpecView | null;
  data: DataView | null;
  plan: PlanView | null;
}

export interface StepCode {
  index: number;
  version_id: string;
  html: string;
  lint: LintIssue[];
}

export class WorkbenchApi {
  constructor(public baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (response.status === 204) {
      return undefined as T;
    }
    const text = await response.text();
    const payload = text ? JSON.parse(text) : undefined;
    if (!response.ok) {
      throw new ApiError(response.status, payload as ApiErrorBody);
    }
    return payload as T;
  }

  listProjects(): Promise<ProjectSummary[]> {
    return this.request("GET", "/projects");
  }

  createProject(name: string): Promise<ProjectSummary> {
    return this.request("POST", "/projects", { name });
  }

  cloneProject(id: string, name: string): Promise<ProjectSummary> {
    return this.request("POST", `/projects/${id}/clone`, { name });
  }

  deleteProject(id: string): Promise<void> {
    return this.request("DELETE", `/projects/${id}`);
  }

  getProject(id: string): Promise<ProjectView> {
    return this.request("GET", `/projects/${id}`);
  }

  submitProblem(id: string, problem: string): Promise<MatrixView> {
    return this.request("PUT", `/projects/${id}/problem`, { problem });
  }

  getMatrix(id: string): Promise<MatrixView> {
    return this.request("GET", `/projects/${id}/matrix`);
  }

  private cellPath(id: string, cell: string): string {
    return `/projects/${id}/matrix/${cell.replace(":", "/")}`;
  }

  brainstorm(id: string, cell: string, count?: number): Promise<{ added: string[] }> {
    return this.request("POST", `${this.cellPath(id, cell)}/brainstorm`, count ? { count } : {});
  }

  iterateCell(id: string, cell: string, feedback: string): Promise<{ added: string[] }> {
    return this.request("POST", `${this.cellPath(id, cell)}/iterate`, { feedback });
  }

  submitCell(id: string, cell: string, content: string): Promise<MatrixView> {
    return this.request("PUT", `${this.cellPath(id, cell)}/submit`, { content });
  }

  saveCellVersion(id: string, cell: string): Promise<{ snapshot_id: string }> {
    return this.request("POST", `${this.cellPath(id, cell)}/versions`);
  }

  listCellVersions(id: string, cell: string): Promise<CellSnapshot[]> {
    return this.request("GET", `${this.cellPath(id, cell)}/versions`);
  }

  restoreCellVersion(id: string, cell: string, snapshotId: string): Promise<MatrixView> {
    return this.request("POST", `${this.cellPath(id, cell)}/versions/${snapshotId}/restore`);
  }

  identifyRequirements(id: string): Promise<RequirementsView> {
    return this.request("POST", `/projects/${id}/requirements/identify`);
  }

  setRequirements(id: string, selected: string[]): Promise<RequirementsView> {
    return this.request("PUT", `/projects/${id}/requirements`, { selected });
  }

  generateSpec(id: string): Promise<SpecView> {
    return this.request("POST", `/projects/${id}/spec/generate`);
  }

  editSpec(id: string, body: string): Promise<SpecView> {
    return this.request("PUT", `/projects/${id}/spec`, { body });
  }

  generateData(id: string): Promise<DataView> {
    return this.request("POST", `/projects/${id}/data/generate`);
  }

  editData(id: string, rawText: string): Promise<DataView> {
    return this.request("PUT", `/projects/${id}/data`, { raw_text: rawText });
  }

  generatePlan(id: string): Promise<PlanView> {
    return this.request("POST", `/projects/${id}/plan/generate`);
  }

  addStep(id: string, afterIndex: number, description: string): Promise<PlanView> {
    return this.request("POST", `/projects/${id}/plan/steps`, {
      after_index: afterIndex,
      description,
    });
  }

  updateStep(id: string, index: number, description: string): Promise<PlanView> {
    return this.request("PUT", `/projects/${id}/plan/steps/${index}`, { description });
  }

  removeStep(id: string, index: number): Promise<PlanView> {
    return this.request("DELETE", `/projects/${id}/plan/steps/${index}`);
  }

  generateStep(id: string, index: number): Promise<StepView> {
    return this.request("POST", `/projects/${id}/plan/steps/${index}/generate`);
  }

  iterateStep(id: string, index: number, problem: string): Promise<StepView> {
    return this.request("POST", `/projects/${id}/plan/steps/${index}/iterate`, { problem });
  }

  approveStep(id: string, index: number): Promise<StepView> {
    return this.request("POST", `/projects/${id}/plan/steps/${index}/approve`);
  }

  revertToStep(id: string, index: number): Promise<PlanView> {
    return this.request("POST", `/projects/${id}/plan/steps/${index}/revert`);
  }

  selectVersion(id: string, index: number, versionId: string): Promise<StepView> {
    return this.request("PUT", `/projects/${id}/plan/steps/${index}/current-version`, {
      version_id: versionId,
    });
  }

  saveManualEdit(id: string, index: number, html: string): Promise<StepView> {
    return this.request("PUT", `/projects/${id}/plan/steps/${index}/code`, { html });
  }

  getStepCode(id: string, index: number, versionId?: string): Promise<StepCode> {
    const query = versionId ? `?version=${encodeURIComponent(versionId)}` : "";
    return this.request("GET", `/projects/${id}/plan/steps/${index}/code${query}`);
  }

  previewUrl(id: string, step?: number, versionId?: string): string {
    const params = new URLSearchParams();
    if (step !== undefined) params.set("step", String(step));
    if (versionId !== undefined) params.set("version", versionId);
    const query = params.toString();
    return `${this.baseUrl}/projects/${id}/preview${query ? "?" + query : ""}`;
  }

  exportArtifact(id: string, mode: "inline" | "endpoint" = "inline"): Promise<{ path: string }> {
    return this.request("GET", `/projects/${id}/export?mode=${mode}`);
  }
}
