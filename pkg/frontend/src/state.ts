/** Workbench state: a thin cache of server truth plus view selections.
 *
 * The store never derives matrix ordering, context, or gating locally; every
 * mutation round-trips through the API and re-fetches the project, so a
 * refresh can never disagree with what is rendered.
 */

import { ApiError, ProjectSummary, ProjectView, WorkbenchApi } from "./api.js";

export type Stage = "matrix" | "scoping" | "implementation";

export interface ViewState {
  projectId: string | null;
  stage: Stage;
  focusedCell: string | null;
  activeStep: number | null;
  /** Version pinned in the preview; null follows the step's current version. */
  pinnedVersion: string | null;
  pendingGeneration: boolean;
}

export class WorkbenchStore {
  projects: ProjectSummary[] = [];
  project: ProjectView | null = null;
  lastError: ApiError | null = null;
  view: ViewState = {
    projectId: null,
    stage: "matrix",
    focusedCell: null,
    activeStep: null,
    pinnedVersion: null,
    pendingGeneration: false,
  };

  private listeners: (() => void)[] = [];

  constructor(public api: WorkbenchApi) {}

  subscribe(listener: () => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  async refresh(): Promise<void> {
    this.projects = await this.api.listProjects();
    if (this.view.projectId) {
      this.project = await this.api.getProject(this.view.projectId);
      if (this.view.activeStep && this.project.plan) {
        const exists = this.project.plan.steps.some(
          (s) => s.index === this.view.activeStep
        );
        if (!exists) this.view.activeStep = null;
      }
    } else {
      this.project = null;
    }
    this.emit();
  }

  async openProject(id: string | null): Promise<void> {
    this.view.projectId = id;
    this.view.focusedCell = null;
    this.view.activeStep = null;
    this.view.pinnedVersion = null;
    await this.refresh();
  }

  setStage(stage: Stage): void {
    this.view.stage = stage;
    this.emit();
  }

  focusCell(cell: string | null): void {
    this.view.focusedCell = cell;
    this.emit();
  }

  selectStep(index: number | null): void {
    this.view.activeStep = index;
    this.view.pinnedVersion = null;
    this.emit();
  }

  pinVersion(versionId: string | null): void {
    this.view.pinnedVersion = versionId;
    this.emit();
  }

  /** Run a quick mutation, then re-fetch server truth. */
  async mutate<T>(run: () => Promise<T>): Promise<T | undefined> {
    this.lastError = null;
    try {
      return await run();
    } catch (error) {
      if (error instanceof ApiError) {
        this.lastError = error;
        return undefined;
      }
      throw error;
    } finally {
      await this.refresh();
    }
  }

  /** Run a model-backed generation; write affordances stay disabled while
   * the pending flag is set, mirroring the server's single-flight rule. */
  async generate<T>(run: () => Promise<T>): Promise<T | undefined> {
    if (this.view.pendingGeneration) return undefined;
    this.view.pendingGeneration = true;
    this.emit();
    try {
      return await this.mutate(run);
    } finally {
      this.view.pendingGeneration = false;
      this.emit();
    }
  }
}
