/** Workbench shell: prototype tabs, stage tabs, and the active view. */

import { WorkbenchApi } from "./api.js";
import { el } from "./dom.js";
import { renderImplementationView } from "./implementationView.js";
import { renderMatrixView } from "./matrixView.js";
import { renderScopingView } from "./scopingView.js";
import { Stage, WorkbenchStore } from "./state.js";

const STAGES: { id: Stage; label: string }[] = [
  { id: "matrix", label: "Design Matrix" },
  { id: "scoping", label: "Scoping" },
  { id: "implementation", label: "Implementation" },
];

export interface Workbench {
  store: WorkbenchStore;
  root: HTMLElement;
  render: () => void;
}

export function createWorkbench(root: HTMLElement, api: WorkbenchApi): Workbench {
  const store = new WorkbenchStore(api);

  function render(): void {
    const busy = store.view.pendingGeneration;
    root.textContent = "";

    const tabs = el("nav", { class: "project-tabs" });
    for (const summary of store.projects) {
      tabs.append(
        el(
          "button",
          {
            type: "button",
            class:
              "project-tab" + (summary.id === store.view.projectId ? " active" : ""),
            "data-project": summary.id,
            disabled: busy,
            onclick: () => void store.openProject(summary.id),
          },
          summary.name
        )
      );
    }
    tabs.append(
      el(
        "button",
        {
          type: "button",
          id: "new-prototype",
          disabled: busy,
          onclick: () => {
            const name = window.prompt("Name the prototype") ?? "";
            if (name.trim()) {
              void store.mutate(async () => {
                const created = await store.api.createProject(name);
                await store.openProject(created.id);
              });
            }
          },
        },
        "New Prototype"
      ),
      el(
        "button",
        {
          type: "button",
          id: "clone-prototype",
          disabled: busy || !store.view.projectId,
          onclick: () => {
            const name = window.prompt("Name for the variation") ?? "";
            if (name.trim() && store.view.projectId) {
              const source = store.view.projectId;
              void store.mutate(async () => {
                const clone = await store.api.cloneProject(source, name);
                await store.openProject(clone.id);
              });
            }
          },
        },
        "Clone as variation"
      )
    );
    root.append(tabs);

    const stageBar = el("nav", { class: "stage-tabs" });
    for (const stage of STAGES) {
      stageBar.append(
        el(
          "button",
          {
            type: "button",
            class: "stage-tab" + (store.view.stage === stage.id ? " active" : ""),
            "data-stage": stage.id,
            onclick: () => store.setStage(stage.id),
          },
          stage.label
        )
      );
    }
    root.append(stageBar);
    if (busy) {
      root.append(el("div", { class: "pending-banner" }, "Generating..."));
    }

    const content = el("main", { class: "stage-content" });
    if (store.view.stage === "matrix") content.append(renderMatrixView(store));
    else if (store.view.stage === "scoping") content.append(renderScopingView(store));
    else content.append(renderImplementationView(store));
    root.append(content);
  }

  store.subscribe(render);
  render();
  return { store, root, render };
}
