/** Implementation stage: step list, generate/iterate/approve controls,
 * version picker, code tab, and the sandboxed preview frame.
 *
 * The preview iframe is sandboxed to scripts only, so generated code cannot
 * script the workbench; it still reaches the server's data and proxy
 * endpoints over HTTP.
 */

import { StepView } from "./api.js";
import { el } from "./dom.js";
import { WorkbenchStore } from "./state.js";

export function renderImplementationView(store: WorkbenchStore): HTMLElement {
  const project = store.project;
  if (!project) return el("div", {}, "No prototype selected.");
  const busy = store.view.pendingGeneration;
  const root = el("div", { class: "implementation-view" });

  if (store.lastError) {
    root.append(
      el("div", { class: "inline-error", role: "alert" },
        `${store.lastError.code}: ${store.lastError.message}`)
    );
  }

  const plan = project.plan;
  const header = el(
    "div",
    { class: "plan-header" },
    el(
      "button",
      {
        type: "button",
        id: "generate-plan",
        disabled: busy,
        onclick: () => void store.generate(() => store.api.generatePlan(project.id)),
      },
      plan ? "Regenerate Plan" : "Generate Plan"
    ),
    plan?.stale ? el("span", { class: "stale-badge" }, "plan stale: spec changed") : null
  );
  root.append(header);
  if (!plan) {
    root.append(el("p", {}, "Generate a plan from the spec to begin implementation."));
    return root;
  }

  const active =
    plan.steps.find((s) => s.index === store.view.activeStep) ?? plan.steps[0] ?? null;
  if (active && store.view.activeStep === null) store.view.activeStep = active.index;

  const stepList = el("ol", { class: "step-list" });
  for (const step of plan.steps) {
    const row = el(
      "li",
      {
        class:
          "step-row" +
          (active && step.index === active.index ? " active" : "") +
          ` status-${step.status}`,
        "data-step": String(step.index),
      },
      el(
        "button",
        {
          type: "button",
          class: "select-step",
          onclick: () => store.selectStep(step.index),
        },
        `${step.index}. ${step.description}`
      ),
      el("span", { class: "status-badge" }, step.status),
      el(
        "span",
        { class: "step-tools" },
        el(
          "button",
          {
            type: "button",
            class: "edit-step",
            disabled: busy,
            onclick: () => {
              const description = window.prompt("New step description", step.description);
              if (description !== null && description.trim()) {
                void store.mutate(() =>
                  store.api.updateStep(project.id, step.index, description)
                );
              }
            },
          },
          "edit"
        ),
        el(
          "button",
          {
            type: "button",
            class: "add-step-beneath",
            disabled: busy,
            onclick: () => {
              const description = window.prompt("Describe the new step") ?? "";
              if (description.trim()) {
                void store.mutate(() =>
                  store.api.addStep(project.id, step.index, description)
                );
              }
            },
          },
          "add beneath"
        ),
        el(
          "button",
          {
            type: "button",
            class: "remove-step",
            disabled: busy,
            onclick: () =>
              void store.mutate(() => store.api.removeStep(project.id, step.index)),
          },
          "remove"
        )
      )
    );
    stepList.append(row);
  }
  root.append(stepList);

  if (active) {
    root.append(renderStepPanel(store, active, busy));
  }
  return root;
}

function renderStepPanel(
  store: WorkbenchStore,
  step: StepView,
  busy: boolean
): HTMLElement {
  const project = store.project!;
  const pinned = store.view.pinnedVersion;
  const shownVersion = pinned ?? step.current_version;
  const previewUrl = shownVersion
    ? store.api.previewUrl(project.id, step.index, shownVersion)
    : null;

  const versionSelect = el("select", {
    id: "version-select",
    disabled: busy || step.versions.length === 0,
  }) as HTMLSelectElement;
  for (const version of step.versions) {
    const label =
      `${version.id} (${version.provenance})` +
      (version.error_count ? ` — ${version.error_count} lint error(s)` : "");
    versionSelect.append(el("option", { value: version.id }, label));
  }
  if (shownVersion) versionSelect.value = shownVersion;
  versionSelect.addEventListener("change", () => {
    store.pinVersion(versionSelect.value || null);
  });

  const iterateInput = el("input", {
    id: "iterate-input",
    placeholder: "Describe what is wrong and the model will fix it",
    disabled: busy || !step.current_version,
  }) as HTMLInputElement;

  const lint = step.versions.find((v) => v.id === shownVersion)?.lint ?? [];

  const panel = el(
    "section",
    { class: "step-panel", "data-active-step": String(step.index) },
    el(
      "div",
      { class: "step-actions" },
      el(
        "button",
        {
          type: "button",
          id: "generate-code",
          disabled: busy,
          onclick: () =>
            void store.generate(() => store.api.generateStep(project.id, step.index)),
        },
        "Generate Code"
      ),
      el(
        "button",
        {
          type: "button",
          id: "approve-step",
          disabled: busy || step.status !== "generated",
          onclick: () =>
            void store.mutate(() => store.api.approveStep(project.id, step.index)),
        },
        "Approve"
      ),
      el(
        "button",
        {
          type: "button",
          id: "revert-step",
          disabled: busy || step.versions.length === 0,
          onclick: () =>
            void store.mutate(() => store.api.revertToStep(project.id, step.index)),
        },
        "Revert to here"
      ),
      versionSelect
    ),
    el(
      "form",
      {
        class: "iterate-form",
        onsubmit: (event) => {
          event.preventDefault();
          if (iterateInput.value.trim()) {
            const problem = iterateInput.value;
            void store.generate(() =>
              store.api.iterateStep(project.id, step.index, problem)
            );
          }
        },
      },
      iterateInput,
      el("button", { type: "submit", id: "run-iterate", disabled: busy }, "Iterate")
    ),
    lint.length
      ? el(
          "ul",
          { class: "lint-list" },
          ...lint.map((issue) =>
            el("li", { class: `lint-${issue.severity}` }, `${issue.kind}: ${issue.detail}`)
          )
        )
      : null,
    renderCodeTab(store, step, shownVersion, busy),
    previewUrl
      ? el("iframe", {
          id: "preview-frame",
          src: previewUrl,
          sandbox: "allow-scripts",
          title: "prototype preview",
        })
      : el("p", { class: "no-preview" }, "Generate code to see the prototype."),
  );
  return panel;
}

function renderCodeTab(
  store: WorkbenchStore,
  step: StepView,
  shownVersion: string | null,
  busy: boolean
): HTMLElement | null {
  if (!shownVersion) return null;
  const project = store.project!;
  const editor = el("textarea", {
    id: "code-editor",
    rows: "14",
    spellcheck: "false",
    disabled: busy,
  }) as HTMLTextAreaElement;
  editor.dataset.loadedVersion = "";
  // Code bodies are heavyweight; fetch lazily rather than embedding them in
  // every project view.
  void store.api
    .getStepCode(project.id, step.index, shownVersion)
    .then((code) => {
      editor.value = code.html;
      editor.dataset.loadedVersion = code.version_id;
    })
    .catch(() => {
      editor.value = "";
    });
  return el(
    "details",
    { class: "code-tab" },
    el("summary", {}, "Code"),
    editor,
    el(
      "button",
      {
        type: "button",
        id: "save-code",
        disabled: busy,
        onclick: () =>
          void store.mutate(() =>
            store.api.saveManualEdit(project.id, step.index, editor.value)
          ),
      },
      "Save manual edit"
    )
  );
}
