/** Scoping stage: requirement checkboxes, spec editor, data editor. */

import { el } from "./dom.js";
import { WorkbenchStore } from "./state.js";

export function renderScopingView(store: WorkbenchStore): HTMLElement {
  const project = store.project;
  if (!project) return el("div", {}, "No prototype selected.");
  const busy = store.view.pendingGeneration;
  const root = el("div", { class: "scoping-view" });

  if (store.lastError) {
    root.append(
      el("div", { class: "inline-error", role: "alert" },
        `${store.lastError.code}: ${store.lastError.message}`)
    );
  }

  // Requirements -------------------------------------------------------------
  const requirements = project.requirements;
  const selected = new Set(requirements.selected ?? []);
  const boxes = el("div", { class: "requirement-boxes" });
  for (const option of requirements.available) {
    const checkbox = el("input", {
      type: "checkbox",
      "data-requirement": option.name,
      disabled: busy,
    }) as HTMLInputElement;
    checkbox.checked = selected.has(option.name);
    checkbox.addEventListener("change", () => {
      const chosen = Array.from(
        boxes.querySelectorAll<HTMLInputElement>("input[data-requirement]")
      )
        .filter((box) => box.checked)
        .map((box) => box.dataset.requirement!);
      void store.mutate(() => store.api.setRequirements(project.id, chosen));
    });
    boxes.append(el("label", { class: "requirement" }, checkbox, option.label));
  }
  root.append(
    el(
      "section",
      { class: "requirements-panel" },
      el("h2", {}, "Project requirements"),
      el(
        "button",
        {
          type: "button",
          id: "identify-requirements",
          disabled: busy,
          onclick: () =>
            void store.generate(() => store.api.identifyRequirements(project.id)),
        },
        "Identify Project Requirements"
      ),
      boxes,
      requirements.source
        ? el("p", { class: "requirement-source" }, `source: ${requirements.source}`)
        : null
    )
  );

  // Spec ----------------------------------------------------------------------
  const specEditor = el("textarea", {
    id: "spec-editor",
    rows: "18",
    disabled: busy,
    placeholder: "Generate or write the project specification",
  }) as HTMLTextAreaElement;
  specEditor.value = project.spec?.body ?? "";
  root.append(
    el(
      "section",
      { class: "spec-panel" },
      el("h2", {}, "Specification"),
      el(
        "div",
        { class: "panel-actions" },
        el(
          "button",
          {
            type: "button",
            id: "generate-spec",
            disabled: busy,
            onclick: () => void store.generate(() => store.api.generateSpec(project.id)),
          },
          "Generate New Spec"
        ),
        el(
          "button",
          {
            type: "button",
            id: "save-spec",
            disabled: busy,
            onclick: () =>
              void store.mutate(() => store.api.editSpec(project.id, specEditor.value)),
          },
          "Save Spec"
        ),
        project.spec?.edited_by_user
          ? el("span", { class: "edited-badge" }, "edited")
          : null
      ),
      specEditor
    )
  );

  // Placeholder data -------------------------------------------------------------
  const dataEditor = el("textarea", {
    id: "data-editor",
    rows: "12",
    disabled: busy,
    placeholder: "Generated placeholder data (JSON array) appears here",
  }) as HTMLTextAreaElement;
  dataEditor.value = project.data?.raw_text ?? "";
  root.append(
    el(
      "section",
      { class: "data-panel" },
      el("h2", {}, "Placeholder data"),
      el(
        "div",
        { class: "panel-actions" },
        el(
          "button",
          {
            type: "button",
            id: "generate-data",
            disabled: busy,
            onclick: () => void store.generate(() => store.api.generateData(project.id)),
          },
          "Generate Data"
        ),
        el(
          "button",
          {
            type: "button",
            id: "save-data",
            disabled: busy,
            onclick: () =>
              void store.mutate(() => store.api.editData(project.id, dataEditor.value)),
          },
          "Save Data"
        ),
        project.data
          ? el("span", { class: "item-count" }, `${project.data.item_count} items`)
          : null,
        project.data?.length_warning
          ? el("span", { class: "warning-badge" }, "outside 10-20 range")
          : null
      ),
      dataEditor
    )
  );

  return root;
}
