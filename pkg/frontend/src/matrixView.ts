/** The 3x2 design-matrix grid.
 *
 * Cells feeding the focused cell (the server's context list for it) are
 * highlighted; grounding inputs stay disabled until the dimension's idea is
 * submitted, mirroring the ordering rule the server enforces.
 */

import { el } from "./dom.js";
import { WorkbenchStore } from "./state.js";

const DIMENSIONS = ["person", "approach", "interaction"] as const;
const LEVELS = ["idea", "grounding"] as const;

const DIMENSION_TITLES: Record<string, string> = {
  person: "Person",
  approach: "Approach",
  interaction: "Interaction",
};

export function renderMatrixView(store: WorkbenchStore): HTMLElement {
  const project = store.project;
  if (!project) return el("div", {}, "No prototype selected.");
  const matrix = project.matrix;
  const busy = store.view.pendingGeneration;
  const root = el("div", { class: "matrix-view" });

  const problemForm = el(
    "form",
    {
      class: "problem-form",
      onsubmit: (event) => {
        event.preventDefault();
        const input = root.querySelector<HTMLInputElement>("#problem-input")!;
        void store.mutate(() => store.api.submitProblem(project.id, input.value));
      },
    },
    el("label", { for: "problem-input" }, "Problem"),
    el("input", {
      id: "problem-input",
      value: matrix.problem,
      placeholder: "What do you want to build?",
      disabled: busy,
    }),
    el("button", { type: "submit", class: "submit-problem", disabled: busy }, "Submit")
  );
  root.append(problemForm);

  if (store.lastError) {
    root.append(
      el("div", { class: "inline-error", role: "alert" },
        `${store.lastError.code}: ${store.lastError.message}`)
    );
  }

  const focused = store.view.focusedCell;
  const highlighted = new Set<string>(
    focused ? (matrix.context[focused] ?? []).map(([key]) => key) : []
  );

  const grid = el("div", { class: "matrix-grid" });
  for (const level of LEVELS) {
    for (const dimension of DIMENSIONS) {
      const key = `${dimension}:${level}`;
      const cell = matrix.cells[key];
      const ideaSubmitted =
        matrix.cells[`${dimension}:idea`].submitted !== null;
      const locked = level === "grounding" && !ideaSubmitted;
      const disabled = busy || locked || !matrix.problem;

      const classes = ["matrix-cell"];
      if (highlighted.has(key)) classes.push("highlighted");
      if (store.view.focusedCell === key) classes.push("focused");
      if (locked) classes.push("locked");

      const candidateList = el("div", { class: "candidates" });
      cell.candidates.forEach((candidate, position) => {
        candidateList.append(
          el(
            "button",
            {
              type: "button",
              class: "candidate",
              "data-position": String(position),
              disabled: disabled,
              onclick: () => {
                const input = grid.querySelector<HTMLTextAreaElement>(
                  `[data-cell="${key}"] textarea.cell-input`
                )!;
                input.value = candidate;
              },
            },
            candidate
          )
        );
      });

      const input = el("textarea", {
        class: "cell-input",
        rows: "3",
        placeholder: locked ? "Submit the idea first" : "Select, edit, or write...",
        disabled: disabled,
      });
      input.value = cell.submitted ?? "";

      const node = el(
        "section",
        {
          class: classes.join(" "),
          "data-cell": key,
          tabindex: "0",
          onfocusin: () => {
            if (store.view.focusedCell !== key) store.focusCell(key);
          },
        },
        el(
          "header",
          {},
          el("strong", {}, `${DIMENSION_TITLES[dimension]} ${level}`),
          cell.stale ? el("span", { class: "stale-badge" }, "stale") : null,
          cell.submitted !== null && !cell.stale
            ? el("span", { class: "submitted-badge" }, "submitted")
            : null
        ),
        candidateList,
        input,
        el(
          "div",
          { class: "cell-actions" },
          el(
            "button",
            {
              type: "button",
              class: "brainstorm",
              disabled: disabled,
              onclick: () =>
                void store.generate(() => store.api.brainstorm(project.id, key)),
            },
            "Brainstorm"
          ),
          el(
            "button",
            {
              type: "button",
              class: "iterate-cell",
              disabled: disabled,
              onclick: () => {
                const feedback = window.prompt("How should the ideas change?") ?? "";
                if (feedback.trim()) {
                  void store.generate(() =>
                    store.api.iterateCell(project.id, key, feedback)
                  );
                }
              },
            },
            "Iterate"
          ),
          el(
            "button",
            {
              type: "button",
              class: "submit-cell",
              disabled: disabled,
              onclick: () => {
                const value = (
                  node.querySelector("textarea.cell-input") as HTMLTextAreaElement
                ).value;
                void store.mutate(() => store.api.submitCell(project.id, key, value));
              },
            },
            "Submit"
          ),
          el(
            "button",
            {
              type: "button",
              class: "save-version",
              disabled: busy,
              onclick: () =>
                void store.mutate(() => store.api.saveCellVersion(project.id, key)),
            },
            "Save version"
          )
        ),
        renderSnapshotPicker(store, project.id, key, cell.versions.length, busy)
      );
      grid.append(node);
    }
  }
  root.append(grid);
  root.append(
    el(
      "p",
      { class: "matrix-status" },
      matrix.complete
        ? "Design matrix complete — move on to scoping."
        : "Fill all six cells to complete the design."
    )
  );
  return root;
}

function renderSnapshotPicker(
  store: WorkbenchStore,
  projectId: string,
  key: string,
  count: number,
  busy: boolean
): HTMLElement | null {
  if (count === 0) return null;
  const select = el("select", { class: "snapshot-select", disabled: busy });
  select.append(el("option", { value: "" }, `${count} saved version(s)`));
  for (let i = 1; i <= count; i++) {
    select.append(el("option", { value: `s${i}` }, `restore s${i}`));
  }
  select.addEventListener("change", () => {
    if (select.value) {
      void store.mutate(() =>
        store.api.restoreCellVersion(projectId, key, select.value)
      );
    }
  });
  return select;
}
