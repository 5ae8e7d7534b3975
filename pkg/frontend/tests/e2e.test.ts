/** End-to-end workbench test against a replay-mode server.
 *
 * Boots the real HTTP server with recorded fixtures, mounts the real UI in a
 * scripted DOM, and drives it through the scenario: grounding gating,
 * server-driven context highlights, the iterate/debug flow, and version
 * pinning in the preview frame.
 */

import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, expect, it } from "vitest";

import { WorkbenchApi } from "../src/api.js";
import { createWorkbench, Workbench } from "../src/app.js";
import * as scenario from "./scenario.js";

const REPO_ROOT = join(dirname(fileURLToPath(import.meta.url)), "..", "..");

let server: ChildProcess | null = null;
let api: WorkbenchApi;
let bench: Workbench;
let projectId: string;

async function until(
  check: () => boolean,
  what: string,
  timeout = 20_000
): Promise<void> {
  const start = Date.now();
  while (!check()) {
    if (Date.now() - start > timeout) {
      throw new Error(`timed out waiting for ${what}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}

function q<T extends Element>(selector: string): T {
  const node = document.querySelector<T>(selector);
  if (!node) throw new Error(`no element matches ${selector}`);
  return node;
}

function click(selector: string): void {
  q<HTMLElement>(selector).click();
}

beforeAll(async () => {
  const scratch = mkdtempSync(join(tmpdir(), "workbench-e2e-"));
  const fixtures = join(scratch, "fixtures");
  execFileSync("python3", ["-m", "protoforge.demo", fixtures], { cwd: REPO_ROOT });

  server = spawn(
    "python3",
    [
      "-m",
      "protoforge",
      "--provider",
      "replay",
      "--fixtures",
      fixtures,
      "--port",
      "0",
      "--data-dir",
      join(scratch, "data"),
    ],
    { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "inherit"] }
  );
  const base = await new Promise<string>((resolve, reject) => {
    let buffer = "";
    const timer = setTimeout(
      () => reject(new Error("server never reported its port")),
      60_000
    );
    server!.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(/listening on (http:\/\/[0-9.:]+)/);
      if (match) {
        clearTimeout(timer);
        resolve(match[1]);
      }
    });
    server!.on("exit", (code) =>
      reject(new Error(`server exited early with code ${code}`))
    );
  });
  api = new WorkbenchApi(base);
  // The port is announced before the event loop accepts connections; poll
  // until the API answers.
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      await api.listProjects();
      break;
    } catch (error) {
      if (Date.now() > deadline) throw error;
      await new Promise((resolve) => setTimeout(resolve, 200));
    }
  }

  document.body.innerHTML = '<div id="root"></div>';
  bench = createWorkbench(document.getElementById("root")!, api);
  await bench.store.refresh();
});

afterAll(() => {
  server?.kill();
});

it("creates a prototype and submits the problem through the UI", async () => {
  window.prompt = () => scenario.PROJECT_NAME;
  click("#new-prototype");
  await until(() => bench.store.project !== null, "project to open");
  projectId = bench.store.project!.id;

  const problemInput = q<HTMLInputElement>("#problem-input");
  problemInput.value = scenario.PROBLEM;
  click(".submit-problem");
  await until(
    () => bench.store.project?.matrix.problem === scenario.PROBLEM,
    "problem to land"
  );
  expect(q<HTMLInputElement>("#problem-input").value).toBe(scenario.PROBLEM);
});

it("keeps grounding inputs disabled until the idea is submitted", async () => {
  const grounding = () => q<HTMLElement>('[data-cell="person:grounding"]');
  expect(grounding().classList.contains("locked")).toBe(true);
  expect(
    grounding().querySelector<HTMLTextAreaElement>("textarea.cell-input")!.disabled
  ).toBe(true);
  expect(
    grounding().querySelector<HTMLButtonElement>("button.submit-cell")!.disabled
  ).toBe(true);

  // Brainstorm the person idea through the UI, pick the scenario candidate,
  // and submit it.
  const idea = q<HTMLElement>('[data-cell="person:idea"]');
  idea.querySelector<HTMLButtonElement>("button.brainstorm")!.click();
  await until(
    () =>
      (bench.store.project?.matrix.cells["person:idea"].candidates.length ?? 0) > 0,
    "brainstormed candidates"
  );
  const candidates = Array.from(
    document.querySelectorAll<HTMLButtonElement>(
      '[data-cell="person:idea"] button.candidate'
    )
  );
  expect(candidates.length).toBe(3);
  const choice = candidates.find((c) => c.textContent === scenario.PERSON_IDEA)!;
  choice.click();
  q<HTMLElement>('[data-cell="person:idea"]')
    .querySelector<HTMLButtonElement>("button.submit-cell")!
    .click();
  await until(
    () =>
      bench.store.project?.matrix.cells["person:idea"].submitted ===
      scenario.PERSON_IDEA,
    "idea submission"
  );

  expect(grounding().classList.contains("locked")).toBe(false);
  expect(
    grounding().querySelector<HTMLTextAreaElement>("textarea.cell-input")!.disabled
  ).toBe(false);
});

it("highlights exactly the cells the server reports as context", async () => {
  // Fill the remaining cells directly through the API; the UI re-fetches.
  await api.submitCell(projectId, "person:grounding", scenario.PERSON_GROUNDING);
  await api.submitCell(projectId, "approach:idea", scenario.APPROACH_IDEA);
  await api.submitCell(projectId, "approach:grounding", scenario.APPROACH_GROUNDING);
  await api.submitCell(projectId, "interaction:idea", scenario.INTERACTION_IDEA);
  await bench.store.refresh();

  const target = q<HTMLElement>('[data-cell="interaction:grounding"]');
  target.dispatchEvent(new window.FocusEvent("focusin", { bubbles: true }));
  await until(
    () => document.querySelectorAll(".matrix-cell.highlighted").length > 0,
    "highlights to render"
  );

  const highlightedInDom = new Set(
    Array.from(document.querySelectorAll(".matrix-cell.highlighted")).map(
      (node) => (node as HTMLElement).dataset.cell
    )
  );
  const matrix = await api.getMatrix(projectId);
  const serverContext = new Set(
    matrix.context["interaction:grounding"].map(([key]) => key)
  );
  expect(highlightedInDom).toEqual(serverContext);
  expect(serverContext.size).toBe(5);
  expect(highlightedInDom.has("interaction:grounding")).toBe(false);
});

it("walks scoping and the first three steps", async () => {
  await api.submitCell(
    projectId,
    "interaction:grounding",
    scenario.INTERACTION_GROUNDING
  );
  await api.identifyRequirements(projectId);
  await api.generateSpec(projectId);
  await api.generateData(projectId);
  await api.generatePlan(projectId);
  for (const step of [1, 2]) {
    await api.generateStep(projectId, step);
    await api.approveStep(projectId, step);
  }
  await api.generateStep(projectId, 3);
  await bench.store.refresh();

  const project = bench.store.project!;
  expect(project.requirements.selected).toEqual([
    "ImageGeneration",
    "PregeneratedData",
  ]);
  expect(project.plan!.steps.length).toBe(5);
  expect(project.plan!.steps[2].status).toBe("generated");
});

it("completes the iterate flow: bug text, new version, preview reload", async () => {
  bench.store.setStage("implementation");
  bench.store.selectStep(3);
  await until(
    () => document.querySelector('[data-active-step="3"]') !== null,
    "step 3 panel"
  );

  const before = bench.store.project!.plan!.steps[2];
  expect(before.versions.length).toBe(1);
  const generatedId = before.versions[0].id;
  expect(q<HTMLIFrameElement>("#preview-frame").src).toContain(
    `version=${generatedId}`
  );

  const input = q<HTMLInputElement>("#iterate-input");
  input.value = scenario.ITERATE_PROBLEM;
  click("#run-iterate");
  await until(
    () => (bench.store.project?.plan?.steps[2].versions.length ?? 0) === 2,
    "iterated version"
  );

  const step = bench.store.project!.plan!.steps[2];
  const iterated = step.versions[1];
  expect(iterated.provenance).toBe("iterated");
  expect(iterated.parent).toBe(generatedId);
  expect(step.current_version).toBe(iterated.id);

  // The preview frame reloaded onto the new version...
  const frame = q<HTMLIFrameElement>("#preview-frame");
  expect(frame.src).toContain(`version=${iterated.id}`);
  // ...and the server serves the fixed document at that URL.
  const served = await (await fetch(frame.src)).text();
  expect(served).toContain("scenario-step-3-iterated");
});

it("pins historical versions through the dropdown", async () => {
  const step = bench.store.project!.plan!.steps[2];
  const generatedId = step.versions[0].id;
  const iteratedId = step.versions[1].id;

  const select = q<HTMLSelectElement>("#version-select");
  select.value = generatedId;
  select.dispatchEvent(new window.Event("change", { bubbles: true }));
  await until(
    () => q<HTMLIFrameElement>("#preview-frame").src.includes(`version=${generatedId}`),
    "pinned preview"
  );

  const pinned = await (await fetch(q<HTMLIFrameElement>("#preview-frame").src)).text();
  expect(pinned).not.toContain("scenario-step-3-iterated");
  expect(pinned).toContain("scenario-step-3");

  // The pin is a view concern: the server's current version is untouched.
  const serverStep = (await api.getProject(projectId)).plan!.steps[2];
  expect(serverStep.current_version).toBe(iteratedId);
});

it("disables write affordances while a generation is pending", async () => {
  bench.store.view.pendingGeneration = true;
  bench.render();
  const buttons = Array.from(
    document.querySelectorAll<HTMLButtonElement>(
      "#generate-code, #approve-step, #run-iterate, #new-prototype"
    )
  );
  expect(buttons.length).toBeGreaterThan(0);
  expect(buttons.every((b) => b.disabled)).toBe(true);
  bench.store.view.pendingGeneration = false;
  bench.render();
  expect(q<HTMLButtonElement>("#generate-code").disabled).toBe(false);
});
