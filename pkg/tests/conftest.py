"""Shared test providers, builders, and the matrix context oracle."""

from __future__ import annotations

import re

import pytest

from protoforge.gateway import (
    CompletionResult,
    Gateway,
    GatewayMode,
    PromptRequest,
)
from protoforge.matrix import CellKey, Dimension, Level, MatrixState, submit_problem
from protoforge.project import Project
from protoforge.scoping import (
    Requirement,
    RequirementSet,
    RequirementSource,
    SpecDoc,
    parse_spec_sections,
)


def result_for(text: str) -> CompletionResult:
    return CompletionResult(
        text=text,
        provider_model_id="stub",
        input_tokens=1,
        output_tokens=max(1, len(text) // 4),
        truncated=False,
    )


class EchoProvider:
    """Always returns one fixed completion."""

    def __init__(self, text: str):
        self.text = text
        self.calls = 0

    def complete(self, request: PromptRequest) -> CompletionResult:
        self.calls += 1
        return result_for(self.text)


class QueueProvider:
    """Returns queued completions in order; fails when drained."""

    def __init__(self, texts: list[str]):
        self.texts = list(texts)
        self.requests: list[PromptRequest] = []

    def complete(self, request: PromptRequest) -> CompletionResult:
        self.requests.append(request)
        if not self.texts:
            raise AssertionError("queue provider drained")
        return result_for(self.texts.pop(0))


class FailingProvider:
    """Trips the moment anything contacts it; used to prove replay stays offline."""

    def complete(self, request: PromptRequest) -> CompletionResult:
        raise AssertionError("provider was contacted")


def minimal_document(
    body_lines: list[str] | None = None, *, title: str = "Test App"
) -> str:
    """Smallest document that lints clean against the default rules."""
    lines = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        f"  <title>{title}</title>",
        '  <script src="https://unpkg.com/react@18/umd/react.development.js" crossorigin></script>',
        '  <script src="https://unpkg.com/react-dom@18/umd/react-dom.development.js" crossorigin></script>',
        '  <script src="https://unpkg.com/@babel/standalone/babel.min.js"></script>',
        '  <link rel="stylesheet" href="https://fonts.googleapis.com/css?family=Roboto:300,400,500,700&display=swap" />',
        '  <script src="https://unpkg.com/@mui/material@5.0.0-rc.1/umd/material-ui.development.js" crossorigin></script>',
        "</head>",
        "<body>",
        '  <div id="root"></div>',
        '  <script type="text/babel">',
    ]
    lines.extend(body_lines or [])
    lines.extend(["  </script>", "</body>", "</html>"])
    return "\n".join(lines)


_MARKER_RE = re.compile(r"marker-(\d+)")


class StepwiseMockProvider:
    """Mock codegen provider for retention checks.

    Answers plan prompts with a scripted numbered list and step prompts with a
    document carrying cumulative markers: whatever markers appear in the
    prompt's previous-code block, plus the next one.
    """

    def __init__(self, step_count: int):
        self.step_count = step_count

    def complete(self, request: PromptRequest) -> CompletionResult:
        if "implementation plan" in request.rendered_system:
            plan = "\n".join(
                f"{i}. Build part {i} of the app." for i in range(1, self.step_count + 1)
            )
            return result_for(plan)
        seen = {int(m) for m in _MARKER_RE.findall(request.rendered_user)}
        next_marker = max(seen, default=0) + 1
        body = [f"    <!-- marker-{k} -->" for k in sorted(seen | {next_marker})]
        return result_for(minimal_document(body))


def live_gateway(provider) -> Gateway:
    from protoforge.gateway import ModelRole

    return Gateway(
        GatewayMode.LIVE,
        {ModelRole.IDEATION: provider, ModelRole.CODEGEN: provider},
    )


VALID_SPEC_BODY = """\
Application Layout:
- One page with a "Board" section and a "Stats" section.
User Interactions:
- Users click a card to flip it.
Inputs and Logic:
- Pre-generated data drives the board.
- Create placeholder data for the cards."""


def make_project(name: str = "test-project") -> Project:
    """In-memory project, no store attached."""
    return Project(id=name, name=name)


def fill_matrix(project: Project, problem: str = "learn things") -> Project:
    """Submit the problem and all six cells in a fixed order."""
    from protoforge.matrix import submit_cell

    project.matrix = submit_problem(problem)
    for dimension in Dimension:
        for level in Level:
            submit_cell(
                project.matrix,
                CellKey(dimension, level),
                f"{dimension.value} {level.value} text",
            )
    return project


def scoped_project(
    name: str = "test-project",
    requirements: set[Requirement] | None = None,
    spec_body: str = VALID_SPEC_BODY,
) -> Project:
    project = fill_matrix(make_project(name))
    project.requirements = RequirementSet(
        requirements if requirements is not None else set(),
        RequirementSource.USER_EDITED,
    )
    project.spec = SpecDoc(
        body=spec_body, sections=parse_spec_sections(spec_body), edited_by_user=False
    )
    return project


# --- the brute-force context oracle -------------------------------------------------


def oracle_context(matrix: MatrixState, target: CellKey) -> list[tuple[CellKey, str]]:
    """Recompute context from the submission log alone.

    Latest submit per cell, minus stale groundings (staleness replayed from
    the log: an idea submit stales its dimension's already-submitted
    grounding, a grounding submit refreshes it), minus the target, in submit
    order.
    """
    latest: dict[CellKey, int] = {}
    stale: set[CellKey] = set()
    for position, key in enumerate(matrix.submission_log):
        latest[key] = position
        if key.level is Level.IDEA:
            grounding = CellKey(key.dimension, Level.GROUNDING)
            if grounding in latest:
                stale.add(grounding)
        else:
            stale.discard(key)
    ordered = sorted(latest.items(), key=lambda item: item[1])
    entries = []
    for key, _ in ordered:
        if key == target or key in stale:
            continue
        submitted = matrix.cells[key].submitted
        if submitted is None:
            continue
        entries.append((key, submitted))
    return entries


def oracle_complete(matrix: MatrixState) -> bool:
    latest: dict[CellKey, int] = {}
    stale: set[CellKey] = set()
    for position, key in enumerate(matrix.submission_log):
        latest[key] = position
        if key.level is Level.IDEA:
            grounding = CellKey(key.dimension, Level.GROUNDING)
            if grounding in latest:
                stale.add(grounding)
        else:
            stale.discard(key)
    if not matrix.problem.strip():
        return False
    from protoforge.matrix import ALL_CELL_KEYS

    return all(key in latest and key not in stale for key in ALL_CELL_KEYS)


@pytest.fixture(scope="session")
def usage_fixtures(tmp_path_factory):
    """Usage-scenario replay fixture file, recorded once per session."""
    from protoforge.demo import write_usage_fixtures

    target = tmp_path_factory.mktemp("fixtures")
    return write_usage_fixtures(target)


# --- HTTP scenario driver -------------------------------------------------------


def ok(response, status=200):
    assert response.status_code == status, response.text
    return response.json() if response.content else None


def drive_scenario_http(client, name=None) -> str:
    """Walk the usage scenario through the public routes; returns project id."""
    from protoforge.demo import (
        APPROACH_GROUNDING_SRS,
        APPROACH_GROUNDING_STORY,
        APPROACH_IDEAS,
        INTERACTION_GROUNDING_TEXT,
        INTERACTION_IDEAS,
        ITERATE_PROBLEM_TEXT,
        PERSON_GROUNDING_TEXT,
        PERSON_IDEAS,
        USAGE_PROBLEM,
        USAGE_PROJECT_NAME,
    )

    project = ok(client.post("/projects", json={"name": name or USAGE_PROJECT_NAME}), 201)
    pid = project["id"]
    base = f"/projects/{pid}"

    ok(client.put(f"{base}/problem", json={"problem": USAGE_PROBLEM}))
    for cell, submission in [
        ("person/idea", PERSON_IDEAS[1]),
        ("person/grounding", PERSON_GROUNDING_TEXT),
        ("approach/idea", APPROACH_IDEAS[1]),
        ("approach/grounding", APPROACH_GROUNDING_STORY),
    ]:
        ok(client.post(f"{base}/matrix/{cell}/brainstorm", json={}))
        ok(client.put(f"{base}/matrix/{cell}/submit", json={"content": submission}))
    ok(client.post(f"{base}/matrix/approach/grounding/versions", json={}), 201)
    ok(client.put(f"{base}/matrix/approach/idea/submit", json={"content": APPROACH_IDEAS[0]}))
    ok(client.post(f"{base}/matrix/approach/grounding/brainstorm", json={}))
    ok(
        client.put(
            f"{base}/matrix/approach/grounding/submit",
            json={"content": APPROACH_GROUNDING_SRS},
        )
    )
    ok(client.post(f"{base}/matrix/interaction/idea/brainstorm", json={}))
    ok(
        client.put(
            f"{base}/matrix/interaction/idea/submit",
            json={"content": INTERACTION_IDEAS[0]},
        )
    )
    ok(client.post(f"{base}/matrix/interaction/grounding/brainstorm", json={}))
    ok(
        client.put(
            f"{base}/matrix/interaction/grounding/submit",
            json={"content": INTERACTION_GROUNDING_TEXT},
        )
    )

    ok(client.post(f"{base}/requirements/identify"))
    ok(client.post(f"{base}/spec/generate"))
    ok(client.post(f"{base}/data/generate"))
    ok(client.post(f"{base}/plan/generate"))
    for step in range(1, 6):
        ok(client.post(f"{base}/plan/steps/{step}/generate"))
        if step == 3:
            ok(
                client.post(
                    f"{base}/plan/steps/3/iterate",
                    json={"problem": ITERATE_PROBLEM_TEXT},
                )
            )
        ok(client.post(f"{base}/plan/steps/{step}/approve"))
    return pid
