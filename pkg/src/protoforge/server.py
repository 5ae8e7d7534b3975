"""HTTP JSON API over the whole pipeline, the prototype preview server, the
placeholder-data endpoint, and the self-invocation proxy.

Every route delegates 1:1 to a module operation. Domain errors map to
stable machine codes; mutating routes hold the project's writer lock and
generations additionally take the project's single in-flight slot.
"""

from __future__ import annotations

import json
import os
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import HTMLResponse, JSONResponse

from . import codegen, gateway as gw, ideation, matrix as mx, prompts, scoping, store as st
from .codegen import CodeRules
from .gateway import Gateway, GatewayMode, HttpChatProvider, ModelRole, ReplayIndex
from .project import Project
from .store import ProjectStore


class Busy(Exception):
    def __init__(self, project_id: str):
        super().__init__(f"a generation is already in flight for {project_id!r}")


class ConfigError(Exception):
    pass


@dataclass
class ServerConfig:
    port: int = 8000
    data_dir: Path = Path("./data")
    provider_mode: str = "live"  # live | record | replay
    replay_fixture_path: Path | None = None
    ideation_model_id: str = "gpt-4"
    codegen_model_id: str = "claude-3-5-sonnet"
    self_invoke_mode: str = "proxy"  # proxy | inject-key
    ideation_token_cap: int = 1024
    codegen_token_cap: int = 4096
    call_budget: int = 200
    ideation_base_url: str = "https://api.openai.com/v1"
    codegen_base_url: str = "https://api.anthropic.com/v1"
    self_invoke_base_url: str = "https://api.openai.com/v1"
    request_timeout: float = 300.0
    code_rules: CodeRules = field(default_factory=CodeRules)

    def validate(self) -> None:
        if self.provider_mode not in ("live", "record", "replay"):
            raise ConfigError(f"unknown provider mode {self.provider_mode!r}")
        if self.self_invoke_mode not in ("proxy", "inject-key"):
            raise ConfigError(f"unknown self-invoke mode {self.self_invoke_mode!r}")
        if self.provider_mode == "replay":
            if self.replay_fixture_path is None:
                raise ConfigError("replay mode requires --fixtures")
            if not Path(self.replay_fixture_path).exists():
                raise ConfigError(
                    f"fixture path {self.replay_fixture_path} does not exist"
                )
        if self.self_invoke_mode == "inject-key" and not os.environ.get(
            "SELF_INVOKE_API_KEY"
        ):
            raise ConfigError("inject-key mode requires SELF_INVOKE_API_KEY to be set")

    @property
    def proxy_mode(self) -> bool:
        return self.self_invoke_mode == "proxy"


# Stable machine codes for every domain error; tests assert codes, not
# messages. Order matters: subclasses must precede their bases.
_ERROR_MAP: list[tuple[type[Exception], int, str]] = [
    (mx.EmptyProblem, 400, "empty_problem"),
    (mx.EmptyContent, 400, "empty_content"),
    (mx.EmptyFeedback, 400, "empty_feedback"),
    (mx.NothingToSave, 400, "nothing_to_save"),
    (mx.UnknownSnapshot, 404, "unknown_snapshot"),
    (mx.PreconditionOrder, 409, "precondition_order"),
    (scoping.MatrixIncomplete, 409, "matrix_incomplete"),
    (scoping.UnknownRequirement, 400, "unknown_requirement"),
    (scoping.RequirementsNotSet, 409, "requirements_not_set"),
    (scoping.RequirementMissing, 409, "requirement_missing"),
    (scoping.SpecMissing, 409, "spec_missing"),
    (scoping.SpecShapeError, 422, "spec_shape_error"),
    (scoping.LengthOutOfRange, 422, "length_out_of_range"),
    (codegen.PlanMissing, 409, "plan_missing"),
    (codegen.StepCountOutOfRange, 422, "step_count_out_of_range"),
    (codegen.IndexOutOfRange, 404, "index_out_of_range"),
    (codegen.RemoveApprovedStep, 409, "remove_approved_step"),
    (codegen.RegenerateApprovedStep, 409, "regenerate_approved_step"),
    (codegen.PriorStepUnapproved, 409, "prior_step_unapproved"),
    (codegen.NoCurrentVersion, 409, "no_current_version"),
    (codegen.NotGenerated, 409, "not_generated"),
    (codegen.UnknownVersion, 404, "unknown_version"),
    (codegen.SanitizeFailure, 422, "sanitize_failure"),
    (codegen.EmptyProblem, 400, "empty_problem"),
    (gw.MissingPlaceholder, 400, "missing_placeholder"),
    (gw.UnknownPlaceholder, 400, "unknown_placeholder"),
    (gw.ParseFailure, 422, "parse_failure"),
    (gw.ReplayMiss, 502, "replay_miss"),
    (gw.ProviderError, 502, "provider_error"),
    (gw.GatewayTimeout, 502, "timeout"),
    (gw.BudgetExceeded, 409, "budget_exceeded"),
    (st.EmptyName, 400, "empty_name"),
    (st.DuplicateName, 400, "duplicate_name"),
    (st.UnknownProject, 404, "unknown_project"),
    (st.NothingToExport, 404, "nothing_to_export"),
    (st.StorageError, 500, "storage_error"),
    (Busy, 409, "busy"),
    (ValueError, 400, "invalid_request"),
]


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail: str = ""):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


def _translate(exc: Exception) -> ApiError:
    for klass, status, code in _ERROR_MAP:
        if isinstance(exc, klass):
            return ApiError(status, code, str(exc), detail=type(exc).__name__)
    raise exc


class _ProjectLocks:
    """Per-project writer lock plus a single in-flight generation slot."""

    def __init__(self):
        self._registry_lock = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}
        self._busy: set[str] = set()

    def _lock_for(self, project_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(project_id, threading.Lock())

    @contextmanager
    def write(self, project_id: str, *, generation: bool = False):
        if project_id in self._busy:
            raise Busy(project_id)
        lock = self._lock_for(project_id)
        if not lock.acquire(timeout=10.0):
            raise Busy(project_id)
        try:
            if generation:
                self._busy.add(project_id)
            yield
        finally:
            if generation:
                self._busy.discard(project_id)
            lock.release()


# --- view serialization -------------------------------------------------------


def _matrix_view(project: Project) -> dict:
    m = project.matrix
    cells = {}
    context = {}
    for key in mx.ALL_CELL_KEYS:
        state = m.cells[key]
        cells[str(key)] = {
            "candidates": list(state.candidates),
            "submitted": state.submitted,
            "stale": state.stale,
            "versions": [
                {"id": s.id, "candidates": list(s.candidates), "submitted": s.submitted}
                for s in state.history
            ],
        }
        context[str(key)] = [
            [str(entry_key), text] for entry_key, text in mx.context_for(m, key)
        ]
    return {
        "problem": m.problem,
        "complete": mx.matrix_complete(m),
        "cells": cells,
        "submission_log": [str(key) for key in m.submission_log],
        "context": context,
    }


def _requirements_view(project: Project) -> dict | None:
    available = [
        {"name": req.value, "label": scoping.REQUIREMENT_LABELS[req]}
        for req in scoping.Requirement
    ]
    if project.requirements is None:
        return {"selected": None, "source": None, "available": available}
    return {
        "selected": sorted(r.value for r in project.requirements.selected),
        "source": project.requirements.source.value,
        "available": available,
    }


def _spec_view(project: Project) -> dict | None:
    if project.spec is None:
        return None
    return {
        "body": project.spec.body,
        "edited_by_user": project.spec.edited_by_user,
        "sections": [
            {"title": s.title, "start": s.start, "end": s.end}
            for s in project.spec.sections
        ],
        "history_length": len(project.spec_history),
    }


def _data_view(project: Project) -> dict | None:
    if project.data is None:
        return None
    return {
        "raw_text": project.data.raw_text,
        "item_count": len(project.data.items),
        "edited_by_user": project.data.edited_by_user,
        "length_warning": project.data.length_warning,
    }


def _step_view(step: codegen.PlanStep) -> dict:
    return {
        "index": step.index,
        "description": step.description,
        "status": step.status.value,
        "current_version": step.current_version,
        "versions": [
            {
                "id": v.id,
                "provenance": v.provenance.value,
                "parent": v.parent,
                "created_at": v.created_at,
                "lint": [issue.to_dict() for issue in v.lint],
                "error_count": sum(
                    1 for issue in v.lint if issue.severity is codegen.Severity.ERROR
                ),
            }
            for v in step.versions
        ],
    }


def _plan_view(project: Project) -> dict | None:
    if project.plan is None:
        return None
    return {
        "stale": project.plan.stale,
        "steps": [_step_view(step) for step in project.plan.steps],
        "history_length": len(project.plan_history),
    }


def _project_view(project: Project) -> dict:
    return {
        "id": project.id,
        "name": project.name,
        "created_at": project.created_at,
        "updated_at": project.updated_at,
        "matrix": _matrix_view(project),
        "requirements": _requirements_view(project),
        "spec": _spec_view(project),
        "data": _data_view(project),
        "plan": _plan_view(project),
    }


def _summary(project: Project) -> dict:
    return {
        "id": project.id,
        "name": project.name,
        "created_at": project.created_at,
        "updated_at": project.updated_at,
    }


# --- application factory ---------------------------------------------------------


def build_live_providers(config: ServerConfig) -> dict[ModelRole, HttpChatProvider]:
    return {
        ModelRole.IDEATION: HttpChatProvider(
            config.ideation_model_id,
            os.environ.get("IDEATION_API_KEY", ""),
            base_url=config.ideation_base_url,
            timeout=config.request_timeout,
        ),
        ModelRole.CODEGEN: HttpChatProvider(
            config.codegen_model_id,
            os.environ.get("CODEGEN_API_KEY", ""),
            base_url=config.codegen_base_url,
            timeout=config.request_timeout,
        ),
    }


def create_app(config: ServerConfig, providers=None) -> FastAPI:
    config.validate()
    store = ProjectStore(Path(config.data_dir))
    replay_index = None
    if config.provider_mode == "replay":
        try:
            replay_index = ReplayIndex.load(Path(config.replay_fixture_path))
        except ValueError as exc:
            raise ConfigError(f"fixture verification failed: {exc}") from exc
    if providers is None and config.provider_mode in ("live", "record"):
        providers = build_live_providers(config)
    gateway = Gateway(
        GatewayMode(config.provider_mode),
        providers,
        replay_index=replay_index,
        token_caps={
            ModelRole.IDEATION: config.ideation_token_cap,
            ModelRole.CODEGEN: config.codegen_token_cap,
        },
        call_budget=config.call_budget,
    )
    locks = _ProjectLocks()

    app = FastAPI(title="protoforge", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.config = config
    app.state.store = store
    app.state.gateway = gateway

    @app.exception_handler(Exception)
    async def _on_error(request: Request, exc: Exception):
        if not isinstance(exc, ApiError):
            try:
                exc = _translate(exc)
            except Exception:
                return JSONResponse(
                    status_code=500,
                    content={
                        "code": "internal_error",
                        "message": str(exc),
                        "detail": type(exc).__name__,
                    },
                )
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "detail": exc.detail},
        )

    app.add_exception_handler(ApiError, _on_error)

    def mutate(project_id: str, fn, *, generation: bool = False):
        with locks.write(project_id, generation=generation):
            project = store.load(project_id)
            result = fn(project)
            store.save(project)
            return result

    async def body_of(request: Request) -> dict:
        raw = await request.body()
        if not raw:
            return {}
        try:
            payload = json.loads(raw)
        except ValueError as exc:
            raise ApiError(400, "invalid_request", f"body is not JSON: {exc}")
        if not isinstance(payload, dict):
            raise ApiError(400, "invalid_request", "body must be a JSON object")
        return payload

    def parse_cell(dim: str, level: str) -> mx.CellKey:
        try:
            return mx.CellKey(mx.Dimension(dim), mx.Level(level))
        except ValueError:
            raise ApiError(404, "unknown_cell", f"no matrix cell {dim}:{level}")

    # -- projects ---------------------------------------------------------------

    @app.post("/projects", status_code=201)
    async def create_project(request: Request):
        payload = await body_of(request)
        project = store.create_project(str(payload.get("name", "")))
        return _summary(project)

    @app.get("/projects")
    def list_projects():
        return store.list_projects()

    @app.get("/projects/{project_id}")
    def get_project(project_id: str):
        return _project_view(store.load(project_id))

    @app.post("/projects/{project_id}/clone", status_code=201)
    async def clone_project(project_id: str, request: Request):
        payload = await body_of(request)
        clone = store.clone_project(project_id, str(payload.get("name", "")))
        return _summary(clone)

    @app.delete("/projects/{project_id}", status_code=204)
    def delete_project(project_id: str):
        store.delete_project(project_id)
        return Response(status_code=204)

    # -- matrix ------------------------------------------------------------------

    @app.put("/projects/{project_id}/problem")
    async def put_problem(project_id: str, request: Request):
        payload = await body_of(request)

        def op(project: Project):
            project.matrix = mx.submit_problem(str(payload.get("problem", "")))
            project.touch()
            return _matrix_view(project)

        return mutate(project_id, op)

    @app.get("/projects/{project_id}/matrix")
    def get_matrix(project_id: str):
        return _matrix_view(store.load(project_id))

    @app.post("/projects/{project_id}/matrix/{dim}/{level}/brainstorm")
    async def brainstorm_cell(project_id: str, dim: str, level: str, request: Request):
        payload = await body_of(request)
        key = parse_cell(dim, level)
        count = int(payload.get("count", ideation.DEFAULT_BRAINSTORM_COUNT))

        def op(project: Project):
            added = ideation.brainstorm(project, gateway, key, count)
            return {"added": added, "matrix": _matrix_view(project)}

        return mutate(project_id, op, generation=True)

    @app.post("/projects/{project_id}/matrix/{dim}/{level}/iterate")
    async def iterate_cell(project_id: str, dim: str, level: str, request: Request):
        payload = await body_of(request)
        key = parse_cell(dim, level)
        count = int(payload.get("count", ideation.DEFAULT_BRAINSTORM_COUNT))
        feedback = str(payload.get("feedback", ""))

        def op(project: Project):
            added = ideation.iterate_candidates(project, gateway, key, feedback, count)
            return {"added": added, "matrix": _matrix_view(project)}

        return mutate(project_id, op, generation=True)

    @app.put("/projects/{project_id}/matrix/{dim}/{level}/submit")
    async def submit_cell_route(project_id: str, dim: str, level: str, request: Request):
        payload = await body_of(request)
        key = parse_cell(dim, level)
        content = str(payload.get("content", ""))

        def op(project: Project):
            mx.submit_cell(project.matrix, key, content)
            project.touch()
            return _matrix_view(project)

        return mutate(project_id, op)

    @app.post("/projects/{project_id}/matrix/{dim}/{level}/versions", status_code=201)
    def save_cell_version_route(project_id: str, dim: str, level: str):
        key = parse_cell(dim, level)

        def op(project: Project):
            snapshot_id = mx.save_cell_version(project.matrix, key)
            project.touch()
            return {"snapshot_id": snapshot_id}

        return mutate(project_id, op)

    @app.get("/projects/{project_id}/matrix/{dim}/{level}/versions")
    def list_cell_versions_route(project_id: str, dim: str, level: str):
        key = parse_cell(dim, level)
        project = store.load(project_id)
        return [
            {"id": s.id, "candidates": list(s.candidates), "submitted": s.submitted}
            for s in mx.list_cell_versions(project.matrix, key)
        ]

    @app.post("/projects/{project_id}/matrix/{dim}/{level}/versions/{snapshot_id}/restore")
    def restore_cell_version_route(project_id: str, dim: str, level: str, snapshot_id: str):
        key = parse_cell(dim, level)

        def op(project: Project):
            mx.restore_cell_version(project.matrix, key, snapshot_id)
            project.touch()
            return _matrix_view(project)

        return mutate(project_id, op)

    # -- scoping -------------------------------------------------------------------

    @app.post("/projects/{project_id}/requirements/identify")
    def identify_requirements_route(project_id: str):
        def op(project: Project):
            scoping.identify_requirements(project, gateway)
            return _requirements_view(project)

        return mutate(project_id, op, generation=True)

    @app.put("/projects/{project_id}/requirements")
    async def put_requirements(project_id: str, request: Request):
        payload = await body_of(request)
        selected = payload.get("selected", [])
        if not isinstance(selected, list):
            raise ApiError(400, "invalid_request", "selected must be a list")

        def op(project: Project):
            scoping.set_requirements(project, selected)
            return _requirements_view(project)

        return mutate(project_id, op)

    @app.post("/projects/{project_id}/spec/generate")
    def generate_spec_route(project_id: str):
        def op(project: Project):
            scoping.generate_spec(project, gateway)
            return _spec_view(project)

        return mutate(project_id, op, generation=True)

    @app.put("/projects/{project_id}/spec")
    async def put_spec(project_id: str, request: Request):
        payload = await body_of(request)

        def op(project: Project):
            scoping.edit_spec(project, str(payload.get("body", "")))
            return _spec_view(project)

        return mutate(project_id, op)

    @app.post("/projects/{project_id}/data/generate")
    def generate_data_route(project_id: str):
        def op(project: Project):
            scoping.generate_data(project, gateway)
            return _data_view(project)

        return mutate(project_id, op, generation=True)

    @app.put("/projects/{project_id}/data")
    async def put_data(project_id: str, request: Request):
        payload = await body_of(request)

        def op(project: Project):
            scoping.edit_data(project, str(payload.get("raw_text", "")))
            return _data_view(project)

        return mutate(project_id, op)

    @app.get("/projects/{project_id}/data")
    def get_data(project_id: str):
        project = store.load(project_id)
        if project.data is None:
            raise ApiError(404, "no_data", "project has no placeholder data")
        # Byte-exact: serve raw_text as stored, not a re-serialization.
        return Response(
            content=project.data.raw_text.encode("utf-8"),
            media_type="application/json",
        )

    # -- plan and steps ---------------------------------------------------------------

    @app.post("/projects/{project_id}/plan/generate")
    def generate_plan_route(project_id: str):
        def op(project: Project):
            codegen.generate_plan(project, gateway)
            return _plan_view(project)

        return mutate(project_id, op, generation=True)

    @app.post("/projects/{project_id}/plan/steps", status_code=201)
    async def add_step_route(project_id: str, request: Request):
        payload = await body_of(request)
        after_index = int(payload.get("after_index", 0))
        description = str(payload.get("description", ""))

        def op(project: Project):
            codegen.add_step(project, after_index, description)
            return _plan_view(project)

        return mutate(project_id, op)

    @app.put("/projects/{project_id}/plan/steps/{index}")
    async def update_step_route(project_id: str, index: int, request: Request):
        payload = await body_of(request)

        def op(project: Project):
            codegen.update_step(project, index, str(payload.get("description", "")))
            return _plan_view(project)

        return mutate(project_id, op)

    @app.delete("/projects/{project_id}/plan/steps/{index}")
    def remove_step_route(project_id: str, index: int):
        def op(project: Project):
            codegen.remove_step(project, index)
            return _plan_view(project)

        return mutate(project_id, op)

    @app.post("/projects/{project_id}/plan/steps/{index}/generate")
    def generate_step_route(project_id: str, index: int):
        def op(project: Project):
            codegen.generate_step_code(
                project,
                gateway,
                index,
                rules=config.code_rules,
                proxy_mode=config.proxy_mode,
            )
            return _step_view(project.plan.step(index))

        return mutate(project_id, op, generation=True)

    @app.post("/projects/{project_id}/plan/steps/{index}/iterate")
    async def iterate_step_route(project_id: str, index: int, request: Request):
        payload = await body_of(request)
        problem = str(payload.get("problem", ""))

        def op(project: Project):
            codegen.iterate_step(
                project, gateway, index, problem, rules=config.code_rules
            )
            return _step_view(project.plan.step(index))

        return mutate(project_id, op, generation=True)

    @app.post("/projects/{project_id}/plan/steps/{index}/approve")
    def approve_step_route(project_id: str, index: int):
        def op(project: Project):
            step = codegen.approve_step(project, index)
            return _step_view(step)

        return mutate(project_id, op)

    @app.post("/projects/{project_id}/plan/steps/{index}/revert")
    def revert_step_route(project_id: str, index: int):
        def op(project: Project):
            codegen.revert_to_step(project, index)
            return _plan_view(project)

        return mutate(project_id, op)

    @app.put("/projects/{project_id}/plan/steps/{index}/current-version")
    async def select_version_route(project_id: str, index: int, request: Request):
        payload = await body_of(request)
        version_id = str(payload.get("version_id", ""))

        def op(project: Project):
            step = codegen.select_version(project, index, version_id)
            return _step_view(step)

        return mutate(project_id, op)

    @app.put("/projects/{project_id}/plan/steps/{index}/code")
    async def manual_edit_route(project_id: str, index: int, request: Request):
        payload = await body_of(request)
        html = str(payload.get("html", ""))

        def op(project: Project):
            step = codegen.save_manual_edit(
                project, index, html, rules=config.code_rules
            )
            return _step_view(step)

        return mutate(project_id, op)

    @app.get("/projects/{project_id}/plan/steps/{index}/code")
    def get_step_code(project_id: str, index: int, version: str | None = None):
        project = store.load(project_id)
        if project.plan is None:
            raise codegen.PlanMissing()
        step = project.plan.step(index)
        if version is not None:
            chosen = step.version(version)
        else:
            chosen = step.current()
            if chosen is None:
                raise codegen.NoCurrentVersion(index)
        return {
            "index": step.index,
            "version_id": chosen.id,
            "html": chosen.html,
            "lint": [issue.to_dict() for issue in chosen.lint],
        }

    # -- preview, export, proxy ----------------------------------------------------------

    def _resolve_preview(project: Project, step: int | None, version: str | None):
        if project.plan is None:
            raise ApiError(404, "no_version", "project has no generated code yet")
        chosen_step = None
        if step is not None:
            chosen_step = project.plan.step(step)
        else:
            for candidate in project.plan.steps:
                if candidate.versions:
                    chosen_step = candidate
        if chosen_step is None or not chosen_step.versions:
            raise ApiError(404, "no_version", "no code version to preview")
        if version is not None:
            return chosen_step, chosen_step.version(version)
        current = chosen_step.current()
        if current is None:
            raise ApiError(404, "no_version", "step has no current version")
        return chosen_step, current

    @app.get("/projects/{project_id}/preview")
    def preview(
        project_id: str,
        request: Request,
        step: int | None = None,
        version: str | None = None,
    ):
        project = store.load(project_id)
        _, chosen = _resolve_preview(project, step, version)
        html = chosen.html

        origin = str(request.base_url).rstrip("/")
        endpoint = project.data_endpoint_path()
        html = st.rewrite_endpoint(html, endpoint, origin)

        if config.proxy_mode:
            html = html.replace(
                prompts.UPSTREAM_COMPLETIONS_URL, prompts.PROXY_COMPLETIONS_PATH
            )
            html = html.replace(prompts.UPSTREAM_IMAGES_URL, prompts.PROXY_IMAGES_PATH)
        else:
            key = os.environ.get("SELF_INVOKE_API_KEY", "")
            html = html.replace(prompts.API_KEY_PLACEHOLDER, key)

        return HTMLResponse(
            content=html,
            headers={"Content-Security-Policy": "frame-ancestors *"},
        )

    @app.get("/projects/{project_id}/export")
    def export_route(
        project_id: str,
        request: Request,
        step: int | None = None,
        version: str | None = None,
        mode: str = "inline",
    ):
        if mode not in ("inline", "endpoint"):
            raise ApiError(400, "invalid_request", f"unknown export mode {mode!r}")
        project = store.load(project_id)
        path = store.export_artifact(
            project,
            step,
            version,
            mode=mode,
            server_origin=str(request.base_url).rstrip("/"),
        )
        return {"path": str(path)}

    def _proxy_forward(upstream_url: str, payload: dict):
        import httpx

        key = os.environ.get("SELF_INVOKE_API_KEY", "")
        try:
            response = httpx.post(
                upstream_url,
                json=payload,
                headers={"Authorization": f"Bearer {key}"},
                timeout=config.request_timeout,
            )
        except httpx.HTTPError as exc:
            raise ApiError(502, "provider_error", f"upstream call failed: {exc}")
        return Response(
            content=response.content,
            status_code=response.status_code,
            media_type=response.headers.get("content-type", "application/json"),
        )

    @app.post("/proxy/completions")
    async def proxy_completions(request: Request):
        if not config.proxy_mode:
            raise ApiError(404, "proxy_disabled", "server is not in proxy mode")
        payload = await body_of(request)
        return _proxy_forward(
            config.self_invoke_base_url.rstrip("/") + "/chat/completions", payload
        )

    @app.post("/proxy/images")
    async def proxy_images(request: Request):
        if not config.proxy_mode:
            raise ApiError(404, "proxy_disabled", "server is not in proxy mode")
        payload = await body_of(request)
        return _proxy_forward(
            config.self_invoke_base_url.rstrip("/") + "/images/generations", payload
        )

    return app


def run(config: ServerConfig, providers=None) -> None:
    """Process entry: build the app, bind the port, and serve until shutdown."""
    import socket

    import uvicorn

    app = create_app(config, providers)
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind(("127.0.0.1", config.port))
    sock.listen(128)
    bound_port = sock.getsockname()[1]
    print(f"protoforge listening on http://127.0.0.1:{bound_port}", flush=True)
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    server.run(sockets=[sock])
