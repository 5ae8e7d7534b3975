"""Durable persistence of projects, cloning for design variations, and
artifact export.

Layout: one directory per project holding the manifest, human-readable
mirrors of the spec and data, one file per code version under
steps/<index>/, the transcript file, and exports. The manifest is the
single commit point: version files are immutable and written first, the
manifest is renamed into place last, and the spec/data mirrors are
refreshed only after the manifest lands. A crash at any point therefore
leaves either the old or the new project readable, never a torn one.
"""

from __future__ import annotations

import json
import os
import re
import shutil
from pathlib import Path

from .codegen import CodeVersion, StepStatus
from .gateway import TranscriptStore
from .project import IntegrityError, Project

SCHEMA_TAG = "protoforge-project/v1"


class StoreError(Exception):
    """Base class for persistence failures."""


class EmptyName(StoreError):
    def __init__(self):
        super().__init__("project name must be non-empty")


class DuplicateName(StoreError):
    def __init__(self, name: str):
        super().__init__(f"a project named {name!r} already exists")
        self.name = name


class UnknownProject(StoreError):
    def __init__(self, project_id: str):
        super().__init__(f"no project {project_id!r}")
        self.project_id = project_id


class NothingToExport(StoreError):
    def __init__(self):
        super().__init__("project has no exportable code version")


class StorageError(StoreError):
    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


def atomic_write(path: Path, data: bytes) -> None:
    """Write-temp-then-rename so readers never observe a partial file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with tmp.open("wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def slugify(name: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")
    return slug or "project"


def _escape_for_script(raw_json: str) -> str:
    # "</script>" inside embedded JSON would terminate the tag early.
    return raw_json.replace("</", "<\\/")


def _inline_data_shim(raw_text: str, endpoint_path: str) -> str:
    return (
        "<script>\n"
        "(function () {\n"
        f"  var EMBEDDED_DATA = {_escape_for_script(raw_text)};\n"
        f'  var DATA_PATH = "{endpoint_path}";\n'
        "  var nativeFetch = window.fetch ? window.fetch.bind(window) : null;\n"
        "  window.fetch = function (input, init) {\n"
        '    var url = typeof input === "string" ? input : (input && input.url) || "";\n'
        "    if (url.indexOf(DATA_PATH) !== -1) {\n"
        "      return Promise.resolve(new Response(JSON.stringify(EMBEDDED_DATA), {\n"
        '        status: 200, headers: {"Content-Type": "application/json"}\n'
        "      }));\n"
        "    }\n"
        "    if (nativeFetch) { return nativeFetch(input, init); }\n"
        '    return Promise.reject(new Error("no data available for " + url));\n'
        "  };\n"
        "})();\n"
        "</script>"
    )


def inline_data(html: str, raw_text: str, endpoint_path: str) -> str:
    """Embed the dataset so the document runs without the server."""
    shim = _inline_data_shim(raw_text, endpoint_path)
    marker = "</head>"
    at = html.find(marker)
    if at == -1:
        # No head: place the shim right after the opening html tag.
        match = re.search(r"<html[^>]*>", html)
        if match:
            at = match.end()
            return html[:at] + "\n" + shim + html[at:]
        return shim + "\n" + html
    return html[:at] + shim + "\n" + html[at:]


def rewrite_endpoint(html: str, endpoint_path: str, server_origin: str) -> str:
    """Point quoted relative data-endpoint references at a concrete origin."""
    absolute = server_origin.rstrip("/") + endpoint_path
    html = html.replace(f'"{endpoint_path}"', f'"{absolute}"')
    return html.replace(f"'{endpoint_path}'", f"'{absolute}'")


class ProjectStore:
    def __init__(self, root: Path):
        self.root = Path(root)
        self.projects_dir = self.root / "projects"
        self.projects_dir.mkdir(parents=True, exist_ok=True)

    # -- paths ---------------------------------------------------------------

    def project_dir(self, project_id: str) -> Path:
        return self.projects_dir / project_id

    def _manifest_path(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "project.json"

    def transcript_path(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "transcript.ndjson"

    def attach_transcript(self, project: Project) -> Project:
        if project.transcript is None:
            project.transcript = TranscriptStore(self.transcript_path(project.id))
        return project

    # -- creation / cloning ----------------------------------------------------

    def _existing_names(self) -> set[str]:
        names = set()
        for manifest in self.projects_dir.glob("*/project.json"):
            try:
                names.add(json.loads(manifest.read_text(encoding="utf-8"))["name"])
            except (ValueError, KeyError):
                continue
        return names

    def _allocate_id(self, name: str) -> str:
        base = slugify(name)
        candidate = base
        suffix = 2
        while self.project_dir(candidate).exists():
            candidate = f"{base}-{suffix}"
            suffix += 1
        return candidate

    def create_project(self, name: str) -> Project:
        if not name.strip():
            raise EmptyName()
        name = name.strip()
        if name in self._existing_names():
            raise DuplicateName(name)
        project = Project(id=self._allocate_id(name), name=name)
        self.save(project)
        return self.attach_transcript(project)

    def clone_project(self, source_id: str, new_name: str) -> Project:
        """Deep-copy the matrix (with cell histories) into a fresh project.

        Requirements, spec, data, and plan are deliberately not copied: a
        design variation re-derives them from its modified matrix.
        """
        source = self.load(source_id)
        if not new_name.strip():
            raise EmptyName()
        new_name = new_name.strip()
        if new_name in self._existing_names():
            raise DuplicateName(new_name)
        from .matrix import MatrixState

        clone = Project(
            id=self._allocate_id(new_name),
            name=new_name,
            matrix=MatrixState.from_dict(source.matrix.to_dict()),
        )
        self.save(clone)
        return self.attach_transcript(clone)

    # -- save / load -------------------------------------------------------------

    def _version_file_name(self, step_index: int, version: CodeVersion) -> str:
        return f"steps/{step_index}/{version.id}.html"

    def save(self, project: Project) -> None:
        directory = self.project_dir(project.id)
        directory.mkdir(parents=True, exist_ok=True)

        manifest = project.to_dict()
        manifest["schema"] = SCHEMA_TAG

        # Version html lives in immutable per-version files; record each
        # file's path in the manifest and strip the body.
        file_map: dict[str, str] = {}
        plans = []
        if manifest["plan"]:
            plans.append((project.plan, manifest["plan"]))
        for plan_obj, plan_payload in zip(project.plan_history, manifest["plan_history"]):
            plans.append((plan_obj, plan_payload))
        for plan_obj, plan_payload in plans:
            for step, step_payload in zip(plan_obj.steps, plan_payload["steps"]):
                for version, version_payload in zip(
                    step.versions, step_payload["versions"]
                ):
                    rel = file_map.get(version.id)
                    if rel is None:
                        rel = self._version_file_name(step.index, version)
                        target = directory / rel
                        if not target.exists():
                            atomic_write(target, version.html.encode("utf-8"))
                        file_map[version.id] = rel
                    del version_payload["html"]
                    version_payload["html_file"] = rel

        body = json.dumps(manifest, ensure_ascii=False, indent=2).encode("utf-8")
        atomic_write(self._manifest_path(project.id), body)

        # Human-readable mirrors, refreshed only after the manifest commits.
        if project.spec is not None:
            atomic_write(directory / "spec.md", project.spec.body.encode("utf-8"))
        if project.data is not None:
            atomic_write(directory / "data.json", project.data.raw_text.encode("utf-8"))

    def load(self, project_id: str) -> Project:
        manifest_path = self._manifest_path(project_id)
        if not manifest_path.exists():
            raise UnknownProject(project_id)
        try:
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        except ValueError as exc:
            raise StorageError(f"unreadable manifest for {project_id!r}: {exc}") from exc
        schema = manifest.get("schema")
        if schema != SCHEMA_TAG:
            raise StorageError(
                f"project {project_id!r} uses storage schema {schema!r}; this build "
                f"reads {SCHEMA_TAG!r} only"
            )

        directory = self.project_dir(project_id)
        for plan_payload in [manifest.get("plan")] + list(manifest.get("plan_history", [])):
            if not plan_payload:
                continue
            for step_payload in plan_payload["steps"]:
                for version_payload in step_payload["versions"]:
                    rel = version_payload.pop("html_file")
                    file_path = directory / rel
                    if not file_path.exists():
                        raise StorageError(
                            f"project {project_id!r} references missing version "
                            f"file {rel}"
                        )
                    version_payload["html"] = file_path.read_text(encoding="utf-8")
        try:
            project = Project.from_dict(manifest)
        except (KeyError, ValueError, IntegrityError) as exc:
            raise StorageError(
                f"corrupt manifest for {project_id!r}: {exc}"
            ) from exc
        return self.attach_transcript(project)

    def list_projects(self) -> list[dict]:
        summaries = []
        for manifest_path in sorted(self.projects_dir.glob("*/project.json")):
            try:
                manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
            except ValueError:
                continue
            summaries.append(
                {
                    "id": manifest["id"],
                    "name": manifest["name"],
                    "created_at": manifest["created_at"],
                    "updated_at": manifest["updated_at"],
                }
            )
        summaries.sort(key=lambda s: s["created_at"])
        return summaries

    def delete_project(self, project_id: str) -> None:
        directory = self.project_dir(project_id)
        if not directory.exists():
            raise UnknownProject(project_id)
        shutil.rmtree(directory)

    # -- export ---------------------------------------------------------------------

    def export_artifact(
        self,
        project: Project,
        step_index: int | None = None,
        version_id: str | None = None,
        *,
        mode: str = "inline",
        server_origin: str = "http://localhost:8000",
    ) -> Path:
        """Write a standalone copy of one code version and return its path.

        Defaults to the highest approved step's current version. Inline mode
        embeds the placeholder data so the file runs without the server;
        endpoint mode rewrites the data path against a concrete origin.
        """
        if project.plan is None:
            raise NothingToExport()
        step = None
        if step_index is not None:
            step = project.plan.step(step_index)
        else:
            for candidate in project.plan.steps:
                if candidate.status is StepStatus.APPROVED and candidate.versions:
                    step = candidate
        if step is None or not step.versions:
            raise NothingToExport()

        if version_id is not None:
            version = step.version(version_id)
        else:
            version = step.current()
            if version is None:
                raise NothingToExport()

        html = version.html
        endpoint = project.data_endpoint_path()
        if mode == "inline":
            if project.data is not None:
                html = inline_data(html, project.data.raw_text, endpoint)
        elif mode == "endpoint":
            html = rewrite_endpoint(html, endpoint, server_origin)
        else:
            raise ValueError(f"unknown export mode {mode!r}")

        out = (
            self.project_dir(project.id)
            / "exports"
            / f"{project.id}-step{step.index}-{version.id}.html"
        )
        atomic_write(out, html.encode("utf-8"))
        return out
