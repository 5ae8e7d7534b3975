"""Persistence tests: round trips, cloning, crash safety, and export."""

from __future__ import annotations

import json
import random

import pytest

import protoforge.store as store_module
from protoforge.codegen import (
    CodeRules,
    Plan,
    PlanStep,
    Provenance,
    StepStatus,
    approve_step,
    generate_plan,
    generate_step_code,
    lint_code,
    Severity,
)
from protoforge.matrix import ALL_CELL_KEYS, CellKey, Dimension, Level, submit_cell, submit_problem
from protoforge.project import Project
from protoforge.scoping import (
    PlaceholderData,
    Requirement,
    RequirementSet,
    RequirementSource,
    SpecDoc,
    parse_spec_sections,
)
from protoforge.store import (
    DuplicateName,
    EmptyName,
    NothingToExport,
    ProjectStore,
    SCHEMA_TAG,
    StorageError,
    UnknownProject,
    slugify,
)

from conftest import (
    VALID_SPEC_BODY,
    StepwiseMockProvider,
    fill_matrix,
    live_gateway,
    minimal_document,
)


@pytest.fixture
def store(tmp_path):
    return ProjectStore(tmp_path / "data")


class TestCreate:
    def test_create_and_load(self, store):
        project = store.create_project("chinese-flashcards")
        assert project.id == "chinese-flashcards"
        loaded = store.load(project.id)
        assert loaded.name == "chinese-flashcards"

    def test_empty_name(self, store):
        with pytest.raises(EmptyName):
            store.create_project("   ")

    def test_duplicate_name(self, store):
        store.create_project("one")
        with pytest.raises(DuplicateName):
            store.create_project("one")

    def test_slug_collision_gets_suffix(self, store):
        first = store.create_project("My App")
        second = store.create_project("my app!")
        assert first.id == "my-app"
        assert second.id == "my-app-2"

    def test_slugify(self):
        assert slugify("Chinese Flashcards!") == "chinese-flashcards"
        assert slugify("---") == "project"

    def test_list_after_three_creates(self, store):
        for name in ("a", "b", "c"):
            store.create_project(name)
        summaries = store.list_projects()
        assert [s["name"] for s in summaries] == ["a", "b", "c"]
        for summary in summaries:
            store.load(summary["id"])

    def test_load_unknown(self, store):
        with pytest.raises(UnknownProject):
            store.load("ghost")

    def test_delete(self, store):
        project = store.create_project("doomed")
        store.delete_project(project.id)
        with pytest.raises(UnknownProject):
            store.load(project.id)
        with pytest.raises(UnknownProject):
            store.delete_project(project.id)


def populated_project(store: ProjectStore, name: str = "full") -> Project:
    project = store.create_project(name)
    fill_matrix(project)
    gateway = live_gateway(StepwiseMockProvider(4))
    project.requirements = RequirementSet(
        {Requirement.PREGENERATED_DATA}, RequirementSource.USER_EDITED
    )
    project.spec = SpecDoc(
        VALID_SPEC_BODY, parse_spec_sections(VALID_SPEC_BODY), edited_by_user=False
    )
    project.data = PlaceholderData(
        items=[{"id": i} for i in range(1, 13)],
        raw_text=json.dumps([{"id": i} for i in range(1, 13)], indent=2),
    )
    generate_plan(project, gateway)
    for index in (1, 2):
        generate_step_code(project, gateway, index)
        approve_step(project, index)
    store.save(project)
    return project


class TestRoundTrip:
    def test_full_project_round_trips(self, store):
        project = populated_project(store)
        loaded = store.load(project.id)
        assert loaded.to_dict() == project.to_dict()

    def test_version_files_on_disk(self, store):
        project = populated_project(store)
        directory = store.project_dir(project.id)
        for step in project.plan.steps:
            for version in step.versions:
                assert (directory / f"steps/{step.index}/{version.id}.html").exists()
        # Mirrors exist and carry the authoritative bytes.
        assert (directory / "spec.md").read_text(encoding="utf-8") == project.spec.body
        assert (directory / "data.json").read_text(encoding="utf-8") == project.data.raw_text

    def test_unknown_schema_refuses_to_load(self, store):
        project = store.create_project("schema-test")
        manifest_path = store.project_dir(project.id) / "project.json"
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        manifest["schema"] = "protoforge-project/v99"
        manifest_path.write_text(json.dumps(manifest), encoding="utf-8")
        with pytest.raises(StorageError) as excinfo:
            store.load(project.id)
        assert "v99" in str(excinfo.value)
        assert SCHEMA_TAG in str(excinfo.value)

    def test_missing_version_file_is_storage_error(self, store):
        project = populated_project(store, "missing-file")
        target = store.project_dir(project.id) / "steps/1"
        for file in target.glob("*.html"):
            file.unlink()
        with pytest.raises(StorageError):
            store.load(project.id)


class TestClone:
    def test_clone_copies_matrix_only(self, store):
        source = populated_project(store, "source")
        from protoforge.matrix import save_cell_version

        save_cell_version(source.matrix, CellKey(Dimension.PERSON, Level.IDEA))
        store.save(source)

        clone = store.clone_project(source.id, "variation")
        assert clone.matrix.to_dict() == source.matrix.to_dict()
        assert clone.requirements is None
        assert clone.spec is None
        assert clone.data is None
        assert clone.plan is None

    def test_clone_unknown_source(self, store):
        with pytest.raises(UnknownProject):
            store.clone_project("ghost", "x")

    def test_clone_duplicate_name(self, store):
        store.create_project("a")
        store.create_project("b")
        with pytest.raises(DuplicateName):
            store.clone_project("a", "b")

    def test_source_untouched_and_independent(self, store):
        source = populated_project(store, "src")
        before = store.load(source.id).to_dict()
        clone = store.clone_project(source.id, "derived")
        assert store.load(source.id).to_dict() == before

        submit_cell(clone.matrix, CellKey(Dimension.APPROACH, Level.IDEA), "visual storytelling")
        store.save(clone)
        assert store.load(source.id).to_dict() == before
        person_idea = clone.matrix.cells[CellKey(Dimension.PERSON, Level.IDEA)]
        assert person_idea.submitted == "person idea text"  # matches source


def random_project(rng: random.Random, index: int) -> Project:
    """Arbitrary but structurally valid project for round-trip fuzzing."""
    project = Project(id=f"fuzz-{index}", name=f"fuzz {index}")
    if rng.random() < 0.9:
        project.matrix = submit_problem(f"problem {rng.randrange(100)}")
        for _ in range(rng.randrange(0, 12)):
            ideas = [k for k in ALL_CELL_KEYS if k.level is Level.IDEA]
            grounded = [
                k
                for k in ALL_CELL_KEYS
                if k.level is Level.GROUNDING
                and project.matrix.cells[CellKey(k.dimension, Level.IDEA)].submitted
            ]
            key = rng.choice(ideas + grounded)
            submit_cell(project.matrix, key, f"text {rng.randrange(1000)}")
        for key in ALL_CELL_KEYS:
            if rng.random() < 0.3:
                project.matrix.cells[key].candidates.extend(
                    f"cand {rng.randrange(50)}" for _ in range(rng.randrange(1, 4))
                )
            if rng.random() < 0.2 and (
                project.matrix.cells[key].candidates
                or project.matrix.cells[key].submitted
            ):
                from protoforge.matrix import save_cell_version

                save_cell_version(project.matrix, key)
    if rng.random() < 0.7:
        project.requirements = RequirementSet(
            {r for r in Requirement if rng.random() < 0.4},
            rng.choice(list(RequirementSource)),
        )
    if rng.random() < 0.6:
        project.spec = SpecDoc(
            VALID_SPEC_BODY, parse_spec_sections(VALID_SPEC_BODY), rng.random() < 0.5
        )
        if rng.random() < 0.3:
            project.spec_history.append(project.spec)
    if rng.random() < 0.5:
        items = [{"id": i, "v": rng.randrange(10)} for i in range(rng.randrange(1, 25))]
        project.data = PlaceholderData(
            items=items,
            raw_text=json.dumps(items, indent=rng.choice([None, 2])),
            edited_by_user=rng.random() < 0.5,
            length_warning=not 10 <= len(items) <= 20,
        )
    if rng.random() < 0.6:
        steps = []
        for step_index in range(1, rng.randrange(3, 7)):
            versions = []
            parent = None
            for _ in range(rng.randrange(0, 3)):
                number = project.next_version_number()
                html = minimal_document([f"    const v{number} = {number};"])
                versions.append(
                    __import__("protoforge.codegen", fromlist=["CodeVersion"]).CodeVersion(
                        id=f"v{number}",
                        html=html,
                        provenance=rng.choice(list(Provenance))
                        if parent
                        else Provenance.GENERATED,
                        parent=parent,
                        lint=lint_code(html, CodeRules()),
                        created_at="2026-01-01T00:00:00+00:00",
                    )
                )
                parent = versions[-1].id
            status = (
                rng.choice([StepStatus.GENERATED, StepStatus.APPROVED, StepStatus.STALE])
                if versions
                else StepStatus.PENDING
            )
            steps.append(
                PlanStep(
                    index=step_index,
                    description=f"step {step_index}",
                    status=status,
                    versions=versions,
                    current_version=versions[-1].id if versions else None,
                )
            )
        project.plan = Plan(steps=steps, stale=rng.random() < 0.3)
    return project


class TestRoundTripFuzz:
    def test_hundred_random_projects(self, tmp_path):
        rng = random.Random(20260809)
        store = ProjectStore(tmp_path / "fuzz")
        for index in range(100):
            project = random_project(rng, index)
            store.save(project)
            loaded = store.load(project.id)
            assert loaded.to_dict() == project.to_dict(), f"project {index} mutated"


class CrashPlanned(Exception):
    pass


class TestCrashSafety:
    def test_interrupted_save_leaves_old_project(self, store, monkeypatch):
        project = populated_project(store, "crashy")
        baseline = store.load(project.id).to_dict()

        # Count how many replace calls a full save performs, then fail at
        # each position in turn.
        project.spec = SpecDoc(
            VALID_SPEC_BODY + "\n- changed", parse_spec_sections(VALID_SPEC_BODY), True
        )
        submit_cell(project.matrix, CellKey(Dimension.PERSON, Level.IDEA), "changed")
        real_replace = store_module.os.replace
        calls = {"n": 0}

        def counting_replace(src, dst):
            calls["n"] += 1
            return real_replace(src, dst)

        monkeypatch.setattr(store_module.os, "replace", counting_replace)
        store.save(project)
        total = calls["n"]
        changed = store.load(project.id).to_dict()
        assert changed != baseline

        for fail_at in range(1, total + 1):
            scratch = ProjectStore(store.root.parent / f"crash-{fail_at}")
            victim = populated_project(scratch, "crashy")
            before = scratch.load(victim.id).to_dict()
            victim.spec = SpecDoc(
                VALID_SPEC_BODY + "\n- changed",
                parse_spec_sections(VALID_SPEC_BODY),
                True,
            )
            submit_cell(
                victim.matrix, CellKey(Dimension.PERSON, Level.IDEA), "changed"
            )
            state = {"n": 0}

            def failing_replace(src, dst, _state=state, _fail_at=fail_at):
                _state["n"] += 1
                if _state["n"] == _fail_at:
                    raise CrashPlanned()
                return real_replace(src, dst)

            monkeypatch.setattr(store_module.os, "replace", failing_replace)
            try:
                scratch.save(victim)
                crashed = False
            except CrashPlanned:
                crashed = True
            monkeypatch.setattr(store_module.os, "replace", real_replace)

            reloaded = scratch.load(victim.id).to_dict()
            if crashed and reloaded != before:
                # The save got far enough to commit; it must then be the
                # complete new state, never a blend.
                assert reloaded["spec"]["body"].endswith("- changed")
            if not crashed:
                assert reloaded != before


class TestExport:
    def _approved_project(self, store):
        return populated_project(store, "exportable")

    def test_default_exports_highest_approved(self, store):
        project = self._approved_project(store)
        path = store.export_artifact(project)
        assert path.exists()
        assert f"step{2}" in path.name
        html = path.read_text(encoding="utf-8")
        assert "marker-2" in html

    def test_inline_mode_embeds_data_verbatim(self, store):
        project = self._approved_project(store)
        path = store.export_artifact(project, mode="inline")
        html = path.read_text(encoding="utf-8")
        assert '"id": 12' in html
        assert "EMBEDDED_DATA" in html

    def test_inline_export_lints_clean(self, store):
        project = self._approved_project(store)
        html = store.export_artifact(project).read_text(encoding="utf-8")
        errors = [
            i for i in lint_code(html, CodeRules()) if i.severity is Severity.ERROR
        ]
        assert errors == []

    def test_endpoint_mode_rewrites_origin(self, store):
        project = self._approved_project(store)
        step = project.plan.steps[0]
        version = step.versions[0]
        version.html = minimal_document(
            [f"    fetch('{project.data_endpoint_path()}');"]
        )
        path = store.export_artifact(
            project, 1, version.id, mode="endpoint", server_origin="http://example.org:7777"
        )
        html = path.read_text(encoding="utf-8")
        assert f"http://example.org:7777{project.data_endpoint_path()}" in html

    def test_pinned_version(self, store):
        project = self._approved_project(store)
        step_one = project.plan.steps[0]
        path = store.export_artifact(project, 1, step_one.versions[0].id)
        assert step_one.versions[0].id in path.name

    def test_nothing_to_export(self, store):
        empty = store.create_project("empty")
        with pytest.raises(NothingToExport):
            store.export_artifact(empty)

    def test_script_close_tag_escaped_in_embedded_data(self, store):
        project = self._approved_project(store)
        items = [{"id": 1, "html": "</script><script>alert(1)</script>"}]
        project.data = PlaceholderData(items=items, raw_text=json.dumps(items))
        path = store.export_artifact(project)
        html = path.read_text(encoding="utf-8")
        assert "</script><script>alert(1)" not in html
