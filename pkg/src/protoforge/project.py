"""The project aggregate: one prototype with its matrix, scoping artifacts,
plan, histories, and identity."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

from .codegen import (
    CodeIssue,
    CodeVersion,
    Plan,
    PlanStep,
    Provenance,
    StepStatus,
)
from .gateway import TranscriptStore
from .matrix import MatrixState
from .scoping import PlaceholderData, RequirementSet, SpecDoc


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class Project:
    id: str
    name: str
    matrix: MatrixState = field(default_factory=MatrixState)
    requirements: RequirementSet | None = None
    spec: SpecDoc | None = None
    spec_history: list[SpecDoc] = field(default_factory=list)
    data: PlaceholderData | None = None
    plan: Plan | None = None
    plan_history: list[Plan] = field(default_factory=list)
    created_at: str = field(default_factory=_now)
    updated_at: str = field(default_factory=_now)
    version_counter: int = 0
    # Runtime attachment, not persisted with the manifest.
    transcript: TranscriptStore | None = None

    def touch(self) -> None:
        self.updated_at = max(_now(), self.created_at)

    def next_version_number(self) -> int:
        self.version_counter += 1
        return self.version_counter

    def data_endpoint_path(self) -> str:
        return f"/projects/{self.id}/data"

    def to_dict(self) -> dict:
        """Full structural dump, including version html (used for cloning and
        round-trip checks; the store splits html into files on disk)."""

        def plan_dict(plan: Plan) -> dict:
            payload = plan.to_dict()
            for step, step_payload in zip(plan.steps, payload["steps"]):
                for version, version_payload in zip(
                    step.versions, step_payload["versions"]
                ):
                    version_payload["html"] = version.html
            return payload

        return {
            "id": self.id,
            "name": self.name,
            "matrix": self.matrix.to_dict(),
            "requirements": self.requirements.to_dict() if self.requirements else None,
            "spec": self.spec.to_dict() if self.spec else None,
            "spec_history": [s.to_dict() for s in self.spec_history],
            "data": self.data.to_dict() if self.data else None,
            "plan": plan_dict(self.plan) if self.plan else None,
            "plan_history": [plan_dict(p) for p in self.plan_history],
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "version_counter": self.version_counter,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Project":
        def plan_from(payload: dict) -> Plan:
            steps = []
            for step_payload in payload["steps"]:
                versions = [
                    CodeVersion(
                        id=v["id"],
                        html=v["html"],
                        provenance=Provenance(v["provenance"]),
                        parent=v["parent"],
                        lint=[CodeIssue.from_dict(i) for i in v["lint"]],
                        created_at=v["created_at"],
                    )
                    for v in step_payload["versions"]
                ]
                step = PlanStep(
                    index=step_payload["index"],
                    description=step_payload["description"],
                    status=StepStatus(step_payload["status"]),
                    versions=versions,
                    current_version=step_payload["current_version"],
                )
                _check_version_integrity(step)
                steps.append(step)
            return Plan(steps=steps, stale=payload["stale"])

        return cls(
            id=data["id"],
            name=data["name"],
            matrix=MatrixState.from_dict(data["matrix"]),
            requirements=(
                RequirementSet.from_dict(data["requirements"])
                if data["requirements"]
                else None
            ),
            spec=SpecDoc.from_dict(data["spec"]) if data["spec"] else None,
            spec_history=[SpecDoc.from_dict(s) for s in data["spec_history"]],
            data=PlaceholderData.from_dict(data["data"]) if data["data"] else None,
            plan=plan_from(data["plan"]) if data["plan"] else None,
            plan_history=[plan_from(p) for p in data["plan_history"]],
            created_at=data["created_at"],
            updated_at=data["updated_at"],
            version_counter=data["version_counter"],
        )


class IntegrityError(Exception):
    """A persisted project references versions that do not exist."""


def _check_version_integrity(step: PlanStep) -> None:
    ids = {v.id for v in step.versions}
    if step.current_version is not None and step.current_version not in ids:
        raise IntegrityError(
            f"step {step.index} current version {step.current_version!r} missing"
        )
    for version in step.versions:
        if version.parent is not None and version.parent not in ids:
            raise IntegrityError(
                f"version {version.id!r} references missing parent {version.parent!r}"
            )
