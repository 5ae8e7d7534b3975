"""Scoping: turn a complete design matrix into the three implementation
inputs — a requirement set, a project specification, and placeholder data.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

from . import prompts
from .gateway import Gateway, ParseFailure, extract_json_array, render
from .matrix import CellKey, Dimension, Level, matrix_complete

if TYPE_CHECKING:
    from .project import Project

DATA_MIN_ITEMS = 10
DATA_MAX_ITEMS = 20


class Requirement(Enum):
    TEXT_MODEL_TOOL_CALLING = "TextModelToolCalling"
    IMAGE_GENERATION = "ImageGeneration"
    PREGENERATED_DATA = "PregeneratedData"
    CHART_LIBRARY = "ChartLibrary"
    DIAGRAM_LIBRARY = "DiagramLibrary"


# Checkbox labels shown to users and offered to the model.
REQUIREMENT_LABELS: dict[Requirement, str] = {
    Requirement.TEXT_MODEL_TOOL_CALLING: "Dynamically generated text (GPT tool-calling)",
    Requirement.IMAGE_GENERATION: "Dynamically generated AI-images",
    Requirement.PREGENERATED_DATA: "Pre-generated data",
    Requirement.CHART_LIBRARY: "Charts (Chart.js)",
    Requirement.DIAGRAM_LIBRARY: "Diagrams (GoJS)",
}


class RequirementSource(Enum):
    MODEL_SUGGESTED = "model_suggested"
    USER_EDITED = "user_edited"


class ScopingError(Exception):
    """Base class for scoping-stage violations."""


class MatrixIncomplete(ScopingError):
    def __init__(self):
        super().__init__("all six matrix cells must hold fresh submissions first")


class UnknownRequirement(ScopingError):
    def __init__(self, name: str):
        super().__init__(f"{name!r} is not a known requirement")
        self.name = name


class RequirementsNotSet(ScopingError):
    def __init__(self):
        super().__init__("identify or set requirements before generating the spec")


class RequirementMissing(ScopingError):
    def __init__(self, requirement: Requirement):
        super().__init__(f"requires the {requirement.value} requirement to be selected")
        self.requirement = requirement


class SpecMissing(ScopingError):
    def __init__(self):
        super().__init__("generate the project spec first")


class SpecShapeError(ScopingError):
    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class LengthOutOfRange(ScopingError):
    def __init__(self, count: int):
        super().__init__(
            f"placeholder data has {count} items, outside the "
            f"{DATA_MIN_ITEMS}-{DATA_MAX_ITEMS} range"
        )
        self.count = count


@dataclass
class RequirementSet:
    """Selected prototype capabilities.

    The set may be empty. Selecting ImageGeneration permits but does not
    require TextModelToolCalling; no pairing is enforced.
    """

    selected: set[Requirement] = field(default_factory=set)
    source: RequirementSource = RequirementSource.MODEL_SUGGESTED

    def to_dict(self) -> dict:
        return {
            "selected": sorted(r.value for r in self.selected),
            "source": self.source.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RequirementSet":
        return cls(
            selected={Requirement(v) for v in data["selected"]},
            source=RequirementSource(data["source"]),
        )


SECTION_TITLES = ("Application Layout", "User Interactions", "Inputs and Logic")


@dataclass(frozen=True)
class SpecSection:
    title: str
    start: int
    end: int


@dataclass
class SpecDoc:
    body: str
    sections: list[SpecSection]
    edited_by_user: bool = False

    def to_dict(self) -> dict:
        return {"body": self.body, "edited_by_user": self.edited_by_user}

    @classmethod
    def from_dict(cls, data: dict) -> "SpecDoc":
        return cls(
            body=data["body"],
            sections=parse_spec_sections(data["body"]),
            edited_by_user=data["edited_by_user"],
        )


def parse_spec_sections(body: str) -> list[SpecSection]:
    """Locate the three required section headers, in order, each exactly once."""
    positions = []
    for title in SECTION_TITLES:
        found = [m.start() for m in re.finditer(re.escape(title), body)]
        if not found:
            raise SpecShapeError(f"missing section header {title!r}")
        if len(found) > 1:
            raise SpecShapeError(f"section header {title!r} appears {len(found)} times")
        positions.append(found[0])
    if positions != sorted(positions):
        raise SpecShapeError(
            "section headers out of order; expected "
            + " before ".join(repr(t) for t in SECTION_TITLES)
        )
    sections = []
    for i, (title, start) in enumerate(zip(SECTION_TITLES, positions)):
        end = positions[i + 1] if i + 1 < len(positions) else len(body)
        sections.append(SpecSection(title=title, start=start, end=end))
    return sections


_DATA_DIRECTIVE_RE = re.compile(
    r"create placeholder data|pre-?generated data", re.IGNORECASE
)


def validate_spec_body(body: str, requirements: RequirementSet | None) -> list[SpecSection]:
    sections = parse_spec_sections(body)
    if requirements and Requirement.PREGENERATED_DATA in requirements.selected:
        if not _DATA_DIRECTIVE_RE.search(body):
            raise SpecShapeError(
                "pre-generated data is selected but the spec contains no "
                "data-creation directive"
            )
    return sections


@dataclass
class PlaceholderData:
    """The synthetic dataset served to the prototype.

    raw_text is byte-exactly what the data endpoint serves. length_warning is
    set when a user edit leaves the item count outside the generation range;
    edits are flagged, never rejected.
    """

    items: list
    raw_text: str
    edited_by_user: bool = False
    length_warning: bool = False

    def to_dict(self) -> dict:
        return {
            "raw_text": self.raw_text,
            "edited_by_user": self.edited_by_user,
            "length_warning": self.length_warning,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PlaceholderData":
        return cls(
            items=json.loads(data["raw_text"]),
            raw_text=data["raw_text"],
            edited_by_user=data["edited_by_user"],
            length_warning=data["length_warning"],
        )


def format_matrix(project: "Project") -> str:
    """Natural-language rendering of every submitted, fresh matrix entry."""
    lines = []
    for dimension in Dimension:
        for level in Level:
            cell = project.matrix.cells[CellKey(dimension, level)]
            if cell.submitted is not None and not cell.stale:
                label = f"{dimension.value.capitalize()} {level.value}"
                lines.append(f"{label}: {cell.submitted}")
    return "\n".join(lines)


def _requirement_vocabulary() -> str:
    return "\n".join(
        f'- "{REQUIREMENT_LABELS[req]}" ({req.value})' for req in Requirement
    )


def _normalize(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "", text.lower())


_REQUIREMENT_LOOKUP: dict[str, Requirement] = {}
for _req in Requirement:
    _REQUIREMENT_LOOKUP[_normalize(_req.value)] = _req
    _REQUIREMENT_LOOKUP[_normalize(REQUIREMENT_LABELS[_req])] = _req
# Shorthand aliases models reach for.
_REQUIREMENT_LOOKUP[_normalize("AI images")] = Requirement.IMAGE_GENERATION
_REQUIREMENT_LOOKUP[_normalize("image generation")] = Requirement.IMAGE_GENERATION
_REQUIREMENT_LOOKUP[_normalize("pregenerated data")] = Requirement.PREGENERATED_DATA
_REQUIREMENT_LOOKUP[_normalize("placeholder data")] = Requirement.PREGENERATED_DATA
_REQUIREMENT_LOOKUP[_normalize("GPT tool calling")] = Requirement.TEXT_MODEL_TOOL_CALLING
_REQUIREMENT_LOOKUP[_normalize("tool calling")] = Requirement.TEXT_MODEL_TOOL_CALLING
_REQUIREMENT_LOOKUP[_normalize("chartjs")] = Requirement.CHART_LIBRARY
_REQUIREMENT_LOOKUP[_normalize("gojs")] = Requirement.DIAGRAM_LIBRARY


def _match_requirement(value: object) -> Requirement | None:
    if not isinstance(value, str):
        return None
    return _REQUIREMENT_LOOKUP.get(_normalize(value))


def parse_requirements(text: str) -> set[Requirement]:
    """Closed-world parse of a requirement-identification completion.

    Prefers a JSON array of names/labels; entries that match nothing are
    dropped, but an array naming no known requirement at all is a
    ParseFailure. Without an array, known labels are scanned for in prose,
    so refusals like "none needed" read as the empty set.
    """
    try:
        values = extract_json_array(text)
    except ParseFailure:
        values = None
    if values is not None:
        matched = {_match_requirement(v) for v in values} - {None}
        if values and not matched:
            raise ParseFailure(
                f"completion names no known requirement: {values!r}"
            )
        return matched  # type: ignore[return-value]
    blob = _normalize(text)
    found = set()
    for key, requirement in _REQUIREMENT_LOOKUP.items():
        if key and key in blob:
            found.add(requirement)
    return found


def identify_requirements(project: "Project", gateway: Gateway) -> RequirementSet:
    """Ask the model which capabilities the prototype needs."""
    if not matrix_complete(project.matrix):
        raise MatrixIncomplete()
    request = render(
        prompts.REQUIREMENTS_TEMPLATE,
        {
            "vocabulary": _requirement_vocabulary(),
            "problem": project.matrix.problem,
            "matrix": format_matrix(project),
        },
    )
    result = gateway.complete(
        request, project_id=project.id, transcript=project.transcript
    )
    selected = parse_requirements(result.text)
    project.requirements = RequirementSet(selected, RequirementSource.MODEL_SUGGESTED)
    project.touch()
    return project.requirements


def set_requirements(project: "Project", selected) -> RequirementSet:
    """Overwrite the requirement set with a user's selection."""
    resolved = set()
    for entry in selected:
        if isinstance(entry, Requirement):
            resolved.add(entry)
            continue
        match = _match_requirement(entry)
        if match is None:
            raise UnknownRequirement(str(entry))
        resolved.add(match)
    project.requirements = RequirementSet(resolved, RequirementSource.USER_EDITED)
    project.touch()
    return project.requirements


def _requirements_label_list(requirements: RequirementSet) -> str:
    if not requirements.selected:
        return "(none)"
    return ", ".join(
        sorted(REQUIREMENT_LABELS[req] for req in requirements.selected)
    )


def generate_spec(project: "Project", gateway: Gateway) -> SpecDoc:
    """Generate the one-page Layout/Interactions/Logic specification."""
    if not matrix_complete(project.matrix):
        raise MatrixIncomplete()
    if project.requirements is None:
        raise RequirementsNotSet()
    request = render(
        prompts.SPEC_TEMPLATE,
        {
            "few_shots": prompts.SPEC_FEW_SHOTS,
            "problem": project.matrix.problem,
            "matrix": format_matrix(project),
            "requirements": _requirements_label_list(project.requirements),
        },
    )
    result = gateway.complete(
        request, project_id=project.id, transcript=project.transcript
    )
    body = result.text.strip()
    sections = validate_spec_body(body, project.requirements)
    if project.spec is not None:
        project.spec_history.append(project.spec)
    project.spec = SpecDoc(body=body, sections=sections, edited_by_user=False)
    _mark_plan_stale(project)
    project.touch()
    return project.spec


def edit_spec(project: "Project", body: str) -> SpecDoc:
    """Store a user-authored spec body; the dependent plan goes stale."""
    sections = validate_spec_body(body, project.requirements)
    if project.spec is not None:
        project.spec_history.append(project.spec)
    project.spec = SpecDoc(body=body, sections=sections, edited_by_user=True)
    _mark_plan_stale(project)
    project.touch()
    return project.spec


def _mark_plan_stale(project: "Project") -> None:
    if project.plan is not None:
        project.plan.stale = True


def _person_bindings(project: "Project") -> tuple[str, str]:
    idea = project.matrix.cells[CellKey(Dimension.PERSON, Level.IDEA)].submitted or ""
    grounding = (
        project.matrix.cells[CellKey(Dimension.PERSON, Level.GROUNDING)].submitted or ""
    )
    return idea, grounding


def serialize_items(items: list) -> str:
    return json.dumps(items, ensure_ascii=False, indent=2)


def _request_data(project: "Project", gateway: Gateway):
    person_idea, person_grounding = _person_bindings(project)
    request = render(
        prompts.DATA_TEMPLATE,
        {
            "spec": project.spec.body,
            "person_idea": person_idea,
            "person_grounding": person_grounding,
        },
    )
    result = gateway.complete(
        request, project_id=project.id, transcript=project.transcript
    )
    items = extract_json_array(result.text)
    if not all(isinstance(item, dict) for item in items):
        raise ParseFailure("placeholder data must be an array of objects")
    return items


def generate_data(project: "Project", gateway: Gateway) -> PlaceholderData:
    """Generate the 10-20 item placeholder dataset, tailored to the person.

    An out-of-range item count triggers one automatic regeneration before
    erroring out.
    """
    if project.requirements is None or (
        Requirement.PREGENERATED_DATA not in project.requirements.selected
    ):
        raise RequirementMissing(Requirement.PREGENERATED_DATA)
    if project.spec is None:
        raise SpecMissing()

    items = _request_data(project, gateway)
    if not DATA_MIN_ITEMS <= len(items) <= DATA_MAX_ITEMS:
        items = _request_data(project, gateway)
        if not DATA_MIN_ITEMS <= len(items) <= DATA_MAX_ITEMS:
            raise LengthOutOfRange(len(items))

    project.data = PlaceholderData(
        items=items,
        raw_text=serialize_items(items),
        edited_by_user=False,
        length_warning=False,
    )
    project.touch()
    return project.data


def edit_data(project: "Project", raw_text: str) -> PlaceholderData:
    """Store a user-edited dataset verbatim; off-range lengths warn, not fail."""
    try:
        items = json.loads(raw_text)
    except ValueError as exc:
        raise ParseFailure(f"placeholder data does not parse: {exc}") from exc
    if not isinstance(items, list) or not all(isinstance(i, dict) for i in items):
        raise ParseFailure("placeholder data must be a JSON array of objects")
    project.data = PlaceholderData(
        items=items,
        raw_text=raw_text,
        edited_by_user=True,
        length_warning=not DATA_MIN_ITEMS <= len(items) <= DATA_MAX_ITEMS,
    )
    project.touch()
    return project.data
