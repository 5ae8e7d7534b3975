"""Modular stepwise implementation: plan decomposition, per-step code
generation with prior-code retention, output sanitization, linting, and
step/version bookkeeping.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import TYPE_CHECKING

from . import prompts
from .gateway import Gateway, ParseFailure, render

if TYPE_CHECKING:
    from .project import Project

PLAN_MIN_STEPS = 3
PLAN_MAX_STEPS = 6


class CodegenError(Exception):
    """Base class for stepwise-implementation violations."""


class PlanMissing(CodegenError):
    def __init__(self):
        super().__init__("generate a plan first")


class StepCountOutOfRange(CodegenError):
    def __init__(self, count: int):
        super().__init__(
            f"generated plan has {count} steps, outside the "
            f"{PLAN_MIN_STEPS}-{PLAN_MAX_STEPS} range"
        )
        self.count = count


class IndexOutOfRange(CodegenError):
    def __init__(self, index: int):
        super().__init__(f"no plan step at index {index}")
        self.index = index


class RemoveApprovedStep(CodegenError):
    def __init__(self, index: int):
        super().__init__(
            f"step {index} is approved and rollback-protected; revert before removing"
        )
        self.index = index


class RegenerateApprovedStep(CodegenError):
    def __init__(self, index: int):
        super().__init__(
            f"step {index} is approved; revert before regenerating it"
        )
        self.index = index


class PriorStepUnapproved(CodegenError):
    def __init__(self, index: int):
        super().__init__(f"step {index} must be approved first")
        self.index = index


class NoCurrentVersion(CodegenError):
    def __init__(self, index: int):
        super().__init__(f"step {index} has no current code version")
        self.index = index


class NotGenerated(CodegenError):
    def __init__(self, index: int):
        super().__init__(f"step {index} has no generated code awaiting approval")
        self.index = index


class UnknownVersion(CodegenError):
    def __init__(self, version_id: str):
        super().__init__(f"no code version {version_id!r}")
        self.version_id = version_id


class SanitizeFailure(CodegenError):
    def __init__(self, detail: str = "no document delimiters found"):
        super().__init__(detail)


class EmptyProblem(CodegenError):
    def __init__(self):
        super().__init__("describe the problem to fix")


class StepStatus(Enum):
    PENDING = "pending"
    GENERATED = "generated"
    APPROVED = "approved"
    STALE = "stale"


class Provenance(Enum):
    GENERATED = "generated"
    ITERATED = "iterated"
    MANUAL_EDIT = "manual_edit"


class IssueKind(Enum):
    LINE_LIMIT_EXCEEDED = "line_limit_exceeded"
    FORBIDDEN_COMPONENT = "forbidden_component"
    MISSING_CDN_TAG = "missing_cdn_tag"
    MULTIPLE_DOCUMENTS = "multiple_documents"
    MISSING_ROOT_MOUNT = "missing_root_mount"
    RESIDUAL_PROSE = "residual_prose"
    ELIDED_CODE_COMMENT = "elided_code_comment"


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class CodeIssue:
    kind: IssueKind
    detail: str
    severity: Severity

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "detail": self.detail,
            "severity": self.severity.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CodeIssue":
        return cls(IssueKind(data["kind"]), data["detail"], Severity(data["severity"]))


FORBIDDEN_COMPONENTS = (
    "Calendar",
    "DatePicker",
    "TimePicker",
    "SwipeableViews",
    "SwipeableViewsVirtualizer",
    "Fade",
    "MobileStepper",
)

REQUIRED_CDN_MARKERS = (
    "https://unpkg.com/react@18/umd/react.development.js",
    "https://unpkg.com/react-dom@18/umd/react-dom.development.js",
    "https://unpkg.com/@babel/standalone/babel.min.js",
    "https://fonts.googleapis.com/css?family=Roboto",
    "https://unpkg.com/@mui/material@5.0.0-rc.1/umd/material-ui.development.js",
)


@dataclass(frozen=True)
class CodeRules:
    """Limits the codegen prompt demands and the linter later enforces.

    The prompt asks for under max_lines_prompted; anything up to
    max_lines_enforced is tolerated with a warning, above it is an error.
    """

    max_lines_prompted: int = 420
    max_lines_enforced: int = 450
    forbidden_component_names: tuple[str, ...] = FORBIDDEN_COMPONENTS
    required_cdn_markers: tuple[str, ...] = REQUIRED_CDN_MARKERS

    def __post_init__(self):
        if self.max_lines_prompted > self.max_lines_enforced:
            raise ValueError("max_lines_prompted must not exceed max_lines_enforced")

    def to_dict(self) -> dict:
        return {
            "max_lines_prompted": self.max_lines_prompted,
            "max_lines_enforced": self.max_lines_enforced,
            "forbidden_component_names": list(self.forbidden_component_names),
            "required_cdn_markers": list(self.required_cdn_markers),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CodeRules":
        return cls(
            max_lines_prompted=data["max_lines_prompted"],
            max_lines_enforced=data["max_lines_enforced"],
            forbidden_component_names=tuple(data["forbidden_component_names"]),
            required_cdn_markers=tuple(data["required_cdn_markers"]),
        )


@dataclass
class CodeVersion:
    id: str
    html: str
    provenance: Provenance
    parent: str | None
    lint: list[CodeIssue]
    created_at: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "provenance": self.provenance.value,
            "parent": self.parent,
            "lint": [issue.to_dict() for issue in self.lint],
            "created_at": self.created_at,
        }


@dataclass
class PlanStep:
    index: int
    description: str
    status: StepStatus = StepStatus.PENDING
    versions: list[CodeVersion] = field(default_factory=list)
    current_version: str | None = None

    def version(self, version_id: str) -> CodeVersion:
        for version in self.versions:
            if version.id == version_id:
                return version
        raise UnknownVersion(version_id)

    def current(self) -> CodeVersion | None:
        if self.current_version is None:
            return None
        return self.version(self.current_version)

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "description": self.description,
            "status": self.status.value,
            "versions": [v.to_dict() for v in self.versions],
            "current_version": self.current_version,
        }


@dataclass
class Plan:
    steps: list[PlanStep] = field(default_factory=list)
    stale: bool = False

    def step(self, index: int) -> PlanStep:
        if not 1 <= index <= len(self.steps):
            raise IndexOutOfRange(index)
        return self.steps[index - 1]

    def to_dict(self) -> dict:
        return {"steps": [s.to_dict() for s in self.steps], "stale": self.stale}


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


# --- sanitization -------------------------------------------------------------

_FENCE_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)
_DOC_START_RE = re.compile(r"<!DOCTYPE|<html")


def _trim_document(text: str) -> str | None:
    match = _DOC_START_RE.search(text)
    if match is None:
        return None
    start = match.start()
    close = text.rfind("</html>")
    end = close + len("</html>") if close >= start else len(text)
    return text[start:end].strip()


def sanitize_code(raw: str) -> str:
    """Cut a single HTML document out of a free-form completion.

    Fenced code blocks containing document delimiters win over the raw text;
    otherwise the span from the first <!DOCTYPE or <html to the last </html>
    is taken. Line endings are normalized to LF. Raises SanitizeFailure when
    no document delimiters exist anywhere.
    """
    text = raw.replace("\r\n", "\n").replace("\r", "\n")
    for match in _FENCE_RE.finditer(text):
        document = _trim_document(match.group(1))
        if document is not None:
            return document
    document = _trim_document(text)
    if document is None:
        raise SanitizeFailure()
    return document


# --- linting --------------------------------------------------------------------

_ELISION_PATTERNS = [
    re.compile(r"rest of (the )?code", re.IGNORECASE),
    re.compile(r"remains? (the same|unchanged)", re.IGNORECASE),
    re.compile(r"other sections remain", re.IGNORECASE),
    re.compile(r"same as (before|above)", re.IGNORECASE),
    re.compile(r"^\s*\.\.\.\s*$"),
]

_COMMENT_RE = re.compile(
    r"/\*.*?\*/"      # block comments, incl. JSX {/* ... */} bodies
    r"|//[^\n]*"      # line comments
    r"|<!--.*?-->",   # HTML comments
    re.DOTALL,
)

_HTML_COMMENT_RE = re.compile(r"<!--.*?-->", re.DOTALL)


def _comment_is_elision(comment: str) -> bool:
    inner = comment.strip("/*<!->") if comment else ""
    return any(p.search(inner) for p in _ELISION_PATTERNS)


def _identifier_occurrences(html: str, name: str) -> int:
    pattern = re.compile(
        r"(?<![A-Za-z0-9_])" + re.escape(name) + r"(?![A-Za-z0-9_])"
    )
    return len(pattern.findall(html))


def _forbidden_name_variants(names: tuple[str, ...]) -> list[str]:
    # The prompt circulates with a misspelled MobileStepper; lint both
    # spellings regardless of which one the rules carry.
    variants = list(names)
    if "MobileStepper" in variants and "MopbileStepper" not in variants:
        variants.append("MopbileStepper")
    if "MopbileStepper" in variants and "MobileStepper" not in variants:
        variants.append("MobileStepper")
    return variants


_ROOT_MOUNT_RE = re.compile(r"""id\s*=\s*["']root["']""")


def lint_code(html: str, rules: CodeRules) -> list[CodeIssue]:
    """Check one document against the code rules. Linting is total: it
    reports issues and never raises."""
    issues: list[CodeIssue] = []

    line_count = len(html.splitlines())
    if line_count > rules.max_lines_enforced:
        issues.append(
            CodeIssue(
                IssueKind.LINE_LIMIT_EXCEEDED,
                f"{line_count} lines exceeds the hard limit of {rules.max_lines_enforced}",
                Severity.ERROR,
            )
        )
    elif line_count > rules.max_lines_prompted:
        issues.append(
            CodeIssue(
                IssueKind.LINE_LIMIT_EXCEEDED,
                f"{line_count} lines exceeds the requested {rules.max_lines_prompted}",
                Severity.WARNING,
            )
        )

    for name in _forbidden_name_variants(rules.forbidden_component_names):
        for _ in range(_identifier_occurrences(html, name)):
            issues.append(
                CodeIssue(
                    IssueKind.FORBIDDEN_COMPONENT,
                    f"uses forbidden component {name}",
                    Severity.ERROR,
                )
            )

    for marker in rules.required_cdn_markers:
        if marker not in html:
            issues.append(
                CodeIssue(
                    IssueKind.MISSING_CDN_TAG,
                    f"document does not load {marker}",
                    Severity.ERROR,
                )
            )

    doctype_count = html.count("<!DOCTYPE")
    if doctype_count > 1:
        issues.append(
            CodeIssue(
                IssueKind.MULTIPLE_DOCUMENTS,
                f"{doctype_count} <!DOCTYPE declarations in one file",
                Severity.ERROR,
            )
        )

    if not _ROOT_MOUNT_RE.search(html):
        issues.append(
            CodeIssue(
                IssueKind.MISSING_ROOT_MOUNT,
                'no element with id "root"',
                Severity.ERROR,
            )
        )

    doctype_at = html.find("<!DOCTYPE")
    if doctype_at > 0:
        prefix = _HTML_COMMENT_RE.sub("", html[:doctype_at])
        if prefix.strip():
            issues.append(
                CodeIssue(
                    IssueKind.RESIDUAL_PROSE,
                    "text precedes the <!DOCTYPE declaration",
                    Severity.WARNING,
                )
            )

    for match in _COMMENT_RE.finditer(html):
        if _comment_is_elision(match.group(0)):
            issues.append(
                CodeIssue(
                    IssueKind.ELIDED_CODE_COMMENT,
                    f"comment elides code: {match.group(0)[:60]!r}",
                    Severity.ERROR,
                )
            )

    return issues


# --- plan operations ---------------------------------------------------------------

_STEP_LINE_RE = re.compile(r"^\s*(\d+)[.)]\s+(.*)$")


def parse_plan_steps(text: str) -> list[str]:
    """Parse '1.' / '1)' numbered lines into step descriptions.

    Unnumbered lines continue the step above them; prose before the first
    numbered line is dropped. Anything else fails with the raw completion
    preserved for user repair.
    """
    grouped: list[list[str]] = []
    for line in text.splitlines():
        match = _STEP_LINE_RE.match(line)
        if match:
            grouped.append([match.group(2).strip()])
        elif grouped and line.strip():
            grouped[-1].append(line.strip())
    if not grouped:
        raise ParseFailure(
            "completion contains no numbered plan lines; raw text:\n" + text
        )
    return [" ".join(parts).strip() for parts in grouped]


def _requirement_notes(project: "Project") -> str:
    from .scoping import Requirement

    notes = []
    selected = project.requirements.selected if project.requirements else set()
    if Requirement.PREGENERATED_DATA in selected:
        notes.append(
            "Placeholder data already exists and is served from a data endpoint; the "
            "first step should read it in rather than create it."
        )
    if Requirement.IMAGE_GENERATION in selected:
        notes.append("The prototype may call an image model to generate images.")
    if Requirement.TEXT_MODEL_TOOL_CALLING in selected:
        notes.append("The prototype may call GPT at runtime for data or recommendations.")
    if Requirement.CHART_LIBRARY in selected:
        notes.append("Chart.js is available for charts.")
    if Requirement.DIAGRAM_LIBRARY in selected:
        notes.append("GoJS is available for diagrams.")
    return "\n".join(notes) if notes else "(none)"


def generate_plan(project: "Project", gateway: Gateway) -> Plan:
    """Decompose the spec into a fresh 3-6 step plan, all steps pending."""
    from .scoping import SpecMissing

    if project.spec is None:
        raise SpecMissing()
    request = render(
        prompts.PLAN_TEMPLATE,
        {
            "few_shot": prompts.PLAN_FEW_SHOT,
            "spec": project.spec.body,
            "requirement_notes": _requirement_notes(project),
        },
    )
    result = gateway.complete(
        request, project_id=project.id, transcript=project.transcript
    )
    descriptions = parse_plan_steps(result.text)
    if not PLAN_MIN_STEPS <= len(descriptions) <= PLAN_MAX_STEPS:
        raise StepCountOutOfRange(len(descriptions))
    if project.plan is not None:
        project.plan_history.append(project.plan)
    project.plan = Plan(
        steps=[
            PlanStep(index=i + 1, description=text)
            for i, text in enumerate(descriptions)
        ],
        stale=False,
    )
    project.touch()
    return project.plan


def _require_plan(project: "Project") -> Plan:
    if project.plan is None:
        raise PlanMissing()
    return project.plan


def _renumber(plan: Plan) -> None:
    for position, step in enumerate(plan.steps, start=1):
        step.index = position


def _stale_from(plan: Plan, first_index: int) -> None:
    for step in plan.steps:
        if step.index >= first_index and step.status in (
            StepStatus.APPROVED,
            StepStatus.GENERATED,
        ):
            step.status = StepStatus.STALE


def add_step(project: "Project", after_index: int, description: str) -> Plan:
    """Insert a user-authored step after the given index (0 = at the top)."""
    plan = _require_plan(project)
    if not 0 <= after_index <= len(plan.steps):
        raise IndexOutOfRange(after_index)
    step = PlanStep(index=after_index + 1, description=description)
    plan.steps.insert(after_index, step)
    _renumber(plan)
    _stale_from(plan, after_index + 2)
    project.touch()
    return plan


def update_step(project: "Project", index: int, description: str) -> Plan:
    """Rewrite a step's description; it and everything after it go stale."""
    plan = _require_plan(project)
    step = plan.step(index)
    step.description = description
    _stale_from(plan, index)
    project.touch()
    return plan


def remove_step(project: "Project", index: int) -> Plan:
    plan = _require_plan(project)
    step = plan.step(index)
    if step.status is StepStatus.APPROVED:
        raise RemoveApprovedStep(index)
    plan.steps.remove(step)
    _renumber(plan)
    _stale_from(plan, index)
    project.touch()
    return plan


def _check_prior_steps_approved(plan: Plan, index: int) -> None:
    for step in plan.steps:
        if step.index < index and step.status is not StepStatus.APPROVED:
            raise PriorStepUnapproved(step.index)


def _previous_approved_html(plan: Plan, index: int) -> str | None:
    previous = None
    for step in plan.steps:
        if step.index < index and step.status is StepStatus.APPROVED:
            current = step.current()
            if current is not None:
                previous = current.html
    return previous


def _store_version(
    project: "Project",
    step: PlanStep,
    html: str,
    provenance: Provenance,
    parent: str | None,
    rules: CodeRules,
) -> CodeVersion:
    version = CodeVersion(
        id=f"v{project.next_version_number()}",
        html=html,
        provenance=provenance,
        parent=parent,
        lint=lint_code(html, rules),
        created_at=_now(),
    )
    step.versions.append(version)
    step.current_version = version.id
    return version


def generate_step_code(
    project: "Project",
    gateway: Gateway,
    index: int,
    *,
    rules: CodeRules | None = None,
    proxy_mode: bool = True,
) -> CodeVersion:
    """Generate code for one step on top of the previous approved step's code.

    Lint findings are recorded on the stored version, never raised; a human
    decides whether to approve, iterate, or regenerate.
    """
    from .scoping import Requirement, SpecMissing

    rules = rules or CodeRules()
    plan = _require_plan(project)
    step = plan.step(index)
    _check_prior_steps_approved(plan, index)
    if step.status is StepStatus.APPROVED:
        raise RegenerateApprovedStep(index)
    if project.spec is None:
        raise SpecMissing()

    selected = project.requirements.selected if project.requirements else set()
    data_note = ""
    if Requirement.PREGENERATED_DATA in selected:
        sample = None
        if project.data is not None and project.data.items:
            import json as _json

            sample = _json.dumps(project.data.items[0], ensure_ascii=False, indent=2)
        data_note = prompts.data_endpoint_note(project.data_endpoint_path(), sample)

    self_invoke_blocks = []
    if Requirement.TEXT_MODEL_TOOL_CALLING in selected:
        self_invoke_blocks.append(
            "Example of calling GPT from the prototype:\n"
            + prompts.gpt_call_few_shot(proxy_mode)
        )
    if Requirement.IMAGE_GENERATION in selected:
        self_invoke_blocks.append(
            "Example of generating images from the prototype:\n"
            + prompts.image_call_few_shot(proxy_mode)
        )
    library_blocks = []
    if Requirement.CHART_LIBRARY in selected:
        library_blocks.append(prompts.CHART_LIBRARY_EXAMPLE)
    if Requirement.DIAGRAM_LIBRARY in selected:
        library_blocks.append(prompts.DIAGRAM_LIBRARY_EXAMPLE)

    request = render(
        prompts.STEP_CODE_TEMPLATE,
        {
            "code_rules": prompts.render_code_rules(
                rules.max_lines_prompted,
                rules.max_lines_enforced,
                rules.forbidden_component_names,
            ),
            "spec": project.spec.body,
            "task": step.description,
            "previous_code": prompts.previous_code_block(
                _previous_approved_html(plan, index)
            ),
            "data_note": data_note,
            "self_invoke_examples": (
                "\n\n".join(self_invoke_blocks) + "\n\n" if self_invoke_blocks else ""
            ),
            "library_examples": (
                "\n\n".join(library_blocks) + "\n\n" if library_blocks else ""
            ),
        },
    )
    result = gateway.complete(
        request, project_id=project.id, transcript=project.transcript
    )
    html = sanitize_code(result.text)
    version = _store_version(project, step, html, Provenance.GENERATED, None, rules)
    step.status = StepStatus.GENERATED
    project.touch()
    return version


def iterate_step(
    project: "Project",
    gateway: Gateway,
    index: int,
    problem: str,
    *,
    rules: CodeRules | None = None,
) -> CodeVersion:
    """Debug a step: ask the model to fix the described problem in place."""
    rules = rules or CodeRules()
    plan = _require_plan(project)
    step = plan.step(index)
    if not problem.strip():
        raise EmptyProblem()
    current = step.current()
    if current is None:
        raise NoCurrentVersion(index)

    request = render(
        prompts.DEBUG_TEMPLATE,
        {
            "spec": project.spec.body if project.spec else "",
            "task": step.description,
            "faked_data": project.data.raw_text if project.data else "(none)",
            "problem": problem,
            "task_code": current.html,
        },
    )
    result = gateway.complete(
        request, project_id=project.id, transcript=project.transcript
    )
    html = sanitize_code(result.text)
    version = _store_version(
        project, step, html, Provenance.ITERATED, current.id, rules
    )
    project.touch()
    return version


def approve_step(project: "Project", index: int) -> PlanStep:
    plan = _require_plan(project)
    step = plan.step(index)
    if step.status is not StepStatus.GENERATED or step.current() is None:
        raise NotGenerated(index)
    step.status = StepStatus.APPROVED
    project.touch()
    return step


def revert_to_step(project: "Project", index: int) -> PlanStep:
    """Fall back to a step's current version; everything after it goes stale."""
    plan = _require_plan(project)
    highest_with_versions = max(
        (s.index for s in plan.steps if s.versions), default=0
    )
    if not 1 <= index <= highest_with_versions:
        raise IndexOutOfRange(index)
    step = plan.step(index)
    for later in plan.steps:
        if later.index > index and later.status in (
            StepStatus.APPROVED,
            StepStatus.GENERATED,
        ):
            later.status = StepStatus.STALE
    project.touch()
    return step


def select_version(project: "Project", index: int, version_id: str) -> PlanStep:
    plan = _require_plan(project)
    step = plan.step(index)
    step.version(version_id)
    step.current_version = version_id
    project.touch()
    return step


def save_manual_edit(
    project: "Project", index: int, html: str, *, rules: CodeRules | None = None
) -> PlanStep:
    """Store hand-edited code as a new version of the step.

    The text must already be a bare document: sanitizing it must be an
    identity apart from line-ending normalization.
    """
    rules = rules or CodeRules()
    plan = _require_plan(project)
    step = plan.step(index)
    current = step.current()
    if current is None:
        raise NoCurrentVersion(index)
    sanitized = sanitize_code(html)
    normalized = html.replace("\r\n", "\n").replace("\r", "\n").strip()
    if sanitized != normalized:
        raise SanitizeFailure("manual edits must be a bare HTML document")
    _store_version(project, step, sanitized, Provenance.MANUAL_EDIT, current.id, rules)
    project.touch()
    return step
