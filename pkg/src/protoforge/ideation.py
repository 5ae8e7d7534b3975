"""Model-backed candidate generation for matrix cells.

Pure matrix state lives in `matrix`; this module renders ideation prompts,
dispatches them, and appends parsed candidates. Candidate lists only ever
grow — iteration adds options instead of replacing them.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from . import prompts
from .gateway import Gateway, ParseFailure, extract_json_array, render
from .matrix import (
    CellKey,
    EmptyFeedback,
    Level,
    PreconditionOrder,
    context_for,
)

if TYPE_CHECKING:
    from .project import Project

DEFAULT_BRAINSTORM_COUNT = 3


def _check_preconditions(project: "Project", target: CellKey) -> None:
    if not project.matrix.problem.strip():
        raise PreconditionOrder("submit a problem statement before brainstorming")
    if target.level is Level.GROUNDING:
        idea = project.matrix.cells[CellKey(target.dimension, Level.IDEA)]
        if idea.submitted is None:
            raise PreconditionOrder(
                f"submit the {target.dimension.value} idea before grounding it"
            )


def _parse_candidates(text: str, count: int) -> list[str]:
    items = extract_json_array(text)
    texts = [item if isinstance(item, str) else str(item) for item in items]
    texts = [t for t in texts if t.strip()]
    if len(texts) < count:
        raise ParseFailure(
            f"completion yielded {len(texts)} candidates, expected {count}"
        )
    return texts[:count]


def _common_bindings(project: "Project", target: CellKey, count: int) -> dict[str, str]:
    return {
        "few_shots": prompts.matrix_few_shot_block(target),
        "dimension": target.dimension.value,
        "dimension_blurb": prompts.DIMENSION_BLURBS[target.dimension],
        "level": target.level.value,
        "output_rules": prompts.output_rules_for(target, count),
        "problem": project.matrix.problem,
        "context": prompts.format_context(context_for(project.matrix, target)),
        "count": str(count),
    }


def brainstorm(
    project: "Project",
    gateway: Gateway,
    target: CellKey,
    count: int = DEFAULT_BRAINSTORM_COUNT,
) -> list[str]:
    """Append `count` fresh model-suggested candidates to a cell."""
    _check_preconditions(project, target)
    request = render(prompts.BRAINSTORM_TEMPLATE, _common_bindings(project, target, count))
    result = gateway.complete(
        request, project_id=project.id, transcript=project.transcript
    )
    candidates = _parse_candidates(result.text, count)
    project.matrix.cells[target].candidates.extend(candidates)
    project.touch()
    return candidates


def iterate_candidates(
    project: "Project",
    gateway: Gateway,
    target: CellKey,
    feedback: str,
    count: int = DEFAULT_BRAINSTORM_COUNT,
) -> list[str]:
    """Append candidates steered by user feedback on the current list."""
    if not feedback.strip():
        raise EmptyFeedback()
    _check_preconditions(project, target)
    cell = project.matrix.cells[target]
    bindings = _common_bindings(project, target, count)
    bindings["candidates"] = (
        "\n".join(f"- {c}" for c in cell.candidates) if cell.candidates else "(none)"
    )
    bindings["feedback"] = feedback
    request = render(prompts.ITERATE_TEMPLATE, bindings)
    result = gateway.complete(
        request, project_id=project.id, transcript=project.transcript
    )
    candidates = _parse_candidates(result.text, count)
    cell.candidates.extend(candidates)
    project.touch()
    return candidates
