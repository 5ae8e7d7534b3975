"""The 3x2 design matrix: brainstorming state, submission ordering, context
propagation, grounding invalidation, and per-cell version history.

The matrix is a plain state machine. Everything that talks to a model lives
in `ideation`; this module never performs I/O.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Dimension(Enum):
    PERSON = "person"
    APPROACH = "approach"
    INTERACTION = "interaction"


class Level(Enum):
    IDEA = "idea"
    GROUNDING = "grounding"


@dataclass(frozen=True)
class CellKey:
    dimension: Dimension
    level: Level

    def __str__(self) -> str:
        return f"{self.dimension.value}:{self.level.value}"

    @classmethod
    def parse(cls, text: str) -> "CellKey":
        dim, _, level = text.partition(":")
        return cls(Dimension(dim), Level(level))


ALL_CELL_KEYS: tuple[CellKey, ...] = tuple(
    CellKey(dim, level) for dim in Dimension for level in Level
)


class MatrixError(Exception):
    """Base class for matrix state-machine violations."""


class EmptyProblem(MatrixError):
    def __init__(self):
        super().__init__("problem statement must be non-empty")


class EmptyContent(MatrixError):
    def __init__(self):
        super().__init__("cell submission must be non-empty")


class EmptyFeedback(MatrixError):
    def __init__(self):
        super().__init__("iteration feedback must be non-empty")


class PreconditionOrder(MatrixError):
    """A cell was acted on before its prerequisites were submitted."""


class NothingToSave(MatrixError):
    def __init__(self, key: CellKey):
        super().__init__(f"cell {key} has no candidates or submission to snapshot")
        self.key = key


class UnknownSnapshot(MatrixError):
    def __init__(self, snapshot_id: str):
        super().__init__(f"no snapshot {snapshot_id!r}")
        self.snapshot_id = snapshot_id


@dataclass(frozen=True)
class CellSnapshot:
    """Immutable saved copy of a cell's candidates and submission."""

    id: str
    candidates: tuple[str, ...]
    submitted: str | None


@dataclass
class CellState:
    candidates: list[str] = field(default_factory=list)
    submitted: str | None = None
    stale: bool = False
    history: list[CellSnapshot] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "candidates": list(self.candidates),
            "submitted": self.submitted,
            "stale": self.stale,
            "history": [
                {"id": s.id, "candidates": list(s.candidates), "submitted": s.submitted}
                for s in self.history
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CellState":
        return cls(
            candidates=list(data["candidates"]),
            submitted=data["submitted"],
            stale=data["stale"],
            history=[
                CellSnapshot(s["id"], tuple(s["candidates"]), s["submitted"])
                for s in data["history"]
            ],
        )


@dataclass
class MatrixState:
    problem: str = ""
    cells: dict[CellKey, CellState] = field(
        default_factory=lambda: {key: CellState() for key in ALL_CELL_KEYS}
    )
    submission_log: list[CellKey] = field(default_factory=list)

    def cell(self, key: CellKey) -> CellState:
        return self.cells[key]

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "cells": {str(key): state.to_dict() for key, state in self.cells.items()},
            "submission_log": [str(key) for key in self.submission_log],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MatrixState":
        return cls(
            problem=data["problem"],
            cells={
                CellKey.parse(raw): CellState.from_dict(state)
                for raw, state in data["cells"].items()
            },
            submission_log=[CellKey.parse(raw) for raw in data["submission_log"]],
        )


def submit_problem(text: str) -> MatrixState:
    """Start a design space for a problem statement.

    A new problem is a new design space: callers replacing an existing matrix
    get fresh, empty cells.
    """
    if not text.strip():
        raise EmptyProblem()
    return MatrixState(problem=text.strip())


def context_for(matrix: MatrixState, target: CellKey) -> list[tuple[CellKey, str]]:
    """Already-decided entries to feed the next suggestion, in submit order.

    Returns every cell with a submitted value and stale=False, excluding the
    target itself, ordered by each cell's most recent submit.
    """
    latest: dict[CellKey, int] = {}
    for position, key in enumerate(matrix.submission_log):
        latest[key] = position
    entries = []
    for key, position in sorted(latest.items(), key=lambda item: item[1]):
        if key == target:
            continue
        state = matrix.cells[key]
        if state.submitted is None or state.stale:
            continue
        entries.append((key, state.submitted))
    return entries


def _require_idea_before(matrix: MatrixState, target: CellKey) -> None:
    if target.level is Level.GROUNDING:
        idea = matrix.cells[CellKey(target.dimension, Level.IDEA)]
        if idea.submitted is None:
            raise PreconditionOrder(
                f"{target.dimension.value}:grounding requires a submitted "
                f"{target.dimension.value}:idea first"
            )


def _invalidate_grounding(matrix: MatrixState, dimension: Dimension) -> None:
    grounding = matrix.cells[CellKey(dimension, Level.GROUNDING)]
    if grounding.submitted is not None:
        grounding.stale = True


def submit_cell(matrix: MatrixState, target: CellKey, content: str) -> MatrixState:
    """Submit text into a cell, enforcing the idea-before-grounding rule.

    Submitting an idea invalidates the dimension's previously-submitted
    grounding: it is hidden from context and from completeness until
    resubmitted. The content need not come from the candidate list.
    """
    if not matrix.problem.strip():
        raise PreconditionOrder("submit a problem statement before filling cells")
    if not content.strip():
        raise EmptyContent()
    _require_idea_before(matrix, target)

    cell = matrix.cells[target]
    cell.submitted = content
    matrix.submission_log.append(target)
    if target.level is Level.IDEA:
        _invalidate_grounding(matrix, target.dimension)
    else:
        cell.stale = False
    return matrix


def save_cell_version(matrix: MatrixState, target: CellKey) -> str:
    """Snapshot a cell's candidates and submission; returns the snapshot id."""
    cell = matrix.cells[target]
    if not cell.candidates and cell.submitted is None:
        raise NothingToSave(target)
    snapshot = CellSnapshot(
        id=f"s{len(cell.history) + 1}",
        candidates=tuple(cell.candidates),
        submitted=cell.submitted,
    )
    cell.history.append(snapshot)
    return snapshot.id


def list_cell_versions(matrix: MatrixState, target: CellKey) -> list[CellSnapshot]:
    return list(matrix.cells[target].history)


def restore_cell_version(
    matrix: MatrixState, target: CellKey, snapshot_id: str
) -> MatrixState:
    """Replace the live cell with a saved snapshot.

    Restoring an idea re-triggers the grounding-staleness rule, exactly as a
    fresh submit of that idea would.
    """
    cell = matrix.cells[target]
    snapshot = next((s for s in cell.history if s.id == snapshot_id), None)
    if snapshot is None:
        raise UnknownSnapshot(snapshot_id)
    cell.candidates = list(snapshot.candidates)
    cell.submitted = snapshot.submitted
    if target.level is Level.IDEA:
        _invalidate_grounding(matrix, target.dimension)
    else:
        cell.stale = False if snapshot.submitted is not None else cell.stale
    return matrix


def matrix_complete(matrix: MatrixState) -> bool:
    """True when the problem is set and all six cells hold fresh submissions."""
    if not matrix.problem.strip():
        return False
    return all(
        state.submitted is not None and not state.stale
        for state in matrix.cells.values()
    )
