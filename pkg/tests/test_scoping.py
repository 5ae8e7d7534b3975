"""Scoping tests: requirements, spec shape, and the placeholder-data contract."""

from __future__ import annotations

import json

import pytest

from protoforge.codegen import Plan, PlanStep
from protoforge.gateway import ParseFailure
from protoforge.scoping import (
    LengthOutOfRange,
    MatrixIncomplete,
    Requirement,
    RequirementMissing,
    RequirementSource,
    RequirementsNotSet,
    SpecShapeError,
    UnknownRequirement,
    edit_data,
    edit_spec,
    generate_data,
    generate_spec,
    identify_requirements,
    parse_requirements,
    parse_spec_sections,
    set_requirements,
)

from conftest import (
    VALID_SPEC_BODY,
    QueueProvider,
    fill_matrix,
    live_gateway,
    make_project,
    scoped_project,
)


def items_json(count: int) -> str:
    return json.dumps([{"id": i + 1, "name": f"item {i + 1}"} for i in range(count)])


class TestParseRequirements:
    def test_labels_map_to_enum(self):
        selected = parse_requirements(
            '["Dynamically generated AI-images", "Pre-generated data"]'
        )
        assert selected == {Requirement.IMAGE_GENERATION, Requirement.PREGENERATED_DATA}

    def test_enum_names_accepted(self):
        assert parse_requirements('["ChartLibrary"]') == {Requirement.CHART_LIBRARY}

    def test_refusal_prose_is_empty_set(self):
        assert parse_requirements("none needed") == set()

    def test_empty_array_is_empty_set(self):
        assert parse_requirements("[]") == set()

    def test_all_unknown_entries_fail(self):
        with pytest.raises(ParseFailure):
            parse_requirements('["FooLib", "BarLib"]')

    def test_known_entries_survive_unknown_ones(self):
        assert parse_requirements('["FooLib", "Pre-generated data"]') == {
            Requirement.PREGENERATED_DATA
        }


class TestIdentifyRequirements:
    def test_incomplete_matrix(self):
        project = make_project()
        with pytest.raises(MatrixIncomplete):
            identify_requirements(project, live_gateway(QueueProvider([])))

    def test_stores_model_suggested(self):
        project = fill_matrix(make_project())
        gateway = live_gateway(QueueProvider(['["Pre-generated data"]']))
        result = identify_requirements(project, gateway)
        assert result.selected == {Requirement.PREGENERATED_DATA}
        assert result.source is RequirementSource.MODEL_SUGGESTED

    def test_matrix_entries_bound_into_prompt(self):
        project = fill_matrix(make_project())
        provider = QueueProvider(["[]"])
        identify_requirements(project, live_gateway(provider))
        assert "person idea text" in provider.requests[0].rendered_user


class TestSetRequirements:
    def test_overwrite_as_user_edited(self):
        project = make_project()
        result = set_requirements(project, ["ChartLibrary", "Pre-generated data"])
        assert result.selected == {
            Requirement.CHART_LIBRARY,
            Requirement.PREGENERATED_DATA,
        }
        assert result.source is RequirementSource.USER_EDITED

    def test_clear(self):
        project = make_project()
        set_requirements(project, ["ChartLibrary"])
        assert set_requirements(project, []).selected == set()

    def test_unknown(self):
        with pytest.raises(UnknownRequirement):
            set_requirements(make_project(), ["FooLib"])


class TestSpecSections:
    def test_parses_in_order(self):
        sections = parse_spec_sections(VALID_SPEC_BODY)
        assert [s.title for s in sections] == [
            "Application Layout",
            "User Interactions",
            "Inputs and Logic",
        ]
        assert sections[0].start < sections[1].start < sections[2].start
        assert sections[0].end == sections[1].start
        assert sections[2].end == len(VALID_SPEC_BODY)

    def test_missing_header(self):
        body = VALID_SPEC_BODY.replace("Inputs and Logic:", "Logic stuff:")
        with pytest.raises(SpecShapeError):
            parse_spec_sections(body)

    def test_duplicated_header(self):
        body = VALID_SPEC_BODY + "\nApplication Layout: again"
        with pytest.raises(SpecShapeError):
            parse_spec_sections(body)

    def test_out_of_order(self):
        body = (
            "User Interactions:\n- a\n"
            "Application Layout:\n- b\n"
            "Inputs and Logic:\n- c"
        )
        with pytest.raises(SpecShapeError):
            parse_spec_sections(body)


class TestGenerateSpec:
    def test_happy_path(self):
        project = fill_matrix(make_project())
        set_requirements(project, [])
        gateway = live_gateway(QueueProvider([VALID_SPEC_BODY]))
        spec = generate_spec(project, gateway)
        assert spec.edited_by_user is False
        assert len(spec.sections) == 3

    def test_requirements_not_set(self):
        project = fill_matrix(make_project())
        with pytest.raises(RequirementsNotSet):
            generate_spec(project, live_gateway(QueueProvider([VALID_SPEC_BODY])))

    def test_missing_header_is_shape_error(self):
        project = fill_matrix(make_project())
        set_requirements(project, [])
        bad = VALID_SPEC_BODY.replace("Inputs and Logic:", "")
        with pytest.raises(SpecShapeError):
            generate_spec(project, live_gateway(QueueProvider([bad])))

    def test_data_directive_required_with_pregenerated_data(self):
        project = fill_matrix(make_project())
        set_requirements(project, ["Pre-generated data"])
        no_directive = (
            "Application Layout:\n- one\n"
            "User Interactions:\n- two\n"
            "Inputs and Logic:\n- three"
        )
        with pytest.raises(SpecShapeError):
            generate_spec(project, live_gateway(QueueProvider([no_directive])))

    def test_pregenerated_dataset_phrasing_satisfies_directive(self):
        project = fill_matrix(make_project())
        set_requirements(project, ["Pre-generated data"])
        body = (
            "Application Layout:\n- one\n"
            "User Interactions:\n- two\n"
            "Inputs and Logic:\n- The app will use a pre-generated dataset of cards."
        )
        spec = generate_spec(project, live_gateway(QueueProvider([body])))
        assert spec.body == body

    def test_regenerate_keeps_prior_in_history_and_stales_plan(self):
        project = fill_matrix(make_project())
        set_requirements(project, [])
        second = VALID_SPEC_BODY.replace("a card", "a tile")
        gateway = live_gateway(QueueProvider([VALID_SPEC_BODY, second]))
        generate_spec(project, gateway)
        edit_spec(project, project.spec.body)  # user touches the spec
        project.plan = Plan(steps=[PlanStep(index=1, description="d")])
        project.plan.stale = False
        spec = generate_spec(project, gateway)
        assert spec.edited_by_user is False
        assert len(project.spec_history) == 2
        assert project.plan.stale is True


class TestEditSpec:
    def test_valid_edit(self):
        project = scoped_project()
        edited = edit_spec(project, VALID_SPEC_BODY + "\n- extra line")
        assert edited.edited_by_user is True

    def test_invalid_edit(self):
        project = scoped_project()
        with pytest.raises(SpecShapeError):
            edit_spec(project, "no headers at all")

    def test_identical_body_still_stales_plan(self):
        project = scoped_project()
        project.plan = Plan(steps=[PlanStep(index=1, description="d")], stale=False)
        edit_spec(project, project.spec.body)
        assert project.plan.stale is True


class TestGenerateData:
    def test_happy_path_round_trips(self):
        project = scoped_project(requirements={Requirement.PREGENERATED_DATA})
        gateway = live_gateway(QueueProvider([items_json(12)]))
        data = generate_data(project, gateway)
        assert len(data.items) == 12
        assert json.loads(data.raw_text) == data.items
        assert data.edited_by_user is False

    def test_requirement_missing(self):
        project = scoped_project(requirements=set())
        with pytest.raises(RequirementMissing):
            generate_data(project, live_gateway(QueueProvider([items_json(12)])))

    def test_out_of_range_retries_once_then_errors(self):
        project = scoped_project(requirements={Requirement.PREGENERATED_DATA})
        provider = QueueProvider([items_json(7), items_json(7)])
        with pytest.raises(LengthOutOfRange) as excinfo:
            generate_data(project, live_gateway(provider))
        assert excinfo.value.count == 7
        assert len(provider.requests) == 2

    def test_out_of_range_retry_can_recover(self):
        project = scoped_project(requirements={Requirement.PREGENERATED_DATA})
        provider = QueueProvider([items_json(7), items_json(14)])
        data = generate_data(project, live_gateway(provider))
        assert len(data.items) == 14

    def test_non_object_items_fail(self):
        project = scoped_project(requirements={Requirement.PREGENERATED_DATA})
        gateway = live_gateway(QueueProvider([json.dumps([1, 2] * 6)]))
        with pytest.raises(ParseFailure):
            generate_data(project, gateway)

    def test_person_entries_bound_into_prompt(self):
        project = scoped_project(requirements={Requirement.PREGENERATED_DATA})
        provider = QueueProvider([items_json(10)])
        generate_data(project, live_gateway(provider))
        prompt = provider.requests[0].rendered_user
        assert "person idea text" in prompt
        assert "person grounding text" in prompt


class TestEditData:
    def test_short_edit_accepted_with_warning(self):
        project = scoped_project()
        data = edit_data(project, items_json(5))
        assert data.length_warning is True
        assert data.edited_by_user is True

    def test_in_range_edit_no_warning(self):
        project = scoped_project()
        assert edit_data(project, items_json(12)).length_warning is False

    def test_non_array_rejected(self):
        project = scoped_project()
        with pytest.raises(ParseFailure):
            edit_data(project, '{"not": "an array"}')

    def test_raw_text_stored_verbatim(self):
        project = scoped_project()
        raw = '[\n  {"id": 1}\n]'
        assert edit_data(project, raw).raw_text == raw
