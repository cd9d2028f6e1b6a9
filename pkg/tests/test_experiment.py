"""Experiment design: step parsing, revision lineage, conditional search."""

from __future__ import annotations

import pytest

from helpers import chain_chat_provider, make_gateway, make_scholar, steps_response

from ideachain.config import PipelineConfig
from ideachain.errors import ParseError, ValidationError
from ideachain.experiment import (
    derive_refinement_query,
    design,
    design_experiment,
    plan_from_document,
    plan_to_document,
    refine_experiment,
    review_experiment,
    ExperimentPlan,
    ReviewSuggestions,
)
from ideachain.gateway.parsing import parse_structured


def experiment_provider(query_answers=None):
    provider = chain_chat_provider()
    provider.add(
        "designing rigorous, feasible experiments",
        steps_response(4, "design"),
    )
    provider.add(
        "analyze whether a given experiment can effectively verify",
        "Suggestion: clarify dataset construction",
    )
    answers = iter(query_answers or ['""'])
    provider.add(
        "please provide a  search query for literature search",
        lambda req: f"Query: {next(answers)}",
    )
    provider.add(
        "The information of the literature you maybe need to refer to",
        steps_response(5, "refined"),
    )
    return provider


def make_stack(query_answers=None):
    config = PipelineConfig(parallel_branches=False)
    provider = experiment_provider(query_answers)
    gateway = make_gateway(provider, config)
    scholar, transport = make_scholar()
    return gateway, scholar, config, provider, transport


# ---------------------------------------------------------------------------
# single steps


def test_design_experiment_parses_steps():
    gateway, _, _, _, _ = make_stack()
    plan = design_experiment(gateway, "the idea", "entities", ["past exp 1"])
    assert len(plan.steps) == 4
    assert plan.revision == 0
    assert plan.steps[0].startswith("Step1:")


def test_design_experiment_empty_fewshot_slot_ok():
    gateway, _, _, _, _ = make_stack()
    plan = design_experiment(gateway, "the idea", "entities", [])
    assert plan.revision == 0


def test_design_experiment_without_step_labels_is_parse_error():
    gateway, _, _, provider, _ = make_stack()
    provider.add_first(
        "designing rigorous, feasible experiments", "Experiment: no labels at all"
    )
    with pytest.raises(ParseError):
        design_experiment(gateway, "the idea", "entities", [])


def test_review_targets_current_revision():
    gateway, _, _, _, _ = make_stack()
    plan = ExperimentPlan(steps=["Step1: x"], revision=2)
    suggestions = review_experiment(gateway, "idea", plan, "entities")
    assert suggestions.text == "clarify dataset construction"
    assert suggestions.revision_target == 2


def test_empty_suggestion_is_parse_error():
    gateway, _, _, provider, _ = make_stack()
    provider.add_first(
        "analyze whether a given experiment can effectively verify", "Suggestion:"
    )
    plan = ExperimentPlan(steps=["Step1: x"])
    with pytest.raises(ParseError):
        review_experiment(gateway, "idea", plan, "entities")


def test_derive_query_present_and_absent():
    gateway, _, _, _, _ = make_stack(
        query_answers=["dynamic knowledge graph update", '""']
    )
    plan = ExperimentPlan(steps=["Step1: x"])
    suggestions = ReviewSuggestions(text="s", revision_target=0)
    assert derive_refinement_query(gateway, plan, suggestions) == (
        "dynamic knowledge graph update"
    )
    assert derive_refinement_query(gateway, plan, suggestions) is None


def test_refine_increments_revision_and_lineage():
    gateway, _, _, _, _ = make_stack()
    plan = ExperimentPlan(steps=["Step1: x"])
    suggestions = ReviewSuggestions(text="make it clearer", revision_target=0)
    refined = refine_experiment(gateway, plan, suggestions, [], query_used=None)
    assert refined.revision == 1
    assert refined.suggestions_applied == ["make it clearer"]
    twice = refine_experiment(gateway, refined, suggestions, [], query_used=None)
    assert twice.revision == 2
    assert len(twice.suggestions_applied) == 2


def test_refine_binds_retrieved_titles():
    gateway, scholar, _, provider, _ = make_stack()
    stubs = scholar.search_papers("q-whole", 3)
    plan = ExperimentPlan(steps=["Step1: x"])
    refine_experiment(
        gateway,
        plan,
        ReviewSuggestions(text="s", revision_target=0),
        stubs,
        query_used="q",
    )
    prompt = provider.calls[-1].user_text
    assert "Anchor Work on Topic" in prompt


# ---------------------------------------------------------------------------
# the loop


@pytest.mark.parametrize("iterations", [0, 1, 2])
def test_design_revision_equals_iterations(iterations):
    gateway, scholar, config, _, _ = make_stack(query_answers=['""', '""'])
    plan = design(
        gateway, scholar, "idea", "entities", [], config, iterations=iterations
    )
    assert plan.revision == iterations
    assert len(plan.suggestions_applied) == iterations


def test_default_iterations_is_one():
    gateway, scholar, config, _, _ = make_stack()
    plan = design(gateway, scholar, "idea", "entities", [], config)
    assert config.refine_iterations == 1
    assert plan.revision == 1


def test_absent_query_never_triggers_search():
    gateway, scholar, config, _, transport = make_stack(query_answers=['""'])
    before = transport.calls["search"]
    plan = design(gateway, scholar, "idea", "entities", [], config, iterations=1)
    assert transport.calls["search"] == before
    assert plan.search_queries_used == []


def test_present_query_searches_top_five():
    gateway, scholar, config, _, transport = make_stack(
        query_answers=["anchor topic search"]
    )
    before = transport.calls["search"]
    plan = design(gateway, scholar, "idea", "entities", [], config, iterations=1)
    assert transport.calls["search"] == before + 1
    assert plan.search_queries_used == ["anchor topic search"]


def test_search_queries_bounded_by_iterations():
    gateway, scholar, config, _, _ = make_stack(query_answers=["q1", "q2"])
    plan = design(gateway, scholar, "idea", "entities", [], config, iterations=2)
    assert len(plan.search_queries_used) <= 2


def test_negative_iterations_rejected():
    gateway, scholar, config, _, _ = make_stack()
    with pytest.raises(ValidationError):
        design(gateway, scholar, "idea", "entities", [], config, iterations=-1)


# ---------------------------------------------------------------------------
# step partition property


def test_step_parse_is_partition_of_body():
    text = steps_response(5)
    steps = parse_structured(text, "experiment_generation")["Experiment"]
    body = text.split("Experiment:", 1)[1]
    assert " ".join("\n".join(steps).split()) == " ".join(body.split())


def test_plan_document_round_trip():
    plan = ExperimentPlan(
        steps=["Step1: a", "Step2: b"],
        revision=2,
        suggestions_applied=["s1", "s2"],
        search_queries_used=["q"],
    )
    document = plan_to_document(plan, "topic")
    assert plan_from_document(document) == plan
