"""Pairwise-tournament evaluation: judging, scheduling, ratings, agreement."""

from .ablation import ablation_score, ablation_table
from .agreement import AgreementReport, compute_agreement
from .baseline import BaselineRecord, BaselineSource, extract_baseline
from .criteria import (
    EXPERIMENT_CRITERIA,
    IDEA_CRITERIA,
    RUBRICS,
    Criterion,
    Track,
    criteria_for,
    rubric_for,
)
from .elo import EloTable, compute_elo
from .judging import (
    Contestant,
    LlmPairJudge,
    PairJudge,
    ScriptedPairJudge,
    judge_experiment_pair,
    judge_idea_pair,
)
from .records import (
    ORDER_AB,
    ORDER_BA,
    TIE,
    MatchLog,
    MatchRecord,
    make_record,
    ok_records,
)
from .report import format_agreement_table, format_elo_table
from .tournament import (
    MethodOutputs,
    PlannedMatch,
    Topic,
    expected_match_count,
    load_topics,
    plan_matches,
    run_tournament,
)

__all__ = [
    "ablation_score",
    "ablation_table",
    "AgreementReport",
    "compute_agreement",
    "BaselineRecord",
    "BaselineSource",
    "extract_baseline",
    "EXPERIMENT_CRITERIA",
    "IDEA_CRITERIA",
    "RUBRICS",
    "Criterion",
    "Track",
    "criteria_for",
    "rubric_for",
    "EloTable",
    "compute_elo",
    "Contestant",
    "LlmPairJudge",
    "PairJudge",
    "ScriptedPairJudge",
    "judge_experiment_pair",
    "judge_idea_pair",
    "ORDER_AB",
    "ORDER_BA",
    "TIE",
    "MatchLog",
    "MatchRecord",
    "make_record",
    "ok_records",
    "format_agreement_table",
    "format_elo_table",
    "MethodOutputs",
    "PlannedMatch",
    "Topic",
    "expected_match_count",
    "load_topics",
    "plan_matches",
    "run_tournament",
]
