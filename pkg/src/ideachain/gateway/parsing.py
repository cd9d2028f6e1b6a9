"""Strict-format response parsing.

Every prompt demands a labelled output block; this module turns those
responses into typed fields. Matching is label-anchored line scanning,
case-insensitive, tolerant of the markdown drift models add (bullets, bold
markers, numbering) but strict about field presence and value sets: any
malformed response raises a classified ParseError so the caller's retry
policy can re-issue the prompt.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from ..errors import ParseError, UnknownTemplateError


class FieldKind(Enum):
    TEXT = "text"
    INT = "int"
    QUOTED_LIST = "quoted_list"
    TITLE_LIST = "title_list"
    STEPS = "steps"
    TREND_LIST = "trend_list"


@dataclass(frozen=True)
class FieldSpec:
    label: str
    kind: FieldKind
    required: bool = True
    value_set: frozenset[int] | None = None
    allow_empty: bool = False


# One schema per prompt template, labels exactly as the output blocks demand.
SCHEMAS: dict[str, tuple[FieldSpec, ...]] = {
    "query_generation": (FieldSpec("Queries", FieldKind.QUOTED_LIST),),
    "relevance_check": (
        FieldSpec("Think", FieldKind.TEXT, required=False),
        FieldSpec("Relevant", FieldKind.INT, value_set=frozenset({0, 1})),
    ),
    "paper_digest": (
        FieldSpec("Entities", FieldKind.TEXT),
        FieldSpec("Idea", FieldKind.TEXT),
        FieldSpec("Experiment", FieldKind.TEXT),
        FieldSpec("References", FieldKind.TITLE_LIST),
    ),
    "trend_summary": (FieldSpec("Trends", FieldKind.TREND_LIST),),
    "future_trend": (FieldSpec("Future direction", FieldKind.TEXT),),
    "idea_generation": (
        FieldSpec("Motivation", FieldKind.TEXT),
        FieldSpec("Novelty", FieldKind.TEXT),
        FieldSpec("Method", FieldKind.TEXT),
        FieldSpec("Final idea", FieldKind.TEXT),
    ),
    "novelty_check": (
        FieldSpec("Think", FieldKind.TEXT, required=False),
        FieldSpec("Similar", FieldKind.INT, value_set=frozenset({0, 1})),
        FieldSpec("Summary of the idea", FieldKind.TEXT),
        FieldSpec("Similar paper id", FieldKind.INT, required=False),
    ),
    "experiment_generation": (FieldSpec("Experiment", FieldKind.STEPS),),
    "experiment_review": (FieldSpec("Suggestion", FieldKind.TEXT),),
    "refine_query": (FieldSpec("Query", FieldKind.TEXT, allow_empty=True),),
    "experiment_refine": (FieldSpec("Experiment", FieldKind.STEPS),),
    "extract_topic": (FieldSpec("topic", FieldKind.TEXT),),
    "extract_idea": (FieldSpec("Final idea", FieldKind.TEXT),),
    "extract_experiment": (FieldSpec("Experiment", FieldKind.STEPS),),
    "compare_ideas": (
        FieldSpec("Novelty", FieldKind.INT, value_set=frozenset({0, 1, 2})),
        FieldSpec("Significance", FieldKind.INT, value_set=frozenset({0, 1, 2})),
        FieldSpec("Feasibility", FieldKind.INT, value_set=frozenset({0, 1, 2})),
        FieldSpec("Clarity", FieldKind.INT, value_set=frozenset({0, 1, 2})),
        FieldSpec("Effectiveness", FieldKind.INT, value_set=frozenset({0, 1, 2})),
    ),
    "compare_experiments": (
        FieldSpec("Feasibility", FieldKind.INT, value_set=frozenset({0, 1, 2})),
        FieldSpec("Quality", FieldKind.INT, value_set=frozenset({0, 1, 2})),
        FieldSpec("Clarity", FieldKind.INT, value_set=frozenset({0, 1, 2})),
    ),
}

SCHEMA_IDS = tuple(sorted(SCHEMAS))


@dataclass
class ParsedFields:
    """Typed field values extracted from one response."""

    schema_id: str
    values: dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, name: str) -> Any:
        return self.values[name]

    def get(self, name: str, default: Any = None) -> Any:
        return self.values.get(name, default)

    def __contains__(self, name: str) -> bool:
        return name in self.values


# Leading markdown decoration models tend to emit before a label.
_DECOR = r"[\s>#*+-]*(?:\d+[.)]\s*)?(?:\*\*)?\s*"
_INT = re.compile(r"-?\d+")
_QUOTED = re.compile(r'"([^"\n]*)"')


def _label_pattern(label: str) -> re.Pattern[str]:
    return re.compile(
        rf"^{_DECOR}{re.escape(label)}\s*(?:\*\*)?\s*[::]\s*(?:\*\*)?\s*(.*)$",
        re.IGNORECASE,
    )


_STEP = re.compile(rf"^{_DECOR}Step\s*(\d+)\s*(?:\*\*)?\s*[::]", re.IGNORECASE | re.MULTILINE)
_TREND = re.compile(
    rf"^{_DECOR}Paper\s*(\d+)\s*to\s*Paper\s*(\d+)\s*(?:\*\*)?\s*[::]\s*",
    re.IGNORECASE | re.MULTILINE,
)


def _segment(text: str, specs: tuple[FieldSpec, ...]) -> dict[str, str]:
    """Split a response into per-field blocks.

    A line opens a field when it matches that field's label; longer labels win
    so "Similar paper id" is never captured by "Similar". The block runs until
    the next label of the same schema or end of text.
    """
    patterns = sorted(
        ((spec.label, _label_pattern(spec.label)) for spec in specs),
        key=lambda item: -len(item[0]),
    )
    blocks: dict[str, list[str]] = {}
    current: str | None = None
    for line in text.splitlines():
        opened = None
        for label, pattern in patterns:
            match = pattern.match(line)
            if match is not None:
                opened = (label, match.group(1))
                break
        if opened is not None:
            label, remainder = opened
            if label not in blocks:
                blocks[label] = [remainder]
                current = label
            else:
                # Repeated label: first occurrence wins, later ones are noise.
                current = None
        elif current is not None:
            blocks[current].append(line)
    return {label: "\n".join(lines) for label, lines in blocks.items()}


def _parse_int(label: str, block: str, value_set: frozenset[int] | None) -> int:
    match = _INT.search(block)
    if match is None:
        raise ParseError(f"field {label!r} has no integer value", code="empty_value")
    value = int(match.group(0))
    if value_set is not None and value not in value_set:
        raise ParseError(
            f"field {label!r} value {value} outside {sorted(value_set)}",
            code="out_of_range",
        )
    return value


def _strip_item(line: str) -> str:
    item = re.sub(rf"^{_DECOR}", "", line).strip()
    return item.strip("\"'[],").strip()


def _parse_title_list(block: str) -> list[str]:
    body = block.strip()
    if body in ("", "[]", "[ ]"):
        return []
    quoted = [q.strip() for q in _QUOTED.findall(body) if q.strip()]
    if quoted:
        return quoted
    items = [_strip_item(line) for line in body.splitlines()]
    return [item for item in items if item]


def _parse_steps(label: str, block: str) -> list[str]:
    matches = list(_STEP.finditer(block))
    if not matches:
        raise ParseError(
            f"field {label!r} contains no step labels", code="bad_steps"
        )
    steps = []
    for i, match in enumerate(matches):
        end = matches[i + 1].start() if i + 1 < len(matches) else len(block)
        steps.append(block[match.start():end].strip())
    return steps


def _parse_trends(label: str, block: str) -> list[str]:
    matches = list(_TREND.finditer(block))
    if not matches:
        raise ParseError(
            f"field {label!r} contains no trend entries", code="bad_trends"
        )
    entries = []
    for i, match in enumerate(matches):
        end = matches[i + 1].start() if i + 1 < len(matches) else len(block)
        entries.append(block[match.end():end].strip())
    return entries


def _parse_field(spec: FieldSpec, block: str) -> Any:
    if spec.kind is FieldKind.INT:
        return _parse_int(spec.label, block, spec.value_set)
    if spec.kind is FieldKind.QUOTED_LIST:
        items = [q.strip() for q in _QUOTED.findall(block) if q.strip()]
        if not items:
            raise ParseError(
                f"field {spec.label!r} has no quoted entries", code="bad_list"
            )
        return items
    if spec.kind is FieldKind.TITLE_LIST:
        return _parse_title_list(block)
    if spec.kind is FieldKind.STEPS:
        return _parse_steps(spec.label, block)
    if spec.kind is FieldKind.TREND_LIST:
        return _parse_trends(spec.label, block)
    value = block.strip()
    # A literal "" answer means "no value" (refine-query contract).
    if value == '""':
        value = ""
    if not value and not spec.allow_empty:
        raise ParseError(f"field {spec.label!r} is empty", code="empty_value")
    return value


def parse_structured(response_text: str, schema_id: str) -> ParsedFields:
    """Parse one model response against a registered schema.

    Raises UnknownTemplateError for an unregistered schema id and a
    classified ParseError for any malformed response.
    """
    if schema_id not in SCHEMAS:
        raise UnknownTemplateError(f"unknown schema id {schema_id!r}")
    specs = SCHEMAS[schema_id]
    try:
        blocks = _segment(response_text or "", specs)
        values: dict[str, Any] = {}
        for spec in specs:
            if spec.label not in blocks:
                if spec.required:
                    raise ParseError(
                        f"response missing required label {spec.label!r}",
                        code="missing_label",
                    )
                continue
            try:
                values[spec.label] = _parse_field(spec, blocks[spec.label])
            except ParseError:
                if spec.required:
                    raise
                # Optional field with a garbled value: drop it.
        return ParsedFields(schema_id=schema_id, values=values)
    except ParseError:
        raise
    except Exception as exc:  # total over the error set, never a silent partial
        raise ParseError(f"unparseable response: {exc}", code="malformed") from exc
