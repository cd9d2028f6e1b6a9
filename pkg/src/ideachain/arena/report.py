"""Plain-text result tables: per-criterion ratings plus Average and Rank,
methods ordered by average, mirroring the usual leaderboard layout."""

from __future__ import annotations

from .agreement import AgreementReport
from .elo import EloTable

# The paper-reported GPT-4o-vs-human average agreement; printed as a
# comparison line in reports, never asserted anywhere.
REFERENCE_HUMAN_MODEL_AGREEMENT = 0.708


def _criterion_header(name: str) -> str:
    return name.replace("_", " ").title()


def format_elo_table(table: EloTable) -> str:
    headers = (
        ["Method"]
        + [_criterion_header(c.value) for c in table.criteria]
        + ["Average", "Rank"]
    )
    rows = []
    for method in sorted(table.averages, key=lambda m: table.ranks[m]):
        row = [method]
        row += [f"{table.ratings[criterion][method]:.0f}" for criterion in table.criteria]
        row += [f"{table.averages[method]:.0f}", str(table.ranks[method])]
        rows.append(row)
    widths = [
        max(len(headers[i]), *(len(row[i]) for row in rows)) for i in range(len(headers))
    ]
    lines = [
        "  ".join(headers[i].ljust(widths[i]) for i in range(len(headers))),
        "  ".join("-" * widths[i] for i in range(len(headers))),
    ]
    for row in rows:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(len(headers))))
    return "\n".join(lines)


def format_agreement_table(report: AgreementReport) -> str:
    lines = [f"agreement over {report.matched_keys} shared matches"]
    for criterion, value in report.per_criterion.items():
        excluded = report.per_criterion_tie_excluded[criterion]
        excl_text = f"{excluded:.1%}" if excluded is not None else "n/a"
        lines.append(
            f"  {_criterion_header(criterion.value):<18} {value:.1%}"
            f"  (tie-excluded {excl_text})"
        )
    lines.append(f"  {'Average':<18} {report.average:.1%}")
    if report.average_tie_excluded is not None:
        lines.append(f"  {'Average (excl.)':<18} {report.average_tie_excluded:.1%}")
    lines.append(
        f"  reference: published human-vs-model average "
        f"{REFERENCE_HUMAN_MODEL_AGREEMENT:.1%}"
    )
    return "\n".join(lines)
