"""Ingestion of human 0-100 quality scores from CSV."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

EXPECTED_HEADER = ["item_id", "score", "rater_id"]


@dataclass(frozen=True)
class ManualScore:
    item_id: str
    score: int
    rater_id: str

    def __post_init__(self) -> None:
        if not 0 <= self.score <= 100:
            raise ValueError("score must be in [0, 100]")


@dataclass
class ManualScoreReport:
    mean_score: float
    scores: list[ManualScore]
    rejected: list[tuple[int, str]] = field(default_factory=list)


def ingest_manual_scores(path) -> ManualScoreReport:
    """Read and validate scores, rejecting out-of-range or malformed rows.

    The mean is computed over accepted rows only; rejected rows are
    reported as (line number, reason).
    """
    scores: list[ManualScore] = []
    rejected: list[tuple[int, str]] = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != EXPECTED_HEADER:
            raise ValueError(f"expected header {','.join(EXPECTED_HEADER)}, got {header}")
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                rejected.append((line_no, f"expected 3 fields, got {len(row)}"))
                continue
            item_id, raw_score, rater_id = (cell.strip() for cell in row)
            try:
                value = int(raw_score)
            except ValueError:
                rejected.append((line_no, f"score {raw_score!r} is not an integer"))
                continue
            if not 0 <= value <= 100:
                rejected.append((line_no, f"score {value} outside [0, 100]"))
                continue
            scores.append(ManualScore(item_id, value, rater_id))
    if not scores:
        raise ValueError("no valid scores in file")
    mean = sum(s.score for s in scores) / len(scores)
    return ManualScoreReport(mean_score=mean, scores=scores, rejected=rejected)
