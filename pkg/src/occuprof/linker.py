"""Cross-platform profile matching: Jaccard similarity of profile
descriptions, thresholded acceptance, best single match per professional
record."""

import csv
import json
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from .corpus import tokenize


class Source(Enum):
    PROFESSIONAL = "professional"
    SOCIAL = "social"


@dataclass(frozen=True)
class ProfileRecord:
    record_id: str
    source: Source
    name: str = ""
    description: str = ""


@dataclass(frozen=True)
class MatchResult:
    professional_id: str
    social_id: str
    score: float
    accepted: bool


def jaccard(a: str, b: str) -> float:
    """Set Jaccard over the shared tokenizer's output; two empty sets score 0."""
    ta, tb = set(tokenize(a)), set(tokenize(b))
    union = ta | tb
    if not union:
        return 0.0
    return len(ta & tb) / len(union)


def match_profiles(
    pros: Sequence[ProfileRecord],
    socials: Sequence[ProfileRecord],
    candidates: Mapping[str, Sequence[str]],
    threshold: float = 0.5,
) -> list[MatchResult]:
    """Score every candidate pair; accept at most the best match per
    professional record, and only when its score reaches the threshold.

    Score ties between candidates go to the lexicographically smallest
    social id.  Results are ordered by (professional_id, social_id).
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be within [0, 1]")
    pro_by_id = {p.record_id: p for p in pros}
    social_by_id = {s.record_id: s for s in socials}
    results: list[MatchResult] = []
    for pro_id in sorted(candidates):
        if pro_id not in pro_by_id:
            raise ValueError(f"unknown professional id: {pro_id}")
        pro = pro_by_id[pro_id]
        scored: list[tuple[str, float]] = []
        for social_id in dict.fromkeys(candidates[pro_id]):
            if social_id not in social_by_id:
                raise ValueError(f"unknown social id: {social_id}")
            scored.append((social_id, jaccard(pro.description, social_by_id[social_id].description)))
        best_id = None
        best_score = -1.0
        for social_id, score in sorted(scored):
            if score > best_score:
                best_id, best_score = social_id, score
        for social_id, score in sorted(scored):
            accepted = social_id == best_id and score >= threshold
            results.append(MatchResult(pro_id, social_id, score, accepted))
    return results


def read_profiles(path: str, source: Source) -> list[ProfileRecord]:
    """JSONL: {"record_id": ..., "name": ..., "description": ...} per line."""
    records: list[ProfileRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            if not isinstance(row, dict):
                raise ValueError(f"{path}:{lineno}: expected an object")
            record_id = row.get("record_id")
            if not isinstance(record_id, str) or not record_id:
                raise ValueError(f"{path}:{lineno}: missing record_id")
            if record_id in seen:
                raise ValueError(f"{path}:{lineno}: duplicate record_id {record_id!r}")
            seen.add(record_id)
            name = row.get("name", "")
            description = row.get("description", "")
            if not isinstance(name, str) or not isinstance(description, str):
                raise ValueError(f"{path}:{lineno}: name and description must be strings")
            records.append(ProfileRecord(record_id, source, name, description))
    return records


def read_candidates(path: str) -> dict[str, list[str]]:
    """JSONL: {"professional_id": ..., "social_ids": [...]} per line."""
    out: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            if not isinstance(row, dict):
                raise ValueError(f"{path}:{lineno}: expected an object")
            pro_id = row.get("professional_id")
            ids = row.get("social_ids")
            if not isinstance(pro_id, str) or not pro_id:
                raise ValueError(f"{path}:{lineno}: missing professional_id")
            if pro_id in out:
                raise ValueError(f"{path}:{lineno}: duplicate professional_id {pro_id!r}")
            if not isinstance(ids, list) or not all(isinstance(s, str) and s for s in ids):
                raise ValueError(f"{path}:{lineno}: social_ids must be a list of ids")
            out[pro_id] = list(ids)
    return out


def write_matches(results: Sequence[MatchResult], path: str) -> None:
    """CSV with a header row; scores fixed at 6 decimal places."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["professional_id", "social_id", "score", "accepted"])
        for r in results:
            writer.writerow([r.professional_id, r.social_id, f"{r.score:.6f}", str(r.accepted).lower()])
