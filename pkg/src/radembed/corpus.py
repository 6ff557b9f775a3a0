"""Report data model, JSONL storage and corpus statistics."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence


class CorpusError(ValueError):
    """Raised for malformed or inconsistent corpus data."""


class ParseError(CorpusError):
    def __init__(self, path, lineno: int, msg: str):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.lineno = lineno


VALID_LABELS = frozenset({1, 2, 3, 4, 5})


@dataclass(frozen=True)
class Report:
    id: str
    text: str
    label: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise CorpusError(f"report id must be a non-empty string, got {self.id!r}")
        if not isinstance(self.text, str):
            raise CorpusError(f"report {self.id}: text must be a string")
        if self.label is not None:
            if isinstance(self.label, bool) or self.label not in VALID_LABELS:
                raise CorpusError(f"report {self.id}: label {self.label!r} not in 1..5")

    def to_json(self) -> str:
        obj = {"id": self.id, "text": self.text}
        if self.label is not None:
            obj["label"] = self.label
        return json.dumps(obj, ensure_ascii=False)


@dataclass(frozen=True)
class CondensedReport:
    id: str
    tokens: tuple
    label: Optional[int] = None
    degenerate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        for tok in self.tokens:
            if not tok or any(c.isspace() for c in tok):
                raise CorpusError(f"report {self.id}: invalid token {tok!r}")
        if not self.tokens and not self.degenerate:
            raise CorpusError(f"report {self.id}: empty token list must be flagged degenerate")

    @classmethod
    def build(cls, id: str, tokens: Sequence[str], label: Optional[int] = None) -> "CondensedReport":
        tokens = tuple(tokens)
        return cls(id, tokens, label, degenerate=not tokens)

    def to_json(self) -> str:
        obj = {"id": self.id, "tokens": list(self.tokens)}
        if self.label is not None:
            obj["label"] = self.label
        return json.dumps(obj, ensure_ascii=False)


@dataclass(frozen=True)
class CorpusStats:
    report_count: int
    mean_tokens_raw: float
    mean_tokens_condensed: float
    reduction_ratio: float = field(default=float("nan"))

    def to_dict(self) -> dict:
        return {
            "report_count": self.report_count,
            "mean_tokens_raw": self.mean_tokens_raw,
            "mean_tokens_condensed": self.mean_tokens_condensed,
            "reduction_ratio": self.reduction_ratio,
        }


def _check_unique(ids: Iterable[str]) -> None:
    seen = set()
    for i in ids:
        if i in seen:
            raise CorpusError(f"duplicate report id {i!r}")
        seen.add(i)


def _read_jsonl(path):
    with open(path, encoding="utf-8", newline="\n") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, lineno, f"invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise ParseError(path, lineno, "expected a JSON object")
            yield lineno, obj


def load_reports(path) -> list[Report]:
    """Read ``reports.jsonl``; one ``{"id", "text", "label"?}`` object per line.

    Raises ``ParseError`` (with the line number) for malformed lines and
    ``CorpusError`` for invalid labels or duplicate ids.
    """
    reports = []
    seen = set()
    for lineno, obj in _read_jsonl(path):
        missing = {"id", "text"} - obj.keys()
        if missing:
            raise ParseError(path, lineno, f"missing field(s) {sorted(missing)}")
        try:
            rep = Report(obj["id"], obj["text"], obj.get("label"))
        except CorpusError as exc:
            raise CorpusError(f"{path}:{lineno}: {exc}") from None
        if rep.id in seen:
            raise CorpusError(f"{path}:{lineno}: duplicate report id {rep.id!r}")
        seen.add(rep.id)
        reports.append(rep)
    return reports


def save_reports(reports: Sequence[Report], path) -> None:
    _check_unique(r.id for r in reports)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in reports:
            fh.write(r.to_json())
            fh.write("\n")


def load_condensed(path) -> list[CondensedReport]:
    out = []
    seen = set()
    for lineno, obj in _read_jsonl(path):
        if "id" not in obj or "tokens" not in obj:
            raise ParseError(path, lineno, "expected fields id and tokens")
        if obj["id"] in seen:
            raise CorpusError(f"{path}:{lineno}: duplicate report id {obj['id']!r}")
        seen.add(obj["id"])
        out.append(CondensedReport.build(obj["id"], obj["tokens"], obj.get("label")))
    return out


def save_condensed(reports: Sequence[CondensedReport], path) -> None:
    _check_unique(r.id for r in reports)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in reports:
            fh.write(r.to_json())
            fh.write("\n")


def raw_token_count(text: str) -> int:
    # str.split() with no argument splits on any Unicode whitespace
    return len(text.split())


def corpus_stats(raw: Sequence[Report], condensed: Sequence[CondensedReport]) -> CorpusStats:
    if not raw or not condensed:
        raise CorpusError("corpus_stats needs non-empty corpora")
    raw_ids = {r.id for r in raw}
    cond_ids = {c.id for c in condensed}
    if raw_ids != cond_ids or len(raw_ids) != len(raw) or len(cond_ids) != len(condensed):
        raise CorpusError("raw and condensed corpora must share the same id set")
    # fsum keeps the means independent of report order
    mean_raw = math.fsum(raw_token_count(r.text) for r in raw) / len(raw)
    mean_cond = math.fsum(len(c.tokens) for c in condensed) / len(condensed)
    ratio = mean_raw / mean_cond if mean_cond > 0 else float("nan")
    return CorpusStats(len(raw), mean_raw, mean_cond, ratio)

