"""Campaign aggregation, report files and transferability replay.

A report file is JSON Lines: one record per example in index order, then a
trailing ``{"summary": ...}`` object. Wall-clock fields are nondeterministic,
so they live in a sidecar ``<report>.timing.json`` and the main file stays
byte-identical across reruns.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from leap.dataset import write_dataset
from leap.victim import VictimError, VictimModel

SUCCESS, EXHAUSTED, SKIPPED = "success", "budget_exhausted", "skipped"
_TIMING_FIELDS = ("elapsed",)


@dataclass(frozen=True)
class ExampleRecord:
    index: int
    original_text: str
    original_label: int
    status: str
    adversarial_text: str | None
    change_rate: float | None
    queries: int
    elapsed: float
    iterations: int
    replacements: tuple = ()

    def to_json(self) -> dict:
        d = asdict(self)
        d["replacements"] = [list(r) for r in self.replacements]
        return d

    @classmethod
    def from_json(cls, d: dict) -> ExampleRecord:
        d = dict(d)
        d.setdefault("elapsed", 0.0)
        d["replacements"] = tuple(tuple(r) for r in d.get("replacements", ()))
        return cls(**d)


@dataclass(frozen=True)
class CampaignReport:
    records: tuple[ExampleRecord, ...]
    s_rate: float
    mean_c_rate: float | None
    mean_queries: float
    mean_time_per_success: float | None
    skipped_count: int
    attempted: int
    successes: int
    total_time: float
    extra: dict = field(default_factory=dict, compare=False)

    def summary(self, timing: bool = True) -> dict:
        d = {
            "attempted": self.attempted,
            "successes": self.successes,
            "skipped_count": self.skipped_count,
            "s_rate": self.s_rate,
            "mean_c_rate": self.mean_c_rate,
            "mean_queries": self.mean_queries,
        }
        if timing:
            d["mean_time_per_success"] = self.mean_time_per_success
            d["total_time"] = self.total_time
        d.update(self.extra)
        return d


def _mean(values) -> float | None:
    values = list(values)
    return math.fsum(values) / len(values) if values else None


def aggregate(records: Iterable[ExampleRecord], **extra) -> CampaignReport:
    """Success rate over attempted examples; change rate and time over successes only."""
    records = tuple(sorted(records, key=lambda r: r.index))
    attempted = [r for r in records if r.status != SKIPPED]
    if not attempted:
        raise ValueError("no attempted examples to aggregate")
    wins = [r for r in attempted if r.status == SUCCESS]
    return CampaignReport(
        records=records,
        s_rate=len(wins) / len(attempted),
        mean_c_rate=_mean(r.change_rate for r in wins),
        mean_queries=_mean(r.queries for r in attempted),
        mean_time_per_success=_mean(r.elapsed for r in wins),
        skipped_count=len(records) - len(attempted),
        attempted=len(attempted),
        successes=len(wins),
        total_time=math.fsum(r.elapsed for r in records),
        extra=dict(extra),
    )


def timing_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".timing.json")


def dumps_records(report: CampaignReport) -> str:
    lines = []
    for r in report.records:
        d = r.to_json()
        for k in _TIMING_FIELDS:
            d.pop(k)
        lines.append(json.dumps(d, sort_keys=True, ensure_ascii=False))
    lines.append(json.dumps({"summary": report.summary(timing=False)}, sort_keys=True))
    return "\n".join(lines) + "\n"


def write_report(report: CampaignReport, path) -> None:
    path = Path(path)
    path.write_text(dumps_records(report), encoding="utf-8")
    timing = {
        "elapsed": {str(r.index): r.elapsed for r in report.records},
        "mean_time_per_success": report.mean_time_per_success,
        "total_time": report.total_time,
    }
    timing_path(path).write_text(json.dumps(timing, indent=1) + "\n", encoding="utf-8")


def read_report(path) -> CampaignReport:
    path = Path(path)
    records = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        obj = json.loads(line)
        if "summary" in obj:
            continue
        try:
            records.append(ExampleRecord.from_json(obj))
        except TypeError as exc:
            raise ValueError(f"{path}:{lineno}: bad record ({exc})") from None
    tp = timing_path(path)
    if tp.is_file():
        elapsed = json.loads(tp.read_text(encoding="utf-8")).get("elapsed", {})
        records = [
            ExampleRecord(**{**asdict(r), "elapsed": float(elapsed.get(str(r.index), r.elapsed))}) for r in records
        ]
    return aggregate(records)


@dataclass(frozen=True)
class TransferResult:
    rate: float | None
    transferred: int
    evaluated: int
    details: tuple[dict, ...]


def replay(report: CampaignReport, other_victim: VictimModel) -> TransferResult:
    """Re-predict each successful adversarial text on another victim."""
    wins = [r for r in report.records if r.status == SUCCESS and r.adversarial_text is not None]
    if not wins:
        raise ValueError("report contains no successful adversarial texts")
    details = []
    for r in wins:
        try:
            pred = other_victim.predict(r.adversarial_text)
        except VictimError as exc:
            details.append({"index": r.index, "error": str(exc)})
            continue
        details.append(
            {"index": r.index, "predicted": pred.label, "original_label": r.original_label,
             "transferred": pred.label != r.original_label}
        )
    ok = [d for d in details if "error" not in d]
    hits = sum(d["transferred"] for d in ok)
    return TransferResult(hits / len(ok) if ok else None, hits, len(ok), tuple(details))


def export_training_set(report: CampaignReport, original_corpus: Sequence[tuple[str, int]], path) -> int:
    """Write the corpus followed by every adversarial text with its original label."""
    extra = [(r.adversarial_text, r.original_label) for r in report.records if r.status == SUCCESS]
    write_dataset(path, list(original_corpus) + extra)
    return len(extra)


class HttpPerplexityScorer:
    """Optional external fluency scorer: ``POST {endpoint}/ppl`` -> ``{"ppl": [...]}``.

    No language model ships with the package; this only speaks the wire format.
    """

    def __init__(self, endpoint: str, timeout: float = 30.0, session=None):
        import requests

        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self._session = session or requests.Session()

    def score(self, texts: Sequence[str]) -> list[float]:
        resp = self._session.post(f"{self.endpoint}/ppl", json={"texts": list(texts)}, timeout=self.timeout)
        if resp.status_code != 200:
            raise VictimError(f"perplexity scorer returned HTTP {resp.status_code}")
        values = resp.json()["ppl"]
        if len(values) != len(texts):
            raise VictimError("perplexity scorer returned the wrong number of values")
        return [float(v) for v in values]
