"""Run the search over many dataset rows with a bounded worker pool."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from leap import search
from leap.dataset import Dataset
from leap.lexicon import StopwordList, SynonymLexicon
from leap.metrics import CampaignReport, ExampleRecord, aggregate
from leap.search import SearchConfig, SearchResult
from leap.text import tokenize
from leap.victim import VictimModel


@dataclass
class CampaignOutcome:
    report: CampaignReport
    results: dict[int, SearchResult]


def example_rng(seed: int, index: int) -> np.random.Generator:
    # one stream per (seed, row), independent of which worker runs it
    return np.random.default_rng([seed, index])


def record_for(index: int, text: str, label: int, res: SearchResult) -> ExampleRecord:
    adv = res.adversarial
    reps = ()
    if adv is not None:
        reps = tuple((pos, adv.base.word(pos), word) for pos, word in adv.replacements)
    return ExampleRecord(
        index=index,
        original_text=text,
        original_label=label,
        status=res.status,
        adversarial_text=res.adversarial_text,
        change_rate=res.change_rate,
        queries=res.queries,
        elapsed=res.elapsed,
        iterations=res.iterations_used,
        replacements=reps,
    )


def run_campaign(
    dataset: Dataset,
    indices,
    victim: VictimModel,
    lex: SynonymLexicon,
    stops: StopwordList,
    cfg: SearchConfig,
    workers: int = 1,
    observer=None,
) -> CampaignOutcome:
    indices = list(indices)

    def one(index):
        text, label = dataset.rows[index]
        res = search.run(
            tokenize(text), label, victim, lex, stops, cfg,
            rng=example_rng(cfg.seed, index), example=index, observer=observer,
        )
        return index, record_for(index, text, label, res), res

    if workers <= 1:
        done = [one(i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(one, indices))
    done.sort(key=lambda x: x[0])
    return CampaignOutcome(aggregate(r for _, r, _ in done), {i: res for i, _, res in done})
