"""``leap run|ablate|replay|lexicon|export`` command-line front end."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path

from leap import __version__
from leap.campaign import run_campaign
from leap.dataset import DatasetError, load_dataset
from leap.lexicon import (
    LexiconParseError,
    SynonymLexicon,
    default_lexicon,
    default_stopwords,
    load_stopwords,
    load_wordnet,
)
from leap.metrics import export_training_set, read_report, replay, write_report
from leap.search import SearchConfig
from leap.text import tokenize
from leap.victim import VictimError, parse_victim_spec

log = logging.getLogger("leap")

# flag dest -> config-file key
_FLAG_KEYS = {
    "dataset": "dataset",
    "victim": "victim",
    "out": "out",
    "seed": "seed",
    "sample": "sample",
    "workers": "workers",
    "lexicon": "lexicon",
    "wordnet": "wordnet",
    "stopwords": "stopwords",
    "init": "init_mode",
    "inertia": "inertia_mode",
    "mutation": "mutation_mode",
    "repeats": "repeats",
}
_CAMPAIGN_KEYS = {"dataset", "victim", "out", "sample", "workers", "lexicon", "wordnet", "stopwords", "repeats"}

ABLATION_VARIANTS = (
    ("w/o levy,adaptive,greedy", {"init_mode": "brownian", "inertia_mode": "linear", "mutation_mode": "off"}),
    ("w/o adaptive,greedy", {"init_mode": "levy", "inertia_mode": "linear", "mutation_mode": "off"}),
    ("w/o greedy", {"init_mode": "levy", "inertia_mode": "adaptive", "mutation_mode": "off"}),
    ("LEAP", {"init_mode": "levy", "inertia_mode": "adaptive", "mutation_mode": "greedy"}),
)


class UsageError(Exception):
    pass


def bundled(name: str) -> str:
    return str(resources.files("leap") / "data" / name)


def load_settings(args) -> dict:
    settings = {}
    if getattr(args, "config", None):
        try:
            settings = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(settings, dict):
            raise UsageError("config must be a JSON object")
        aliases = {"init": "init_mode", "inertia": "inertia_mode", "mutation": "mutation_mode"}
        settings = {aliases.get(k, k): v for k, v in settings.items()}
    for dest, key in _FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            settings[key] = value
    return settings


def search_config(settings: dict) -> SearchConfig:
    try:
        return SearchConfig.from_dict({k: v for k, v in settings.items() if k not in _CAMPAIGN_KEYS})
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad search config: {exc}") from None


def resources_for(settings: dict):
    try:
        if settings.get("wordnet"):
            lex = load_wordnet(settings["wordnet"])
        elif settings.get("lexicon"):
            lex = SynonymLexicon.load(settings["lexicon"])
        else:
            lex = default_lexicon()
        stops = load_stopwords(settings["stopwords"]) if settings.get("stopwords") else default_stopwords()
        victim = parse_victim_spec(settings.get("victim") or f"keyword:{bundled('keyword_weights.json')}")
        dataset = load_dataset(settings.get("dataset") or bundled("minicorpus.csv"))
    except (OSError, ValueError, LexiconParseError) as exc:
        raise UsageError(str(exc)) from None
    return lex, stops, victim, dataset


def cmd_run(args) -> int:
    settings = load_settings(args)
    cfg = search_config(settings)
    lex, stops, victim, dataset = resources_for(settings)
    try:
        indices = dataset.sample(settings.get("sample"), cfg.seed)
    except DatasetError as exc:
        raise UsageError(str(exc)) from None
    out = settings.get("out")
    if not out:
        raise UsageError("--out is required")
    outcome = run_campaign(dataset, indices, victim, lex, stops, cfg, workers=int(settings.get("workers", 1)))
    write_report(outcome.report, out)
    print(json.dumps(outcome.report.summary(), indent=1))
    return 0


def cmd_ablate(args) -> int:
    settings = load_settings(args)
    base = search_config(settings)
    lex, stops, victim, dataset = resources_for(settings)
    try:
        indices = dataset.sample(settings.get("sample"), base.seed)
    except DatasetError as exc:
        raise UsageError(str(exc)) from None
    repeats = int(settings.get("repeats", 1))
    workers = int(settings.get("workers", 1))
    rows = []
    for name, overrides in ABLATION_VARIANTS:
        reports = []
        for r in range(repeats):
            cfg = SearchConfig.from_dict({**base.to_dict(), **overrides, "seed": base.seed + r})
            reports.append(run_campaign(dataset, indices, victim, lex, stops, cfg, workers=workers).report)
        rows.append(summarize_variant(name, reports))
    print(format_table(rows))
    if settings.get("out"):
        Path(settings["out"]).write_text(json.dumps(rows, indent=1) + "\n", encoding="utf-8")
    return 0


def _avg(values):
    values = [v for v in values if v is not None]
    return sum(values) / len(values) if values else None


def summarize_variant(name, reports) -> dict:
    return {
        "variant": name,
        "s_rate": _avg(r.s_rate for r in reports),
        "c_rate": _avg(r.mean_c_rate for r in reports),
        "time_per_success": _avg(r.mean_time_per_success for r in reports),
        "queries": _avg(r.mean_queries for r in reports),
        "runs": len(reports),
    }


def format_table(rows) -> str:
    def f(v, spec):
        return format(v, spec) if v is not None else "-"

    lines = [f"{'variant':<28}{'S-rate':>8}{'C-rate':>8}{'T-O(s)':>10}{'Q-N':>9}"]
    for r in rows:
        lines.append(
            f"{r['variant']:<28}{f(r['s_rate'], '.3f'):>8}{f(r['c_rate'], '.3f'):>8}"
            f"{f(r['time_per_success'], '.4f'):>10}{f(r['queries'], '.1f'):>9}"
        )
    return "\n".join(lines)


def cmd_replay(args) -> int:
    try:
        report = read_report(args.report)
        victim = parse_victim_spec(args.victim)
        result = replay(report, victim)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    print(json.dumps({"transfer_rate": result.rate, "transferred": result.transferred,
                      "evaluated": result.evaluated, "records": list(result.details)}, indent=1))
    return 0


def cmd_lexicon(args) -> int:
    data_dir = args.wordnet or args.data_dir
    if not data_dir:
        raise UsageError("a WordNet data directory is required")
    try:
        lex = load_wordnet(data_dir)
        if args.dataset:
            vocab = {w for text, _ in load_dataset(args.dataset).rows for w in tokenize(text).words}
            lex = lex.restrict(vocab)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    lex.save(args.out)
    print(f"wrote {len(lex)} entries (WordNet {lex.source_version}) to {args.out}")
    return 0


def cmd_export(args) -> int:
    try:
        report = read_report(args.report)
        corpus = load_dataset(args.dataset).rows
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    n = export_training_set(report, corpus, args.out)
    print(f"appended {n} adversarial rows to {len(corpus)} corpus rows in {args.out}")
    return 0


def _campaign_flags(p):
    p.add_argument("--config", help="JSON file; keys mirror the search config and these flags")
    p.add_argument("--dataset", help="CSV with a text,label header (default: bundled mini-corpus)")
    p.add_argument("--victim", help="keyword:<weights.json> | nb:<corpus.csv> | http:<url>")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--sample", type=int, help="number of rows to sample with the campaign seed")
    p.add_argument("--workers", type=int)
    p.add_argument("--lexicon", help="lexicon JSON written by `leap lexicon`")
    p.add_argument("--wordnet", help="WordNet data directory (overrides --lexicon)")
    p.add_argument("--stopwords")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leap", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a campaign and write a JSONL report")
    _campaign_flags(p)
    p.add_argument("--init", choices=["levy", "brownian"])
    p.add_argument("--inertia", choices=["adaptive", "linear"])
    p.add_argument("--mutation", choices=["greedy", "off"])
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("ablate", help="compare the four ablation variants")
    _campaign_flags(p)
    p.add_argument("--repeats", type=int, help="number of consecutive search seeds per variant")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("replay", help="replay a report's adversarial texts on another victim")
    p.add_argument("--report", required=True)
    p.add_argument("--victim", required=True)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("lexicon", help="build a synonym lexicon from WordNet data files")
    p.add_argument("data_dir", nargs="?")
    p.add_argument("--wordnet")
    p.add_argument("--dataset", help="restrict entries to this dataset's vocabulary")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lexicon)

    p = sub.add_parser("export", help="append adversarial texts to a training corpus")
    p.add_argument("--report", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"leap: error: {exc}", file=sys.stderr)
        return 2
    except VictimError as exc:
        print(f"leap: victim error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
