"""WordNet synonym lexicon and stopword list."""
from __future__ import annotations

import json
import re
from collections import defaultdict
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from leap.text import is_single_word

POS_FILES = ("noun", "verb", "adj", "adv")
_VERSION_RE = re.compile(r"WordNet (\d+(?:\.\d+)*)")
# adjective syntactic markers, e.g. "galore(ip)"
_MARKER_RE = re.compile(r"\((?:a|p|ip)\)$")


class LexiconParseError(ValueError):
    def __init__(self, path, line: int | None, message: str):
        self.path = Path(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else str(self.path)
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class SynonymLexicon:
    entries: Mapping[str, tuple[str, ...]]
    source_version: str = "unknown"

    def __len__(self) -> int:
        return len(self.entries)

    def restrict(self, vocabulary: Iterable[str]) -> SynonymLexicon:
        vocab = {w.lower() for w in vocabulary}
        return SynonymLexicon(
            {w: syns for w, syns in self.entries.items() if w in vocab and syns}, self.source_version
        )

    def to_json(self) -> dict:
        return {"source_version": self.source_version, "entries": {w: list(s) for w, s in sorted(self.entries.items())}}

    @classmethod
    def from_json(cls, obj: dict) -> SynonymLexicon:
        return cls({w: tuple(s) for w, s in obj["entries"].items()}, obj.get("source_version", "unknown"))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=0, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> SynonymLexicon:
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def synonyms(lex: SynonymLexicon, word: str) -> list[str]:
    return list(lex.entries.get(word.lower(), ()))


def _parse_data_file(path: Path) -> tuple[str | None, list[list[str]]]:
    """Return the release tag and the lemma list of every synset in a ``data.*`` file."""
    version = None
    records = []
    offset = 0
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, start=1):
            # offsets count LF line ends; CRLF copies of the database are accepted
            start, offset = offset, offset + len(raw.rstrip(b"\r\n")) + 1
            try:
                line = raw.decode("utf-8").rstrip("\r\n")
            except UnicodeDecodeError as exc:
                raise LexiconParseError(path, lineno, f"not valid UTF-8 ({exc.reason})") from None
            if line.startswith("  "):
                if version is None and (m := _VERSION_RE.search(line)):
                    version = m.group(1)
                continue
            if not line.strip():
                continue
            fields = line.split(" ")
            try:
                synset_offset = int(fields[0])
                w_cnt = int(fields[3], 16)
                words = [fields[4 + 2 * i] for i in range(w_cnt)]
                for i in range(w_cnt):
                    int(fields[5 + 2 * i], 16)
            except (IndexError, ValueError) as exc:
                raise LexiconParseError(path, lineno, f"malformed synset record ({exc})") from None
            if synset_offset != start:
                raise LexiconParseError(path, lineno, f"synset offset {synset_offset} does not match byte offset {start}")
            records.append([_MARKER_RE.sub("", w).lower() for w in words])
    return version, records


def load_wordnet(data_dir) -> SynonymLexicon:
    """Merge the synsets of all four part-of-speech data files into one lexicon."""
    data_dir = Path(data_dir)
    groups: dict[str, set[str]] = defaultdict(set)
    version = None
    for pos in POS_FILES:
        path = data_dir / f"data.{pos}"
        if not path.is_file():
            raise LexiconParseError(path, None, "missing WordNet data file")
        file_version, records = _parse_data_file(path)
        version = version or file_version
        for record in records:
            members = {w for w in record if is_single_word(w)}
            for w in members:
                groups[w].update(members)
    entries = {w: tuple(sorted(members - {w})) for w, members in groups.items() if len(members) > 1}
    return SynonymLexicon(entries, version or "unknown")


@dataclass(frozen=True)
class StopwordList:
    words: frozenset[str] = field(default_factory=frozenset)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.words

    def __len__(self) -> int:
        return len(self.words)


def load_stopwords(path) -> StopwordList:
    text = Path(path).read_text(encoding="utf-8")
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    if not words:
        raise ValueError(f"{path}: empty stopword list")
    return StopwordList(frozenset(words))


def default_stopwords() -> StopwordList:
    with resources.as_file(resources.files("leap") / "data" / "stopwords.txt") as p:
        return load_stopwords(p)


def default_lexicon() -> SynonymLexicon:
    """The bundled lexicon: WordNet 3.0 restricted to the mini-corpus vocabulary."""
    with resources.as_file(resources.files("leap") / "data" / "lexicon.json") as p:
        return SynonymLexicon.load(p)
