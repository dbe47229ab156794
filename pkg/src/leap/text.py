"""Lossless tokenization and substitution over word positions.

Word tokens are maximal runs of letters, digits and apostrophes; every other
character run is a separator token. Positions in a :class:`CandidateText`
index *word* tokens only (0 .. n_words - 1), which is also the velocity
dimension used by the search.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

WORD_RE = re.compile(r"(?:[^\W_]|['’])+")
_SPLIT_RE = re.compile(r"((?:[^\W_]|['’])+)")


def is_single_word(s: str) -> bool:
    """True if ``s`` tokenizes to exactly one word token and nothing else."""
    return bool(s) and WORD_RE.fullmatch(s) is not None


def word_list(raw: str) -> list[str]:
    """Lowercased word tokens of ``raw``; the cheap path used by victims."""
    return [w.lower() for w in WORD_RE.findall(raw)]


def casing_of(word: str) -> str:
    letters = [c for c in word if c.isalpha()]
    if not letters:
        return "lower"
    if len(letters) > 1 and all(c.isupper() for c in letters):
        return "upper"
    if letters[0].isupper() and all(c.islower() for c in letters[1:]):
        return "title"
    return "lower"


def apply_casing(word: str, casing: str) -> str:
    if casing == "upper":
        return word.upper()
    if casing == "title":
        return word[:1].upper() + word[1:]
    return word


@dataclass(frozen=True)
class Token:
    surface: str
    is_word: bool
    casing: str


@dataclass(frozen=True)
class TokenizedText:
    raw: str
    tokens: tuple[Token, ...]
    word_index: tuple[int, ...] = field(repr=False)

    @property
    def n_words(self) -> int:
        return len(self.word_index)

    @property
    def words(self) -> list[str]:
        """Lowercased word tokens in position order."""
        return [self.tokens[i].surface.lower() for i in self.word_index]

    def word(self, position: int) -> str:
        return self.tokens[self.word_index[position]].surface


def tokenize(raw: str) -> TokenizedText:
    tokens = []
    word_index = []
    for piece in _SPLIT_RE.split(raw):
        if not piece:
            continue
        is_word = WORD_RE.fullmatch(piece) is not None
        if is_word:
            word_index.append(len(tokens))
        tokens.append(Token(piece, is_word, casing_of(piece) if is_word else "lower"))
    return TokenizedText(raw, tuple(tokens), tuple(word_index))


def detokenize(t: TokenizedText) -> str:
    return "".join(tok.surface for tok in t.tokens)


@dataclass(frozen=True)
class CandidateText:
    """A set of word substitutions over a base text.

    ``replacements`` is stored as a sorted tuple of ``(position, word)`` pairs
    so candidates are hashable and compare by value.
    """

    base: TokenizedText
    replacements: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        seen = set()
        n = self.base.n_words
        for pos, word in self.replacements:
            if not 0 <= pos < n:
                raise ValueError(f"replacement position {pos} is not a word position (n_words={n})")
            if pos in seen:
                raise ValueError(f"duplicate replacement at position {pos}")
            if word.lower() == self.base.word(pos).lower():
                raise ValueError(f"replacement {word!r} at position {pos} equals the original word")
            seen.add(pos)
        object.__setattr__(self, "replacements", tuple(sorted(self.replacements)))

    @classmethod
    def from_mapping(cls, base: TokenizedText, mapping: Mapping[int, str]) -> CandidateText:
        return cls(base, tuple(mapping.items()))

    @property
    def mapping(self) -> dict[int, str]:
        return dict(self.replacements)

    def word_at(self, position: int) -> str:
        """Lowercased word currently at ``position``."""
        return self.mapping.get(position, self.base.word(position).lower())

    def with_replacements(self, items: Iterable[tuple[int, str]]) -> CandidateText:
        m = self.mapping
        m.update(items)
        return CandidateText.from_mapping(self.base, m)


def realize(c: CandidateText) -> str:
    if not c.replacements:
        return c.base.raw
    parts = [tok.surface for tok in c.base.tokens]
    for pos, word in c.replacements:
        ti = c.base.word_index[pos]
        parts[ti] = apply_casing(word, c.base.tokens[ti].casing)
    return "".join(parts)


def change_rate(c: CandidateText) -> float:
    n = c.base.n_words
    if n == 0:
        raise ValueError("change rate undefined for a text with no word tokens")
    return len(c.replacements) / n
