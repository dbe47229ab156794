"""CSV datasets with a ``text,label`` header."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Dataset:
    rows: tuple[tuple[str, int], ...]
    class_count: int

    def __len__(self) -> int:
        return len(self.rows)

    def sample(self, n: int | None, seed: int) -> list[int]:
        """Row indices of a seeded sample without replacement, in ascending order."""
        if n is None:
            return list(range(len(self.rows)))
        if n > len(self.rows):
            raise DatasetError(f"sample exceeds dataset ({n} > {len(self.rows)} rows)")
        if n < 1:
            raise DatasetError("sample size must be positive")
        picked = np.random.default_rng(seed).choice(len(self.rows), size=n, replace=False)
        return sorted(int(i) for i in picked)


def load_dataset(path) -> Dataset:
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"{path}: {exc.strerror}") from None
    rows = []
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"text", "label"} <= set(reader.fieldnames):
            raise DatasetError(f"{path}: expected a header with 'text' and 'label' columns")
        for lineno, rec in enumerate(reader, start=2):
            text = rec["text"] or ""
            if not text.strip():
                raise DatasetError(f"{path}:{lineno}: empty text")
            try:
                label = int(rec["label"])
            except (TypeError, ValueError):
                raise DatasetError(f"{path}:{lineno}: label {rec['label']!r} is not an integer") from None
            if label < 0:
                raise DatasetError(f"{path}:{lineno}: negative label")
            rows.append((text, label))
    if not rows:
        raise DatasetError(f"{path}: no rows")
    return Dataset(tuple(rows), max(label for _, label in rows) + 1)


def write_dataset(path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["text", "label"])
        for text, label in rows:
            w.writerow([text, label])
