"""Black-box victim classifiers with query accounting."""
from __future__ import annotations

import json
import math
import threading
import time
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from leap import kernels
from leap.text import word_list


class VictimError(RuntimeError):
    pass


class VictimTransportError(VictimError):
    """A victim could not be reached; ``attempts`` requests were made."""

    def __init__(self, message: str, attempts: int):
        super().__init__(f"{message} (after {attempts} attempt{'s' if attempts != 1 else ''})")
        self.attempts = attempts


@dataclass(frozen=True)
class Prediction:
    probabilities: tuple[float, ...]

    def __post_init__(self):
        p = self.probabilities
        if not p:
            raise ValueError("empty probability vector")
        if any(not math.isfinite(x) or x < 0 for x in p):
            raise ValueError(f"invalid probabilities {p}")
        if abs(math.fsum(p) - 1.0) > 1e-6:
            raise ValueError(f"probabilities sum to {math.fsum(p)}, not 1")

    @classmethod
    def from_array(cls, arr) -> Prediction:
        return cls(tuple(float(x) for x in arr))

    @property
    def label_count(self) -> int:
        return len(self.probabilities)

    @property
    def label(self) -> int:
        # list.index finds the first maximum, so ties go to the lowest class index
        return self.probabilities.index(max(self.probabilities))


def fitness(pred: Prediction, original_label: int) -> float:
    if not 0 <= original_label < pred.label_count:
        raise ValueError(f"label {original_label} out of range for {pred.label_count} classes")
    return 1.0 - pred.probabilities[original_label]


def is_adversarial(pred: Prediction, original_label: int) -> bool:
    return pred.label != original_label


class QueryLedger:
    """Thread-safe query counter, with optional attribution to an example id."""

    def __init__(self):
        self._lock = threading.Lock()
        self.total_queries = 0
        self.per_example_queries: Counter = Counter()

    def add(self, n: int, example=None) -> None:
        with self._lock:
            self.total_queries += n
            if example is not None:
                self.per_example_queries[example] += n

    def reset(self) -> None:
        with self._lock:
            self.total_queries = 0
            self.per_example_queries.clear()


class VictimModel:
    """Base class; subclasses implement :meth:`_probabilities` for a batch."""

    label_count: int

    def __init__(self):
        self.ledger = QueryLedger()

    def _probabilities(self, texts: Sequence[str]) -> list:
        raise NotImplementedError

    def predict(self, text: str, *, example=None) -> Prediction:
        return self.predict_batch([text], example=example)[0]

    def predict_batch(self, texts: Sequence[str], *, example=None) -> list[Prediction]:
        texts = list(texts)
        if not texts:
            return []
        rows = self._probabilities(texts)
        if len(rows) != len(texts):
            raise VictimError(f"victim returned {len(rows)} rows for {len(texts)} texts")
        self.ledger.add(len(texts), example)
        return [Prediction.from_array(r) for r in rows]


class _LinearVictim(VictimModel):
    """Softmax over per-class scores that add up across word tokens."""

    def __init__(self, vocab: Mapping[str, int], weights: np.ndarray, bias: np.ndarray | None = None):
        super().__init__()
        self.vocab = dict(vocab)
        self.weights = np.ascontiguousarray(weights, dtype=np.float64)
        self.label_count = self.weights.shape[1]
        self.bias = np.zeros(self.label_count) if bias is None else np.asarray(bias, dtype=np.float64)

    def scores(self, text: str) -> np.ndarray:
        idx = np.array([self.vocab.get(w, -1) for w in word_list(text)], dtype=np.int64)
        out = np.empty(self.label_count)
        kernels.linear_scores(self.weights, idx, out)
        return out + self.bias

    def _probabilities(self, texts):
        rows = []
        for t in texts:
            p = np.empty(self.label_count)
            kernels.softmax(self.scores(t), p)
            rows.append(p)
        return rows


class KeywordVictim(_LinearVictim):
    pass


def keyword_victim(weights: Mapping[str, Sequence[float]]) -> KeywordVictim:
    """Class scores are the summed weight vectors of the text's word tokens."""
    if not weights:
        raise ValueError("keyword victim needs at least one weighted word")
    words = sorted(weights)
    sizes = {len(weights[w]) for w in words}
    if len(sizes) != 1:
        raise ValueError("all weight vectors must have the same length")
    matrix = np.array([weights[w] for w in words], dtype=np.float64)
    return KeywordVictim({w.lower(): i for i, w in enumerate(words)}, matrix)


def load_keyword_victim(path) -> KeywordVictim:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    return keyword_victim(obj.get("weights", obj))


class NaiveBayesVictim(_LinearVictim):
    pass


def naive_bayes_train(corpus: Iterable[tuple[str, int]]) -> NaiveBayesVictim:
    """Multinomial naive Bayes with add-one smoothing; unseen words are ignored."""
    class_docs: Counter = Counter()
    counts: dict[int, Counter] = {}
    for text, label in corpus:
        class_docs[label] += 1
        counts.setdefault(label, Counter()).update(word_list(text))
    if not class_docs:
        raise ValueError("empty training corpus")
    n_classes = max(class_docs) + 1
    vocab_words = sorted(set().union(*counts.values()))
    vocab = {w: i for i, w in enumerate(vocab_words)}
    loglik = np.zeros((len(vocab_words), n_classes))
    prior = np.full(n_classes, -np.inf)
    total_docs = sum(class_docs.values())
    for k in range(n_classes):
        c = counts.get(k, Counter())
        denom = sum(c.values()) + len(vocab_words)
        loglik[:, k] = [math.log((c[w] + 1) / denom) for w in vocab_words]
        if class_docs[k]:
            prior[k] = math.log(class_docs[k] / total_docs)
    # classes absent from the corpus get probability zero
    prior = np.where(np.isfinite(prior), prior, -1e300)
    return NaiveBayesVictim(vocab, loglik, prior)


class ConstantVictim(VictimModel):
    """Always returns the same probability vector."""

    def __init__(self, probabilities: Sequence[float]):
        super().__init__()
        self.probabilities = tuple(float(p) for p in probabilities)
        self.label_count = len(self.probabilities)

    def _probabilities(self, texts):
        return [self.probabilities for _ in texts]


class HttpVictim(VictimModel):
    """Client for ``POST {endpoint}/predict`` with ``{"texts": [...]}``."""

    def __init__(
        self,
        endpoint: str,
        timeout: float = 30.0,
        *,
        max_attempts: int = 4,
        backoff: float = 0.25,
        max_backoff: float = 8.0,
        concurrency: int = 4,
        session=None,
    ):
        super().__init__()
        import requests

        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff = backoff
        self.max_backoff = max_backoff
        self._requests = requests
        self._session = session or requests.Session()
        self._slots = threading.BoundedSemaphore(concurrency)
        self.label_count = 0

    def _post(self, texts):
        url = f"{self.endpoint}/predict"
        last = "no attempt made"
        for attempt in range(1, self.max_attempts + 1):
            try:
                with self._slots:
                    resp = self._session.post(url, json={"texts": list(texts)}, timeout=self.timeout)
            except self._requests.RequestException as exc:
                last = f"{type(exc).__name__}: {exc}"
            else:
                if resp.status_code == 200:
                    return resp.json()
                last = f"HTTP {resp.status_code}"
                if 400 <= resp.status_code < 500:
                    raise VictimTransportError(f"{url}: {last}", attempt)
            if attempt < self.max_attempts:
                time.sleep(min(self.max_backoff, self.backoff * 2 ** (attempt - 1)))
        raise VictimTransportError(f"{url}: {last}", self.max_attempts)

    def _probabilities(self, texts):
        body = self._post(texts)
        try:
            rows = body["probabilities"]
        except (KeyError, TypeError):
            raise VictimError("response has no 'probabilities' field") from None
        if rows:
            self.label_count = len(rows[0])
        return rows


def http_victim(endpoint: str, timeout: float = 30.0, **kwargs) -> HttpVictim:
    return HttpVictim(endpoint, timeout, **kwargs)


def parse_victim_spec(spec: str) -> VictimModel:
    """``keyword:<weights.json>`` | ``nb:<corpus.csv>`` | ``http:<url>``."""
    kind, sep, arg = spec.partition(":")
    if kind in ("http", "https") and arg.startswith("//"):
        return http_victim(spec)
    if not sep or not arg:
        raise ValueError(f"bad victim spec {spec!r}; expected keyword:<file>, nb:<file> or http:<url>")
    if kind == "keyword":
        return load_keyword_victim(arg)
    if kind == "nb":
        from leap.dataset import load_dataset

        return naive_bayes_train(load_dataset(arg).rows)
    if kind == "http":
        return http_victim(arg)
    raise ValueError(f"unknown victim kind {kind!r}")


class CountingVictim(VictimModel):
    """Wraps another victim and counts every text it forwards."""

    def __init__(self, inner: VictimModel):
        super().__init__()
        self.inner = inner
        self.count = 0
        self._lock = threading.Lock()

    @property
    def label_count(self):
        return self.inner.label_count

    def _probabilities(self, texts):
        with self._lock:
            self.count += len(texts)
        return [p.probabilities for p in self.inner.predict_batch(texts)]
