"""Discrete particle swarm search for adversarial substitutions.

A particle's position is an integer code per word position: 0 keeps the
original word, ``k >= 1`` selects the k-th lexicon synonym at that position.
The swarm starts from single best-neighbor substitutions with Levy/Brownian
velocities, then alternates adaptive-inertia velocity updates, two-stage
stochastic moves toward lBest and gBest, and greedy best-neighbor mutation.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from leap import kernels
from leap.levy import LevyParams, init_velocities, levy_step, levy_steps
from leap.lexicon import StopwordList, SynonymLexicon, synonyms
from leap.text import CandidateText, TokenizedText, apply_casing, change_rate, realize
from leap.victim import Prediction, VictimModel, fitness, is_adversarial

INIT_MODES = ("levy", "brownian")
INERTIA_MODES = ("adaptive", "linear")
MUTATION_MODES = ("greedy", "off")
_GAIN_FLOOR = 1e-6
_STAT_GUARD = 1e-9
_INERTIA_ATTEMPTS = 16


@dataclass(frozen=True)
class SearchConfig:
    pop_size: int = 60
    max_iters: int = 20
    omega_min: float = 0.2
    omega_max: float = 0.8
    p1: float = 0.8
    p2: float = 0.2
    gamma: float = 1.0
    v_min: float = 0.0
    v_max: float = 1.0
    max_change_rate: float = 0.25
    levy: LevyParams = field(default_factory=LevyParams)
    init_mode: str = "levy"
    inertia_mode: str = "adaptive"
    mutation_mode: str = "greedy"
    # "constant" keeps p1/p2 fixed; "linear" swaps them over the run
    move_schedule: str = "constant"
    # "fitness" scales inertia by (fit_max - fit_min); "omega" by (omega_max - omega_min)
    inertia_scale: str = "fitness"
    seed: int = 0

    def __post_init__(self):
        if self.pop_size < 2:
            raise ValueError("pop_size must be at least 2")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")
        if not self.omega_min < self.omega_max:
            raise ValueError("omega_min must be below omega_max")
        if not (0 <= self.p1 <= 1 and 0 <= self.p2 <= 1):
            raise ValueError("move probabilities must lie in [0, 1]")
        if not 0 < self.max_change_rate <= 1:
            raise ValueError("max_change_rate must lie in (0, 1]")
        if not self.v_min < self.v_max or self.v_max <= 0:
            raise ValueError("need v_min < v_max and v_max > 0")
        for name, allowed in (
            ("init_mode", INIT_MODES),
            ("inertia_mode", INERTIA_MODES),
            ("mutation_mode", MUTATION_MODES),
            ("move_schedule", ("constant", "linear")),
            ("inertia_scale", ("fitness", "omega")),
        ):
            if getattr(self, name) not in allowed:
                raise ValueError(f"{name} must be one of {allowed}, got {getattr(self, name)!r}")

    @classmethod
    def from_dict(cls, d: dict) -> SearchConfig:
        d = dict(d)
        levy = d.pop("levy", None)
        if isinstance(levy, dict):
            d["levy"] = LevyParams(beta=float(levy.get("beta", 1.5)))
        elif levy is not None:
            d["levy"] = levy
        unknown = set(d) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ValueError(f"unknown search config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["levy"] = {"beta": self.levy.beta}
        return d

    def max_changes(self, n_words: int) -> int:
        return math.floor(self.max_change_rate * n_words + 1e-9)

    def move_probs(self, iteration: int) -> tuple[float, float]:
        if self.move_schedule == "constant" or self.max_iters <= 1:
            return self.p1, self.p2
        frac = iteration / (self.max_iters - 1)
        return self.p1 + (self.p2 - self.p1) * frac, self.p2 + (self.p1 - self.p2) * frac


class SearchSpace:
    """Candidate words per position, and the code <-> CandidateText mapping."""

    def __init__(self, t: TokenizedText, lex: SynonymLexicon, stops: StopwordList):
        self.text = t
        self.n = t.n_words
        self.options: list[list[str]] = []
        self.mutable: list[int] = []
        for d, word in enumerate(t.words):
            opts = [word]
            if word not in stops:
                opts += [s for s in synonyms(lex, word) if s != word]
            if len(opts) > 1:
                self.mutable.append(d)
            self.options.append(opts)
        self._parts = [tok.surface for tok in t.tokens]
        casing = [t.tokens[ti].casing for ti in t.word_index]
        self._cased = [[apply_casing(w, casing[d]) for w in opts] for d, opts in enumerate(self.options)]

    def candidate(self, codes) -> CandidateText:
        return CandidateText(
            self.text, tuple((int(d), self.options[d][int(codes[d])]) for d in np.flatnonzero(codes))
        )

    def text_of(self, codes) -> str:
        """Same string as ``realize(self.candidate(codes))``, without building the candidate."""
        nz = np.flatnonzero(codes)
        if not len(nz):
            return self.text.raw
        parts = self._parts.copy()
        wi = self.text.word_index
        for d in nz.tolist():
            parts[wi[d]] = self._cased[d][codes[d]]
        return "".join(parts)

    def codes(self, c: CandidateText) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.int64)
        for d, word in c.replacements:
            out[d] = self.options[d].index(word.lower())
        return out

    def zeros(self) -> np.ndarray:
        return np.zeros(self.n, dtype=np.int64)


class Evaluator:
    """Memoized fitness of code vectors; counts only texts sent to the victim."""

    def __init__(self, space: SearchSpace, victim: VictimModel, original_label: int, example=None):
        self.space = space
        self.victim = victim
        self.label = original_label
        self.example = example
        self.queries = 0
        self._cache: dict[bytes, Prediction] = {}
        self._scores: dict[bytes, tuple[float, bool]] = {}

    def _keys(self, batch) -> tuple[np.ndarray, list[bytes]]:
        arr = np.ascontiguousarray(batch if isinstance(batch, np.ndarray) else np.stack(batch), dtype=np.int64)
        if arr.ndim == 1:
            arr = arr[None, :]
        # slicing one buffer is much cheaper than tobytes() per row
        buf, w = arr.tobytes(), 8 * self.space.n
        return arr, [buf[i * w:(i + 1) * w] for i in range(arr.shape[0])]

    def _fill(self, arr: np.ndarray, keys: list[bytes]) -> None:
        todo, texts, pending = [], [], set()
        for i, key in enumerate(keys):
            if key not in self._cache and key not in pending:
                pending.add(key)
                todo.append(key)
                texts.append(self.space.text_of(arr[i]))
        if texts:
            preds = self.victim.predict_batch(texts, example=self.example)
            self.queries += len(texts)
            for key, p in zip(todo, preds):
                self._cache[key] = p
                self._scores[key] = (fitness(p, self.label), is_adversarial(p, self.label))

    def predictions(self, batch) -> list[Prediction]:
        if len(batch) == 0:
            return []
        arr, keys = self._keys(batch)
        self._fill(arr, keys)
        return [self._cache[k] for k in keys]

    def score(self, batch) -> tuple[np.ndarray, np.ndarray]:
        """Fitness and adversarial flags for a batch of code vectors."""
        if len(batch) == 0:
            return np.empty(0), np.empty(0, dtype=bool)
        arr, keys = self._keys(batch)
        self._fill(arr, keys)
        got = [self._scores[k] for k in keys]
        return np.array([g[0] for g in got]), np.array([g[1] for g in got], dtype=bool)

    def fitness(self, batch) -> list[float]:
        return self.score(batch)[0].tolist()

    def adversarial(self, codes) -> bool:
        return bool(self.score([codes])[1][0])


@dataclass
class SaliencyEntry:
    best_neighbor: str | None
    best_code: int
    best_fitness: float
    original_fitness: float

    @property
    def gain(self) -> float:
        return self.best_fitness - self.original_fitness


@dataclass
class SaliencyTable:
    entries: dict[int, SaliencyEntry]
    original_fitness: float
    # single substitutions that already flip the label: (position, code, fitness)
    flips: list[tuple[int, int, float]] = field(default_factory=list)

    def __post_init__(self):
        self._usable = [d for d, e in sorted(self.entries.items()) if e.best_neighbor is not None]

    def usable(self) -> list[int]:
        """Positions with a best neighbor, ascending."""
        return self._usable


@dataclass
class FitStats:
    min: float
    max: float
    mean: float

    @classmethod
    def of(cls, values) -> FitStats:
        a = np.asarray(values, dtype=np.float64)
        return cls(float(a.min()), float(a.max()), float(a.mean()))


@dataclass
class Particle:
    codes: np.ndarray
    velocity: np.ndarray
    fitness: float
    l_best_codes: np.ndarray
    l_best_fitness: float
    space: SearchSpace | None = field(default=None, repr=False)

    @property
    def position(self) -> CandidateText:
        return self.space.candidate(self.codes)

    @property
    def l_best(self) -> tuple[CandidateText, float]:
        return self.space.candidate(self.l_best_codes), self.l_best_fitness

    @property
    def n_changed(self) -> int:
        return int(np.count_nonzero(self.codes))


@dataclass
class Swarm:
    particles: list[Particle]
    g_best_codes: np.ndarray
    g_best_fitness: float
    iteration: int = 0
    fit_stats: FitStats | None = None

    def refresh_stats(self) -> FitStats:
        self.fit_stats = FitStats.of([p.fitness for p in self.particles])
        return self.fit_stats


@dataclass
class SearchResult:
    status: str  # "success" | "budget_exhausted" | "skipped"
    adversarial: CandidateText | None
    best: CandidateText | None
    best_fitness: float
    iterations_used: int
    queries: int
    elapsed: float

    @property
    def change_rate(self) -> float | None:
        return change_rate(self.adversarial) if self.adversarial is not None else None

    @property
    def adversarial_text(self) -> str | None:
        return realize(self.adversarial) if self.adversarial is not None else None


def saliency_pass(
    t: TokenizedText, lex: SynonymLexicon, stops: StopwordList, victim: VictimModel, original_label: int
) -> SaliencyTable:
    """Score every single-word substitution and keep each position's best one."""
    space = SearchSpace(t, lex, stops)
    if not space.mutable:
        raise ValueError("text has no mutable position")
    return _saliency(space, Evaluator(space, victim, original_label))


def _saliency(space: SearchSpace, evaluator: Evaluator) -> SaliencyTable:
    zero = space.zeros()
    base_fit = evaluator.fitness([zero])[0]
    batch, where = [], []
    for d in space.mutable:
        for k in range(1, len(space.options[d])):
            codes = zero.copy()
            codes[d] = k
            batch.append(codes)
            where.append((d, k))
    preds = evaluator.predictions(batch)
    entries: dict[int, SaliencyEntry] = {}
    flips = []
    grouped: dict[int, list[tuple[str, int, float]]] = {}
    for (d, k), pred in zip(where, preds):
        f = fitness(pred, evaluator.label)
        grouped.setdefault(d, []).append((space.options[d][k], k, f))
        if is_adversarial(pred, evaluator.label):
            flips.append((d, k, f))
    for d, scored in grouped.items():
        word, k, f = min(scored, key=lambda s: (-s[2], s[0]))
        if f >= base_fit:
            entries[d] = SaliencyEntry(word, k, f, base_fit)
        else:
            entries[d] = SaliencyEntry(None, 0, f, base_fit)
    return SaliencyTable(entries, base_fit, flips)


def _clamped(v: np.ndarray, cfg: SearchConfig) -> np.ndarray:
    return np.clip(v, -cfg.v_max, cfg.v_max)


def init_population(space: SearchSpace, table: SaliencyTable, evaluator: Evaluator, cfg: SearchConfig, rng) -> Swarm:
    usable = table.usable()
    if not usable:
        raise ValueError("saliency table has no usable best neighbor")
    gains = np.array([max(table.entries[d].gain, 0.0) + _GAIN_FLOOR for d in usable])
    probs = gains / gains.sum()
    picks = rng.choice(len(usable), size=cfg.pop_size, p=probs)
    positions = []
    for i in picks:
        codes = space.zeros()
        d = usable[int(i)]
        codes[d] = table.entries[d].best_code
        positions.append(codes)
    fits = evaluator.fitness(positions)
    if cfg.init_mode == "levy":
        vel = init_velocities(cfg.levy, cfg.v_min, cfg.v_max, rng, (cfg.pop_size, space.n))
    else:
        vel = rng.uniform(cfg.v_min, cfg.v_max, size=(cfg.pop_size, space.n))
    vel = _clamped(vel, cfg)
    particles = [
        Particle(codes, np.ascontiguousarray(vel[i]), f, codes.copy(), f, space)
        for i, (codes, f) in enumerate(zip(positions, fits))
    ]
    best = int(np.argmax(fits))
    return Swarm(particles, particles[best].codes.copy(), fits[best])


def adaptive_inertia(fit_n: float, stats: FitStats, cfg: SearchConfig, rng) -> float:
    if fit_n < stats.mean:
        spread = (stats.max - stats.min) if cfg.inertia_scale == "fitness" else (cfg.omega_max - cfg.omega_min)
        omega = cfg.omega_min + (fit_n - stats.min) * spread / max(stats.mean - stats.min, _STAT_GUARD)
        return min(max(omega, cfg.omega_min), cfg.omega_max)
    lo = (cfg.omega_min + cfg.omega_max) / 2
    for _ in range(_INERTIA_ATTEMPTS):
        s = levy_step(cfg.levy, rng)
        if lo < s < cfg.omega_max:
            return s
    return float(rng.uniform(lo, cfg.omega_max))


def adaptive_inertia_swarm(fits, stats: FitStats, cfg: SearchConfig, rng) -> np.ndarray:
    """Vectorized :func:`adaptive_inertia` for a whole swarm (same distribution)."""
    fits = np.asarray(fits, dtype=np.float64)
    out = np.empty_like(fits)
    low = fits < stats.mean
    if low.any():
        spread = (stats.max - stats.min) if cfg.inertia_scale == "fitness" else (cfg.omega_max - cfg.omega_min)
        w = cfg.omega_min + (fits[low] - stats.min) * spread / max(stats.mean - stats.min, _STAT_GUARD)
        out[low] = np.clip(w, cfg.omega_min, cfg.omega_max)
    k = int((~low).sum())
    if k:
        lo = (cfg.omega_min + cfg.omega_max) / 2
        draws = levy_steps(cfg.levy, rng, (k, _INERTIA_ATTEMPTS))
        inside = (draws > lo) & (draws < cfg.omega_max)
        first = inside.argmax(axis=1)
        picked = draws[np.arange(k), first]
        fallback = rng.uniform(lo, cfg.omega_max, size=k)
        out[~low] = np.where(inside.any(axis=1), picked, fallback)
    return out


def linear_inertia(iteration: int, cfg: SearchConfig) -> float:
    frac = iteration / (cfg.max_iters - 1) if cfg.max_iters > 1 else 0.0
    return cfg.omega_max - (cfg.omega_max - cfg.omega_min) * frac


def indicator(a, b) -> float:
    return 1.0 if a == b else -1.0


def update_velocity(p: Particle, g_best_codes: np.ndarray, omega: float, cfg: SearchConfig) -> np.ndarray:
    """Pull each dimension by +-1 per agreement with lBest and gBest, then clamp."""
    kernels.velocity_update(p.velocity, p.codes, p.l_best_codes, g_best_codes, float(omega), float(cfg.v_max))
    return p.velocity


def update_position(p: Particle, target_codes: np.ndarray, move_prob: float, cfg: SearchConfig, rng) -> np.ndarray:
    """Return the particle's new codes after one stochastic move toward ``target_codes``.

    Each differing dimension adopts the target word with probability
    ``min(1, n * softmax(v)_d)``; additions beyond the change budget are skipped.
    """
    codes = p.codes.copy()
    if rng.random() >= move_prob:
        return codes
    n = codes.shape[0]
    prob = np.empty(n)
    kernels.adoption_probabilities(p.velocity, prob)
    u = rng.random(n)
    kernels.apply_moves(codes, np.ascontiguousarray(target_codes), prob, u, int(np.count_nonzero(codes)),
                        cfg.max_changes(n))
    return codes


def mutation_probability(rate: float, cfg: SearchConfig) -> float:
    return 1.0 - cfg.gamma * rate


def _table_arrays(table: SaliencyTable):
    dims = np.array(table.usable(), dtype=np.int64)
    return dims, np.array([table.entries[d].best_code for d in dims], dtype=np.int64)


def greedy_mutate(p: Particle, table: SaliencyTable, evaluator: Evaluator, cfg: SearchConfig, rng) -> Particle:
    """Try every best-neighbor substitution and keep the best one if it strictly improves."""
    return greedy_mutate_swarm([p], table, evaluator, cfg, rng)[0]


def greedy_mutate_swarm(particles, table: SaliencyTable, evaluator: Evaluator, cfg: SearchConfig, rng):
    """:func:`greedy_mutate` over many particles with a single victim batch.

    One trial draw per particle, in order, so the rng stream and the outcome
    match mutating them one at a time.
    """
    if not particles:
        return particles
    dims, best = _table_arrays(table)
    n = particles[0].codes.shape[0]
    codes = np.stack([p.codes for p in particles])
    changed = np.count_nonzero(codes, axis=1)
    draws = rng.random(len(particles))
    go = np.flatnonzero(draws < 1.0 - cfg.gamma * changed / n)
    if not len(go) or not len(dims):
        return particles
    cur = codes[go][:, dims]
    valid = cur != best
    valid &= ~((cur == 0) & (changed[go] + 1 > cfg.max_changes(n))[:, None])
    rows, cols = np.nonzero(valid)
    if not len(rows):
        return particles
    variants = codes[go[rows]]
    variants[np.arange(len(rows)), dims[cols]] = best[cols]
    fits = evaluator.score(variants)[0]
    table_fit = np.full(valid.shape, -np.inf)
    table_fit[rows, cols] = fits
    pick = np.argmax(table_fit, axis=1)  # first maximum -> lowest position
    for r, i in enumerate(go):
        f = table_fit[r, pick[r]]
        p = particles[i]
        if f > p.fitness:
            c = p.codes.copy()
            c[dims[pick[r]]] = best[pick[r]]
            p.codes, p.fitness = c, float(f)
    return particles


def _first_adversarial(particles: list[Particle], evaluator: Evaluator) -> Particle | None:
    codes = np.stack([p.codes for p in particles])
    adv = evaluator.score(codes)[1]
    if not adv.any():
        return None
    hits = np.flatnonzero(adv)
    changed = np.count_nonzero(codes[hits], axis=1)
    return particles[int(hits[np.argmin(changed)])]  # argmin keeps the lowest index on ties


def _check_feasible(p: Particle, space: SearchSpace, cfg: SearchConfig) -> None:
    nz = np.flatnonzero(p.codes)
    assert len(nz) <= cfg.max_changes(space.n), "change budget exceeded"
    assert all(len(space.options[d]) > int(p.codes[d]) for d in nz), "code outside synonym list"
    assert np.all(np.abs(p.velocity) <= cfg.v_max), "velocity out of bounds"


def run(
    t: TokenizedText,
    original_label: int,
    victim: VictimModel,
    lex: SynonymLexicon,
    stops: StopwordList,
    cfg: SearchConfig,
    *,
    rng=None,
    example=None,
    observer: Callable[[str, object], None] | None = None,
) -> SearchResult:
    """Search for a label-flipping substitution of ``t`` within the change budget.

    ``observer(event, obj)`` is called with ``"init"``, ``"move"`` and
    ``"mutate"`` for each particle and ``"iteration"`` with the swarm after
    the lBest/gBest refresh; feasibility is asserted whenever it is set.
    """
    start = time.perf_counter()
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    space = SearchSpace(t, lex, stops)
    ev = Evaluator(space, victim, original_label, example)

    def result(status, adv=None, best=None, best_fit=0.0, iters=0):
        return SearchResult(
            status,
            space.candidate(adv) if adv is not None else None,
            space.candidate(best) if best is not None else None,
            best_fit,
            iters,
            ev.queries,
            time.perf_counter() - start,
        )

    zero = space.zeros()
    if space.n == 0 or ev.predictions([zero])[0].label != original_label:
        return result("skipped")
    base_fit = ev.fitness([zero])[0]
    if not space.mutable or cfg.max_changes(space.n) < 1:
        return result("budget_exhausted", best=zero, best_fit=base_fit)

    table = _saliency(space, ev)
    if table.flips:
        d, k, f = min(table.flips, key=lambda s: (-s[2], s[0], space.options[s[0]][s[1]]))
        codes = zero.copy()
        codes[d] = k
        return result("success", adv=codes, best=codes, best_fit=f)
    if not table.usable():
        return result("budget_exhausted", best=zero, best_fit=base_fit)

    swarm = init_population(space, table, ev, cfg, rng)
    if observer:
        for p in swarm.particles:
            _check_feasible(p, space, cfg)
            observer("init", p)
    hit = _first_adversarial(swarm.particles, ev)
    if hit is not None:
        return result("success", adv=hit.codes, best=hit.codes, best_fit=hit.fitness)

    for i in range(cfg.max_iters):
        swarm.iteration = i + 1
        stats = swarm.refresh_stats()
        p1, p2 = cfg.move_probs(i)
        if cfg.inertia_mode == "adaptive":
            omegas = adaptive_inertia_swarm([p.fitness for p in swarm.particles], stats, cfg, rng)
        else:
            omegas = np.full(len(swarm.particles), linear_inertia(i, cfg))
        for p, omega in zip(swarm.particles, omegas):
            update_velocity(p, swarm.g_best_codes, omega, cfg)
            p.codes = update_position(p, p.l_best_codes, p1, cfg, rng)
            p.codes = update_position(p, swarm.g_best_codes, p2, cfg, rng)
            if observer:
                _check_feasible(p, space, cfg)
                observer("move", p)
        for p, f in zip(swarm.particles, ev.fitness([p.codes for p in swarm.particles])):
            p.fitness = f
        hit = _first_adversarial(swarm.particles, ev)
        if hit is None and cfg.mutation_mode == "greedy":
            greedy_mutate_swarm(swarm.particles, table, ev, cfg, rng)
            if observer:
                for p in swarm.particles:
                    _check_feasible(p, space, cfg)
                    observer("mutate", p)
            hit = _first_adversarial(swarm.particles, ev)
        if hit is not None:
            return result("success", adv=hit.codes, best=hit.codes, best_fit=hit.fitness, iters=i + 1)
        for p in swarm.particles:
            if p.fitness > p.l_best_fitness:
                p.l_best_codes, p.l_best_fitness = p.codes.copy(), p.fitness
        lb = [p.l_best_fitness for p in swarm.particles]
        j = int(np.argmax(lb))
        if lb[j] > swarm.g_best_fitness:
            swarm.g_best_codes, swarm.g_best_fitness = swarm.particles[j].l_best_codes.copy(), lb[j]
        if observer:
            observer("iteration", swarm)

    return result("budget_exhausted", best=swarm.g_best_codes, best_fit=swarm.g_best_fitness, iters=cfg.max_iters)


def search_text(text: str, original_label: int, victim, lex, stops, cfg: SearchConfig, **kwargs) -> SearchResult:
    from leap.text import tokenize

    return run(tokenize(text), original_label, victim, lex, stops, cfg, **kwargs)


__all__ = [
    "SearchConfig",
    "SearchSpace",
    "Evaluator",
    "SaliencyTable",
    "SaliencyEntry",
    "Particle",
    "Swarm",
    "FitStats",
    "SearchResult",
    "saliency_pass",
    "init_population",
    "adaptive_inertia",
    "adaptive_inertia_swarm",
    "linear_inertia",
    "indicator",
    "update_velocity",
    "update_position",
    "mutation_probability",
    "greedy_mutate",
    "greedy_mutate_swarm",
    "run",
    "search_text",
]
