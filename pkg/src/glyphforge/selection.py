"""GA-driven selection of a compact sample-character subset.

A candidate is a k-character subset of the validation characters. Its
energy blends coverage with complexity: every validation stroke should
find a cheap nearest stroke (shape plus context energy) inside the
candidate, while the candidate keeps few strokes and relations. Twenty
elites survive each generation and breed 150 offspring by uniform set
crossover and pointwise mutation; evolution stops on a 50-generation
plateau or after 1000 generations.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .assembly import context_energy, resolve_contexts, shape_energy
from .glyphdata import GRID_SIZE, Glyph, Skeleton
from .relations import RelationKind

# Coverage energies are measured in design-grid units; dividing by the
# grid diagonal makes f_e commensurate with the counting term f_r.
DISTANCE_SCALE = float(np.hypot(GRID_SIZE, GRID_SIZE))

DEFAULT_K = 15
DEFAULT_ALPHA = 0.6


@dataclass(frozen=True)
class ValidationChar:
    """One validation character: strokes, their contexts, relation counts."""

    char_id: str
    strokes: tuple[Skeleton, ...]
    contexts: tuple[tuple[Skeleton | None, Skeleton | None], ...]
    n_cross: int
    n_con: int

    def __post_init__(self):
        if not self.strokes:
            raise ValueError(f"{self.char_id}: validation character has no strokes")
        if len(self.contexts) != len(self.strokes):
            raise ValueError(f"{self.char_id}: one context pair per stroke required")

    @property
    def complexity(self) -> int:
        return len(self.strokes) + self.n_cross + self.n_con


def validation_char(g: Glyph, char_id: str | None = None) -> ValidationChar:
    """Package a glyph with relations as a validation character."""
    if g.relations is None:
        raise ValueError(f"{g.name} needs relations to join the validation set")
    n_cross = 0
    n_con = 0
    for row in g.relations:
        for r in row:
            if r is None:
                continue
            if r.kind == RelationKind.CROSSING:
                n_cross += 1
            elif r.kind != RelationKind.ISOLATED:
                n_con += 1
    return ValidationChar(
        char_id if char_id is not None else g.name,
        g.strokes,
        resolve_contexts(g),
        n_cross,
        n_con,
    )


@dataclass(frozen=True)
class CandidateSet:
    """A k-character subset with its selection energy."""

    char_ids: tuple[str, ...]
    energy: float

    def __post_init__(self):
        if len(set(self.char_ids)) != len(self.char_ids):
            raise ValueError("candidate character ids must be distinct")
        object.__setattr__(self, "char_ids", tuple(sorted(self.char_ids)))


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    best: float
    mean: float


class SampleSelector:
    """Precomputed candidate energies over a fixed validation set.

    The char-by-stroke cost matrix holds, for every validation character
    and every validation stroke, the cheapest shape-plus-context energy
    any stroke of that character offers. Subset energies reduce to a
    column minimum over the chosen rows.
    """

    def __init__(
        self,
        chars: Sequence[ValidationChar],
        *,
        k: int = DEFAULT_K,
        alpha: float = DEFAULT_ALPHA,
        attribute_penalty: float = 1.0,
    ):
        if not chars:
            raise ValueError("validation set is empty")
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha {alpha} outside [0, 1]")
        ids = [c.char_id for c in chars]
        if len(set(ids)) != len(ids):
            raise ValueError("validation character ids must be distinct")
        if k < 1:
            raise ValueError("candidate size must be positive")
        self.chars = tuple(chars)
        self.k = k
        self.alpha = alpha
        self.ids = tuple(ids)
        self._row = {cid: i for i, cid in enumerate(ids)}
        all_strokes = [(s, ctx) for c in chars for s, ctx in zip(c.strokes, c.contexts)]
        self.stroke_count = len(all_strokes)
        cost = np.empty((len(chars), len(all_strokes)))
        for i, c in enumerate(chars):
            for v, (sv, ctxv) in enumerate(all_strokes):
                best = math.inf
                for s, ctx in zip(c.strokes, c.contexts):
                    e = shape_energy(s, sv, attribute_penalty=attribute_penalty)
                    e += context_energy(ctx, ctxv)
                    if e < best:
                        best = e
                cost[i, v] = best
        self._cost = cost
        self._complexity = np.array([c.complexity for c in chars], dtype=float)
        self._m_max = max(len(c.strokes) for c in chars)

    def _rows(self, char_ids) -> list[int]:
        return [self._row[cid] for cid in char_ids]

    def f_e(self, char_ids) -> float:
        """Mean nearest-stroke energy over the validation strokes, rescaled."""
        rows = self._rows(char_ids)
        if not rows:
            return math.inf
        best = self._cost[rows].min(axis=0)
        return float(best.mean()) / DISTANCE_SCALE

    def f_r(self, char_ids) -> float:
        """Stroke and relation counts, rescaled by the largest possible set."""
        rows = self._rows(char_ids)
        return float(self._complexity[rows].sum()) / (self.k * self._m_max)

    def f_selection(self, char_ids, alpha: float | None = None) -> float:
        a = self.alpha if alpha is None else alpha
        if not 0.0 <= a <= 1.0:
            raise ValueError(f"alpha {a} outside [0, 1]")
        return a * self.f_e(char_ids) + (1.0 - a) * self.f_r(char_ids)

    def candidate(self, char_ids) -> CandidateSet:
        ids = tuple(sorted(char_ids))
        if len(ids) != self.k:
            raise ValueError(f"candidate holds {len(ids)} ids, expected {self.k}")
        return CandidateSet(ids, self.f_selection(ids))

    def exhaustive_best(self) -> CandidateSet:
        """Global optimum by full enumeration; only viable for toy sets."""
        best_ids = None
        best_e = math.inf
        for combo in itertools.combinations(sorted(self.ids), self.k):
            e = self.f_selection(combo)
            if e < best_e:
                best_ids, best_e = combo, e
        return CandidateSet(best_ids, best_e)


def _crossover(rng, a, b, k, n):
    """Uniform set mix of two index tuples, refilled to k distinct members."""
    union = sorted(set(a) | set(b))
    keep = [i for i in union if rng.random() < 0.5]
    if len(keep) > k:
        keep = sorted(rng.choice(keep, size=k, replace=False).tolist())
    elif len(keep) < k:
        pool = np.setdiff1d(np.arange(n), keep)
        extra = rng.choice(pool, size=k - len(keep), replace=False)
        keep = sorted(keep + extra.tolist())
    return tuple(int(i) for i in keep)


def _mutate(rng, ids, n, rate):
    out = list(ids)
    for pos in range(len(out)):
        if rng.random() < rate:
            pool = np.setdiff1d(np.arange(n), out)
            out[pos] = int(rng.choice(pool))
    return tuple(sorted(out))


def run_ga(
    chars: Sequence[ValidationChar],
    *,
    k: int = DEFAULT_K,
    alpha: float = DEFAULT_ALPHA,
    seed: int = 0,
    elite_count: int = 20,
    offspring_count: int = 150,
    max_generations: int = 1000,
    plateau: int = 50,
    mutation_rate: float = 0.05,
    attribute_penalty: float = 1.0,
) -> tuple[CandidateSet, tuple[GenerationStats, ...]]:
    """Best candidate subset found by the genetic search, plus its trace.

    Deterministic for a fixed seed: population order, parent draws, and
    tie-breaks (energy, then lexicographic ids) are all derived from one
    seeded generator.
    """
    if len(chars) <= k:
        raise ValueError(f"validation set of {len(chars)} cannot exceed k={k}")
    sel = SampleSelector(chars, k=k, alpha=alpha, attribute_penalty=attribute_penalty)
    n = len(chars)
    rng = np.random.default_rng(seed)
    cache: dict[tuple[int, ...], float] = {}

    def energy(member: tuple[int, ...]) -> float:
        e = cache.get(member)
        if e is None:
            e = sel.f_selection([sel.ids[i] for i in member])
            cache[member] = e
        return e

    population = [
        tuple(sorted(rng.choice(n, size=k, replace=False).tolist()))
        for _ in range(elite_count + offspring_count)
    ]
    best_member = None
    best_e = math.inf
    stale = 0
    trace = []
    for gen in range(max_generations):
        population.sort(key=lambda m: (energy(m), m))
        gen_best = energy(population[0])
        trace.append(
            GenerationStats(
                gen, gen_best, float(np.mean([energy(m) for m in population]))
            )
        )
        if gen_best < best_e - 1e-15:
            best_member, best_e = population[0], gen_best
            stale = 0
        else:
            stale += 1
            if stale >= plateau:
                break
        elites = population[:elite_count]
        offspring = []
        for _ in range(offspring_count):
            pa = elites[int(rng.integers(elite_count))]
            pb = elites[int(rng.integers(elite_count))]
            child = _crossover(rng, pa, pb, k, n)
            offspring.append(_mutate(rng, child, n, mutation_rate))
        population = elites + offspring
    ids = tuple(sorted(sel.ids[i] for i in best_member))
    return CandidateSet(ids, best_e), tuple(trace)
