"""Tests for the sample-subset selection energies and genetic search."""

import itertools
import math

import numpy as np
import pytest

from glyphforge.assembly import context_energy, shape_energy
from glyphforge.glyphdata import Glyph, Skeleton
from glyphforge.relations import assign_all
from glyphforge.selection import (
    DISTANCE_SCALE,
    CandidateSet,
    GenerationStats,
    SampleSelector,
    ValidationChar,
    _crossover,
    _mutate,
    run_ga,
    validation_char,
)


# --- oracles -------------------------------------------------------------


def f_e_oracle(cand_chars, all_chars):
    """Double loop over every candidate and validation stroke."""
    strokes_v = [(s, c) for ch in all_chars for s, c in zip(ch.strokes, ch.contexts)]
    total = 0.0
    for sv, ctxv in strokes_v:
        best = math.inf
        for ch in cand_chars:
            for s, ctx in zip(ch.strokes, ch.contexts):
                e = shape_energy(s, sv) + context_energy(ctx, ctxv)
                best = min(best, e)
        total += best
    return total / (len(strokes_v) * DISTANCE_SCALE)


def f_r_oracle(cand_chars, k, m_max):
    num = sum(len(c.strokes) + c.n_cross + c.n_con for c in cand_chars)
    return num / (k * m_max)


def straight(p0, p1):
    return Skeleton(1, 1, 1, (p0, p1))


def curve(p0, p1, p2):
    return Skeleton(2, 1, 1, (p0, p1, p2))


def bar_char(cid, x0, y0, x1, y1):
    g = assign_all(Glyph(0xE000, (straight((x0, y0), (x1, y1)),)), 5.0)
    return validation_char(g, cid)


def plus_char(cid, cx, cy, arm):
    g = Glyph(
        0xE001,
        (
            straight((cx - arm, cy), (cx + arm, cy)),
            straight((cx, cy - arm), (cx, cy + arm)),
        ),
    )
    return validation_char(assign_all(g, 5.0), cid)


def tri_char(cid, ax=60.0, ay=40.0):
    a = (ax, ay)
    b = (ax + 80.0, ay)
    c = (ax + 40.0, ay + 80.0)
    g = Glyph(0xE002, (straight(a, b), straight(b, c), straight(c, a)))
    return validation_char(assign_all(g, 5.0), cid)


def random_char(rng, cid):
    n = int(rng.integers(1, 4))
    strokes = []
    for _ in range(n):
        p = rng.uniform(20.0, 180.0, (3, 2))
        if rng.random() < 0.5:
            strokes.append(straight(tuple(p[0]), tuple(p[1])))
        else:
            strokes.append(curve(tuple(p[0]), tuple(p[1]), tuple(p[2])))
    return validation_char(assign_all(Glyph(0xE003, tuple(strokes)), 5.0), cid)


def random_set(seed, count):
    rng = np.random.default_rng(seed)
    return [random_char(rng, f"c{k:02d}") for k in range(count)]


class TestValidationChar:
    def test_requires_relations(self):
        g = Glyph(0xE004, (straight((0.0, 0.0), (10.0, 0.0)),))
        with pytest.raises(ValueError, match="relations"):
            validation_char(g)

    def test_plus_counts_two_crossings(self):
        c = plus_char("p", 100.0, 100.0, 50.0)
        assert c.n_cross == 2
        assert c.n_con == 0
        assert c.complexity == 4

    def test_triangle_counts_six_directed_contacts(self):
        c = tri_char("t")
        assert c.n_cross == 0
        assert c.n_con == 6
        assert c.complexity == 9
        assert all(st is not None and en is not None for st, en in c.contexts)

    def test_bar_is_complexity_one(self):
        c = bar_char("b", 20.0, 20.0, 120.0, 40.0)
        assert c.complexity == 1
        assert c.contexts == ((None, None),)

    def test_rejects_empty_strokes(self):
        with pytest.raises(ValueError, match="no strokes"):
            ValidationChar("x", (), (), 0, 0)


class TestEnergies:
    def test_f_e_matches_double_loop_oracle(self):
        chars = random_set(7, 5)
        sel = SampleSelector(chars, k=2)
        for subset in ([chars[0]], [chars[1], chars[3]], chars):
            ids = [c.char_id for c in subset]
            assert sel.f_e(ids) == pytest.approx(f_e_oracle(subset, chars), abs=1e-12)

    def test_f_r_matches_counting_oracle(self):
        chars = [bar_char("b", 20, 20, 120, 40), plus_char("p", 100, 100, 50), tri_char("t")]
        sel = SampleSelector(chars, k=2)
        m_max = 3
        for subset in ([chars[0]], [chars[2]], chars[:2]):
            ids = [c.char_id for c in subset]
            assert sel.f_r(ids) == pytest.approx(f_r_oracle(subset, 2, m_max), abs=1e-12)

    def test_all_isolated_candidate_scores_stroke_count(self):
        chars = [bar_char(f"b{k}", 20.0 + 10 * k, 20.0, 120.0, 40.0 + 5 * k) for k in range(3)]
        sel = SampleSelector(chars, k=3)
        assert sel.f_r([c.char_id for c in chars]) == pytest.approx(3 / (3 * 1), abs=1e-12)

    def test_full_cover_zeroes_f_e_when_contexts_exist(self):
        chars = [tri_char("t")]
        sel = SampleSelector(chars, k=1)
        assert sel.f_e(["t"]) <= 1e-12

    def test_isolated_self_match_pays_missing_context(self):
        chars = [bar_char("b", 20.0, 20.0, 120.0, 40.0)]
        sel = SampleSelector(chars, k=1)
        assert sel.f_e(["b"]) == pytest.approx(50.0 / DISTANCE_SCALE, abs=1e-12)

    def test_adding_a_char_never_increases_f_e(self):
        chars = random_set(11, 6)
        sel = SampleSelector(chars, k=3)
        ids = [c.char_id for c in chars]
        for size in range(1, len(ids)):
            assert sel.f_e(ids[: size + 1]) <= sel.f_e(ids[:size]) + 1e-12

    def test_empty_candidate_is_infinite(self):
        sel = SampleSelector(random_set(13, 3), k=2)
        assert sel.f_e([]) == math.inf

    def test_alpha_extremes_select_single_term(self):
        chars = random_set(17, 4)
        sel = SampleSelector(chars, k=2)
        ids = [chars[0].char_id, chars[2].char_id]
        assert sel.f_selection(ids, alpha=1.0) == pytest.approx(sel.f_e(ids), abs=1e-15)
        assert sel.f_selection(ids, alpha=0.0) == pytest.approx(sel.f_r(ids), abs=1e-15)

    def test_selector_input_validation(self):
        chars = random_set(19, 3)
        with pytest.raises(ValueError, match="empty"):
            SampleSelector([], k=2)
        with pytest.raises(ValueError, match="alpha"):
            SampleSelector(chars, k=2, alpha=1.5)
        dup = [chars[0], chars[0]]
        with pytest.raises(ValueError, match="distinct"):
            SampleSelector(dup, k=1)
        sel = SampleSelector(chars, k=2)
        with pytest.raises(ValueError, match="expected 2"):
            sel.candidate([chars[0].char_id])

    def test_candidate_set_sorts_and_rejects_duplicates(self):
        c = CandidateSet(("b", "a"), 0.5)
        assert c.char_ids == ("a", "b")
        with pytest.raises(ValueError, match="distinct"):
            CandidateSet(("a", "a"), 0.5)


class TestOperators:
    def test_crossover_yields_k_distinct_members(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            n = int(rng.integers(6, 15))
            k = int(rng.integers(2, 5))
            a = tuple(sorted(rng.choice(n, size=k, replace=False).tolist()))
            b = tuple(sorted(rng.choice(n, size=k, replace=False).tolist()))
            child = _crossover(rng, a, b, k, n)
            assert len(child) == k
            assert len(set(child)) == k
            assert all(0 <= i < n for i in child)

    def test_mutation_rate_zero_is_identity(self):
        rng = np.random.default_rng(29)
        ids = (1, 4, 7)
        assert _mutate(rng, ids, 10, 0.0) == ids

    def test_mutation_keeps_members_distinct(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            out = _mutate(rng, (0, 1, 2), 8, 0.9)
            assert len(set(out)) == 3
            assert all(0 <= i < 8 for i in out)


class TestGA:
    def test_fixed_seed_reproduces_trace(self):
        chars = random_set(37, 9)
        a_best, a_trace = run_ga(chars, k=3, seed=5, max_generations=30, plateau=10)
        b_best, b_trace = run_ga(chars, k=3, seed=5, max_generations=30, plateau=10)
        assert a_best == b_best
        assert a_trace == b_trace
        assert isinstance(a_trace[0], GenerationStats)

    def test_best_of_generation_never_worsens(self):
        chars = random_set(41, 10)
        _, trace = run_ga(chars, k=3, seed=1, max_generations=60, plateau=20)
        bests = [g.best for g in trace]
        assert all(b2 <= b1 + 1e-15 for b1, b2 in zip(bests, bests[1:]))

    def test_toy_search_matches_exhaustive_within_tolerance(self):
        chars = random_set(43, 12)
        sel = SampleSelector(chars, k=3)
        exact = sel.exhaustive_best()
        for seed in (0, 1, 2):
            got, _ = run_ga(chars, k=3, seed=seed)
            assert got.energy >= exact.energy - 1e-9
            assert got.energy <= exact.energy * 1.05 + 1e-12

    def test_best_candidate_is_well_formed(self):
        chars = random_set(47, 8)
        best, _ = run_ga(chars, k=4, seed=9, max_generations=40, plateau=15)
        assert len(best.char_ids) == 4
        assert len(set(best.char_ids)) == 4
        valid = {c.char_id for c in chars}
        assert set(best.char_ids) <= valid

    def test_rejects_undersized_validation_set(self):
        chars = random_set(53, 4)
        with pytest.raises(ValueError, match="exceed"):
            run_ga(chars, k=4)

    def test_higher_alpha_tolerates_richer_candidates(self):
        # Cheap bars, curved triangles rich in shape and context, and one
        # many-stroke fence that only stretches the f_r normalization.
        def curved_tri(cid, dx, dy, bow=180.0):
            a, b, c = (20.0 + dx, 20.0 + dy), (180.0 + dx, 20.0 + dy), (100.0 + dx, 160.0 + dy)
            g = Glyph(
                0xE005,
                (
                    curve(a, (100.0 + dx, 20.0 + dy + bow), b),
                    curve(b, (140.0 + dx + bow * 0.3, 90.0 + dy), c),
                    curve(c, (60.0 + dx - bow * 0.3, 90.0 + dy), a),
                ),
            )
            return validation_char(assign_all(g, 5.0), cid)

        def fence_char(cid):
            strokes = tuple(
                straight((8.0 + 16 * i, 150.0), (8.0 + 16 * i, 195.0)) for i in range(12)
            )
            return validation_char(assign_all(Glyph(0xE006, strokes), 5.0), cid)

        chars = [bar_char(f"b{i}", 20.0 + 4 * i, 35.0 + 22 * i, 165.0 + 4 * i, 37.0 + 22 * i) for i in range(4)]
        chars += [curved_tri(f"t{i}", 5.0 * i, 5.0 * i) for i in range(3)]
        chars.append(fence_char("m0"))
        sel = SampleSelector(chars, k=3)
        richness = []
        for alpha in (0.4, 0.6, 0.8):
            best = None
            best_e = math.inf
            for combo in itertools.combinations(sorted(sel.ids), 3):
                e = sel.f_selection(combo, alpha=alpha)
                if e < best_e:
                    best, best_e = combo, e
            richness.append(sel.f_r(best))
        assert richness[0] <= richness[1] + 1e-12
        assert richness[1] <= richness[2] + 1e-12
        assert richness[2] > richness[0]
