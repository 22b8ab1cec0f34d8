"""Tests for skeleton modification and stroke deployment."""

import numpy as np
import pytest

from glyphforge.assembly import (
    StrokeAsset,
    TargetStroke,
    TransformPair,
    center_translation,
    compose_glyph,
    context_energy,
    estimate_size_transform,
    estimate_style_transform,
    fit_affine,
    group_skeletons,
    resolve_contexts,
    select_stroke,
    shape_energy,
    stroke_energy,
    transform_skeleton,
    warp_mask,
)
from glyphforge.glyphdata import Glyph, Skeleton
from glyphforge.relations import Relation, RelationKind, assign_all


# --- oracles -------------------------------------------------------------


def apply_matrix(m, pts):
    """Map (2, n) points through a homogeneous 3x3 the long way."""
    out = np.empty_like(np.asarray(pts, dtype=float))
    for k in range(pts.shape[1]):
        x, y = pts[0, k], pts[1, k]
        out[0, k] = m[0, 0] * x + m[0, 1] * y + m[0, 2]
        out[1, k] = m[1, 0] * x + m[1, 1] * y + m[1, 2]
    return out


def size_matrix_oracle(pairs, width, height):
    mats = []
    for src, dst in pairs:
        _, _, w, h = src.bbox()
        _, _, what, hhat = dst.bbox()
        rw = what / w
        rh = hhat / h
        mats.append(
            np.array(
                [
                    [rw, 0.0, width * rw / 2.0],
                    [0.0, rh, height * rh / 2.0],
                    [0.0, 0.0, 1.0],
                ]
            )
        )
    return sum(mats) / len(mats)


def groups_oracle(relations):
    """Connected components by breadth-first search over symmetrized edges."""
    n = len(relations)
    adj = {i: set() for i in range(n)}
    for i in range(n):
        for j in range(n):
            r = relations[i][j]
            if r is not None and r.kind != RelationKind.ISOLATED:
                adj[i].add(j)
                adj[j].add(i)
    seen = set()
    comps = []
    for i in range(n):
        if i in seen:
            continue
        queue = [i]
        comp = []
        while queue:
            k = queue.pop()
            if k in seen:
                continue
            seen.add(k)
            comp.append(k)
            queue.extend(adj[k] - seen)
        comps.append(tuple(sorted(comp)))
    return tuple(sorted(comps))


def rigid_matrix(theta, scale, tx, ty):
    c, s = np.cos(theta), np.sin(theta)
    return np.array(
        [
            [scale * c, -scale * s, tx],
            [scale * s, scale * c, ty],
            [0.0, 0.0, 1.0],
        ]
    )


def random_affine(rng, cond_max=50.0):
    while True:
        a = rng.uniform(-2.0, 2.0, (2, 2))
        if np.linalg.cond(a) <= cond_max and abs(np.linalg.det(a)) >= 1e-3:
            break
    m = np.eye(3)
    m[:2, :2] = a
    m[:2, 2] = rng.uniform(-100.0, 100.0, 2)
    return m


def random_spread(rng, n=12):
    while True:
        pts = rng.uniform(-50.0, 50.0, (2, n))
        sv = np.linalg.svd(pts - pts.mean(axis=1, keepdims=True), compute_uv=False)
        if sv[-1] > 1e-3 * sv[0]:
            return pts


def straight(p0, p1, *, start=1, end=1):
    return Skeleton(1, start, end, (p0, p1))


def curve(p0, p1, p2):
    return Skeleton(2, 1, 1, (p0, p1, p2))


def rel(kind, src=0, dst=0):
    return Relation(kind, 1.0, src, dst, (0.0, 0.0))


def relation_matrix(n, edges):
    """Full matrix: ISOLATED everywhere except the given (i, j) -> Relation."""
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(None)
            else:
                row.append(edges.get((i, j), rel(RelationKind.ISOLATED)))
        rows.append(tuple(row))
    return tuple(rows)


def plus_glyph(cx, cy, arm, codepoint=0xE000):
    s0 = straight((cx - arm, cy), (cx + arm, cy))
    s1 = straight((cx, cy - arm), (cx, cy + arm))
    return Glyph(codepoint, (s0, s1))


def frob(a, b):
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


class TestFitAffine:
    def test_random_affines_recovered(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            m = random_affine(rng)
            src = random_spread(rng)
            dst = apply_matrix(m, src)
            assert frob(fit_affine(src, dst), m) <= 1e-6

    def test_collinear_similarity_recovered(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            a = rng.uniform(-40.0, 40.0, 2)
            ang = rng.uniform(0.0, 2.0 * np.pi)
            d = np.array([np.cos(ang), np.sin(ang)])
            ts = np.arange(8) * rng.uniform(3.0, 9.0)
            src = (a[:, None] + d[:, None] * ts[None, :]).copy()
            m = rigid_matrix(rng.uniform(0.0, 2.0 * np.pi), rng.uniform(0.5, 2.0), *rng.uniform(-60.0, 60.0, 2))
            dst = apply_matrix(m, src)
            assert frob(fit_affine(src, dst), m) <= 1e-6

    def test_fit_no_worse_than_identity(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            src = random_spread(rng, 10)
            dst = src + rng.normal(0.0, 2.0, src.shape)
            m = fit_affine(src, dst)
            fitted = np.linalg.norm(dst - apply_matrix(m, src))
            assert fitted <= np.linalg.norm(dst - src) + 1e-9

    def test_homogeneous_row(self):
        rng = np.random.default_rng(5)
        m = fit_affine(random_spread(rng), random_spread(rng))
        assert np.array_equal(m[2], [0.0, 0.0, 1.0])

    def test_accepts_homogeneous_input(self):
        src = np.array([[0.0, 10.0, 3.0], [0.0, 2.0, 9.0], [1.0, 1.0, 1.0]])
        dst = src + np.array([[4.0], [1.0], [0.0]])
        m = fit_affine(src, dst)
        assert frob(m[:2, 2], [4.0, 1.0]) <= 1e-9

    def test_rejects_single_point(self):
        src = np.array([[5.0, 5.0], [2.0, 2.0]])
        with pytest.raises(ValueError, match="distinct"):
            fit_affine(src, src)

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            fit_affine(np.zeros((2, 4)), np.zeros((2, 5)))


class TestSizeTransform:
    def test_unit_ratio_is_pure_centering(self):
        g = plus_glyph(100, 100, 60)
        want = np.array([[1.0, 0.0, 250.0], [0.0, 1.0, 250.0], [0.0, 0.0, 1.0]])
        assert frob(estimate_size_transform([(g, g)], 500, 500), want) <= 1e-12

    def test_mixed_ratios_average_to_unit_scale(self):
        g = plus_glyph(100, 100, 60)
        half = g.transformed(np.diag([0.5, 0.5, 1.0]))
        bigger = g.transformed(np.diag([1.5, 1.5, 1.0]))
        m = estimate_size_transform([(g, half), (g, bigger)], 500, 500)
        want = np.array([[1.0, 0.0, 250.0], [0.0, 1.0, 250.0], [0.0, 0.0, 1.0]])
        assert frob(m, want) <= 1e-12

    def test_matches_oracle_on_random_pairs(self):
        rng = np.random.default_rng(19)
        pairs = []
        for k in range(4):
            g = plus_glyph(rng.uniform(60, 140), rng.uniform(60, 140), rng.uniform(20, 70))
            sx, sy = rng.uniform(0.4, 2.2, 2)
            pairs.append((g, g.transformed(np.diag([sx, sy, 1.0]))))
        got = estimate_size_transform(pairs, 320, 240)
        assert frob(got, size_matrix_oracle(pairs, 320, 240)) <= 1e-12

    def test_rejects_empty_pairs(self):
        with pytest.raises(ValueError, match="at least one"):
            estimate_size_transform([], 500, 500)

    def test_rejects_degenerate_box(self):
        g = Glyph(0xE001, (straight((50.0, 20.0), (50.0, 180.0)),))
        with pytest.raises(ValueError, match="degenerate"):
            estimate_size_transform([(g, g)], 500, 500)


class TestGroups:
    def test_chain_and_loner(self):
        mat = relation_matrix(
            3,
            {
                (0, 1): rel(RelationKind.CONNECTED, src=16),
                (1, 0): rel(RelationKind.CONNECTING, src=0),
            },
        )
        g = plus_glyph(100, 100, 50)
        g = Glyph(0xE002, (*g.strokes, straight((10, 10), (20, 10)))).with_relations(mat)
        assert group_skeletons(g) == ((0, 1), (2,))

    def test_one_directional_edge_still_merges(self):
        mat = relation_matrix(2, {(0, 1): rel(RelationKind.CROSSING, src=16)})
        g = plus_glyph(100, 100, 50).with_relations(mat)
        assert group_skeletons(g) == ((0, 1),)

    def test_matches_bfs_oracle_on_random_matrices(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            n = int(rng.integers(2, 8))
            edges = {}
            for i in range(n):
                for j in range(n):
                    if i != j and rng.random() < 0.25:
                        edges[(i, j)] = rel(RelationKind.CROSSING, src=16)
            mat = relation_matrix(n, edges)
            strokes = tuple(straight((10.0 * k, 0.0), (10.0 * k + 5.0, 0.0)) for k in range(n))
            g = Glyph(0xE003, strokes).with_relations(mat)
            assert tuple(sorted(group_skeletons(g))) == groups_oracle(mat)

    def test_requires_relations(self):
        with pytest.raises(ValueError, match="relations"):
            group_skeletons(plus_glyph(100, 100, 50))


class TestStyleTransform:
    def test_shear_recovered(self):
        base = plus_glyph(0, 0, 120).with_groups(((0, 1),))
        m = np.array([[1.0, 0.18, 12.0], [-0.05, 0.97, -8.0], [0.0, 0.0, 1.0]])
        adjusted = base.transformed(m)
        assert frob(estimate_style_transform([(base, adjusted)]), m) <= 1e-6

    def test_unchanged_pairs_give_identity(self):
        g = assign_all(plus_glyph(100, 100, 60), 6.0)
        h = assign_all(plus_glyph(90, 110, 40, codepoint=0xE004), 6.0)
        t = estimate_style_transform([(g, g), (h, h)])
        assert frob(t, np.eye(3)) <= 1e-9

    def test_group_fit_weighted_by_member_count(self):
        # One two-stroke group plus one singleton: the group fit counts twice.
        s0 = straight((0.0, 0.0), (100.0, 0.0))
        s1 = straight((0.0, 50.0), (100.0, 50.0))
        s2 = curve((200.0, 0.0), (240.0, 60.0), (280.0, 0.0))
        base = Glyph(0xE005, (s0, s1, s2), groups=((0, 1), (2,)))
        shift = np.array([[1.0, 0.0, 9.0], [0.0, 1.0, -4.0], [0.0, 0.0, 1.0]])
        adjusted = base.transformed(shift)
        assert frob(estimate_style_transform([(base, adjusted)]), shift) <= 1e-9

    def test_per_stroke_averages_individual_fits(self):
        s0 = straight((0.0, 0.0), (100.0, 0.0))
        s1 = straight((0.0, 50.0), (100.0, 50.0))
        base = Glyph(0xE006, (s0, s1), groups=((0, 1),))
        a1 = straight((5.0, 50.0), (105.0, 50.0))
        adjusted = Glyph(0xE006, (s0, a1))
        per = estimate_style_transform([(base, adjusted)], per_stroke=True)
        want = (np.eye(3) + np.array([[1.0, 0.0, 5.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])) / 2.0
        assert frob(per, want) <= 1e-9
        # The joint group fit explains the shift as a shear instead.
        grouped = estimate_style_transform([(base, adjusted)])
        assert frob(grouped, per) > 0.01

    def test_rejects_stroke_count_mismatch(self):
        base = plus_glyph(100, 100, 60).with_groups(((0, 1),))
        adjusted = Glyph(0xE007, base.strokes[:1])
        with pytest.raises(ValueError, match="stroke counts"):
            estimate_style_transform([(base, adjusted)])

    def test_rejects_empty_input(self):
        with pytest.raises(ValueError, match="at least one stroke"):
            estimate_style_transform([])


class TestTransformPair:
    def test_matrix_composes_in_order(self):
        t_sz = np.array([[2.0, 0.0, 10.0], [0.0, 0.5, 20.0], [0.0, 0.0, 1.0]])
        t_aff = np.array([[1.0, 0.3, 0.0], [0.1, 1.0, 5.0], [0.0, 0.0, 1.0]])
        pair = TransformPair(t_sz, t_aff)
        assert frob(pair.matrix, t_aff @ t_sz) <= 1e-12

    def test_rejects_bad_last_row(self):
        bad = np.eye(3)
        bad[2, 0] = 0.1
        with pytest.raises(ValueError, match="last row"):
            TransformPair(np.eye(3), bad)

    def test_rejects_nonpositive_scale(self):
        with pytest.raises(ValueError, match="positive"):
            TransformPair(np.diag([-1.0, 1.0, 1.0]), np.eye(3))

    def test_matrices_are_write_protected(self):
        pair = TransformPair(np.eye(3), np.eye(3))
        with pytest.raises(ValueError):
            pair.t_sz[0, 0] = 3.0

    def test_transform_skeleton_accepts_pair_and_matrix(self):
        s = straight((10.0, 20.0), (90.0, 60.0))
        m = np.array([[1.2, 0.1, 4.0], [0.0, 0.8, -3.0], [0.0, 0.0, 1.0]])
        pair = TransformPair(np.eye(3), m)
        a = transform_skeleton(s, pair)
        b = transform_skeleton(s, m)
        assert frob(a.samples, b.samples) == 0.0
        assert np.allclose(a.samples[:2], apply_matrix(m, s.samples[:2]), atol=1e-9)
        assert np.array_equal(a.samples[2], np.ones(s.sample_count))


class TestShapeEnergy:
    def test_translated_copy_costs_nothing(self):
        s = curve((0.0, 0.0), (50.0, 40.0), (100.0, 0.0))
        t = s.with_points([(7.0, -3.0), (57.0, 37.0), (107.0, -3.0)])
        assert shape_energy(s, t) <= 1e-9

    def test_self_energy_is_zero(self):
        s = straight((0.0, 0.0), (100.0, 0.0))
        assert shape_energy(s, s) <= 1e-12

    def test_nonnegative_on_random_pairs(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            a = curve(*(tuple(rng.uniform(0, 100, 2)) for _ in range(3)))
            b = curve(*(tuple(rng.uniform(0, 100, 2)) for _ in range(3)))
            assert shape_energy(a, b) >= 0.0

    def test_attribute_mismatch_adds_penalty(self):
        a = straight((0.0, 0.0), (100.0, 0.0), start=1, end=1)
        b = straight((0.0, 0.0), (100.0, 0.0), start=2, end=1)
        assert shape_energy(a, b, attribute_penalty=2.5) == pytest.approx(2.5, abs=1e-9)
        c = straight((0.0, 0.0), (100.0, 0.0), start=2, end=3)
        assert shape_energy(a, c, attribute_penalty=2.5) == pytest.approx(5.0, abs=1e-9)

    def test_bend_cannot_be_fit_away(self):
        bowed = curve((0.0, 0.0), (50.0, 40.0), (100.0, 0.0))
        flat = straight((0.0, 0.0), (100.0, 0.0))
        e = shape_energy(bowed, flat, attribute_penalty=0.0)
        assert e > 0.5
        assert e == pytest.approx(shape_energy(flat, bowed, attribute_penalty=0.0), abs=1e-9)

    def test_rejects_sample_count_mismatch(self):
        a = straight((0.0, 0.0), (100.0, 0.0))
        b = Skeleton(1, 1, 1, ((0.0, 0.0), (100.0, 0.0)), sample_count=16)
        with pytest.raises(ValueError, match="sample counts"):
            shape_energy(a, b)


class TestContextEnergy:
    def test_identical_contexts_cost_nothing(self):
        s = straight((0.0, 0.0), (10.0, 0.0))
        assert context_energy((s, s), (s, s)) == 0.0

    def test_any_missing_neighbor_costs_fifty(self):
        s = straight((0.0, 0.0), (10.0, 0.0))
        assert context_energy((None, None), (None, None)) == 50.0
        assert context_energy((s, None), (s, s)) == 50.0
        assert context_energy((s, s), (None, s)) == 50.0
        assert context_energy((s, s), (s, None)) == 50.0

    def test_translation_scores_per_point_l1(self):
        s = straight((0.0, 0.0), (10.0, 0.0))
        t = s.with_points([(1.0, 2.0), (11.0, 2.0)])
        assert context_energy((s, s), (t, t)) == pytest.approx(6.0, abs=1e-9)

    def test_rejects_sample_count_mismatch(self):
        a = straight((0.0, 0.0), (10.0, 0.0))
        b = Skeleton(1, 1, 1, ((0.0, 0.0), (10.0, 0.0)), sample_count=16)
        with pytest.raises(ValueError, match="sample counts"):
            context_energy((a, a), (b, a))


class TestResolveContexts:
    def test_start_and_end_neighbors_found(self):
        bar = straight((40.0, 100.0), (160.0, 100.0))
        left = straight((40.0, 60.0), (40.0, 140.0))
        right = straight((160.0, 60.0), (160.0, 140.0))
        mat = relation_matrix(
            3,
            {
                (0, 1): rel(RelationKind.CONTINUOUS, src=0),
                (1, 0): rel(RelationKind.CONTINUOUS, src=16),
                (0, 2): rel(RelationKind.CONTINUOUS, src=31),
                (2, 0): rel(RelationKind.CONTINUOUS, src=16),
            },
        )
        g = Glyph(0xE008, (bar, left, right)).with_relations(mat)
        ctx = resolve_contexts(g)
        assert ctx[0][0] is left
        assert ctx[0][1] is right

    def test_body_contacts_are_not_context(self):
        g = plus_glyph(100, 100, 50).with_relations(
            relation_matrix(
                2,
                {
                    (0, 1): rel(RelationKind.CROSSING, src=16),
                    (1, 0): rel(RelationKind.CROSSING, src=16),
                },
            )
        )
        assert resolve_contexts(g) == (((None, None)), ((None, None)))

    def test_closest_centroid_wins_tie(self):
        bar = straight((0.0, 0.0), (100.0, 0.0))
        near = straight((0.0, 5.0), (0.0, 25.0))
        far = straight((0.0, 5.0), (0.0, 125.0))
        mat = relation_matrix(
            3,
            {
                (0, 1): rel(RelationKind.CONTINUOUS, src=0),
                (0, 2): rel(RelationKind.CONTINUOUS, src=0),
            },
        )
        g = Glyph(0xE009, (bar, near, far)).with_relations(mat)
        assert resolve_contexts(g)[0][0] is near

    def test_equal_distance_tie_goes_to_lower_index(self):
        bar = straight((0.0, 0.0), (100.0, 0.0))
        up = straight((0.0, 10.0), (0.0, 30.0))
        down = straight((0.0, -10.0), (0.0, -30.0))
        mat = relation_matrix(
            3,
            {
                (0, 1): rel(RelationKind.CONTINUOUS, src=0),
                (0, 2): rel(RelationKind.CONTINUOUS, src=0),
            },
        )
        g = Glyph(0xE00A, (bar, up, down)).with_relations(mat)
        assert resolve_contexts(g)[0][0] is up

    def test_requires_relations(self):
        with pytest.raises(ValueError, match="relations"):
            resolve_contexts(plus_glyph(100, 100, 50))


def make_asset(asset_id, *, start=1, end=1, offset=0):
    img = np.zeros((40, 40), dtype=np.uint8)
    img[18 + offset : 22 + offset, 5:35] = 255
    src = straight((5.0, 20.0 + offset), (35.0, 20.0 + offset), start=start, end=end)
    ds = straight((20.0, 100.0 + offset), (180.0, 100.0 + offset), start=start, end=end)
    return StrokeAsset(asset_id, img, src, ds)


class TestSelection:
    def test_matching_asset_wins(self):
        assets = [make_asset("a", start=2, end=3), make_asset("b"), make_asset("c", start=2)]
        target = TargetStroke(assets[1].source_skeleton, assets[1].dataset_skeleton)
        got = select_stroke(target, assets)
        assert got.index == 1
        # Both shape terms are residual-free; only the missing context costs.
        assert got.energy == pytest.approx(50.0, abs=1e-9)

    def test_tie_goes_to_lowest_index(self):
        assets = [make_asset("a"), make_asset("b")]
        target = TargetStroke(assets[0].source_skeleton, assets[0].dataset_skeleton)
        assert select_stroke(target, assets).index == 0

    def test_argmin_unchanged_by_worse_candidates(self):
        assets = [make_asset("a"), make_asset("b", start=4, end=5)]
        target = TargetStroke(assets[0].source_skeleton, assets[0].dataset_skeleton)
        before = select_stroke(target, assets)
        worse = assets + [make_asset(f"w{k}", start=5, end=6) for k in range(4)]
        after = select_stroke(target, worse)
        assert (after.index, after.energy) == (before.index, before.energy)

    def test_context_term_breaks_shape_ties(self):
        neighbor = straight((0.0, 0.0), (0.0, 30.0))
        shifted = straight((40.0, 0.0), (40.0, 30.0))
        a = make_asset("a")
        b = StrokeAsset("b", a.image, a.source_skeleton, a.dataset_skeleton, (neighbor, neighbor))
        c = StrokeAsset("c", a.image, a.source_skeleton, a.dataset_skeleton, (shifted, shifted))
        target = TargetStroke(a.source_skeleton, a.dataset_skeleton, (neighbor, neighbor))
        got = select_stroke(target, [a, c, b])
        assert got.index == 2
        assert got.energy <= 1e-9
        assert stroke_energy(c, target) == pytest.approx(80.0, abs=1e-9)

    def test_rejects_empty_pool(self):
        target = TargetStroke(straight((0.0, 0.0), (10.0, 0.0)), straight((0.0, 0.0), (10.0, 0.0)))
        with pytest.raises(ValueError, match="no stroke assets"):
            select_stroke(target, [])


class TestAssetValidation:
    def test_rejects_empty_image(self):
        s = straight((0.0, 0.0), (10.0, 0.0))
        with pytest.raises(ValueError, match="empty"):
            StrokeAsset("x", np.zeros((8, 8), dtype=np.uint8), s, s)

    def test_rejects_sample_count_mismatch(self):
        img = np.full((8, 8), 255, dtype=np.uint8)
        a = straight((0.0, 0.0), (10.0, 0.0))
        b = Skeleton(1, 1, 1, ((0.0, 0.0), (10.0, 0.0)), sample_count=16)
        with pytest.raises(ValueError, match="sample counts"):
            StrokeAsset("x", img, a, b)


class TestWarpCompose:
    def test_identity_warp_is_exact(self):
        rng = np.random.default_rng(41)
        img = (rng.random((20, 20)) < 0.3).astype(np.uint8) * 255
        assert np.array_equal(warp_mask(img, np.eye(3), 20, 20), img)

    def test_integer_translation_shifts_pixels(self):
        img = np.zeros((12, 12), dtype=np.uint8)
        img[2:6, 3:8] = 255
        m = np.array([[1.0, 0.0, 5.0], [0.0, 1.0, 3.0], [0.0, 0.0, 1.0]])
        out = warp_mask(img, m, 20, 20)
        want = np.zeros((20, 20), dtype=np.uint8)
        want[5:9, 8:13] = 255
        assert np.array_equal(out, want)

    def test_compose_identity_reproduces_asset(self):
        a = make_asset("a")
        target = TargetStroke(a.source_skeleton, a.dataset_skeleton)
        out = compose_glyph([target], [a], 40, 40)
        assert np.array_equal(out, a.image)

    def test_disjoint_strokes_union_adds(self):
        a = make_asset("a")
        b = make_asset("b", offset=10)
        ta = TargetStroke(a.source_skeleton, a.dataset_skeleton)
        tb = TargetStroke(b.source_skeleton, b.dataset_skeleton)
        out = compose_glyph([ta, tb], [a, b], 40, 40)
        assert (out > 0).sum() == (a.image > 0).sum() + (b.image > 0).sum()

    def test_offcanvas_stroke_is_an_error(self):
        a = make_asset("a")
        gone = transform_skeleton(
            a.source_skeleton,
            np.array([[1.0, 0.0, 1000.0], [0.0, 1.0, 1000.0], [0.0, 0.0, 1.0]]),
        )
        ok = TargetStroke(a.source_skeleton, a.dataset_skeleton)
        bad = TargetStroke(gone, a.dataset_skeleton)
        with pytest.raises(ValueError, match="stroke 1"):
            compose_glyph([ok, bad], [a, a], 40, 40)

    def test_rejects_length_mismatch(self):
        a = make_asset("a")
        target = TargetStroke(a.source_skeleton, a.dataset_skeleton)
        with pytest.raises(ValueError, match="per target"):
            compose_glyph([target], [a, a], 40, 40)


class TestStyleTransfer:
    def test_shear_roundtrip_hits_adjusted_strokes(self):
        d = plus_glyph(100.0, 100.0, 60.0)
        center = center_translation(d)
        t_sz = estimate_size_transform([(d, d)], 500, 500)
        base = d.transformed(t_sz @ center).with_groups(((0, 1),))
        m = np.array([[1.0, 0.18, 12.0], [-0.05, 0.97, -8.0], [0.0, 0.0, 1.0]])
        adjusted = base.transformed(m)
        t_aff = estimate_style_transform([(base, adjusted)])
        assert frob(t_aff, m) <= 1e-6
        pair = TransformPair(t_sz @ center, t_aff)
        for s, want in zip(d.strokes, adjusted.strokes):
            got = transform_skeleton(s, pair)
            assert np.abs(got.samples - want.samples).max() <= 1e-6

    def test_centering_matrix_moves_centroid_to_origin(self):
        g = plus_glyph(130.0, 70.0, 40.0)
        moved = g.transformed(center_translation(g))
        assert frob(moved.centroid(), (0.0, 0.0)) <= 1e-9
