import numpy as np
import pytest

from glyphforge import fixtures
from glyphforge.assembly import (
    TransformPair,
    center_translation,
    estimate_size_transform,
    estimate_style_transform,
    group_skeletons,
    transform_skeleton,
)
from glyphforge.glyphdata import LINE_STRAIGHT, parse_glyph_file
from glyphforge.raster import load_gray
from glyphforge.relations import RelationKind, assign_all, estimate_thickness

from conftest import FIXTURE_DIR


def straight_codepoints():
    return [
        cp
        for cp in fixtures.SAMPLE_CODEPOINTS
        if all(s.line_type == LINE_STRAIGHT for s in fixtures.dataset_glyph(cp).strokes)
    ]


class TestCatalog:
    def test_corpus_counts(self):
        assert len(fixtures.SAMPLE_CODEPOINTS) == 15
        assert len(fixtures.HELD_OUT_CODEPOINTS) == 30
        assert len(fixtures.THICKNESS_CODEPOINTS) == 10
        assert len(fixtures.EXTRACTION_CODEPOINTS) == 5
        assert len(set(fixtures.ALL_CODEPOINTS)) == 60
        assert len(fixtures.dataset_glyphs()) == 60

    def test_bands_do_not_overlap(self):
        bands = [
            set(fixtures.SAMPLE_CODEPOINTS),
            set(fixtures.HELD_OUT_CODEPOINTS),
            set(fixtures.THICKNESS_CODEPOINTS),
            set(fixtures.EXTRACTION_CODEPOINTS),
        ]
        for i in range(len(bands)):
            for j in range(i + 1, len(bands)):
                assert not bands[i] & bands[j]

    def test_unknown_codepoint_rejected(self):
        with pytest.raises(ValueError, match="U\\+0041"):
            fixtures.dataset_glyph(0x41)

    def test_centroids_pinned_to_grid_center(self):
        for cp in fixtures.ALL_CODEPOINTS:
            cx, cy = fixtures.dataset_glyph(cp).centroid()
            assert abs(cx - 100.0) < 1e-6
            assert abs(cy - 100.0) < 1e-6

    def test_shapes_stay_inside_safe_band(self):
        for cp in fixtures.ALL_CODEPOINTS:
            x, y, w, h = fixtures.dataset_glyph(cp).bbox()
            assert x >= 20.0 and y >= 20.0
            assert x + w <= 180.0 and y + h <= 180.0

    def test_straight_sample_subset_size(self):
        assert len(straight_codepoints()) == 12

    def test_sample_chars_form_one_full_rank_group(self):
        # Style fits are group-wise; a collinear group would degrade to the
        # similarity fallback, so each sample char must connect into one
        # group whose stacked samples span the plane.
        for cp in fixtures.SAMPLE_CODEPOINTS:
            g = fixtures.dataset_glyph(cp)
            g = g.with_relations(assign_all(g, 4.0).relations)
            groups = group_skeletons(g)
            assert len(groups) == 1
            assert len(groups[0]) == len(g.strokes)
            pts = g.all_samples()
            sv = np.linalg.svd(pts - pts.mean(axis=0), compute_uv=False)
            assert sv[1] > 1e-3 * sv[0]


class TestDatasetFiles:
    def test_regeneration_is_byte_identical(self, tmp_path, dataset_dir):
        fresh = {p.name: p.read_bytes() for p in fixtures.write_dataset(tmp_path)}
        committed = {p.name: p.read_bytes() for p in dataset_dir.glob("*.gd")}
        assert fresh == committed

    def test_committed_files_parse_to_catalog(self, dataset_dir):
        paths = sorted(dataset_dir.glob("*.gd"))
        assert len(paths) == 60
        for path in paths:
            g = parse_glyph_file(path)
            assert g == fixtures.dataset_glyph(g.codepoint)


class TestSlantFont:
    def test_render_is_deterministic(self):
        a = fixtures.SLANT.sample(0xE000)
        b = fixtures.SLANT.sample(0xE000)
        assert np.array_equal(a, b)

    def test_shear_leans_ink_rightward_with_depth(self):
        img = fixtures.SLANT.sample(0xE000)
        ys, xs = np.nonzero(img)
        top = xs[ys < 100].mean()
        bottom = xs[ys > 150].mean()
        assert bottom > top + 5.0

    def test_adjusted_preserves_vertical_coordinates(self):
        g = fixtures.dataset_glyph(0xE003)
        sheared = g.transformed(fixtures.SLANT.style_matrix())
        unsheared = g.transformed(fixtures.RIBBON.style_matrix())
        assert np.allclose(sheared.all_samples()[:, 1], unsheared.all_samples()[:, 1])

    def test_thickness_round_trip_at_font_radius(self):
        g = fixtures.dataset_glyph(0xE000)
        adj = fixtures.SLANT.adjusted(g)
        img = fixtures.SLANT.render(adj)
        assert estimate_thickness(img, adj, 12) == 7

    def test_renders_stay_clear_of_the_border(self):
        for cp in fixtures.SAMPLE_CODEPOINTS:
            for spec in (fixtures.SLANT, fixtures.RIBBON):
                img = spec.sample(cp)
                assert img.any()
                assert not img[0].any() and not img[-1].any()
                assert not img[:, 0].any() and not img[:, -1].any()


class TestRibbonFont:
    def test_ink_forms_a_hollow_band(self):
        g = fixtures.dataset_glyph(0xE03B)  # two vertical rails
        adj = fixtures.RIBBON.adjusted(g)
        img = fixtures.RIBBON.render(adj)
        centers = sorted(s.samples[0].mean() for s in adj.strokes)
        ys, xs = np.nonzero(img)
        y_lo = min(s.samples[1].min() for s in adj.strokes)
        y_hi = max(s.samples[1].max() for s in adj.strokes)
        inner = (ys > y_lo + 8) & (ys < y_hi - 8)
        gap = np.abs(xs[inner, None] - np.array(centers)[None, :]).min(axis=1)
        assert gap.min() >= 1.5 - 0.8
        assert gap.max() <= 6.5 + 0.8

    def test_path_core_carries_no_ink(self):
        g = fixtures.dataset_glyph(0xE03B)
        adj = fixtures.RIBBON.adjusted(g)
        img = fixtures.RIBBON.render(adj)
        for s in adj.strokes:
            xi = np.rint(s.samples[0]).astype(int)
            yi = np.rint(s.samples[1]).astype(int)
            assert not img[yi, xi].any()

    def test_render_unions_per_stroke_masks(self):
        adj = fixtures.RIBBON.adjusted(fixtures.dataset_glyph(0xE004))
        per = fixtures.RIBBON.render_strokes(adj)
        union = np.maximum(per[0], per[1])
        assert np.array_equal(fixtures.RIBBON.render(adj), union)


class TestExtractionBand:
    def test_bar_shapes_are_isolated(self):
        for cp in (0xE03A, 0xE03B):
            adj = fixtures.SLANT.adjusted(fixtures.dataset_glyph(cp))
            rel = assign_all(adj, fixtures.SLANT.radius)
            kinds = {r.kind for row in rel.relations for r in row if r is not None}
            assert kinds == {RelationKind.ISOLATED}

    def test_cross_shapes_cross(self):
        for cp in (0xE03C, 0xE03D, 0xE03E):
            adj = fixtures.SLANT.adjusted(fixtures.dataset_glyph(cp))
            rel = assign_all(adj, fixtures.SLANT.radius)
            kinds = {r.kind for row in rel.relations for r in row if r is not None}
            assert RelationKind.CROSSING in kinds


class TestWriteFont:
    def test_layout_and_round_trip(self, tmp_path):
        written = fixtures.write_font(
            fixtures.SLANT,
            tmp_path,
            sample_codepoints=fixtures.SAMPLE_CODEPOINTS[:2],
            truth_codepoints=fixtures.HELD_OUT_CODEPOINTS[:3],
        )
        assert len(written["samples"]) == 2
        assert len(written["adjusted"]) == 2
        assert len(written["truth"]) == 3
        img = load_gray(tmp_path / "samples" / "U+E000.png")
        assert np.array_equal(img, fixtures.SLANT.sample(0xE000))
        adj = parse_glyph_file(tmp_path / "adjusted" / "U+E000.gd")
        want = fixtures.SLANT.adjusted(fixtures.dataset_glyph(0xE000))
        assert np.allclose(adj.all_samples(), want.all_samples(), atol=1e-9)


class TestStyleRecovery:
    def test_known_shear_recovered_from_straight_samples(self):
        m = np.array([[1.0, 0.18, 12.0], [-0.05, 0.97, -8.0], [0.0, 0.0, 1.0]])
        gs = [fixtures.dataset_glyph(cp) for cp in straight_codepoints()]
        t_sz = estimate_size_transform([(g, g.transformed(m)) for g in gs], 250, 250)
        pairs = []
        for g in gs:
            base = g.transformed(t_sz @ center_translation(g))
            base = base.with_relations(assign_all(base, 4.0).relations)
            base = base.with_groups(group_skeletons(base))
            pairs.append((base, base.transformed(m)))
        t_aff = estimate_style_transform(pairs)
        assert np.abs(t_aff - m).max() < 1e-6
        for base, adj in pairs:
            for s, true_s in zip(base.strokes, adj.strokes):
                got = transform_skeleton(s, TransformPair(np.eye(3), t_aff))
                assert np.abs(got.samples[:2] - true_s.samples[:2]).max() < 1e-6
