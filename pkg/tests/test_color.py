import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from palette_orchestra.color import (
    LabColor,
    Palette,
    PaletteSet,
    color_dist,
    lab_array_to_srgb,
    lab_to_srgb,
    mhd,
    srgb_array_to_lab,
    srgb_to_lab,
)

GRAY_HALF = 128.0 / 255.0  # normalized a/b for zero chroma

channels = st.integers(min_value=0, max_value=255)
unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


class TestSrgbToLab:
    def test_white_reference(self):
        c = srgb_to_lab(255, 255, 255)
        assert c.l == pytest.approx(1.0, abs=1e-6)
        assert c.a == pytest.approx(GRAY_HALF, abs=1e-4)
        assert c.b == pytest.approx(GRAY_HALF, abs=1e-4)

    def test_black(self):
        c = srgb_to_lab(0, 0, 0)
        assert c.l == pytest.approx(0.0, abs=1e-9)
        assert c.a == pytest.approx(GRAY_HALF, abs=1e-6)
        assert c.b == pytest.approx(GRAY_HALF, abs=1e-6)

    def test_red_reference_table(self):
        # sRGB red per a D65 colorimetry reference: L=53.241, a=80.092, b=67.203
        c = srgb_to_lab(255, 0, 0)
        L, a, b = c.denormalize()
        assert L == pytest.approx(53.2406, abs=0.01)
        assert a == pytest.approx(80.0923, abs=0.01)
        assert b == pytest.approx(67.2028, abs=0.01)

    def test_matches_independent_colorimetry(self, rng):
        skimage_color = pytest.importorskip("skimage.color")
        rgb = rng.integers(0, 256, size=(64, 3))
        ours = srgb_array_to_lab(rgb / 255.0)
        ref = skimage_color.rgb2lab(rgb[None, :, :] / 255.0)[0]
        ref_norm = np.stack(
            [ref[:, 0] / 100.0, (ref[:, 1] + 128) / 255.0, (ref[:, 2] + 128) / 255.0], axis=1
        )
        assert np.abs(ours - ref_norm).max() < 1e-3

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            srgb_to_lab(256, 0, 0)

    def test_components_in_unit_interval(self, rng):
        rgb = rng.integers(0, 256, size=(200, 3))
        lab = srgb_array_to_lab(rgb / 255.0)
        assert lab.min() >= 0.0 and lab.max() <= 1.0


class TestLabToSrgb:
    def test_white_black(self):
        assert lab_to_srgb(srgb_to_lab(255, 255, 255))[:3] == (255, 255, 255)
        assert lab_to_srgb(srgb_to_lab(0, 0, 0))[:3] == (0, 0, 0)

    @given(st.lists(channels, min_size=3, max_size=3))
    @settings(max_examples=300, deadline=None)
    def test_round_trip_within_one(self, rgb):
        r, g, b = rgb
        back = lab_to_srgb(srgb_to_lab(r, g, b))
        assert abs(back.r - r) <= 1 and abs(back.g - g) <= 1 and abs(back.b - b) <= 1
        assert not back.clipped

    def test_out_of_gamut_flagged(self):
        # saturated Lab green far outside sRGB
        out = lab_to_srgb(LabColor(0.5, 0.0, 0.5))
        assert out.clipped


class TestLabColor:
    @given(unit, unit, unit)
    @settings(max_examples=100, deadline=None)
    def test_denormalize_round_trip(self, l, a, b):
        c = LabColor(l, a, b)
        back = LabColor.from_cielab(*c.denormalize())
        assert abs(back.l - l) < 1e-9
        assert abs(back.a - a) < 1e-9
        assert abs(back.b - b) < 1e-9


class TestColorDist:
    def test_identical_zero(self):
        assert color_dist(LabColor(0.3, 0.4, 0.5), LabColor(0.3, 0.4, 0.5)) == 0.0

    def test_unit_axis_step(self):
        assert color_dist((0, 0, 0), (1, 0, 0)) == pytest.approx(1.0)

    def test_visible_difference_scale(self):
        # a 0.05 step on L alone is a 0.05 distance in this representation
        assert color_dist((0.5, 0.5, 0.5), (0.55, 0.5, 0.5)) == pytest.approx(0.05)

    @given(st.lists(unit, min_size=9, max_size=9))
    @settings(max_examples=100, deadline=None)
    def test_metric_axioms(self, vals):
        a, b, c = np.asarray(vals).reshape(3, 3)
        assert color_dist(a, b) == pytest.approx(color_dist(b, a))
        assert color_dist(a, a) == 0.0
        assert color_dist(a, c) <= color_dist(a, b) + color_dist(b, c) + 1e-12


def _mhd_oracle(p, q):
    # directed averages evaluated directly, one side at a time
    def directed(src, dst):
        total = 0.0
        for s in src:
            total += min(float(np.linalg.norm(s - d)) for d in dst)
        return total / len(src)

    return max(directed(p, q), directed(q, p))


class TestMhd:
    def test_identical_sets_zero(self, rng):
        p = rng.random((6, 3))
        assert mhd(p, p) == 0.0

    def test_singletons(self):
        assert mhd([(0, 0, 0)], [(1, 0, 0)]) == pytest.approx(1.0)

    def test_against_brute_force_oracle(self, rng):
        for _ in range(25):
            p = rng.random((5, 3))
            q = rng.random((7, 3))
            assert mhd(p, q) == pytest.approx(_mhd_oracle(p, q), abs=1e-12)

    def test_symmetry(self, rng):
        for _ in range(20):
            p = rng.random((4, 3))
            q = rng.random((9, 3))
            assert mhd(p, q) == mhd(q, p)

    def test_empty_set_error(self):
        with pytest.raises(ValueError, match="empty color set"):
            mhd(np.empty((0, 3)), [(0.5, 0.5, 0.5)])


class TestDomainTypes:
    def test_palette_k_bounds(self, rng):
        with pytest.raises(ValueError):
            Palette(rng.random((17, 3)))
        with pytest.raises(ValueError):
            Palette(np.empty((0, 3)))

    def test_palette_component_range(self):
        with pytest.raises(ValueError):
            Palette(np.full((3, 3), 1.5))

    def test_palette_set_shared_k(self, rng):
        with pytest.raises(ValueError):
            PaletteSet.from_palettes([Palette(rng.random((3, 3))), Palette(rng.random((4, 3)))])

    def test_palette_set_needs_members(self):
        with pytest.raises(ValueError):
            PaletteSet(np.empty((0, 4, 3)))

    def test_permuted_keeps_multiset(self, rng):
        p = Palette(rng.random((5, 3)))
        q = p.permuted([4, 3, 2, 1, 0])
        assert np.array_equal(np.sort(p.colors, axis=0), np.sort(q.colors, axis=0))
