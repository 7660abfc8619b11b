import numpy as np
import pytest

from palette_orchestra.bps import SortedPaletteSet
from palette_orchestra.color import PaletteSet
from palette_orchestra.dataio import load_model, save_model
from palette_orchestra.gmm import GmmModel, gmm_complete, train_pca_gmm
from palette_orchestra.partial import PartialPalette


def gaussian_palette_set(n, k, seed, rank=None):
    """Jointly Gaussian palette data with optional low-rank structure."""
    rng = np.random.default_rng(seed)
    dim = 3 * k
    rank = rank or dim
    mixing = rng.normal(size=(rank, dim)) * 0.06
    z = rng.normal(size=(n, rank))
    y = 0.5 + z @ mixing
    return PaletteSet(np.clip(y, 0, 1).reshape(n, k, 3))


def conditional_mean_oracle(mean, cov, obs_mask, y_obs):
    """Gaussian conditioning done from scratch for cross-checking."""
    mis = ~obs_mask
    s_oo = cov[np.ix_(obs_mask, obs_mask)]
    s_mo = cov[np.ix_(mis, obs_mask)]
    return mean[mis] + s_mo @ np.linalg.solve(s_oo, y_obs - mean[obs_mask])


class TestTraining:
    def test_em_log_likelihood_nondecreasing(self, rng):
        ps = PaletteSet(rng.random((60, 4, 3)))
        model = train_pca_gmm(ps, d=6, components=4, seed=0)
        log = np.asarray(model.train_log)
        # the tiny covariance ridge can perturb exact EM monotonicity
        assert np.all(np.diff(log) >= -1e-7 * np.abs(log[:-1]))

    def test_single_gaussian_recovers_mean(self):
        ps = gaussian_palette_set(400, 3, seed=1)
        model = train_pca_gmm(ps, d=9, components=1, seed=0)
        sample_mean = ps.colors.reshape(400, -1).mean(axis=0)
        recon_mean = model.data_mean + model.means[0] @ model.basis
        se = ps.colors.reshape(400, -1).std(axis=0) / np.sqrt(400)
        assert np.all(np.abs(recon_mean - sample_mean) <= 3 * se + 1e-9)

    def test_needs_enough_palettes(self, rng):
        ps = PaletteSet(rng.random((5, 3, 3)))
        with pytest.raises(ValueError):
            train_pca_gmm(ps, d=8, components=2, seed=0)
        with pytest.raises(ValueError):
            train_pca_gmm(ps, d=2, components=10, seed=0)

    def test_weights_sum_to_one(self, rng):
        ps = PaletteSet(rng.random((50, 3, 3)))
        model = train_pca_gmm(ps, d=5, components=3, seed=2)
        assert model.weights.sum() == pytest.approx(1.0)
        for cov in model.covs:
            np.linalg.cholesky(cov)  # positive definite

    def test_serialization_round_trip(self, tmp_path):
        ps = gaussian_palette_set(80, 3, seed=3)
        model = train_pca_gmm(ps, d=6, components=2, seed=0)
        save_model(tmp_path / "g.json", model)
        loaded = load_model(tmp_path / "g.json")
        assert isinstance(loaded, GmmModel)
        p = PartialPalette(colors=ps.colors[0], observed=np.array([True, True, False]))
        a = gmm_complete(model, p)
        b = gmm_complete(loaded, p)
        assert np.abs(a.colors - b.colors).max() < 1e-12


class TestCompletion:
    def test_single_component_closed_form(self):
        # rank <= d so the PCA is lossless and conditioning is exact
        ps = gaussian_palette_set(300, 3, seed=4, rank=6)
        model = train_pca_gmm(ps, d=6, components=1, seed=0)
        mean, cov = model.full_space_component(0)
        mask = np.array([True, False, True])
        p = PartialPalette(colors=ps.colors[10], observed=mask)
        got = gmm_complete(model, p)
        want = conditional_mean_oracle(
            mean, cov, p.observed_dims(), p.colors.reshape(-1)[p.observed_dims()]
        )
        assert np.abs(got.colors.reshape(-1)[~p.observed_dims()] - want).max() < 1e-6

    def test_observed_mean_slice_returns_mean(self):
        ps = gaussian_palette_set(200, 3, seed=5, rank=6)
        model = train_pca_gmm(ps, d=6, components=2, seed=1)
        mean, _ = model.full_space_component(0)
        colors = mean.reshape(3, 3)
        mask = np.array([True, True, False])
        p = PartialPalette(colors=np.clip(colors, 0, 1), observed=mask)
        out = gmm_complete(model, p)
        assert np.abs(out.colors[2] - colors[2]).max() < 0.05

    def test_symmetric_mixture_averages(self):
        # two components mirrored around 0.5; an equidistant observation
        # must land exactly between the two conditional means
        d = 6
        basis = np.eye(d, 9)
        base_cov = 0.01 * np.eye(d)
        delta = np.zeros(d)
        delta[0] = 0.2
        model = GmmModel(
            k=3, d=d, data_mean=np.full(9, 0.5), basis=basis, resid_var=1e-6,
            weights=np.array([0.5, 0.5]),
            means=np.stack([delta, -delta]),
            covs=np.stack([base_cov, base_cov]),
        )
        mask = np.array([False, True, True])
        p = PartialPalette(colors=np.full((3, 3), 0.5), observed=mask)
        out = gmm_complete(model, p)
        means = [model.full_space_component(c)[0] for c in (0, 1)]
        expected_first = 0.5 * (means[0][:3] + means[1][:3])
        assert np.abs(out.colors[0] - expected_first.clip(0, 1)).max() < 1e-9

    def test_observed_slots_kept(self, rng):
        ps = gaussian_palette_set(100, 3, seed=6)
        model = train_pca_gmm(ps, d=5, components=2, seed=0)
        mask = np.array([True, False, True])
        p = PartialPalette(colors=ps.colors[4], observed=mask)
        out = gmm_complete(model, p)
        assert np.array_equal(out.colors[mask], p.colors[mask])

    def test_k_mismatch_rejected(self, rng):
        ps = gaussian_palette_set(100, 3, seed=7)
        model = train_pca_gmm(ps, d=5, components=2, seed=0)
        p = PartialPalette(colors=rng.random((4, 3)), observed=np.ones(4, dtype=bool))
        with pytest.raises(ValueError):
            gmm_complete(model, p)
