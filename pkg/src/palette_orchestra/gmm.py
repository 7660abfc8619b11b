"""PCA + Gaussian mixture baseline over sorted-palette features.

PCA reduces the 3K palette vectors to d dimensions; an EM-fitted mixture of
full-covariance Gaussians models the reduced data. Completion maps the
mixture back through the PCA basis (plus the mean discarded variance on the
diagonal) and takes the standard conditional expectation of the missing
dimensions given the observed ones, weighted by posterior responsibilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bps import SortedPaletteSet
from .color import Palette, PaletteSet
from .gplvm import spf_matrix, spf_to_palette_colors
from .partial import PartialPalette


@dataclass
class GmmModel:
    k: int
    d: int
    data_mean: np.ndarray  # (D,)
    basis: np.ndarray  # (d, D), orthonormal rows
    resid_var: float  # mean variance in the discarded subspace
    weights: np.ndarray  # (C,)
    means: np.ndarray  # (C, d) in PCA space
    covs: np.ndarray  # (C, d, d)
    train_log: list[float] = field(default_factory=list)

    @property
    def components(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return self.data_mean.shape[0]

    def to_dict(self) -> dict:
        return {
            "type": "pca-gmm",
            "k": self.k,
            "d": self.d,
            "data_mean": self.data_mean.tolist(),
            "pca_basis": self.basis.tolist(),
            "resid_var": self.resid_var,
            "mixture": {
                "weights": self.weights.tolist(),
                "means": self.means.tolist(),
                "covs": self.covs.tolist(),
            },
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GmmModel":
        mix = doc["mixture"]
        return cls(
            k=int(doc["k"]),
            d=int(doc["d"]),
            data_mean=np.asarray(doc["data_mean"], dtype=np.float64),
            basis=np.asarray(doc["pca_basis"], dtype=np.float64),
            resid_var=float(doc["resid_var"]),
            weights=np.asarray(mix["weights"], dtype=np.float64),
            means=np.asarray(mix["means"], dtype=np.float64),
            covs=np.asarray(mix["covs"], dtype=np.float64),
        )

    def full_space_component(self, c: int) -> tuple[np.ndarray, np.ndarray]:
        """Mean and covariance of component c mapped back to palette space."""
        mean = self.data_mean + self.means[c] @ self.basis
        cov = self.basis.T @ self.covs[c] @ self.basis
        cov = cov + max(self.resid_var, 1e-10) * np.eye(self.dim)
        return mean, cov


def _log_gauss(z: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> np.ndarray:
    d = mean.shape[0]
    chol = np.linalg.cholesky(cov)
    diff = z - mean[None, :]
    sol = np.linalg.solve(chol, diff.T)
    maha = (sol**2).sum(axis=0)
    logdet = 2.0 * float(np.log(np.diag(chol)).sum())
    return -0.5 * (maha + logdet + d * math.log(2 * math.pi))


def _logsumexp(a: np.ndarray, axis: int) -> np.ndarray:
    m = a.max(axis=axis, keepdims=True)
    return (m + np.log(np.exp(a - m).sum(axis=axis, keepdims=True))).squeeze(axis)


def train_pca_gmm(
    s: SortedPaletteSet | PaletteSet,
    d: int = 8,
    components: int = 10,
    seed: int = 0,
    iters: int = 200,
) -> GmmModel:
    """PCA to d dims, then EM for a C-component full-covariance mixture.

    The per-iteration data log-likelihood is recorded and is non-decreasing;
    covariances carry a 1e-6 * trace/d ridge to stay positive definite.
    """
    y = spf_matrix(s)
    n, dim = y.shape
    k = dim // 3
    d = min(d, dim)
    if n <= d:
        raise ValueError("need more palettes than PCA dimensions")
    if n <= components:
        raise ValueError("need more palettes than mixture components")
    data_mean = y.mean(axis=0)
    yc = y - data_mean
    _, sv, vt = np.linalg.svd(yc, full_matrices=False)
    basis = vt[:d]
    eigvals = (sv**2) / max(n - 1, 1)
    resid_var = float(eigvals[d:].mean()) if d < len(eigvals) and d < dim else 0.0
    z = yc @ basis.T  # (n, d)

    rng = np.random.default_rng(seed)
    c = components
    means = z[rng.choice(n, size=c, replace=False)]
    base_cov = np.cov(z.T).reshape(d, d) + 1e-6 * np.eye(d)
    covs = np.tile(base_cov, (c, 1, 1))
    weights = np.full(c, 1.0 / c)

    log = []
    prev = -np.inf
    for _ in range(iters):
        # E step
        logp = np.stack(
            [np.log(weights[j]) + _log_gauss(z, means[j], covs[j]) for j in range(c)],
            axis=1,
        )  # (n, C)
        total = _logsumexp(logp, axis=1)
        ll = float(total.sum())
        log.append(ll)
        resp = np.exp(logp - total[:, None])
        # M step
        nk = resp.sum(axis=0) + 1e-12
        weights = nk / n
        means = (resp.T @ z) / nk[:, None]
        for j in range(c):
            diff = z - means[j][None, :]
            cov = (resp[:, j][:, None] * diff).T @ diff / nk[j]
            reg = 1e-6 * max(np.trace(cov), 1e-12) / d
            covs[j] = cov + reg * np.eye(d)
        if ll - prev < 1e-9 * max(abs(ll), 1.0) and len(log) > 1:
            break
        prev = ll
    return GmmModel(
        k=k, d=d, data_mean=data_mean, basis=basis, resid_var=resid_var,
        weights=weights, means=means, covs=covs, train_log=log,
    )


def gmm_complete(model: GmmModel, p: PartialPalette) -> Palette:
    """Conditional expectation of the missing dims given the observed ones.

    Per component, standard Gaussian conditioning in palette space; the
    component conditionals are averaged under the posterior responsibilities
    of the observed slice. Observed slots keep their input colors.
    """
    if p.k != model.k:
        raise ValueError(f"partial palette K={p.k} does not match model K={model.k}")
    obs = p.observed_dims()
    mis = ~obs
    y_obs = p.colors.reshape(-1)[obs]

    c = model.components
    log_r = np.empty(c)
    cond_means = np.empty((c, int(mis.sum())))
    for j in range(c):
        mean, cov = model.full_space_component(j)
        mu_o, mu_m = mean[obs], mean[mis]
        s_oo = cov[np.ix_(obs, obs)]
        s_mo = cov[np.ix_(mis, obs)]
        chol = np.linalg.cholesky(s_oo)
        diff = y_obs - mu_o
        sol = np.linalg.solve(chol, diff)
        maha = float(sol @ sol)
        logdet = 2.0 * float(np.log(np.diag(chol)).sum())
        log_r[j] = math.log(model.weights[j] + 1e-300) - 0.5 * (
            maha + logdet + len(y_obs) * math.log(2 * math.pi)
        )
        w = np.linalg.solve(chol.T, sol)
        cond_means[j] = mu_m + s_mo @ w
    log_r -= _logsumexp(log_r[None, :], axis=1)
    resp = np.exp(log_r)

    full = p.colors.reshape(-1).copy()
    if mis.any():
        full[mis] = resp @ cond_means
    return Palette(spf_to_palette_colors(full, model.k))
