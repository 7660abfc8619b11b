"""Gaussian process latent variable model over sorted-palette feature vectors.

A palette of K colors flattens to a 3K-vector; the model places one latent
point per training palette in a q-dimensional space and ties them to the
data through a shared RBF kernel. Training minimizes the GP marginal
negative log-likelihood jointly over latent points and kernel
hyperparameters with scaled conjugate gradients. The trained model supports
back-projection (latent point -> palette, with predictive variance), a
density map over a 2-D latent slice, and completion of partially observed
palettes by projecting into latent space with zero precision on the missing
dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular
from scipy.linalg.lapack import dpotri

from .bps import SortedPaletteSet
from .color import PaletteSet
from .scg import minimize_scg

JITTER_LADDER = (0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4)


def spf_matrix(s: SortedPaletteSet | PaletteSet) -> np.ndarray:
    """Sorted Palette Features: each palette flattened to a 3K row vector."""
    colors = s.colors
    return colors.reshape(colors.shape[0], -1).copy()


def spf_to_palette_colors(vec: np.ndarray, k: int) -> np.ndarray:
    """Decode a 3K feature vector to (K, 3), clamped to the unit cube."""
    return np.clip(np.asarray(vec, dtype=np.float64).reshape(k, 3), 0.0, 1.0)


@dataclass(frozen=True)
class DensityGrid:
    values: np.ndarray  # (res, res) log-likelihood, row-major over y then x
    extents: tuple[float, float, float, float]  # xmin, xmax, ymin, ymax
    dims: tuple[int, int]
    resolution: int


@dataclass
class GplvmModel:
    k: int
    q: int
    y_mean: np.ndarray  # (D,)
    y_centered: np.ndarray  # (N, D)
    x_latent: np.ndarray  # (N, q)
    alpha: float  # RBF variance
    gamma: float  # RBF inverse squared lengthscale
    beta: float  # noise precision
    degenerate: bool = False
    train_log: list[float] = field(default_factory=list)
    _chol: np.ndarray | None = field(default=None, repr=False, compare=False)
    _kinv: np.ndarray | None = field(default=None, repr=False, compare=False)
    _kinv_y: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.y_centered.shape[0]

    @property
    def dim(self) -> int:
        return self.y_centered.shape[1]

    def training_palettes(self) -> PaletteSet:
        y = self.y_centered + self.y_mean
        return PaletteSet(np.clip(y.reshape(self.n, self.k, 3), 0.0, 1.0))

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "type": "gplvm",
            "k": self.k,
            "q": self.q,
            "data_mean": self.y_mean.tolist(),
            "X": self.x_latent.tolist(),
            "Y": self.y_centered.tolist(),
            "hyperparams": {"alpha": self.alpha, "gamma": self.gamma, "beta": self.beta},
            "degenerate": self.degenerate,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GplvmModel":
        hp = doc["hyperparams"]
        model = cls(
            k=int(doc["k"]),
            q=int(doc["q"]),
            y_mean=np.asarray(doc["data_mean"], dtype=np.float64),
            y_centered=np.asarray(doc["Y"], dtype=np.float64),
            x_latent=np.asarray(doc["X"], dtype=np.float64),
            alpha=float(hp["alpha"]),
            gamma=float(hp["gamma"]),
            beta=float(hp["beta"]),
            degenerate=bool(doc.get("degenerate", False)),
        )
        model.refresh_cache()
        return model

    # -- kernel plumbing ---------------------------------------------------
    def kernel_matrix(self) -> np.ndarray:
        sq = _sqdist(self.x_latent, self.x_latent)
        return self.alpha * np.exp(-0.5 * self.gamma * sq) + np.eye(self.n) / self.beta

    def refresh_cache(self) -> None:
        kmat = self.kernel_matrix()
        chol = _chol_with_jitter(kmat)
        self._chol = chol
        self._kinv = _spd_inverse(chol)
        self._kinv_y = self._kinv @ self.y_centered

    def _ensure_cache(self):
        if self._chol is None:
            self.refresh_cache()

    def kvec(self, x: np.ndarray) -> np.ndarray:
        d = self.x_latent - x[None, :]
        return self.alpha * np.exp(-0.5 * self.gamma * (d**2).sum(axis=1))

    def predict(self, x: np.ndarray) -> tuple[np.ndarray, float]:
        """GP posterior mean (D,) and shared per-dimension variance at x."""
        self._ensure_cache()
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.q,):
            raise ValueError(f"latent point must have dimension {self.q}")
        if not np.all(np.isfinite(x)):
            raise ValueError("latent point must be finite")
        kv = self.kvec(x)
        mean = kv @ self._kinv_y + self.y_mean
        var = float(self.alpha + 1.0 / self.beta - kv @ (self._kinv @ kv))
        return mean, max(var, 1e-12)

    def predict_palette(self, x: np.ndarray):
        from .color import Palette

        mean, var = self.predict(x)
        return Palette(spf_to_palette_colors(mean, self.k)), var


def _sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = a @ b.T
    out *= -2.0
    out += (a**2).sum(axis=1)[:, None]
    out += (b**2).sum(axis=1)[None, :]
    np.maximum(out, 0.0, out=out)
    return out


def _chol_with_jitter(kmat: np.ndarray) -> np.ndarray:
    scale = float(np.mean(np.diag(kmat)))
    for jit in JITTER_LADDER:
        try:
            return np.linalg.cholesky(kmat + jit * scale * np.eye(kmat.shape[0]))
        except np.linalg.LinAlgError:
            continue
    raise np.linalg.LinAlgError(
        "kernel matrix is not positive definite even at jitter 1e-4"
    )


def _solve_tri(chol: np.ndarray, b: np.ndarray) -> np.ndarray:
    return solve_triangular(chol, b, lower=True, check_finite=False)


def _spd_inverse(chol: np.ndarray) -> np.ndarray:
    """Full inverse from a lower Cholesky factor (LAPACK dpotri)."""
    inv, info = dpotri(chol, lower=1)
    if info != 0:
        raise np.linalg.LinAlgError(f"dpotri failed with info={info}")
    # dpotri fills one triangle; mirror it
    inv = inv + np.tril(inv, -1).T
    return inv


def _pack(x: np.ndarray, alpha: float, gamma: float, beta: float) -> np.ndarray:
    return np.concatenate([x.ravel(), np.log([alpha, gamma, beta])])


def _unpack(theta: np.ndarray, n: int, q: int):
    x = theta[: n * q].reshape(n, q)
    alpha, gamma, beta = np.exp(theta[n * q :])
    return x, float(alpha), float(gamma), float(beta)


def _nll_and_grad(theta: np.ndarray, yc: np.ndarray, n: int, q: int):
    """Marginal NLL over all output dims and its gradient w.r.t. theta."""
    x, alpha, gamma, beta = _unpack(theta, n, q)
    d_out = yc.shape[1]
    sq = _sqdist(x, x)
    rbf = np.exp(sq * (-0.5 * gamma))
    rbf *= alpha
    kmat = rbf.copy()
    kmat[np.diag_indices(n)] += 1.0 / beta
    chol = _chol_with_jitter(kmat)

    half_logdet = float(np.log(np.diag(chol)).sum())
    liy = _solve_tri(chol, yc)  # L^{-1} Y
    nll = d_out * half_logdet + 0.5 * float((liy**2).sum()) + 0.5 * n * d_out * math.log(2 * math.pi)

    kinv = _spd_inverse(chol)
    a = kinv @ yc  # K^{-1} Y
    gmat = a @ a.T
    gmat *= -0.5
    gmat += (0.5 * d_out) * kinv  # dNLL/dK

    w = gmat * rbf
    d_alpha = float(w.sum())  # w.r.t. log alpha
    d_gamma = float(-0.5 * gamma * (w * sq).sum())  # w.r.t. log gamma
    d_beta = float(-np.trace(gmat) / beta)  # w.r.t. log beta

    rs = w.sum(axis=1)
    dx = w @ x
    dx -= rs[:, None] * x
    dx *= 2.0 * gamma

    grad = np.concatenate([dx.ravel(), [d_alpha, d_gamma, d_beta]])
    return float(nll), grad


def gplvm_nll(model: GplvmModel) -> float:
    """Negative log marginal likelihood at the model's current state."""
    theta = _pack(model.x_latent, model.alpha, model.gamma, model.beta)
    nll, _ = _nll_and_grad(theta, model.y_centered, model.n, model.q)
    return nll


def gplvm_grad(model: GplvmModel) -> dict[str, np.ndarray | float]:
    """Analytic NLL gradients w.r.t. latent points and log-hyperparameters."""
    theta = _pack(model.x_latent, model.alpha, model.gamma, model.beta)
    _, grad = _nll_and_grad(theta, model.y_centered, model.n, model.q)
    nq = model.n * model.q
    return {
        "x": grad[:nq].reshape(model.n, model.q),
        "log_alpha": float(grad[nq]),
        "log_gamma": float(grad[nq + 1]),
        "log_beta": float(grad[nq + 2]),
    }


def train_gplvm(
    s: SortedPaletteSet | PaletteSet,
    q: int = 4,
    iters: int = 200,
    seed: int = 0,
) -> GplvmModel:
    """Fit latent points and kernel hyperparameters by SCG.

    Latents initialize from a whitened PCA of the centered data. The training
    objective is the marginal NLL plus the standard unit-Gaussian prior on
    the latent points (without it the latent scale is degenerate against the
    kernel lengthscale and spare dimensions never shrink); the training log
    records that objective at every accepted step and is non-increasing.
    """
    y = spf_matrix(s)
    n, d_out = y.shape
    k = d_out // 3
    if q >= d_out:
        raise ValueError("latent dimension must be smaller than the data dimension")
    if n < 2 * q:
        raise ValueError(f"need at least {2 * q} palettes to train with q={q}")
    y_mean = y.mean(axis=0)
    yc = y - y_mean

    total_var = float((yc**2).sum()) / max(n - 1, 1)
    if total_var < 1e-16:
        model = GplvmModel(
            k=k, q=q, y_mean=y_mean, y_centered=yc,
            x_latent=np.zeros((n, q)), alpha=1e-6, gamma=1.0, beta=1e6,
            degenerate=True, train_log=[],
        )
        model.refresh_cache()
        return model

    x0 = _pca_init(yc, q, seed)
    alpha0 = max(total_var / d_out, 1e-8)
    beta0 = 100.0 / alpha0
    gamma0 = 1.0
    theta0 = _pack(x0, alpha0, gamma0, beta0)

    def fg(theta):
        nll, grad = _nll_and_grad(theta, yc, n, q)
        x_flat = theta[: n * q]
        nll += 0.5 * float(x_flat @ x_flat)
        grad = grad.copy()
        grad[: n * q] += x_flat
        return nll, grad

    result = minimize_scg(fg, theta0, max_iters=iters)
    if not np.isfinite(result.f):
        raise FloatingPointError("GPLVM optimization produced a non-finite NLL")
    x, alpha, gamma, beta = _unpack(result.x, n, q)
    model = GplvmModel(
        k=k, q=q, y_mean=y_mean, y_centered=yc, x_latent=x,
        alpha=alpha, gamma=gamma, beta=beta,
        degenerate=False, train_log=list(result.f_log),
    )
    model.refresh_cache()
    return model


def _pca_init(yc: np.ndarray, q: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    u, sv, _ = np.linalg.svd(yc, full_matrices=False)
    scores = u[:, :q] * sv[:q]
    std = scores.std(axis=0)
    std[std < 1e-12] = 1.0
    x0 = scores / std
    if x0.shape[1] < q:  # rank-deficient data: pad with tiny noise
        pad = rng.normal(scale=1e-3, size=(yc.shape[0], q - x0.shape[1]))
        x0 = np.hstack([x0, pad])
    return x0 + rng.normal(scale=1e-6, size=x0.shape)


def pick_display_dims(model: GplvmModel) -> tuple[int, int]:
    """The two latent dimensions with the largest coordinate variance."""
    var = model.x_latent.var(axis=0)
    order = np.argsort(-var, kind="stable")
    a, b = int(order[0]), int(order[1])
    return (a, b) if a < b else (b, a)


def default_extents(model: GplvmModel, dims: tuple[int, int]) -> tuple[float, float, float, float]:
    xs = model.x_latent[:, dims[0]]
    ys = model.x_latent[:, dims[1]]
    mx = 0.1 * max(float(xs.max() - xs.min()), 1e-6)
    my = 0.1 * max(float(ys.max() - ys.min()), 1e-6)
    return (float(xs.min()) - mx, float(xs.max()) + mx, float(ys.min()) - my, float(ys.max()) + my)


def gplvm_backproject(model: GplvmModel, x: np.ndarray) -> tuple[np.ndarray, float]:
    """GP posterior mean in palette-feature space and its shared variance."""
    return model.predict(np.asarray(x, dtype=np.float64))


def _projection_objective(model: GplvmModel, y_obs: np.ndarray, obs_dims: np.ndarray):
    """Observed-dims-only projection objective as a function of x.

    Negative log predictive density plus the unit-Gaussian latent prior, as
    in training. Missing output dimensions carry zero precision (their noise
    variance is taken to infinity), which drops their data terms.
    """
    model._ensure_cache()
    a_obs = model._kinv_y[:, obs_dims]  # (N, Do)
    mean_obs = model.y_mean[obs_dims]
    x_train = model.x_latent
    kinv = model._kinv
    d_obs = int(obs_dims.sum())
    gamma = model.gamma
    const = 0.5 * d_obs * math.log(2 * math.pi)

    def fg(x: np.ndarray):
        diff = x[None, :] - x_train  # (N, q)
        kv = model.alpha * np.exp(-0.5 * gamma * (diff**2).sum(axis=1))
        mu = kv @ a_obs + mean_obs
        w = kinv @ kv
        s = float(model.alpha + 1.0 / model.beta - kv @ w)
        s = max(s, 1e-12)
        r = y_obs - mu
        rr = float(r @ r)
        f = 0.5 * rr / s + 0.5 * d_obs * math.log(s) + const + 0.5 * float(x @ x)
        c = a_obs @ r  # (N,)
        term1 = (gamma / s) * ((c * kv) @ diff)
        term2 = gamma * (d_obs / s - rr / (s * s)) * ((w * kv) @ diff)
        return f, term1 + term2 + x

    return fg


def completion_init(model: GplvmModel, p) -> np.ndarray:
    """Latent start point: the training item nearest in the observed dims."""
    obs_dims = p.observed_dims()
    y_obs = p.colors.reshape(-1)[obs_dims]
    y_train_obs = (model.y_centered + model.y_mean)[:, obs_dims]
    idx = int(((y_train_obs - y_obs[None, :]) ** 2).sum(axis=1).argmin())
    return model.x_latent[idx].copy()


def gplvm_complete(model: GplvmModel, p, sim_iters: int = 50, clamp_observed: bool = False):
    """Fill the missing colors of a partially observed palette.

    Projects into latent space starting from the nearest training point,
    optimizing the observed-dims likelihood for ``sim_iters`` SCG steps
    (0 keeps the initialization), then back-projects. With
    ``clamp_observed`` the observed slots are overwritten by their inputs.
    """
    from .color import Palette

    if p.k != model.k:
        raise ValueError(f"partial palette K={p.k} does not match model K={model.k}")
    x = completion_init(model, p)
    if sim_iters > 0 and not model.degenerate:
        obs_dims = p.observed_dims()
        y_obs = p.colors.reshape(-1)[obs_dims]
        fg = _projection_objective(model, y_obs, obs_dims)
        x = minimize_scg(fg, x, max_iters=sim_iters).x
    mean, _ = model.predict(x)
    colors = spf_to_palette_colors(mean, model.k)
    if clamp_observed:
        colors = colors.copy()
        colors[p.observed] = p.colors[p.observed]
    return Palette(colors)


def gplvm_density(
    model: GplvmModel,
    dims: tuple[int, int] | None = None,
    resolution: int = 64,
    extents: tuple[float, float, float, float] | None = None,
) -> DensityGrid:
    """Log-likelihood of the back-projected point over a 2-D latent slice.

    At each grid location x (other latent dims fixed at 0) the value is the
    log of the predictive density evaluated at its own mean, so it grows as
    the predictive variance shrinks near the training data.
    """
    if dims is None:
        dims = pick_display_dims(model)
    i, j = dims
    if i == j or not (0 <= i < model.q and 0 <= j < model.q):
        raise ValueError("dims must be two distinct latent dimensions")
    base = default_extents(model, dims)
    if extents is None:
        extents = base
    else:
        # grid must cover the training points' slice projections
        extents = (
            min(extents[0], base[0]), max(extents[1], base[1]),
            min(extents[2], base[2]), max(extents[3], base[3]),
        )
    xmin, xmax, ymin, ymax = extents
    model._ensure_cache()
    xs = np.linspace(xmin, xmax, resolution)
    ys = np.linspace(ymin, ymax, resolution)
    values = np.empty((resolution, resolution))
    point = np.zeros(model.q)
    const = -0.5 * model.dim * math.log(2 * math.pi)
    for r, yv in enumerate(ys):
        for c, xv in enumerate(xs):
            point[i] = xv
            point[j] = yv
            _, var = model.predict(point)
            values[r, c] = const - 0.5 * model.dim * math.log(var)
    return DensityGrid(values=values, extents=extents, dims=(i, j), resolution=resolution)
