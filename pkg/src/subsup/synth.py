"""Synthetic two-class Gaussian models with a strong shared backbone and a weak class-specific signal."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .infomodel import GaussianClassModel
from .polymatroid import rng_for

PSD_MARGIN = 1e-6


@dataclass(frozen=True)
class SynthSpec:
    n: int
    seed: int = 0
    common_strength: float = 0.6
    disc_strength: float = 0.2
    diagonal_load: float | None = None
    disc_pair: tuple[int, int] | None = None
    shift_ratio: float = 0.4

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError(f"synthetic models need n >= 2, got {self.n}")
        if not -1 < self.common_strength < 1:
            raise ValidationError("common_strength must lie in (-1, 1)")
        if self.diagonal_load is not None and self.diagonal_load < 0:
            raise ValidationError("diagonal_load must be >= 0")

    @property
    def pair(self) -> tuple[int, int]:
        return self.disc_pair or (0, self.n - 1)

    def to_json(self) -> dict:
        d = asdict(self)
        d["disc_pair"] = list(self.pair)
        return d


def backbone(edge_strengths) -> np.ndarray:
    """Gaussian Markov-chain correlation: corr(i, j) = product of edge strengths between i and j."""
    r = np.asarray(edge_strengths, dtype=np.float64)
    n = r.size + 1
    c = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            c[i, j] = c[j, i] = np.prod(r[i:j])
    return c


def class_covariances(spec: SynthSpec) -> np.ndarray:
    """Two unit-diagonal covariances: a chain backbone plus +/- disc_strength on the designated pair.

    Chain edge e has strength common * (1 +/- shift_ratio * disc_strength * u_e)
    in class 1/2, with u_e ~ U(0.5, 1) drawn from ``spec.seed``: the backbone
    is nearly shared and carries a weaker class signal than the pair.

    If ``diagonal_load`` is None the smallest load keeping both classes
    positive definite is used; loading is followed by rescaling to unit
    diagonal so the per-variable variances stay identical across classes.
    """
    n = spec.n
    u = rng_for((spec.seed, 0x5EED)).uniform(0.5, 1.0, size=n - 1)
    i, j = spec.pair
    covs = []
    for sign in (1.0, -1.0):
        shift = 1.0 + sign * spec.shift_ratio * spec.disc_strength * u
        c = backbone(spec.common_strength * shift)
        c[i, j] = c[j, i] = c[i, j] + sign * spec.disc_strength
        covs.append(c)
    covs = np.array(covs)
    lo = min(float(np.linalg.eigvalsh(c)[0]) for c in covs)
    load = spec.diagonal_load
    if load is None:
        load = 0.0 if lo > PSD_MARGIN else PSD_MARGIN - lo + 1e-3
    if load:
        covs = covs + load * np.eye(n)
        d = 1.0 / np.sqrt(np.diagonal(covs, axis1=1, axis2=2))
        covs = covs * d[:, :, None] * d[:, None, :]
    for k, c in enumerate(covs):
        lo = float(np.linalg.eigvalsh(c)[0])
        if lo <= 0:
            raise NumericalError(f"class {k + 1} covariance not positive definite after loading "
                                 f"(smallest eigenvalue {lo:.3e})")
    return covs


def make_synth_model(spec: SynthSpec) -> GaussianClassModel:
    return GaussianClassModel(class_covariances(spec), [0.5, 0.5])


def sample_covariance(x: np.ndarray) -> np.ndarray:
    """Zero-mean maximum-likelihood estimate (1/N normalizer)."""
    x = np.asarray(x, dtype=np.float64)
    return x.T @ x / x.shape[0]


def estimate_model(x: np.ndarray, y: np.ndarray, class_count: int = 2) -> GaussianClassModel:
    covs, priors = [], []
    for c in range(class_count):
        xc = x[y == c]
        if xc.shape[0] <= x.shape[1]:
            raise NumericalError(f"class {c + 1} has too few samples ({xc.shape[0]}) to estimate a covariance")
        covs.append(sample_covariance(xc))
        priors.append(xc.shape[0] / x.shape[0])
    priors = np.array(priors)
    return GaussianClassModel(np.array(covs), priors / priors.sum(), check_variances=False)
