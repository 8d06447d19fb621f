"""Random submodular test instances (cut functions, Gaussian entropies/MI, concave-of-modular)."""

from __future__ import annotations

import numpy as np

from .polymatroid import ModularWeights, rng_for
from .setcore import GroundSet, SetFunctionOracle, members


def random_spd(n, rng, condition=10.0):
    """Random symmetric positive-definite matrix with unit-ish scale."""
    a = rng.standard_normal((n, n))
    q, _ = np.linalg.qr(a)
    eig = np.exp(rng.uniform(0.0, np.log(condition), size=n))
    m = (q * eig) @ q.T
    return 0.5 * (m + m.T)


def logdet_entropy(cov):
    """Gaussian differential entropy oracle S -> 1/2 ln((2 pi e)^|S| det cov_S)."""
    cov = np.asarray(cov, dtype=np.float64)
    n = cov.shape[0]
    c = np.log(2 * np.pi * np.e)

    def h(mask):
        idx = members(mask)
        if not idx:
            return 0.0
        sign, ld = np.linalg.slogdet(cov[np.ix_(idx, idx)])
        return 0.5 * (len(idx) * c + ld)

    return SetFunctionOracle(GroundSet(n), h, memoize=True, name="gaussian-entropy")


def gaussian_mi(cov):
    """Symmetric submodular f(A) = I(X_A; X_{V\\A}) for a Gaussian with covariance ``cov``."""
    cov = np.asarray(cov, dtype=np.float64)
    n = cov.shape[0]
    full = (1 << n) - 1
    h = logdet_entropy(cov)
    hv = h._value(full)
    return SetFunctionOracle(GroundSet(n), lambda m: h._value(m) + h._value(full ^ m) - hv,
                             memoize=True, name="gaussian-mi")


def cut_function(weights):
    """Undirected cut f(A) = sum of w_ij over edges crossing (A, V\\A); symmetric submodular for w >= 0."""
    w = np.asarray(weights, dtype=np.float64)
    w = np.triu(w, 1)
    w = w + w.T
    n = w.shape[0]

    def f(mask):
        inside = members(mask)
        if not inside or len(inside) == n:
            return 0.0
        outside = [i for i in range(n) if not mask >> i & 1]
        return float(w[np.ix_(inside, outside)].sum())

    return SetFunctionOracle(GroundSet(n), f, memoize=True, name="cut")


def concave_of_modular(weights, power=0.5):
    """f(A) = (sum_{i in A} w_i)^power with w >= 0 and 0 < power <= 1."""
    m = ModularWeights(GroundSet(len(weights)), np.abs(weights))
    return SetFunctionOracle(m.ground, lambda s: m._value(s) ** power, memoize=True,
                             name="concave-modular")


def random_cut(n, seed, density=0.6):
    rng = rng_for(seed)
    w = rng.uniform(0.0, 1.0, size=(n, n)) * (rng.uniform(size=(n, n)) < density)
    return cut_function(w)


def random_gaussian_mi(n, seed):
    return gaussian_mi(random_spd(n, rng_for(seed)))


def random_gaussian_entropy(n, seed):
    return logdet_entropy(random_spd(n, rng_for(seed)))


def random_submodular(n, seed, kind=None):
    """A random (generally non-symmetric) submodular oracle.

    ``kind`` picks one of ``cut+modular``, ``entropy``, ``mi+modular``,
    ``concave+modular``; by default it cycles with the seed.
    """
    kinds = ("cut+modular", "entropy", "mi+modular", "concave+modular")
    rng = rng_for((seed, 7))
    kind = kind or kinds[seed % len(kinds)]
    mod = ModularWeights(GroundSet(n), rng.uniform(-1.0, 1.0, size=n))
    if kind == "cut+modular":
        return random_cut(n, seed) + mod
    if kind == "entropy":
        return random_gaussian_entropy(n, seed)
    if kind == "mi+modular":
        return random_gaussian_mi(n, seed) + mod * 0.3
    if kind == "concave+modular":
        return concave_of_modular(rng.uniform(0.0, 2.0, size=n)) + mod
    raise ValueError(f"unknown kind {kind!r}")


def random_symmetric(n, seed):
    """Alternates Gaussian-MI and cut instances."""
    return random_gaussian_mi(n, seed) if seed % 2 == 0 else random_cut(n, seed)
