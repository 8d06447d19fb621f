"""Class-conditional models and the information-theoretic set functions built on them.

Two model families:

* ``DiscreteClassModel``: n binary variables; per class a probability table
  of length 2**n indexed by outcome bitmask (bit i = value of variable i).
* ``GaussianClassModel``: zero-mean Gaussians, one covariance per class.

All quantities are in nats. Entropies under "no class conditioning" use the
class mixture. For Gaussians the mixture is replaced by its moment-matched
Gaussian (pooled covariance), which is what a covariance-only oracle can see.
"""

from __future__ import annotations

import logging
import math
import threading
from typing import Sequence

import numpy as np

from . import kernels
from .errors import NumericalError, ValidationError
from .setcore import GroundSet, SetFunctionOracle, mask_of, members

log = logging.getLogger(__name__)

LOG_2PIE = math.log(2 * math.pi * math.e)
MAX_DISCRETE_N = 16
VARIANTS = ("marginal-mi", "conditional-mi", "classwise-mi")


def _check_priors(priors, path="class_priors"):
    p = np.array(priors, dtype=np.float64).reshape(-1)
    if p.size < 1:
        raise ValidationError("at least one class is required", path)
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValidationError(f"priors must be non-negative and sum to 1 (sum={p.sum()!r})", path)
    return p


class _ClassModel:
    """Shared caching and class bookkeeping."""

    kind = ""

    def __init__(self, n, priors, labels=None):
        self.ground = GroundSet(n, labels)
        self.priors = _check_priors(priors)
        self.priors.setflags(write=False)
        self._cache: dict[tuple[int | None, int], float] = {}
        self._lock = threading.Lock()

    @property
    def n(self) -> int:
        return self.ground.n

    @property
    def class_count(self) -> int:
        return self.priors.size

    def _entropy(self, cls, mask) -> float:
        raise NotImplementedError

    def entropy(self, mask: int, cls: int | None = None) -> float:
        """H(X_S) for class ``cls``; ``None`` means the unconditioned mixture."""
        if mask == 0:
            return 0.0
        key = (cls, mask)
        v = self._cache.get(key)
        if v is None:
            v = self._entropy(cls, mask)
            with self._lock:
                self._cache.setdefault(key, v)
        return v

    def class_entropy(self, mask: int) -> float:
        """H(X_S | C) = sum_c p(c) H_c(X_S)."""
        return float(sum(p * self.entropy(mask, c) for c, p in enumerate(self.priors) if p > 0))

    def marginal_model(self, variables: Sequence[int]):
        raise NotImplementedError


class DiscreteClassModel(_ClassModel):
    kind = "discrete"

    def __init__(self, tables, priors, labels=None):
        t = np.array(tables, dtype=np.float64)
        if t.ndim == 1:
            t = t[None, :]
        size = t.shape[1]
        if size < 2 or size & (size - 1):
            raise ValidationError(f"tables must have 2**n entries, got {size}", "tables")
        n = size.bit_length() - 1
        if n > MAX_DISCRETE_N:
            raise ValidationError(f"discrete models support n <= {MAX_DISCRETE_N}", "tables")
        if t.shape[0] != np.size(priors):
            raise ValidationError(f"{t.shape[0]} tables for {np.size(priors)} priors", "tables")
        for c, row in enumerate(t):
            if np.any(row < 0):
                raise ValidationError(f"class {c + 1} has negative probabilities", f"tables[{c}]")
            if abs(row.sum() - 1.0) > 1e-12:
                raise ValidationError(f"normalization violation in class {c + 1}: "
                                      f"table sums to {row.sum()!r}", f"tables[{c}]")
        super().__init__(n, priors, labels)
        t.setflags(write=False)
        self.tables = t
        mix = self.priors @ t
        mix.setflags(write=False)
        self.mixture = mix

    def table(self, cls: int | None = None) -> np.ndarray:
        return self.mixture if cls is None else self.tables[cls]

    def _entropy(self, cls, mask):
        return float(kernels.marginal_entropy(self.table(cls), self.n, mask))

    def marginal(self, mask: int, cls: int | None = None) -> np.ndarray:
        return kernels.marginal_table(self.table(cls), self.n, mask)

    def marginal_model(self, variables):
        keep = mask_of(variables)
        tabs = [kernels.marginal_table(t, self.n, keep) for t in self.tables]
        labels = [self.ground.label(i) for i in sorted(variables)] if self.ground.labels else None
        return DiscreteClassModel(tabs, self.priors, labels)


class GaussianClassModel(_ClassModel):
    kind = "gaussian"

    def __init__(self, covariances, priors, labels=None, check_variances=True):
        cov = np.array(covariances, dtype=np.float64)
        if cov.ndim == 2:
            cov = cov[None]
        if cov.ndim != 3 or cov.shape[1] != cov.shape[2]:
            raise ValidationError("covariances must be a list of square matrices", "covariances")
        if cov.shape[0] != np.size(priors):
            raise ValidationError(f"{cov.shape[0]} covariances for {np.size(priors)} priors", "covariances")
        for c, s in enumerate(cov):
            if not np.allclose(s, s.T, atol=1e-12, rtol=0):
                raise ValidationError(f"class {c + 1} covariance is not symmetric", f"covariances[{c}]")
            lo = float(np.linalg.eigvalsh(s)[0])
            if lo <= 0:
                raise ValidationError(f"class {c + 1} covariance is not positive definite "
                                      f"(smallest eigenvalue {lo:.3e})", f"covariances[{c}]")
        super().__init__(cov.shape[1], priors, labels)
        if check_variances and cov.shape[0] > 1:
            d = np.diagonal(cov, axis1=1, axis2=2)
            if not np.allclose(d, d[0], rtol=1e-9, atol=1e-12):
                log.warning("per-variable variances differ across classes")
        cov.setflags(write=False)
        self.covariances = cov
        pooled = np.einsum("c,cij->ij", self.priors, cov)
        pooled.setflags(write=False)
        self.pooled = pooled

    def covariance(self, cls: int | None = None) -> np.ndarray:
        return self.pooled if cls is None else self.covariances[cls]

    def _entropy(self, cls, mask):
        idx = members(mask)
        sub = self.covariance(cls)[np.ix_(idx, idx)]
        sign, logdet = np.linalg.slogdet(sub)
        if sign <= 0 or not np.isfinite(logdet):
            raise NumericalError(f"covariance block on {idx} is not positive definite")
        return 0.5 * (len(idx) * LOG_2PIE + logdet)

    def marginal_model(self, variables):
        idx = sorted(variables)
        labels = [self.ground.label(i) for i in idx] if self.ground.labels else None
        return GaussianClassModel(self.covariances[:, idx][:, :, idx], self.priors, labels,
                                  check_variances=False)


def _mask(model, s) -> int:
    return model.ground.as_mask(s)


def discrete_entropy(model: DiscreteClassModel, subset, condition_on_class: bool = False) -> float:
    s = _mask(model, subset)
    return model.class_entropy(s) if condition_on_class else model.entropy(s)


def gaussian_entropy(model: GaussianClassModel, subset, class_index: int | None = None) -> float:
    """1/2 ln((2 pi e)^|S| det Sigma_S); the empty set gives 0."""
    return model.entropy(_mask(model, subset), class_index)


def joint_entropy(model, mask: int, with_class: bool = False) -> float:
    return model.class_entropy(mask) if with_class else model.entropy(mask)


def conditional_mi(model, a, b, cond=0, with_class: bool = False) -> float:
    """I(A; B | cond), or sum_c p(c) I_c(A; B | cond) when ``with_class``."""
    a, b, cond = _mask(model, a), _mask(model, b), _mask(model, cond)
    if a & b or a & cond or b & cond:
        raise ValidationError("A, B and the conditioning set must be pairwise disjoint")
    h = model.class_entropy if with_class else model.entropy
    return h(a | cond) + h(b | cond) - h(a | b | cond) - h(cond)


def ear_score(model, subset, x) -> float:
    """I(S; R | x, C) - I(S; R | x) with R = V \\ S \\ {x}."""
    s = _mask(model, subset)
    x = model.ground.index(x)
    xm = 1 << x
    rest = model.ground.full & ~s & ~xm
    if s & xm:
        raise ValidationError(f"pivot {x} must not be in S")
    if s == 0 or rest == 0:
        raise ValidationError("S must be a proper non-empty subset of V \\ {x}")
    return conditional_mi(model, s, rest, xm, True) - conditional_mi(model, s, rest, xm, False)


class EdgeWeightMatrix(np.ndarray):
    """Symmetric n x n array of pairwise weights (nats) tagged with its variant."""

    def __new__(cls, values, variant: str):
        obj = np.asarray(values, dtype=np.float64).view(cls)
        obj.variant = variant
        return obj

    def __array_finalize__(self, obj):
        self.variant = getattr(obj, "variant", None)


def mi_edge_weights(model, variant: str = "conditional-mi", class_index: int | None = None) -> EdgeWeightMatrix:
    """Pairwise I(X;Y) (marginal-mi), I(X;Y|C) (conditional-mi) or I(X;Y|C=c) (classwise-mi)."""
    if variant not in VARIANTS:
        raise ValidationError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if variant == "classwise-mi":
        if class_index is None:
            raise ValidationError("classwise-mi needs a class index")
        if not 0 <= class_index < model.class_count:
            raise ValidationError(f"class index {class_index} out of range")
    n = model.n
    w = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            a, b = 1 << i, 1 << j
            if variant == "marginal-mi":
                v = conditional_mi(model, a, b)
            elif variant == "conditional-mi":
                v = conditional_mi(model, a, b, with_class=True)
            else:
                h = lambda m: model.entropy(m, class_index)
                v = h(a) + h(b) - h(a | b)
            w[i, j] = w[j, i] = v
    tag = variant if variant != "classwise-mi" else f"classwise-mi({class_index})"
    return EdgeWeightMatrix(w, tag)


def entropy_oracle(model, with_class: bool = False, cls: int | None = None) -> SetFunctionOracle:
    """S -> H(X_S) (mixture), H(X_S | C) with ``with_class``, or H_c(X_S) for ``cls``."""
    if with_class:
        f = model.class_entropy
    else:
        f = lambda m: model.entropy(m, cls)
    return SetFunctionOracle(model.ground, f, name="entropy")


def split_mi_oracle(model, ground_vars: Sequence[int], cond_vars: Sequence[int] = (),
                    with_class: bool = False) -> SetFunctionOracle:
    """Symmetric submodular S -> I(S; G \\ S | cond) over the local ground G.

    Local element i stands for model variable ``ground_vars[i]``.
    """
    gv = [int(v) for v in ground_vars]
    cond = mask_of(cond_vars)
    if mask_of(gv) & cond:
        raise ValidationError("ground and conditioning variables overlap")
    lut_ground = GroundSet(len(gv))
    h = model.class_entropy if with_class else model.entropy
    full_local = lut_ground.full
    to_global = _expander(gv)
    h_all = h(mask_of(gv) | cond)
    h_cond = h(cond)

    def f(m):
        s = to_global(m)
        r = to_global(full_local ^ m)
        return h(s | cond) + h(r | cond) - h_all - h_cond

    return SetFunctionOracle(lut_ground, f, memoize=True, name="split-mi")


def _expander(variables):
    def expand(m):
        out = 0
        i = 0
        while m:
            if m & 1:
                out |= 1 << variables[i]
            m >>= 1
            i += 1
        return out
    return expand
