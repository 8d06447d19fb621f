"""Tree-structured classifiers: Chow-Liu trees, discriminative trees, fitting and error rates."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .errors import NumericalError, ValidationError
from .infomodel import DiscreteClassModel, split_mi_oracle
from .polymatroid import rng_for
from .setcore import members
from .sfm import brute_force_minimize
from .ssp import SspOptions, ssp_minimize

log = logging.getLogger(__name__)

EAR_SIGNS = ("consistent", "printed", "prose")
TIE_DECIMALS = 12
LOG_2PI = math.log(2 * math.pi)


@dataclass(frozen=True)
class TreeStructure:
    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = tuple(sorted(tuple(sorted((int(u), int(v)))) for u, v in self.edges))
        object.__setattr__(self, "edges", edges)
        _validate_forest(self.n, edges, spanning=True)

    def contains(self, u: int, v: int) -> bool:
        return tuple(sorted((u, v))) in self.edges

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, data) -> "TreeStructure":
        try:
            return cls(int(data["n"]), tuple(tuple(e) for e in data["edges"]))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed tree document: {exc}") from exc


def _validate_forest(n, edges, spanning):
    if n < 1:
        raise ValidationError(f"tree needs n >= 1, got {n}")
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise ValidationError(f"invalid edge ({u}, {v}) for n={n}")
        ru, rv = find(u), find(v)
        if ru == rv:
            raise ValidationError(f"edge ({u}, {v}) closes a cycle")
        parent[ru] = rv
    if spanning and len(edges) != n - 1:
        raise ValidationError(f"spanning tree on {n} vertices needs {n - 1} edges, got {len(edges)}")


def chow_liu_tree(weights) -> TreeStructure:
    """Maximum-weight spanning tree (Kruskal).

    Weights equal to 12 decimals are ties, broken by lexicographic edge order.
    """
    w = np.asarray(weights, dtype=np.float64)
    n = w.shape[0]
    if n < 2:
        raise ValidationError("Chow-Liu needs n >= 2")
    cand = sorted(((-round(float(w[i, j]), TIE_DECIMALS), i, j)
                   for i in range(n) for j in range(i + 1, n)))
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for _, i, j in cand:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            edges.append((i, j))
            if len(edges) == n - 1:
                break
    return TreeStructure(n, tuple(edges))


def tree_weight(tree: TreeStructure, weights) -> float:
    w = np.asarray(weights, dtype=np.float64)
    return float(sum(w[u, v] for u, v in tree.edges))


def random_tree(n: int, seed) -> TreeStructure:
    """Uniform random spanning tree on n labelled vertices via a random Pruefer sequence."""
    if n < 2:
        raise ValidationError("random_tree needs n >= 2")
    if n == 2:
        return TreeStructure(2, ((0, 1),))
    seq = [int(x) for x in rng_for(seed).integers(0, n, size=n - 2)]
    return TreeStructure(n, tuple(prufer_decode(seq, n)))


def prufer_decode(seq: Sequence[int], n: int) -> list[tuple[int, int]]:
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(i for i in range(n) if degree[i] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [i for i in range(n) if degree[i] == 1]
    edges.append((u, v))
    return edges


# ---------------------------------------------------------------- classifiers

@dataclass
class TreeClassifier:
    """Per-class tree-factorized model; ``edges`` may be empty (naive Bayes).

    Discrete: ``tables[c]`` is the fitted joint over all 2**n outcomes.
    Gaussian: ``precisions[c]`` and ``log_norms[c]`` define the fitted density.
    ``tree`` is None for naive Bayes and for the full (true-model) classifier.
    """

    kind: str
    n: int
    priors: np.ndarray
    edges: tuple[tuple[int, int], ...] = ()
    tree: TreeStructure | None = None
    tables: np.ndarray | None = None
    precisions: np.ndarray | None = None
    log_norms: np.ndarray | None = None
    label: str = ""

    def class_scores(self, x: np.ndarray) -> np.ndarray:
        """log p(c) + log q_c(x) for rows of x; shape (N, C)."""
        logp = np.log(np.where(self.priors > 0, self.priors, np.finfo(float).tiny))
        if self.kind == "discrete":
            idx = _outcome_index(x) if np.ndim(x) == 2 else np.asarray(x, dtype=np.int64)
            with np.errstate(divide="ignore"):
                return np.log(self.tables[:, idx]).T + logp
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        quad = np.einsum("ni,cij,nj->nc", x, self.precisions, x)
        return self.log_norms[None, :] - 0.5 * quad + logp

    def predict(self, x) -> np.ndarray:
        # argmax picks the first maximum, i.e. the lowest class index on ties
        return np.argmax(self.class_scores(x), axis=1)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "n": self.n, "priors": [float(p) for p in self.priors],
               "edges": [list(e) for e in self.edges], "label": self.label}
        if self.tables is not None:
            out["tables"] = self.tables.tolist()
        if self.precisions is not None:
            out["precisions"] = self.precisions.tolist()
            out["log_norms"] = self.log_norms.tolist()
        return out


def _outcome_index(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    return (x << np.arange(x.shape[1])).sum(axis=1)


def _fit_discrete_table(joint: np.ndarray, n: int, edges) -> np.ndarray:
    outcomes = np.arange(1 << n)
    bits = [(outcomes >> v) & 1 for v in range(n)]
    single = [kernels.marginal_table(joint, n, 1 << v) for v in range(n)]
    logq = np.zeros(1 << n)
    with np.errstate(divide="ignore", invalid="ignore"):
        for v in range(n):
            logq += np.log(single[v][bits[v]])
        for u, v in edges:
            pair = kernels.marginal_table(joint, n, (1 << u) | (1 << v))  # index = bit_u + 2*bit_v
            logq += (np.log(pair[bits[u] + 2 * bits[v]])
                     - np.log(single[u][bits[u]]) - np.log(single[v][bits[v]]))
    q = np.exp(logq)
    q[~np.isfinite(q)] = 0.0
    return q


def _fit_gaussian(cov: np.ndarray, edges) -> tuple[np.ndarray, float]:
    n = cov.shape[0]
    degree = np.zeros(n, dtype=int)
    prec = np.zeros((n, n))
    for u, v in edges:
        idx = [u, v]
        prec[np.ix_(idx, idx)] += np.linalg.inv(cov[np.ix_(idx, idx)])
        degree[u] += 1
        degree[v] += 1
    for v in range(n):
        prec[v, v] -= (degree[v] - 1) / cov[v, v]
    sign, logdet = np.linalg.slogdet(prec)
    if sign <= 0:
        raise NumericalError("fitted tree precision is not positive definite")
    return prec, 0.5 * (logdet - n * LOG_2PI)


def fit_tree_classifier(model, tree: TreeStructure | None, edges=None, label: str = "") -> TreeClassifier:
    """KL projection of each class distribution onto the tree (moment matching)."""
    if tree is not None:
        if tree.n != model.n:
            raise ValidationError(f"tree spans {tree.n} variables, model has {model.n}")
        edges = tree.edges
    edges = tuple(sorted(tuple(sorted((int(u), int(v)))) for u, v in (edges or ())))
    _validate_forest(model.n, edges, spanning=False)
    if isinstance(model, DiscreteClassModel):
        tabs = np.array([_fit_discrete_table(t, model.n, edges) for t in model.tables])
        return TreeClassifier("discrete", model.n, model.priors, edges, tree, tables=tabs, label=label)
    fits = [_fit_gaussian(c, edges) for c in model.covariances]
    return TreeClassifier("gaussian", model.n, model.priors, edges, tree,
                          precisions=np.array([f[0] for f in fits]),
                          log_norms=np.array([f[1] for f in fits]), label=label)


def naive_bayes_classifier(model) -> TreeClassifier:
    return fit_tree_classifier(model, None, (), label="naive-bayes")


def full_model_classifier(model) -> TreeClassifier:
    """Classifier using the true class distributions (the Bayes-optimal rule)."""
    if isinstance(model, DiscreteClassModel):
        return TreeClassifier("discrete", model.n, model.priors, tables=np.array(model.tables),
                              label="complete")
    precs, norms = [], []
    for c in model.covariances:
        sign, logdet = np.linalg.slogdet(c)
        precs.append(np.linalg.inv(c))
        norms.append(-0.5 * (logdet + model.n * LOG_2PI))
    return TreeClassifier("gaussian", model.n, model.priors, precisions=np.array(precs),
                          log_norms=np.array(norms), label="complete")


# ---------------------------------------------------------------- evaluation

def sample_model(model, samples: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """Draw (x, labels) from the class mixture."""
    rng = rng_for(seed)
    y = rng.choice(model.class_count, size=samples, p=model.priors)
    if isinstance(model, DiscreteClassModel):
        x = np.empty(samples, dtype=np.int64)
        for c in range(model.class_count):
            sel = y == c
            x[sel] = rng.choice(1 << model.n, size=int(sel.sum()), p=model.tables[c])
        return x, y
    x = np.empty((samples, model.n))
    for c in range(model.class_count):
        sel = y == c
        chol = np.linalg.cholesky(model.covariances[c])
        x[sel] = rng.standard_normal((int(sel.sum()), model.n)) @ chol.T
    return x, y


def evaluate_error(model, classifier: TreeClassifier, method: str = "exact", samples: int = 2000,
                   seed=0) -> float:
    """Misclassification rate of ``classifier`` under the true ``model``.

    ``exact`` sums the true mass of every outcome whose predicted class is
    wrong (discrete models only); ``mc`` estimates it from fresh samples.
    """
    if method == "exact":
        if not isinstance(model, DiscreteClassModel):
            raise ValidationError("exact error needs a discrete model; use method='mc'")
        pred = classifier.predict(np.arange(1 << model.n))
        err = 0.0
        for c in range(model.class_count):
            err += model.priors[c] * float(model.tables[c][pred != c].sum())
        return err
    if method in ("mc", "monte-carlo"):
        x, y = sample_model(model, samples, seed)
        return float(np.mean(classifier.predict(x) != y))
    raise ValidationError(f"unknown evaluation method {method!r}")


def evaluate_samples(classifier: TreeClassifier, x, y) -> float:
    return float(np.mean(classifier.predict(x) != np.asarray(y)))


# ---------------------------------------------------------------- discriminative trees

@dataclass
class SplitChoice:
    pivot: int
    part: tuple[int, ...]
    rest: tuple[int, ...]
    val: float
    ear: float


@dataclass
class DiscriminativeLog:
    splits: list[SplitChoice] = field(default_factory=list)


def _best_partition(model, pivot, ground, ear_sign, opts):
    """Inner problem on ground G = U \\ {x}: returns (local mask, EAR of that split)."""
    f = split_mi_oracle(model, ground, [pivot], with_class=True)   # I(S; G\S | x, C)
    g = split_mi_oracle(model, ground, [pivot], with_class=False)  # I(S; G\S | x)
    first, second = (g, f) if ear_sign == "prose" else (f, g)
    if len(ground) <= 3:
        res = brute_force_minimize(first - second, "proper-nonempty")
        mask = res.minimizer
    else:
        res, _ = ssp_minimize(first, second, opts)
        mask = res.minimizer
    return mask, f._value(mask) - g._value(mask)


def _pivot_value(ear, ear_sign):
    # "printed": val = I(.;.|x) - I(.;.|x,C) = -EAR
    return ear if ear_sign == "consistent" else -ear


def make_discriminative_tree(model, opts: SspOptions | None = None, ear_sign: str = "consistent",
                             trace: DiscriminativeLog | None = None) -> TreeStructure:
    """Greedy recursive separator search scored by the EAR criterion.

    For every pivot x of the current variable set U, split U \\ {x} into
    (S, rest) by minimizing the EAR across the split given x; the pivot with
    the best score becomes a separator, and both sides (each with x) are
    solved recursively and joined at x.

    ``ear_sign``: ``consistent`` minimizes EAR in both the split and the pivot
    choice; ``printed`` scores pivots by -EAR; ``prose`` maximizes EAR in both.
    """
    if ear_sign not in EAR_SIGNS:
        raise ValidationError(f"ear_sign must be one of {EAR_SIGNS}, got {ear_sign!r}")
    opts = opts or SspOptions()
    n = model.n
    if n < 2:
        raise ValidationError("a tree needs at least 2 variables")
    return TreeStructure(n, tuple(_disc_tree(model, list(range(n)), ear_sign, opts, trace)))


def _disc_tree(model, u: list[int], ear_sign, opts, trace):
    if len(u) <= 1:
        return []
    if len(u) == 2:
        return [(u[0], u[1])]
    best = None
    for x in u:
        ground = [v for v in u if v != x]
        mask, ear = _best_partition(model, x, ground, ear_sign, opts)
        val = _pivot_value(ear, ear_sign)
        if best is None or val < best[0] - 1e-12:
            best = (val, x, ground, mask, ear)
    val, x, ground, mask, ear = best
    part = [ground[i] for i in members(mask)]
    rest = [v for v in ground if v not in part]
    if trace is not None:
        trace.splits.append(SplitChoice(x, tuple(part), tuple(rest), val, ear))
    log.debug("pivot %d splits %s | %s (EAR %.6g)", x, part, rest, ear)
    return (_disc_tree(model, sorted(part + [x]), ear_sign, opts, trace)
            + _disc_tree(model, sorted(rest + [x]), ear_sign, opts, trace))
