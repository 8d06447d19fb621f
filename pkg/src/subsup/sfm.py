"""Submodular function minimization engines.

- ``brute``: exhaustive enumeration, the reference every other engine is tested against.
- ``queyranne``: pendant-pair merging for symmetric (or posimodular) functions,
  O(n^3) oracle calls, minimizes over proper non-empty subsets.
- ``minnorm``: Fujishige-Wolfe minimum-norm point in the base polytope.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import GroundSetTooLarge, ValidationError
from .polymatroid import greedy_order, greedy_vertex
from .setcore import (MAX_PAIR_CHECK_N, MAX_TABLE_N, CountingOracle, SetFunctionOracle,
                      check_property, members)

log = logging.getLogger(__name__)

ENGINES = ("brute", "queyranne", "minnorm")
MODES = ("all", "proper-nonempty")
BRUTE_MAX_N = MAX_TABLE_N


@dataclass
class MinimizationResult:
    minimizer: int
    value: float
    engine: str
    evaluations: int = 0
    converged: bool = True
    iterations: int = 0

    def members(self) -> list[int]:
        return members(self.minimizer)


def brute_force_minimize(oracle: SetFunctionOracle, mode: str = "all") -> MinimizationResult:
    """Exact minimizer by enumeration; ties go to the smallest bitmask."""
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    n = oracle.n
    if n > BRUTE_MAX_N:
        raise GroundSetTooLarge(f"brute force needs n <= {BRUTE_MAX_N}, got {n}")
    values = oracle.table()
    if mode == "proper-nonempty":
        if n < 2:
            raise ValidationError("no proper non-empty subsets when n < 2")
        best = int(np.argmin(values[1:-1])) + 1
    else:
        best = int(np.argmin(values))
    return MinimizationResult(best, oracle._value(best), "brute", evaluations=1 << n)


def queyranne_minimize(oracle: SetFunctionOracle, debug: bool = False) -> MinimizationResult:
    """Minimize a symmetric submodular (or posimodular) f over proper non-empty subsets.

    Repeatedly finds a pendant pair (t, u) via the ordering
    v_i = argmin_u f(W + u) - f(u), records {u} as a candidate, and merges t, u.
    """
    n = oracle.n
    if n < 2:
        raise ValidationError("no proper non-empty subsets when n < 2")
    if debug and n <= MAX_PAIR_CHECK_N:
        if not check_property(oracle, "posimodular"):
            raise ValidationError("queyranne precondition violated: oracle is not posimodular")
    f = CountingOracle(oracle)
    groups = [1 << i for i in range(n)]
    best_mask, best_val = None, np.inf
    while len(groups) > 1:
        single = {u: f._value(u) for u in groups}
        w = groups[0]
        order = [w]
        remaining = groups[1:]
        while remaining:
            keys = [f._value(w | u) - single[u] for u in remaining]
            j = int(np.argmin(keys))
            u = remaining.pop(j)
            order.append(u)
            w |= u
        t, u = order[-2], order[-1]
        val = single[u]
        if val < best_val or (val == best_val and u < best_mask):
            best_mask, best_val = u, val
        merged = t | u
        groups = sorted([g for g in groups if g not in (t, u)] + [merged],
                        key=lambda m: (m & -m))
    return MinimizationResult(best_mask, oracle._value(best_mask), "queyranne", evaluations=f.calls)


def _affine_min(points: np.ndarray) -> np.ndarray:
    """Barycentric coefficients of the min-norm point of the affine hull of ``points``."""
    k = points.shape[0]
    gram = points @ points.T
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = gram
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    return sol[:k]


def min_norm_point(g: SetFunctionOracle, tol: float = 1e-9, max_iter: int = 1000):
    """Wolfe's algorithm on the base polytope of g.

    Returns ``(x, iterations, converged)``. Linear optimization over the base
    polytope is the greedy vertex for direction -x.
    """
    n = g.n
    x = greedy_vertex(g, np.zeros(n)).weights.copy()
    pts = [x.copy()]
    lam = np.array([1.0])
    scale = max(1.0, float(np.max(np.abs(x))))
    eps = 1e-12 * scale
    for it in range(1, max_iter + 1):
        q = greedy_vertex(g, -x).weights.copy()
        gap = float(x @ x - x @ q)
        if gap <= tol * scale:
            return x, it, True
        if any(np.array_equal(q, p) for p in pts):
            return x, it, True
        pts.append(q)
        lam = np.append(lam, 0.0)
        while True:
            m = np.array(pts)
            alpha = _affine_min(m)
            if np.all(alpha > eps):
                lam = alpha
                x = alpha @ m
                break
            neg = alpha <= eps
            denom = lam[neg] - alpha[neg]
            ok = denom > 0
            theta = float(np.min(lam[neg][ok] / denom[ok])) if np.any(ok) else 0.0
            theta = min(max(theta, 0.0), 1.0)
            lam = theta * alpha + (1.0 - theta) * lam
            keep = lam > eps
            if not np.any(keep):
                keep[np.argmax(lam)] = True
            pts = [p for p, k in zip(pts, keep) if k]
            lam = lam[keep]
            lam = lam / lam.sum()
            x = lam @ np.array(pts)
            if len(pts) == 1:
                break
    return x, max_iter, False


def _polish(f: SetFunctionOracle, mask: int, val: float, full: int) -> tuple[int, float]:
    """Greedy 1-exchange descent; the result beats every single add/remove neighbour."""
    improved = True
    while improved:
        improved = False
        for i in range(f.n):
            cand = mask ^ (1 << i)
            if cand & ~full:
                continue
            v = f._value(cand)
            if v < val - 1e-15 * max(1.0, abs(val)):
                mask, val, improved = cand, v, True
    return mask, val


def min_norm_minimize(oracle: SetFunctionOracle, tol: float = 1e-9, max_iter: int = 1000) -> MinimizationResult:
    """Minimize a submodular f over all subsets via the minimum-norm base.

    The minimizer is read off as the best level set {x < theta} of the final
    point (this covers the strictly-negative set and the zero-coordinate
    boundary), then polished to 1-exchange optimality.
    """
    f = CountingOracle(oracle)
    x, iters, converged = min_norm_point(f, tol=tol, max_iter=max_iter)
    if not converged:
        log.warning("min-norm point did not converge in %d iterations; returning best so far", max_iter)
    order = greedy_order(-x)  # ascending x, ties by index
    best_mask, best_val = 0, 0.0
    mask = 0
    for i in order:
        mask |= 1 << i
        v = f._value(mask)
        if v < best_val:
            best_mask, best_val = mask, v
    best_mask, best_val = _polish(f, best_mask, best_val, (1 << f.n) - 1)
    return MinimizationResult(best_mask, oracle._value(best_mask), "minnorm",
                              evaluations=f.calls, converged=converged, iterations=iters)


def _solve(oracle, engine, **kw) -> MinimizationResult:
    if engine == "brute":
        return brute_force_minimize(oracle, "all")
    if engine == "minnorm":
        return min_norm_minimize(oracle, **kw)
    raise ValidationError(f"engine {engine!r} cannot solve unconstrained problems")


def minimize_proper(oracle: SetFunctionOracle, engine: str = "minnorm", **kw) -> MinimizationResult:
    """Minimize f over subsets A with A != {} and A != V.

    ``queyranne`` already returns proper non-empty sets and is called once.
    ``brute`` enumerates the proper subsets directly. Otherwise, with anchor
    v = 0, runs 2(n-1) forced solves: for each u != v, (v in, u out) and
    (u in, v out), each as a minimization over a contracted minor.
    """
    if engine not in ENGINES:
        raise ValidationError(f"engine must be one of {ENGINES}, got {engine!r}")
    n = oracle.n
    if n < 2:
        raise ValidationError("no proper non-empty subsets when n < 2")
    if engine == "queyranne":
        return queyranne_minimize(oracle, **kw)
    if engine == "brute":
        return brute_force_minimize(oracle, "proper-nonempty")
    v = 0
    best_mask, best_val = None, np.inf
    evals = 0
    converged = True
    for u in range(1, n):
        for inside, outside in ((v, u), (u, v)):
            forced = 1 << inside
            keep = [i for i in range(n) if i not in (inside, outside)]
            if keep:
                minor = oracle.minor(keep, forced)
                res = _solve(minor, engine, **kw)
                evals += res.evaluations
                converged &= res.converged
                cand = minor.expand(res.minimizer)
            else:
                cand = forced
            val = oracle._value(cand)
            evals += 1
            if val < best_val or (val == best_val and cand < best_mask):
                best_mask, best_val = cand, val
    return MinimizationResult(best_mask, best_val, engine, evaluations=evals, converged=converged)
