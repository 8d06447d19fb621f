"""Modular lower bounds of submodular functions via Edmonds' greedy chain.

For a permutation pi with prefixes W_i = {pi(1), ..., pi(i)}, the chain
differences h(pi(i)) = g(W_i) - g(W_{i-1}) give a modular function that is
tight on every prefix and, for submodular g, lies below g everywhere. It is a
vertex of the base polytope {x : x(S) <= g(S), x(V) = g(V)}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .errors import GroundSetTooLarge, ValidationError
from .setcore import (DEFAULT_TOL, MAX_CHECK_N, GroundSet, PropertyReport, SetFunctionOracle,
                      _ground, mask_of, members, popcount)


class ModularWeights(SetFunctionOracle):
    """h(A) = sum of member weights; also usable anywhere an oracle is."""

    def __init__(self, ground, weights):
        ground = _ground(ground)
        w = np.array(weights, dtype=np.float64).reshape(-1)
        if w.size != ground.n:
            raise ValidationError(f"expected {ground.n} weights, got {w.size}")
        w.setflags(write=False)
        self.weights = w
        self._w = [float(x) for x in w]
        super().__init__(ground, name="modular")

    def _raw(self, mask):
        s = 0.0
        i = 0
        w = self._w
        while mask:
            if mask & 1:
                s += w[i]
            mask >>= 1
            i += 1
        return s

    def table(self):
        if self._table is None:
            if self.n > 20:
                raise GroundSetTooLarge(f"table of a ground set with n={self.n}")
            t = kernels.subset_sums(self.weights)
            t.setflags(write=False)
            self._table = t
        return self._table

    def dot(self, c) -> float:
        return float(np.dot(self.weights, np.asarray(c, dtype=np.float64)))

    def to_json(self) -> list[float]:
        return [float(x) for x in self.weights]

    @classmethod
    def from_json(cls, data) -> "ModularWeights":
        if not isinstance(data, list) or not data:
            raise ValidationError("modular weights must be a non-empty JSON array")
        return cls(GroundSet(len(data)), data)

    def __repr__(self):
        return f"ModularWeights({list(self._w)!r})"


@dataclass(frozen=True)
class Permutation:
    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(x) for x in self.order)
        if sorted(order) != list(range(len(order))):
            raise ValidationError(f"not a permutation of 0..{len(order) - 1}: {order}")
        object.__setattr__(self, "order", order)

    def __len__(self):
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    def __getitem__(self, i):
        return self.order[i]

    def prefix(self, i: int) -> int:
        """Bitmask of W_i, the first ``i`` elements."""
        return mask_of(self.order[:i])

    def begins_with(self, mask: int) -> bool:
        return self.prefix(popcount(mask)) == mask


def _as_permutation(pi, n) -> Permutation:
    p = pi if isinstance(pi, Permutation) else Permutation(tuple(pi))
    if len(p) != n:
        raise ValidationError(f"permutation has {len(p)} elements, ground set has {n}")
    return p


def rng_for(seed) -> np.random.Generator:
    """PCG64 generator; reproducible across platforms for integer or tuple seeds."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def permutation_beginning_with(subset: int, ground, seed) -> Permutation:
    """Seeded permutation whose first |A| entries are a shuffle of A, then a shuffle of V \\ A."""
    ground = _ground(ground)
    a = ground.as_mask(subset)
    rng = rng_for(seed)
    head = [int(x) for x in rng.permutation(members(a))] if a else []
    rest_mask = ground.full & ~a
    tail = [int(x) for x in rng.permutation(members(rest_mask))] if rest_mask else []
    return Permutation(tuple(head + tail))


def modular_approximation(g: SetFunctionOracle, pi) -> ModularWeights:
    """Chain differences of g along pi: tight on every prefix, below g if g is submodular."""
    p = _as_permutation(pi, g.n)
    w = np.empty(g.n)
    prev_mask, prev_val = 0, 0.0
    for x in p:
        cur_mask = prev_mask | 1 << x
        cur_val = g._value(cur_mask)
        w[x] = cur_val - prev_val
        prev_mask, prev_val = cur_mask, cur_val
    return ModularWeights(g.ground, w)


def greedy_order(c) -> tuple[int, ...]:
    """Indices sorted by non-increasing weight, ties by ascending index."""
    c = np.asarray(c, dtype=np.float64)
    return tuple(sorted(range(c.size), key=lambda i: (-c[i], i)))


def greedy_vertex(g: SetFunctionOracle, c) -> ModularWeights:
    """Base-polytope vertex maximizing c . x (greedy in order of decreasing c)."""
    if isinstance(c, ModularWeights):
        c = c.weights
    c = np.asarray(c, dtype=np.float64)
    if c.size != g.n:
        raise ValidationError(f"direction has {c.size} entries, ground set has {g.n}")
    return modular_approximation(g, greedy_order(c))


def in_base_polytope(g: SetFunctionOracle, h, tolerance: float = DEFAULT_TOL) -> PropertyReport:
    """Check h(S) <= g(S) + tol for all S, and |h(V) - g(V)| <= tol.

    Witnesses are ``(S, h(S), g(S))``; a failed tightness equality is
    reported with S = V.
    """
    if g.n > MAX_CHECK_N:
        raise GroundSetTooLarge(f"base-polytope check needs n <= {MAX_CHECK_N}, got {g.n}")
    if not isinstance(h, ModularWeights):
        h = ModularWeights(g.ground, h)
    if h.n != g.n:
        raise ValidationError(f"ground set mismatch: {h.n} != {g.n}")
    gt = g.table()
    ht = h.table()
    bad = np.nonzero(ht > gt + tolerance)[0]
    viol = [(int(s), float(ht[s]), float(gt[s])) for s in bad]
    full = g.ground.full
    if abs(ht[full] - gt[full]) > tolerance and not (ht[full] > gt[full] + tolerance):
        viol.append((full, float(ht[full]), float(gt[full])))
    return PropertyReport("base-polytope", tolerance, viol)


def chain_masks(pi: Sequence[int]) -> list[int]:
    """[W_1, ..., W_n] as bitmasks."""
    out, m = [], 0
    for x in pi:
        m |= 1 << int(x)
        out.append(m)
    return out
