"""The submodular-supermodular procedure for minimizing phi = f - g.

Each round replaces g by a modular lower bound h that is tight at the current
set (chain differences along a permutation beginning with it), then
minimizes the submodular surrogate f - h over proper non-empty subsets.
Because f - h >= f - g everywhere with equality at the current set, the
objective never increases.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .polymatroid import Permutation, modular_approximation, permutation_beginning_with, rng_for
from .setcore import SetFunctionOracle
from .sfm import ENGINES, MinimizationResult, minimize_proper

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SspOptions:
    delta: float = 1e-9
    seed: int = 0
    restarts: int = 1
    local_search_radius: int = 0
    engine: str = "minnorm"
    max_iterations: int = 100

    def __post_init__(self):
        if self.delta < 0:
            raise ValidationError(f"delta must be >= 0, got {self.delta}")
        if self.restarts < 1:
            raise ValidationError(f"restarts must be >= 1, got {self.restarts}")
        if self.local_search_radius not in (0, 1, 2):
            raise ValidationError(f"local_search_radius must be 0, 1 or 2, got {self.local_search_radius}")
        if self.engine not in ENGINES:
            raise ValidationError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.max_iterations < 1:
            raise ValidationError(f"max_iterations must be >= 1, got {self.max_iterations}")


@dataclass
class Iterate:
    restart: int
    iteration: int
    subset: int
    objective: float
    perm_seed: int
    surrogate: float | None = None


@dataclass
class SspTrace:
    iterates: list[Iterate] = field(default_factory=list)
    terminated_by: list[str] = field(default_factory=list)

    def for_restart(self, r: int) -> list[Iterate]:
        return [it for it in self.iterates if it.restart == r]

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps({"restart": it.restart, "iteration": it.iteration,
                        "subset_bitmask": it.subset, "objective": it.objective},
                       sort_keys=True) + "\n"
            for it in self.iterates)


def _perm_seed(seed: int, restart: int, iteration: int) -> int:
    return int(np.random.SeedSequence([seed, restart, iteration]).generate_state(1)[0])


def _random_proper_subset(n: int, rng: np.random.Generator) -> int:
    # uniform over the 2^n - 2 proper non-empty subsets
    return int(rng.integers(1, (1 << n) - 1))


def _check_pair(f: SetFunctionOracle, g: SetFunctionOracle):
    if f.n != g.n:
        raise ValidationError(f"f and g have different ground sets ({f.n} vs {g.n})")
    if f.n < 2:
        raise ValidationError("difference minimization needs at least 2 elements")


def descent_step(f: SetFunctionOracle, g: SetFunctionOracle, pi, engine: str = "minnorm"):
    """One surrogate solve: returns (h, minimization result of f - h)."""
    h = modular_approximation(g, pi)
    res = minimize_proper(f - h, engine=engine)
    return h, res


def _descend(f, g, start: int, opts: SspOptions, restart: int, trace: SspTrace):
    """Algorithm-1 loop for one restart. Returns the last accepted set and phi value."""
    phi = lambda m: f._value(m) - g._value(m)
    seed0 = _perm_seed(opts.seed, restart, 0)
    trace.iterates.append(Iterate(restart, 0, start, phi(start), seed0))
    pi = permutation_beginning_with(start, f.ground, seed0)
    best_mask, best_phi = start, phi(start)
    min_val = np.inf
    reason = "iteration-cap"
    for it in range(1, opts.max_iterations + 1):
        h, res = descent_step(f, g, pi, opts.engine)
        a_n, val = res.minimizer, res.value
        ps = _perm_seed(opts.seed, restart, it)
        pi = permutation_beginning_with(a_n, f.ground, ps)
        if val < min_val - opts.delta:
            min_val = val
            p = phi(a_n)
            trace.iterates.append(Iterate(restart, it, a_n, p, ps, surrogate=val))
            if p < best_phi or (p == best_phi and a_n < best_mask):
                best_mask, best_phi = a_n, p
        else:
            reason = "no-improvement"
            break
    trace.terminated_by.append(reason)
    return best_mask, best_phi


def _neighbour_permutations(a: int, n: int, radius: int, seed: int):
    """Permutations beginning with A that make A minus/plus up to ``radius`` elements a chain prefix.

    Elements to remove sit at the end of the A-block; elements to add sit
    right after it.
    """
    inside = [i for i in range(n) if a >> i & 1]
    outside = [i for i in range(n) if not a >> i & 1]
    rng = rng_for(seed)
    base_in = [int(x) for x in rng.permutation(inside)] if inside else []
    base_out = [int(x) for x in rng.permutation(outside)] if outside else []

    def with_tail(block, tail):
        return [x for x in block if x not in tail] + list(tail)

    def with_head(block, head):
        return list(head) + [x for x in block if x not in head]

    perms = []
    for x in inside:
        perms.append(with_tail(base_in, [x]) + base_out)
    for y in outside:
        perms.append(base_in + with_head(base_out, [y]))
    if radius >= 2:
        for i, x in enumerate(inside):
            for x2 in inside[i + 1:]:
                perms.append(with_tail(base_in, [x, x2]) + base_out)
        for i, y in enumerate(outside):
            for y2 in outside[i + 1:]:
                perms.append(base_in + with_head(base_out, [y, y2]))
    return [Permutation(tuple(p)) for p in perms]


def local_search_certify(f: SetFunctionOracle, g: SetFunctionOracle, subset, radius: int = 1,
                         engine: str = "minnorm", delta: float = 1e-9, seed: int = 0,
                         max_rounds: int = 1000):
    """Polish A until no exchange of up to ``radius`` elements improves phi by more than delta.

    For each neighbour A -/+ X a permutation is built so that both A and the
    neighbour are chain prefixes; the surrogate is then tight at both, and its
    minimizer A' satisfies phi(A') <= phi(neighbour). Returns ``(A', certified)``.
    """
    _check_pair(f, g)
    if radius not in (1, 2):
        raise ValidationError(f"radius must be 1 or 2, got {radius}")
    a = f.ground.as_mask(subset)
    n = f.n
    if a == 0 or a == f.ground.full:
        raise ValidationError("local search needs a proper non-empty starting set")
    phi = lambda m: f._value(m) - g._value(m)
    cur = phi(a)
    for rnd in range(max_rounds):
        best_mask, best_phi = a, cur
        for pi in _neighbour_permutations(a, n, radius, (seed, rnd)):
            _, res = descent_step(f, g, pi, engine)
            p = phi(res.minimizer)
            if p < best_phi:
                best_mask, best_phi = res.minimizer, p
        if best_phi < cur - delta:
            a, cur = best_mask, best_phi
            continue
        return a, True
    return a, False


def ssp_minimize(f: SetFunctionOracle, g: SetFunctionOracle, opts: SspOptions | None = None,
                 start: int | None = None):
    """Approximately minimize f - g over proper non-empty subsets.

    Runs ``opts.restarts`` independent descents from seeded random start
    sets (or from ``start`` for restart 0), optionally polishes each to
    k-exchange local optimality, and returns the best as
    ``(MinimizationResult, SspTrace)``. Ties go to the smallest bitmask.
    """
    opts = opts or SspOptions()
    _check_pair(f, g)
    trace = SspTrace()
    best_mask, best_phi = None, np.inf
    for r in range(opts.restarts):
        if r == 0 and start is not None:
            a0 = f.ground.as_mask(start)
            if a0 == 0 or a0 == f.ground.full:
                raise ValidationError("start set must be proper and non-empty")
        else:
            a0 = _random_proper_subset(f.n, rng_for((opts.seed, r)))
        mask, p = _descend(f, g, a0, opts, r, trace)
        if opts.local_search_radius:
            polished, certified = local_search_certify(
                f, g, mask, opts.local_search_radius, opts.engine, opts.delta, seed=(opts.seed, r))
            pp = f._value(polished) - g._value(polished)
            if polished != mask:
                # perm_seed -1 marks a local-search step
                trace.iterates.append(Iterate(r, len(trace.for_restart(r)), polished, pp, -1))
            mask, p = polished, pp
            if not certified:
                log.warning("restart %d: local search hit its round cap before certification", r)
        log.debug("restart %d -> %s phi=%.12g", r, f.ground.format(mask), p)
        if p < best_phi or (p == best_phi and mask < best_mask):
            best_mask, best_phi = mask, p
    result = MinimizationResult(best_mask, f._value(best_mask) - g._value(best_mask), f"ssp/{opts.engine}",
                                iterations=len(trace.iterates))
    return result, trace
