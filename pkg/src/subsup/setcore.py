"""Ground sets, bitmask subsets, set-function oracles and brute-force property checks.

Subsets are plain Python ints used as bitmasks: bit ``i`` set means element
``i`` is a member. Every oracle is normalized at construction so that
``f(0) == 0.0`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .errors import GroundSetTooLarge, ValidationError

MAX_ELEMENTS = 63
MAX_TABLE_N = 20
MAX_CHECK_N = 16
MAX_PAIR_CHECK_N = 10
DEFAULT_TOL = 1e-9

PROPERTIES = ("submodular", "posimodular", "symmetric")


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def members(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(items: Iterable[int]) -> int:
    m = 0
    for i in items:
        m |= 1 << int(i)
    return m


@dataclass(frozen=True)
class GroundSet:
    n: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or not 1 <= self.n <= MAX_ELEMENTS:
            raise ValidationError(f"ground set size must be in [1, {MAX_ELEMENTS}], got {self.n}")
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != self.n:
                raise ValidationError(f"expected {self.n} labels, got {len(labels)}")
            if len(set(labels)) != self.n:
                raise ValidationError("labels must be distinct")
            object.__setattr__(self, "labels", labels)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else str(i)

    def index(self, item) -> int:
        if isinstance(item, str) and self.labels and item in self.labels:
            return self.labels.index(item)
        i = int(item)
        if not 0 <= i < self.n:
            raise ValidationError(f"element {item!r} out of range for ground set of size {self.n}")
        return i

    def as_mask(self, subset) -> int:
        """Accept a bitmask int or an iterable of indices/labels."""
        if isinstance(subset, (int, np.integer)) and not isinstance(subset, bool):
            m = int(subset)
            if m < 0 or m >> self.n:
                raise ValidationError(f"subset {m:#x} references elements >= {self.n}")
            return m
        return mask_of(self.index(x) for x in subset)

    def format(self, mask: int) -> str:
        return "{" + ",".join(self.label(i) for i in members(mask)) + "}"


def _ground(g) -> GroundSet:
    return g if isinstance(g, GroundSet) else GroundSet(int(g))


class SetFunctionOracle:
    """A normalized set function f: 2^V -> R evaluated on bitmasks.

    ``func`` receives a bitmask and returns a float. Its value at the empty set
    is stored as ``offset`` and subtracted from every evaluation.
    """

    def __init__(self, ground, func: Callable[[int], float] | None = None, *,
                 memoize: bool = False, name: str | None = None):
        self.ground = _ground(ground)
        self._func = func
        self._cache: dict[int, float] | None = {} if memoize else None
        self._table: np.ndarray | None = None
        self.name = name or type(self).__name__
        self.offset = float(self._raw(0))

    @property
    def n(self) -> int:
        return self.ground.n

    def _raw(self, mask: int) -> float:
        return float(self._func(mask))

    def _value(self, mask: int) -> float:
        # unvalidated fast path used by the engines
        cache = self._cache
        if cache is not None:
            v = cache.get(mask)
            if v is None:
                v = cache.setdefault(mask, self._raw(mask) - self.offset)
            return v
        return self._raw(mask) - self.offset

    def evaluate(self, subset) -> float:
        return self._value(self.ground.as_mask(subset))

    __call__ = evaluate

    def table(self) -> np.ndarray:
        """All 2**n normalized values indexed by bitmask (read-only, cached)."""
        if self._table is None:
            if self.n > MAX_TABLE_N:
                raise GroundSetTooLarge(f"table of a ground set with n={self.n} > {MAX_TABLE_N}")
            t = np.fromiter((self._value(m) for m in range(1 << self.n)), dtype=np.float64,
                            count=1 << self.n)
            t.setflags(write=False)
            self._table = t
        return self._table

    def __add__(self, other):
        return SumOracle([self, other], [1.0, 1.0])

    def __sub__(self, other):
        return SumOracle([self, other], [1.0, -1.0])

    def __neg__(self):
        return SumOracle([self], [-1.0])

    def __mul__(self, k):
        return SumOracle([self], [float(k)])

    __rmul__ = __mul__

    def minor(self, keep: Sequence[int], forced: int = 0) -> "SetFunctionOracle":
        """Restrict to ``keep`` (re-indexed 0..len-1) with ``forced`` always present.

        The minor is normalized: g(B) = f(B' | forced) - f(forced).
        """
        return MinorOracle(self, keep, forced)

    def __repr__(self):
        return f"<{self.name} n={self.n}>"


class TableOracle(SetFunctionOracle):
    """Oracle backed by an explicit array of 2**n values."""

    def __init__(self, values, labels=None, name="table"):
        v = np.array(values, dtype=np.float64)
        if v.ndim != 1 or v.size < 2 or v.size & (v.size - 1):
            raise ValidationError(f"values must have length 2**n, got {v.size}")
        n = v.size.bit_length() - 1
        self._values = v - v[0]
        self._values.setflags(write=False)
        super().__init__(GroundSet(n, labels), name=name)
        self._table = self._values

    def _raw(self, mask):
        return float(self._values[mask])

    def _value(self, mask):
        return float(self._values[mask])


class SumOracle(SetFunctionOracle):
    """Weighted pointwise sum of oracles sharing one ground set."""

    def __init__(self, terms, coefs):
        n = terms[0].n
        for t in terms:
            if t.n != n:
                raise ValidationError(f"ground set mismatch: {t.n} != {n}")
        self.terms = list(terms)
        self.coefs = [float(c) for c in coefs]
        super().__init__(terms[0].ground, name="sum")

    def _raw(self, mask):
        return sum(c * t._value(mask) for c, t in zip(self.coefs, self.terms))

    def table(self):
        if self._table is None:
            t = sum(c * term.table() for c, term in zip(self.coefs, self.terms))
            t = np.array(t, dtype=np.float64)
            t.setflags(write=False)
            self._table = t
        return self._table


class MinorOracle(SetFunctionOracle):
    def __init__(self, base: SetFunctionOracle, keep: Sequence[int], forced: int = 0):
        keep = [int(k) for k in keep]
        if not keep:
            raise ValidationError("minor must keep at least one element")
        if mask_of(keep) & forced:
            raise ValidationError("forced elements cannot also be kept")
        self.base = base
        self.keep = keep
        self.forced = forced
        # byte-wise expansion table keeps _expand O(n/8)
        self._chunks = []
        for lo in range(0, len(keep), 8):
            part = keep[lo:lo + 8]
            self._chunks.append([mask_of(p for j, p in enumerate(part) if s >> j & 1)
                                 for s in range(1 << len(part))])
        super().__init__(GroundSet(len(keep)), name=f"minor({base.name})")

    def expand(self, mask: int) -> int:
        out = self.forced
        for lut in self._chunks:
            out |= lut[mask & 0xFF]
            mask >>= 8
        return out

    def _raw(self, mask):
        return self.base._value(self.expand(mask))


class CountingOracle(SetFunctionOracle):
    """Wraps an oracle and counts evaluations (for complexity assertions)."""

    def __init__(self, base: SetFunctionOracle):
        self.base = base
        self.calls = 0
        super().__init__(base.ground, name=base.name)
        self.calls = 0

    def _raw(self, mask):
        self.calls += 1
        return self.base._value(mask)

    def _value(self, mask):
        self.calls += 1
        return self.base._value(mask)


def evaluate(oracle: SetFunctionOracle, subset) -> float:
    return oracle.evaluate(subset)


def incremental_gain(oracle: SetFunctionOracle, subset, x) -> float:
    """rho_f(A, x) = f(A + x) - f(A)."""
    a = oracle.ground.as_mask(subset)
    x = oracle.ground.index(x)
    if a >> x & 1:
        raise ValidationError(f"element {x} already in subset")
    return oracle._value(a | 1 << x) - oracle._value(a)


@dataclass
class PropertyReport:
    property: str
    tolerance: float
    violations: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.holds


def check_property(oracle: SetFunctionOracle, prop: str, tolerance: float = DEFAULT_TOL) -> PropertyReport:
    """Exhaustively test submodularity, posimodularity or symmetry.

    Witnesses are ``(A, B, lhs, rhs)`` with lhs the side that should be larger
    (for symmetry: ``(A, V\\A, f(A), f(V\\A))``).
    """
    if prop not in PROPERTIES:
        raise ValidationError(f"unknown property {prop!r}; expected one of {PROPERTIES}")
    n = oracle.n
    if n > MAX_CHECK_N:
        raise GroundSetTooLarge(f"brute-force checks need n <= {MAX_CHECK_N}, got {n}")
    if prop != "symmetric" and n > MAX_PAIR_CHECK_N:
        raise GroundSetTooLarge(f"pair checks need n <= {MAX_PAIR_CHECK_N}, got {n}")
    values = oracle.table()
    if prop == "symmetric":
        viol = kernels.symmetry_violations(values, n, tolerance)
    else:
        kind = kernels.SUBMODULAR if prop == "submodular" else kernels.POSIMODULAR
        viol = kernels.pair_violations(values, n, kind, tolerance)
    return PropertyReport(prop, tolerance, list(viol))


def check_diminishing_returns(oracle: SetFunctionOracle, tolerance: float = DEFAULT_TOL) -> PropertyReport:
    """rho(A, x) >= rho(B, x) for all A <= B, x not in B; witnesses (A, B, x, rho_A, rho_B)."""
    n = oracle.n
    if n > MAX_PAIR_CHECK_N:
        raise GroundSetTooLarge(f"diminishing-returns check needs n <= {MAX_PAIR_CHECK_N}, got {n}")
    viol = kernels.diminishing_returns_violations(oracle.table(), n, tolerance)
    return PropertyReport("diminishing-returns", tolerance, list(viol))
