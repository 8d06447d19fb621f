"""Pure-Python/numpy implementations of the hot kernels.

Mirrors ``_ckernels.pyx`` function for function; used when the compiled
extension is unavailable or ``SUBSUP_PURE_PYTHON=1`` is set.
"""

import numpy as np

SUBMODULAR = 0
POSIMODULAR = 1


def subset_sums(weights):
    """Return the 2**n table of modular values sum_{i in A} w_i."""
    w = np.ascontiguousarray(weights, dtype=np.float64)
    out = np.zeros(1 << w.shape[0])
    for i, wi in enumerate(w):
        half = 1 << i
        out[half:2 * half] = out[:half] + wi
    return out


def _compress(n, varmask):
    outcomes = np.arange(1 << n, dtype=np.int64)
    idx = np.zeros_like(outcomes)
    j = 0
    for v in range(n):
        if varmask >> v & 1:
            idx |= ((outcomes >> v) & 1) << j
            j += 1
    return idx, j


def marginal_table(table, n, varmask):
    """Marginalize a 2**n binary joint onto the variables in ``varmask``.

    Output index bit j is the value of the j-th selected variable.
    """
    idx, k = _compress(n, varmask)
    return np.bincount(idx, weights=np.asarray(table, dtype=np.float64), minlength=1 << k)


def marginal_entropy(table, n, varmask):
    """-sum p ln p of the marginal on ``varmask`` (nats)."""
    if varmask == 0:
        return 0.0
    p = marginal_table(table, n, varmask)
    p = p[p > 0.0]
    return float(-np.sum(p * np.log(p)))


def pair_violations(values, n, kind, tol):
    """Exhaustive pair sweep for the submodular or posimodular inequality.

    Checks every unordered pair A <= B (bitmask order). Returns a list of
    ``(A, B, lhs, rhs)`` with ``lhs < rhs - tol``.
    """
    v = np.asarray(values, dtype=np.float64)
    size = 1 << n
    out = []
    for a in range(size):
        b = np.arange(a, size)
        lhs = v[a] + v[b]
        if kind == SUBMODULAR:
            rhs = v[a | b] + v[a & b]
        else:
            rhs = v[a & ~b] + v[b & ~a]
        bad = np.nonzero(lhs < rhs - tol)[0]
        for k in bad:
            out.append((a, int(b[k]), float(lhs[k]), float(rhs[k])))
    return out


def diminishing_returns_violations(values, n, tol):
    """All (A, B, x) with A subset B, x not in B and rho(A, x) < rho(B, x) - tol."""
    v = np.asarray(values, dtype=np.float64)
    out = []
    for b in range(1 << n):
        outside = [x for x in range(n) if not b >> x & 1]
        if not outside:
            continue
        a = b
        while True:
            for x in outside:
                bit = 1 << x
                ra = v[a | bit] - v[a]
                rb = v[b | bit] - v[b]
                if ra < rb - tol:
                    out.append((a, b, x, float(ra), float(rb)))
            if a == 0:
                break
            a = (a - 1) & b
    return out


def symmetry_violations(values, n, tol):
    """All A with |f(A) - f(V \\ A)| > tol, each complementary pair once."""
    v = np.asarray(values, dtype=np.float64)
    full = (1 << n) - 1
    a = np.arange(1 << n)
    comp = full ^ a
    keep = a <= comp
    diff = np.abs(v[a] - v[comp])
    bad = np.nonzero(keep & (diff > tol))[0]
    return [(int(k), int(full ^ k), float(v[k]), float(v[full ^ k])) for k in bad]
