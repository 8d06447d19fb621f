"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both backends are imported side by side, checked for equal results, then timed.
"""

import argparse
import timeit

import numpy as np

from subsup import kernels


def cases(rng):
    p10 = rng.dirichlet(np.ones(1 << 12))
    v8 = rng.normal(size=1 << 8)
    v10 = rng.normal(size=1 << 10)
    v14 = rng.normal(size=1 << 14)
    w = rng.normal(size=16)
    # "close": numeric arrays; "set": violation witness lists (order may differ)
    return [
        ("subset_sums n=16", "close", lambda k: k.subset_sums(w)),
        ("marginal_entropy n=12 (586 masks)", "close",
         lambda k: [k.marginal_entropy(p10, 12, m) for m in range(1, 4096, 7)]),
        ("pair_violations submodular n=8", "set", lambda k: k.pair_violations(v8, 8, kernels.SUBMODULAR, 1e-9)),
        ("pair_violations posimodular n=10", "set", lambda k: k.pair_violations(v10, 10, kernels.POSIMODULAR, 1e9)),
        ("diminishing_returns n=10", "set", lambda k: k.diminishing_returns_violations(v10, 10, 1e9)),
        ("symmetry n=14", "set", lambda k: k.symmetry_violations(v14, 14, 1e9)),
    ]


def same(a, b, how):
    if how == "close":
        return np.allclose(a, b, rtol=1e-12, atol=1e-12)
    return sorted(map(tuple, a)) == sorted(map(tuple, b))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    impls = kernels.backends()
    if "cython" not in impls:
        print("compiled backend not built; only the fallback is available")
    rng = np.random.default_rng(0)
    print(f"{'kernel':42s}" + "".join(f"{name:>12s}" for name in impls) + ("     speedup" if len(impls) > 1 else ""))
    for label, how, fn in cases(rng):
        outs = {name: fn(k) for name, k in impls.items()}
        if len(outs) > 1:
            assert same(outs["python"], outs["cython"], how), f"backends disagree on {label}"
        times = {name: min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)) for name, k in impls.items()}
        row = f"{label:42s}" + "".join(f"{times[n] * 1e3:10.2f}ms" for n in impls)
        if len(impls) > 1:
            row += f"{times['python'] / times['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
