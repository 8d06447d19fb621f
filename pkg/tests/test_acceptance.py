"""The nine acceptance criteria, each at its stated tolerance.

Every criterion records a one-line PASS/FAIL verdict; the lines are printed
in the terminal summary (see conftest.py) and when run as a script.
"""

import time

import numpy as np
import pytest

import oracles as ref
from subsup.experiments import format_table2, repro_table2, repro_table3
from subsup.infomodel import (DiscreteClassModel, GaussianClassModel, conditional_mi, entropy_oracle,
                              mi_edge_weights, split_mi_oracle)
from subsup.instances import random_gaussian_mi, random_spd, random_submodular, random_symmetric
from subsup.io import load_fixture
from subsup.polymatroid import ModularWeights, chain_masks, greedy_vertex, modular_approximation, rng_for
from subsup.setcore import CountingOracle, GroundSet, check_property
from subsup.sfm import min_norm_minimize, minimize_proper, queyranne_minimize
from subsup.ssp import SspOptions, ssp_minimize
from subsup.structlearn import chow_liu_tree, evaluate_error, fit_tree_classifier, make_discriminative_tree, tree_weight

RESULTS = {}
QUEYRANNE_CALL_CONSTANT = 1  # calls <= C * n^3


def record(k, ok, detail):
    RESULTS[k] = (bool(ok), detail)
    assert ok, f"criterion {k}: {detail}"


def summary_lines():
    lines = []
    for k in range(1, 10):
        if k not in RESULTS:
            lines.append(f"criterion {k}: NOT RUN - no verdict recorded (deselected or errored)")
            continue
        ok, detail = RESULTS[k]
        lines.append(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")
    return lines


def test_criterion_1_table2():
    t0 = time.perf_counter()
    rep = repro_table2()
    text = format_table2(rep)
    elapsed = time.perf_counter() - t0
    got = {r["method"]: r["error"] for r in rep.rows}
    worst = max(abs(got[k] - v) for k, v in ref.TABLE2.items())
    lines = {k: next(l for l in text.splitlines() if l.strip().startswith(k)) for k in ref.TABLE2}
    printed_ok = all(lines[k].split()[len(k.split())] == ref.TABLE2_PRINTED[k] for k in lines)
    record(1, worst <= 1e-9 and printed_ok and elapsed < 1.0,
           f"max |err - reported| = {worst:.1e}, printed match {printed_ok}, {elapsed:.3f} s")


def test_criterion_2_modular_approximation():
    worst_upper, worst_tight, count = -np.inf, 0.0, 0
    for i in range(100):
        g = random_gaussian_mi(6, i) if i % 2 == 0 else random_submodular(6, i, "cut+modular")
        gt = g.table()
        for j in range(10):
            pi = rng_for((i, j)).permutation(6).tolist()
            ht = modular_approximation(g, pi).table()
            worst_upper = max(worst_upper, float(np.max(ht - gt)))
            worst_tight = max(worst_tight, max(abs(ht[w] - gt[w]) for w in chain_masks(pi)))
            count += 1
    record(2, worst_upper <= 1e-9 and worst_tight <= 1e-9,
           f"{count} (g, pi) pairs, max h-g = {worst_upper:.1e}, max chain gap = {worst_tight:.1e}")


def test_criterion_3_engine_equivalence():
    worst_q = worst_m = 0.0
    max_ratio = 0.0
    for n in range(5, 9):
        for s in range(100):
            sym = random_symmetric(n, 1000 * n + s)
            best, _ = ref.brute_min(ref.table_of(sym._value, n), n)
            counted = CountingOracle(sym)
            worst_q = max(worst_q, abs(queyranne_minimize(counted).value - best))
            max_ratio = max(max_ratio, counted.calls / n ** 3)
            f = random_submodular(n, 1000 * n + s)
            vals = ref.table_of(f._value, n)
            worst_m = max(worst_m, abs(min_norm_minimize(f).value - min(vals)))
            worst_m = max(worst_m, abs(minimize_proper(f, "minnorm").value - ref.brute_min(vals, n)[0]))
    record(3, worst_q <= 1e-6 and worst_m <= 1e-6 and max_ratio <= QUEYRANNE_CALL_CONSTANT,
           f"400 instances/engine, queyranne gap {worst_q:.1e}, min-norm gap {worst_m:.1e}, "
           f"max calls/n^3 = {max_ratio:.3f}")


def test_criterion_4_ssp():
    monotone = modular_exact = one_round = ls_opt = True
    runs = 0
    for n in range(4, 9):
        for s in range(8):
            f, g = random_submodular(n, 10 * n + s), random_submodular(n, 500 + 10 * n + s)
            phi = [a - b for a, b in zip(ref.table_of(f._value, n), ref.table_of(g._value, n))]
            opts = SspOptions(seed=s, restarts=3, local_search_radius=1)
            res, trace = ssp_minimize(f, g, opts)
            runs += 1
            for r in range(3):
                objs = [it.objective for it in trace.for_restart(r)]
                monotone &= all(b <= a + 1e-12 for a, b in zip(objs, objs[1:]))
            full = (1 << n) - 1
            a = res.minimizer
            ls_opt &= all(phi[a ^ 1 << i] >= phi[a] - opts.delta for i in range(n) if 0 < a ^ 1 << i < full)
            m = ModularWeights(GroundSet(n), rng_for((n, s)).normal(size=n))
            pm = [x - y for x, y in zip(ref.table_of(f._value, n), m.table())]
            best, _ = ref.brute_min(pm, n)
            res, trace = ssp_minimize(f, m, SspOptions(seed=s))
            modular_exact &= abs(res.value - best) <= 1e-9
            its = trace.for_restart(0)
            # start set, then at most one accepted step, which lands on the optimum
            one_round &= len(its) <= 2 and abs(its[-1].objective - best) <= 1e-9
            monotone &= all(b.objective <= a.objective + 1e-12 for a, b in zip(its, its[1:]))
    record(4, monotone and modular_exact and one_round and ls_opt,
           f"{runs} runs: monotone {monotone}, modular-g exact {modular_exact} in one round {one_round}, "
           f"1-exchange optimal {ls_opt}")


def test_criterion_5_greedy_vertex():
    worst = 0.0
    for i in range(50):
        n = 4 + i % 3
        g = random_submodular(n, 7000 + i)
        c = rng_for((i, 5)).normal(size=n)
        best = ref.best_permutation_vertex(ref.table_of(g._value, n), n, c)
        worst = max(worst, abs(greedy_vertex(g, c).dot(c) - best))
    record(5, worst <= 1e-9, f"50 (g, c) pairs at n=4..6, max |greedy - best vertex| = {worst:.1e}")


def test_criterion_6_chow_liu():
    worst = 0.0
    for i in range(60):
        n = 2 + i % 5
        rng = rng_for((i, 6))
        if i % 2:
            covs = [random_spd(n, rng) for _ in range(2)]
            w = mi_edge_weights(GaussianClassModel(covs, [0.5, 0.5], check_variances=False), "conditional-mi")
        else:
            w = rng.uniform(size=(n, n))
            w = (w + w.T) / 2
        t = chow_liu_tree(w)
        worst = max(worst, abs(tree_weight(t, w) - ref.max_tree_weight(np.asarray(w).tolist())))
    m = load_fixture()
    chain = ((0, 1), (1, 2))
    variants = [mi_edge_weights(m, "marginal-mi"), mi_edge_weights(m, "conditional-mi"),
                mi_edge_weights(m, "classwise-mi", 0), mi_edge_weights(m, "classwise-mi", 1)]
    chains = all(chow_liu_tree(w).edges == chain for w in variants)
    record(6, worst <= 1e-12 and chains,
           f"MST vs enumeration max gap {worst:.1e} (n<=6), all Table-1 variants give X1-X2-X3: {chains}")


def test_criterion_7_discriminative_tree():
    m = load_fixture()
    t = make_discriminative_tree(m)
    err = evaluate_error(m, fit_tree_classifier(m, t))
    tabs = [ref.TABLE1_CLASS1, ref.TABLE1_CLASS2]
    enum = {tuple(e): ref.tree_error(tabs, ref.TABLE1_PRIORS, 3, list(e)) for e in ref.spanning_trees(3)}
    match = [e for e, v in enum.items() if abs(v - 0.40625) <= 1e-12]
    ok = t.contains(0, 2) and abs(err - 0.40625) <= 1e-12 and match == [t.edges]
    record(7, ok, f"returned {t.edges}, exact error {err}, enumeration "
                  + ", ".join(f"{e}={v}" for e, v in sorted(enum.items())))


@pytest.mark.slow
def test_criterion_8_table3():
    t0 = time.perf_counter()
    rep = repro_table3(range(6, 11), seeds=10, train=2000, test=2000, jobs=1)
    elapsed = time.perf_counter() - t0
    s = rep.summary
    d = s["disc_vs_gen"]
    record(8, s["ordering_holds"] and d["exceeds_2sigma"] and elapsed < 300,
           f"complete {s['complete']['mean']:.4f} < disc {s['discriminative']['mean']:.4f} < "
           f"gen {s['generative']['mean']:.4f} < avg-random {s['avg_random']['mean']:.4f}: {s['ordering_holds']}; "
           f"gen-disc {d['gap']:.4f} vs 2 sigma {2 * d['pooled_sigma']:.4f}; {elapsed:.0f} s")


def _random_discrete(n, seed):
    rng = rng_for((seed, 90))
    t = rng.dirichlet(np.ones(1 << n), size=2)
    t /= t.sum(axis=1, keepdims=True)
    return DiscreteClassModel(t, [0.4, 0.6])


def test_criterion_9_property_suites():
    checks = {"entropy submodular": True, "MI symmetric": True, "MI non-negative": True,
              "symmetric posimodular": True, "CMI two ways": True}
    worst = 0.0
    for i in range(24):
        n = 2 + i % 5
        gaussian = i % 2 == 1
        if gaussian:
            rng = rng_for((i, 91))
            m = GaussianClassModel([random_spd(n, rng) for _ in range(2)], [0.4, 0.6], check_variances=False)
        else:
            m = _random_discrete(n, i)
        for wc in (False, True):
            checks["entropy submodular"] &= check_property(entropy_oracle(m, wc), "submodular").holds
            s = split_mi_oracle(m, range(n), (), with_class=wc)
            checks["MI symmetric"] &= check_property(s, "symmetric").holds
            checks["MI non-negative"] &= bool(min(s.table()) >= -1e-12)
            checks["symmetric posimodular"] &= check_property(s, "posimodular").holds
        perm = rng_for((i, 92)).permutation(n).tolist()
        a, b, c = perm[:1], perm[1:2], perm[2:]
        for cls in (None, 0, 1):
            # None is the unconditioned distribution (pooled covariance for Gaussians)
            if gaussian:
                direct = ref.gauss_cmi(m.covariance(cls), a, b, c)
            else:
                direct = ref.cmi_direct(m.table(cls).tolist(), n, a, b, c)
            h = lambda s_: m.entropy(sum(1 << v for v in s_), cls)
            worst = max(worst, abs(direct - (h(a + c) + h(b + c) - h(a + b + c) - h(c))))
        worst = max(worst, abs(conditional_mi(m, a, b, c, with_class=True) - sum(
            p * (ref.gauss_cmi(m.covariances[k], a, b, c) if gaussian else
                 ref.cmi_direct(m.tables[k].tolist(), n, a, b, c)) for k, p in enumerate(m.priors))))
    checks["CMI two ways"] = worst <= 1e-12
    record(9, all(checks.values()),
           ", ".join(f"{k} {v}" for k, v in checks.items()) + f" (max CMI discrepancy {worst:.1e})")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
