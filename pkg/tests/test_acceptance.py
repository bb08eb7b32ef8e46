"""End-to-end acceptance checks, one test per criterion.

Every check records a one-line verdict; ``conftest.pytest_terminal_summary``
prints them after the run, and running this file directly prints them too.
Criteria 6 and 7 share one 1,000-graph sweep (about 30-60 min on one core).
"""
import io
import os
import time
from pathlib import Path

import numpy as np
import pytest

from signedwhole.balance import exact_min_frustration, is_balanced
from signedwhole.data import GeneratorConfig, collection_stats, generate_planted, load_collection
from signedwhole.evaluation import cross_validate
from signedwhole.graph import SignedGraph
from signedwhole.methods import _PARTITIONS, _SINE_VECTORS, embed
from signedwhole.sg2v import pvdbow_loss
from signedwhole.sine import init_params, sine_loss
from signedwhole.wl import LabelDictionary, dump_trace, compact_notation, relabel
from signedwhole.wsgcn import (DualHidden, _sample_nonedges, attach_master_nodes, init_features, init_weights,
                               link_sign_loss, mean_operators, sgcn_forward)

from conftest import FIG1A, FIG1B, FIG3A, FIG3B, FIG4, brute_frustration, random_graph

VERDICTS: dict[str, str] = {}

TREND_GRAPHS = 1000
TREND_SEED = 7
DEPTHS = (1, 2, 3, 4, 5)
SG2V = ("g2v", "sg2vn", "sg2vsb")
WSGCN = ("wsgcn+", "wsgcn-", "wsgcn±", "wsgcn-sb", "wsgcn-gb")
BUDGET_S = 2 * 3600


def record(key, ok, detail, status=None):
    VERDICTS[key] = f"criterion {key}: {status or ('PASS' if ok else 'FAIL')}  {detail}"
    print(VERDICTS[key])
    return ok


def rel_err(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-12))


def numeric_grad(f, params):
    out = {}
    eps = 1e-6
    for k, v in params.items():
        g = np.zeros_like(v)
        for idx in np.ndindex(v.shape):
            old = v[idx]
            v[idx] = old + eps
            hi = f()
            v[idx] = old - eps
            lo = f()
            v[idx] = old
            g[idx] = (hi - lo) / (2 * eps)
        out[k] = g
    return out


# -- 1 ---------------------------------------------------------------------------

def test_criterion_1_golden_traces():
    t0 = time.perf_counter()
    buf = io.StringIO()
    dump_trace(relabel(SignedGraph(4, FIG3A), "unsigned", 1, LabelDictionary()), buf, "fig3a")
    dump_trace(relabel(SignedGraph(4, FIG3B), "sg2vn", 1, LabelDictionary()), buf, "fig3b")
    dump_trace(relabel(SignedGraph(4, FIG3B), "sg2vsb", 1, LabelDictionary()), buf, "fig3b")
    rows = [line.split("\t") for line in buf.getvalue().splitlines() if not line.startswith("#")]
    comps = {(r[0], compact_notation(r[1])) for r in rows}
    want = [("0", "3,122"), ("0", "1,+2-3+4"), ("0+", "2,11,2"), ("0-", "1,01,0")]
    missing = [w for w in want if w not in comps]
    dt = time.perf_counter() - t0
    ok = not missing and dt < 1.0
    record("1", ok, f"{len(want) - len(missing)}/{len(want)} worked composites found in {dt:.3f}s")
    assert ok


# -- 2 ---------------------------------------------------------------------------

def test_criterion_2_frustration_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    agree = total = 0
    for _ in range(200):
        g = random_graph(rng, int(rng.integers(1, 11)), p=float(rng.uniform(0.2, 0.9)),
                         neg=float(rng.uniform(0.1, 0.9)))
        for mode in ("bisection", "free_k"):
            total += 1
            agree += exact_min_frustration(g, mode).frustrated_edge_count == brute_frustration(g, mode)
    a = exact_min_frustration(SignedGraph(7, FIG1A), "bisection")
    b = exact_min_frustration(SignedGraph(8, FIG1B), "free_k")
    dt = time.perf_counter() - t0
    ok = agree == total and a.frustrated_edge_count == 0 and b.frustrated_edge_count == 0 \
        and b.partition.k == 3 and dt < 30
    record("2", ok, f"{agree}/{total} agree; fig1a={a.frustrated_edge_count}, "
                    f"fig1b={b.frustrated_edge_count} (k={b.partition.k}); {dt:.1f}s")
    assert ok


# -- 3 ---------------------------------------------------------------------------

def test_criterion_3_balance_equivalences():
    rng = np.random.default_rng(3)
    bad = 0
    n_strict = n_gen = 0
    for _ in range(500):
        g = random_graph(rng, int(rng.integers(1, 11)), p=float(rng.uniform(0.1, 0.8)),
                         neg=float(rng.uniform(0.0, 1.0)))
        sb = exact_min_frustration(g, "bisection").frustrated_edge_count
        gb = exact_min_frustration(g, "free_k").frustrated_edge_count
        s, q = is_balanced(g, "strict"), is_balanced(g, "generalized")
        n_strict += s
        n_gen += q
        bad += (s != (sb == 0)) + (q != (gb == 0)) + (gb > sb)
    ok = bad == 0
    record("3", ok, f"{bad} disagreements over 500 graphs ({n_strict} strictly, {n_gen} generally balanced)")
    assert ok


# -- 4 ---------------------------------------------------------------------------

def _grad_pvdbow():
    rng = np.random.default_rng(40)
    docs, out = rng.normal(size=(3, 8)), rng.normal(size=(6, 8)) * 0.5
    targets, negs = np.array([0, 2, 3, 5, 1]), rng.integers(0, 6, (5, 4))
    _, g_doc, rows, g_rows = pvdbow_loss(docs, out, 2, targets, negs)
    g_out = np.zeros_like(out)
    np.add.at(g_out, rows, g_rows)
    p = {"docs": docs, "out": out}
    num = numeric_grad(lambda: pvdbow_loss(p["docs"], p["out"], 2, targets, negs)[0], p)
    return max(rel_err(g_doc, num["docs"][2]), rel_err(g_out, num["out"]))


def _grad_sine():
    rng = np.random.default_rng(41)
    p = init_params(5, 2, seed=1, n=5, hidden=4)
    for k in p:
        if k.startswith(("b", "c")):
            p[k] = rng.normal(size=p[k].shape) * 0.1
    c, a, b = np.array([0, 1, 2, 3]), np.array([1, 2, 3, 4]), np.array([2, 5, 0, 5])
    _, grads, _, _ = sine_loss(p, c, a, b, 2, 3.0, 1e-3)
    num = numeric_grad(lambda: sine_loss(p, c, a, b, 2, 3.0, 1e-3)[0], p)
    return max(rel_err(grads[k], num[k]) for k in p)


def _grad_wsgcn():
    g = SignedGraph(5, [(0, 1, 1), (1, 2, -1), (2, 3, 1), (3, 4, -1), (0, 4, 1), (1, 3, 1)])
    ag = attach_master_nodes(g, "gb", [0, 0, 1, 1, 0])
    x = init_features(ag, 4, seed=0)
    w = init_weights(4, 3, 2, seed=0)
    ne = _sample_nonedges(g, 4, np.random.default_rng(0))
    _, grads = link_sign_loss(ag, x, w, 2, "tanh", ne, 1.0, 1e-3)
    num = numeric_grad(lambda: link_sign_loss(ag, x, w, 2, "tanh", ne, 1.0, 1e-3)[0], w)
    return max(rel_err(grads[k], num[k]) for k in w)


@pytest.mark.parametrize("part,fn", [("a", _grad_pvdbow), ("b", _grad_sine), ("c", _grad_wsgcn)])
def test_criterion_4_gradient_checks(part, fn):
    t0 = time.perf_counter()
    err = fn()
    dt = time.perf_counter() - t0
    ok = err < 1e-4 and dt < 10
    record(f"4{part}", ok, f"max relative error {err:.2e} in {dt:.2f}s")
    assert ok


# -- 5 ---------------------------------------------------------------------------

def test_criterion_5_propagation_semantics():
    g = SignedGraph(10, FIG4)
    ag = attach_master_nodes(g, "none")
    ops = mean_operators(ag.graph)
    w = init_weights(4, 6, 2, seed=5)
    x = init_features(ag, 4, seed=5)
    ref = sgcn_forward(ops, x, w, 2, "linear")[0]

    def delta(v):
        hp = x.pos[0].copy()
        hp[v] += 1.0
        out = sgcn_forward(ops, DualHidden([hp], [x.neg[0]]), w, 2, "linear")[0]
        return (float(np.abs(out.pos[2][0] - ref.pos[2][0]).max()),
                float(np.abs(out.neg[2][0] - ref.neg[2][0]).max()))

    pos_path = delta(8)    # v1 +v2 +v9
    neg_path = delta(9)    # v1 -v4 +v10
    ok = pos_path[0] > 0 and pos_path[1] == 0.0 and neg_path[0] == 0.0 and neg_path[1] > 0
    record("5", ok, f"positive path (dh+, dh-)={pos_path[0]:.3g},{pos_path[1]:.3g}; "
                    f"negative path={neg_path[0]:.3g},{neg_path[1]:.3g}")
    assert ok


# -- 6 / 7 -----------------------------------------------------------------------

def run_trend_grid(n_graphs=TREND_GRAPHS, seed=TREND_SEED):
    coll = generate_planted(GeneratorConfig(n_graphs=n_graphs, seed=seed))
    y = np.array(coll.labels)
    t0 = time.perf_counter()
    scores, seconds = {}, {}
    for method in SG2V + WSGCN:
        for depth in DEPTHS:
            res = embed(coll, method, depth=depth, seed=0)
            scores[(method, depth)] = cross_validate(res.embedding.vectors, y, k=10, seed=0).macro_f
            seconds[(method, depth)] = res.seconds
            print(f"  {method:9s} depth {depth}: macro-F {scores[(method, depth)]:6.2f}  "
                  f"({res.seconds:.1f}s)", flush=True)
    for method in ("sine-sum", "sine-avg"):
        res = embed(coll, method, seed=0)
        scores[(method, 0)] = cross_validate(res.embedding.vectors, y, k=10, seed=0).macro_f
        seconds[(method, 0)] = res.seconds
        print(f"  {method:9s}: macro-F {scores[(method, 0)]:6.2f}  ({res.seconds:.1f}s)", flush=True)
    return scores, seconds, time.perf_counter() - t0


@pytest.fixture(scope="module")
def trend():
    return run_trend_grid()


def best(scores, method):
    return max(v for (m, _), v in scores.items() if m == method)


@pytest.mark.slow
def test_criterion_6a_signed_beats_unsigned(trend):
    scores, _, _ = trend
    sg_signed = max(best(scores, "sg2vn"), best(scores, "sg2vsb"))
    sg_gap = sg_signed - best(scores, "g2v")
    balance = max(best(scores, "wsgcn-sb"), best(scores, "wsgcn-gb"))
    blind = max(best(scores, "wsgcn+"), best(scores, "wsgcn-"))
    w_gap = balance - blind
    ok = sg_gap >= 3 and w_gap >= 3
    record("6a", ok, f"sg2v family: signed {sg_signed:.2f} vs g2v {best(scores, 'g2v'):.2f} (gap {sg_gap:+.2f}); "
                     f"wsgcn: balance-aware {balance:.2f} vs +/- {blind:.2f} (gap {w_gap:+.2f}; "
                     f"wsgcn± {best(scores, 'wsgcn±'):.2f})")
    assert ok


@pytest.mark.slow
def test_criterion_6b_gb_not_below_sb(trend):
    scores, _, _ = trend
    gb, sb = best(scores, "wsgcn-gb"), best(scores, "wsgcn-sb")
    ok = gb >= sb
    record("6b", ok, f"wsgcn-gb {gb:.2f} vs wsgcn-sb {sb:.2f}")
    assert ok


@pytest.mark.slow
def test_criterion_6c_depth_monotone(trend):
    scores, _, elapsed = trend
    lines, ok = [], True
    for method in ("sg2vsb", "wsgcn-gb"):
        col = [scores[(method, d)] for d in DEPTHS]
        drops = [col[i + 1] - col[i] for i in range(len(col) - 1)]
        ok &= min(drops) >= -2.0
        lines.append(f"{method} " + "/".join(f"{v:.1f}" for v in col))
    ok &= elapsed < BUDGET_S
    record("6c", ok, "; ".join(lines) + f"; sweep {elapsed / 60:.1f} min (budget 120)")
    assert ok


@pytest.mark.slow
def test_criterion_7_sine_baseline(trend):
    scores, _, _ = trend
    s_sum, s_avg = scores[("sine-sum", 0)], scores[("sine-avg", 0)]
    top = max(best(scores, m) for m in SG2V + WSGCN)
    ok = max(s_sum, s_avg) <= top - 5 and s_sum >= s_avg - 1
    record("7", ok, f"SiNE sum {s_sum:.2f}, avg {s_avg:.2f}; best whole-graph method {top:.2f}")
    assert ok


# -- 8 ---------------------------------------------------------------------------

SCALING_K = 80


@pytest.mark.slow
@pytest.mark.parametrize("method,depth", [("sg2vsb", 3), ("sine-sum", 0), ("wsgcn-gb", 2)])
def test_criterion_8_linear_scaling(method, depth):
    # distinct graphs for the two sizes so no cached solve is reused
    small = generate_planted(GeneratorConfig(n_graphs=SCALING_K, seed=801))
    large = generate_planted(GeneratorConfig(n_graphs=2 * SCALING_K, seed=802))
    _PARTITIONS.clear()
    _SINE_VECTORS.clear()
    embed(small.subset(range(5)), method, depth=max(depth, 1))      # warm-up
    t1 = embed(small, method, depth=max(depth, 1)).seconds
    t2 = embed(large, method, depth=max(depth, 1)).seconds
    ratio = t2 / t1
    ok = 1.5 <= ratio <= 2.5
    record(f"8 ({method})", ok, f"time({2 * SCALING_K})/time({SCALING_K}) = {t2:.1f}/{t1:.1f} = {ratio:.2f}")
    assert ok


# -- 9 ---------------------------------------------------------------------------

# published benchmark statistics: graphs, mean order, mean density, mean |E-|, mean |E+|
TABLE1 = {"SSO": (2545, 47.74, 0.48, 166.1, 245.9), "CCS": (24660, 27.31, 0.95, 220.6, 131.0),
          "EPF": (6000, 67.34, 0.70, 333.9, 2552.2)}


def test_criterion_9_benchmark():
    root = os.environ.get("SIGNEDWHOLE_BENCHMARK")
    if not root or not all((Path(root) / name / "manifest.csv").exists() for name in TABLE1):
        record("9", True, "benchmark not present (set SIGNEDWHOLE_BENCHMARK to a directory "
                          "holding SSO/, CCS/, EPF/ collections)", status="SKIP")
        pytest.skip("benchmark datasets not available")
    problems = []
    colls = {}
    for name, (count, order, dens, neg, pos) in TABLE1.items():
        coll = load_collection(Path(root) / name / "manifest.csv")
        colls[name] = coll
        st = collection_stats(coll, restarts=1)
        c = st.columns
        if len(coll) != count:
            problems.append(f"{name} has {len(coll)} graphs")
        if round(c["order"]["mean"], 2) != order:
            problems.append(f"{name} order {c['order']['mean']:.2f}")
        if abs(c["density"]["mean"] - dens) > 0.01:
            problems.append(f"{name} density {c['density']['mean']:.3f}")
        if round(c["negative_edges"]["mean"], 1) != neg or round(c["positive_edges"]["mean"], 1) != pos:
            problems.append(f"{name} edge counts")
    epf = colls["EPF"]
    y = np.array(epf.labels)
    gb = cross_validate(embed(epf, "wsgcn-gb", depth=5).embedding.vectors, y).macro_f
    g2v = cross_validate(embed(epf, "g2v", depth=5).embedding.vectors, y).macro_f
    ok = not problems and gb >= g2v + 10
    record("9", ok, f"EPF wsgcn-gb {gb:.2f} vs g2v {g2v:.2f}; table mismatches: {problems or 'none'}")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v", "-s"]))
