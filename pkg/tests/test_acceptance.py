"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -s`` to see the per-criterion lines while passing.
"""

import math
import os
import sys
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest
from numba import njit
from scipy.stats import chisquare

from dualgraph import _kernels
from dualgraph.cli import main as cli_main
from dualgraph.experiments import SweepConfig, loglog_fit, model_sweep
from dualgraph.graph import Graph, degree_stats, largest_component
from dualgraph.io import load_graph
from dualgraph.models import (
    build_model,
    model_catalog,
    perturbed_grid,
    resolve_model,
    square_grid,
    triangular_grid,
)
from dualgraph.planarity import is_planar, verify_embedding, verify_kuratowski
from dualgraph.rngutil import child_seed
from dualgraph.spanning import (
    log_spanning_tree_count,
    spanning_tree_constant,
    wilson_ust,
)
from dualgraph.splitting import (
    BalanceRule,
    default_rule,
    estimate_splittability,
    run_splittability_trials,
    splittable_fraction_exact,
)

from oracles import (
    corpus_graphs,
    enumerate_spanning_trees,
    planar_bruteforce,
    prufer_decode,
    spanning_tree_count_bruteforce,
)


def report(name: str, ok: bool, details: str = "") -> None:
    print(f"[ACCEPTANCE] {name}: {'PASS' if ok else 'FAIL'}  {details}")


def cycle(n):
    return Graph(range(n), [(i, (i + 1) % n) for i in range(n)])


def complete(n):
    return Graph(range(n), combinations(range(n), 2))


CORPUS = corpus_graphs(200)


# -- 1. exact spanning-tree counts -------------------------------------------------

def test_exact_spanning_tree_counts():
    checks = []
    checks.append(
        abs(log_spanning_tree_count(square_grid(3, 3)) - math.log(192)) <= 1e-9
    )
    checks.append(
        abs(log_spanning_tree_count(complete(4)) - math.log(16)) <= 1e-9
    )
    for n in range(3, 11):
        checks.append(
            abs(log_spanning_tree_count(cycle(n)) - math.log(n))
            <= 1e-9 * math.log(n)
        )
    rng = np.random.default_rng(77)
    for _ in range(20):
        n = int(rng.integers(2, 16))
        edges = prufer_decode([int(rng.integers(0, n)) for _ in range(n - 2)], n)
        checks.append(abs(log_spanning_tree_count(Graph(range(n), edges))) <= 1e-9)
    compared = 0
    agree = True
    for g in CORPUS:
        if g.n > 8 or g.n < 2 or not g.is_connected():
            continue
        brute = spanning_tree_count_bruteforce(g)
        agree &= math.isclose(
            math.exp(log_spanning_tree_count(g)), brute, rel_tol=1e-9
        )
        compared += 1
    ok = all(checks) and agree and compared >= 50
    report(
        "exact spanning-tree counts", ok,
        f"fixed cases {sum(checks)}/{len(checks)}, "
        f"enumeration agreement on {compared} corpus graphs",
    )
    assert ok


# -- 2. grid asymptotes --------------------------------------------------------------

def test_grid_asymptotes():
    square = {s: spanning_tree_constant(square_grid(s, s)) for s in
              (10, 20, 30, 40, 60)}
    tri = {s: spanning_tree_constant(triangular_grid(s, s)) for s in
           (10, 20, 30, 40)}
    sq_seq = [square[s] for s in (10, 20, 30, 40, 60)]
    tri_seq = [tri[s] for s in (10, 20, 30, 40)]
    ok = (
        1.09 <= square[40] <= 1.1662
        and 1.11 <= square[60] <= 1.1662
        and sq_seq == sorted(sq_seq)
        and all(c < 1.1662 for c in sq_seq)
        and 1.50 <= tri[40] <= 1.615
        and tri_seq == sorted(tri_seq)
        and all(c < 1.615 for c in tri_seq)
    )
    report(
        "grid spanning-tree asymptotes", ok,
        f"square40={square[40]:.4f} square60={square[60]:.4f} "
        f"tri40={tri[40]:.4f}",
    )
    assert ok


# -- 3. perturbed grid p=0.7 -----------------------------------------------------------

def test_perturbed_grid_constant():
    values = [
        spanning_tree_constant(perturbed_grid(40, 40, 0.7, seed))
        for seed in range(10)
    ]
    mean = float(np.mean(values))
    sq = spanning_tree_constant(square_grid(40, 40))
    tr = spanning_tree_constant(triangular_grid(40, 40))
    ok = 1.36 <= mean <= 1.50 and sq < min(values) and max(values) < tr
    report(
        "perturbed grid p=0.7 constant", ok,
        f"mean={mean:.4f} over 10 seeds; square={sq:.4f} < ... < tri={tr:.4f}",
    )
    assert ok


# -- 4. Wilson uniformity ---------------------------------------------------------------

def test_wilson_uniformity():
    c4 = cycle(4)
    trees4 = enumerate_spanning_trees(c4)
    index4 = {t: i for i, t in enumerate(trees4)}
    counts4 = np.zeros(len(trees4))
    for i in range(40_000):
        counts4[index4[wilson_ust(c4, child_seed(1001, i)).edges]] += 1
    p_c4 = chisquare(counts4).pvalue

    k4 = complete(4)
    trees16 = enumerate_spanning_trees(k4)
    assert len(trees16) == 16
    index16 = {t: i for i, t in enumerate(trees16)}
    counts16 = np.zeros(16)
    for i in range(64_000):
        counts16[index16[wilson_ust(k4, child_seed(2002, i)).edges]] += 1
    p_k4 = chisquare(counts16).pvalue

    ok = p_c4 > 0.001 and p_k4 > 0.001
    report(
        "Wilson uniformity", ok,
        f"C4 p-value={p_c4:.4f} (40k samples), K4 p-value={p_k4:.4f} (64k)",
    )
    assert ok


# -- 5. splittability oracle ---------------------------------------------------------------

@njit(cache=True)
def _scan_all_trees(n, part, masks):
    """Compare the production subtree criterion against mask brute force.

    Iterates every Prüfer code on n labeled vertices.  ``masks`` holds the
    edge subsets of size k-1 as bitmasks.  Returns (trees, mismatches).
    """
    n_codes = 1
    for _ in range(n - 2):
        n_codes *= n
    k = n // part
    seq = np.zeros(max(n - 2, 1), np.int64)
    eu = np.empty(max(n - 1, 1), np.int64)
    ev = np.empty(max(n - 1, 1), np.int64)
    deg = np.empty(n, np.int64)
    indptr = np.empty(n + 1, np.int64)
    nbrs = np.empty(2 * (n - 1), np.int64)
    fill = np.empty(n, np.int64)
    parent = np.empty(n, np.int64)
    sizes = np.empty(n, np.int64)
    pending = np.empty(n, np.int64)
    stack = np.empty(n, np.int64)
    uf = np.empty(n, np.int64)
    cnt = np.empty(n, np.int64)
    mismatches = 0
    trees = 0
    for _code in range(n_codes):
        # Prüfer decode (linear pointer algorithm)
        if n == 2:
            eu[0] = 0
            ev[0] = 1
        else:
            for i in range(n):
                deg[i] = 1
            for i in range(n - 2):
                deg[seq[i]] += 1
            ptr = 0
            while deg[ptr] != 1:
                ptr += 1
            leaf = ptr
            for i in range(n - 2):
                v = seq[i]
                eu[i] = leaf
                ev[i] = v
                deg[v] -= 1
                if deg[v] == 1 and v < ptr:
                    leaf = v
                else:
                    ptr += 1
                    while deg[ptr] != 1:
                        ptr += 1
                    leaf = ptr
            eu[n - 2] = leaf
            ev[n - 2] = n - 1
        # adjacency and rooting at 0
        for i in range(n):
            deg[i] = 0
        for e in range(n - 1):
            deg[eu[e]] += 1
            deg[ev[e]] += 1
        indptr[0] = 0
        for i in range(n):
            indptr[i + 1] = indptr[i] + deg[i]
            fill[i] = indptr[i]
        for e in range(n - 1):
            a, b = eu[e], ev[e]
            nbrs[fill[a]] = b
            fill[a] += 1
            nbrs[fill[b]] = a
            fill[b] += 1
        for i in range(n):
            parent[i] = -1
        parent[0] = 0
        top = 0
        stack[0] = 0
        while top >= 0:
            u = stack[top]
            top -= 1
            for j in range(indptr[u], indptr[u + 1]):
                w = nbrs[j]
                if parent[w] == -1:
                    parent[w] = u
                    top += 1
                    stack[top] = w
        parent[0] = -1
        # production criterion
        _kernels.subtree_sizes(parent, 0, sizes, pending)
        crit = _kernels.exact_split_count(sizes, n, part) == k
        # brute force over cut subsets
        brute = False
        for m in range(masks.shape[0]):
            mask = masks[m]
            for i in range(n):
                uf[i] = i
            for e in range(n - 1):
                if (mask >> e) & 1:
                    continue
                a = eu[e]
                while uf[a] != a:
                    uf[a] = uf[uf[a]]
                    a = uf[a]
                b = ev[e]
                while uf[b] != b:
                    uf[b] = uf[uf[b]]
                    b = uf[b]
                uf[a] = b
            for i in range(n):
                cnt[i] = 0
            balanced = True
            for i in range(n):
                r = i
                while uf[r] != r:
                    r = uf[r]
                cnt[r] += 1
            for i in range(n):
                if cnt[i] != 0 and cnt[i] != part:
                    balanced = False
                    break
            if balanced:
                brute = True
                break
        if crit != brute:
            mismatches += 1
        trees += 1
        # odometer increment
        i = n - 3
        while i >= 0:
            seq[i] += 1
            if seq[i] < n:
                break
            seq[i] = 0
            i -= 1
    return trees, mismatches


def test_splittability_oracle():
    from fractions import Fraction

    frac = splittable_fraction_exact(complete(4), BalanceRule(2, "exact"))
    k4_ok = frac == Fraction(12, 16)
    total_checks = 0
    mismatches = 0
    for n in range(2, 10):
        for k in range(2, min(n, 8) + 1):
            if n % k:
                continue
            masks = np.array(
                [
                    sum(1 << e for e in cut)
                    for cut in combinations(range(n - 1), k - 1)
                ],
                dtype=np.int64,
            )
            trees, bad = _scan_all_trees(n, n // k, masks)
            total_checks += trees * len(masks)
            mismatches += bad
    ok = k4_ok and mismatches == 0 and total_checks >= 10 ** 7
    report(
        "splittability oracle", ok,
        f"K4 fraction={frac}, {total_checks:,} subset checks over all trees "
        f"with <= 9 vertices, mismatches={mismatches}",
    )
    assert ok


# -- 6. GBAS coverage ----------------------------------------------------------------------

def test_gbas_coverage():
    k4 = complete(4)
    rule = BalanceRule(2, "exact")
    inside = 0
    for run in range(1000):
        est = estimate_splittability(
            k4, rule, 178, seed=child_seed(4242, run), estimator="gbas"
        )
        if 0.5625 <= est.p_hat <= 0.9375:
            inside += 1
    ok = inside >= 930
    report(
        "GBAS coverage", ok,
        f"{inside}/1000 gbas estimates within 25% of the exact 0.75",
    )
    assert ok


# -- 7. splittability scaling -----------------------------------------------------------------

def _model3_fit(k, sizes, master_seed):
    pts = []
    spec = resolve_model("3")
    for si, n in enumerate(sizes):
        for rep in range(5):
            seed = child_seed(child_seed(master_seed, si), rep)
            g = build_model(spec, n, seed)
            rec = run_splittability_trials(
                g, default_rule(n, k), 178, child_seed(seed, k)
            )
            pts.append((n, rec.successes / rec.trials))
    return loglog_fit(pts)


def test_splittability_scaling_model3():
    fit2 = _model3_fit(2, (64, 128, 256, 512, 1024), 9001)
    fit3 = _model3_fit(3, (64, 128, 256), 9002)
    ok2 = -1.4 <= fit2.slope <= -0.6
    ok3 = -2.9 <= fit3.slope <= -1.5
    report(
        "splittability scaling (Model 3)", ok2 and ok3,
        f"k=2 slope={fit2.slope:.4f} (R2={fit2.r_squared:.3f}) need [-1.4,-0.6]; "
        f"k=3 slope={fit3.slope:.4f} (R2={fit3.r_squared:.3f}) need [-2.9,-1.5]",
    )
    assert ok2 and ok3


def test_splittability_real_county_data():
    data_dir = os.environ.get("DUALGRAPH_DATA_DIR")
    if not data_dir or not Path(data_dir).is_dir():
        report("county-data splittability fit", True,
               "SKIPPED: no data directory supplied (set DUALGRAPH_DATA_DIR)")
        pytest.skip("real county data not available")
    files = sorted(Path(data_dir).glob("*.json"))
    pts = []
    for i, path in enumerate(files):
        g = load_graph(path)
        comp = largest_component(g)
        if comp.n < 8:
            continue  # the small-graph exclusion (n < 4k for k=2)
        rec = run_splittability_trials(
            g, default_rule(comp.n, 2), 178, child_seed(31, i),
            graph_label=path.stem,
        )
        pts.append((comp.n, rec.successes / rec.trials))
    fit = loglog_fit(pts)
    ok = abs(fit.slope - (-1.0991)) <= 0.15 and fit.r_squared >= 0.85
    report(
        "county-data splittability fit", ok,
        f"slope={fit.slope:.4f} (want -1.0991 +/- 0.15), R2={fit.r_squared:.4f}",
    )
    assert ok


# -- 8. model metrics ----------------------------------------------------------------------------

def test_model_metrics():
    config = SweepConfig(
        models=("2", "3", "8", "11c", "12"),
        sizes=(100, 250, 500, 1000, 2500),
        seeds_per_size=10,
        master_seed=606,
    )
    rows = {row["model"].split(":", 1)[0]: row for row in model_sweep(config)}
    checks = {
        "model 3 planar rate = 1.00": rows["3"]["planar_rate"] == 1.0,
        "model 3 avg degree 5.57 +/- 0.15":
            abs(rows["3"]["avg_degree"] - 5.57) <= 0.15,
        "model 2 avg degree 5.60 +/- 0.20":
            abs(rows["2"]["avg_degree"] - 5.60) <= 0.20,
        "model 2 planar rate 0.00": rows["2"]["planar_rate"] == 0.0,
        "model 11c avg degree 5.48 +/- 0.20":
            abs(rows["11c"]["avg_degree"] - 5.48) <= 0.20,
        "model 11c ST constant 1.36 +/- 0.08":
            abs(rows["11c"]["avg_st_constant"] - 1.36) <= 0.08,
        "model 8 avg degree 5.49 +/- 0.20":
            abs(rows["8"]["avg_degree"] - 5.49) <= 0.20,
        "model 8 ST constant 1.45 +/- 0.08":
            abs(rows["8"]["avg_st_constant"] - 1.45) <= 0.08,
        "model 12 avg degree 5.45 +/- 0.20":
            abs(rows["12"]["avg_degree"] - 5.45) <= 0.20,
        "model 12 ST constant 1.44 +/- 0.08":
            abs(rows["12"]["avg_st_constant"] - 1.44) <= 0.08,
    }
    failed = [name for name, ok in checks.items() if not ok]
    measured = "; ".join(
        f"{m}: deg={rows[m]['avg_degree']:.3f} st={rows[m]['avg_st_constant']:.3f} "
        f"planar={rows[m]['planar_rate']:.2f}"
        for m in ("2", "3", "8", "11c", "12")
    )
    report(
        "model metrics", not failed,
        f"{len(checks) - len(failed)}/{len(checks)} targets met "
        f"({measured})" + (f"; failed: {failed}" if failed else ""),
    )
    assert not failed, f"unmet targets: {failed}"


# -- 9. planarity ---------------------------------------------------------------------------------

def test_planarity_acceptance():
    agree = 0
    witnesses_ok = True
    for g in CORPUS:
        if g.n > 8:
            continue
        verdict = is_planar(g)
        if verdict.planar != planar_bruteforce(g):
            witnesses_ok = False
            break
        if verdict.planar:
            witnesses_ok &= verify_embedding(g, verdict.embedding)
        else:
            witnesses_ok &= verify_kuratowski(g, verdict.kuratowski_edges)
        agree += 1
    k5 = is_planar(complete(5))
    k33 = is_planar(
        Graph(range(6), [(a, b) for a in range(3) for b in range(3, 6)])
    )
    kuratowski_ok = (
        not k5.planar
        and verify_kuratowski(complete(5), k5.kuratowski_edges)
        and not k33.planar
        and verify_kuratowski(
            Graph(range(6), [(a, b) for a in range(3) for b in range(3, 6)]),
            k33.kuratowski_edges,
        )
    )
    delaunay_ok = all(
        is_planar(build_model(resolve_model("3"), n, seed),
                  extract_kuratowski=False).planar
        for n in (100, 400, 1000)
        for seed in (0, 1)
    )
    ok = witnesses_ok and kuratowski_ok and delaunay_ok and agree >= 190
    report(
        "planarity", ok,
        f"brute-force agreement on {agree} corpus graphs; K5/K3,3 witnesses "
        f"verified; Delaunay outputs planar",
    )
    assert ok


# -- 10. determinism -------------------------------------------------------------------------------

def test_cli_determinism(tmp_path, capsys, monkeypatch):
    def run(*argv):
        assert cli_main(list(argv)) == 0
        capsys.readouterr()

    outputs = []
    for tag in ("a", "b"):
        gen = tmp_path / f"gen-{tag}.json"
        run("generate", "--model", "8", "-n", "60", "--seed", "77", "-o", str(gen))
        split = tmp_path / f"split-{tag}.csv"
        run("split", "--model", "3", "-n", "48", "-k", "2", "--successes", "40",
            "--seed", "5", "--out", str(split))
        cfg = tmp_path / f"cfg-{tag}.txt"
        cfg.write_text(
            "models = 3; 11c\nsizes = 25, 36\nseeds_per_size = 2\nmaster_seed = 3\n"
        )
        sweep = tmp_path / f"sweep-{tag}.csv"
        run("sweep", "models", "--config", str(cfg), "--out", str(sweep))
        st = tmp_path / f"st-{tag}.csv"
        run("sweep", "stconst", "--config", str(cfg), "--out", str(st))
        outputs.append(
            tuple(p.read_bytes() for p in (gen, split, sweep, st))
        )
    same_seed_identical = outputs[0] == outputs[1]

    # thread count must not change output bytes
    monkeypatch.setenv("DUALGRAPH_THREADS", "4")
    gen4 = tmp_path / "gen-threads.json"
    run("generate", "--model", "8", "-n", "60", "--seed", "77", "-o", str(gen4))
    cfg = tmp_path / "cfg-a.txt"
    sweep4 = tmp_path / "sweep-threads.csv"
    run("sweep", "models", "--config", str(cfg), "--out", str(sweep4))
    threads_identical = (
        gen4.read_bytes() == outputs[0][0]
        and sweep4.read_bytes() == outputs[0][2]
    )
    ok = same_seed_identical and threads_identical
    report(
        "CLI determinism", ok,
        "byte-identical outputs across reruns and thread counts",
    )
    assert ok
