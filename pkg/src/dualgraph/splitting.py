"""Balanced splits of spanning trees and splittability estimation.

A spanning tree is k-splittable when removing k-1 of its edges leaves k
connected parts of (near-)equal vertex counts.  Exact mode (k divides n)
uses the subtree-size criterion: root the tree anywhere and count vertices
whose subtree size is divisible by n/k; the tree splits iff that count is
exactly k, and the cuts are the parent edges of the k-1 non-root such
vertices.  Near mode allows part sizes in {floor(n/k), ceil(n/k)} and is
decided by dynamic programming over achievable sizes of the part containing
each subtree root.

Splittability probabilities are estimated by running Bernoulli trials
(Wilson tree + balance check) until a fixed number of successes, after the
gamma-based scheme: alongside the success/trial counts, each trial adds one
unit-rate exponential deviate to an accumulator R, and (target-1)/R estimates
p with a relative-error law independent of p.  The plain ratio
successes/trials is recorded as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from . import _kernels, rngutil
from .errors import InputError, NumericalError, TrialCapExceeded
from .graph import Graph, largest_component
from .spanning import SpanningTree, log_spanning_tree_count, wilson_ust

DEFAULT_TARGET_SUCCESSES = 178  # 95% confidence of a <=25% relative error
DEFAULT_TRIAL_CAP = 10 ** 8
ENUMERATION_LIMIT = 10 ** 6


@dataclass(frozen=True)
class BalanceRule:
    """Number of parts and the tolerance on their sizes."""

    k: int
    mode: str = "near"  # "exact" | "near"

    def __post_init__(self):
        if self.k < 2:
            raise InputError(f"k must be >= 2, got {self.k}")
        if self.mode not in ("exact", "near"):
            raise InputError(f"mode must be 'exact' or 'near', got {self.mode!r}")

    def part_bounds(self, n: int) -> Tuple[int, int]:
        """(smallest, largest) admissible part size for an n-vertex tree."""
        if self.mode == "exact":
            if n % self.k:
                raise InputError(
                    f"exact balance requires k | n (k={self.k}, n={n})"
                )
            s = n // self.k
            return s, s
        return n // self.k, -(-n // self.k)


def default_rule(n: int, k: int) -> BalanceRule:
    """Exact when k divides n, near otherwise."""
    return BalanceRule(k=k, mode="exact" if n % k == 0 else "near")


@dataclass(frozen=True)
class SplitEstimate:
    graph_label: str
    n: int
    k: int
    successes: int
    trials: int
    p_hat: float
    seed: int
    estimator: str  # "ratio" | "gbas"


@dataclass(frozen=True)
class TrialRecord:
    """Raw outcome of a run of Bernoulli trials, before choosing an estimator."""

    graph_label: str
    n: int
    k: int
    successes: int
    trials: int
    exp_sum: float
    target: int
    seed: int

    def estimate(self, estimator: str) -> SplitEstimate:
        if estimator == "ratio":
            p_hat = self.successes / self.trials
        elif estimator == "gbas":
            if self.target < 2:
                raise InputError("gbas estimator needs target_successes >= 2")
            # p <= 1 a priori, so the unbiased (target-1)/R is truncated at 1
            p_hat = min(1.0, (self.target - 1) / self.exp_sum)
        else:
            raise InputError(f"unknown estimator {estimator!r}")
        return SplitEstimate(
            graph_label=self.graph_label, n=self.n, k=self.k,
            successes=self.successes, trials=self.trials,
            p_hat=p_hat, seed=self.seed, estimator=estimator,
        )


# -- rooting a tree ----------------------------------------------------------

def _tree_parent_array(t: SpanningTree) -> Tuple[np.ndarray, List]:
    """Root the tree at its smallest vertex; returns (parent indices, vertices)."""
    g = t.host
    verts = list(g.vertices)
    index = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    adj: List[List[int]] = [[] for _ in range(n)]
    for u, v in sorted(t.edges):
        adj[index[u]].append(index[v])
        adj[index[v]].append(index[u])
    for row in adj:
        row.sort()
    parent = np.full(n, -1, dtype=np.int64)
    seen = [False] * n
    seen[0] = True
    stack = [0]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                parent[w] = u
                stack.append(w)
    return parent, verts


def _sizes_from_parent(parent: np.ndarray, root: int = 0) -> np.ndarray:
    n = parent.shape[0]
    sizes = np.empty(n, dtype=np.int64)
    pending = np.empty(n, dtype=np.int64)
    _kernels.subtree_sizes(parent, root, sizes, pending)
    return sizes


# -- near-mode dynamic program -----------------------------------------------

def _children_lists(parent: np.ndarray) -> List[List[int]]:
    n = parent.shape[0]
    children: List[List[int]] = [[] for _ in range(n)]
    for v in range(n):
        p = parent[v]
        if p >= 0:
            children[p].append(v)
    return children

# edge statuses for the constrained near-mode DP
_KEEP, _MAY, _MUST = 0, 1, 2


def _near_dp_feasible(
    parent: np.ndarray,
    k: int,
    lo: int,
    hi: int,
    status: Optional[np.ndarray] = None,
) -> bool:
    """Does a cut set exist yielding exactly k parts with sizes in [lo, hi]?

    ``status[v]`` constrains the parent edge of v: 0 keep, 1 free, 2 must cut.
    Per vertex, masks[j] is a bitmask of achievable sizes of the open part
    containing the vertex, with j parts already closed below it.
    """
    n = parent.shape[0]
    children = _children_lists(parent)
    closed_ok = 0
    for s in range(lo, hi + 1):
        closed_ok |= 1 << s
    size_cap = (1 << (hi + 1)) - 1  # open part can never exceed hi

    masks: Dict[int, List[int]] = {}
    # iterative post-order
    order: List[int] = []
    stack = [0]
    while stack:
        u = stack.pop()
        order.append(u)
        stack.extend(children[u])
    for u in reversed(order):
        cur = [0] * k
        cur[0] = 1 << 1  # the open part starts as {u} with no closed parts
        for ch in children[u]:
            st = _MAY if status is None else status[ch]
            child_masks = masks.pop(ch)
            new = [0] * k
            for ju in range(k):
                mu = cur[ju]
                if not mu:
                    continue
                for jc in range(k - ju):
                    mc = child_masks[jc]
                    if not mc:
                        continue
                    if st != _MUST:
                        # keep the edge: open sizes add
                        acc = 0
                        rem = mc
                        while rem:
                            low = rem & -rem
                            s = low.bit_length() - 1
                            acc |= (mu << s) & size_cap
                            rem ^= low
                        new[ju + jc] |= acc
                    if st != _KEEP and (mc & closed_ok) and ju + jc + 1 < k:
                        # cut the edge: the child's open part closes
                        new[ju + jc + 1] |= mu
            cur = new
        masks[u] = cur
    return bool(masks[0][k - 1] & closed_ok)


# -- public split operations ---------------------------------------------------

def has_balanced_split(t: SpanningTree, rule: BalanceRule) -> bool:
    """Whether some set of k-1 tree edges yields k parts obeying the rule."""
    n = t.host.n
    k = rule.k
    if n < k:
        raise InputError(f"tree has {n} vertices, cannot make {k} parts")
    lo, hi = rule.part_bounds(n)
    parent, _ = _tree_parent_array(t)
    sizes = _sizes_from_parent(parent)
    if rule.mode == "exact":
        return int(_kernels.exact_split_count(sizes, n, n // k)) == k
    if k == 2:
        return bool(_kernels.near2_splittable(sizes, 0, n))
    if k == 3:
        cand = np.empty(n, dtype=np.int64)
        cand_b = np.empty(n, dtype=np.int64)
        return bool(_kernels.near3_splittable(parent, sizes, 0, n, cand, cand_b))
    return _near_dp_feasible(parent, k, lo, hi)


def find_balanced_split(
    t: SpanningTree, rule: BalanceRule
) -> Optional[FrozenSet[Tuple]]:
    """The lexicographically smallest set of k-1 cut edges, or None.

    In exact mode the cut set is unique (parent edges of the non-root
    vertices whose subtree size is divisible by n/k).  In near mode the
    witness is grown greedily, re-checking feasibility with the remaining
    edge choices constrained.
    """
    n = t.host.n
    k = rule.k
    if n < k:
        raise InputError(f"tree has {n} vertices, cannot make {k} parts")
    lo, hi = rule.part_bounds(n)
    parent, verts = _tree_parent_array(t)
    sizes = _sizes_from_parent(parent)

    if rule.mode == "exact":
        part = n // k
        if int(_kernels.exact_split_count(sizes, n, part)) != k:
            return None
        cuts = [
            tuple(sorted((verts[v], verts[parent[v]])))
            for v in range(1, n)
            if sizes[v] % part == 0
        ]
        return frozenset(cuts)

    if not _near_dp_feasible(parent, k, lo, hi):
        return None
    # greedy lexicographic witness: edges ordered by their sorted id pairs
    edge_order = sorted(
        (tuple(sorted((verts[v], verts[parent[v]]))), v) for v in range(1, n)
    )
    status = np.full(n, _KEEP, dtype=np.int64)
    chosen: List[Tuple] = []
    pos = 0
    for _ in range(k - 1):
        found = False
        for idx in range(pos, len(edge_order)):
            edge, v = edge_order[idx]
            status[v] = _MUST
            for _, w in edge_order[idx + 1:]:
                status[w] = _MAY
            if _near_dp_feasible(parent, k, lo, hi, status):
                chosen.append(edge)
                pos = idx + 1
                for _, w in edge_order[idx + 1:]:
                    status[w] = _KEEP
                found = True
                break
            status[v] = _KEEP
            for _, w in edge_order[idx + 1:]:
                status[w] = _KEEP
        if not found:  # cannot happen when the unconstrained DP is feasible
            return None
    return frozenset(chosen)


def split_components(t: SpanningTree, cuts) -> List[FrozenSet]:
    """Vertex sets of the parts obtained by deleting ``cuts`` from the tree."""
    cutset = {tuple(sorted(e)) for e in cuts}
    adj: Dict = {v: [] for v in t.host.vertices}
    for u, v in t.edges:
        if (u, v) not in cutset:
            adj[u].append(v)
            adj[v].append(u)
    seen = set()
    parts = []
    for v in t.host.vertices:
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        seen.add(v)
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        parts.append(frozenset(comp))
    return parts


def splittable_fraction_exact(g: Graph, rule: BalanceRule) -> Fraction:
    """Exact splittable fraction by enumerating every spanning tree."""
    ln_count = log_spanning_tree_count(g)
    if ln_count > math.log(ENUMERATION_LIMIT) + 1e-9:
        raise NumericalError(
            f"too many spanning trees (ln N_ST = {ln_count:.2f}) to enumerate; "
            "use estimate_splittability"
        )
    n = g.n
    if math.comb(g.m, n - 1) > 5 * 10 ** 6:
        raise NumericalError(
            "edge-subset enumeration too large; use estimate_splittability"
        )
    total = 0
    good = 0
    for subset in combinations(g.edges, n - 1):
        parent = {v: v for v in g.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        acyclic = True
        for u, v in subset:
            ru, rv = find(u), find(v)
            if ru == rv:
                acyclic = False
                break
            parent[ru] = rv
        if not acyclic:
            continue
        total += 1
        if has_balanced_split(SpanningTree(g, subset), rule):
            good += 1
    return Fraction(good, total)


# -- estimation ---------------------------------------------------------------

def run_bernoulli_trials(
    oracle: Callable[[int], bool],
    target_successes: int,
    seed: int,
    trial_cap: int = DEFAULT_TRIAL_CAP,
    *,
    graph_label: str = "bernoulli",
    n: int = 0,
    k: int = 0,
) -> TrialRecord:
    """Run ``oracle`` on derived trial seeds until the success target is met.

    Trial i calls ``oracle(child_seed(seed, 2i))`` and draws its exponential
    deviate from stream ``child_seed(seed, 2i+1)`` — the same derivation the
    fused sampling kernel uses, so both paths are bit-identical.
    """
    if target_successes < 1:
        raise InputError("target_successes must be >= 1")
    successes = 0
    trials = 0
    exp_sum = 0.0
    while successes < target_successes:
        if trials >= trial_cap:
            raise TrialCapExceeded(successes, trials, trial_cap)
        ok = bool(oracle(rngutil.trial_seed(seed, trials)))
        u = rngutil.u64_to_unit(
            rngutil.stream_u64(rngutil.trial_exp_key(seed, trials), 0)
        )
        exp_sum += -math.log(u)
        trials += 1
        if ok:
            successes += 1
    return TrialRecord(
        graph_label=graph_label, n=n, k=k, successes=successes, trials=trials,
        exp_sum=exp_sum, target=target_successes, seed=seed,
    )


def gbas_estimate(
    oracle: Callable[[int], bool],
    target_successes: int,
    seed: int,
    *,
    estimator: str = "gbas",
    trial_cap: int = DEFAULT_TRIAL_CAP,
    graph_label: str = "bernoulli",
    n: int = 0,
    k: int = 0,
) -> SplitEstimate:
    """Fixed-success-count estimate of a Bernoulli probability.

    ``estimator="ratio"`` reports successes/trials; ``"gbas"`` reports
    (target-1)/R for R the accumulated exponential deviates, whose relative
    error law does not depend on the true probability.
    """
    record = run_bernoulli_trials(
        oracle, target_successes, seed, trial_cap,
        graph_label=graph_label, n=n, k=k,
    )
    return record.estimate(estimator)


def run_splittability_trials(
    g: Graph,
    rule: BalanceRule,
    target_successes: int = DEFAULT_TARGET_SUCCESSES,
    seed: int = 0,
    trial_cap: int = DEFAULT_TRIAL_CAP,
    *,
    graph_label: str = "graph",
) -> TrialRecord:
    """Sample trees of the largest component and count balanced splits.

    Exact mode and near mode with k in {2, 3} run fused in the compiled
    kernel; other rules fall back to the generic per-trial path.  Both paths
    consume identical random streams.
    """
    if g.n == 0:
        raise InputError("empty graph")
    comp = largest_component(g)
    n = comp.n
    if n < rule.k:
        raise InputError(
            f"largest component has {n} vertices, cannot make {rule.k} parts"
        )
    lo, hi = rule.part_bounds(n)  # validates exact divisibility
    if rule.mode == "exact" or rule.k in (2, 3):
        indptr, nbrs = comp.csr()
        successes, trials, exp_sum = _kernels.splittability_run(
            indptr, nbrs, np.uint64(seed & rngutil.MASK64), rule.k,
            1 if rule.mode == "exact" else 0, target_successes, trial_cap,
        )
        successes, trials = int(successes), int(trials)
        if successes < target_successes:
            raise TrialCapExceeded(successes, trials, trial_cap)
        return TrialRecord(
            graph_label=graph_label, n=n, k=rule.k, successes=successes,
            trials=trials, exp_sum=float(exp_sum), target=target_successes,
            seed=seed,
        )

    def oracle(trial_seed: int) -> bool:
        return has_balanced_split(wilson_ust(comp, trial_seed), rule)

    return run_bernoulli_trials(
        oracle, target_successes, seed, trial_cap,
        graph_label=graph_label, n=n, k=rule.k,
    )


def estimate_splittability(
    g: Graph,
    rule: BalanceRule,
    target_successes: int = DEFAULT_TARGET_SUCCESSES,
    seed: int = 0,
    *,
    estimator: str = "ratio",
    trial_cap: int = DEFAULT_TRIAL_CAP,
    graph_label: str = "graph",
) -> SplitEstimate:
    """Estimate the probability that a uniform spanning tree is k-splittable."""
    record = run_splittability_trials(
        g, rule, target_successes, seed, trial_cap, graph_label=graph_label
    )
    return record.estimate(estimator)
