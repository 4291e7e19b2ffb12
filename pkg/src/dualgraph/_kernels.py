"""Numba kernels for the sampling hot paths.

The RNG here mirrors :mod:`dualgraph.rngutil` exactly (SplitMix64 finalizer,
counter-based streams); ``tests/test_rng.py`` pins the two against each other.
All arithmetic is explicit ``uint64`` to avoid numpy's silent promotion of
mixed signed/unsigned operations to float.

Random-walk steps pick a uniformly random neighbor from the sorted adjacency
of the current vertex, using a rejection step to stay exactly uniform.  Each
loop-erased walk is keyed by (seed, start-vertex index) so the decision
sequence is independent of scheduling.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64
_GAMMA = U64(0x9E3779B97F4A7C15)
_M1 = U64(0xBF58476D1CE4E5B9)
_M2 = U64(0x94D049BB133111EB)
_TWO52_INV = 2.0 ** -52


@njit(cache=True, nogil=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _M1
    z = (z ^ (z >> U64(27))) * _M2
    return z ^ (z >> U64(31))


@njit(cache=True, nogil=True, inline="always")
def _child_seed(seed, index):
    return _mix64(seed ^ _mix64(index + _GAMMA))


@njit(cache=True, nogil=True, inline="always")
def _stream_u64(key, counter):
    return _mix64(key + counter * _GAMMA)


@njit(cache=True, nogil=True, inline="always")
def _unit_open(u):
    return (np.float64(u >> U64(12)) + 0.5) * _TWO52_INV


@njit(cache=True, nogil=True)
def mix64_py(z):  # exposed for cross-checking against rngutil
    return _mix64(U64(z))


@njit(cache=True, nogil=True)
def child_seed_py(seed, index):
    return _child_seed(U64(seed), U64(index))


@njit(cache=True, nogil=True)
def stream_u64_py(key, counter):
    return _stream_u64(U64(key), U64(counter))


@njit(cache=True, nogil=True)
def wilson_parent(indptr, nbrs, seed, root, parent, in_tree):
    """Loop-erased random walk sampler; fills ``parent`` toward ``root``.

    ``parent[root] == -1``.  Walk ``v`` consumes the counter stream keyed by
    (seed, v); rejection sampling keeps neighbor choices exactly uniform.
    """
    n = indptr.shape[0] - 1
    for i in range(n):
        in_tree[i] = 0
        parent[i] = -1
    in_tree[root] = 1
    seed_u = U64(seed)
    for v in range(n):
        if in_tree[v] == 1:
            continue
        key = _child_seed(seed_u, U64(v))
        ctr = U64(0)
        u = v
        while in_tree[u] == 0:
            base = indptr[u]
            d = U64(indptr[u + 1] - base)
            threshold = (U64(0) - d) % d
            while True:
                word = _stream_u64(key, ctr)
                ctr += U64(1)
                if word >= threshold:
                    break
            idx = word % d
            w = nbrs[base + np.int64(idx)]
            parent[u] = w
            u = w
        u = v
        while in_tree[u] == 0:
            in_tree[u] = 1
            u = parent[u]


@njit(cache=True, nogil=True)
def subtree_sizes(parent, root, sizes, pending):
    """Subtree vertex counts for a tree given as parent pointers.

    ``pending`` counts unmerged children; a vertex is folded into its parent
    once all children are merged, and is then marked (-1) so the upward walk
    never folds it twice.
    """
    n = parent.shape[0]
    for i in range(n):
        sizes[i] = 1
        pending[i] = 0
    for v in range(n):
        if v != root:
            pending[parent[v]] += 1
    for v in range(n):
        u = v
        while u != root and pending[u] == 0:
            p = parent[u]
            sizes[p] += sizes[u]
            pending[p] -= 1
            pending[u] = -1
            u = p


@njit(cache=True, nogil=True, inline="always")
def exact_split_count(sizes, n, part):
    """Number of vertices whose subtree size is divisible by ``part``."""
    cnt = 0
    for v in range(n):
        if sizes[v] % part == 0:
            cnt += 1
    return cnt


@njit(cache=True, nogil=True, inline="always")
def _is_strict_ancestor(parent, a, b):
    """True when ``a`` lies strictly above ``b`` on b's path to the root."""
    x = parent[b]
    while x != -1:
        if x == a:
            return True
        x = parent[x]
    return False


@njit(cache=True, nogil=True)
def near2_splittable(sizes, root, n):
    f = n // 2
    c = n - f
    for v in range(n):
        if v != root and (sizes[v] == f or sizes[v] == c):
            return True
    return False


@njit(cache=True, nogil=True)
def near3_splittable(parent, sizes, root, n, cand_a, cand_b):
    """Two-cut balance check: all three parts must have size in {f, c}.

    Candidate filtering keeps this near O(n): subtree sizes that could bound
    a balanced part are rare in a random tree.
    """
    f = n // 3
    c = f + 1 if n % 3 != 0 else f
    na = 0
    nb = 0
    for v in range(n):
        if v == root:
            continue
        s = sizes[v]
        if s == f or s == c:
            cand_a[na] = v
            na += 1
        rest = n - s
        if (s == 2 * f or s == f + c or s == 2 * c) and (rest == f or rest == c):
            cand_b[nb] = v
            nb += 1
    # disjoint cuts: both lower parts hang side by side
    for i in range(na):
        a = cand_a[i]
        for j in range(i + 1, na):
            b = cand_a[j]
            rest = n - sizes[a] - sizes[b]
            if rest != f and rest != c:
                continue
            if _is_strict_ancestor(parent, a, b) or _is_strict_ancestor(parent, b, a):
                continue
            return True
    # nested cuts: a below b
    for i in range(na):
        a = cand_a[i]
        for j in range(nb):
            b = cand_b[j]
            mid = sizes[b] - sizes[a]
            if mid != f and mid != c:
                continue
            if _is_strict_ancestor(parent, b, a):
                return True
    return False


@njit(cache=True, nogil=True)
def splittability_run(indptr, nbrs, seed, k, exact_mode, target, cap):
    """Bernoulli trials (Wilson tree + balance check) until ``target`` successes.

    Trial ``i`` draws its tree from seed ``child(seed, 2i)`` and one unit-rate
    exponential deviate from stream ``child(seed, 2i+1)``; their sum feeds the
    gamma-based estimator.  Returns (successes, trials, exp_sum).
    """
    n = indptr.shape[0] - 1
    parent = np.empty(n, np.int64)
    in_tree = np.empty(n, np.uint8)
    sizes = np.empty(n, np.int64)
    pending = np.empty(n, np.int64)
    cand_a = np.empty(n, np.int64)
    cand_b = np.empty(n, np.int64)
    seed_u = U64(seed)
    successes = 0
    trials = 0
    exp_sum = 0.0
    part = n // k
    while successes < target and trials < cap:
        tseed = _child_seed(seed_u, U64(2 * trials))
        wilson_parent(indptr, nbrs, tseed, 0, parent, in_tree)
        subtree_sizes(parent, 0, sizes, pending)
        if exact_mode == 1:
            ok = exact_split_count(sizes, n, part) == k
        elif k == 2:
            ok = near2_splittable(sizes, 0, n)
        else:
            ok = near3_splittable(parent, sizes, 0, n, cand_a, cand_b)
        ekey = _child_seed(seed_u, U64(2 * trials + 1))
        exp_sum += -np.log(_unit_open(_stream_u64(ekey, U64(0))))
        trials += 1
        if ok:
            successes += 1
    return successes, trials, exp_sum


@njit(cache=True, nogil=True)
def connected_via_bfs(indptr, nbrs, queue):
    """Cheap connectivity check over the CSR adjacency."""
    n = indptr.shape[0] - 1
    if n <= 1:
        return True
    seen = np.zeros(n, np.uint8)
    seen[0] = 1
    queue[0] = 0
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        for j in range(indptr[u], indptr[u + 1]):
            w = nbrs[j]
            if seen[w] == 0:
                seen[w] = 1
                queue[tail] = w
                tail += 1
    return tail == n
