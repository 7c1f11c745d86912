"""Exact partition-respecting isomorphism tests and automorphism counting.

Everything here is small-n machinery (backtracking with color refinement);
the codec never calls it. It exists so the analysis suite and the tests have
a trustworthy independent oracle.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .graph import PartitionedGraph

AUT_MAX_N = 12  # factorial search beyond this is not supported


def refine_colors(dense: np.ndarray, init) -> tuple[int, ...]:
    """Iterated neighborhood color refinement with canonical color ids.

    Colors are renumbered by sorted signature each round, so two isomorphic
    graphs (with matching initial colors) end up with identical multisets.
    Automorphisms preserve these colors, which makes them a sound pruning
    invariant for the searches below.
    """
    n = dense.shape[0]
    colors = [int(c) for c in init]
    for _ in range(n):
        sigs = []
        for u in range(n):
            nb = sorted(colors[w] for w in np.flatnonzero(dense[u]))
            sigs.append((colors[u], tuple(nb)))
        table = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [table[s] for s in sigs]
        if new == colors:
            break
        colors = new
    return tuple(colors)


def _search(dense_a, dense_b, colors_a, colors_b, count_all: bool) -> int:
    """Backtracking color/adjacency-consistent vertex maps from a onto b.

    Returns the number of complete maps when count_all, else 1 as soon as one
    exists (or 0).
    """
    n = dense_a.shape[0]
    if sorted(colors_a) != sorted(colors_b):
        return 0
    candidates = [
        [w for w in range(n) if colors_b[w] == colors_a[u]] for u in range(n)
    ]
    order = sorted(range(n), key=lambda u: (len(candidates[u]), u))
    mapping = np.full(n, -1, dtype=np.int64)
    used = np.zeros(n, dtype=bool)
    found = 0

    def rec(i: int) -> bool:
        nonlocal found
        if i == n:
            found += 1
            return not count_all
        u = order[i]
        row = dense_a[u]
        for w in candidates[u]:
            if used[w]:
                continue
            ok = True
            for j in range(i):
                x = order[j]
                if row[x] != dense_b[w, mapping[x]]:
                    ok = False
                    break
            if ok:
                mapping[u] = w
                used[w] = True
                if rec(i + 1):
                    return True
                used[w] = False
                mapping[u] = -1
        return False

    rec(0)
    return found


def isomorphic_partitioned(a: PartitionedGraph, b: PartitionedGraph) -> bool:
    """Exact test for isomorphism via a bijection mapping each block onto itself."""
    if a.partition.sizes != b.partition.sizes:
        return False
    n = a.n
    if n == 0:
        return True
    da, db = a.graph.to_dense(), b.graph.to_dense()
    if da.sum() != db.sum():
        return False
    block = a.partition.block_of()
    ca = refine_colors(da, block)
    cb = refine_colors(db, block)
    return _search(da, db, ca, cb, count_all=False) > 0


def aut_size_partitioned(pg: PartitionedGraph) -> int:
    """Order of the group of block-preserving adjacency-fixing permutations."""
    n = pg.n
    if n > AUT_MAX_N:
        raise ValueError(f"automorphism search supports n <= {AUT_MAX_N}")
    if n == 0:
        return 1
    dense = pg.graph.to_dense()
    colors = refine_colors(dense, pg.partition.block_of())
    return _search(dense, dense, colors, colors, count_all=True)


def structure_fingerprint(pg: PartitionedGraph) -> str:
    """Isomorphism-invariant hash: refined color histogram + color-pair edge counts.

    Equal fingerprints are necessary (not sufficient) for partition-respecting
    isomorphism; useful as a spot check at sizes the exact search cannot reach.
    """
    dense = pg.graph.to_dense()
    colors = refine_colors(dense, pg.partition.block_of())
    hist = sorted((colors.count(c), c) for c in set(colors))
    pair_counts: dict[tuple[int, int], int] = {}
    iu, iv = np.nonzero(np.triu(dense, 1))
    for u, v in zip(iu.tolist(), iv.tolist()):
        key = tuple(sorted((colors[u], colors[v])))
        pair_counts[key] = pair_counts.get(key, 0) + 1
    blob = repr((tuple(hist), tuple(sorted(pair_counts.items())))).encode()
    return hashlib.sha256(blob).hexdigest()
