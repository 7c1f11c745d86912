"""Shared helpers: independent reference implementations used as test oracles.

Everything here is deliberately naive (sets, lists, exact fractions) and
stays independent of the library code paths it checks.
"""

from __future__ import annotations

import math
import random

import numpy as np

from sbmzip.graph import LabeledGraph, Partition, PartitionedGraph, SbmParams, pair_count


def adjacency_sets(g: LabeledGraph) -> list[set[int]]:
    out: list[set[int]] = [set() for _ in range(g.n)]
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if g.has_edge(u, v):
                out[u].add(v)
                out[v].add(u)
    return out


def reference_peel_trace(g: LabeledGraph) -> list[tuple[str, int, int]]:
    """Slow list-based replay of the peeling rule, independent of the codec.

    Events: ("bit", value, 1) for singleton cells, ("count", k, m) otherwise,
    in exactly the order the encoder codes them.
    """
    adj = adjacency_sets(g)
    cells: list[list[int]] = [list(range(g.n))] if g.n else []
    events: list[tuple[str, int, int]] = []
    while cells:
        v = cells[0].pop(0)
        if not cells[0]:
            cells.pop(0)
        new_cells: list[list[int]] = []
        for cell in cells:
            if len(cell) == 1:
                events.append(("bit", 1 if cell[0] in adj[v] else 0, 1))
            else:
                k = sum(1 for w in cell if w in adj[v])
                events.append(("count", k, len(cell)))
            nbr = [w for w in cell if w in adj[v]]
            non = [w for w in cell if w not in adj[v]]
            if nbr:
                new_cells.append(nbr)
            if non:
                new_cells.append(non)
        cells = new_cells
    return events


def graph_from_mask(n: int, mask: int) -> LabeledGraph:
    bits = np.array([(mask >> k) & 1 for k in range(pair_count(n))], dtype=np.uint8)
    return LabeledGraph.from_pair_bits(n, bits)


def all_graphs(n: int):
    for mask in range(1 << pair_count(n)):
        yield graph_from_mask(n, mask)


def binom_pmf_exact(m: int, p: float) -> list[float]:
    return [math.comb(m, k) * p**k * (1 - p) ** (m - k) for k in range(m + 1)]


def random_small_instance(rng: random.Random, n_max: int = 10):
    """A random partitioned graph plus matching model, for roundtrip sweeps."""
    n = rng.randint(1, n_max)
    sizes = []
    left = n
    while left:
        s = rng.randint(1, left)
        sizes.append(s)
        left -= s
    choice = rng.random()
    if choice < 0.1:
        p, q = rng.choice([(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)])
    else:
        p, q = rng.uniform(0.02, 0.98), rng.uniform(0.02, 0.98)
    params = SbmParams.from_pq(tuple(sizes), p, q)
    return params


def compositions(n: int):
    """All ordered size tuples summing to n (used for small exhaustive grids)."""
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in compositions(n - first):
            yield (first, *rest)


def partitions_of(n: int):
    """Unordered partitions of n, as nonincreasing tuples."""
    seen = set()
    for comp in compositions(n):
        seen.add(tuple(sorted(comp, reverse=True)))
    return sorted(seen)
