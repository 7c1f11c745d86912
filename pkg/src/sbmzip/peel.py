"""Structural (label-free) codec for simple graphs: vertex peeling with cell refinement.

The encoder removes vertices one at a time and codes each removed vertex's
edge pattern toward the survivors cell by cell: a Binomial(|cell|, p) count
for multi-vertex cells, a Bernoulli(p) bit for singletons. After each
removal every cell splits into (neighbors, non-neighbors), neighbors first,
preserving cell order and dropping empties. The decoder replays the same
cell dynamics on anonymous slots and designates the first k slots of a cell
as neighbors, so only counts ever cross the wire; its output is the input
graph relabeled by removal rank. The edge probability p is supplied by the
caller and never estimated here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coder import ArithDecoder, ArithEncoder, BitSink, BitSource, FixedProb
from .graph import LabeledGraph, pair_count, relabel


@dataclass(frozen=True)
class CanonicalMap:
    """Bijection from input vertex ids to the decoder's output ids."""

    to_canonical: np.ndarray

    @property
    def n(self) -> int:
        return len(self.to_canonical)

    def inverse(self) -> np.ndarray:
        inv = np.empty(self.n, dtype=np.int64)
        inv[self.to_canonical] = np.arange(self.n)
        return inv

    def apply(self, g: LabeledGraph) -> LabeledGraph:
        return relabel(g, self.to_canonical)


def _shrink_first_cell(bounds: np.ndarray) -> np.ndarray:
    # cells over order[1:] after the head of the first cell is removed
    rest = bounds - 1
    rest[0] = 0
    if len(rest) > 1 and rest[1] == 0:
        rest = rest[1:]
    return rest


def _refine(rest: np.ndarray, a: np.ndarray, bounds: np.ndarray, sizes: np.ndarray):
    """Split every cell into (members with a=1, members with a=0), in place of it."""
    cellid = np.repeat(np.arange(len(sizes), dtype=np.int64), sizes)
    key = cellid * 2 + (1 - a)
    perm = np.argsort(key, kind="stable")
    order = rest[perm]
    ksort = key[perm]
    cuts = np.flatnonzero(np.diff(ksort)) + 1
    new_bounds = np.empty(len(cuts) + 2, dtype=np.int64)
    new_bounds[0] = 0
    new_bounds[1:-1] = cuts
    new_bounds[-1] = len(rest)
    return order, new_bounds


def peel_encode(g: LabeledGraph, prob: FixedProb) -> bytes:
    """Encode g so that decoding yields a graph isomorphic to it."""
    data, _ = _encode(g, prob)
    return data


def peel_encode_with_map(g: LabeledGraph, prob: FixedProb) -> tuple[bytes, CanonicalMap]:
    """Encode g and report the exact relabeling the decoder will produce.

    Postcondition: ``relabel(g, map) == peel_decode(data, g.n, prob)`` bit for
    bit, which is what lets a caller write further data under the decoder's
    labels.
    """
    data, ranks = _encode(g, prob)
    return data, CanonicalMap(ranks)


def _encode(g: LabeledGraph, prob: FixedProb) -> tuple[bytes, np.ndarray]:
    n = g.n
    enc = ArithEncoder(BitSink())
    ranks = np.empty(n, dtype=np.int64)
    if n == 0:
        enc.finish()
        return enc.sink.getvalue(), ranks
    dense = g.to_dense()
    order = np.arange(n, dtype=np.int64)
    bounds = np.array([0, n], dtype=np.int64)
    t = 0
    while t < n:
        if len(bounds) == len(order) + 1:
            # every cell is a singleton: order is final, no refinement ahead;
            # the rest of the stream is plain Bernoulli bits row by row
            ordl = order.tolist()
            for i, v in enumerate(ordl):
                ranks[v] = t + i
                rem = order[i + 1 :]
                if rem.size:
                    enc.encode_bits(dense[v][rem].tobytes(), prob)
            break
        v = int(order[0])
        ranks[v] = t
        t += 1
        rest = order[1:]
        if rest.size == 0:
            break
        bounds = _shrink_first_cell(bounds)
        sizes = np.diff(bounds)
        a = dense[v][rest]
        counts = np.add.reduceat(a.astype(np.int64), bounds[:-1])
        starts = bounds[:-1].tolist()
        for c, size in enumerate(sizes.tolist()):
            if size == 1:
                enc.encode_bernoulli(int(a[starts[c]]), prob)
            else:
                enc.encode_binomial(int(counts[c]), size, prob)
        order, bounds = _refine(rest, a.astype(np.int64), bounds, sizes)
    enc.finish()
    return enc.sink.getvalue(), ranks


def peel_decode(data: bytes, n: int, prob: FixedProb) -> LabeledGraph:
    """Reconstruct a graph isomorphic to the encoded one, labeled by removal rank."""
    if n == 0:
        return LabeledGraph.empty(0)
    dec = ArithDecoder(BitSource(data))
    order = np.arange(n, dtype=np.int64)  # anonymous slots, created in cell order
    bounds = np.array([0, n], dtype=np.int64)
    ranks = np.empty(n, dtype=np.int64)
    edge_rank: list[np.ndarray] = []  # rank of the removed vertex per designation
    edge_slot: list[np.ndarray] = []  # designated surviving slot
    t = 0
    while t < n:
        if len(bounds) == len(order) + 1:
            ordl = order.tolist()
            for i, s in enumerate(ordl):
                ranks[s] = t + i
                rem = order[i + 1 :]
                if rem.size:
                    bits = np.frombuffer(bytes(dec.decode_bits(rem.size, prob)), dtype=np.uint8)
                    hits = rem[bits.astype(bool)]
                    if hits.size:
                        edge_rank.append(np.full(hits.size, t + i, dtype=np.int64))
                        edge_slot.append(hits)
            break
        s0 = int(order[0])
        ranks[s0] = t
        rest = order[1:]
        if rest.size == 0:
            t += 1
            break
        bounds = _shrink_first_cell(bounds)
        sizes = np.diff(bounds)
        a = np.zeros(rest.size, dtype=np.int64)
        starts = bounds[:-1].tolist()
        for c, size in enumerate(sizes.tolist()):
            if size == 1:
                a[starts[c]] = dec.decode_bernoulli(prob)
            else:
                k = dec.decode_binomial(size, prob)
                if k:
                    a[starts[c] : starts[c] + k] = 1
        hits = rest[a.astype(bool)]
        if hits.size:
            edge_rank.append(np.full(hits.size, t, dtype=np.int64))
            edge_slot.append(hits)
        t += 1
        order, bounds = _refine(rest, a, bounds, sizes)
    bits = np.zeros(pair_count(n), dtype=np.uint8)
    if edge_rank:
        us = np.concatenate(edge_rank)
        vs = ranks[np.concatenate(edge_slot)]
        ks = us * n - us * (us + 1) // 2 + (vs - us - 1)
        bits[ks] = 1
    return LabeledGraph.from_pair_bits(n, bits)
