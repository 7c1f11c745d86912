"""Graph, partition and block-model types, seeded samplers, and the PGRF file format.

Graphs are simple and undirected, stored as a bit-packed strict upper
triangle (row-major over pairs u < v, LSB-first within each byte), which is
also exactly the PGRF on-disk payload. Partitions are ordered blocks of
contiguous vertex ranges; inputs with scattered block membership are
normalized by a stable sort on ingestion (see ``normalize_membership``).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

GRAPH_MAGIC = b"PGRF"
GRAPH_VERSION = 1

# Sampler identity: all edge draws come from a Philox 4x64 counter-based
# generator keyed by the 64-bit seed, one uniform per vertex pair, consumed
# in row-major u < v order. This is what makes samples reproducible across
# platforms and what the acceptance statistics rely on.
PAIR_RNG = "philox4x64"


class FormatError(ValueError):
    """A file does not parse as the format it claims to be."""


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def pair_index(u: int, v: int, n: int) -> int:
    """Row-major index of the pair (u, v), u < v, in the packed triangle."""
    if u > v:
        u, v = v, u
    if u == v or v >= n:
        raise ValueError(f"bad pair ({u}, {v}) for n={n}")
    return u * n - u * (u + 1) // 2 + (v - u - 1)


def _row_starts(n: int) -> np.ndarray:
    # _row_starts(n)[u] = index of pair (u, u+1)
    counts = n - 1 - np.arange(n, dtype=np.int64)
    starts = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=starts[1:])
    return starts


class LabeledGraph:
    """Simple undirected graph on vertices 0..n-1, bit-packed upper triangle."""

    __slots__ = ("n", "packed")

    def __init__(self, n: int, packed: np.ndarray) -> None:
        nbytes = (pair_count(n) + 7) // 8
        if packed.dtype != np.uint8 or packed.shape != (nbytes,):
            raise ValueError("packed adjacency has wrong dtype or size")
        self.n = n
        self.packed = packed

    @classmethod
    def empty(cls, n: int) -> "LabeledGraph":
        return cls(n, np.zeros((pair_count(n) + 7) // 8, dtype=np.uint8))

    @classmethod
    def from_pair_bits(cls, n: int, bits: np.ndarray) -> "LabeledGraph":
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.shape != (pair_count(n),):
            raise ValueError("pair bit vector has wrong length")
        return cls(n, np.packbits(bits, bitorder="little"))

    @classmethod
    def from_edges(cls, n: int, edges) -> "LabeledGraph":
        bits = np.zeros(pair_count(n), dtype=np.uint8)
        for u, v in edges:
            bits[pair_index(u, v, n)] = 1
        return cls.from_pair_bits(n, bits)

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "LabeledGraph":
        dense = np.asarray(dense)
        n = dense.shape[0]
        iu, iv = np.triu_indices(n, 1)
        return cls.from_pair_bits(n, dense[iu, iv].astype(np.uint8))

    def pair_bits(self) -> np.ndarray:
        """The strict upper triangle as a flat 0/1 vector (row-major)."""
        return np.unpackbits(self.packed, count=pair_count(self.n), bitorder="little")

    def to_dense(self) -> np.ndarray:
        n = self.n
        dense = np.zeros((n, n), dtype=bool)
        iu, iv = np.triu_indices(n, 1)
        bits = self.pair_bits().astype(bool)
        dense[iu, iv] = bits
        dense[iv, iu] = bits
        return dense

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        k = pair_index(u, v, self.n)
        return bool((self.packed[k >> 3] >> (k & 7)) & 1)

    def edge_count(self) -> int:
        return int(self.pair_bits().sum())

    def degrees(self) -> np.ndarray:
        n = self.n
        iu, iv = np.triu_indices(n, 1)
        present = np.flatnonzero(self.pair_bits())
        return (
            np.bincount(iu[present], minlength=n) + np.bincount(iv[present], minlength=n)
        ).astype(np.int64)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LabeledGraph)
            and self.n == other.n
            and bool(np.array_equal(self.packed, other.packed))
        )

    def __hash__(self) -> int:
        return hash((self.n, self.packed.tobytes()))

    def __repr__(self) -> str:
        return f"LabeledGraph(n={self.n}, edges={self.edge_count()})"


def relabel(g: LabeledGraph, new_of_old) -> LabeledGraph:
    """Apply a vertex bijection: edge (u, v) becomes (new_of_old[u], new_of_old[v])."""
    perm = np.asarray(new_of_old, dtype=np.int64)
    n = g.n
    if perm.shape != (n,) or not np.array_equal(np.sort(perm), np.arange(n)):
        raise ValueError("relabeling is not a bijection on 0..n-1")
    old_of_new = np.empty(n, dtype=np.int64)
    old_of_new[perm] = np.arange(n)
    dense = g.to_dense()
    return LabeledGraph.from_dense(dense[np.ix_(old_of_new, old_of_new)])


@dataclass(frozen=True)
class Partition:
    """Ordered blocks of contiguous vertex ranges; block i has sizes[i] vertices.

    Every block size is positive; the empty partition (no blocks) is the
    single representation of the degenerate n = 0 graph.
    """

    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if any(s <= 0 for s in self.sizes):
            raise ValueError("block sizes must be positive")

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def r(self) -> int:
        return len(self.sizes)

    @property
    def offsets(self) -> tuple[int, ...]:
        out = [0]
        for s in self.sizes:
            out.append(out[-1] + s)
        return tuple(out)

    def block_range(self, i: int) -> tuple[int, int]:
        off = self.offsets
        return off[i], off[i + 1]

    def block_of(self) -> np.ndarray:
        """Vector mapping each vertex to its block index."""
        return np.repeat(np.arange(self.r, dtype=np.int64), self.sizes)


@dataclass(frozen=True)
class PartitionedGraph:
    """A labeled graph together with its block partition."""

    graph: LabeledGraph
    partition: Partition

    def __post_init__(self) -> None:
        if self.graph.n != self.partition.n:
            raise ValueError("partition does not cover the vertex set")

    @property
    def n(self) -> int:
        return self.graph.n


@dataclass(frozen=True)
class SbmParams:
    """Block sizes plus a symmetric matrix of edge probabilities.

    probs[i][j] is the probability of an edge between a block-i vertex and a
    block-j vertex (i == j for within-block pairs).
    """

    sizes: tuple[int, ...]
    probs: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        probs = np.asarray(self.probs, dtype=np.float64)
        object.__setattr__(self, "probs", probs)
        r = len(self.sizes)
        if any(s <= 0 for s in self.sizes):
            raise ValueError("block sizes must be positive")
        if probs.shape != (r, r):
            raise ValueError(f"probability matrix must be {r}x{r}")
        if not np.array_equal(probs, probs.T):
            raise ValueError("probability matrix must be symmetric")
        if probs.size and (probs.min() < 0.0 or probs.max() > 1.0):
            raise ValueError("edge probabilities must lie in [0, 1]")

    @classmethod
    def from_pq(cls, sizes, p: float, q: float) -> "SbmParams":
        r = len(sizes)
        probs = np.full((r, r), q, dtype=np.float64)
        np.fill_diagonal(probs, p)
        return cls(tuple(sizes), probs)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def r(self) -> int:
        return len(self.sizes)

    @property
    def partition(self) -> Partition:
        return Partition(self.sizes)


def gen_sbm(params: SbmParams, seed: int) -> PartitionedGraph:
    """Sample a partitioned graph: pair (u, v) is an edge with prob P[b(u), b(v)].

    Deterministic per seed: one Philox uniform per pair, row-major u < v order.
    """
    n = params.n
    if n == 0:
        return PartitionedGraph(LabeledGraph.empty(0), Partition(()))
    total = pair_count(n)
    bits = np.empty(total, dtype=np.uint8)
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    starts = _row_starts(n)
    block = params.partition.block_of()
    chunk = 1 << 20
    for k0 in range(0, total, chunk):
        k1 = min(k0 + chunk, total)
        ks = np.arange(k0, k1, dtype=np.int64)
        us = np.searchsorted(starts, ks, side="right") - 1
        vs = ks - starts[us] + us + 1
        thresholds = params.probs[block[us], block[vs]]
        bits[k0:k1] = rng.random(k1 - k0) < thresholds
    if total == 0:
        bits = np.zeros(0, dtype=np.uint8)
    return PartitionedGraph(LabeledGraph.from_pair_bits(n, bits), params.partition)


def gen_er(n: int, p: float, seed: int) -> LabeledGraph:
    """Erdos-Renyi G(n, p) sample; the one-block special case of gen_sbm."""
    if n == 0:
        return LabeledGraph.empty(0)
    return gen_sbm(SbmParams.from_pq((n,), p, p), seed).graph


def block_subgraph(pg: PartitionedGraph, i: int) -> LabeledGraph:
    """Induced subgraph on block i, vertices renumbered 0..n_i-1 in order."""
    lo, hi = pg.partition.block_range(i)
    size = hi - lo
    if size == 0:
        return LabeledGraph.empty(0)
    bits = pg.graph.pair_bits()
    starts = _row_starts(pg.n)
    runs = [bits[starts[u] : starts[u] + (hi - 1 - u)] for u in range(lo, hi - 1)]
    sub = np.concatenate(runs) if runs else np.zeros(0, dtype=np.uint8)
    return LabeledGraph.from_pair_bits(size, sub)


def cross_slice(pg: PartitionedGraph, i: int, j: int) -> np.ndarray:
    """Bipartite adjacency bits between blocks i < j, row-major (block-i rows)."""
    if not i < j:
        raise ValueError("cross_slice needs block indices i < j")
    ilo, ihi = pg.partition.block_range(i)
    jlo, jhi = pg.partition.block_range(j)
    bits = pg.graph.pair_bits()
    starts = _row_starts(pg.n)
    runs = [bits[starts[u] + jlo - u - 1 : starts[u] + jhi - u - 1] for u in range(ilo, ihi)]
    return np.concatenate(runs) if runs else np.zeros(0, dtype=np.uint8)


def degree_profile(pg: PartitionedGraph) -> np.ndarray:
    """Per-vertex degrees into each block: row u = (deg into V_1, ..., deg into V_r)."""
    dense = pg.graph.to_dense()
    off = pg.partition.offsets
    cols = [dense[:, off[i] : off[i + 1]].sum(axis=1) for i in range(pg.partition.r)]
    if not cols:
        return np.zeros((0, 0), dtype=np.int64)
    return np.stack(cols, axis=1).astype(np.int64)


def blockpair_edge_counts(pg: PartitionedGraph) -> np.ndarray:
    """r x r symmetric matrix of edge counts per block pair (diag = within-block)."""
    r = pg.partition.r
    counts = np.zeros((r, r), dtype=np.int64)
    for i in range(r):
        counts[i, i] = block_subgraph(pg, i).edge_count()
        for j in range(i + 1, r):
            c = int(cross_slice(pg, i, j).sum())
            counts[i, j] = counts[j, i] = c
    return counts


def normalize_membership(g: LabeledGraph, labels) -> tuple[PartitionedGraph, np.ndarray]:
    """Re-express scattered block membership as contiguous blocks.

    Vertices are stably sorted by block label; returns the normalized graph
    plus the applied new-of-old vertex map so callers can track identities.
    """
    labels = np.asarray(labels)
    if labels.shape != (g.n,):
        raise ValueError("one membership label per vertex required")
    order = np.argsort(labels, kind="stable")
    new_of_old = np.empty(g.n, dtype=np.int64)
    new_of_old[order] = np.arange(g.n)
    sizes = tuple(int(c) for c in np.unique(labels[order], return_counts=True)[1])
    return PartitionedGraph(relabel(g, new_of_old), Partition(sizes)), new_of_old


def write_graph(pg: PartitionedGraph, path) -> None:
    """Write the PGRF container (header + packed upper-triangle bytes)."""
    part = pg.partition
    blob = struct.pack("<4sBQH", GRAPH_MAGIC, GRAPH_VERSION, pg.n, part.r)
    blob += struct.pack(f"<{part.r}Q", *part.sizes)
    Path(path).write_bytes(blob + pg.graph.packed.tobytes())


def read_graph(path) -> PartitionedGraph:
    data = Path(path).read_bytes()
    header = struct.calcsize("<4sBQH")
    if len(data) < header:
        raise FormatError("file too short for a graph header")
    magic, version, n, r = struct.unpack_from("<4sBQH", data)
    if magic != GRAPH_MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != GRAPH_VERSION:
        raise FormatError(f"unsupported version {version}")
    sizes = struct.unpack_from(f"<{r}Q", data, header)
    if sum(sizes) != n:
        raise FormatError("block sizes do not sum to the vertex count")
    body = data[header + 8 * r :]
    nbytes = (pair_count(n) + 7) // 8
    if len(body) != nbytes:
        raise FormatError(f"adjacency payload is {len(body)} bytes, expected {nbytes}")
    packed = np.frombuffer(body, dtype=np.uint8).copy()
    pad = 8 * nbytes - pair_count(n)
    if pad and nbytes and (packed[-1] >> (8 - pad)):
        raise FormatError("nonzero padding bits in adjacency payload")
    return PartitionedGraph(LabeledGraph(n, packed), Partition(sizes))
