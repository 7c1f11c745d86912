"""Entropy evaluators, the exact small-n structure oracle, and typicality statistics.

The closed-form side evaluates the block-model graph entropy and its
structure-level leading form (label savings subtracted). The oracle side
enumerates every labeled graph on small vertex sets, groups them into
partition-respecting isomorphism classes by minimal adjacency string, and
computes class probabilities, multiplicities and automorphism orders exactly.
The oracle is built to be trustworthy, not fast: full enumeration is limited
to C(n,2) <= 28 pair bits and is only pleasant below n = 7.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .graph import (
    PartitionedGraph,
    SbmParams,
    blockpair_edge_counts,
    block_subgraph,
    gen_er,
    pair_count,
    pair_index,
    Partition,
    LabeledGraph,
)
from .iso import AUT_MAX_N, aut_size_partitioned

ORACLE_MAX_PAIR_BITS = 28


def binary_entropy(p: float) -> float:
    """h(p) in bits, with the 0 log 0 = 0 convention."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of [0, 1]: {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def log2_factorial(n: int) -> float:
    """log2(n!) by explicit summation (no Stirling approximation)."""
    return math.fsum(math.log2(k) for k in range(2, n + 1))


def graph_entropy(params: SbmParams) -> float:
    """Entropy in bits of the labeled-graph distribution: one term per pair type."""
    total = 0.0
    for i, si in enumerate(params.sizes):
        total += pair_count(si) * binary_entropy(float(params.probs[i, i]))
        for j in range(i + 1, params.r):
            total += si * params.sizes[j] * binary_entropy(float(params.probs[i, j]))
    return total


@dataclass(frozen=True)
class EntropyReport:
    """Evaluated entropy terms for one block model."""

    sizes: tuple[int, ...]
    h_graph: float
    h_struct_leading: float
    intra_bits: float
    inter_bits: float
    label_savings_bits: float
    exact_h_struct: float | None = None
    class_count: int | None = None
    eq3_residual: float | None = None


def structural_entropy_leading(params: SbmParams) -> EntropyReport:
    """Leading-term structure entropy: graph entropy minus the label savings.

    The savings term is the exact sum of log2(n_i!) over blocks; the
    vanishing correction term of the asymptotic formula is excluded.
    """
    intra = sum(
        pair_count(s) * binary_entropy(float(params.probs[i, i]))
        for i, s in enumerate(params.sizes)
    )
    inter = sum(
        params.sizes[i] * params.sizes[j] * binary_entropy(float(params.probs[i, j]))
        for i in range(params.r)
        for j in range(i + 1, params.r)
    )
    savings = math.fsum(log2_factorial(s) for s in params.sizes)
    hg = intra + inter
    return EntropyReport(
        sizes=params.sizes,
        h_graph=hg,
        h_struct_leading=hg - savings,
        intra_bits=intra,
        inter_bits=inter,
        label_savings_bits=savings,
    )


def codec_length_budget(params: SbmParams) -> float:
    """Mean-codeword-length budget the block codec is tested against.

    Per block: pair entropy minus n_i log2 n_i plus a 10 n_i slack; per cross
    pair: bipartite entropy plus one 64-bit stream-flush allowance.
    """
    total = 0.0
    for i, s in enumerate(params.sizes):
        total += pair_count(s) * binary_entropy(float(params.probs[i, i]))
        total += 10.0 * s
        if s > 1:
            total -= s * math.log2(s)
        for j in range(i + 1, params.r):
            total += s * params.sizes[j] * binary_entropy(float(params.probs[i, j])) + 64.0
    return total


# ---------------------------------------------------------------------------
# exact oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StructureClass:
    """One partition-respecting isomorphism class from the exact oracle."""

    key: int  # canonical adjacency mask: bit k = pair k (row-major u < v)
    multiplicity: int  # N(S): labeled graphs in the class
    aut_size: int  # block-preserving automorphism group order
    edge_counts: tuple[int, ...]  # per block-pair type, row-major i <= j
    probability: float  # P(S) under the queried params


@dataclass(frozen=True)
class _ClassTable:
    sizes: tuple[int, ...]
    reps: np.ndarray  # canonical masks, sorted
    counts: np.ndarray  # class multiplicities
    e_mat: np.ndarray  # per-class edge counts by pair type
    m_t: np.ndarray  # pairs available per type
    type_pairs: tuple[tuple[int, int], ...]


_CLASS_TABLE_CACHE: dict[tuple[int, ...], _ClassTable] = {}


def _block_perm_arrays(sizes: tuple[int, ...]):
    offsets = [0]
    for s in sizes:
        offsets.append(offsets[-1] + s)
    per_block = [itertools.permutations(range(s)) for s in sizes]
    for combo in itertools.product(*per_block):
        perm = np.empty(offsets[-1], dtype=np.int64)
        for b, sigma in enumerate(combo):
            for i, target in enumerate(sigma):
                perm[offsets[b] + i] = offsets[b] + target
        yield perm


def _class_table(sizes: tuple[int, ...]) -> _ClassTable:
    sizes = tuple(int(s) for s in sizes)
    cached = _CLASS_TABLE_CACHE.get(sizes)
    if cached is not None:
        return cached
    n = sum(sizes)
    nbits = pair_count(n)
    if nbits > ORACLE_MAX_PAIR_BITS:
        raise ValueError(f"oracle enumeration limited to C(n,2) <= {ORACLE_MAX_PAIR_BITS}")
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    block_of = Partition(sizes).block_of() if n else np.zeros(0, dtype=np.int64)
    r = len(sizes)
    type_pairs = tuple((i, j) for i in range(r) for j in range(i, r))
    type_index = {t: k for k, t in enumerate(type_pairs)}
    type_of_pair = np.array(
        [type_index[tuple(sorted((block_of[u], block_of[v])))] for u, v in pairs],
        dtype=np.int64,
    )
    m_t = np.bincount(type_of_pair, minlength=len(type_pairs)).astype(np.int64)

    total = 1 << nbits
    shifts = np.arange(nbits, dtype=np.int64)
    weight_maps = []
    for perm in _block_perm_arrays(sizes):
        if np.array_equal(perm, np.arange(n)):
            continue
        posmap = [pair_index(int(perm[u]), int(perm[v]), n) for u, v in pairs]
        weight_maps.append((np.int64(1) << np.array(posmap, dtype=np.int64)))

    canon = np.empty(total, dtype=np.int64)
    chunk = 1 << 20
    for lo in range(0, total, chunk):
        hi = min(lo + chunk, total)
        masks = np.arange(lo, hi, dtype=np.int64)
        bits = ((masks[:, None] >> shifts) & 1).astype(np.uint8)
        best = masks.copy()
        for weights in weight_maps:
            np.minimum(best, bits @ weights, out=best)
        canon[lo:hi] = best

    reps, counts = np.unique(canon, return_counts=True)
    rep_bits = ((reps[:, None] >> shifts) & 1).astype(np.int64)
    e_mat = np.zeros((len(reps), len(type_pairs)), dtype=np.int64)
    for t in range(len(type_pairs)):
        cols = np.flatnonzero(type_of_pair == t)
        if cols.size:
            e_mat[:, t] = rep_bits[:, cols].sum(axis=1)
    table = _ClassTable(sizes, reps, counts.astype(np.int64), e_mat, m_t, type_pairs)
    _CLASS_TABLE_CACHE[sizes] = table
    return table


def _log2_pg_per_class(table: _ClassTable, params: SbmParams) -> np.ndarray:
    """log2 P(G) for one labeled representative of each class (-inf if impossible)."""
    out = np.zeros(len(table.reps), dtype=np.float64)
    for t, (i, j) in enumerate(table.type_pairs):
        p = float(params.probs[i, j])
        e = table.e_mat[:, t].astype(np.float64)
        m = float(table.m_t[t])
        if p == 0.0:
            out[table.e_mat[:, t] > 0] = -np.inf
        elif p == 1.0:
            out[table.e_mat[:, t] < table.m_t[t]] = -np.inf
        else:
            out += e * math.log2(p) + (m - e) * math.log2(1.0 - p)
    return out


def structure_classes(params: SbmParams) -> list[StructureClass]:
    """Every partition-respecting class with exact probability and multiplicity."""
    table = _class_table(params.sizes)
    fact = math.prod(math.factorial(s) for s in params.sizes)
    log2_pg = _log2_pg_per_class(table, params)
    out = []
    for idx in range(len(table.reps)):
        count = int(table.counts[idx])
        aut, rem = divmod(fact, count)
        if rem:
            raise AssertionError("class multiplicity does not divide the label count")
        prob = count * float(2.0 ** log2_pg[idx]) if np.isfinite(log2_pg[idx]) else 0.0
        out.append(
            StructureClass(
                key=int(table.reps[idx]),
                multiplicity=count,
                aut_size=aut,
                edge_counts=tuple(int(e) for e in table.e_mat[idx]),
                probability=prob,
            )
        )
    return out


def exact_structural_entropy(params: SbmParams) -> tuple[float, int]:
    """Exact structure entropy by full enumeration; returns (H_S, class count)."""
    classes = structure_classes(params)
    h = -math.fsum(c.probability * math.log2(c.probability) for c in classes if c.probability > 0)
    return h, len(classes)


def identity_check_eq3(params: SbmParams) -> float:
    """|H_graph - H_struct - sum P(S) log2 N(S)| from exact oracle quantities."""
    classes = structure_classes(params)
    h_s = -math.fsum(c.probability * math.log2(c.probability) for c in classes if c.probability > 0)
    bookkeeping = math.fsum(
        c.probability * math.log2(c.multiplicity) for c in classes if c.probability > 0
    )
    return abs(graph_entropy(params) - h_s - bookkeeping)


def n_of_s(pg: PartitionedGraph) -> int:
    """Labeled graphs sharing pg's structure: prod(n_i!) / |Aut| (block-preserving Aut)."""
    fact = math.prod(math.factorial(s) for s in pg.partition.sizes)
    aut = aut_size_partitioned(pg)
    count, rem = divmod(fact, aut)
    if rem:
        raise AssertionError("automorphism order does not divide the label count")
    return count


def n_of_s_within_parts(pg: PartitionedGraph) -> int:
    """Multiplicity estimate dividing only by per-part automorphisms.

    Cross-block edges can break within-part symmetries, in which case this
    undercounts relative to n_of_s; exposed so the two can be compared.
    """
    fact = math.prod(math.factorial(s) for s in pg.partition.sizes)
    denom = 1
    for i, s in enumerate(pg.partition.sizes):
        denom *= aut_size_partitioned(
            PartitionedGraph(block_subgraph(pg, i), Partition((s,)))
        )
    return fact // denom


# ---------------------------------------------------------------------------
# typicality and symmetry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TypicalityResult:
    """Normalized structure log-probability against its predicted center.

    The structure probability is computed as prod(n_i!) * P(G), which is
    exact only when every part is asymmetric; parts small enough for the
    automorphism oracle are checked and `symmetric_part` reports the outcome
    (None when no part was checkable).
    """

    statistic: float
    target: float
    parts_checked: tuple[int, ...]
    symmetric_part: bool | None

    @property
    def deviation(self) -> float:
        return abs(self.statistic - self.target)

    def within(self, epsilon: float) -> bool:
        return self.deviation < 3.0 * epsilon


def typicality_target(params: SbmParams) -> float:
    """Predicted center of the statistic: leading structure entropy per pair."""
    report = structural_entropy_leading(params)
    return report.h_struct_leading / pair_count(params.n)


def typicality_statistic(pg: PartitionedGraph, params: SbmParams) -> TypicalityResult:
    """-log2 P(S) / C(n,2) for a sampled graph, with asymmetry bookkeeping."""
    if pg.partition.sizes != params.sizes:
        raise ValueError("partition sizes do not match the model")
    n = pg.n
    if pair_count(n) == 0:
        raise ValueError("typicality needs at least one vertex pair")
    counts = blockpair_edge_counts(pg)
    log2_pg = 0.0
    for i in range(params.r):
        for j in range(i, params.r):
            p = float(params.probs[i, j])
            m = pair_count(params.sizes[i]) if i == j else params.sizes[i] * params.sizes[j]
            e = int(counts[i, j])
            if p == 0.0 or p == 1.0:
                if e != (0 if p == 0.0 else m):
                    raise ValueError("graph impossible under a degenerate model entry")
                continue
            log2_pg += e * math.log2(p) + (m - e) * math.log2(1.0 - p)
    log2_ps = math.fsum(log2_factorial(s) for s in params.sizes) + log2_pg
    checked = tuple(i for i, s in enumerate(params.sizes) if s <= AUT_MAX_N)
    symmetric: bool | None = None
    if checked:
        symmetric = False
        for i in checked:
            sub = block_subgraph(pg, i)
            aut = aut_size_partitioned(PartitionedGraph(sub, Partition((sub.n,))))
            if aut > 1:
                symmetric = True
                break
    return TypicalityResult(
        statistic=-log2_ps / pair_count(n),
        target=typicality_target(params),
        parts_checked=checked,
        symmetric_part=symmetric,
    )


def symmetry_rate(n: int, p: float, trials: int, seed: int) -> float:
    """Monte Carlo fraction of G(n, p) samples with a nontrivial automorphism."""
    if n > AUT_MAX_N:
        raise ValueError(f"exact automorphism check limited to n <= {AUT_MAX_N}")
    if trials < 1:
        raise ValueError("need at least one trial")
    part = Partition((n,)) if n else Partition(())
    hits = 0
    for t in range(trials):
        g = gen_er(n, p, seed + t)
        if n and aut_size_partitioned(PartitionedGraph(g, part)) > 1:
            hits += 1
    return hits / trials
