"""Lossless compression of block-partitioned graphs up to within-block relabeling,
with exact entropy analysis for small instances and statistical checks at scale."""

from .coder import (
    ArithDecoder,
    ArithEncoder,
    BitSink,
    BitSource,
    CodecError,
    FixedProb,
    binomial_cumulative,
)
from .codec import (
    Codeword,
    MatchReport,
    estimate_params,
    read_codeword,
    sbm_decode,
    sbm_encode,
    structural_match,
    write_codeword,
)
from .entropy import (
    EntropyReport,
    StructureClass,
    TypicalityResult,
    binary_entropy,
    codec_length_budget,
    exact_structural_entropy,
    graph_entropy,
    identity_check_eq3,
    log2_factorial,
    n_of_s,
    n_of_s_within_parts,
    structural_entropy_leading,
    structure_classes,
    symmetry_rate,
    typicality_statistic,
    typicality_target,
)
from .graph import (
    FormatError,
    LabeledGraph,
    Partition,
    PartitionedGraph,
    SbmParams,
    block_subgraph,
    blockpair_edge_counts,
    cross_slice,
    degree_profile,
    gen_er,
    gen_sbm,
    normalize_membership,
    pair_count,
    pair_index,
    read_graph,
    relabel,
    write_graph,
)
from .iso import aut_size_partitioned, isomorphic_partitioned, structure_fingerprint
from .peel import CanonicalMap, peel_decode, peel_encode, peel_encode_with_map

__all__ = [
    "ArithDecoder",
    "ArithEncoder",
    "BitSink",
    "BitSource",
    "CanonicalMap",
    "CodecError",
    "Codeword",
    "EntropyReport",
    "FixedProb",
    "FormatError",
    "LabeledGraph",
    "MatchReport",
    "Partition",
    "PartitionedGraph",
    "SbmParams",
    "StructureClass",
    "TypicalityResult",
    "aut_size_partitioned",
    "binary_entropy",
    "binomial_cumulative",
    "block_subgraph",
    "blockpair_edge_counts",
    "codec_length_budget",
    "cross_slice",
    "degree_profile",
    "estimate_params",
    "exact_structural_entropy",
    "gen_er",
    "gen_sbm",
    "graph_entropy",
    "identity_check_eq3",
    "isomorphic_partitioned",
    "log2_factorial",
    "n_of_s",
    "n_of_s_within_parts",
    "normalize_membership",
    "pair_count",
    "pair_index",
    "peel_decode",
    "peel_encode",
    "peel_encode_with_map",
    "read_codeword",
    "read_graph",
    "relabel",
    "sbm_decode",
    "sbm_encode",
    "structural_entropy_leading",
    "structural_match",
    "structure_classes",
    "structure_fingerprint",
    "symmetry_rate",
    "typicality_statistic",
    "typicality_target",
    "write_codeword",
    "write_graph",
]

__version__ = "0.1.0"
