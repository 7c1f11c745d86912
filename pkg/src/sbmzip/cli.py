"""Command-line front end: generation, compression, verification, entropy reports,
benchmarks and typicality experiments.

Exit codes: 0 success, 2 verification failure, 3 file-format error, 4 invalid
configuration. Every subcommand is deterministic under a fixed --seed, and
JSON reports echo the full configuration so a run can be reproduced from its
output alone.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .codec import (
    estimate_params,
    read_codeword,
    sbm_decode,
    sbm_encode,
    structural_match,
    write_codeword,
)
from .entropy import (
    ORACLE_MAX_PAIR_BITS,
    codec_length_budget,
    exact_structural_entropy,
    graph_entropy,
    identity_check_eq3,
    structural_entropy_leading,
    typicality_statistic,
)
from .graph import FormatError, SbmParams, gen_sbm, pair_count, read_graph, write_graph

EXIT_OK = 0
EXIT_VERIFY = 2
EXIT_FORMAT = 3
EXIT_CONFIG = 4


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _parse_sizes(args) -> tuple[int, ...]:
    if args.blocks is not None:
        try:
            sizes = tuple(int(tok) for tok in args.blocks.split(",") if tok != "")
        except ValueError as exc:
            raise ConfigError(f"bad --blocks value: {exc}") from exc
        if args.n is not None and sum(sizes) != args.n:
            raise ConfigError("--blocks must sum to --n")
        return sizes
    if args.n is None:
        raise ConfigError("--n or --blocks required")
    if args.fracs is not None:
        fracs = [float(tok) for tok in args.fracs.split(",") if tok != ""]
        if abs(sum(fracs) - 1.0) > 1e-9:
            raise ConfigError("--fracs must sum to 1")
        sizes = [int(round(f * args.n)) for f in fracs]
        drift = args.n - sum(sizes)
        sizes[-1] += drift
        if any(s <= 0 for s in sizes):
            raise ConfigError("--fracs produce an empty block at this --n")
        return tuple(sizes)
    if args.n == 0:
        return ()
    return (args.n,)


def _parse_params(args) -> SbmParams:
    sizes = _parse_sizes(args)
    if getattr(args, "matrix", None) is not None:
        if args.p is not None or args.q is not None:
            raise ConfigError("--matrix is mutually exclusive with --p/--q")
        with open(args.matrix) as fh:
            probs = json.load(fh)
        return SbmParams(sizes, np.asarray(probs, dtype=np.float64))
    p = args.p if args.p is not None else 0.5
    q = args.q if args.q is not None else p
    if sizes == ():
        return SbmParams((), np.zeros((0, 0)))
    return SbmParams.from_pq(sizes, p, q)


def _emit(args, payload: dict) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for key, value in payload.items():
            if key == "config":
                continue
            print(f"{key}: {value}")


def _config_echo(args, params: SbmParams | None = None) -> dict:
    echo = {
        "command": args.command,
        "seed": getattr(args, "seed", None),
        "trials": getattr(args, "trials", None),
        "epsilon": getattr(args, "epsilon", None),
    }
    if params is not None:
        echo["sizes"] = list(params.sizes)
        echo["probs"] = params.probs.tolist()
    return echo


def cmd_gen(args) -> int:
    params = _parse_params(args)
    pg = gen_sbm(params, args.seed)
    write_graph(pg, args.output)
    _emit(
        args,
        {
            "config": _config_echo(args, params),
            "output": args.output,
            "n": pg.n,
            "edges": pg.graph.edge_count(),
        },
    )
    return EXIT_OK


def cmd_compress(args) -> int:
    pg = read_graph(args.input)
    if args.estimate:
        if args.p is not None or args.q is not None or args.matrix is not None:
            raise ConfigError("--estimate is mutually exclusive with explicit models")
        params = estimate_params(pg)
    else:
        if args.p is None and args.matrix is None:
            raise ConfigError("a model is required: --p/--q, --matrix, or --estimate")
        args.blocks = ",".join(str(s) for s in pg.partition.sizes)
        args.n = pg.n
        params = _parse_params(args)
        if params.sizes != pg.partition.sizes:
            raise ConfigError("model sizes do not match the input graph")
    cw = sbm_encode(pg, params)
    write_codeword(cw, args.output)
    _emit(
        args,
        {
            "config": _config_echo(args, params),
            "input": args.input,
            "output": args.output,
            "payload_bits": cw.payload_bits(),
            "container_bytes": cw.serialized_size(),
        },
    )
    return EXIT_OK


def cmd_decompress(args) -> int:
    cw = read_codeword(args.input)
    pg = sbm_decode(cw)
    write_graph(pg, args.output)
    _emit(
        args,
        {
            "config": _config_echo(args),
            "input": args.input,
            "output": args.output,
            "n": pg.n,
            "edges": pg.graph.edge_count(),
        },
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    a = read_graph(args.original)
    b = read_graph(args.roundtrip)
    report = structural_match(a, b)
    _emit(
        args,
        {
            "config": _config_echo(args),
            "equivalent": report.equivalent,
            "method": report.method,
            "detail": report.detail,
        },
    )
    return EXIT_OK if report.equivalent else EXIT_VERIFY


def cmd_entropy(args) -> int:
    params = _parse_params(args)
    report = structural_entropy_leading(params)
    payload = {
        "config": _config_echo(args, params),
        "h_graph_bits": report.h_graph,
        "h_struct_leading_bits": report.h_struct_leading,
        "intra_bits": report.intra_bits,
        "inter_bits": report.inter_bits,
        "label_savings_bits": report.label_savings_bits,
    }
    if pair_count(params.n) <= ORACLE_MAX_PAIR_BITS and params.n >= 2:
        h_exact, classes = exact_structural_entropy(params)
        payload["h_struct_exact_bits"] = h_exact
        payload["structure_classes"] = classes
        payload["eq3_residual"] = identity_check_eq3(params)
    _emit(args, payload)
    return EXIT_OK


def _run_trial(task) -> dict:
    sizes, probs, seed, epsilon = task
    params = SbmParams(tuple(sizes), np.asarray(probs))
    t0 = time.perf_counter()
    pg = gen_sbm(params, seed)
    t1 = time.perf_counter()
    cw = sbm_encode(pg, params)
    t2 = time.perf_counter()
    decoded = sbm_decode(cw)
    t3 = time.perf_counter()
    ok = (
        np.array_equal(
            sbm_encode(decoded, params).block_streams, cw.block_streams
        )
        and sbm_encode(decoded, params).cross_stream == cw.cross_stream
    )
    typical = typicality_statistic(pg, params).within(epsilon) if pg.n >= 2 else None
    return {
        "seed": seed,
        "payload_bits": cw.payload_bits(),
        "roundtrip_ok": bool(ok),
        "typical": typical,
        "gen_s": t1 - t0,
        "encode_s": t2 - t1,
        "decode_s": t3 - t2,
    }


def cmd_bench(args) -> int:
    params = _parse_params(args)
    tasks = [
        (params.sizes, params.probs.tolist(), args.seed + t, args.epsilon)
        for t in range(args.trials)
    ]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_run_trial, tasks))
    else:
        rows = [_run_trial(task) for task in tasks]
    lengths = [row["payload_bits"] for row in rows]
    mean = sum(lengths) / len(lengths)
    std = math.sqrt(sum((x - mean) ** 2 for x in lengths) / max(1, len(lengths) - 1))
    typical_rows = [row["typical"] for row in rows if row["typical"] is not None]
    report = structural_entropy_leading(params)
    payload = {
        "config": _config_echo(args, params),
        "rows": rows,
        "mean_payload_bits": mean,
        "std_payload_bits": std,
        "length_budget_bits": codec_length_budget(params),
        "h_struct_leading_bits": report.h_struct_leading,
        "typicality_pass_rate": (
            sum(typical_rows) / len(typical_rows) if typical_rows else None
        ),
        "roundtrip_all_ok": all(row["roundtrip_ok"] for row in rows),
        "wall_s": sum(row["gen_s"] + row["encode_s"] + row["decode_s"] for row in rows),
    }
    _emit(args, payload)
    return EXIT_OK


def cmd_typicality(args) -> int:
    params = _parse_params(args)
    hits = 0
    flagged = 0
    stats = []
    for t in range(args.trials):
        pg = gen_sbm(params, args.seed + t)
        result = typicality_statistic(pg, params)
        stats.append(result.statistic)
        if result.within(args.epsilon):
            hits += 1
        if result.symmetric_part:
            flagged += 1
    payload = {
        "config": _config_echo(args, params),
        "target": typicality_statistic(gen_sbm(params, args.seed), params).target,
        "pass_rate": hits / args.trials,
        "theorem_floor": 1 - 4 * args.epsilon,
        "mean_statistic": sum(stats) / len(stats),
        "symmetric_part_flags": flagged,
    }
    _emit(args, payload)
    return EXIT_OK


def _add_model_flags(sub, with_estimate=False):
    sub.add_argument("--n", type=int, default=None, help="vertex count")
    sub.add_argument("--blocks", type=str, default=None, help="comma-separated block sizes")
    sub.add_argument("--fracs", type=str, default=None, help="comma-separated block fractions of n")
    sub.add_argument("--p", type=float, default=None, help="within-block edge probability")
    sub.add_argument("--q", type=float, default=None, help="cross-block edge probability")
    sub.add_argument("--matrix", type=str, default=None, help="JSON file with a full probability matrix")
    if with_estimate:
        sub.add_argument(
            "--estimate",
            action="store_true",
            help="use empirical block-pair densities as the model",
        )


def build_parser() -> _Parser:
    parser = _Parser(prog="sbmzip", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("gen", help="sample a block-model graph into a PGRF file")
    _add_model_flags(sub)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("-o", "--output", required=True)
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(func=cmd_gen)

    sub = subs.add_parser("compress", help="PGRF -> SBMZ")
    _add_model_flags(sub, with_estimate=True)
    sub.add_argument("input")
    sub.add_argument("-o", "--output", required=True)
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(func=cmd_compress)

    sub = subs.add_parser("decompress", help="SBMZ -> PGRF")
    sub.add_argument("input")
    sub.add_argument("-o", "--output", required=True)
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(func=cmd_decompress)

    sub = subs.add_parser("verify", help="check two PGRF files for structural equivalence")
    sub.add_argument("original")
    sub.add_argument("roundtrip")
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(func=cmd_verify)

    sub = subs.add_parser("entropy", help="entropy report (exact oracle at small n)")
    _add_model_flags(sub)
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(func=cmd_entropy)

    sub = subs.add_parser("bench", help="multi-trial compression benchmark")
    _add_model_flags(sub)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--trials", type=int, default=20)
    sub.add_argument("--epsilon", type=float, default=0.05)
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(func=cmd_bench)

    sub = subs.add_parser("typicality", help="Monte Carlo typicality experiment")
    _add_model_flags(sub)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--trials", type=int, default=100)
    sub.add_argument("--epsilon", type=float, default=0.05)
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(func=cmd_typicality)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
