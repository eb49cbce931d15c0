"""Command-line interface.

Subcommands: fit, transform, eval, sweep, stats, search, bench.
Exit codes: 0 success, 2 usage error, 1 runtime error. Data goes to
stdout (or --out); diagnostics go to stderr, prefixed with the error code.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import evaluation, fileio, linalg, retrieval, streaming, whitening
from .errors import WhitevecError
from .whitening import FULL


def _k_arg(value: str):
    if value == FULL:
        return FULL
    try:
        k = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"k must be a positive integer or 'full', got {value!r}")
    if k < 1:
        raise argparse.ArgumentTypeError(f"k must be >= 1, got {k}")
    return k


def _ks_arg(value: str):
    return [_k_arg(tok) for tok in value.split(",") if tok.strip()]


def _positive_int(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def _default_threads() -> int:
    env = os.environ.get("WHITEVEC_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _load_fit_corpus(args, data: evaluation.PairedDataset) -> np.ndarray | None:
    """--fit target (default) fits on the pair union; --fit FILE on that file."""
    if args.fit == "target":
        return None
    return fileio.read_emb1(args.fit)


def cmd_fit(args) -> int:
    data = fileio.read_emb1(args.input)
    t = whitening.fit(data, k=args.k, eps=args.eps)
    fileio.save_transform(args.out, t)
    print(
        f"fitted on {t.fit_count} vectors: {t.input_dim} -> {t.output_dim} dims",
        file=sys.stderr,
    )
    return 0


def cmd_transform(args) -> int:
    t = fileio.load_transform(args.transform)
    data = fileio.read_emb1(args.input)
    fileio.write_emb1(args.out, whitening.apply_batch(t, data), dtype=args.dtype)
    return 0


def _eval_dataset(args) -> evaluation.PairedDataset:
    return evaluation.PairedDataset(
        left=fileio.read_emb1(args.left),
        right=fileio.read_emb1(args.right),
        gold=fileio.read_gold(args.gold),
        name=args.dataset,
    )


def cmd_eval(args) -> int:
    data = _eval_dataset(args)
    transform = None
    if args.k is not None:
        corpus = _load_fit_corpus(args, data)
        if corpus is None:
            corpus = evaluation.fit_corpus(data)
        transform = whitening.fit(corpus, k=args.k)
    report = evaluation.evaluate(data, transform)
    if args.report == "json":
        doc = {
            "dataset": report.dataset,
            "n_pairs": report.n_pairs,
            "skipped": report.skipped,
            "k": report.dim_used,
            "spearman_rho_x100": round(report.rho_x100, 5),
        }
        _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
    else:
        _emit(
            f"{report.dataset}\t{report.n_pairs}\t{report.skipped}\t"
            f"{report.dim_used}\t{report.rho_x100:.5f}\n",
            args.out,
        )
    return 0


def cmd_sweep(args) -> int:
    data = _eval_dataset(args)
    corpus = _load_fit_corpus(args, data)
    results = evaluation.sweep_k(data, args.ks, fit_data=corpus)
    done = {k for k, _ in results}
    for k in args.ks:
        if k != FULL and k not in done:
            print(f"RankDeficient: skipping k={k} (above numerical rank)", file=sys.stderr)
    lines = ["k\trho\n"]
    lines += [f"{k}\t{rho:.6f}\n" for k, rho in results]
    _emit("".join(lines), args.out)
    return 0


def cmd_stats(args) -> int:
    state = streaming.MomentState()
    for block in fileio.iter_emb1(args.input, batch_rows=args.batch):
        for row in block:
            state.update(row)
    mean, cov = streaming.finalize(state)
    eig = linalg.sym_eig(cov)
    top = eig.eigenvalues[:10]
    lines = [
        f"n\t{state.count}\n",
        f"mean_norm\t{np.linalg.norm(mean):.12g}\n",
        f"trace\t{np.trace(cov):.12g}\n",
        "top_eigenvalues\t" + " ".join(f"{v:.12g}" for v in top) + "\n",
    ]
    _emit("".join(lines), args.out)
    return 0


def _load_index_and_queries(args):
    base = fileio.read_emb1(args.index)
    queries = fileio.read_emb1(args.query)
    if args.transform:
        t = fileio.load_transform(args.transform)
        base = whitening.apply_batch(t, base)
        queries = whitening.apply_batch(t, queries)
    return retrieval.build_index(base), queries


def cmd_search(args) -> int:
    index, queries = _load_index_and_queries(args)
    lines = []
    for row, q in enumerate(queries):
        for rank, (vec_id, score) in enumerate(
            retrieval.top_k(index, q, args.top), start=1
        ):
            lines.append(f"{row}\t{rank}\t{vec_id}\t{score:.6f}\n")
    _emit("".join(lines), args.out)
    return 0


def cmd_bench(args) -> int:
    index, queries = _load_index_and_queries(args)
    report = retrieval.benchmark(
        index, queries, args.top, repetitions=args.reps, threads=args.threads
    )
    _emit(json.dumps(report.to_dict(), sort_keys=True) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="whitevec",
        description="Whitening post-processing, STS evaluation, and "
        "retrieval benchmarking for dense embedding files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a whitening transform from an EMB1 file")
    p.add_argument("--input", required=True, help="EMB1 embedding file to fit on")
    p.add_argument("--k", type=_k_arg, required=True, help="output dim or 'full'")
    p.add_argument("--eps", type=float, default=None, help="rank tolerance override")
    p.add_argument("--out", required=True, help="destination transform JSON")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("transform", help="apply a saved transform to an EMB1 file")
    p.add_argument("--input", required=True)
    p.add_argument("--transform", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dtype", choices=["float32", "float64"], default="float64")
    p.set_defaults(func=cmd_transform)

    def add_eval_inputs(p):
        p.add_argument("--left", required=True, help="EMB1 file, left sentences")
        p.add_argument("--right", required=True, help="EMB1 file, right sentences")
        p.add_argument("--gold", required=True, help="gold scores, one per line")
        p.add_argument(
            "--fit",
            default="target",
            help="'target' = fit on the evaluation pairs; or an EMB1 file path",
        )
        p.add_argument("--dataset", default="dataset", help="name used in reports")
        p.add_argument("--out", default=None)

    p = sub.add_parser("eval", help="Spearman correlation of cosine vs gold")
    add_eval_inputs(p)
    p.add_argument(
        "--k",
        type=_k_arg,
        default=None,
        help="whitening output dim or 'full'; omit to evaluate raw embeddings",
    )
    p.add_argument("--report", choices=["json", "tsv"], default="json")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="evaluate across output dimensionalities")
    add_eval_inputs(p)
    p.add_argument(
        "--ks", type=_ks_arg, required=True, help="comma-separated ks, e.g. 16,64,full"
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stats", help="streaming moment summary of an EMB1 file")
    p.add_argument("--input", required=True)
    p.add_argument("--batch", type=_positive_int, default=4096)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_stats)

    def add_search_inputs(p):
        p.add_argument("--index", required=True, help="EMB1 file to search over")
        p.add_argument("--transform", default=None, help="optional transform JSON")
        p.add_argument("--query", required=True, help="EMB1 file of queries")
        p.add_argument("--top", type=_positive_int, default=10)
        p.add_argument("--out", default=None)

    p = sub.add_parser("search", help="exact top-k cosine search")
    add_search_inputs(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("bench", help="throughput benchmark for exact search")
    add_search_inputs(p)
    p.add_argument("--reps", type=_positive_int, default=5)
    p.add_argument("--threads", type=_positive_int, default=_default_threads())
    p.set_defaults(func=cmd_bench)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except WhitevecError as e:
        print(f"{e.code}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"IOError: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
