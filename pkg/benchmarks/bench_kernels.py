"""Time the compiled and numpy kernel backends on evaluation-sized batches.

    python benchmarks/bench_kernels.py [--users 1000] [--items 20000] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from recvae import _backend


def make_inputs(n_users, n_items, density, seed=0):
    rng = np.random.default_rng(seed)
    lengths = rng.binomial(n_items, density, n_users)
    indptr = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
    indices = np.concatenate([np.sort(rng.choice(n_items, n, replace=False)) for n in lengths]).astype(np.int32)
    scores = rng.standard_normal((n_users, n_items))
    return indptr, indices, scores


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--users", type=int, default=1000)
    parser.add_argument("--items", type=int, default=20000)
    parser.add_argument("--density", type=float, default=0.005)
    parser.add_argument("--k", type=int, default=100)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    indptr, indices, scores = make_inputs(args.users, args.items, args.density)
    rows = np.arange(args.users)
    ranked = _backend.top_k(scores, args.k)
    ks = [20, 50, 100]
    kernels = {
        "densify_rows": lambda b: _backend.densify_rows(indptr, indices, rows, args.items, np.float32, b),
        "exclude_items": lambda b: _backend.exclude_items(scores.copy(), indptr, indices, b),
        "top_k": lambda b: _backend.top_k(scores, args.k, b),
        "ranking_metrics": lambda b: _backend.ranking_metrics(ranked, indptr, indices, ks, args.items, b),
    }
    names = sorted(_backend.BACKENDS)
    print(f"{args.users} users x {args.items} items, k={args.k}, best of {args.repeat}")
    print(f"{'kernel':<16}" + "".join(f"{n + ' (ms)':>16}" for n in names) + f"{'speedup':>10}")
    for kernel, fn in kernels.items():
        best = {n: min(timeit.repeat(lambda: fn(n), number=1, repeat=args.repeat)) * 1e3 for n in names}
        ratio = best["python"] / best["cython"] if "cython" in best else float("nan")
        print(f"{kernel:<16}" + "".join(f"{best[n]:16.2f}" for n in names) + f"{ratio:9.1f}x")


if __name__ == "__main__":
    main()
