#!/usr/bin/env python3
"""Nearest-neighbor recall of the L1 embedding against exact transport
ground truth, for both embedding variants."""

import argparse
import sys
import time

from planar_emd import bench


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=16)
    parser.add_argument("--dataset", type=int, default=64)
    parser.add_argument("--queries", type=int, default=16)
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()

    for variant in bench.VARIANTS:
        cfg = bench.ExperimentConfig(
            n=args.n, pair_count=1, seed=args.seed, variant=variant
        )
        t0 = time.perf_counter()
        rep = bench.run_nn_experiment(cfg, args.dataset, args.queries)
        dt = time.perf_counter() - t0
        flag = " (degenerate ties present)" if rep.degenerate else ""
        print(
            f"variant={variant}: recall@1 {rep.recall_at_1:.3f}, "
            f"mean rank of true NN {rep.mean_rank_of_true_nn:.2f}{flag} "
            f"[{dt:.1f}s]"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
