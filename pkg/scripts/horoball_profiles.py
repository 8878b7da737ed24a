"""delta4 of truncated exponential horoballs over several base graphs, as CSV."""
import argparse

import numpy as np

from hyperact.coarse import four_point_delta_table, grid_graph, path_graph, random_tree
from hyperact.horoball import build_exponential_family, delta_profile


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depths", default="1,2,3,4,5,6,7,8")
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int)
    args = ap.parse_args()
    depths = [int(x) for x in args.depths.split(",")]
    bases = {"line200": path_graph(200), "grid20x20": grid_graph(20, 20),
             "tree150": random_tree(150, np.random.Generator(np.random.PCG64(0)))}
    print("base,depth,delta4,mode")
    for name, X in bases.items():
        bare = four_point_delta_table(X.dist, "exact" if X.n ** 4 <= 1e9 else "sampled",
                                      args.samples, args.seed, args.workers)
        print(f"{name},bare,{bare.delta4},{bare.mode}", flush=True)
        prof = delta_profile(X, build_exponential_family(X, max(depths)), depths,
                             samples=args.samples, seed=args.seed, workers=args.workers)
        for D, rep in prof.rows:
            print(f"{name},{D},{rep.delta4},{rep.mode}", flush=True)


if __name__ == "__main__":
    main()
