"""Distance-bracket mismatches for orbit ball families, over a range of C1.

Two orbits of Z are compared: translations of a line (linear orbit growth)
and the parabolic shift inside the exponential horoball over a line
(logarithmic orbit growth).
"""
import argparse

from hyperact.horoball import (
    admissible_check, build_orbit_family, distance_formula_check, orbit_base_graph, sample_pairs,
    shift_orbit_in_horoball, shift_orbit_on_line,
)


def study(name, d, window, margin, C1, D, pairs, seed):
    total = d.shape[0]
    fam = build_orbit_family(d, C1, D)
    X = orbit_base_graph(fam)
    shift = [g + 1 if g + 1 < total else -1 for g in range(total)]
    adm = admissible_check(X, fam, generators=[shift])
    sample = [(a + margin, n, b + margin, m) for a, n, b, m in sample_pairs(window, D, pairs, seed)]
    rep = distance_formula_check(total, fam, D, d, C1, sample)
    failing = ",".join(a.name for a in adm.axioms if not a.ok) or "-"
    print(f"{name},{C1},{D},{rep.checked},{len(rep.mismatches)},{failing}", flush=True)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--window", type=int, default=64)
    ap.add_argument("--depth", type=int, default=5)
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--C1", default="1,2,3,4,6,8")
    args = ap.parse_args()
    W, margin = args.window, args.window
    print("orbit,C1,depth,checked,mismatches,failing_axioms")
    line = shift_orbit_on_line(W + 2 * margin)
    para = shift_orbit_in_horoball(W + 2 * margin)
    for C1 in (int(c) for c in args.C1.split(",")):
        study("line", line, W, margin, C1, args.depth, args.pairs, args.seed)
        study("parabolic", para, W, margin, C1, args.depth, args.pairs, args.seed)


if __name__ == "__main__":
    main()
