"""Command-line entry point: one subcommand per experiment, deterministic reports."""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_PRECONDITION, EXIT_BUDGET, EXIT_USAGE, EXIT_IO = 0, 2, 3, 64, 74
SUBCOMMANDS = ("rootsys", "steinberg", "logword", "numring", "delta", "qi", "fiber", "cayley",
               "cone", "horoball", "classify", "pseudochar", "bgen")
BUDGET_ENV = "HYPERACT_MAX_STATES"
GLOBAL_DEFAULTS = {"workers": None, "output": None, "format": "json", "timing": False}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _budget() -> int:
    raw = os.environ.get(BUDGET_ENV, "20000000")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None


def _read(path: str) -> str:
    return Path(path).read_text()


def _space(path: str):
    from .coarse import parse_edge_list
    return parse_edge_list(_read(path))


def _sampling(args) -> tuple[str, int | None]:
    if args.samples is not None and args.seed is None:
        raise UsageError("--samples needs --seed")
    if args.exact and args.samples is not None:
        raise UsageError("--exact and --samples are exclusive")
    return ("sampled", args.seed) if args.samples is not None else ("exact", None)


def _auto_delta(dist, args, limit: float = 1e9):
    """Exact scan when n^4 fits the budget, otherwise seeded sampling (flagged in the report)."""
    from .coarse import four_point_delta_table
    n = dist.shape[0]
    if float(n) ** 4 <= limit and args.samples is None:
        return four_point_delta_table(dist, "exact")
    if args.seed is None:
        raise UsageError(f"n={n} is too large for an exact scan; pass --seed (and optionally --samples)")
    return four_point_delta_table(dist, "sampled", args.samples or 1_000_000, args.seed)


# ---------------------------------------------------------------- subcommands

def cmd_rootsys(args):
    from .rootsys import fmt_root, pair_table, parse_system
    phi = parse_system(args.system)
    res = {"system": phi.label, "rank": phi.rank, "roots": [fmt_root(r) for r in phi.roots],
           "simple_roots": [fmt_root(r) for r in phi.simple_roots],
           "positive_roots": [fmt_root(r) for r in phi.positive_roots],
           "cartan_matrix": [list(r) for r in phi.cartan_matrix]}
    if args.pairs:
        counts: dict[str, int] = {}
        for a, b, kind in pair_table(phi):
            if b not in (a, tuple(-x for x in a)):
                counts[kind.value] = counts.get(kind.value, 0) + 1
        res["pair_kinds"] = dict(sorted(counts.items()))
    return res, None, []


def cmd_steinberg(args):
    from .chevalley import chevalley_basis, steinberg_commutator
    from .rootsys import neg, parse_system
    phi = parse_system(args.system)
    L = chevalley_basis(phi)
    reps = [steinberg_commutator(L, a, b, args.grid, args.order)
            for a in phi.roots for b in phi.roots if b not in (a, neg(a))]
    nmax = max((abs(v) for r in reps for v in r.n_values.values()), default=0)
    res = {"system": phi.label, "grid": args.grid, "order": args.order, "pairs": len(reps),
           "ok": all(r.ok for r in reps), "max_abs_N": nmax, "relations": [r.as_dict() for r in reps]}
    rows = [(r.as_dict()["alpha"], r.as_dict()["beta"], f["i"], f["j"], f["root"], f["N"])
            for r in reps for f in r.as_dict()["factors"]]
    return res, rows, ["alpha", "beta", "i", "j", "root", "N"]


def cmd_logword(args):
    from .chevalley import chevalley_basis, logword
    from .rootsys import parse_root, parse_system
    phi = parse_system(args.system)
    alpha = parse_root(args.root)
    w = logword(chevalley_basis(phi), alpha, args.n, verify=not args.no_verify)
    res = w.as_dict()
    if not args.show_word:
        res.pop("word")
    return res, None, []


def cmd_numring(args):
    from .numring import (QuadOrder, fundamental_unit, ideal_norm, stubborn_witness, unit_powers,
                          verify_diag_decomposition, verify_unit_commutator)
    R = QuadOrder(args.d)
    w0 = fundamental_unit(args.d)
    units = unit_powers(w0, (1, -1, 2, -2))
    basis = R.integral_basis
    diag_checks = [verify_diag_decomposition(R, u).as_dict() for u in units]
    comm = [verify_unit_commutator(R, u, lam).as_dict() for u in units for lam in basis]
    two = R(2)
    target = two * (1 - w0 * w0)
    res = {"d": args.d, "fundamental_unit": w0.as_pair(), "unit_norm": w0.norm(),
           "diag_decomposition": diag_checks, "unit_commutator": comm,
           "ideal": {"generator": target.as_pair(), "norm": ideal_norm(R, [target])},
           "stubborn": [stubborn_witness(R, lam).as_dict() for lam in basis]}
    res["ok"] = all(c["ok"] for c in diag_checks) and all(c["ok"] for c in comm) and \
        all(s["evaluates"] for s in res["stubborn"])
    return res, None, []


def cmd_delta(args):
    from .coarse import four_point_delta
    X = _space(args.input)
    mode, seed = _sampling(args)
    rep = four_point_delta(X, mode, args.samples or 0, seed)
    res = rep.as_dict()
    res["diameter"] = X.diameter
    return res, [(res["n"], res["delta4"], res["mode"])], ["n", "delta4", "mode"]


def cmd_qi(args):
    from .coarse import qi_constants
    X, Y = _space(args.source), _space(args.target)
    f = [0] * X.n
    seen = set()
    for lineno, raw in enumerate(_read(args.map).splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if len(line) != 2:
            raise UsageError(f"{args.map}:{lineno}: expected 'u f(u)'")
        u, v = int(line[0]), int(line[1])
        f[u] = v
        seen.add(u)
    if len(seen) != X.n:
        raise UsageError(f"map covers {len(seen)} of {X.n} source vertices")
    return qi_constants(f, X, Y).as_dict(), None, []


def cmd_fiber(args):
    from .coarse import check_iota_bounds, fiber_space, four_point_delta, four_point_delta_table, two_lines_instance
    inst = two_lines_instance(args.length, args.offset, args.B)
    X = inst["X"]
    F = fiber_space(inst["V"], inst["W"], X, inst["phi"], inst["psi"], inst["actions"],
                    inst["B_param"], inst["delta"], inst["K"], inst["C"])
    dX = four_point_delta(X)
    dA1 = four_point_delta_table(F.metric)       # A1 with the sum pseudo-metric
    dA = four_point_delta(F.graph)               # the threshold graph on A1
    iota = check_iota_bounds(F)
    bound = 2 * dX.delta4 + 4 * F.J1
    res = {"fiber": F.as_dict(), "delta_X": dX.as_dict(), "delta_A1": dA1.as_dict(), "delta_A": dA.as_dict(),
           "delta_A1_bound": str(bound), "delta_A1_within_bound": dA1.delta4 <= bound, "iota": iota.as_dict()}
    return res, None, []


def _matrix_gens(name: str, modulus: int | None):
    from .coarse import MatrixGroup
    size = {"sl2": 2, "sl3": 3}[name]
    G = MatrixGroup(size, modulus)
    gens = []
    for i in range(size):
        for j in range(size):
            if i != j:
                for t in (1, -1):
                    m = np.eye(size, dtype=np.int64)
                    m[i, j] = t
                    gens.append(G.element(m.tolist()))
    return G, gens


def cmd_cayley(args):
    from .coarse import cayley_ball
    G, gens = _matrix_gens(args.group, args.modulus)
    ball = cayley_ball(G, gens, args.radius, _budget())
    spheres = np.bincount(np.asarray(ball.word_length, dtype=np.int64)).tolist()
    res = {"group": args.group, "modulus": args.modulus, "radius": args.radius, "vertices": ball.space.n,
           "spheres": spheres, "partial": ball.partial}
    if args.delta:
        res["delta"] = _auto_delta(ball.space.dist, args).as_dict()
    return res, [(r, s) for r, s in enumerate(spheres)], ["radius", "sphere"]


def cmd_cone(args):
    from .coarse import cayley_ball, coned_space
    G, gens = _matrix_gens("sl2", args.modulus)
    ball = cayley_ball(G, gens, args.radius, _budget())

    def upper_unipotent(g):
        return g[0] == 1 and g[3] == 1 and g[2] == 0

    def lower_unipotent(g):
        return g[0] == 1 and g[3] == 1 and g[1] == 0

    members = [upper_unipotent] + ([lower_unipotent] if args.both else [])
    C = coned_space(ball, members)
    res = {"modulus": args.modulus, "radius": args.radius, "ball_vertices": ball.space.n,
           "cones": len(C.cones), "vertices": C.space.n, "diameter": C.diameter,
           "ball_diameter": ball.space.diameter}
    if args.delta:
        res["delta"] = _auto_delta(C.space.dist, args).as_dict()
    return res, None, []


def cmd_horoball(args):
    from .horoball import (admissible_check, build_exponential_family, build_horoball, build_orbit_family,
                           delta_profile, orbit_base_graph, parse_custom_family)
    X = _space(args.base)
    if args.family == "exp":
        fam, base = build_exponential_family(X, args.depth), X
    elif args.family == "orbit":
        if args.C1 is None:
            raise UsageError("--family orbit needs --C1")
        fam = build_orbit_family(X.dist, args.C1, args.depth)
        base = orbit_base_graph(fam)
    else:
        if not args.family_file:
            raise UsageError("--family custom needs --family-file")
        fam, base = parse_custom_family(_read(args.family_file), X.n), X
    adm = admissible_check(base, fam, min(args.depth, fam.depth))
    res = {"family": fam.kind, "depth": args.depth, "base_vertices": X.n, "admissibility": adm.as_dict()}
    if args.family == "orbit":
        res["C1"] = args.C1
    H = build_horoball(base, fam, args.depth, force=args.force)
    res["vertices"] = H.space.n
    rows = None
    if args.profile:
        n_top = H.space.n
        if float(n_top) ** 4 > 1e9 and args.seed is None:
            raise UsageError("profile needs sampling at this size; pass --seed")
        prof = delta_profile(base, fam, range(1, args.depth + 1), samples=args.samples or 1_000_000,
                             seed=args.seed if args.seed is not None else 0, force=args.force)
        res["profile"] = [{"depth": D, **r.as_dict()} for D, r in prof.rows]
        rows = [(D, r.as_dict()["delta4"]) for D, r in prof.rows]
    return res, rows, ["depth", "delta4"]


def _action(args):
    from .action import GroupAction, RaySpec, cycle_rotation, horoball_translation, line_shift
    from .coarse import build_space
    if args.preset:
        if args.preset == "line":
            A = line_shift(101)
            return A, 50, RaySpec(list(range(50, 101)), 10), None
        if args.preset == "cycle":
            A = cycle_rotation(24)
            return A, 0, RaySpec(list(range(0, 13)), 4), None
        A = horoball_translation(200, 8)
        return A, 10, RaySpec([10 + 200 * n for n in range(9)], 3), None
    if not args.action:
        raise UsageError("pass --action FILE or --preset")
    spec = json.loads(_read(args.action))
    if "edges_file" in spec:
        X = _space(str(Path(args.action).parent / spec["edges_file"]))
    else:
        X = build_space([tuple(e) for e in spec["edges"]], spec.get("n"))
    A = GroupAction(X, spec["generators"], spec.get("labels", []))
    x0 = int(spec.get("x0", 0))
    ray = RaySpec(spec["ray"], int(spec["tail"])) if "ray" in spec else None
    delta = Fraction(spec["delta"]) if "delta" in spec else None
    return A, x0, ray, delta


def _action_delta(A, given, args):
    if args.delta is not None:
        return Fraction(args.delta), "given"
    if given is not None:
        return given, "given"
    rep = _auto_delta(A.space.dist, args) if A.space.n ** 4 <= 1e9 or args.seed is not None else None
    if rep is None:
        from .coarse import four_point_delta_table
        rep = four_point_delta_table(A.space.dist, "sampled", 1_000_000, 0)
    return rep.delta4, rep.mode


def cmd_classify(args):
    from .action import classify_isometry, stable_translation_length
    A, x0, _, given = _action(args)
    x0 = args.x0 if args.x0 is not None else x0
    delta, src = _action_delta(A, given, args)
    c = classify_isometry(A, args.word, x0, args.N, delta)
    tl = stable_translation_length(A, args.word, x0, args.N)
    res = {"word": args.word, "x0": x0, "delta": str(delta), "delta_source": src, **c.as_dict(),
           "translation_estimate": str(tl.estimate), "translation_upper": str(tl.upper),
           "isometry_audit_ok": all(w is None for w in A.isometry_audit())}
    return res, None, []


def cmd_pseudochar(args):
    from .action import pseudocharacter
    A, x0, ray, given = _action(args)
    if ray is None:
        raise UsageError("pseudochar needs a ray (action file 'ray' and 'tail')")
    delta, src = _action_delta(A, given, args)
    rep = pseudocharacter(A, ray, args.word, args.N, delta)
    res = rep.as_dict()
    res["delta_source"] = src
    return res, None, []


def cmd_bgen(args):
    from .action import bounded_generation_diameter
    G, gens = _matrix_gens("sl2", args.modulus)
    up, lo = gens[0], gens[2]
    subgroups = {"upper": [up], "lower": [lo]}
    chosen = [s for s in args.subgroups.split(",") if s]
    for s in chosen:
        if s not in subgroups:
            raise UsageError(f"unknown subgroup {s!r}")
    rep = bounded_generation_diameter(G, [up, lo], [subgroups[s] for s in chosen], _budget())
    res = {"modulus": args.modulus, "subgroups": chosen, **rep.as_dict()}
    return res, None, []


# ---------------------------------------------------------------- parser and dispatch

def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--workers", type=int, help="parallel workers (never changes output)")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--timing", action="store_true", help="include wall time in the report")
    p = _Parser(prog="hyperact", parents=[common],
                description="Experiments on root systems, hyperbolic spaces and group actions.")
    sub = p.add_subparsers(dest="subcommand", parser_class=_Parser)
    _add = sub.add_parser
    sub.add_parser = lambda name, **kw: _add(name, parents=[common], **kw)

    def sampling(sp):
        sp.add_argument("--samples", type=int)
        sp.add_argument("--seed", type=int)

    s = sub.add_parser("rootsys")
    s.add_argument("--system", required=True)
    s.add_argument("--pairs", action="store_true")
    s = sub.add_parser("steinberg")
    s.add_argument("--system", required=True)
    s.add_argument("--grid", type=int, default=3)
    s.add_argument("--order", choices=("ghGH", "GHgh"), default="ghGH")
    s = sub.add_parser("logword")
    s.add_argument("--system", required=True)
    s.add_argument("--root", required=True, help="comma-separated coordinates")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--no-verify", action="store_true")
    s.add_argument("--show-word", action="store_true")
    s = sub.add_parser("numring")
    s.add_argument("--d", type=int, required=True)
    s = sub.add_parser("delta")
    s.add_argument("--input", required=True)
    s.add_argument("--exact", action="store_true")
    sampling(s)
    s = sub.add_parser("qi")
    s.add_argument("--source", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--map", required=True)
    s = sub.add_parser("fiber")
    s.add_argument("--length", type=int, default=30)
    s.add_argument("--offset", type=int, default=1)
    s.add_argument("--B", type=int, default=1)
    for name in ("cayley", "cone"):
        s = sub.add_parser(name)
        if name == "cayley":
            s.add_argument("--group", choices=("sl2", "sl3"), default="sl2")
        else:
            s.add_argument("--both", action="store_true", help="also cone off lower unipotent cosets")
        s.add_argument("--modulus", type=int)
        s.add_argument("--radius", type=int, default=3)
        s.add_argument("--delta", action="store_true")
        sampling(s)
    s = sub.add_parser("horoball")
    s.add_argument("--base", required=True)
    s.add_argument("--family", choices=("exp", "orbit", "custom"), default="exp")
    s.add_argument("--family-file")
    s.add_argument("--C1", type=int)
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--profile", action="store_true")
    s.add_argument("--force", action="store_true", help="build even if the family is not admissible")
    sampling(s)
    for name in ("classify", "pseudochar"):
        s = sub.add_parser(name)
        s.add_argument("--action")
        s.add_argument("--preset", choices=("line", "cycle", "horoball"))
        s.add_argument("--word", default="a")
        s.add_argument("--N", type=int, default=32)
        s.add_argument("--x0", type=int)
        s.add_argument("--delta", help="four-point constant, e.g. 5/2")
        sampling(s)
    s = sub.add_parser("bgen")
    s.add_argument("--modulus", type=int, required=True)
    s.add_argument("--subgroups", default="upper,lower")
    return p


def _check_ranges(args) -> None:
    for name in ("depth", "radius", "grid", "N", "n", "samples", "length", "modulus", "C1", "workers"):
        v = getattr(args, name, None)
        if v is not None and v < (0 if name in ("depth", "radius", "grid") else 1):
            raise UsageError(f"--{name} out of range: {v}")


def dispatch(args) -> tuple[int, str | None]:
    from .chevalley import FactorizationError
    from .coarse import EdgeListError, SpaceError, set_workers
    from .rootsys import RootSystemError
    from .numring import RingError
    from .horoball import HoroballError
    from .action import ActionError, BudgetExceeded
    from .report import Report

    handler = globals()[f"cmd_{args.subcommand}"]
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("workers", "output", "format", "timing")}
    t0 = time.perf_counter()
    try:
        _check_ranges(args)
        if args.workers is not None:
            set_workers(args.workers)
        results, rows, columns = handler(args)
    except UsageError as exc:
        return EXIT_USAGE, str(exc)
    except OSError as exc:
        return EXIT_IO, str(exc)
    except (BudgetExceeded, MemoryError) as exc:
        return EXIT_BUDGET, f"budget exhausted: {exc}"
    except (EdgeListError, SpaceError, RootSystemError, RingError, HoroballError, ActionError,
            FactorizationError, ValueError) as exc:
        return EXIT_PRECONDITION, str(exc)
    rep = Report(args.subcommand, config, results, rows, columns,
                 time.perf_counter() - t0 if args.timing else None)
    try:
        text = rep.render(args.format)
    except ValueError as exc:
        return EXIT_USAGE, str(exc)
    try:
        if args.output:
            Path(args.output).write_text(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        return EXIT_IO, str(exc)
    return EXIT_OK, None


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for name, default in GLOBAL_DEFAULTS.items():
        if not hasattr(args, name):
            setattr(args, name, default)
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    code, msg = dispatch(args)
    if msg:
        print(f"hyperact {args.subcommand}: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
