"""Batch command-line front end.

Subcommands run one module operation each and emit JSON (or CSV with
--format csv / --series).  All randomness flows through explicit --seed
values and every computation is deterministic, so identical invocations
produce byte-identical output at any --threads setting.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import config as config_mod
from . import entropy as entropy_mod
from . import hyperbolic as hyp_mod
from . import sft as sft_mod
from . import suspension as sus_mod
from .action import critical_value as _critical_value
from .action import potential_table as _potential_table
from .perturbation import experiment_localization


def _load_matrix(args):
    if getattr(args, "golden_mean", False):
        return sft_mod.GOLDEN_MEAN
    if getattr(args, "full_shift", None):
        return sft_mod.full_shift(args.full_shift)
    if getattr(args, "matrix", None):
        return sft_mod.load_matrix(args.matrix)
    raise ValueError("no transition matrix given (--matrix/--golden-mean/--full-shift)")


def _emit(args, payload, rows=None, header=None):
    """payload: dict for JSON; rows/header: columnar data for CSV output."""
    if args.format == "csv":
        if rows is None:
            rows = sorted(payload.items())
            header = ("key", "value")
        text = ",".join(header) + "\n" + "\n".join(",".join(str(c) for c in r) for r in rows)
        text += "\n"
    else:
        text = json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj)}")


def cmd_sft_entropy(args):
    A = _load_matrix(args)
    _emit(args, {"m": A.m, "h": sft_mod.top_entropy(A)})


def cmd_sft_shortest_cycle(args):
    A = _load_matrix(args)
    orbit = sft_mod.shortest_cycle(A)
    _emit(args, {"period": orbit.period, "cycle": list(orbit.cycle),
                 "bq_bound": sft_mod.bq_bound(A)})


def cmd_sft_recode(args):
    A = _load_matrix(args)
    rec = sft_mod.block_recode(A, args.n)
    h_base = sft_mod.top_entropy(A)
    h_rec = sft_mod.top_entropy(rec.matrix)
    payload = {"n": args.n, "symbols": rec.matrix.m, "h_base": h_base,
               "h_recoded": h_rec, "inequality_ok": bool(h_rec >= args.n * h_base - 1e-9)}
    if args.matrix_out:
        sft_mod.save_matrix(rec.matrix, args.matrix_out, fmt="grid")
        payload["matrix_out"] = args.matrix_out
    _emit(args, payload)


def _load_lagrangian(args):
    with open(args.config) as fh:
        return config_mod.parse_lagrangian(fh.read())


def cmd_critical_value(args):
    L, _ = _load_lagrangian(args)
    c = _critical_value(L, tol=args.tol)
    _emit(args, {"c": c, "tol": args.tol})


def cmd_action_potential(args):
    L, _ = _load_lagrangian(args)
    ks = [float(v) for v in args.k.split(",")]
    xs = [[float(c) for c in p.split(";")] for p in args.x.split(",")]
    ys = [[float(c) for c in p.split(";")] for p in args.y.split(",")]
    pairs = [(x, y) for x in xs for y in ys]
    rows = _potential_table(L, ks, pairs, w_max=args.w_max)
    if args.format == "csv":
        _emit(args, {}, rows=rows, header=("k", "x", "y", "phi", "status"))
    else:
        payload = {"table": [dict(zip(("k", "x", "y", "phi", "status"), r)) for r in rows]}
        _emit(args, payload)


def cmd_suspend_integrate(args):
    A = _load_matrix(args)
    nu = sus_mod.parry_measure(A)
    tau = sus_mod.CeilingFunction.symbol_bonus(args.tau_base, args.tau_bonus, args.tau_symbol) \
        if args.tau_bonus else sus_mod.CeilingFunction.constant(args.tau_base)
    integ = sus_mod.lift_measure(nu, tau)
    fns = {
        "one": lambda w, s: 1.0,
        "height": lambda w, s: s,
        "symbol0": lambda w, s: float(w[0] == 0),
    }
    value = integ.integrate(fns[args.f], radius=1)
    _emit(args, {"f": args.f, "value": value, "mean_ceiling": integ.total_time})


def _cat_ensemble(args, backward=0):
    tm = hyp_mod.cat_map()
    rng = np.random.default_rng(args.seed)
    return tm, hyp_mod.orbit_ensemble(tm, args.orbits, args.steps, rng=rng,
                                      backward=backward)


def cmd_entropy_estimate(args):
    if args.ensemble:
        with open(args.ensemble) as fh:
            F = entropy_mod.ensemble_from_csv(fh.read())
    else:
        _, F = _cat_ensemble(args)
    T = args.T if args.T is not None else (F.n_steps - 1 - F.origin) * F.dt
    r = entropy_mod.spanning_count(F, T, args.delta)
    s = entropy_mod.separated_count(F, T, args.delta)
    h = entropy_mod.entropy_estimate(F, T, args.delta)
    payload = {"T": T, "delta": args.delta, "r": r, "s": s, "h_estimate": h}
    if args.series:
        pairs = entropy_mod.pair_survival_ladder(F, T, args.delta)
        covers = entropy_mod.count_ladder(F, T, args.delta)
        rows = [(t, covers[t], pairs[t]) for t in range(len(pairs))]
        _emit(args, payload, rows=rows, header=("t", "cover", "close_pairs"))
    else:
        _emit(args, payload)


def cmd_hexpansivity(args):
    _, F = _cat_ensemble(args, backward=args.horizon)
    probe = entropy_mod.h_expansivity_probe(F, args.eps, args.horizon, args.delta)
    sizes = [len(entropy_mod.gamma_set(i, F, args.eps, args.horizon))
             for i in range(F.n_orbits)]
    _emit(args, {"eps": args.eps, "horizon": args.horizon, "probe": probe,
                 "max_class_size": int(max(sizes))})


def cmd_shadow(args):
    entries = [int(v) for v in args.matrix_entries.split(",")]
    tm = hyp_mod.ToralAutomorphism(np.array(entries).reshape(2, 2))
    if args.orbit:
        with open(args.orbit) as fh:
            rows = [ln.split(",") for ln in fh.read().strip().splitlines()
                    if ln and not ln[0].isalpha()]
        pts = np.array([[float(r[-2]), float(r[-1])] for r in rows])
        orbits = [hyp_mod.PseudoOrbit(tm, pts)]
    else:
        rng = np.random.default_rng(args.seed)
        orbits = [hyp_mod.random_pseudo_orbit(tm, args.length, args.delta, rng)
                  for _ in range(args.count)]

    def solve(p):
        return hyp_mod.shadow(tm, p)

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(solve, orbits))
    else:
        results = [solve(p) for p in orbits]
    eps = [float(e) for _, e in results]
    delta = max(p.delta for p in orbits)
    _emit(args, {"Q": tm.shadowing_q, "delta": delta,
                 "eps_achieved": max(eps), "mean_eps": sum(eps) / len(eps),
                 "length": max(len(p) for p in orbits), "count": len(orbits),
                 "all_within_Q_delta": bool(max(e / p.delta if p.delta else 0.0
                                                for (_, e), p in zip(results, orbits))
                                            <= tm.shadowing_q)})


def cmd_canal_experiment(args):
    with open(args.config) as fh:
        text = fh.read()
    L, canal, econf = config_mod.parse_canal_experiment(
        text, base_dir=os.path.dirname(os.path.abspath(args.config)))
    report = experiment_localization(L, canal, econf)
    _emit(args, report)


def build_parser():
    parser = argparse.ArgumentParser(prog="torusdyn", description=__doc__)
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    def matrix_flags(p):
        p.add_argument("--matrix", default=None, help="0/1 grid or rle file")
        p.add_argument("--golden-mean", action="store_true")
        p.add_argument("--full-shift", type=int, default=None, metavar="M")

    p = sub.add_parser("sft-entropy", help="topological entropy of a subshift")
    matrix_flags(p); common(p, seed=False)
    p.set_defaults(func=cmd_sft_entropy)

    p = sub.add_parser("sft-shortest-cycle", help="minimum-period orbit and its bound")
    matrix_flags(p); common(p, seed=False)
    p.set_defaults(func=cmd_sft_shortest_cycle)

    p = sub.add_parser("sft-recode", help="n-block recoding Z^(n)")
    matrix_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--matrix-out", default=None)
    common(p, seed=False)
    p.set_defaults(func=cmd_sft_recode)

    p = sub.add_parser("critical-value", help="Mane critical value of a Lagrangian config")
    p.add_argument("--config", required=True)
    p.add_argument("--tol", type=float, default=1e-2)
    common(p, seed=False)
    p.set_defaults(func=cmd_critical_value)

    p = sub.add_parser("action-potential", help="potential table over (k, x, y)")
    p.add_argument("--config", required=True)
    p.add_argument("--k", required=True, help="comma-separated k values")
    p.add_argument("--x", required=True, help="points: coords ; -separated, points , -separated")
    p.add_argument("--y", required=True)
    p.add_argument("--w-max", type=int, default=3)
    common(p, seed=False)
    p.set_defaults(func=cmd_action_potential)

    p = sub.add_parser("suspend-integrate", help="integrate against a lifted measure")
    matrix_flags(p)
    p.add_argument("--tau-base", type=float, default=1.0)
    p.add_argument("--tau-bonus", type=float, default=0.0)
    p.add_argument("--tau-symbol", type=int, default=1)
    p.add_argument("--f", choices=("one", "height", "symbol0"), default="height")
    common(p, seed=False)
    p.set_defaults(func=cmd_suspend_integrate)

    p = sub.add_parser("entropy-estimate", help="spanning/separated counts and rate")
    p.add_argument("--ensemble", default=None, help="orbit CSV (orbit,step,coords)")
    p.add_argument("--orbits", type=int, default=1000)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--series", action="store_true")
    common(p)
    p.set_defaults(func=cmd_entropy_estimate)

    p = sub.add_parser("hexpansivity", help="entropy of eps-indistinguishability classes")
    p.add_argument("--orbits", type=int, default=300)
    p.add_argument("--steps", type=int, default=40)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--horizon", type=int, default=30)
    p.add_argument("--delta", type=float, default=0.05)
    common(p)
    p.set_defaults(func=cmd_hexpansivity)

    p = sub.add_parser("shadow", help="shadow pseudo-orbits of a toral automorphism")
    p.add_argument("--matrix-entries", default="2,1,1,1")
    p.add_argument("--delta", type=float, default=1e-4)
    p.add_argument("--length", "--len", type=int, default=10000)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--orbit", default=None, help="pseudo-orbit CSV (index,x1,x2)")
    common(p)
    p.set_defaults(func=cmd_shadow)

    p = sub.add_parser("canal-experiment", help="perturb by a canal and re-estimate")
    p.add_argument("--config", required=True)
    common(p)
    p.set_defaults(func=cmd_canal_experiment)

    return parser


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    try:
        args.func(args)
    except (ValueError, RuntimeError, FloatingPointError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return 0


def main():
    sys.exit(run())
