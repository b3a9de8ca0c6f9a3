"""Command-line driver for the experiment suite.

Exit codes: 0 success, 2 blow-up, 3 assertion failure (the entropy
comparison inequality). All files go under --out.
"""

import argparse
import json
import os
import sys

PROBLEM_COMMANDS = ("shocktube1", "shocktube2", "shuosher", "smoothwave")


def _add_common(parser):
    parser.add_argument("--cells", type=int, default=None,
                        help="number of mesh cells")
    parser.add_argument("--order", type=int, default=3,
                        help="polynomial degree p")
    parser.add_argument("--t-end", type=float, default=None,
                        help="override the problem end time")
    parser.add_argument("--cfl", type=float, default=None,
                        help="override the CFL number 0.1/(p^2+p)")
    parser.add_argument("--scheme", choices=("ssprk43", "rk8"),
                        default="ssprk43")
    parser.add_argument("--no-truncation", action="store_true",
                        help="disable the reduced-order predictor branch")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--samples", type=int, default=50,
                        help="snapshot/diagnostic sample count")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for randomized property drivers")
    parser.add_argument("--threads", type=int, default=1,
                        help="BLAS thread cap (1 = bit-reproducible)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="entropydg",
        description="Entropy-rate corrected DG solver for the 1D Euler equations")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in PROBLEM_COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} problem")
        _add_common(p)
    p = sub.add_parser("reference", help="first-order Lax-Friedrichs reference run")
    _add_common(p)
    p.add_argument("--problem", choices=PROBLEM_COMMANDS, default="shocktube1")
    p = sub.add_parser("compare-entropy",
                       help="DG vs reference total-entropy comparison")
    _add_common(p)
    p.add_argument("--problem", choices=PROBLEM_COMMANDS, default="shocktube1")
    p.add_argument("--ref-cells", type=int, default=3000)
    p = sub.add_parser("convergence", help="smooth-wave convergence study")
    _add_common(p)
    p.add_argument("--n-list", default="10,15,20,25,30,40,50",
                   help="comma-separated cell counts")
    p = sub.add_parser("maxdt", help="maximal stable time-step multiplier search")
    _add_common(p)
    p.add_argument("--problem", choices=PROBLEM_COMMANDS, default="shocktube1")
    return parser


def _make_config(args, problem):
    from .problems import make_config
    overrides = dict(degree=args.order, scheme=args.scheme,
                     out_dir=args.out, fmt=args.format,
                     samples=args.samples, seed=args.seed,
                     threads=args.threads)
    if args.cells is not None:
        overrides["n_cells"] = args.cells
    if args.t_end is not None:
        overrides["t_end"] = args.t_end
    if args.cfl is not None:
        overrides["cfl"] = args.cfl
    if args.no_truncation:
        overrides["truncate"] = False
    if getattr(args, "ref_cells", None) is not None:
        overrides["ref_cells"] = args.ref_cells
    return make_config(problem, **overrides)


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.threads and args.threads > 0:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ.setdefault(var, str(args.threads))
    from . import runner
    from .output import table_path, write_table

    if args.command in PROBLEM_COMMANDS:
        config = _make_config(args, args.command)
        out = runner.run_problem(config)
        print(f"{args.command}: {out.status} at t={out.final_state.t:.6g}, "
              f"outputs in {config.out_dir}")
        return 0 if out.status == "ok" else 2

    if args.command == "reference":
        config = _make_config(args, args.problem)
        n_cells = args.cells if args.cells is not None else 30000
        times, entropies, final = runner.reference_run(
            config, n_cells=n_cells, record_every=max(1, n_cells // 1000))
        os.makedirs(config.out_dir, exist_ok=True)
        rows = [(t, e, 0.0, 0.0) for t, e in zip(times, entropies)]
        write_table(table_path(config.out_dir, "entropy", config.fmt),
                    "entropy", rows, config.fmt)
        import numpy as np
        x = config.x_left + final.dx * (0.5 + np.arange(final.values.shape[0]))
        snap = [(xi, *u) for xi, u in zip(x, final.values)]
        write_table(table_path(config.out_dir, "snapshot_final", config.fmt),
                    "snapshot", snap, config.fmt)
        print(f"reference {args.problem}: E(0)={entropies[0]:.6g} -> "
              f"E({final.t:.4g})={entropies[-1]:.6g}")
        return 0

    if args.command == "compare-entropy":
        config = _make_config(args, args.problem)
        try:
            result = runner.entropy_comparison(config)
        except runner.BlowUpError as exc:
            print(f"compare-entropy: blow-up at t={exc.t:.6g}: {exc}")
            return 2
        print(f"compare-entropy {args.problem}: "
              f"{'ok' if result['passed'] else 'VIOLATED'} "
              f"(max excess {result['max_excess']:.3e}, tol {result['tol']:.3e})")
        return 0 if result["passed"] else 3

    if args.command == "convergence":
        config = _make_config(args, "smoothwave")
        n_list = [int(s) for s in args.n_list.split(",") if s]
        rows = runner.convergence_study(config, n_list)
        for n, l1, l2, o1, o2 in rows:
            print(f"N={n:4d}  L1={l1:.6e}  L2={l2:.6e}  "
                  f"order_L1={o1:5.2f}  order_L2={o2:5.2f}")
        return 0

    if args.command == "maxdt":
        config = _make_config(args, args.problem)
        result = runner.max_timestep_search(config)
        os.makedirs(config.out_dir, exist_ok=True)
        with open(os.path.join(config.out_dir, "maxdt.json"), "w",
                  encoding="utf-8") as fh:
            json.dump(result, fh, indent=2)
        print(f"maxdt {args.problem}: stable multiplier "
              f"{result.get('multiplier')}, first unstable "
              f"{result.get('unstable')}")
        return 0

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
