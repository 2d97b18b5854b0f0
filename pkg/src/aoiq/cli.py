"""Command-line front end: analyze / simulate / optimize workflows plus
presets that regenerate the reference tables and figure data.

Output is CSV (default) or JSON (--json).  Exit codes: 0 success,
2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import analytic, optimize, simulate
from .analytic import GammaParam, ServerLoad, SystemConfig

EXIT_INVALID = 2
EXIT_NUMERICAL = 3

TABLE1_LAMBDAS = [8.0, 10.0, 12.0, 16.0, 20.0, 24.0, 28.0, 32.0]
TABLE1_MU = 20.0
TABLE2_MUS = (25.0, 15.0)
TABLE2_PAIRS = [
    (20.735, 0.465),
    (19.235, 1.965),
    (17.735, 3.465),
    (16.235, 4.965),
    (14.735, 6.465),
    (13.235, 7.965),
    (11.735, 9.465),
    (10.235, 10.965),
    (8.735, 12.465),
    (7.235, 13.965),
]


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ValueError(f"cannot parse float list {text!r}") from exc


def _load_config_file(path: str) -> dict[str, str]:
    """Simple key=value file; '#' starts a comment."""
    out: dict[str, str] = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line (want key=value): {line!r}")
            key, val = line.split("=", 1)
            out[key.strip().replace("-", "_")] = val.strip()
    return out


def _apply_config_file(args: argparse.Namespace, argv: list[str]) -> None:
    """Precedence: explicit flags > config file > defaults."""
    if not getattr(args, "config", None):
        return
    file_vals = _load_config_file(args.config)
    for key, raw in file_vals.items():
        if not hasattr(args, key) or key in ("func", "command"):
            continue
        flag = "--" + ("lambda" if key == "lam" else key.replace("_", "-"))
        if any(tok == flag or tok.startswith(flag + "=") for tok in argv):
            continue  # explicit flag wins
        current = getattr(args, key)
        if isinstance(current, bool):
            setattr(args, key, raw.lower() in ("1", "true", "yes"))
        elif isinstance(current, int):
            setattr(args, key, int(raw))
        elif isinstance(current, float):
            setattr(args, key, float(raw))
        else:
            setattr(args, key, raw)


def _emit(rows: list[dict], columns: list[str], args: argparse.Namespace) -> None:
    if args.json:
        text = json.dumps(rows, indent=2)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(columns)
        for row in rows:
            writer.writerow(
                [_fmt(row[c]) if isinstance(row[c], float) else row[c] for c in columns]
            )
        text = buf.getvalue().rstrip("\n")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _system_from_args(args: argparse.Namespace) -> SystemConfig:
    if args.mus is None:
        raise ValueError("--mus is required")
    mus = _parse_floats(args.mus)
    if args.alphas is not None:
        alphas = _parse_floats(args.alphas)
    else:
        alphas = [1.0 / len(mus)] * len(mus)
    if args.lam is None:
        raise ValueError("--lambda is required")
    return SystemConfig(arrival_rate=args.lam, alphas=tuple(alphas), mus=tuple(mus))


def cmd_analyze(args: argparse.Namespace) -> None:
    sysc = _system_from_args(args)
    if not sysc.is_stable():
        raise ValueError("unstable server: some alpha_i * lambda >= mu_i")
    loads = sysc.active_loads()
    exact = analytic.exact_mean(loads)
    approx = analytic.approx_mean_n([analytic.theta_of(ld) for ld in loads])
    rows = [
        {
            "exact_aoi": exact,
            "approx_aoi": approx,
            "rhos": "|".join(_fmt(ld.rho) for ld in loads),
            "single_means": "|".join(_fmt(analytic.single_server_mean(ld)) for ld in loads),
        }
    ]
    _emit(rows, ["exact_aoi", "approx_aoi", "rhos", "single_means"], args)


def cmd_simulate(args: argparse.Namespace) -> None:
    sysc = _system_from_args(args)
    cfg = simulate.SimConfig(
        system=sysc, packets=args.packets, seed=args.seed,
        warmup_fraction=args.warmup,
    )
    if args.reps > 1:
        mean, stderr = simulate.replicate(cfg, args.reps)
        rows = [{"mean_aoi": mean, "stderr": stderr, "reps": args.reps}]
        _emit(rows, ["mean_aoi", "stderr", "reps"], args)
        return
    result = simulate.run(cfg)
    rows = [
        {
            "mean_aoi": result.mean_aoi,
            "per_server": "|".join(_fmt(v) for v in result.per_server_mean_aoi),
            "packets": result.packets_served,
            "sim_time": result.sim_time,
            "unstable": int(result.unstable),
        }
    ]
    _emit(rows, ["mean_aoi", "per_server", "packets", "sim_time", "unstable"], args)


def cmd_optimize(args: argparse.Namespace) -> None:
    mus = _parse_floats(args.mus)
    if args.mode == "approx":
        sol = optimize.optimal_routing_approx(mus)
    else:
        sol = optimize.minimize_exact(mus, budget=args.budget)
    rows = [
        {
            "lambda": sol.arrival_rate,
            "alphas": "|".join(_fmt(a) for a in sol.alphas),
            "rhos": "|".join(_fmt(r) for r in sol.per_server_rho),
            "predicted_aoi": sol.predicted_aoi,
        }
    ]
    _emit(rows, ["lambda", "alphas", "rhos", "predicted_aoi"], args)


def table1_rows(seed: int, packets: int) -> list[dict]:
    rows = []
    for lam in TABLE1_LAMBDAS:
        load = ServerLoad(rho=lam / (2.0 * TABLE1_MU), mu=TABLE1_MU)
        theta = analytic.theta_of(load)
        approx = analytic.approx_mean_two(theta, theta)
        sysc = SystemConfig(arrival_rate=lam, alphas=(0.5, 0.5), mus=(TABLE1_MU, TABLE1_MU))
        result = simulate.run(simulate.SimConfig(system=sysc, packets=packets, seed=seed))
        # percent error from the emitted precision so the column round-trips
        empirical = float(_fmt(result.mean_aoi))
        approx = float(_fmt(approx))
        rows.append(
            {
                "lambda": lam,
                "empirical_aoi": empirical,
                "approx_aoi": approx,
                "pct_error": 100.0 * abs(empirical - approx) / empirical,
            }
        )
    return rows


def cmd_table1(args: argparse.Namespace) -> None:
    rows = table1_rows(args.seed, args.packets)
    _emit(rows, ["lambda", "empirical_aoi", "approx_aoi", "pct_error"], args)


def table2_rows() -> list[dict]:
    mu1, mu2 = TABLE2_MUS
    rows = []
    for lam1, lam2 in TABLE2_PAIRS:
        l1 = ServerLoad(rho=lam1 / mu1, mu=mu1)
        l2 = ServerLoad(rho=lam2 / mu2, mu=mu2)
        actual = float(_fmt(analytic.exact_mean([l1, l2])))
        approx = float(
            _fmt(analytic.approx_mean_two(analytic.theta_of(l1), analytic.theta_of(l2)))
        )
        rows.append(
            {
                "lambda1": lam1,
                "lambda2": lam2,
                "actual_aoi": actual,
                "approx_aoi": approx,
                "pct_error": 100.0 * abs(actual - approx) / actual,
            }
        )
    return rows


def cmd_table2(args: argparse.Namespace) -> None:
    _emit(table2_rows(), ["lambda1", "lambda2", "actual_aoi", "approx_aoi", "pct_error"], args)


def fig3_points(n_max: int) -> list[tuple[int, float]]:
    """Minimum exact AoI of n identical unit-rate servers over a common rho."""
    if not (1 <= n_max <= 10):
        raise ValueError("n_max must be in [1, 10]")
    points = []
    for n in range(1, n_max + 1):
        def objective(rho: float, n=n) -> float:
            return analytic.exact_mean([ServerLoad(rho=rho, mu=1.0)] * n)

        best = optimize._golden_min(objective, optimize.RHO_MIN, optimize.RHO_MAX)
        points.append((n, objective(best)))
    return points


def cmd_fig3(args: argparse.Namespace) -> None:
    rows = [{"n": n, "min_aoi": v} for n, v in fig3_points(args.n_max)]
    _emit(rows, ["n", "min_aoi"], args)


def cmd_dist_compare(args: argparse.Namespace) -> None:
    if args.lam is None or args.mu is None:
        raise ValueError("--lambda and --mu are required")
    if not (0.0 < args.lam < args.mu):
        raise ValueError("unstable server: need 0 < lambda < mu")
    load = ServerLoad(rho=args.lam / args.mu, mu=args.mu)
    theta = analytic.theta_of(load)
    exact_pdf = analytic.single_server_tail(load).derivative()
    sysc = SystemConfig(arrival_rate=args.lam, alphas=(1.0,), mus=(args.mu,))
    x_max = 10.0 * analytic.single_server_mean(load)
    result = simulate.run(
        simulate.SimConfig(
            system=sysc, packets=args.samples, seed=args.seed,
            histogram_bins=args.grid, histogram_range=x_max,
        )
    )
    total = result.histogram.sum()
    bin_w = result.histogram_edges[1] - result.histogram_edges[0]
    rows = []
    for k in range(args.grid):
        x = 0.5 * (result.histogram_edges[k] + result.histogram_edges[k + 1])
        rows.append(
            {
                "x": float(x),
                "exact_pdf": -exact_pdf(x),
                "gamma_pdf": analytic.gamma_pdf(theta, x),
                "empirical_density": float(result.histogram[k]) / (total * bin_w),
            }
        )
    _emit(rows, ["x", "exact_pdf", "gamma_pdf", "empirical_density"], args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aoiq",
        description="Average age-of-information analysis for parallel FCFS queues",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--json", action="store_true", help="emit JSON instead of CSV")
        p.add_argument("--out", default=None, help="write output to a file")
        p.add_argument("--config", default=None, help="key=value config file")

    p = sub.add_parser("analyze", help="closed-form AoI of a configuration")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--alphas", default=None, help="comma-separated routing probabilities")
    p.add_argument("--mus", default=None, help="comma-separated service rates")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo AoI estimate")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--alphas", default=None)
    p.add_argument("--mus", default=None)
    p.add_argument("--packets", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--warmup", type=float, default=0.1)
    p.add_argument("--reps", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="optimal arrival rate and routing")
    p.add_argument("--mus", required=True)
    p.add_argument("--mode", choices=("approx", "exact"), default="approx")
    p.add_argument("--budget", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("table1", help="symmetric two-server sweep (empirical vs approximate)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--packets", type=int, default=1_000_000)
    common(p)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("table2", help="asymmetric two-server sweep (exact vs approximate)")
    common(p)
    p.set_defaults(func=cmd_table2)

    p = sub.add_parser("fig3", help="minimum AoI vs number of identical servers")
    p.add_argument("--n-max", dest="n_max", type=int, default=7)
    common(p)
    p.set_defaults(func=cmd_fig3)

    p = sub.add_parser("dist-compare", help="exact vs gamma vs empirical AoI density")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--grid", type=int, default=100)
    common(p)
    p.set_defaults(func=cmd_dist_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args, list(argv))
        args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
