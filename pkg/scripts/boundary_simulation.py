"""Empirical check of the stability boundary with the tandem-queue simulator.

Probes a ladder of load factors around the analytic supremum and writes the
classification plus drift diagnostics; factors near 1.0 take the longest.
"""

import argparse
import csv
import pathlib
import time

import searelay as sr


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--preset", default="blue")
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--l", type=float, default=500.0)
    ap.add_argument("--factors", default="0.8,0.9,0.95,0.99,1.01,1.05,1.1,1.2")
    ap.add_argument("--horizon-packets", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    rate = sr.shannon_rate_function(sr.preset(args.preset))
    res = sr.solve(rate, args.n, args.l)
    factors = sorted(float(v) for v in args.factors.split(","))
    grid = [f * res.q_sup for f in factors]

    t0 = time.perf_counter()
    probe = sr.stability_probe(res.placement, rate, grid,
                               horizon_packets=args.horizon_packets,
                               seed=args.seed)
    dt = time.perf_counter() - t0
    print(f"probed {len(grid)} loads in {dt:.1f} s; "
          f"stable up to {probe.q_stable / res.q_sup:.3f} x q_sup, "
          f"unstable from {probe.q_unstable / res.q_sup:.3f} x")

    outdir = pathlib.Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"boundary_{args.preset}_n{args.n}.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["factor", "q", "stable", "total_drift_slope",
                    "end_backlog"])
        for f, p in zip(factors, probe.points):
            w.writerow([f, f"{p.q:.9g}", int(p.stable),
                        f"{p.total_drift_slope:.9g}", f"{p.end_backlog:.9g}"])
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
