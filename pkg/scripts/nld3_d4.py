"""NLD3 on D4 (simple-root basis): L1 sweep, case 1 vs case 2 first layer, and edge pruning."""

import argparse
import csv

import numpy as np

from latdec.hld import hld_synthesize, term_units
from latdec.lattice import catalog_load
from latdec.learn import (
    TrainConfig, active_neuron_count, decode_with_net, generate_dataset, nld3_from_hld, nld3_l1_sweep, prune,
    train, write_log_csv,
)
from latdec.sim import SimConfig, delta_at_per, register, run_sim, unregister


def per_curve(name, net, grid, seed):
    if net is None:
        dec = "mld"
    else:
        dec = "nld3-script"
        unregister(dec)
        register(dec, lambda lat, Y: decode_with_net(net, Y))
    return run_sim(SimConfig(lattice=name, decoder=dec, delta_db=grid, target_errors=200,
                             max_trials=2_000_000, seed=seed)).points


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lattice", default="D4-root")
    ap.add_argument("--lambdas", type=float, nargs="+", default=[0.0, 5e-4, 1e-3, 1.5e-3, 2e-3, 3e-3])
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default="nld3_d4.csv")
    args = ap.parse_args()

    lat = catalog_load(args.lattice)
    h = hld_synthesize(lat)
    units = term_units(h, 0)
    data = generate_dataset(lat, args.samples, (0.0, 6.0), seed=args.seed)
    grid = list(np.arange(2.0, 8.5, 1.0))
    rows = []

    def record(label, lam, net, active):
        pts = per_curve(args.lattice, net, grid, args.seed + 100)
        d = delta_at_per(pts, 1e-3)
        print(f"{label:<24} lambda={lam:<8g} active={active}  delta@1e-3={d}  "
              + " ".join(f"{p.per:.2e}" for p in pts))
        rows.extend([label, lam, active, p.delta_db, p.per] for p in pts)

    record("mld", 0, None, "-")
    for case in (1, 2):
        for r in nld3_l1_sweep(h, data, args.lambdas, case=case, seed=args.seed):
            record(f"case{case}", r.lambda_l1, r.net, r.active)
            write_log_csv(r.log, f"nld3_case{case}_lambda{r.lambda_l1:g}.log.csv")

    # pruning three hyperplane-to-AND edges of the literal-restricted net
    base = nld3_from_hld(h, dense_and=False)
    cfg = TrainConfig(sizes=[lat.n] + [l.w.shape[1] for l in base.layers], activations=[l.act for l in base.layers],
                      epochs=4, frozen=[True, False, False], seed=args.seed)
    net, _ = train(cfg, data, base)
    record("literal-net", 0, net, active_neuron_count(net, 1, 1e-3, units))
    for strategy in ("magnitude", "saliency"):
        pruned = prune(net, 1, 3, strategy, data)
        record(f"pruned-{strategy}", 0, pruned, active_neuron_count(pruned, 1, 1e-3, units))

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["run", "lambda_l1", "active_z1_and", "delta_db", "per"])
        w.writerows(rows)


if __name__ == "__main__":
    main()
