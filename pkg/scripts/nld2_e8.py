"""NLD2 on E8: the 8-200-200-200-8 sigmoid network, its parameter count and PER against MLD."""

import argparse

from latdec.lattice import catalog_load
from latdec.learn import TrainConfig, complexity_report, decode_with_net, generate_dataset, nld2, train, write_log_csv
from latdec.sim import SimConfig, register, run_sim


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=400_000)
    ap.add_argument("--epochs", type=int, default=20)
    ap.add_argument("--lr", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=2)
    ap.add_argument("--out", default="nld2_e8.json")
    args = ap.parse_args()

    lat = catalog_load("E8")
    net = nld2(8, seed=args.seed)
    rep = complexity_report(net, 8)
    print(f"W = {rep['W']}, log2(W)/n = {rep['ratio_1dp']}")
    data = generate_dataset(lat, args.samples, (0.0, 6.0), seed=args.seed)
    cfg = TrainConfig(sizes=[8, 200, 200, 200, 8], epochs=args.epochs, lr=args.lr, seed=args.seed)
    net, log = train(cfg, data, net, verbose=True)
    net.save(args.out)
    write_log_csv(log, args.out.replace(".json", ".log.csv"))
    register("nld2", lambda lat_, Y: decode_with_net(net, Y))
    for dec in ("mld", "nld2"):
        res = run_sim(SimConfig(lattice="E8", decoder=dec, delta_db=[0.0, 1.0, 2.0, 3.0, 4.0],
                                target_errors=200, max_trials=2_000_000, seed=4))
        print(dec, " ".join(f"{p.delta_db:g}dB:{p.per:.3e}" for p in res.points))


if __name__ == "__main__":
    main()
