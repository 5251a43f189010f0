"""Command-line entry point: ``latdec <command> ...``.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from latdec.errors import LatdecError
from latdec.mc import entropy_seed


def _seed(args) -> int:
    if args.seed is None:
        args.seed = entropy_seed()
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def _merge(args, keys, defaults):
    """Config file (if any) under explicit flags; flags left at None fall through."""
    cfg = dict(defaults)
    if getattr(args, "config", None):
        cfg.update(json.loads(Path(args.config).read_text()))
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    return cfg


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_catalog(args):
    from latdec.lattice import resolve

    lat = resolve(args.name)
    info = {
        "name": lat.name, "n": lat.n, "det": lat.det, "d_min": lat.d_min, "rho": lat.rho,
        "tau": lat.tau, "gamma": lat.gamma, "gram": lat.gram.round(10).tolist(),
    }
    if args.json:
        print(json.dumps(info, indent=1))
        return
    for k in ("name", "n", "det", "d_min", "rho", "tau", "gamma"):
        v = info[k]
        print(f"{k:<6} {v:.6g}" if isinstance(v, float) else f"{k:<6} {v}")
    print("gram")
    for row in info["gram"]:
        print("  " + " ".join(f"{x + 0.0:8.4g}" for x in row))


def cmd_check_vr(args):
    from latdec.lattice import resolve
    from latdec.vr import check_vr_exact, check_vr_monte_carlo

    lat = resolve(args.name)
    if args.mode == "monte-carlo":
        seed = _seed(args)
        cps = [c for c in (10**4, 10**5, 10**6, 4 * 10**6, 10**7) if c < args.samples] + [args.samples]
        rep = check_vr_monte_carlo(lat, args.samples, seed, args.workers, checkpoints=cps)
    else:
        rep = check_vr_exact(lat)
    print(rep.summary())
    if args.json:
        data = json.loads(rep.to_json())
        data["config"] = {k: v for k, v in vars(args).items() if k != "func"}
        _write(args.json, json.dumps(data, indent=1) + "\n")


def cmd_synth_hld(args):
    from latdec.hld import hld_synthesize
    from latdec.lattice import resolve

    lat = resolve(args.name)
    hld = hld_synthesize(lat, epsilon=args.epsilon)
    print(f"hyperplanes: {len(hld.pool)}")
    for e in hld.eqs:
        print(e.render())
    if args.out:
        data = hld.to_json()
        data["config"] = {"lattice": lat.to_json(), "epsilon": args.epsilon}
        Path(args.out).write_text(json.dumps(data, indent=1))


SIM_KEYS = ("lattice", "decoder", "delta_db", "target_errors", "max_trials", "seed", "workers",
            "block_size", "box")


def _run_sim(cfg_dict, out):
    from latdec.sim import SimConfig, run_sim

    cfg = SimConfig(**cfg_dict)
    res = run_sim(cfg, progress=lambda p: print(
        f"delta={p.delta_db:g} dB  trials={p.trials}  errors={p.errors}  per={p.per:.3e}", file=sys.stderr))
    _write(out, res.to_csv())


def cmd_simulate(args):
    cfg = _merge(args, SIM_KEYS, {})
    if "seed" not in cfg:
        args.seed = None
        cfg["seed"] = _seed(args)
    _run_sim(cfg, args.out)


def cmd_eval(args):
    args.decoder = f"net:{args.net}"
    cmd_simulate(args)


TRAIN_KEYS = ("lattice", "arch", "hidden", "case", "samples", "lambda_l1", "lr", "momentum",
              "batch_size", "epochs", "delta_range", "seed")
TRAIN_DEFAULTS = {"arch": "nld2", "hidden": [200, 200, 200], "case": 1, "samples": 100_000,
                  "lambda_l1": 0.0, "lr": 0.5, "momentum": 0.9, "batch_size": 128, "epochs": 10,
                  "delta_range": [0.0, 4.0]}


def cmd_train(args):
    from latdec.hld import hld_synthesize
    from latdec.learn import TrainConfig, generate_dataset, nld3_from_hld, train, write_log_csv
    from latdec.lattice import resolve
    from latdec.nets import mlp

    c = _merge(args, TRAIN_KEYS, TRAIN_DEFAULTS)
    if "lattice" not in c:
        raise SystemExit("train: --lattice is required (flag or config file)")
    if "seed" not in c:
        args.seed = None
        c["seed"] = _seed(args)
    lat = resolve(c["lattice"])
    data = generate_dataset(lat, c["samples"], tuple(c["delta_range"]), seed=c["seed"])
    if c["arch"] == "nld3":
        net = nld3_from_hld(hld_synthesize(lat), case=c["case"])
        frozen = [True, False, False]
    else:
        net = mlp([lat.n, *c["hidden"], lat.n], rng=c["seed"])
        frozen = None
    cfg = TrainConfig(
        sizes=[net.n_in] + [l.w.shape[1] for l in net.layers], activations=[l.act for l in net.layers],
        lambda_l1=c["lambda_l1"], lr=c["lr"], momentum=c["momentum"], batch_size=c["batch_size"],
        epochs=c["epochs"], delta_range=tuple(c["delta_range"]), seed=c["seed"], frozen=frozen,
    )
    net, log = train(cfg, data, net, verbose=args.verbose)
    net.meta["config"] = c
    if data.relabeled:
        print(f"relabeled {data.relabeled} samples outside the corner set", file=sys.stderr)
    net.save(args.out)
    if args.log:
        write_log_csv(log, args.log)
    print(f"final loss {log[-1]['loss']:.6g}" if log else "no epochs run")


def cmd_prune(args):
    from latdec.learn import generate_dataset, prune
    from latdec.lattice import resolve
    from latdec.nets import FeedForwardNet

    net = FeedForwardNet.load(args.net)
    data = None
    if args.strategy == "saliency":
        if not args.lattice:
            raise SystemExit("prune: saliency needs --lattice for calibration data")
        data = generate_dataset(resolve(args.lattice), 4096, seed=_seed(args))
    out = prune(net, args.layer, args.count, args.strategy, data)
    out.meta["prune"] = {"layer": args.layer, "count": args.count, "strategy": args.strategy,
                         "lattice": args.lattice, "seed": args.seed}
    out.save(args.out)


def cmd_bound(args):
    from latdec.lattice import resolve
    from latdec.vr import BoundInput, check_vr_monte_carlo, lemma_bound

    lat = resolve(args.name)
    if args.report:
        from latdec.vr import VRReport

        data = json.loads(Path(args.report).read_text())
        data.pop("config", None)
        rep = VRReport(**data)
    else:
        rep = check_vr_monte_carlo(lat, args.samples, _seed(args))
    print("delta_db,pe_opt_term,pe_O_term,first_shell_term,truncation")
    for d in args.delta_db:
        b = lemma_bound(lat, rep, BoundInput.from_db(lat, d), args.theta_terms)
        print(f"{d:g},{b.pe_opt_term:.6e},{b.pe_O_term:.6e},{b.first_shell_term:.6e},{b.truncation:.3e}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latdec", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("catalog", help="print lattice constants")
    s.add_argument("name", help="catalog name (A2, A3, D4, E6, E8, Z<n>, ...) or lattice .json")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("check-vr", help="Voronoi-reduction check")
    s.add_argument("name")
    s.add_argument("--mode", choices=["monte-carlo", "lp-exact"], default="monte-carlo")
    s.add_argument("--samples", type=int, default=10**6)
    s.add_argument("--seed", type=int)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--json", metavar="PATH", help="write the full report ('-' for stdout)")
    s.set_defaults(func=cmd_check_vr)

    s = sub.add_parser("synth-hld", help="synthesize the hyperplane logical decoder")
    s.add_argument("name")
    s.add_argument("--epsilon", type=float, default=1e-4)
    s.add_argument("--out")
    s.set_defaults(func=cmd_synth_hld)

    def sim_flags(s):
        s.add_argument("--config", help="JSON file with simulation keys; flags override it")
        s.add_argument("--lattice")
        s.add_argument("--delta-db", dest="delta_db", type=float, nargs="+")
        s.add_argument("--target-errors", dest="target_errors", type=int)
        s.add_argument("--max-trials", dest="max_trials", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--workers", type=int)
        s.add_argument("--block-size", dest="block_size", type=int)
        s.add_argument("--box", type=int)
        s.add_argument("--out", default="-")

    s = sub.add_parser("simulate", help="PER versus Delta, CSV output")
    sim_flags(s)
    s.add_argument("--decoder", help="mld, hld, net:<path> or hld:<path>")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("eval", help="simulate a trained network")
    s.add_argument("net")
    sim_flags(s)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("train", help="train an NLD2 or NLD3 network")
    s.add_argument("--config")
    s.add_argument("--lattice")
    s.add_argument("--arch", choices=["nld2", "nld3"])
    s.add_argument("--hidden", type=int, nargs="+")
    s.add_argument("--case", type=int, choices=[1, 2])
    s.add_argument("--samples", type=int)
    s.add_argument("--lambda-l1", dest="lambda_l1", type=float)
    s.add_argument("--lr", type=float)
    s.add_argument("--momentum", type=float)
    s.add_argument("--batch-size", dest="batch_size", type=int)
    s.add_argument("--epochs", type=int)
    s.add_argument("--delta-range", dest="delta_range", type=float, nargs=2)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True)
    s.add_argument("--log", help="training log CSV")
    s.add_argument("--verbose", action="store_true")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("prune", help="remove edges from a trained network")
    s.add_argument("net")
    s.add_argument("--layer", type=int, required=True)
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--strategy", choices=["magnitude", "saliency"], default="magnitude")
    s.add_argument("--lattice", help="needed for saliency calibration data")
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_prune)

    s = sub.add_parser("bound", help="evaluate the quasi-VR error bound")
    s.add_argument("name")
    s.add_argument("--delta-db", dest="delta_db", type=float, nargs="+", default=[0.0])
    s.add_argument("--theta-terms", dest="theta_terms", type=int, default=8)
    s.add_argument("--samples", type=int, default=10**6, help="Monte Carlo samples for vol(O) and d_OC")
    s.add_argument("--report", help="reuse a check-vr JSON report instead of sampling")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_bound)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except LatdecError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except SystemExit as e:
        if isinstance(e.code, str):
            print(e.code, file=sys.stderr)
            return 2
        raise
    return 0


if __name__ == "__main__":
    sys.exit(main())
