"""E6 quasi-VR statistics: offender fraction, d_OC^2/rho^2 trace, exact certification and the bound ratio."""

import argparse
import json

from latdec.lattice import catalog_load
from latdec.vr import BoundInput, check_vr_exact, check_vr_monte_carlo, lemma_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=4_000_000)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--exact", action="store_true", help="also run the LP certification")
    ap.add_argument("--out", default="e6_report.json")
    args = ap.parse_args()

    lat = catalog_load("E6")
    cps = [c for c in (10**5, 2.5 * 10**5, 5 * 10**5, 10**6, 2 * 10**6, 4 * 10**6, 10**7) if c < args.samples]
    rep = check_vr_monte_carlo(lat, args.samples, args.seed, args.workers, checkpoints=[int(c) for c in cps] + [args.samples])
    print(rep.summary())
    print("d_OC^2/rho^2 by sample count:")
    for n, v in rep.d_oc_trace:
        print(f"  {n:>10}  {v:.4f}")
    for ddb in (0.0, 1.0, 2.0, 3.0):
        b = lemma_bound(lat, rep, BoundInput.from_db(lat, ddb))
        print(f"delta {ddb:g} dB: pe_opt {b.pe_opt_term:.3e}  pe_O {b.pe_O_term:.3e}  "
              f"pe_O / first shell {b.pe_O_term / b.first_shell_term:.3e}")
    out = json.loads(rep.to_json())
    if args.exact:
        ex = check_vr_exact(lat)
        print(ex.summary())
        out["exact"] = {"candidates": ex.candidates, "interior": ex.interior, "contact": len(ex.contact)}
    out["config"] = vars(args)
    with open(args.out, "w") as fh:
        json.dump(out, fh, indent=1)


if __name__ == "__main__":
    main()
