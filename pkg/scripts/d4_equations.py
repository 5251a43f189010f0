"""Synthesized z1 equations for the two D4 bases, with term sizes and oracle agreement."""

import numpy as np

from latdec.exact import closest_z
from latdec.hld import hld_decode_z, hld_synthesize
from latdec.lattice import catalog_load

for name in ("D4", "D4-root"):
    lat = catalog_load(name)
    h = hld_synthesize(lat)
    print(f"{name}: Gram {lat.gram.round(6).tolist()}")
    print(f"  pool {len(h.pool)} hyperplanes")
    for e in h.eqs:
        print(f"  {e.render()}   term sizes {sorted(len(t) for t in e.terms)}")
    Y = np.random.default_rng(0).random((100_000, 4)) @ lat.G
    bad = int(np.any(hld_decode_z(h, Y) != closest_z(lat, Y), axis=1).sum())
    print(f"  mismatches against the exact decoder on 1e5 points: {bad}")
