"""Exact CVP oracle and relevant Voronoi vectors."""

from __future__ import annotations

import itertools

import numpy as np

from latdec import _kernels
from latdec.errors import CapacityError
from latdec.lattice import Lattice, LatticePoint

MAX_RELEVANT_RANK = 20


def closest_z(lat: Lattice, Y) -> np.ndarray:
    """Batched sphere decoding: integer coordinates of the closest point for each row of Y."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    U = np.ascontiguousarray(Y @ lat.Ginv)
    Z, _ = _kernels.closest_batch(lat._R, U)
    return Z


def sphere_decode(lat: Lattice, y) -> LatticePoint:
    return lat.point(closest_z(lat, y)[0])


def brute_force_z(lat: Lattice, Y, bound=3) -> np.ndarray:
    """Exhaustive search over z in {-bound..bound}^n (test oracle only)."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    Zs = np.array(list(itertools.product(range(-bound, bound + 1), repeat=lat.n)), dtype=np.int64)
    X = Zs @ lat.G
    out = np.empty((len(Y), lat.n), dtype=np.int64)
    for i, y in enumerate(Y):
        d = np.sum((X - y) ** 2, axis=1)
        best = d.min()
        ties = np.flatnonzero(d <= best + 1e-12 * (1 + best))
        # lexsort on reversed columns -> lexicographic order of rows
        cand = Zs[ties]
        out[i] = cand[np.lexsort(cand.T[::-1])[0]]
    return out


def relevant_vectors(lat: Lattice) -> list[LatticePoint]:
    """Relevant Voronoi vectors via the Lambda/2Lambda coset method.

    A coset c + 2Lambda contributes +-v iff its shortest vectors are exactly
    one antipodal pair.
    """
    n = lat.n
    if n > MAX_RELEVANT_RANK:
        raise CapacityError(f"rank {n} > {MAX_RELEVANT_RANK}: too many cosets")
    cached = getattr(lat, "_relevant_cache", None)
    if cached is not None:
        return list(cached)
    twice = Lattice(2 * lat.G, name=f"2{lat.name}")
    out = []
    for c in itertools.product((0, 1), repeat=n):
        if not any(c):
            continue
        c = np.array(c, dtype=np.int64)
        target = -(c @ lat.G)
        zt = closest_z(twice, target)[0]
        w = c + 2 * zt
        m = float(np.sum((w @ lat.G) ** 2))
        near = twice.enumerate_near(target, m + 1e-9 * max(1.0, m))
        minimal = [z for z, d in near if d <= m + 1e-9 * max(1.0, m)]
        if len(minimal) == 2:
            for zt in minimal:
                out.append(lat.point(c + 2 * zt))
    out.sort(key=lambda p: tuple(p.z))
    object.__setattr__(lat, "_relevant_cache", tuple(out))
    return out


def voronoi_contains(lat: Lattice, relevants, y) -> bool:
    V = np.array([p.x for p in relevants])
    y = np.asarray(y, dtype=float)
    return bool(np.all(V @ y <= 0.5 * np.sum(V * V, axis=1) + 1e-9))
