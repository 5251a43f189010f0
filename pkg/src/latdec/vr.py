"""Voronoi-reduced / quasi-Voronoi-reduced basis checks and the quasi-VR error bound."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from latdec.errors import CertificationInconclusive
from latdec.exact import closest_z, relevant_vectors
from latdec.lattice import Lattice, shells
from latdec.mc import block_rng, map_blocks, wilson
from latdec.simplex import solve_lp

BLOCK = 100_000
MAX_OFFENDERS_KEPT = 100
CONTACT_TOL = 1e-7


@dataclass
class VRReport:
    lattice: str
    mode: str  # "monte-carlo" or "lp-exact"
    is_vr: bool
    samples: int | None = None
    flagged: int | None = None
    o_volume_fraction: float | None = None
    o_volume_halfwidth: float | None = None
    d_oc_sq_over_rho_sq: float | None = None
    offending_points: list = field(default_factory=list)  # [{"y": [...], "z": [...]}]
    extra_corner_set: list = field(default_factory=list)  # sorted z tuples outside {0,1}^n
    offender_coordinate_values: list = field(default_factory=list)
    d_oc_trace: list = field(default_factory=list)  # [(samples so far, running d_OC^2/rho^2)]
    # lp-exact only
    candidates: int | None = None
    interior: list = field(default_factory=list)  # z of cells meeting the interior of P(B)
    contact: list = field(default_factory=list)  # z of cells touching P(B) only on its boundary
    seed: int | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, default=_jsonable)

    def summary(self) -> str:
        rows = [("lattice", self.lattice), ("mode", self.mode), ("VR", "yes" if self.is_vr else "no")]
        if self.mode == "monte-carlo":
            rows += [
                ("samples", self.samples),
                ("flagged", self.flagged),
                ("vol(O)/det", f"{self.o_volume_fraction:.4g} ± {self.o_volume_halfwidth:.2g}"),
                ("d_OC^2/rho^2", "-" if self.d_oc_sq_over_rho_sq is None else f"{self.d_oc_sq_over_rho_sq:.4f}"),
                ("offender z values", self.offender_coordinate_values or "-"),
            ]
        else:
            rows += [
                ("candidates", self.candidates),
                ("interior hits", len(self.interior)),
                ("facet contacts", len(self.contact)),
            ]
        w = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{w}}  {v}" for k, v in rows)


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o))


def _corner_points(lat: Lattice) -> np.ndarray:
    return np.array(list(itertools.product((0, 1), repeat=lat.n)), dtype=float) @ lat.G


def check_vr_monte_carlo(lat: Lattice, samples: int, seed: int = 0, workers: int = 1,
                         checkpoints=None) -> VRReport:
    """Sample y uniformly in P(B) and flag every y whose closest point is not a corner."""
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    corners = _corner_points(lat)
    nblocks = -(-samples // BLOCK)

    def block(b):
        m = min(BLOCK, samples - b * BLOCK)
        Y = block_rng(seed, b).random((m, lat.n)) @ lat.G
        Z = closest_z(lat, Y)
        bad = np.any((Z < 0) | (Z > 1), axis=1)
        Yb, Zb = Y[bad], Z[bad]
        d2 = ((Yb[:, None, :] - corners[None]) ** 2).sum(-1).min(axis=1) if len(Yb) else np.empty(0)
        return Yb, Zb, d2

    flagged = 0
    d_min = math.inf
    trace = []
    offenders = []
    zset = set()
    done = 0
    checkpoints = sorted(checkpoints or [])
    for Yb, Zb, d2 in map_blocks(block, range(nblocks), workers):
        done += min(BLOCK, samples - done)
        flagged += len(Yb)
        if len(d2):
            d_min = min(d_min, float(d2.min()))
        zset.update(map(tuple, Zb.tolist()))
        for y, z in zip(Yb, Zb):
            if len(offenders) >= MAX_OFFENDERS_KEPT:
                break
            offenders.append({"y": y.tolist(), "z": z.tolist()})
        while checkpoints and done >= checkpoints[0]:
            trace.append((checkpoints.pop(0), d_min / lat.rho**2 if flagged else None))
    frac = flagged / samples
    _, half = wilson(flagged, samples)
    return VRReport(
        lattice=lat.name,
        mode="monte-carlo",
        is_vr=flagged == 0,
        samples=samples,
        flagged=flagged,
        o_volume_fraction=frac,
        o_volume_halfwidth=half,
        d_oc_sq_over_rho_sq=d_min / lat.rho**2 if flagged else None,
        offending_points=offenders,
        extra_corner_set=sorted(zset),
        offender_coordinate_values=sorted({v for z in zset for v in z}),
        d_oc_trace=trace,
        seed=seed,
    )


def covering_radius_bound(lat: Lattice) -> float:
    """Nearest-plane bound: mu <= 1/2 sqrt(sum of squared Gram-Schmidt norms)."""
    from latdec.lattice import cholesky_generator

    L = cholesky_generator(lat.gram)
    return 0.5 * math.sqrt(float(np.sum(np.diag(L) ** 2)))


def exact_candidates(lat: Lattice) -> np.ndarray:
    """Non-corner z whose Voronoi cell could meet P(B).

    Uses |alpha_i(y) - alpha_i(x')| <= mu * ||column i of G^-1|| for y in P,
    ||x' - centroid|| <= circumradius + mu, and the support-function test below.
    """
    mu = covering_radius_bound(lat)
    col = np.linalg.norm(lat.Ginv, axis=0)
    lo = np.ceil(-mu * col - 1e-9).astype(int)
    hi = np.floor(1 + mu * col + 1e-9).astype(int)
    corners = _corner_points(lat)
    centroid = corners.mean(axis=0)
    circ = float(np.sqrt(((corners - centroid) ** 2).sum(axis=1)).max())
    grids = np.array(list(itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)])), dtype=np.int64)
    grids = grids[np.any((grids < 0) | (grids > 1), axis=1)]
    X = grids @ lat.G
    keep = np.sqrt(((X - centroid) ** 2).sum(axis=1)) <= circ + mu + 1e-9
    grids, X = grids[keep], X[keep]
    # support functions: x' in P + V(0) needs x'.v <= h_P(v) + v.v/2 for every relevant v
    V = np.array([p.x for p in relevant_vectors(lat)])
    lim = np.maximum(lat.G @ V.T, 0).sum(axis=0) + 0.5 * (V * V).sum(axis=1) + 1e-9
    keep = np.concatenate([np.all(X[s:s + 50_000] @ V.T <= lim, axis=1)
                           for s in range(0, len(X), 50_000)] or [np.zeros(0, bool)])
    return grids[keep]


def cell_depth_in_parallelotope(lat: Lattice, relevants, z) -> float | None:
    """Largest s such that some y is s-deep inside both V(zG) and closed P(B).

    Returns None when V(zG) and closed P(B) are disjoint.
    """
    n = lat.n
    xp = np.asarray(z, dtype=float) @ lat.G
    V = np.array([p.x for p in relevants])
    norms = np.linalg.norm(V, axis=1)
    # variables: alpha (n, >= 0), s (>= 0); y = alpha G
    rows, rhs = [], []
    for i in range(n):
        r = np.zeros(n + 1)
        r[i], r[n] = 1.0, 1.0
        rows.append(r)
        rhs.append(1.0)
        r = np.zeros(n + 1)
        r[i], r[n] = -1.0, 1.0
        rows.append(r)
        rhs.append(0.0)
    GV = lat.G @ V.T  # (n, m): alpha . (G v)
    rhs_v = xp @ V.T + 0.5 * (V * V).sum(axis=1)
    # the box rows force s <= 1/2, so a row whose left side cannot reach its bound is redundant
    live = np.maximum(GV, 0).sum(axis=0) + 0.5 * norms > rhs_v - 1e-12
    for j in np.flatnonzero(live):
        r = np.zeros(n + 1)
        r[:n] = GV[:, j]
        r[n] = norms[j]
        rows.append(r)
        rhs.append(rhs_v[j])
    c = np.zeros(n + 1)
    c[n] = 1.0
    res = solve_lp(c, np.array(rows), np.array(rhs))
    if res.status == "infeasible":
        return None
    if res.status != "optimal":
        raise CertificationInconclusive(f"unexpected LP status {res.status}")
    return res.value


def check_vr_exact(lat: Lattice, relevants=None) -> VRReport:
    """Certify the VR property by LP feasibility of V(x') ∩ P(B) for every candidate x'."""
    if lat.n > 8:
        raise ValueError("exact certification is limited to n <= 8")
    if relevants is None:
        relevants = relevant_vectors(lat)
    cands = exact_candidates(lat)
    interior, contact = [], []
    for z in cands:
        depth = cell_depth_in_parallelotope(lat, relevants, z)
        if depth is None:
            continue
        if depth > CONTACT_TOL:
            interior.append(tuple(int(v) for v in z))
        else:
            contact.append(tuple(int(v) for v in z))
    return VRReport(
        lattice=lat.name,
        mode="lp-exact",
        is_vr=not interior,
        o_volume_fraction=0.0 if not interior else None,
        candidates=len(cands),
        interior=interior,
        contact=contact,
    )


# ---------------------------------------------------------------------------
# error bound


@dataclass(frozen=True)
class BoundInput:
    """Distance to the Poltyrev limit and the matching per-dimension noise variance."""

    delta: float
    sigma2: float

    def __post_init__(self):
        if self.delta <= 0 or self.sigma2 <= 0:
            raise ValueError("delta and sigma2 must be positive")

    @classmethod
    def from_delta(cls, lat: Lattice, delta: float) -> BoundInput:
        return cls(delta, sigma2_for_delta(lat, delta))

    @classmethod
    def from_db(cls, lat: Lattice, delta_db: float) -> BoundInput:
        return cls.from_delta(lat, 10 ** (delta_db / 10))

    def consistent_with(self, lat: Lattice, rtol=1e-9) -> bool:
        return math.isclose(self.delta, delta_for_sigma2(lat, self.sigma2), rel_tol=rtol)


def sigma2_for_delta(lat: Lattice, delta: float) -> float:
    return lat.det ** (2 / lat.n) / (2 * math.pi * math.e * delta)


def delta_for_sigma2(lat: Lattice, sigma2: float) -> float:
    return lat.det ** (2 / lat.n) / (2 * math.pi * math.e * sigma2)


def exponent_from_delta(lat: Lattice, delta: float) -> float:
    """pi e Delta gamma / 4."""
    return math.pi * math.e * delta * lat.gamma / 4


class Bound(NamedTuple):
    pe_opt_term: float
    pe_O_term: float
    first_shell_term: float
    truncation: float  # size of the first omitted theta-series term


def lemma_bound(lat: Lattice, report: VRReport | None, bi: BoundInput, theta_terms: int = 8) -> Bound:
    if theta_terms < 1:
        raise ValueError("theta_terms must be >= 1")
    sh = shells(lat, theta_terms + 1)
    # q^{|x|^2} with q = exp(-1/(8 sigma^2))
    terms = [cnt * math.exp(-norm / (8 * bi.sigma2)) for norm, cnt in sh]
    pe_opt = 0.5 * sum(terms[:theta_terms])
    first = 0.5 * terms[0]
    tail = 0.5 * terms[theta_terms]

    frac = report.o_volume_fraction if report is not None else 0.0
    ratio = report.d_oc_sq_over_rho_sq if report is not None else None
    if not frac or ratio is None:
        pe_o = 0.0
    else:
        a = exponent_from_delta(lat, bi.delta)
        pe_o = frac * (math.e * bi.delta) ** (lat.n / 2) * math.exp(-a * ratio)
    return Bound(pe_opt, pe_o, first, tail)
