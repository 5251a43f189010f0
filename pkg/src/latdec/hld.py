"""Hyperplane Logical Decoder: Boolean DNF per coordinate over Voronoi-facet literals.

Synthesis walks the corners of the fundamental parallelotope, steps just past
each relevant-vector bisector and records a decision boundary whenever the
probe lands on a corner with the opposite bit. Decoding evaluates the
hyperplane sides, then the DNFs; ``hld_compile`` turns the same thing into a
three-layer Heaviside network.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from latdec.errors import SynthesisRefused
from latdec.exact import closest_z, relevant_vectors
from latdec.lattice import Lattice, LatticePoint
from latdec.nets import FeedForwardNet, Layer

EPS_REL = 1e-4
DEDUP_TOL = 1e-9
PREFLIGHT_SAMPLES = 20_000
PREFLIGHT_MAX_OFFENDERS = 0.05


@dataclass(frozen=True)
class Hyperplane:
    """Boundary {y : y.v = b}; the literal is Heaviside(y.v - b)."""

    v: np.ndarray
    b: float

    @classmethod
    def canonical(cls, v, b) -> tuple[Hyperplane, bool]:
        """Orient so the first nonzero coordinate of v is positive. Returns (plane, flipped)."""
        v = np.asarray(v, dtype=float)
        nz = np.flatnonzero(np.abs(v) > DEDUP_TOL)
        if len(nz) == 0:
            raise ValueError("hyperplane normal must be nonzero")
        if v[nz[0]] < 0:
            return cls(-v, -float(b)), True
        return cls(v, float(b)), False

    def key(self):
        return tuple(np.round(np.append(self.v, self.b) / DEDUP_TOL).astype(np.int64))


# A literal is (hyperplane index, negated); a term is a frozenset of literals.
Literal = tuple[int, bool]
Term = frozenset


@dataclass
class BooleanDNF:
    coordinate: int  # 0-based
    terms: list[frozenset] = field(default_factory=list)

    def literals(self) -> set[Literal]:
        return set().union(*self.terms) if self.terms else set()

    def hyperplanes(self) -> set[int]:
        return {h for h, _ in self.literals()}

    def evaluate(self, bits: np.ndarray) -> np.ndarray:
        """bits: (m, pool) boolean hyperplane indicators -> (m,) boolean."""
        out = np.zeros(bits.shape[0], dtype=bool)
        for term in self.terms:
            t = np.ones(bits.shape[0], dtype=bool)
            for h, neg in term:
                t &= ~bits[:, h] if neg else bits[:, h]
            out |= t
        return out

    def render(self, names=None) -> str:
        def lit(h, neg):
            s = names[h] if names else f"h{h + 1}"
            return f"~{s}" if neg else s

        parts = ["·".join(lit(h, g) for h, g in sorted(t)) or "1" for t in self.terms]
        return f"z{self.coordinate + 1} = " + (" + ".join(parts) if parts else "0")


def reduce_terms(terms) -> list[frozenset]:
    """Identical-term removal followed by absorption (drop strict supersets)."""
    uniq = []
    for t in terms:
        t = frozenset(t)
        if t not in uniq:
            uniq.append(t)
    kept = [t for t in uniq if not any(o < t for o in uniq)]
    return sorted(kept, key=lambda t: (len(t), sorted(t)))


@dataclass
class HLD:
    pool: list[Hyperplane]
    eqs: list[BooleanDNF]
    raw_eqs: list[BooleanDNF] = field(default_factory=list, repr=False)

    @property
    def n(self) -> int:
        return len(self.eqs)

    def to_json(self) -> dict:
        return {
            "hyperplanes": [{"v": h.v.tolist(), "b": h.b} for h in self.pool],
            "equations": [
                {
                    "coordinate": e.coordinate + 1,
                    "terms": [[{"h": h, "neg": neg} for h, neg in sorted(t)] for t in e.terms],
                }
                for e in self.eqs
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> HLD:
        pool = [Hyperplane(np.array(h["v"], dtype=float), float(h["b"])) for h in data["hyperplanes"]]
        eqs = [
            BooleanDNF(
                e["coordinate"] - 1,
                [frozenset((lit["h"], bool(lit["neg"])) for lit in t) for t in e["terms"]],
            )
            for e in data["equations"]
        ]
        return cls(pool, eqs)

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_json(), indent=1))

    @classmethod
    def load(cls, path) -> HLD:
        return cls.from_json(json.loads(Path(path).read_text()))


def _corners(n):
    return np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64)


def _preflight(lat: Lattice, seed=0):
    from latdec.vr import check_vr_monte_carlo

    rep = check_vr_monte_carlo(lat, PREFLIGHT_SAMPLES, seed)
    if rep.o_volume_fraction > PREFLIGHT_MAX_OFFENDERS:
        raise SynthesisRefused(
            f"{lat.name}: basis is not quasi-Voronoi-reduced "
            f"(offender fraction {rep.o_volume_fraction:.3g} > {PREFLIGHT_MAX_OFFENDERS})",
            report=rep,
        )
    return rep


def hld_synthesize(lat: Lattice, relevants=None, epsilon=EPS_REL, preflight=True) -> HLD:
    """Synthesize pool + reduced DNF equations.

    ``epsilon`` is relative: each probe steps (1/2 + epsilon)·v from its corner.
    """
    if preflight:
        _preflight(lat)
    if relevants is None:
        relevants = relevant_vectors(lat)
    n = lat.n
    RZ = np.array([p.z for p in relevants], dtype=np.int64)
    RV = RZ @ lat.G
    corners = _corners(n)

    # one probe per (corner, relevant vector); probes are shared by all coordinates
    CZ = np.repeat(corners, len(RZ), axis=0)
    VZ = np.tile(RZ, (len(corners), 1))
    probes = CZ @ lat.G + (0.5 + epsilon) * (VZ @ lat.G)
    inside = lat.in_parallelotope(probes, closed=True)
    dec = np.full_like(CZ, -(10**6))
    if inside.any():
        dec[inside] = closest_z(lat, probes[inside])

    pool: list[Hyperplane] = []
    index: dict = {}
    raw_eqs = []
    for k in range(n):
        terms = []
        for ci, c in enumerate(corners):
            if c[k] != 1:
                continue
            x = c @ lat.G
            term = set()
            for ri in range(len(RZ)):
                row = ci * len(RZ) + ri
                if not inside[row] or dec[row, k] != 0:
                    continue
                v = RV[ri]
                b = x @ v + 0.5 * (v @ v)
                plane, flipped = Hyperplane.canonical(v, b)
                key = plane.key()
                if key not in index:
                    index[key] = len(pool)
                    pool.append(plane)
                # corner side is y.v < b; after a flip it is y.v' > b'
                term.add((index[key], not flipped))
            terms.append(frozenset(term))
        raw_eqs.append(BooleanDNF(k, terms))
    eqs = [BooleanDNF(e.coordinate, reduce_terms(e.terms)) for e in raw_eqs]
    return HLD(pool, eqs, raw_eqs)


def hyperplane_bits(pool, Y) -> np.ndarray:
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    V = np.array([h.v for h in pool])
    b = np.array([h.b for h in pool])
    return (Y @ V.T - b) > 0


def hld_decode_z(hld: HLD, Y) -> np.ndarray:
    """Batched HLD decoding of folded points; returns (m, n) corner coordinates."""
    bits = hyperplane_bits(hld.pool, Y)
    return np.stack([e.evaluate(bits) for e in hld.eqs], axis=1).astype(np.int64)


def hld_decode(hld: HLD, lat: Lattice, y) -> LatticePoint:
    return lat.point(hld_decode_z(hld, y)[0])


def hld_compile(hld: HLD) -> FeedForwardNet:
    """Hyperplanes -> AND -> OR Heaviside network (weights stored as (in, out))."""
    P = len(hld.pool)
    W1 = np.array([h.v for h in hld.pool]).T
    b1 = -np.array([h.b for h in hld.pool])
    terms = [(e.coordinate, t) for e in hld.eqs for t in e.terms]
    W2 = np.zeros((P, len(terms)))
    b2 = np.zeros(len(terms))
    W3 = np.zeros((len(terms), hld.n))
    for j, (k, t) in enumerate(terms):
        pos = 0
        for h, neg in t:
            W2[h, j] = -1.0 if neg else 1.0
            pos += not neg
        b2[j] = -(pos - 0.5)
        W3[j, k] = 1.0
    b3 = np.full(hld.n, -0.5)
    return FeedForwardNet([
        Layer(W1, b1, "heaviside"),
        Layer(W2, b2, "heaviside"),
        Layer(W3, b3, "heaviside"),
    ])


def term_units(hld: HLD, k: int) -> list[int]:
    """Indices of the AND-layer neurons belonging to coordinate k in the compiled net."""
    out, j = [], 0
    for e in hld.eqs:
        for _ in e.terms:
            if e.coordinate == k:
                out.append(j)
            j += 1
    return out


def dnf_isomorphic(eqs_a, eqs_b) -> bool:
    """Structural equality of DNF systems up to renaming (and complementing) variables.

    Each system is a list of equations; each equation a list of terms; each term
    an iterable of (variable, negated). Terms may be permuted within an equation.
    """
    if [len(e) for e in eqs_a] != [len(e) for e in eqs_b]:
        return False

    def signatures(eqs, perms):
        sig: dict = {}
        for ei, (eq, perm) in enumerate(zip(eqs, perms)):
            for ti, term in enumerate(eq):
                for var, neg in term:
                    sig.setdefault(var, set()).add((ei, perm[ti], bool(neg)))
        out = []
        for s in sig.values():
            s = frozenset(s)
            flip = frozenset((e, t, not g) for e, t, g in s)
            out.append(frozenset({s, flip}))
        return sorted(out, key=lambda f: sorted(map(sorted, f)))

    target = signatures(eqs_b, [list(range(len(e))) for e in eqs_b])
    for perms in itertools.product(*[itertools.permutations(range(len(e))) for e in eqs_a]):
        if signatures(eqs_a, perms) == target:
            return True
    return False
