"""Lattice representation, parallelotope folding and the built-in catalog."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from latdec import _kernels
from latdec.errors import CapacityError, CatalogError, DecompositionError

ENUM_CAP = 10**7
# slack used when testing membership of the fundamental parallelotope
P_SLACK = 1e-12


def cholesky_generator(gram) -> np.ndarray:
    """Lower-triangular G with G G^T = gram (plain Cholesky-Banachiewicz)."""
    A = np.asarray(gram, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DecompositionError(f"Gram matrix must be square, got shape {A.shape}")
    if not np.allclose(A, A.T, atol=1e-12, rtol=0):
        raise DecompositionError("Gram matrix is not symmetric")
    n = A.shape[0]
    L = np.zeros_like(A)
    for i in range(n):
        for j in range(i + 1):
            s = A[i, j] - L[i, :j] @ L[j, :j]
            if i == j:
                if s <= 1e-12:
                    raise DecompositionError(f"non-positive pivot {s:.3g} at row {i}")
                L[i, i] = math.sqrt(s)
            else:
                L[i, j] = s / L[j, j]
    return L


@dataclass(frozen=True)
class LatticePoint:
    z: np.ndarray
    x: np.ndarray

    def __eq__(self, other):
        return isinstance(other, LatticePoint) and np.array_equal(self.z, other.z)

    def __hash__(self):
        return hash(tuple(int(v) for v in self.z))


@dataclass(frozen=True)
class FoldResult:
    t: np.ndarray
    y: np.ndarray
    original: np.ndarray


@dataclass(frozen=True, eq=False)
class Lattice:
    """Full-rank lattice whose basis vectors are the rows of ``G``.

    Geometric constants (det, d_min, tau, ...) are computed lazily and cached.
    """

    G: np.ndarray
    name: str = "custom"
    enum_cap: int = field(default=ENUM_CAP, repr=False)

    def __post_init__(self):
        G = np.array(self.G, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise CatalogError(f"generator must be square, got shape {G.shape}")
        if abs(np.linalg.det(G)) < 1e-12:
            raise CatalogError("generator matrix is singular")
        G.setflags(write=False)
        object.__setattr__(self, "G", G)

    @classmethod
    def from_gram(cls, gram, name="custom") -> Lattice:
        return cls(cholesky_generator(gram), name=name)

    @property
    def n(self) -> int:
        return self.G.shape[0]

    @cached_property
    def gram(self) -> np.ndarray:
        return self.G @ self.G.T

    @cached_property
    def Ginv(self) -> np.ndarray:
        return np.linalg.inv(self.G)

    @cached_property
    def det(self) -> float:
        return math.sqrt(np.linalg.det(self.gram))

    @cached_property
    def _R(self) -> np.ndarray:
        # gram = R^T R with R upper triangular
        return np.ascontiguousarray(cholesky_generator(self.gram).T)

    @cached_property
    def _minimal(self):
        r2 = float(np.min(np.diag(self.gram)))
        pts = self.enumerate_near(np.zeros(self.n), r2 * (1 + 1e-9))
        norms = np.array([p[1] for p in pts if np.any(p[0])])
        m = float(norms.min())
        tau = int(np.sum(norms <= m + 1e-9))
        return m, tau

    @property
    def d_min(self) -> float:
        return math.sqrt(self._minimal[0])

    @property
    def rho(self) -> float:
        return self.d_min / 2

    @property
    def tau(self) -> int:
        return self._minimal[1]

    @property
    def gamma(self) -> float:
        return self._minimal[0] / self.det ** (2 / self.n)

    def point(self, z) -> LatticePoint:
        z = np.asarray(z, dtype=np.int64)
        return LatticePoint(z, z @ self.G)

    def coords(self, y) -> np.ndarray:
        """Parallelotope coordinates alpha = y G^{-1} (works on batches)."""
        return np.asarray(y, dtype=float) @ self.Ginv

    def in_parallelotope(self, y, closed=False) -> np.ndarray:
        a = self.coords(y)
        hi = 1 + P_SLACK if closed else 1
        return np.all((a >= -P_SLACK) & (a < hi), axis=-1)

    def enumerate_near(self, target, r2):
        """Integer vectors z with ||zG - target||^2 <= r2, as (z, dist2) pairs."""
        u = np.ascontiguousarray(self.coords(target), dtype=float)
        Z, D, overflow = _kernels.enumerate_ball(self._R, u, float(r2), self.enum_cap)
        if overflow:
            raise CapacityError(f"enumeration exceeded {self.enum_cap} points (r2={r2})")
        return list(zip(Z, D))

    def to_json(self) -> dict:
        return {"name": self.name, "generator": self.G.tolist()}


def shell_enumerate(lat: Lattice, radius2: float) -> list[LatticePoint]:
    if radius2 <= 0:
        raise ValueError("radius2 must be positive")
    pts = lat.enumerate_near(np.zeros(lat.n), radius2 + 1e-9)
    return [lat.point(z) for z, _ in pts if np.any(z)]


def shells(lat: Lattice, count: int) -> list[tuple[float, int]]:
    """First ``count`` nonzero shells as (squared norm, multiplicity)."""
    r2 = lat.d_min**2
    while True:
        pts = lat.enumerate_near(np.zeros(lat.n), r2 + 1e-9)
        norms = np.sort(np.array([d for z, d in pts if np.any(z)]))
        groups = []
        for v in norms:
            if groups and v - groups[-1][0] <= 1e-9 * max(1.0, v):
                groups[-1][1] += 1
            else:
                groups.append([v, 1])
        if len(groups) > count:
            return [(float(a), b) for a, b in groups[:count]]
        r2 *= 1.5


def fold_into_parallelotope(lat: Lattice, y0) -> FoldResult:
    y0 = np.asarray(y0, dtype=float)
    t = np.floor(lat.coords(y0)).astype(np.int64)
    y = y0 - t @ lat.G
    return FoldResult(t=t, y=y, original=y0)


def unfold(lat: Lattice, zhat, t) -> LatticePoint:
    zhat = zhat.z if isinstance(zhat, LatticePoint) else zhat
    return lat.point(np.asarray(zhat, dtype=np.int64) + np.asarray(t, dtype=np.int64))


# ---------------------------------------------------------------------------
# catalog

_H = 1.5
GRAMS = {
    "A3": [[2, 1, 0], [1, 2, 1], [0, 1, 2]],
    "D4": [[2, 1, 1, 1], [1, 2, 1, 1], [1, 1, 2, 0], [1, 1, 0, 2]],
    # simple-root basis of D4, leaves first (centre node last)
    "D4-root": [[2, 0, 0, -1], [0, 2, 0, -1], [0, 0, 2, -1], [-1, -1, -1, 2]],
    "E6": [
        [3, _H, 0, 0, _H, _H],
        [_H, 3, 0, 0, _H, _H],
        [0, 0, 3, _H, _H, _H],
        [0, 0, _H, 3, _H, _H],
        [_H, _H, _H, _H, 3, _H],
        [_H, _H, _H, _H, _H, 3],
    ],
    "E8": [
        [4, 2, 0, 2, 2, 2, 2, 2],
        [2, 4, 2, 0, 2, 2, 2, 2],
        [0, 2, 4, 0, 2, 2, 0, 0],
        [2, 0, 0, 4, 2, 2, 0, 0],
        [2, 2, 2, 2, 4, 2, 2, 0],
        [2, 2, 2, 2, 2, 4, 0, 2],
        [2, 2, 0, 0, 2, 0, 4, 0],
        [2, 2, 0, 0, 0, 2, 0, 4],
    ],
}

CATALOG_NAMES = ("A2", "A2-alt", "A3", "D4", "D4-root", "E6", "E8", "Zn")

_cache: dict[str, Lattice] = {}


def catalog_load(name: str) -> Lattice:
    """Build a catalog lattice: A2, A3, D4, E6, E8 or Z<n> (e.g. "Z4")."""
    if name in _cache:
        return _cache[name]
    if name == "A2":
        lat = Lattice(np.array([[1.0, 0.0], [0.5, math.sqrt(3) / 2]]), name="A2")
    elif name == "A2-alt":
        # {v1, v1+v2}: not Minkowski-reduced but still Voronoi-reduced
        lat = Lattice(np.array([[1.0, 0.0], [1.5, math.sqrt(3) / 2]]), name="A2-alt")
    elif name in GRAMS:
        lat = Lattice.from_gram(GRAMS[name], name=name)
    elif name.startswith("Z") and name[1:].isdigit() and int(name[1:]) >= 1:
        lat = Lattice(np.eye(int(name[1:])), name=name)
    else:
        raise CatalogError(f"unknown lattice {name!r}; expected one of {', '.join(CATALOG_NAMES[:-1])}, Z<n>")
    _cache[name] = lat
    return lat


def load_lattice_file(path) -> Lattice:
    """Load {"name", "gram"} or {"name", "generator"} (exactly one of the two)."""
    data = json.loads(Path(path).read_text())
    keys = {"gram", "generator"} & set(data)
    if len(keys) != 1:
        raise CatalogError(f"{path}: need exactly one of 'gram' or 'generator', got {sorted(keys)}")
    name = data.get("name", Path(path).stem)
    if "gram" in data:
        return Lattice.from_gram(data["gram"], name=name)
    return Lattice(np.array(data["generator"], dtype=float), name=name)


def resolve(name: str) -> Lattice:
    """Catalog name or path to a JSON lattice file."""
    if name.endswith(".json"):
        return load_lattice_file(name)
    return catalog_load(name)
