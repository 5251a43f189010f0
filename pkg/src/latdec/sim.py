"""Gaussian-channel Monte Carlo: point error rate versus distance to the Poltyrev limit."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from latdec.errors import RegistryError
from latdec.exact import closest_z
from latdec.lattice import Lattice, resolve
from latdec.mc import block_rng, map_blocks, wilson
from latdec.vr import sigma2_for_delta

# decode(lat, Y_folded) -> integer coordinates, one row per input row
Decoder = Callable[[Lattice, np.ndarray], np.ndarray]

_registry: dict[str, Decoder] = {}


def register(name: str, decode: Decoder) -> None:
    if name in _registry:
        raise RegistryError(f"decoder {name!r} already registered")
    _registry[name] = decode


def unregister(name: str) -> None:
    _registry.pop(name, None)


def get_decoder(name: str) -> Decoder:
    if name in _registry:
        return _registry[name]
    if name.startswith("net:"):
        from latdec.learn import decode_with_net
        from latdec.nets import FeedForwardNet

        net = FeedForwardNet.load(name[4:])
        dec = lambda lat, Y: decode_with_net(net, Y)  # noqa: E731
        _registry[name] = dec
        return dec
    if name.startswith("hld:"):
        from latdec.hld import HLD, hld_decode_z

        h = HLD.load(name[4:])
        dec = lambda lat, Y: hld_decode_z(h, Y)  # noqa: E731
        _registry[name] = dec
        return dec
    raise RegistryError(f"unknown decoder {name!r}; registered: {sorted(_registry)}")


def registered() -> list[str]:
    return sorted(_registry)


def _mld(lat, Y):
    return closest_z(lat, Y)


_hld_cache: dict = {}


def _hld(lat, Y):
    from latdec.hld import hld_decode_z, hld_synthesize

    key = (lat.name, lat.G.tobytes())
    if key not in _hld_cache:
        _hld_cache[key] = hld_synthesize(lat)
    return hld_decode_z(_hld_cache[key], Y)


register("mld", _mld)
register("hld", _hld)


@dataclass
class SimConfig:
    lattice: str = "D4"
    decoder: str = "mld"
    delta_db: list[float] = field(default_factory=lambda: [0.0, 1.0, 2.0, 3.0])
    target_errors: int = 200
    max_trials: int = 10**7
    seed: int = 0
    workers: int = 1
    block_size: int = 10_000
    box: int = 2  # z uniform in {-box..box}^n; 0 sends the origin only

    def __post_init__(self):
        self.delta_db = [float(d) for d in self.delta_db]
        if any(b <= a for a, b in zip(self.delta_db, self.delta_db[1:])):
            raise ValueError("delta grid must be strictly increasing")
        if self.target_errors < 1 or self.max_trials < 1 or self.block_size < 1:
            raise ValueError("target_errors, max_trials and block_size must be positive")

    def provenance(self) -> dict:
        d = asdict(self)
        d.pop("workers")
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.provenance(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    @classmethod
    def from_json(cls, path) -> SimConfig:
        return cls(**json.loads(Path(path).read_text()))


@dataclass
class SimPoint:
    delta_db: float
    sigma2: float
    trials: int
    errors: int
    per: float
    ci95: float
    wall_time: float = 0.0

    @property
    def stderr(self) -> float:
        return float(np.sqrt(self.per * (1 - self.per) / self.trials)) if self.trials else 0.0


@dataclass
class SimResult:
    config: SimConfig
    points: list[SimPoint]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# config {json.dumps(self.config.provenance(), sort_keys=True)}\n")
        buf.write(f"# config_hash {self.config.config_hash()}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lattice", "decoder", "delta_db", "sigma2", "trials", "errors", "per", "ci95", "seed"])
        for p in self.points:
            w.writerow([self.config.lattice, self.config.decoder, f"{p.delta_db:.6g}", f"{p.sigma2:.12g}",
                        p.trials, p.errors, f"{p.per:.12g}", f"{p.ci95:.12g}", self.config.seed])
        return buf.getvalue()


def count_errors(lat: Lattice, decode: Decoder, sigma2: float, m: int, rng: np.random.Generator,
                 box: int = 2) -> int:
    """One block of trials: send zG, add noise, fold, decode, unfold, compare."""
    z = rng.integers(-box, box + 1, size=(m, lat.n)) if box else np.zeros((m, lat.n), np.int64)
    y0 = z @ lat.G + rng.standard_normal((m, lat.n)) * np.sqrt(sigma2)
    t = np.floor(y0 @ lat.Ginv).astype(np.int64)
    zhat = np.asarray(decode(lat, y0 - t @ lat.G), dtype=np.int64) + t
    return int(np.any(zhat != z, axis=1).sum())


def run_sim(cfg: SimConfig, lat: Lattice | None = None, progress=None) -> SimResult:
    lat = lat or resolve(cfg.lattice)
    decode = get_decoder(cfg.decoder)
    points = []
    nblocks_max = -(-cfg.max_trials // cfg.block_size)
    for di, ddb in enumerate(cfg.delta_db):
        sigma2 = sigma2_for_delta(lat, 10 ** (ddb / 10))
        if sigma2 <= 0:
            raise ValueError("sigma2 must be positive")
        t0 = time.perf_counter()

        def block(b, di=di, sigma2=sigma2):
            m = min(cfg.block_size, cfg.max_trials - b * cfg.block_size)
            return m, count_errors(lat, decode, sigma2, m, block_rng(cfg.seed, di, b), cfg.box)

        trials = errors = 0
        b = 0
        done = False
        # waves of `workers` blocks; only the in-order prefix up to the stopping block counts
        while not done and b < nblocks_max:
            wave = range(b, min(b + max(1, cfg.workers), nblocks_max))
            for m, e in map_blocks(block, wave, cfg.workers):
                trials += m
                errors += e
                b += 1
                if errors >= cfg.target_errors:
                    done = True
                    break
        _, half = wilson(errors, trials)
        pt = SimPoint(ddb, sigma2, trials, errors, errors / trials, half, time.perf_counter() - t0)
        points.append(pt)
        if progress:
            progress(pt)
    return SimResult(cfg, points)


def delta_at_per(points: list[SimPoint], target: float) -> float | None:
    """Delta (dB) where PER crosses ``target``, by linear interpolation of log10(PER)."""
    pts = [(p.delta_db, p.per) for p in points if p.per > 0]
    for (d0, p0), (d1, p1) in zip(pts, pts[1:]):
        if p0 >= target >= p1 and p0 != p1:
            f = (np.log10(p0) - np.log10(target)) / (np.log10(p0) - np.log10(p1))
            return d0 + f * (d1 - d0)
    return None
