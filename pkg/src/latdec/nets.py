"""Dense feed-forward networks: container, forward pass and JSON format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

ACTIVATIONS = ("heaviside", "sigmoid", "identity")


def sigmoid(t):
    # split by sign to avoid overflow in exp
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def heaviside(t):
    return (np.asarray(t) > 0).astype(float)


def activate(act: str, t):
    if act == "sigmoid":
        return sigmoid(t)
    if act == "heaviside":
        return heaviside(t)
    if act == "identity":
        return np.asarray(t, dtype=float)
    raise ValueError(f"unknown activation {act!r}")


@dataclass
class Layer:
    """Affine map X @ w + b followed by ``act``. ``w`` has shape (n_in, n_out).

    ``mask`` (same shape as w, boolean) marks edges that exist; pruned edges are False.
    """

    w: np.ndarray
    b: np.ndarray
    act: str = "sigmoid"
    mask: np.ndarray | None = None

    def __post_init__(self):
        self.w = np.array(self.w, dtype=float, ndmin=2)
        self.b = np.array(self.b, dtype=float).reshape(-1)
        if self.act not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.act!r}")
        if self.b.shape[0] != self.w.shape[1]:
            raise ValueError(f"bias length {self.b.shape[0]} != fan-out {self.w.shape[1]}")
        if self.mask is not None:
            self.mask = np.array(self.mask, dtype=bool)
            self.w = np.where(self.mask, self.w, 0.0)

    @property
    def shape(self):
        return self.w.shape

    def copy(self) -> Layer:
        return Layer(self.w.copy(), self.b.copy(), self.act,
                     None if self.mask is None else self.mask.copy())


@dataclass
class FeedForwardNet:
    layers: list[Layer] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for a, b in zip(self.layers, self.layers[1:]):
            if a.w.shape[1] != b.w.shape[0]:
                raise ValueError(f"layer size mismatch: {a.w.shape} then {b.w.shape}")

    @property
    def n_in(self) -> int:
        return self.layers[0].w.shape[0]

    @property
    def n_out(self) -> int:
        return self.layers[-1].w.shape[1]

    def copy(self) -> FeedForwardNet:
        return FeedForwardNet([l.copy() for l in self.layers], dict(self.meta))

    def parameter_count(self, biases=False) -> int:
        """Number of weights (edges); biases only when asked."""
        return sum(l.w.size + (l.b.size if biases else 0) for l in self.layers)

    def to_json(self) -> dict:
        layers = []
        for l in self.layers:
            d = {"w": l.w.tolist(), "b": l.b.tolist(), "act": l.act}
            if l.mask is not None and not l.mask.all():
                d["mask"] = l.mask.astype(int).tolist()
            layers.append(d)
        out = {"layers": layers}
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_json(cls, data: dict) -> FeedForwardNet:
        layers = [Layer(d["w"], d["b"], d.get("act", "sigmoid"), d.get("mask")) for d in data["layers"]]
        return cls(layers, data.get("meta", {}))

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_json()))

    @classmethod
    def load(cls, path) -> FeedForwardNet:
        return cls.from_json(json.loads(Path(path).read_text()))


def forward(net: FeedForwardNet, y) -> np.ndarray:
    """Evaluate the net on one input vector or a batch (rows)."""
    a = np.asarray(y, dtype=float)
    single = a.ndim == 1
    a = np.atleast_2d(a)
    for l in net.layers:
        a = activate(l.act, a @ l.w + l.b)
    return a[0] if single else a


def mlp(sizes, act="sigmoid", out_act="sigmoid", rng=None, scale=None) -> FeedForwardNet:
    """Randomly initialized fully connected net with the given layer widths."""
    rng = np.random.default_rng(rng)
    layers = []
    for i, (a, b) in enumerate(zip(sizes, sizes[1:])):
        s = scale if scale is not None else np.sqrt(2.0 / (a + b))
        layers.append(Layer(rng.normal(0, s, (a, b)), np.zeros(b),
                            out_act if i == len(sizes) - 2 else act))
    return FeedForwardNet(layers)
