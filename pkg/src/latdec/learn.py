"""Training neural lattice decoders: datasets, backprop with L1, pruning, NLD2/NLD3 builders."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from latdec.errors import SynthesisRefused, TrainingError
from latdec.exact import closest_z
from latdec.lattice import Lattice
from latdec.mc import block_rng
from latdec.nets import FeedForwardNet, Layer, activate, mlp

LABEL_BOX = 2
PREFLIGHT_SAMPLES = 20_000
PREFLIGHT_MAX_OFFENDERS = 0.05


@dataclass
class Dataset:
    inputs: np.ndarray  # folded points, (m, n)
    targets: np.ndarray  # closest corner, (m, n) in {0,1}
    relabeled: int = 0

    def __len__(self):
        return len(self.inputs)


def noisy_folded(lat: Lattice, size: int, delta_db_range, rng: np.random.Generator):
    """Draw x = zG (z uniform in a small box), add Gaussian noise at a random Delta, fold into P(B)."""
    from latdec.vr import sigma2_for_delta

    lo, hi = delta_db_range
    z = rng.integers(-LABEL_BOX, LABEL_BOX + 1, size=(size, lat.n))
    ddb = rng.uniform(lo, hi, size=size)
    sigma = np.sqrt(sigma2_for_delta(lat, 1.0) / 10 ** (ddb / 10))
    y0 = z @ lat.G + rng.standard_normal((size, lat.n)) * sigma[:, None]
    t = np.floor(y0 @ lat.Ginv)
    return y0 - t @ lat.G


def generate_dataset(lat: Lattice, size: int, delta_range=(0.0, 4.0), seed: int = 0,
                     preflight: bool = True) -> Dataset:
    """Folded noisy points labelled by the exact decoder.

    Labels outside {0,1}^n (only possible for quasi-VR bases) are clamped and counted.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    if preflight:
        from latdec.vr import check_vr_monte_carlo

        rep = check_vr_monte_carlo(lat, PREFLIGHT_SAMPLES, seed)
        if rep.o_volume_fraction > PREFLIGHT_MAX_OFFENDERS:
            raise SynthesisRefused(f"{lat.name}: basis is not quasi-Voronoi-reduced", report=rep)
    Y = noisy_folded(lat, size, delta_range, block_rng(seed, 0xDA7A))
    Z = closest_z(lat, Y)
    outside = np.any((Z < 0) | (Z > 1), axis=1)
    return Dataset(Y, np.clip(Z, 0, 1).astype(float), int(outside.sum()))


# ---------------------------------------------------------------------------
# training


@dataclass
class TrainConfig:
    sizes: list[int] = field(default_factory=lambda: [4, 16, 4])
    activations: list[str] | None = None  # per weight layer; default sigmoid everywhere
    lambda_l1: float = 0.0
    lr: float = 0.5
    momentum: float = 0.9
    batch_size: int = 128
    epochs: int = 10
    delta_range: tuple[float, float] = (0.0, 4.0)
    seed: int = 0
    frozen: list[bool] | None = None

    def __post_init__(self):
        nl = len(self.sizes) - 1
        if self.activations is None:
            self.activations = ["sigmoid"] * nl
        if self.frozen is None:
            self.frozen = [False] * nl
        if len(self.activations) != nl or len(self.frozen) != nl:
            raise ValueError("activations/frozen must have one entry per weight layer")
        if self.activations[-1] != "sigmoid":
            raise ValueError("output layer must be sigmoid")
        if self.lambda_l1 < 0:
            raise ValueError("lambda_l1 must be >= 0")
        self.delta_range = tuple(self.delta_range)


def _act_grad(act, a):
    if act == "sigmoid":
        return a * (1 - a)
    # identity, and the straight-through estimate for heaviside
    return np.ones_like(a)


def loss_and_grads(net: FeedForwardNet, X, T, lambda_l1=0.0, frozen=None):
    """Mean per-coordinate BCE + lambda * L1 over non-frozen weights, with backprop gradients.

    Returns (loss, [(dW, db) or None per layer]).
    """
    frozen = frozen or [False] * len(net.layers)
    acts = [np.atleast_2d(np.asarray(X, dtype=float))]
    for l in net.layers:
        acts.append(activate(l.act, acts[-1] @ l.w + l.b))
    P = acts[-1]
    m, k = P.shape
    eps = 1e-12
    bce = -np.mean(T * np.log(np.clip(P, eps, 1)) + (1 - T) * np.log(np.clip(1 - P, eps, 1)))
    l1 = sum(np.abs(l.w).sum() for l, f in zip(net.layers, frozen) if not f)
    loss = bce + lambda_l1 * l1

    grads = [None] * len(net.layers)
    # sigmoid output + BCE collapses to (p - t)
    delta = (P - T) / (m * k)
    for i in range(len(net.layers) - 1, -1, -1):
        l = net.layers[i]
        if not frozen[i]:
            gw = acts[i].T @ delta + lambda_l1 * np.sign(l.w)
            if l.mask is not None:
                gw = np.where(l.mask, gw, 0.0)
            grads[i] = (gw, delta.sum(axis=0))
        if i > 0 and not all(frozen[:i]):
            delta = (delta @ l.w.T) * _act_grad(net.layers[i - 1].act, acts[i])
        elif i > 0:
            break
    return loss, grads


def l1_mass(net: FeedForwardNet, frozen=None) -> float:
    frozen = frozen or [False] * len(net.layers)
    return float(sum(np.abs(l.w).sum() for l, f in zip(net.layers, frozen) if not f))


def train(cfg: TrainConfig, data: Dataset, net: FeedForwardNet | None = None, verbose=False):
    """Mini-batch gradient descent with momentum. Returns (net, log).

    ``log`` holds one dict per epoch: epoch, loss, l1_mass, active_neurons_per_layer.
    """
    rng = np.random.default_rng(cfg.seed)
    if net is None:
        net = mlp(cfg.sizes, rng=rng)
        for l, a in zip(net.layers, cfg.activations):
            l.act = a
    else:
        net = net.copy()
    if net.n_in != data.inputs.shape[1]:
        raise ValueError(f"network input size {net.n_in} != data dimension {data.inputs.shape[1]}")
    frozen = list(cfg.frozen)
    vel = [(np.zeros_like(l.w), np.zeros_like(l.b)) for l in net.layers]
    log = []
    last_good = net.copy()
    m = len(data)
    for epoch in range(cfg.epochs):
        order = rng.permutation(m)
        for s in range(0, m, cfg.batch_size):
            idx = order[s:s + cfg.batch_size]
            loss, grads = loss_and_grads(net, data.inputs[idx], data.targets[idx], cfg.lambda_l1, frozen)
            if not np.isfinite(loss):
                raise TrainingError(f"loss became non-finite in epoch {epoch}", checkpoint=last_good)
            for i, g in enumerate(grads):
                if g is None:
                    continue
                vw, vb = vel[i]
                vw *= cfg.momentum
                vw -= cfg.lr * g[0]
                vb *= cfg.momentum
                vb -= cfg.lr * g[1]
                l = net.layers[i]
                l.w += vw
                l.b += vb
                if l.mask is not None:
                    l.w[~l.mask] = 0.0
        # epoch loss on a fixed slice keeps the log cheap
        ev = slice(0, min(m, 20_000))
        loss, _ = loss_and_grads(net, data.inputs[ev], data.targets[ev], cfg.lambda_l1, frozen)
        if not np.isfinite(loss):
            raise TrainingError(f"loss became non-finite in epoch {epoch}", checkpoint=last_good)
        last_good = net.copy()
        entry = {
            "epoch": epoch + 1,
            "loss": float(loss),
            "l1_mass": l1_mass(net, frozen),
            "active_neurons_per_layer": [active_neuron_count(net, i, 1e-3) for i in range(len(net.layers) - 1)],
        }
        log.append(entry)
        if verbose:
            print(entry)
    net.meta = {**net.meta, "train_config": asdict(cfg)}
    return net, log


def write_log_csv(log, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["epoch", "loss", "l1_mass", "active_neurons_per_layer"])
        for e in log:
            w.writerow([e["epoch"], f"{e['loss']:.8g}", f"{e['l1_mass']:.8g}",
                        " ".join(map(str, e["active_neurons_per_layer"]))])


# ---------------------------------------------------------------------------
# structure


def prune(net: FeedForwardNet, layer: int, count: int, strategy: str = "magnitude",
          data: Dataset | None = None, calib: int = 4096, exclude_below: float | None = None) -> FeedForwardNet:
    """Remove ``count`` live edges of weight layer ``layer``; removed edges stay masked.

    magnitude: smallest |w|. saliency: smallest |w * dL/dw| over a calibration batch.
    ``exclude_below`` keeps edges with |w| at or under it out of the candidate set,
    so already-dead edges are not "pruned" for free.
    """
    out = net.copy()
    l = out.layers[layer]
    mask = np.ones_like(l.w, dtype=bool) if l.mask is None else l.mask.copy()
    cand = mask if exclude_below is None else mask & (np.abs(l.w) > exclude_below)
    live = np.flatnonzero(cand.ravel())
    if count > len(live):
        raise ValueError(f"cannot prune {count} edges: layer {layer} has {len(live)} live edges")
    if count == 0:
        return out
    if strategy == "magnitude":
        score = np.abs(l.w.ravel()[live])
    elif strategy == "saliency":
        if data is None:
            raise ValueError("saliency pruning needs a calibration dataset")
        sl = slice(0, min(calib, len(data)))
        _, grads = loss_and_grads(out, data.inputs[sl], data.targets[sl])
        score = np.abs(l.w.ravel()[live] * grads[layer][0].ravel()[live])
    else:
        raise ValueError(f"unknown pruning strategy {strategy!r}")
    # stable sort: ties go to the lowest flat index
    drop = live[np.argsort(score, kind="stable")[:count]]
    mask.ravel()[drop] = False
    out.layers[layer] = Layer(l.w, l.b, l.act, mask)
    return out


def active_neuron_count(net: FeedForwardNet, layer: int, threshold: float = 1e-3, units=None) -> int:
    """Neurons fed by weight layer ``layer`` whose incoming and outgoing L1 mass both exceed threshold.

    For the output layer only the incoming mass is checked.
    """
    W = net.layers[layer].w
    inc = np.abs(W).sum(axis=0)
    if layer + 1 < len(net.layers):
        out = np.abs(net.layers[layer + 1].w).sum(axis=1)
    else:
        out = np.full(W.shape[1], np.inf)
    alive = (inc > threshold) & (out > threshold)
    if units is not None:
        alive = alive[list(units)]
    return int(alive.sum())


def nld2(n: int, hidden=(200, 200, 200), seed=0) -> FeedForwardNet:
    """Unconstrained sigmoid MLP n-hidden...-n."""
    return mlp([n, *hidden, n], rng=seed)


def complexity_report(net: FeedForwardNet, n: int) -> dict:
    W = net.parameter_count()
    return {"W": W, "log2W_over_n": math.log2(W) / n, "ratio_1dp": f"{math.log2(W) / n:.1f}"}


def nld3_from_hld(hld, case: int = 1, first_scale: float = 20.0, gain: float = 8.0,
                  dense_and: bool = True) -> FeedForwardNet:
    """HLD-initialized network with a fixed hyperplane layer.

    case 1 keeps Heaviside on the hyperplane layer; case 2 swaps it for a
    sigmoid with weights scaled by ``first_scale``. The AND/OR layers start at
    the compiled HLD scaled by ``gain`` (sigmoid), so the net begins close to
    the HLD. OR edges are masked to each coordinate's own terms.
    """
    from latdec.hld import hld_compile

    c = hld_compile(hld)
    l1, l2, l3 = c.layers
    if case == 1:
        first = Layer(l1.w, l1.b, "heaviside")
    elif case == 2:
        first = Layer(first_scale * l1.w, first_scale * l1.b, "sigmoid")
    else:
        raise ValueError("case must be 1 or 2")
    and_mask = None if dense_and else l2.w != 0
    second = Layer(gain * l2.w, gain * l2.b, "sigmoid", and_mask)
    third = Layer(gain * l3.w, gain * l3.b, "sigmoid", l3.w != 0)
    return FeedForwardNet([first, second, third], {"kind": f"nld3-case{case}"})


def decode_with_net(net: FeedForwardNet, Y) -> np.ndarray:
    from latdec.nets import forward

    return (forward(net, np.atleast_2d(Y)) > 0.5).astype(np.int64)


def mask_dead_units(net: FeedForwardNet, layer: int, units, threshold: float = 0.05) -> FeedForwardNet:
    """Disconnect neurons (among ``units``) of weight layer ``layer`` whose weights all fell below threshold."""
    out = net.copy()
    l, nxt = out.layers[layer], out.layers[layer + 1]
    cand = np.zeros(l.w.shape[1], dtype=bool)
    cand[list(units)] = True
    dead = cand & (np.abs(l.w).max(axis=0) <= threshold)
    m_in = np.ones_like(l.w, dtype=bool) if l.mask is None else l.mask.copy()
    m_out = np.ones_like(nxt.w, dtype=bool) if nxt.mask is None else nxt.mask.copy()
    m_in[:, dead] = False
    m_out[dead, :] = False
    out.layers[layer] = Layer(np.where(m_in, l.w, 0.0), l.b, l.act, m_in)
    out.layers[layer + 1] = Layer(np.where(m_out, nxt.w, 0.0), nxt.b, nxt.act, m_out)
    return out


@dataclass
class SweepRun:
    lambda_l1: float
    active: int  # active AND neurons of the watched coordinate after simplification
    net: FeedForwardNet
    log: list


def nld3_l1_sweep(hld, data: Dataset, lambdas, coordinate: int = 0, case: int = 1, epochs: int = 6,
                  finetune_epochs: int = 8, lr: float = 0.5, seed: int = 0,
                  threshold: float = 1e-3, gain: float = 8.0) -> list[SweepRun]:
    """L1 training from the HLD initialization, one run per lambda.

    Each run trains with L1, disconnects the watched coordinate's dead AND
    neurons, then fine-tunes without L1 so the remaining coordinates recover.
    """
    from latdec.hld import term_units

    units = term_units(hld, coordinate)
    base = nld3_from_hld(hld, case=case, gain=gain)
    sizes = [base.n_in] + [l.w.shape[1] for l in base.layers]
    acts = [l.act for l in base.layers]
    runs = []
    for lam in lambdas:
        cfg = TrainConfig(sizes=sizes, activations=acts, lambda_l1=lam, lr=lr, epochs=epochs,
                          frozen=[True, False, False], seed=seed)
        net, log = train(cfg, data, base)
        net = mask_dead_units(net, 1, units)
        ft = TrainConfig(sizes=sizes, activations=acts, lambda_l1=0.0, lr=lr, epochs=finetune_epochs,
                         frozen=[True, False, False], seed=seed + 1)
        net, log2 = train(ft, data, net)
        runs.append(SweepRun(lam, active_neuron_count(net, 1, threshold, units), net, log + log2))
    return runs
