"""Graph convolutional network for binary graph classification, in plain numpy.

Each hidden layer computes ``H' = ReLU(A_hat @ H @ W)``. Node embeddings from
the last layer are mean-pooled and passed through one dense unit whose sigmoid
gives the probability that the contract is vulnerable. Gradients are derived
by hand and trained with Adam, one graph per update.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from evmcfg.encode import DEFAULT_MAX_NODES, EncodedGraph
from evmcfg.errors import DivergedLoss, EmptyDataset, ShapeMismatch

MAX_LAYERS = 6


@dataclass(frozen=True)
class GcnConfig:
    num_hidden_layers: int = 2
    hidden_width: int = 64
    input_width: int = DEFAULT_MAX_NODES
    seed: int = 42

    def __post_init__(self) -> None:
        if not 1 <= self.num_hidden_layers <= MAX_LAYERS:
            raise ValueError(f"num_hidden_layers must be in 1..{MAX_LAYERS}")
        if self.hidden_width < 1 or self.input_width < 1:
            raise ValueError("layer widths must be positive")

    @property
    def widths(self) -> list[int]:
        return [self.input_width] + [self.hidden_width] * self.num_hidden_layers


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    epochs: int = 100
    seed: int = 42
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    threshold: float = 0.5

    def __post_init__(self) -> None:
        if self.learning_rate < 0 or not math.isfinite(self.learning_rate):
            raise ValueError("learning_rate must be a finite non-negative number")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1 and self.eps > 0):
            raise ValueError("invalid Adam hyperparameters")
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must lie in (0, 1)")


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


@dataclass
class GcnModel:
    config: GcnConfig
    layers: list[np.ndarray]
    readout: np.ndarray
    bias: float = 0.0
    threshold: float = 0.5

    def __post_init__(self) -> None:
        widths = self.config.widths
        if len(self.layers) != self.config.num_hidden_layers:
            raise ShapeMismatch(
                f"expected {self.config.num_hidden_layers} layers, got {len(self.layers)}"
            )
        for i, w in enumerate(self.layers):
            if w.shape != (widths[i], widths[i + 1]):
                raise ShapeMismatch(
                    f"layer {i} is {w.shape}, expected {(widths[i], widths[i + 1])}"
                )
        if self.readout.shape != (widths[-1],):
            raise ShapeMismatch(f"readout is {self.readout.shape}, expected {(widths[-1],)}")

    @classmethod
    def initialize(cls, config: GcnConfig) -> GcnModel:
        rng = np.random.default_rng(config.seed)
        widths = config.widths
        layers = [glorot_uniform(rng, a, b) for a, b in zip(widths, widths[1:])]
        readout = glorot_uniform(rng, widths[-1], 1)[:, 0]
        return cls(config, layers, readout, 0.0)

    def copy(self) -> GcnModel:
        return GcnModel(
            self.config, [w.copy() for w in self.layers], self.readout.copy(), self.bias,
            self.threshold,
        )

    def parameters(self) -> list[np.ndarray]:
        return [*self.layers, self.readout]

    # -- checkpoints --

    def to_dict(self) -> dict:
        return {
            "config": {**asdict(self.config), "threshold": self.threshold},
            "layers": [w.tolist() for w in self.layers],
            "readout": {"weights": self.readout.tolist(), "bias": self.bias},
        }

    @classmethod
    def from_dict(cls, data: dict) -> GcnModel:
        conf = dict(data["config"])
        threshold = conf.pop("threshold", 0.5)
        return cls(
            GcnConfig(**conf),
            [np.array(w, dtype=float) for w in data["layers"]],
            np.array(data["readout"]["weights"], dtype=float),
            float(data["readout"]["bias"]),
            threshold,
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> GcnModel:
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class ForwardTrace:
    propagated: list[np.ndarray]  # A_hat @ H^l, cached for the weight gradient
    pre_activations: list[np.ndarray]
    activations: list[np.ndarray]  # H^0 .. H^L
    pooled: np.ndarray
    logit: float
    probability: float


@dataclass
class Gradients:
    layers: list[np.ndarray]
    readout: np.ndarray
    bias: float

    def as_list(self) -> list[np.ndarray]:
        return [*self.layers, self.readout]


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def binary_cross_entropy(logit: float, label: int) -> float:
    """BCE of a sigmoid output, evaluated from the logit so it never hits log(0)."""
    # -[y log p + (1-y) log(1-p)] = softplus(logit) - y * logit
    if logit > 0:
        softplus = logit + math.log1p(math.exp(-logit))
    else:
        softplus = math.log1p(math.exp(logit))
    return softplus - label * logit


def probability_to_logit(p: float) -> float:
    return math.log(p) - math.log1p(-p)


def _check_input(model: GcnModel, g: EncodedGraph) -> None:
    if g.width != model.config.input_width:
        raise ShapeMismatch(
            f"graph feature width {g.width} does not match model input width "
            f"{model.config.input_width}"
        )


def forward(model: GcnModel, g: EncodedGraph) -> ForwardTrace:
    _check_input(model, g)
    h = g.features
    propagated, pre, acts = [], [], [h]
    for w in model.layers:
        ah = g.a_hat @ h
        z = ah @ w
        h = np.maximum(z, 0.0)
        propagated.append(ah)
        pre.append(z)
        acts.append(h)
    pooled = h.mean(axis=0)
    logit = float(pooled @ model.readout + model.bias)
    return ForwardTrace(propagated, pre, acts, pooled, logit, sigmoid(logit))


def predict(model: GcnModel, g: EncodedGraph) -> tuple[int, float]:
    p = forward(model, g).probability
    return int(p >= model.threshold), p


def backward(
    model: GcnModel, g: EncodedGraph, label: int, trace: ForwardTrace | None = None
) -> Gradients:
    """Exact gradient of the BCE loss with respect to every parameter."""
    if trace is None:
        trace = forward(model, g)
    d_logit = trace.probability - label
    d_readout = d_logit * trace.pooled
    d_h = np.broadcast_to(d_logit * model.readout / g.n, trace.activations[-1].shape)
    d_layers: list[np.ndarray] = [None] * len(model.layers)  # type: ignore[list-item]
    for i in reversed(range(len(model.layers))):
        d_z = d_h * (trace.pre_activations[i] > 0)
        d_layers[i] = trace.propagated[i].T @ d_z
        if i:
            d_h = g.a_hat.T @ (d_z @ model.layers[i].T)
    return Gradients(d_layers, d_readout, float(d_logit))


@dataclass
class Adam:
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)

    def step(self, params: list[np.ndarray], grads: list[np.ndarray], lr: float) -> None:
        """Update ``params`` in place."""
        if not self.m:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def train(
    model: GcnModel,
    dataset: list[EncodedGraph],
    config: TrainConfig = TrainConfig(),
) -> tuple[GcnModel, list[float]]:
    """Train a copy of ``model``; returns it with the mean loss of each epoch.

    Graphs are visited one at a time in an order reshuffled every epoch by a
    generator seeded from ``config.seed``.
    """
    if not dataset:
        raise EmptyDataset("training set is empty")
    for g in dataset:
        _check_input(model, g)
        if g.label not in (0, 1):
            raise ValueError("every training graph needs a 0/1 label")

    model = model.copy()
    model.threshold = config.threshold
    rng = np.random.default_rng(config.seed)
    opt = Adam(config.beta1, config.beta2, config.eps)
    # bias is a scalar; keep it in a 1-element array so Adam can update it in place
    bias = np.array([model.bias])
    history: list[float] = []
    for epoch in range(config.epochs):
        total = 0.0
        for idx in rng.permutation(len(dataset)):
            g = dataset[idx]
            trace = forward(model, g)
            loss = binary_cross_entropy(trace.logit, g.label)
            if not math.isfinite(loss):
                raise DivergedLoss(f"non-finite loss {loss} at epoch {epoch}, graph {idx}")
            total += loss
            grads = backward(model, g, g.label, trace)
            opt.step(
                [*model.parameters(), bias], [*grads.as_list(), np.array([grads.bias])],
                config.learning_rate,
            )
            model.bias = float(bias[0])
        history.append(total / len(dataset))
    return model, history


def evaluate_loss(model: GcnModel, dataset: list[EncodedGraph]) -> float:
    return sum(binary_cross_entropy(forward(model, g).logit, g.label) for g in dataset) / len(
        dataset
    )
