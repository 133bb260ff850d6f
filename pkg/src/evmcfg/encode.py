"""Turn a CFG into the (normalized adjacency, node features) pair fed to the GCN."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from evmcfg.cfg import Cfg
from evmcfg.errors import EmptyGraph, ShapeMismatch, TooManyNodes

DEFAULT_MAX_NODES = 256


@dataclass(frozen=True)
class EncodedGraph:
    a_hat: np.ndarray
    features: np.ndarray
    label: int | None = None

    def __post_init__(self) -> None:
        n = self.a_hat.shape[0]
        if self.a_hat.shape != (n, n) or self.features.shape[0] != n:
            raise ShapeMismatch(
                f"a_hat {self.a_hat.shape} and features {self.features.shape} disagree"
            )
        self.a_hat.setflags(write=False)
        self.features.setflags(write=False)

    @property
    def n(self) -> int:
        return self.a_hat.shape[0]

    @property
    def width(self) -> int:
        return self.features.shape[1]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "a_hat": self.a_hat.tolist(),
            "x": self.features.tolist(),
            "label": self.label,
        }

    def to_json(self) -> str:
        # json writes floats with repr(), which round-trips exactly (17 sig. digits)
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> EncodedGraph:
        graph = cls(
            np.array(data["a_hat"], dtype=float),
            np.array(data["x"], dtype=float),
            data.get("label"),
        )
        if graph.n != data["n"]:
            raise ShapeMismatch(f"declared n={data['n']} but a_hat is {graph.n}x{graph.n}")
        return graph


def adjacency_from_cfg(cfg: Cfg) -> np.ndarray:
    """Binary directed adjacency; parallel edges of different kinds collapse to 1."""
    n = len(cfg.blocks)
    if n == 0:
        raise EmptyGraph("CFG has no blocks")
    adj = np.zeros((n, n))
    for e in cfg.edges:
        adj[e.src, e.dst] = 1.0
    return adj


def self_loop(adj: np.ndarray) -> np.ndarray:
    return adj + np.eye(adj.shape[0])


def degree_matrix(adj: np.ndarray) -> np.ndarray:
    """Diagonal row-sum degree of the self-looped adjacency."""
    return np.diag(self_loop(adj).sum(axis=1))


def normalize(adj: np.ndarray) -> np.ndarray:
    """D^-1/2 (A + I) D^-1/2 with D the row-sum degree of A + I.

    Directed input stays directed; no symmetrization is applied.
    """
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise ShapeMismatch(f"adjacency must be square, got {adj.shape}")
    looped = self_loop(adj)
    deg = looped.sum(axis=1)
    return looped / np.sqrt(np.outer(deg, deg))


def identity_features(n: int, width: int) -> np.ndarray:
    """n x width one-hot rows (identity zero-padded on the right)."""
    return np.eye(n, width)


def truncate_cfg(cfg: Cfg, max_nodes: int) -> Cfg:
    """Keep the first ``max_nodes`` blocks and the edges among them."""
    keep = cfg.blocks[:max_nodes]
    edges = tuple(e for e in cfg.edges if e.src < max_nodes and e.dst < max_nodes)
    unresolved = tuple(u for u in cfg.unresolved_jumps if u[0] < max_nodes)
    return Cfg(keep, edges, unresolved)


def encode(
    cfg: Cfg,
    max_nodes: int = DEFAULT_MAX_NODES,
    label: int | None = None,
    truncate: bool = False,
) -> EncodedGraph:
    n = len(cfg.blocks)
    if n == 0:
        raise EmptyGraph("CFG has no blocks")
    if n > max_nodes:
        if not truncate:
            raise TooManyNodes(n, max_nodes)
        cfg = truncate_cfg(cfg, max_nodes)
        n = max_nodes
    a_hat = normalize(adjacency_from_cfg(cfg))
    return EncodedGraph(a_hat, identity_features(n, max_nodes), label)
