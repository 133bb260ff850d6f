"""Synthetic labelled contracts with exactly known timestamp dependence.

Every contract has a selector dispatcher and a random number of functions
padded with straight-line filler, ``require``-style guards and occasional
dynamic (unresolvable) jumps. A vulnerable contract (label 1) branches on
TIMESTAMP inside one reachable function, with both arms rejoining afterwards.
Some safe contracts carry a TIMESTAMP in dead code placed after a halt, which
no edge reaches, so they stay label 0.
"""

from __future__ import annotations

import numpy as np

from evmcfg.asm import Label, Ref, assemble
from evmcfg.dataset import DatasetRecord

_FILLER = ["ADD", "MUL", "SUB", "AND", "OR", "XOR", "ISZERO", "NOT", "POP", "DUP1", "SWAP1",
           "MLOAD", "SLOAD", "CALLER", "CALLVALUE", "ADDRESS", "NUMBER", "GAS"]


class _Builder:
    def __init__(self, rng: np.random.Generator) -> None:
        self.rng = rng
        self.items: list = []
        self._n = 0

    def label(self, stem: str) -> str:
        self._n += 1
        return f"{stem}{self._n}"

    def filler(self, lo: int = 1, hi: int = 6) -> None:
        for _ in range(int(self.rng.integers(lo, hi + 1))):
            if self.rng.random() < 0.3:
                self.items.append(("PUSH", int(self.rng.integers(0, 256)), 1))
            else:
                self.items.append(str(self.rng.choice(_FILLER)))

    def require(self) -> None:
        ok = self.label("ok")
        self.items += ["CALLER", ("PUSH", int(self.rng.integers(1, 2**32)), 4), "EQ",
                       Ref(ok), "JUMPI", ("PUSH", 0, 1), "DUP1", "REVERT", Label(ok)]

    def timestamp_branch(self) -> None:
        early, join = self.label("early"), self.label("join")
        cmp = "GT" if self.rng.random() < 0.5 else "LT"
        self.items += ["TIMESTAMP", ("PUSH", int(self.rng.integers(1, 2**32)), 4), cmp,
                       Ref(early), "JUMPI"]
        self.filler()
        self.items += [Ref(join), "JUMP", Label(early)]
        self.filler()
        self.items += [Label(join)]

    def dead_timestamp(self) -> None:
        # sits right after a halt and starts without JUMPDEST: unreachable
        self.items += ["TIMESTAMP", "POP"]
        self.filler()
        self.items += ["STOP"]

    def dynamic_jump(self) -> None:
        back = self.label("dyn")
        self.items += [Ref(back), "DUP1", "POP", "JUMP", Label(back)]


def synthetic_contract(rng: np.random.Generator, vulnerable: bool) -> bytes:
    b = _Builder(rng)
    n_funcs = int(rng.integers(1, 5))
    funcs = [b.label("fn") for _ in range(n_funcs)]
    b.items += [("PUSH", 0x80, 1), ("PUSH", 0x40, 1), "MSTORE", ("PUSH", 0, 1),
                "CALLDATALOAD", ("PUSH", 0xE0, 1), "SHR"]
    for name in funcs:
        b.items += ["DUP1", ("PUSH", int(rng.integers(0, 2**32)), 4), "EQ", Ref(name), "JUMPI"]
    b.items += [("PUSH", 0, 1), "DUP1", "REVERT"]

    target = int(rng.integers(n_funcs)) if vulnerable else -1
    for i, name in enumerate(funcs):
        b.items.append(Label(name))
        b.filler()
        if rng.random() < 0.5:
            b.require()
            b.filler()
        if i == target:
            b.timestamp_branch()
            b.filler()
        if rng.random() < 0.15:
            b.dynamic_jump()
        b.filler(0, 3)
        b.items.append("STOP" if rng.random() < 0.5 else "RETURN")
        if not vulnerable and rng.random() < 0.2:
            b.dead_timestamp()
    return assemble(b.items)


def synthetic_corpus(n: int = 400, seed: int = 42, positive_fraction: float = 0.5
                     ) -> list[DatasetRecord]:
    """``n`` runtime-only records; exactly ``round(n * positive_fraction)`` are vulnerable."""
    rng = np.random.default_rng(seed)
    n_pos = round(n * positive_fraction)
    labels = np.array([1] * n_pos + [0] * (n - n_pos))
    rng.shuffle(labels)
    return [
        DatasetRecord(f"syn-{i:04d}", "0x" + synthetic_contract(rng, bool(y)).hex(), int(y))
        for i, y in enumerate(labels)
    ]
