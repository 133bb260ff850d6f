"""Exception hierarchy shared by the pipeline stages."""

from __future__ import annotations


class EvmCfgError(Exception):
    """Base class for every error raised by this package."""


class BytecodeError(EvmCfgError):
    pass


class OddLength(BytecodeError):
    def __init__(self, digits: int) -> None:
        super().__init__(f"hex string has an odd number of digits ({digits})")
        self.digits = digits


class NonHexCharacter(BytecodeError):
    def __init__(self, char: str, position: int) -> None:
        super().__init__(f"non-hex character {char!r} at position {position}")
        self.char = char
        self.position = position


class EmptyRuntime(BytecodeError):
    pass


class GraphError(EvmCfgError):
    pass


class EmptyGraph(GraphError):
    pass


class TooManyNodes(GraphError):
    def __init__(self, n: int, max_nodes: int) -> None:
        super().__init__(f"graph has {n} nodes, more than max_nodes={max_nodes}")
        self.n = n
        self.max_nodes = max_nodes


class ShapeMismatch(EvmCfgError):
    pass


class EmptyDataset(EvmCfgError):
    pass


class DivergedLoss(EvmCfgError):
    pass


class LengthMismatch(EvmCfgError):
    pass


class EmptyInput(EvmCfgError):
    pass


class MalformedRecord(EvmCfgError):
    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason
