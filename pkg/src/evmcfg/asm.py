"""Two-pass assembler for building test programs and synthetic contracts.

Program items are mnemonic strings, ``("PUSH", value[, width])`` tuples,
``Label(name)`` markers (emitted as JUMPDEST) and ``Ref(name)`` placeholders
(emitted as PUSH2 of the label's address).
"""

from __future__ import annotations

from dataclasses import dataclass

from evmcfg.opcodes import JUMPDEST, MNEMONIC_TO_BYTE


@dataclass(frozen=True)
class Label:
    name: str


@dataclass(frozen=True)
class Ref:
    name: str


def _push(value: int, width: int | None) -> bytes:
    if width is None:
        width = max(1, (value.bit_length() + 7) // 8)
    if not 1 <= width <= 32:
        raise ValueError(f"push width {width} out of range")
    return bytes([0x5F + width]) + value.to_bytes(width, "big")


def assemble(items) -> bytes:
    labels: dict[str, int] = {}
    pc = 0
    for item in items:
        if isinstance(item, Label):
            if item.name in labels:
                raise ValueError(f"duplicate label {item.name}")
            labels[item.name] = pc
            pc += 1
        elif isinstance(item, Ref):
            pc += 3
        elif isinstance(item, tuple):
            pc += len(_push(item[1], item[2] if len(item) > 2 else None))
        else:
            pc += 1

    out = bytearray()
    for item in items:
        if isinstance(item, Label):
            out.append(JUMPDEST)
        elif isinstance(item, Ref):
            out += _push(labels[item.name], 2)
        elif isinstance(item, tuple):
            out += _push(item[1], item[2] if len(item) > 2 else None)
        else:
            out.append(MNEMONIC_TO_BYTE[item])
    return bytes(out)
