"""EVM opcode inventory, pinned to the London revision.

London defines 143 opcodes (INVALID included). PUSH0 (Shanghai) and later
additions such as TLOAD/MCOPY are deliberately absent so that decoding does
not drift with the age of the corpus.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Category(enum.Enum):
    ARITHMETIC = "Arithmetic"
    COMPARISON = "Comparison"
    ENCRYPTION = "Encryption"
    ENVIRONMENT = "Environment"
    BLOCK = "Block"
    STORAGE_EXEC = "StorageExec"
    PUSH = "Push"
    DUP = "Dup"
    SWAP = "Swap"
    LOG = "Log"
    SYSTEM = "System"
    UNKNOWN = "Unknown"


@dataclass(frozen=True, slots=True)
class OpcodeInfo:
    mnemonic: str
    byte: int
    category: Category
    immediate_width: int = 0

    @property
    def defined(self) -> bool:
        return self.category is not Category.UNKNOWN


_NAMED: dict[int, tuple[str, Category]] = {
    # stop & arithmetic
    0x00: ("STOP", Category.ARITHMETIC),
    0x01: ("ADD", Category.ARITHMETIC),
    0x02: ("MUL", Category.ARITHMETIC),
    0x03: ("SUB", Category.ARITHMETIC),
    0x04: ("DIV", Category.ARITHMETIC),
    0x05: ("SDIV", Category.ARITHMETIC),
    0x06: ("MOD", Category.ARITHMETIC),
    0x07: ("SMOD", Category.ARITHMETIC),
    0x08: ("ADDMOD", Category.ARITHMETIC),
    0x09: ("MULMOD", Category.ARITHMETIC),
    0x0A: ("EXP", Category.ARITHMETIC),
    0x0B: ("SIGNEXTEND", Category.ARITHMETIC),
    # comparison & bitwise
    0x10: ("LT", Category.COMPARISON),
    0x11: ("GT", Category.COMPARISON),
    0x12: ("SLT", Category.COMPARISON),
    0x13: ("SGT", Category.COMPARISON),
    0x14: ("EQ", Category.COMPARISON),
    0x15: ("ISZERO", Category.COMPARISON),
    0x16: ("AND", Category.COMPARISON),
    0x17: ("OR", Category.COMPARISON),
    0x18: ("XOR", Category.COMPARISON),
    0x19: ("NOT", Category.COMPARISON),
    0x1A: ("BYTE", Category.COMPARISON),
    0x1B: ("SHL", Category.COMPARISON),
    0x1C: ("SHR", Category.COMPARISON),
    0x1D: ("SAR", Category.COMPARISON),
    0x20: ("SHA3", Category.ENCRYPTION),
    # environment
    0x30: ("ADDRESS", Category.ENVIRONMENT),
    0x31: ("BALANCE", Category.ENVIRONMENT),
    0x32: ("ORIGIN", Category.ENVIRONMENT),
    0x33: ("CALLER", Category.ENVIRONMENT),
    0x34: ("CALLVALUE", Category.ENVIRONMENT),
    0x35: ("CALLDATALOAD", Category.ENVIRONMENT),
    0x36: ("CALLDATASIZE", Category.ENVIRONMENT),
    0x37: ("CALLDATACOPY", Category.ENVIRONMENT),
    0x38: ("CODESIZE", Category.ENVIRONMENT),
    0x39: ("CODECOPY", Category.ENVIRONMENT),
    0x3A: ("GASPRICE", Category.ENVIRONMENT),
    0x3B: ("EXTCODESIZE", Category.ENVIRONMENT),
    0x3C: ("EXTCODECOPY", Category.ENVIRONMENT),
    0x3D: ("RETURNDATASIZE", Category.ENVIRONMENT),
    0x3E: ("RETURNDATACOPY", Category.ENVIRONMENT),
    0x3F: ("EXTCODEHASH", Category.ENVIRONMENT),
    # block
    0x40: ("BLOCKHASH", Category.BLOCK),
    0x41: ("COINBASE", Category.BLOCK),
    0x42: ("TIMESTAMP", Category.BLOCK),
    0x43: ("NUMBER", Category.BLOCK),
    0x44: ("DIFFICULTY", Category.BLOCK),
    0x45: ("GASLIMIT", Category.BLOCK),
    0x46: ("CHAINID", Category.BLOCK),
    0x47: ("SELFBALANCE", Category.BLOCK),
    0x48: ("BASEFEE", Category.BLOCK),
    # stack, memory, storage, flow
    0x50: ("POP", Category.STORAGE_EXEC),
    0x51: ("MLOAD", Category.STORAGE_EXEC),
    0x52: ("MSTORE", Category.STORAGE_EXEC),
    0x53: ("MSTORE8", Category.STORAGE_EXEC),
    0x54: ("SLOAD", Category.STORAGE_EXEC),
    0x55: ("SSTORE", Category.STORAGE_EXEC),
    0x56: ("JUMP", Category.STORAGE_EXEC),
    0x57: ("JUMPI", Category.STORAGE_EXEC),
    0x58: ("PC", Category.STORAGE_EXEC),
    0x59: ("MSIZE", Category.STORAGE_EXEC),
    0x5A: ("GAS", Category.STORAGE_EXEC),
    0x5B: ("JUMPDEST", Category.STORAGE_EXEC),
    # system
    0xF0: ("CREATE", Category.SYSTEM),
    0xF1: ("CALL", Category.SYSTEM),
    0xF2: ("CALLCODE", Category.SYSTEM),
    0xF3: ("RETURN", Category.SYSTEM),
    0xF4: ("DELEGATECALL", Category.SYSTEM),
    0xF5: ("CREATE2", Category.SYSTEM),
    0xFA: ("STATICCALL", Category.SYSTEM),
    0xFD: ("REVERT", Category.SYSTEM),
    0xFE: ("INVALID", Category.SYSTEM),
    0xFF: ("SELFDESTRUCT", Category.SYSTEM),
}


def _build_table() -> tuple[OpcodeInfo, ...]:
    table = []
    for b in range(256):
        if b in _NAMED:
            name, cat = _NAMED[b]
            table.append(OpcodeInfo(name, b, cat))
        elif 0x60 <= b <= 0x7F:
            width = b - 0x5F
            table.append(OpcodeInfo(f"PUSH{width}", b, Category.PUSH, width))
        elif 0x80 <= b <= 0x8F:
            table.append(OpcodeInfo(f"DUP{b - 0x7F}", b, Category.DUP))
        elif 0x90 <= b <= 0x9F:
            table.append(OpcodeInfo(f"SWAP{b - 0x8F}", b, Category.SWAP))
        elif 0xA0 <= b <= 0xA4:
            table.append(OpcodeInfo(f"LOG{b - 0xA0}", b, Category.LOG))
        else:
            table.append(OpcodeInfo(f"UNKNOWN(0x{b:02x})", b, Category.UNKNOWN))
    return tuple(table)


OPCODE_TABLE: tuple[OpcodeInfo, ...] = _build_table()
MNEMONIC_TO_BYTE: dict[str, int] = {
    info.mnemonic: info.byte for info in OPCODE_TABLE if info.defined
}

STOP = 0x00
TIMESTAMP = 0x42
CODECOPY = 0x39
JUMP = 0x56
JUMPI = 0x57
JUMPDEST = 0x5B
RETURN = 0xF3
REVERT = 0xFD
INVALID = 0xFE
SELFDESTRUCT = 0xFF

HALTS = frozenset({STOP, RETURN, REVERT, INVALID, SELFDESTRUCT})


def opcode_info(byte: int) -> OpcodeInfo:
    """Inventory entry for ``byte``; undefined bytes come back as UNKNOWN."""
    if not 0 <= byte <= 0xFF:
        raise ValueError(f"opcode byte out of range: {byte}")
    return OPCODE_TABLE[byte]


def is_push(byte: int) -> bool:
    return 0x60 <= byte <= 0x7F


def is_halt(byte: int) -> bool:
    """True for opcodes after which execution cannot continue in sequence."""
    return byte in HALTS or not OPCODE_TABLE[byte].defined
