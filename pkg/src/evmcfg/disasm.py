"""Hex parsing, contract section splitting and linear-sweep disassembly."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

from evmcfg.errors import EmptyRuntime, NonHexCharacter, OddLength
from evmcfg.opcodes import CODECOPY, RETURN, OpcodeInfo, is_halt, opcode_info

log = logging.getLogger(__name__)

_HEX_DIGITS = frozenset("0123456789abcdefABCDEF")

# Fixed auxdata size used by older compilers (bzzr0 swarm hash + length suffix).
LEGACY_AUXDATA_SIZE = 43


class Origin(enum.Enum):
    RUNTIME_ONLY = "runtime"
    CREATION_WITH_DEPLOY = "creation"


@dataclass(frozen=True)
class Bytecode:
    code: bytes
    origin: Origin = Origin.RUNTIME_ONLY

    def __post_init__(self) -> None:
        if not self.code:
            raise EmptyRuntime("bytecode is empty")

    def __len__(self) -> int:
        return len(self.code)


@dataclass(frozen=True)
class ContractSections:
    deployment: bytes
    runtime: bytes
    auxdata: bytes


@dataclass(frozen=True, slots=True)
class Instruction:
    offset: int
    opcode: int
    immediate: bytes | None = None
    truncated: bool = False

    @property
    def info(self) -> OpcodeInfo:
        return opcode_info(self.opcode)

    @property
    def mnemonic(self) -> str:
        return opcode_info(self.opcode).mnemonic

    @property
    def size(self) -> int:
        return 1 + (len(self.immediate) if self.immediate is not None else 0)

    @property
    def push_value(self) -> int | None:
        """Integer value of a complete PUSH immediate, else None."""
        if self.immediate is None or self.truncated:
            return None
        return int.from_bytes(self.immediate, "big")

    def encode(self) -> bytes:
        return bytes([self.opcode]) + (self.immediate or b"")

    @property
    def asm(self) -> str:
        """Mnemonic plus immediate, without the offset."""
        if self.immediate is None:
            return self.mnemonic
        return f"{self.mnemonic} 0x{self.immediate.hex()}"

    def __str__(self) -> str:
        return f"{self.offset:04x}: {self.asm}"


def parse_hex(text: str, origin: Origin = Origin.RUNTIME_ONLY) -> Bytecode:
    """Decode a hex string into :class:`Bytecode`.

    An optional ``0x`` prefix and any whitespace are ignored. Raises
    :class:`OddLength`, :class:`NonHexCharacter` (with the offending position in
    the stripped digit string) or :class:`EmptyRuntime`.
    """
    digits = "".join(text.split())
    if digits[:2] in ("0x", "0X"):
        digits = digits[2:]
    if not digits:
        raise EmptyRuntime("no hex digits in input")
    for pos, ch in enumerate(digits):
        if ch not in _HEX_DIGITS:
            raise NonHexCharacter(ch, pos)
    if len(digits) % 2:
        raise OddLength(len(digits))
    return Bytecode(bytes.fromhex(digits), origin)


def disassemble(runtime: bytes) -> list[Instruction]:
    """Linear sweep over ``runtime``.

    Every byte decodes; undefined bytes become UNKNOWN instructions. A PUSH
    whose immediate runs past the end keeps the remaining bytes and is marked
    ``truncated``.
    """
    out: list[Instruction] = []
    pc = 0
    n = len(runtime)
    while pc < n:
        op = runtime[pc]
        width = opcode_info(op).immediate_width
        if width:
            imm = runtime[pc + 1 : pc + 1 + width]
            out.append(Instruction(pc, op, imm, truncated=len(imm) < width))
            pc += 1 + len(imm)
        else:
            out.append(Instruction(pc, op))
            pc += 1
    return out


def encode_instructions(instrs: list[Instruction]) -> bytes:
    return b"".join(ins.encode() for ins in instrs)


def format_disassembly(instrs: list[Instruction]) -> str:
    return "".join(f"{ins}\n" for ins in instrs)


# -- auxdata detection ---------------------------------------------------------


def _cbor_item_end(buf: bytes, pos: int) -> int | None:
    """Offset just past the CBOR data item starting at ``pos``; None if malformed."""
    if pos >= len(buf):
        return None
    head = buf[pos]
    major, ai = head >> 5, head & 0x1F
    pos += 1
    if ai < 24:
        arg = ai
    elif ai in (24, 25, 26, 27):
        size = 1 << (ai - 24)
        if pos + size > len(buf):
            return None
        arg = int.from_bytes(buf[pos : pos + size], "big")
        pos += size
    elif ai == 31 and major in (2, 3, 4, 5):
        return _cbor_indefinite_end(buf, pos, major)
    else:
        return None

    if major in (0, 1, 7):
        return pos
    if major in (2, 3):
        return pos + arg if pos + arg <= len(buf) else None
    if major == 6:
        return _cbor_item_end(buf, pos)
    count = arg if major == 4 else 2 * arg
    for _ in range(count):
        end = _cbor_item_end(buf, pos)
        if end is None:
            return None
        pos = end
    return pos


def _cbor_indefinite_end(buf: bytes, pos: int, major: int) -> int | None:
    while pos < len(buf):
        if buf[pos] == 0xFF:
            return pos + 1
        end = _cbor_item_end(buf, pos)
        if end is None:
            return None
        if major in (2, 3) and buf[pos] >> 5 != major:
            return None
        pos = end
    return None


def cbor_trailer_size(code: bytes) -> int | None:
    """Size of a well-formed trailing metadata blob plus its 2-byte length.

    The last two bytes give the payload length L big-endian; the L bytes before
    them must be exactly one CBOR map. At least one byte of code must remain in
    front of the trailer.
    """
    if len(code) < 3:
        return None
    length = int.from_bytes(code[-2:], "big")
    if length == 0 or length + 2 >= len(code):
        return None
    payload = code[-(length + 2) : -2]
    if payload[0] >> 5 != 5:
        return None
    if _cbor_item_end(payload, 0) != len(payload):
        return None
    return length + 2


def _legacy_tail_is_data(code: bytes) -> bool:
    # The 43-byte tail counts as data only if the code in front of it ends on an
    # instruction boundary with a halt and the tail itself does not decode
    # cleanly (it hits an undefined opcode or a truncated PUSH).
    cut = len(code) - LEGACY_AUXDATA_SIZE
    head = disassemble(code[:cut])
    last = head[-1]
    if last.truncated or not is_halt(last.opcode):
        return False
    tail = disassemble(code[cut:])
    return any(ins.truncated or not ins.info.defined for ins in tail)


def auxdata_size(code: bytes) -> int:
    size = cbor_trailer_size(code)
    if size is not None:
        return size
    if len(code) > LEGACY_AUXDATA_SIZE and _legacy_tail_is_data(code):
        return LEGACY_AUXDATA_SIZE
    return 0


# -- deployment detection ------------------------------------------------------


def _codecopy_args(instrs: list[Instruction], idx: int) -> tuple | None:
    """Statically evaluate (dest, offset, size) for the CODECOPY at ``idx``.

    Walks back to the start of the enclosing straight-line run and replays
    PUSH/DUP/SWAP/POP on an abstract stack; any other opcode makes the stack
    contents unknown.
    """
    start = idx
    while start > 0:
        prev = instrs[start - 1]
        if prev.opcode == 0x5B or is_halt(prev.opcode) or prev.opcode in (0x56, 0x57):
            break
        start -= 1
    stack: list[int | None] = []

    def pop() -> int | None:
        return stack.pop() if stack else None

    for ins in instrs[start:idx]:
        op = ins.opcode
        if ins.immediate is not None:
            stack.append(ins.push_value)
        elif 0x80 <= op <= 0x8F:
            depth = op - 0x7F
            stack.append(stack[-depth] if depth <= len(stack) else None)
        elif 0x90 <= op <= 0x9F:
            depth = op - 0x8F
            if depth < len(stack):
                stack[-1], stack[-1 - depth] = stack[-1 - depth], stack[-1]
            else:
                stack.clear()
        elif op == 0x50:
            pop()
        else:
            stack.clear()
    return pop(), pop(), pop()


def find_runtime_region(code: bytes) -> tuple[int, int] | None:
    """Locate the (offset, size) region copied by the constructor epilogue.

    Looks for the first CODECOPY whose source offset and size resolve to
    constants and which is followed by a RETURN.
    """
    instrs = disassemble(code)
    for i, ins in enumerate(instrs):
        if ins.opcode != CODECOPY:
            continue
        _, offset, size = _codecopy_args(instrs, i)
        if offset is None or size is None:
            continue
        if not (0 < offset < len(code) and size > 0 and offset + size <= len(code)):
            continue
        if any(later.opcode == RETURN for later in instrs[i + 1 :]):
            return offset, size
    return None


def split_sections(code: Bytecode) -> ContractSections:
    """Split bytecode into deployment, runtime and auxdata sections.

    Concatenating the three sections always reproduces ``code.code``.
    """
    raw = code.code
    deploy_end = 0
    copied_end = len(raw)
    if code.origin is Origin.CREATION_WITH_DEPLOY:
        region = find_runtime_region(raw)
        if region is None:
            log.warning("no CODECOPY/RETURN epilogue found; treating input as runtime code")
        else:
            deploy_end, size = region
            copied_end = deploy_end + size
    body = raw[deploy_end:]
    if not body:
        raise EmptyRuntime("no runtime code after the deployment section")

    aux = auxdata_size(body)
    if aux == 0 and copied_end < len(raw):
        # Constructor arguments trail the copied region; they stay with auxdata.
        inner = cbor_trailer_size(raw[deploy_end:copied_end])
        if inner is not None:
            aux = inner + (len(raw) - copied_end)
    runtime = body[: len(body) - aux]
    if not runtime:
        raise EmptyRuntime("splitting leaves no runtime code")
    return ContractSections(raw[:deploy_end], runtime, body[len(body) - aux :])
