"""Basic-block partitioning and control-flow graph recovery.

Jump targets are resolved only when the PUSH feeding a JUMP/JUMPI sits
immediately before it in the same block. Anything else is recorded as an
unresolved jump and contributes no edge.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from evmcfg.disasm import Instruction, disassemble
from evmcfg.opcodes import JUMP, JUMPDEST, JUMPI, is_halt


class Terminator(enum.Enum):
    JUMP = "Jump"
    COND_JUMP = "CondJump"
    HALT = "Halt"
    FALL_THROUGH = "FallThrough"


class EdgeKind(str, enum.Enum):
    JUMP_TAKEN = "JumpTaken"
    FALL_THROUGH = "FallThrough"


class Unresolved(enum.Enum):
    NO_PRECEDING_PUSH = "NoPrecedingPush"
    TARGET_NOT_JUMPDEST = "TargetNotJumpdest"
    TARGET_OUT_OF_RANGE = "TargetOutOfRange"


@dataclass(frozen=True)
class BasicBlock:
    id: int
    instructions: tuple[Instruction, ...]
    terminator: Terminator

    @property
    def start_offset(self) -> int:
        return self.instructions[0].offset

    @property
    def end_offset(self) -> int:
        last = self.instructions[-1]
        return last.offset + last.size

    @property
    def last(self) -> Instruction:
        return self.instructions[-1]


@dataclass(frozen=True, order=True)
class CfgEdge:
    src: int
    dst: int
    kind: EdgeKind


@dataclass(frozen=True)
class Cfg:
    blocks: tuple[BasicBlock, ...]
    edges: tuple[CfgEdge, ...]
    unresolved_jumps: tuple[tuple[int, Unresolved], ...] = ()

    @property
    def n(self) -> int:
        return len(self.blocks)

    def successors(self, block_id: int) -> list[int]:
        return [e.dst for e in self.edges if e.src == block_id]

    def reachable(self, entry: int = 0) -> set[int]:
        """Block ids reachable from ``entry`` along recovered edges."""
        if not self.blocks:
            return set()
        adj: dict[int, list[int]] = {}
        for e in self.edges:
            adj.setdefault(e.src, []).append(e.dst)
        seen = {entry}
        todo = [entry]
        while todo:
            for nxt in adj.get(todo.pop(), ()):
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return seen

    def to_dict(self) -> dict:
        return {
            "blocks": [
                {
                    "id": b.id,
                    "start": b.start_offset,
                    "terminator": b.terminator.value,
                    "instructions": [ins.asm for ins in b.instructions],
                }
                for b in self.blocks
            ],
            "edges": [{"src": e.src, "dst": e.dst, "kind": e.kind.value} for e in self.edges],
            "unresolved": [{"block": b, "reason": r.value} for b, r in self.unresolved_jumps],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_dot(self) -> str:
        lines = ["digraph cfg {", "  node [shape=box, fontname=monospace];"]
        if self.unresolved_jumps:
            lines.append("  /* unresolved jumps:")
            for b, reason in self.unresolved_jumps:
                lines.append(f"     B{b}: {reason.value}")
            lines.append("  */")
        for b in self.blocks:
            body = "\\l".join(ins.asm for ins in b.instructions)
            lines.append(f'  B{b.id} [label="B{b.id}@{b.start_offset:#x}\\l{body}\\l"];')
        for e in self.edges:
            style = "solid" if e.kind is EdgeKind.JUMP_TAKEN else "dashed"
            lines.append(f"  B{e.src} -> B{e.dst} [style={style}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _terminator_of(ins: Instruction) -> Terminator | None:
    if ins.opcode == JUMP:
        return Terminator.JUMP
    if ins.opcode == JUMPI:
        return Terminator.COND_JUMP
    if is_halt(ins.opcode):
        return Terminator.HALT
    return None


def partition_blocks(instrs: list[Instruction]) -> list[BasicBlock]:
    """Split an instruction stream into basic blocks in address order.

    Leaders are the first instruction, every JUMPDEST, and every instruction
    that follows a jump, branch or halt.
    """
    blocks: list[BasicBlock] = []
    current: list[Instruction] = []

    def close(term: Terminator) -> None:
        blocks.append(BasicBlock(len(blocks), tuple(current), term))
        current.clear()

    for ins in instrs:
        if ins.opcode == JUMPDEST and current:
            close(Terminator.FALL_THROUGH)
        current.append(ins)
        term = _terminator_of(ins)
        if term is not None:
            close(term)
    if current:
        close(Terminator.FALL_THROUGH)
    return blocks


def resolve_jump_targets(
    blocks: list[BasicBlock], instrs: list[Instruction]
) -> tuple[list[CfgEdge], list[tuple[int, Unresolved]]]:
    code_end = instrs[-1].offset + instrs[-1].size if instrs else 0
    jumpdest_block = {
        b.start_offset: b.id for b in blocks if b.instructions[0].opcode == JUMPDEST
    }
    edges: list[CfgEdge] = []
    unresolved: list[tuple[int, Unresolved]] = []
    for b in blocks:
        if b.terminator not in (Terminator.JUMP, Terminator.COND_JUMP):
            continue
        target = b.instructions[-2].push_value if len(b.instructions) >= 2 else None
        if target is None:
            unresolved.append((b.id, Unresolved.NO_PRECEDING_PUSH))
        elif target >= code_end:
            unresolved.append((b.id, Unresolved.TARGET_OUT_OF_RANGE))
        elif target not in jumpdest_block:
            unresolved.append((b.id, Unresolved.TARGET_NOT_JUMPDEST))
        else:
            edges.append(CfgEdge(b.id, jumpdest_block[target], EdgeKind.JUMP_TAKEN))
    return edges, unresolved


def add_sequential_edges(blocks: list[BasicBlock], edges: list[CfgEdge]) -> list[CfgEdge]:
    """Return ``edges`` plus a fall-through edge from every block that can run
    into its address-order successor (JUMPI or plain fall-through)."""
    out = set(edges)
    for b, nxt in zip(blocks, blocks[1:]):
        if b.terminator in (Terminator.COND_JUMP, Terminator.FALL_THROUGH):
            out.add(CfgEdge(b.id, nxt.id, EdgeKind.FALL_THROUGH))
    return sorted(out)


def build_cfg(runtime: bytes) -> Cfg:
    instrs = disassemble(runtime)
    blocks = partition_blocks(instrs)
    jump_edges, unresolved = resolve_jump_targets(blocks, instrs)
    edges = add_sequential_edges(blocks, jump_edges)
    return Cfg(tuple(blocks), tuple(edges), tuple(unresolved))


def cfg_from_dict(data: dict) -> Cfg:
    """Rebuild a :class:`Cfg` from the JSON interchange form.

    Instructions are re-assembled from their mnemonic text so offsets and
    immediates survive the round trip.
    """
    from evmcfg.opcodes import MNEMONIC_TO_BYTE

    blocks = []
    for entry in data["blocks"]:
        pc = entry["start"]
        instrs = []
        for text in entry["instructions"]:
            name, _, imm = text.partition(" ")
            if name.startswith("UNKNOWN("):
                op = int(name[8:-1], 16)
            else:
                op = MNEMONIC_TO_BYTE[name]
            immediate = bytes.fromhex(imm[2:]) if imm else None
            width = 0x5F < op < 0x80 and op - 0x5F
            truncated = immediate is not None and len(immediate) < width
            ins = Instruction(pc, op, immediate, truncated)
            instrs.append(ins)
            pc += ins.size
        blocks.append(BasicBlock(entry["id"], tuple(instrs), Terminator(entry["terminator"])))
    edges = sorted(CfgEdge(e["src"], e["dst"], EdgeKind(e["kind"])) for e in data["edges"])
    unresolved = tuple((u["block"], Unresolved(u["reason"])) for u in data.get("unresolved", []))
    return Cfg(tuple(blocks), tuple(edges), unresolved)
