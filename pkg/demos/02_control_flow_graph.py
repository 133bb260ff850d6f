"""Recover basic blocks and jump / fall-through edges, then export them.

Run: python demos/02_control_flow_graph.py > cfg.dot && dot -Tpng cfg.dot -o cfg.png
"""

import sys

from evmcfg.asm import Label, Ref, assemble
from evmcfg.cfg import build_cfg

code = assemble([
    ("PUSH", 0, 1), "CALLDATALOAD", ("PUSH", 0xE0, 1), "SHR",
    "DUP1", ("PUSH", 0xA9059CBB, 4), "EQ", Ref("transfer"), "JUMPI",
    ("PUSH", 0, 1), "DUP1", "REVERT",
    Label("transfer"), "TIMESTAMP", ("PUSH", 1000, 2), "GT", Ref("open"), "JUMPI",
    "STOP",
    Label("open"), "CALLER", "SLOAD", "POP",
    "DUP1", "JUMP",  # computed jump: stays unresolved
])
cfg = build_cfg(code)

for block in cfg.blocks:
    print(f"B{block.id} @{block.start_offset:#06x} {block.terminator.value:<11}",
          " ".join(ins.mnemonic for ins in block.instructions), file=sys.stderr)
print("unresolved:", cfg.unresolved_jumps, file=sys.stderr)
print("reachable:", sorted(cfg.reachable()), file=sys.stderr)

sys.stdout.write(cfg.to_dot())
