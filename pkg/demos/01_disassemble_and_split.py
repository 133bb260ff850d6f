"""Decode a contract and separate deployment code, runtime code and metadata.

Run: python demos/01_disassemble_and_split.py
"""

from evmcfg.asm import Label, Ref, assemble
from evmcfg.disasm import Bytecode, Origin, disassemble, format_disassembly, split_sections

# %% A small runtime program: store TIMESTAMP if it is past a deadline.
runtime = assemble([
    "TIMESTAMP", ("PUSH", 0x65000000, 4), "LT", Ref("late"), "JUMPI", "STOP",
    Label("late"), "TIMESTAMP", ("PUSH", 0, 1), "SSTORE", "STOP", "INVALID",
])
print(format_disassembly(disassemble(runtime)))

# %% solc appends a CBOR metadata map and its 2-byte length after the code.
metadata = (b"\xa2\x64ipfs\x58\x22" + bytes(34) + b"\x64solc\x43\x00\x08\x11")
trailer = metadata + len(metadata).to_bytes(2, "big")

# %% A constructor that copies runtime + metadata into memory and returns it.
payload = runtime + trailer
ctor = [("PUSH", len(payload), 2), "DUP1", ("PUSH", 0, 2), ("PUSH", 0, 1), "CODECOPY",
        ("PUSH", 0, 1), "RETURN", "INVALID"]
ctor[2] = ("PUSH", len(assemble(ctor)), 2)
creation = assemble(ctor) + payload

sections = split_sections(Bytecode(creation, Origin.CREATION_WITH_DEPLOY))
print("deployment:", sections.deployment.hex())
print("runtime:   ", sections.runtime.hex())
print("auxdata:   ", len(sections.auxdata), "bytes")
assert sections.runtime == runtime
