import logging

import pytest
from hypothesis import given
from hypothesis import strategies as st

from evmcfg.asm import Label, Ref, assemble
from evmcfg.disasm import (
    Bytecode,
    Origin,
    cbor_trailer_size,
    disassemble,
    encode_instructions,
    format_disassembly,
    parse_hex,
    split_sections,
)
from evmcfg.errors import EmptyRuntime, NonHexCharacter, OddLength
from evmcfg.opcodes import OPCODE_TABLE, Category, opcode_info


class TestParseHex:
    def test_single_byte(self):
        assert parse_hex("0x00").code == b"\x00"

    def test_plain(self):
        assert parse_hex("6001600201").code == bytes([0x60, 0x01, 0x60, 0x02, 0x01])

    def test_whitespace_and_uppercase_prefix(self):
        assert parse_hex("  0X60 01\n60\t02 01 \n").code == bytes.fromhex("6001600201")

    def test_odd_length(self):
        with pytest.raises(OddLength):
            parse_hex("0x6")

    def test_non_hex_reports_position(self):
        with pytest.raises(NonHexCharacter) as exc:
            parse_hex("0x60zz")
        assert exc.value.position == 2

    @pytest.mark.parametrize("text", ["", "0x", "   "])
    def test_empty(self, text):
        with pytest.raises(EmptyRuntime):
            parse_hex(text)

    def test_origin_is_carried(self):
        assert parse_hex("00", Origin.CREATION_WITH_DEPLOY).origin is Origin.CREATION_WITH_DEPLOY


class TestOpcodeInfo:
    def test_add(self):
        info = opcode_info(0x01)
        assert (info.mnemonic, info.category, info.immediate_width) == ("ADD", Category.ARITHMETIC, 0)

    def test_timestamp(self):
        info = opcode_info(0x42)
        assert (info.mnemonic, info.category, info.immediate_width) == ("TIMESTAMP", Category.BLOCK, 0)

    def test_push32(self):
        info = opcode_info(0x7F)
        assert (info.mnemonic, info.category, info.immediate_width) == ("PUSH32", Category.PUSH, 32)

    def test_push_range(self):
        for k in range(1, 33):
            info = opcode_info(0x5F + k)
            assert info.mnemonic == f"PUSH{k}" and info.immediate_width == k

    def test_total_and_unknown(self):
        assert len(OPCODE_TABLE) == 256
        for b in range(256):
            info = opcode_info(b)
            assert info.byte == b
            if not info.defined:
                assert info.immediate_width == 0
                assert info.mnemonic == f"UNKNOWN(0x{b:02x})"

    def test_inventory_size(self):
        # London revision: 143 named opcodes, INVALID included
        assert sum(info.defined for info in OPCODE_TABLE) == 143

    @pytest.mark.parametrize("b, name", [(0x1B, "SHL"), (0x1D, "SAR"), (0xF5, "CREATE2"),
                                         (0x46, "CHAINID"), (0x47, "SELFBALANCE"),
                                         (0x48, "BASEFEE"), (0x5F, "UNKNOWN(0x5f)")])
    def test_revision_members(self, b, name):
        assert opcode_info(b).mnemonic == name

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            opcode_info(256)


class TestDisassemble:
    def test_push_add(self):
        instrs = disassemble(bytes([0x60, 0x01, 0x60, 0x02, 0x01]))
        assert [(i.offset, i.mnemonic, i.immediate) for i in instrs] == [
            (0, "PUSH1", b"\x01"), (2, "PUSH1", b"\x02"), (4, "ADD", None)]

    def test_stop(self):
        [ins] = disassemble(b"\x00")
        assert (ins.offset, ins.mnemonic) == (0, "STOP")

    def test_unknown(self):
        [ins] = disassemble(b"\x0c")
        assert ins.mnemonic == "UNKNOWN(0x0c)" and ins.immediate is None

    def test_truncated_push(self):
        instrs = disassemble(bytes([0x01, 0x62, 0xAA]))
        assert instrs[-1].truncated and instrs[-1].immediate == b"\xaa"
        assert instrs[-1].push_value is None
        assert encode_instructions(instrs) == bytes([0x01, 0x62, 0xAA])

    def test_push32_immediate(self):
        code = bytes([0x7F]) + bytes(range(32)) + b"\x00"
        instrs = disassemble(code)
        assert len(instrs) == 2 and instrs[0].immediate == bytes(range(32))
        assert instrs[1].offset == 33

    def test_text_format(self):
        text = format_disassembly(disassemble(bytes.fromhex("6001600201")))
        assert text == "0000: PUSH1 0x01\n0002: PUSH1 0x02\n0004: ADD\n"

    @given(st.binary(min_size=1, max_size=300))
    def test_tiling_and_round_trip(self, code):
        instrs = disassemble(code)
        assert sum(i.size for i in instrs) == len(code)
        pos = 0
        for ins in instrs:
            assert ins.offset == pos
            width = opcode_info(ins.opcode).immediate_width
            if ins.immediate is None:
                assert width == 0
            elif not ins.truncated:
                assert len(ins.immediate) == width
            pos += ins.size
        assert encode_instructions(instrs) == code


def solc_metadata(hash_len: int = 34) -> bytes:
    # {"ipfs": h'..', "solc": h'000811'} as solc >= 0.6 emits it
    return (b"\xa2" + b"\x64ipfs" + b"\x58" + bytes([hash_len]) + bytes(range(hash_len))
            + b"\x64solc" + b"\x43" + b"\x00\x08\x11")


def bzzr0_metadata() -> bytes:
    return b"\xa1" + b"\x65bzzr0" + b"\x58\x20" + bytes(range(32))


class TestSplitSections:
    def test_short_runtime_only(self):
        code = bytes([0x60, 0x01, 0x60, 0x02, 0x01, 0x50, 0x5B, 0x00, 0x01, 0x00])
        s = split_sections(Bytecode(code))
        assert (s.deployment, s.runtime, s.auxdata) == (b"", code, b"")

    def test_modern_cbor_trailer(self):
        meta = solc_metadata()
        assert len(meta) == 51
        code = bytes.fromhex("6080604052600080fdfe") + meta + b"\x00\x33"
        s = split_sections(Bytecode(code))
        assert len(s.auxdata) == 53
        assert s.auxdata == meta + b"\x00\x33"
        assert s.runtime == bytes.fromhex("6080604052600080fdfe")

    def test_legacy_43_byte_trailer(self):
        meta = bzzr0_metadata()
        assert len(meta) == 41
        body = bytes([0x5B, 0x01]) * 77 + bytes([0x01, 0x00, 0xFE])
        code = body + meta + b"\x00\x29"
        assert len(code) == 200
        s = split_sections(Bytecode(code))
        assert len(s.auxdata) == 43 and s.runtime == body

    def test_length_suffix_must_match_a_cbor_map(self):
        # last two bytes claim 4 bytes of payload, but the payload is not a map
        code = bytes.fromhex("60016002010101010004")
        assert cbor_trailer_size(code) is None
        assert split_sections(Bytecode(code)).auxdata == b""

    def test_trailer_cannot_swallow_everything(self):
        meta = bzzr0_metadata()
        assert cbor_trailer_size(meta + b"\x00\x29") is None

    def test_legacy_fallback_without_length_suffix(self):
        # 43 tail bytes after a halt, containing undefined opcodes, no valid suffix
        body = bytes([0x60, 0x01, 0x60, 0x02, 0x01, 0x00])
        tail = bytes([0x0C] * 43)
        s = split_sections(Bytecode(body + tail))
        assert s.runtime == body and s.auxdata == tail

    def test_no_fallback_when_tail_decodes_cleanly(self):
        code = bytes([0x01] * 60)
        assert split_sections(Bytecode(code)).auxdata == b""

    def _creation(self, runtime: bytes) -> bytes:
        ctor = [("PUSH", 0x80, 1), ("PUSH", 0x40, 1), "MSTORE", "CALLVALUE", "DUP1", "ISZERO",
                Ref("ok"), "JUMPI", ("PUSH", 0, 1), "DUP1", "REVERT", Label("ok"), "POP",
                ("PUSH", len(runtime), 2), "DUP1", ("PUSH", 0, 2), ("PUSH", 0, 1), "CODECOPY",
                ("PUSH", 0, 1), "RETURN", "INVALID"]
        size = len(assemble(ctor))
        ctor[15] = ("PUSH", size, 2)
        return assemble(ctor)

    def test_deployment_split(self):
        meta = solc_metadata() + b"\x00\x33"
        runtime = bytes.fromhex("6080604052348015600f57600080fd5b5000fe")
        creation = self._creation(runtime + meta)
        code = creation + runtime + meta
        s = split_sections(Bytecode(code, Origin.CREATION_WITH_DEPLOY))
        assert s.deployment == creation
        assert s.runtime == runtime
        assert s.auxdata == meta

    def test_deployment_split_with_constructor_args(self):
        meta = solc_metadata() + b"\x00\x33"
        runtime = bytes.fromhex("6080604052600080fd")
        creation = self._creation(runtime + meta)
        args = bytes(32)
        code = creation + runtime + meta + args
        s = split_sections(Bytecode(code, Origin.CREATION_WITH_DEPLOY))
        assert (s.deployment, s.runtime, s.auxdata) == (creation, runtime, meta + args)

    def test_creation_without_epilogue_warns(self, caplog):
        code = bytes.fromhex("6001600201")
        with caplog.at_level(logging.WARNING):
            s = split_sections(Bytecode(code, Origin.CREATION_WITH_DEPLOY))
        assert s.runtime == code and s.deployment == b""
        assert "CODECOPY" in caplog.text

    @given(st.binary(min_size=1, max_size=400), st.sampled_from(list(Origin)))
    def test_section_identity(self, code, origin):
        try:
            s = split_sections(Bytecode(code, origin))
        except EmptyRuntime:
            return
        assert s.deployment + s.runtime + s.auxdata == code
        assert s.runtime
