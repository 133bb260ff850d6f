"""Control-flow graphs from EVM bytecode and a numpy GCN that classifies
contracts for timestamp dependence."""

from evmcfg.cfg import BasicBlock, Cfg, CfgEdge, EdgeKind, Terminator, Unresolved, build_cfg
from evmcfg.dataset import DatasetRecord, load_corpus, preprocess, split
from evmcfg.disasm import (
    Bytecode,
    ContractSections,
    Instruction,
    Origin,
    disassemble,
    parse_hex,
    split_sections,
)
from evmcfg.encode import EncodedGraph, adjacency_from_cfg, encode, normalize
from evmcfg.gcn import GcnConfig, GcnModel, TrainConfig, backward, forward, predict, train
from evmcfg.metrics import ConfusionCounts, MetricsReport, confusion, metrics
from evmcfg.opcodes import OpcodeInfo, opcode_info

__version__ = "0.1.0"
