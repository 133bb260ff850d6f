"""Labelled bytecode corpora: JSONL loading, stratified 8:2 split, batch encoding."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from evmcfg.cfg import build_cfg
from evmcfg.disasm import Origin, parse_hex, split_sections
from evmcfg.encode import DEFAULT_MAX_NODES, EncodedGraph, encode
from evmcfg.errors import EmptyDataset, EvmCfgError, MalformedRecord


@dataclass(frozen=True)
class DatasetRecord:
    id: str
    bytecode_hex: str
    label: int
    origin: Origin = Origin.RUNTIME_ONLY

    def to_json(self) -> str:
        return json.dumps(
            {
                "id": self.id,
                "bytecode": self.bytecode_hex,
                "label": self.label,
                "origin": self.origin.value,
            }
        )


@dataclass(frozen=True)
class SplitDataset:
    train: list[str]
    test: list[str]
    seed: int
    ratio: tuple[int, int] = (8, 2)


@dataclass(frozen=True)
class Skip:
    id: str
    reason: str


@dataclass
class Preprocessed:
    ids: list[str] = field(default_factory=list)
    graphs: list[EncodedGraph] = field(default_factory=list)
    skips: list[Skip] = field(default_factory=list)


def parse_record(line: str, lineno: int) -> DatasetRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(lineno, f"invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise MalformedRecord(lineno, "record is not a JSON object")
    rid, code, label = obj.get("id"), obj.get("bytecode"), obj.get("label")
    if not isinstance(rid, str) or not rid:
        raise MalformedRecord(lineno, "missing or non-string 'id'")
    if not isinstance(code, str):
        raise MalformedRecord(lineno, "missing or non-string 'bytecode'")
    if isinstance(label, bool) or label not in (0, 1):
        raise MalformedRecord(lineno, f"label must be 0 or 1, got {label!r}")
    try:
        origin = Origin(obj.get("origin", "runtime"))
    except ValueError:
        raise MalformedRecord(lineno, f"unknown origin {obj.get('origin')!r}") from None
    return DatasetRecord(rid, code, label, origin)


def load_corpus(path: str | Path) -> list[DatasetRecord]:
    """Read a JSON Lines corpus. Blank lines are ignored; the first malformed
    line raises :class:`MalformedRecord` carrying its 1-based line number."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if line.strip():
                records.append(parse_record(line, lineno))
    return records


def write_corpus(records: list[DatasetRecord], path: str | Path) -> None:
    Path(path).write_text("".join(r.to_json() + "\n" for r in records), encoding="utf-8")


def split(records: list[DatasetRecord], seed: int = 42) -> SplitDataset:
    """Stratified 8:2 split.

    The test set holds ``N - round(0.8 N)`` records. Each class first gets
    ``floor(0.2 n_c)`` test slots; leftover slots go to the classes with the
    largest fractional remainder (ties to the lower label).
    """
    if not records:
        raise EmptyDataset("cannot split an empty corpus")
    n = len(records)
    n_test = n - (8 * n + 5) // 10
    by_label = {c: [r.id for r in records if r.label == c] for c in (0, 1)}
    quota = {c: 2 * len(ids) // 10 for c, ids in by_label.items()}
    leftover = n_test - sum(quota.values())
    for c in sorted(by_label, key=lambda c: (-(2 * len(by_label[c]) % 10), c))[:leftover]:
        quota[c] += 1

    rng = np.random.default_rng(seed)
    train: list[str] = []
    test: list[str] = []
    for c in (0, 1):
        ids = by_label[c]
        order = rng.permutation(len(ids))
        shuffled = [ids[i] for i in order]
        test.extend(shuffled[: quota[c]])
        train.extend(shuffled[quota[c] :])
    return SplitDataset(train, test, seed)


def encode_record(
    record: DatasetRecord, max_nodes: int = DEFAULT_MAX_NODES, truncate: bool = False
) -> EncodedGraph:
    code = parse_hex(record.bytecode_hex, record.origin)
    sections = split_sections(code)
    return encode(build_cfg(sections.runtime), max_nodes, record.label, truncate)


def _encode_or_skip(args: tuple[DatasetRecord, int, bool]) -> EncodedGraph | Skip:
    record, max_nodes, truncate = args
    try:
        return encode_record(record, max_nodes, truncate)
    except EvmCfgError as exc:
        return Skip(record.id, f"{type(exc).__name__}: {exc}")


def preprocess(
    records: list[DatasetRecord],
    max_nodes: int = DEFAULT_MAX_NODES,
    truncate: bool = False,
    jobs: int = 1,
) -> Preprocessed:
    """Encode every record; failures go to ``skips`` instead of raising.

    Output order follows record order whatever ``jobs`` is.
    """
    work = [(r, max_nodes, truncate) for r in records]
    if jobs > 1 and len(records) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_encode_or_skip, work, chunksize=16))
    else:
        results = [_encode_or_skip(w) for w in work]
    out = Preprocessed()
    for record, res in zip(records, results):
        if isinstance(res, Skip):
            out.skips.append(res)
        else:
            out.ids.append(record.id)
            out.graphs.append(res)
    return out
