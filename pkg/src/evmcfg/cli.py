"""``evmcfg`` command line: disasm, cfg, encode, train, eval, sweep-layers."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

from evmcfg.cfg import build_cfg
from evmcfg.dataset import DatasetRecord, load_corpus, preprocess, split
from evmcfg.disasm import Origin, disassemble, format_disassembly, parse_hex, split_sections
from evmcfg.encode import DEFAULT_MAX_NODES, encode
from evmcfg.errors import EmptyDataset, EvmCfgError, ShapeMismatch
from evmcfg.gcn import MAX_LAYERS, GcnConfig, GcnModel, TrainConfig, predict, train
from evmcfg.metrics import MetricsReport, confusion, metrics

log = logging.getLogger("evmcfg")

DEFAULT_SEED = 42


def _default_seed() -> int:
    raw = os.environ.get("EVMCFG_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"evmcfg: EVMCFG_SEED must be an integer, got {raw!r}") from None


def _layer_count(text: str) -> int:
    value = int(text)
    if not 1 <= value <= MAX_LAYERS:
        raise argparse.ArgumentTypeError(f"layer count must be in 1..{MAX_LAYERS}, got {value}")
    return value


def _layer_range(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    values = list(range(_layer_count(lo), _layer_count(hi) + 1)) if sep else [_layer_count(lo)]
    if not values:
        raise argparse.ArgumentTypeError(f"empty layer range {text!r}")
    return values


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _read_bytecode(path: str, origin: str):
    text = Path(path).read_text(encoding="utf-8")
    return parse_hex(text, Origin(origin))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _runtime(args) -> bytes:
    code = _read_bytecode(args.input, args.origin)
    return code.code if args.whole else split_sections(code).runtime


def cmd_disasm(args) -> int:
    instrs = disassemble(_runtime(args))
    if args.json:
        rows = [
            {
                "offset": ins.offset,
                "mnemonic": ins.mnemonic,
                "immediate": None if ins.immediate is None else "0x" + ins.immediate.hex(),
                "truncated": ins.truncated,
            }
            for ins in instrs
        ]
        _emit(json.dumps(rows, indent=2) + "\n", args.out)
    else:
        _emit(format_disassembly(instrs), args.out)
    return 0


def cmd_cfg(args) -> int:
    cfg = build_cfg(_runtime(args))
    _emit(cfg.to_json() + "\n" if args.json else cfg.to_dot(), args.out)
    return 0


def cmd_encode(args) -> int:
    cfg = build_cfg(_runtime(args))
    graph = encode(cfg, args.max_nodes, args.label, args.truncate)
    _emit(graph.to_json() + "\n", args.out)
    return 0


def _report_skips(skips) -> None:
    for s in skips:
        print(f"skipped {s.id}: {s.reason}", file=sys.stderr)


def _score(model: GcnModel, graphs) -> MetricsReport:
    preds = [predict(model, g)[0] for g in graphs]
    return metrics(confusion(preds, [g.label for g in graphs]))


def _prepare(records: list[DatasetRecord], args):
    if not records:
        raise EmptyDataset("corpus is empty")
    pre = preprocess(records, args.max_nodes, args.truncate, args.jobs)
    _report_skips(pre.skips)
    by_id = dict(zip(pre.ids, pre.graphs))
    parts = split(records, args.seed)
    train_set = [by_id[i] for i in parts.train if i in by_id]
    test_set = [by_id[i] for i in parts.test if i in by_id]
    if not train_set:
        raise EmptyDataset("no encodable records in the training split")
    if not test_set:
        raise EmptyDataset("no encodable records in the test split")
    return train_set, test_set


def _fit(train_set, args, layers: int) -> GcnModel:
    model = GcnModel.initialize(
        GcnConfig(layers, args.hidden, args.max_nodes, args.seed)
    )
    tconf = TrainConfig(learning_rate=args.lr, epochs=args.epochs, seed=args.seed)
    model, history = train(model, train_set, tconf)
    if history:
        log.info("layers=%d final training loss %.6f", layers, history[-1])
    return model


def _metrics_json(report: MetricsReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def cmd_train(args) -> int:
    train_set, test_set = _prepare(load_corpus(args.corpus), args)
    model = _fit(train_set, args, args.layers)
    model.save(args.out)
    _emit(_metrics_json(_score(model, test_set)), args.metrics_out)
    return 0


def cmd_eval(args) -> int:
    model = GcnModel.load(args.model)
    width = model.config.input_width
    if args.max_nodes is not None and args.max_nodes != width:
        raise ShapeMismatch(
            f"--max-nodes {args.max_nodes} does not match the model input width {width}"
        )
    records = load_corpus(args.corpus)
    if not records:
        raise EmptyDataset("corpus is empty")
    pre = preprocess(records, width, args.truncate, args.jobs)
    _report_skips(pre.skips)
    if not pre.graphs:
        raise EmptyDataset("no encodable records in corpus")
    _emit(_metrics_json(_score(model, pre.graphs)), args.out)
    return 0


SWEEP_COLUMNS = ("layers", "accuracy", "recall", "precision", "f1")


def cmd_sweep_layers(args) -> int:
    train_set, test_set = _prepare(load_corpus(args.corpus), args)
    rows = []
    for layers in args.layers:
        report = _score(_fit(train_set, args, layers), test_set)
        rows.append((layers, report.accuracy, report.recall, report.precision, report.f1))
    if args.csv:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        writer.writerows([(r[0], *(repr(v) for v in r[1:])) for r in rows])
        text = buf.getvalue()
    else:
        # values x100, as plotted in the layer ablation
        text = f"{'layers':>6} {'accuracy':>9} {'recall':>9} {'precision':>9} {'f1':>9}\n"
        for r in rows:
            text += f"{r[0]:>6} " + " ".join(f"{100 * v:>9.2f}" for v in r[1:]) + "\n"
    _emit(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_default_seed(),
                        help="random seed (default: $EVMCFG_SEED or 42)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("-o", "--out", help="write primary output here instead of stdout")

    code_in = argparse.ArgumentParser(add_help=False)
    code_in.add_argument("input", help="file holding one hex-encoded contract")
    code_in.add_argument("--origin", choices=[o.value for o in Origin], default="runtime",
                         help="'creation' if the file includes deployment code")
    code_in.add_argument("--whole", action="store_true",
                         help="skip section splitting and use every byte as runtime code")

    nodes = argparse.ArgumentParser(add_help=False)
    nodes.add_argument("--max-nodes", type=_positive_int, default=DEFAULT_MAX_NODES)
    nodes.add_argument("--truncate", action="store_true",
                       help="keep the first --max-nodes blocks instead of rejecting large graphs")

    fit = argparse.ArgumentParser(add_help=False)
    fit.add_argument("corpus", help="JSON Lines corpus")
    fit.add_argument("--epochs", type=int, default=TrainConfig.epochs)
    fit.add_argument("--lr", type=float, default=TrainConfig.learning_rate)
    fit.add_argument("--hidden", type=_positive_int, default=GcnConfig.hidden_width)
    fit.add_argument("--jobs", type=_positive_int, default=1)

    parser = argparse.ArgumentParser(prog="evmcfg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("disasm", parents=[common, output, code_in], help="disassemble bytecode")
    p.add_argument("--json", action="store_true", help="emit the instruction list as JSON")
    p.set_defaults(func=cmd_disasm)

    p = sub.add_parser("cfg", parents=[common, output, code_in], help="recover the control-flow graph")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--dot", action="store_true", help="Graphviz output (default)")
    fmt.add_argument("--json", action="store_true", help="JSON interchange output")
    p.set_defaults(func=cmd_cfg)

    p = sub.add_parser("encode", parents=[common, output, code_in, nodes],
                       help="write the normalized adjacency and features as JSON")
    p.add_argument("--label", type=int, choices=[0, 1])
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("train", parents=[common, nodes, fit],
                       help="train on the 80%% split and report test metrics")
    p.add_argument("--layers", type=_layer_count, default=GcnConfig.num_hidden_layers)
    p.add_argument("-o", "--out", default="model.json", help="checkpoint path")
    p.add_argument("--metrics-out", help="write test metrics JSON here instead of stdout")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", parents=[common, output], help="score a checkpoint on a corpus")
    p.add_argument("model")
    p.add_argument("corpus")
    p.add_argument("--max-nodes", type=_positive_int, default=None,
                   help="must equal the checkpoint's input width if given")
    p.add_argument("--truncate", action="store_true")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep-layers", parents=[common, output, nodes, fit],
                       help="retrain for each hidden-layer count and tabulate metrics")
    p.add_argument("--layers", type=_layer_range, default=list(range(1, MAX_LAYERS + 1)),
                   help="single count or range like 1..6")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_sweep_layers)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"evmcfg: {exc.strerror}: {exc.filename}", file=sys.stderr)
        return 2
    except EvmCfgError as exc:
        print(f"evmcfg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
