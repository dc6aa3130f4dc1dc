"""linktrainer CLI: train a checkpoint from dataset.jsonl, emit predictions."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import TrainerConfig
from .data import read_dataset
from .predicting import predict
from .training import TrainingError, train

log = logging.getLogger("linktrainer")


def _resolve_config(args) -> TrainerConfig:
    values: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            values.update(json.load(fh))
    for name in (
        "checkpoint",
        "max_tokens",
        "learning_rate",
        "weight_decay",
        "batch_size",
        "epochs",
        "seed",
        "selection",
    ):
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    return TrainerConfig.from_dict(values)


def cmd_train(args) -> int:
    config = _resolve_config(args)
    dataset = read_dataset(args.dataset)
    result = train(config, dataset, args.out)
    log.info(
        "trained %d epochs, selected %d, checkpoint at %s",
        len(result.epoch_log),
        result.selected_epoch,
        result.checkpoint_dir,
    )
    return 0


def cmd_predict(args) -> int:
    dataset = read_dataset(args.dataset)
    header = predict(args.checkpoint, dataset, args.out)
    log.info(
        "wrote %s (internal test macro F1 %.4f)", args.out, header["internal_test_macro_f1"]
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linktrainer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fine-tune on a dataset.jsonl")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True, help="checkpoint directory")
    p.add_argument("--config", help="JSON file with TrainerConfig fields")
    p.add_argument("--checkpoint", default=None, help="hub id or scratch[:tag]")
    p.add_argument("--max-tokens", dest="max_tokens", type=int, default=None)
    p.add_argument("--learning-rate", dest="learning_rate", type=float, default=None)
    p.add_argument("--weight-decay", dest="weight_decay", type=float, default=None)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument(
        "--selection",
        choices=["MAX_VAL_MACRO_F1", "MIN_VAL_MACRO_F1"],
        default=None,
        help="checkpoint selection rule over validation macro F1",
    )
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="emit predictions.jsonl for the TEST split")
    p.add_argument("--checkpoint", required=True, help="trained checkpoint directory")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True, help="predictions.jsonl path")
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level="INFO", format="%(asctime)s %(levelname)s %(message)s")
    try:
        return args.func(args)
    except (TrainingError, ValueError, FileNotFoundError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
