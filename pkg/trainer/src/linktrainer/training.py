"""Fine-tuning loop: AdamW over a BERT-style encoder with a dense
classification head on the [CLS] output, validated after every epoch."""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path

import torch

from .config import MAX_VAL_MACRO_F1, TrainerConfig
from .data import TRAIN, VAL, DatasetFile, PairExample
from .inputs import build_input
from .metrics import macro_f1
from .tokenization import HubTokenizer, ScratchWordPiece

log = logging.getLogger("linktrainer")

TRAINER_STATE_FILE = "trainer_state.json"


class TrainingError(RuntimeError):
    pass


@dataclass
class TrainResult:
    checkpoint_dir: str
    labels: list[str]
    epoch_log: list[dict]
    selected_epoch: int
    effective_batch_size: int


def _encode_all(tokenizer, examples: list[PairExample], budget: int) -> list[list[int]]:
    return [build_input(tokenizer, ex.text_a, ex.text_b, budget) for ex in examples]


def _collate(sequences: list[list[int]], pad_id: int):
    width = max(len(s) for s in sequences)
    ids = torch.full((len(sequences), width), pad_id, dtype=torch.long)
    mask = torch.zeros((len(sequences), width), dtype=torch.long)
    for row, seq in enumerate(sequences):
        ids[row, : len(seq)] = torch.tensor(seq, dtype=torch.long)
        mask[row, : len(seq)] = 1
    return ids, mask


def _is_oom(exc: RuntimeError) -> bool:
    text = str(exc).lower()
    return "out of memory" in text or "not enough memory" in text or "can't allocate" in text


def _predict_label_ids(model, sequences, pad_id, batch_size) -> list[int]:
    model.eval()
    out: list[int] = []
    with torch.no_grad():
        for start in range(0, len(sequences), batch_size):
            ids, mask = _collate(sequences[start : start + batch_size], pad_id)
            logits = model(input_ids=ids, attention_mask=mask).logits
            out.extend(int(v) for v in logits.argmax(dim=-1))
    return out


def build_model(config: TrainerConfig, tokenizer, num_labels: int):
    if config.is_scratch:
        from transformers import BertConfig, BertForSequenceClassification

        bert_config = BertConfig(
            vocab_size=tokenizer.vocab_size,
            hidden_size=config.scratch_hidden_size,
            num_hidden_layers=config.scratch_layers,
            num_attention_heads=config.scratch_heads,
            intermediate_size=config.scratch_intermediate_size,
            max_position_embeddings=max(256, config.max_tokens),
            num_labels=num_labels,
            pad_token_id=tokenizer.pad_id,
        )
        return BertForSequenceClassification(bert_config)
    from transformers import AutoModelForSequenceClassification

    return AutoModelForSequenceClassification.from_pretrained(
        config.checkpoint, num_labels=num_labels
    )


def make_tokenizer(config: TrainerConfig, dataset: DatasetFile):
    if config.is_scratch:
        texts = [f"{ex.text_a} {ex.text_b}" for ex in dataset.split(TRAIN)]
        return ScratchWordPiece.train(texts, config.scratch_vocab_size)
    return HubTokenizer.from_checkpoint(config.checkpoint)


def train(config: TrainerConfig, dataset: DatasetFile, out_dir) -> TrainResult:
    """Train, log per-epoch validation macro F1, and save the checkpoint
    selected by the configured rule (default: best validation macro F1)."""
    train_examples = dataset.split(TRAIN)
    val_examples = dataset.split(VAL)
    if not train_examples or not val_examples:
        raise TrainingError("dataset needs non-empty TRAIN and VAL splits")
    if len({ex.label for ex in train_examples}) < 2:
        raise TrainingError("training data contains a single label; nothing to classify")

    torch.manual_seed(config.seed)
    tokenizer = make_tokenizer(config, dataset)
    label_index = dataset.label_index()
    model = build_model(config, tokenizer, num_labels=len(dataset.labels))
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=config.learning_rate, weight_decay=config.weight_decay
    )

    train_seqs = _encode_all(tokenizer, train_examples, config.max_tokens)
    train_ys = [label_index[ex.label] for ex in train_examples]
    val_seqs = _encode_all(tokenizer, val_examples, config.max_tokens)
    val_truth = [ex.label for ex in val_examples]

    batch_size = config.batch_size
    epoch_log: list[dict] = []
    best_metric: float | None = None
    best_epoch = 0
    best_state: dict | None = None
    want_max = config.selection == MAX_VAL_MACRO_F1

    for epoch in range(1, config.epochs + 1):
        model.train()
        order = list(range(len(train_seqs)))
        random.Random(f"{config.seed}:{epoch}").shuffle(order)
        losses = []
        position = 0
        while position < len(order):
            chunk = order[position : position + batch_size]
            try:
                ids, mask = _collate([train_seqs[i] for i in chunk], tokenizer.pad_id)
                labels = torch.tensor([train_ys[i] for i in chunk], dtype=torch.long)
                loss = model(input_ids=ids, attention_mask=mask, labels=labels).loss
                loss.backward()
                optimizer.step()
                optimizer.zero_grad()
                losses.append(float(loss.detach()))
                position += len(chunk)
            except RuntimeError as exc:
                if not _is_oom(exc) or batch_size == 1:
                    raise
                optimizer.zero_grad()
                batch_size = max(1, batch_size // 2)
                log.warning("batch did not fit in memory; continuing with size %d", batch_size)

        val_preds = [
            dataset.labels[i]
            for i in _predict_label_ids(model, val_seqs, tokenizer.pad_id, batch_size)
        ]
        val_macro = macro_f1(val_truth, val_preds, dataset.labels)
        epoch_log.append(
            {
                "epoch": epoch,
                "train_loss": sum(losses) / len(losses) if losses else 0.0,
                "val_macro_f1": val_macro,
            }
        )
        log.info("epoch %d: loss %.4f, val macro F1 %.4f", epoch, epoch_log[-1]["train_loss"], val_macro)
        better = (
            best_metric is None
            or (want_max and val_macro > best_metric)
            or (not want_max and val_macro < best_metric)
        )
        if better:
            best_metric = val_macro
            best_epoch = epoch
            best_state = {k: v.detach().cpu().clone() for k, v in model.state_dict().items()}

    assert len(epoch_log) == config.epochs
    model.load_state_dict(best_state)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out_dir)
    tokenizer.save(out_dir)
    state = {
        "config": config.to_dict(),
        "labels": dataset.labels,
        "scratch": config.is_scratch,
        "epoch_log": epoch_log,
        "selected_epoch": best_epoch,
        "effective_batch_size": batch_size,
    }
    with open(out_dir / TRAINER_STATE_FILE, "w", encoding="utf-8") as fh:
        json.dump(state, fh, indent=1, sort_keys=True)
        fh.write("\n")
    log.info("selected epoch %d (val macro F1 %.4f) -> %s", best_epoch, best_metric, out_dir)
    return TrainResult(
        checkpoint_dir=str(out_dir),
        labels=dataset.labels,
        epoch_log=epoch_log,
        selected_epoch=best_epoch,
        effective_batch_size=batch_size,
    )
