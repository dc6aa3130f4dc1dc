"""Prediction emission: score the TEST split and write predictions.jsonl.

Output contract: optional {"_meta": ...} first line carrying every trainer
config field, then one line per test example with softmax scores over the
full label universe whose argmax equals predicted_label.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch

from .data import TEST, DatasetFile
from .inputs import build_input
from .metrics import macro_f1
from .tokenization import load_tokenizer
from .training import TRAINER_STATE_FILE, TrainingError, _collate


def load_checkpoint(checkpoint_dir):
    from transformers import AutoModelForSequenceClassification

    checkpoint_dir = Path(checkpoint_dir)
    with open(checkpoint_dir / TRAINER_STATE_FILE, encoding="utf-8") as fh:
        state = json.load(fh)
    tokenizer = load_tokenizer(checkpoint_dir, scratch=state["scratch"])
    model = AutoModelForSequenceClassification.from_pretrained(str(checkpoint_dir))
    return model, tokenizer, state


def predict(checkpoint_dir, dataset: DatasetFile, out_path, batch_size: int = 64) -> dict:
    """Write predictions.jsonl for the dataset's TEST split; returns the
    header metadata (including the internal test macro F1)."""
    model, tokenizer, state = load_checkpoint(checkpoint_dir)
    labels = state["labels"]
    if labels != dataset.labels:
        raise TrainingError(
            f"label universe mismatch: checkpoint {labels} vs dataset {dataset.labels}"
        )
    test_examples = dataset.split(TEST)
    if not test_examples:
        raise TrainingError("dataset has no TEST examples")

    budget = state["config"]["max_tokens"]
    sequences = [build_input(tokenizer, ex.text_a, ex.text_b, budget) for ex in test_examples]
    model.eval()
    rows = []
    predictions = []
    with torch.no_grad():
        for start in range(0, len(sequences), batch_size):
            chunk = sequences[start : start + batch_size]
            ids, mask = _collate(chunk, tokenizer.pad_id)
            logits = model(input_ids=ids, attention_mask=mask).logits.double().numpy()
            shifted = np.exp(logits - logits.max(axis=1, keepdims=True))
            probs = shifted / shifted.sum(axis=1, keepdims=True)
            for offset, ex in enumerate(test_examples[start : start + len(chunk)]):
                scores = {lab: float(p) for lab, p in zip(labels, probs[offset])}
                best = labels[0]
                for lab in labels[1:]:
                    if scores[lab] > scores[best]:
                        best = lab
                predictions.append(best)
                rows.append(
                    {
                        "example_id": ex.example_id,
                        "true_label": ex.label,
                        "predicted_label": best,
                        "scores": scores,
                    }
                )

    truth = [ex.label for ex in test_examples]
    header = dict(state["config"])
    header.update(
        {
            "labels": labels,
            "selected_epoch": state["selected_epoch"],
            "internal_test_macro_f1": macro_f1(truth, predictions, labels),
        }
    )
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"_meta": header}, sort_keys=True) + "\n")
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    return header
