"""Trainer configuration; every field is logged into the prediction header."""

from __future__ import annotations

from dataclasses import dataclass, fields

MAX_VAL_MACRO_F1 = "MAX_VAL_MACRO_F1"
MIN_VAL_MACRO_F1 = "MIN_VAL_MACRO_F1"

#: Checkpoint ids with this prefix build a randomly initialized compact
#: encoder plus a WordPiece tokenizer trained on the dataset itself, for
#: environments without hub access or GPUs.
SCRATCH_PREFIX = "scratch"


@dataclass(frozen=True)
class TrainerConfig:
    checkpoint: str = "bert-base-uncased"
    max_tokens: int = 192
    learning_rate: float = 5e-5
    weight_decay: float = 0.1
    batch_size: int = 96
    epochs: int = 30
    seed: int = 0
    selection: str = MAX_VAL_MACRO_F1
    # Scratch-mode architecture knobs (ignored for pretrained checkpoints).
    scratch_vocab_size: int = 4000
    scratch_hidden_size: int = 128
    scratch_layers: int = 2
    scratch_heads: int = 4
    scratch_intermediate_size: int = 256

    def __post_init__(self):
        if self.selection not in (MAX_VAL_MACRO_F1, MIN_VAL_MACRO_F1):
            raise ValueError(f"unknown selection rule {self.selection!r}")
        if self.max_tokens < 8:
            raise ValueError("max_tokens must be at least 8")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be positive")

    @property
    def is_scratch(self) -> bool:
        return self.checkpoint.split(":", 1)[0] == SCRATCH_PREFIX

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "TrainerConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown trainer config keys: {sorted(unknown)}")
        return cls(**data)
