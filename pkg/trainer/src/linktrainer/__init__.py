"""linktrainer: transformer trainer for issue link-type datasets."""

from .config import MAX_VAL_MACRO_F1, MIN_VAL_MACRO_F1, TrainerConfig
from .data import DatasetFile, PairExample, read_dataset
from .inputs import build_input, truncate_pair
from .metrics import macro_f1
from .predicting import predict
from .training import TrainingError, TrainResult, train

__version__ = "0.1.0"

__all__ = [
    "MAX_VAL_MACRO_F1",
    "MIN_VAL_MACRO_F1",
    "TrainerConfig",
    "DatasetFile",
    "PairExample",
    "read_dataset",
    "build_input",
    "truncate_pair",
    "macro_f1",
    "predict",
    "TrainingError",
    "TrainResult",
    "train",
    "__version__",
]
