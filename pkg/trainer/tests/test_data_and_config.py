import json

import pytest

from linktrainer.config import TrainerConfig
from linktrainer.data import read_dataset
from linktrainer.metrics import macro_f1


def test_read_dataset_meta_and_splits(synthetic_dataset):
    ds = read_dataset(synthetic_dataset)
    assert ds.labels == ["Frontend", "Network", "Storage"]
    assert len(ds.examples) == 500
    train, val, test = ds.split("TRAIN"), ds.split("VAL"), ds.split("TEST")
    assert len(train) + len(val) + len(test) == 500
    assert abs(len(test) - 100) <= 3
    ex = ds.examples[0]
    assert ex.text_a and ex.text_b


def test_read_dataset_missing_field(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text(json.dumps({"example_id": "e1", "label": "A"}) + "\n")
    with pytest.raises(ValueError):
        read_dataset(path)


def test_read_dataset_stray_label(tmp_path):
    path = tmp_path / "stray.jsonl"
    rec = {
        "example_id": "e1",
        "label": "Mystery",
        "split": "TRAIN",
        "title_a": "t",
        "description_a": "",
        "title_b": "u",
        "description_b": "",
    }
    path.write_text(json.dumps({"_meta": {"labels": ["A"]}}) + "\n" + json.dumps(rec) + "\n")
    with pytest.raises(ValueError):
        read_dataset(path)


def test_config_validation_and_scratch_detection():
    assert TrainerConfig().checkpoint == "bert-base-uncased"
    assert not TrainerConfig().is_scratch
    assert TrainerConfig(checkpoint="scratch").is_scratch
    assert TrainerConfig(checkpoint="scratch:small").is_scratch
    with pytest.raises(ValueError):
        TrainerConfig(selection="LOWEST_LOSS")
    with pytest.raises(ValueError):
        TrainerConfig.from_dict({"bogus": 1})
    round_tripped = TrainerConfig.from_dict(TrainerConfig(seed=5).to_dict())
    assert round_tripped.seed == 5


def test_macro_f1_worked_example():
    value = macro_f1(["A", "A", "B", "B"], ["A", "B", "B", "B"], ["A", "B"])
    assert abs(value - 11 / 15) < 1e-12


def test_macro_f1_zero_division_counts_zero():
    assert macro_f1(["A", "A"], ["A", "A"], ["A", "B"]) == 0.5
