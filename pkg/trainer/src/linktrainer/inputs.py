"""Pair encoding with longest-first truncation.

Sequence layout: [CLS] tokens(issue A) [SEP] tokens(issue B) [SEP], where
each issue's text is its title and description joined by a space. The three
special tokens count toward the budget. While over budget, one trailing
token is removed from whichever segment is currently longer; on ties the
second segment gives way (so the first segment ends one token longer, e.g.
equal 200/200 segments under a 192 budget settle at 95/94).
"""

from __future__ import annotations

SPECIAL_TOKEN_COUNT = 3  # [CLS], [SEP], [SEP]


def truncate_pair(ids_a: list[int], ids_b: list[int], budget: int | None) -> tuple[list[int], list[int]]:
    """Longest-first trimming of two id sequences to fit budget - 3 content
    slots; the identity when already under budget or budget is None."""
    ids_a, ids_b = list(ids_a), list(ids_b)
    if budget is None:
        return ids_a, ids_b
    room = budget - SPECIAL_TOKEN_COUNT
    if room < 0:
        raise ValueError(f"budget {budget} cannot fit the special tokens")
    while len(ids_a) + len(ids_b) > room:
        if len(ids_a) > len(ids_b):
            ids_a.pop()
        elif ids_b:
            ids_b.pop()
        else:
            ids_a.pop()
    return ids_a, ids_b


def build_input(tokenizer, text_a: str, text_b: str, budget: int | None = 192) -> list[int]:
    """Token id sequence for one issue pair; never exceeds the budget."""
    ids_a = tokenizer.encode_segment(text_a)
    ids_b = tokenizer.encode_segment(text_b)
    ids_a, ids_b = truncate_pair(ids_a, ids_b, budget)
    return [tokenizer.cls_id, *ids_a, tokenizer.sep_id, *ids_b, tokenizer.sep_id]
