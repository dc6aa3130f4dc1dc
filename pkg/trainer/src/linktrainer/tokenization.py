"""Tokenizer adapters: a pretrained hub tokenizer or a WordPiece tokenizer
trained on the dataset itself (scratch mode)."""

from __future__ import annotations

from pathlib import Path

SPECIALS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]")

TOKENIZER_FILE = "tokenizer.json"
HUB_TOKENIZER_DIR = "tokenizer"


class ScratchWordPiece:
    """WordPiece over a deterministically built vocabulary: character pieces
    as backoff plus the most frequent words (ties broken alphabetically).
    The stock WordPiece trainer is avoided because its merge tie-breaking is
    not reproducible run to run, which would break fixed-seed determinism."""

    def __init__(self, tokenizer):
        self._tok = tokenizer
        self.pad_id = tokenizer.token_to_id("[PAD]")
        self.cls_id = tokenizer.token_to_id("[CLS]")
        self.sep_id = tokenizer.token_to_id("[SEP]")

    @classmethod
    def train(cls, texts, vocab_size: int) -> "ScratchWordPiece":
        from tokenizers import Tokenizer, models, normalizers, pre_tokenizers

        normalizer = normalizers.BertNormalizer(lowercase=True)
        pre_tokenizer = pre_tokenizers.BertPreTokenizer()
        counts: dict[str, int] = {}
        alphabet: set[str] = set()
        for text in texts:
            normalized = normalizer.normalize_str(text or "")
            for word, _ in pre_tokenizer.pre_tokenize_str(normalized):
                counts[word] = counts.get(word, 0) + 1
                alphabet.update(word)

        pieces = list(SPECIALS)
        for char in sorted(alphabet):
            pieces.append(char)
            pieces.append(f"##{char}")
        room = max(0, vocab_size - len(pieces))
        frequent = sorted(counts, key=lambda w: (-counts[w], w))
        pieces.extend(w for w in frequent[:room] if w not in set(pieces))

        vocab = {}
        for piece in pieces:
            if piece not in vocab:
                vocab[piece] = len(vocab)
        tokenizer = Tokenizer(models.WordPiece(vocab, unk_token="[UNK]"))
        tokenizer.normalizer = normalizer
        tokenizer.pre_tokenizer = pre_tokenizer
        return cls(tokenizer)

    @property
    def vocab_size(self) -> int:
        return self._tok.get_vocab_size()

    def encode_segment(self, text: str) -> list[int]:
        return self._tok.encode(text or "").ids

    def save(self, directory: Path):
        self._tok.save(str(Path(directory) / TOKENIZER_FILE))

    @classmethod
    def load(cls, directory: Path) -> "ScratchWordPiece":
        from tokenizers import Tokenizer

        return cls(Tokenizer.from_file(str(Path(directory) / TOKENIZER_FILE)))


class HubTokenizer:
    """Wraps a pretrained tokenizer (e.g. the lowercased WordPiece of
    bert-base-uncased); requires hub access or a local cache/checkpoint."""

    def __init__(self, tokenizer):
        self._tok = tokenizer
        self.pad_id = tokenizer.pad_token_id
        self.cls_id = tokenizer.cls_token_id
        self.sep_id = tokenizer.sep_token_id

    @classmethod
    def from_checkpoint(cls, checkpoint: str) -> "HubTokenizer":
        from transformers import AutoTokenizer

        return cls(AutoTokenizer.from_pretrained(checkpoint))

    @property
    def vocab_size(self) -> int:
        return len(self._tok)

    def encode_segment(self, text: str) -> list[int]:
        return self._tok.encode(text or "", add_special_tokens=False)

    def save(self, directory: Path):
        self._tok.save_pretrained(str(Path(directory) / HUB_TOKENIZER_DIR))

    @classmethod
    def load(cls, directory: Path) -> "HubTokenizer":
        from transformers import AutoTokenizer

        return cls(AutoTokenizer.from_pretrained(str(Path(directory) / HUB_TOKENIZER_DIR)))


def load_tokenizer(directory: Path, scratch: bool):
    return ScratchWordPiece.load(directory) if scratch else HubTokenizer.load(directory)
