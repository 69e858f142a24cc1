"""Tokenizer models: vocabulary, merge application, document routing.

A trained model encodes a SMILES by atom-level pre-tokenization followed by
its merge rules in rank order; units that still miss the vocabulary fall
back to single characters, which the vocabulary always carries. Documents
mix free text and tagged SMILES spans: the text goes through a pluggable
base tokenizer, the spans through the SMILES path, and the tag strings
themselves stay atomic.
"""

from __future__ import annotations

import json
import re
import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol, Sequence

from .errors import TagPairingError, TokenizerError
from .pretokenizer import unit_texts
from .trainer import MergeRule, merge_pair

PRETOKENIZER_ID = "smiles-atom-v1"

MODEL_FORMAT_VERSION = 1

DEFAULT_SPECIAL_TOKENS: tuple[str, ...] = (
    "<EOS>",
    "<SMILES>",
    "</SMILES>",
    "<MOLFORMULA>",
    "</MOLFORMULA>",
)

#: single characters every model vocabulary carries so that any unit can
#: decompose; covers the whole SMILES alphabet including bracket contents
FALLBACK_ALPHABET: tuple[str, ...] = tuple(
    string.ascii_letters + string.digits + "[]()=#$:/\\+-@.%*"
)


@dataclass(frozen=True, slots=True)
class Vocabulary:
    """An ordered token list with dense ids (the token's position)."""

    tokens: tuple[str, ...]
    special_tokens: frozenset[str]
    _index: dict[str, int] = field(repr=False, compare=False, default_factory=dict)

    @classmethod
    def from_tokens(
        cls, tokens: Iterable[str], special_tokens: Iterable[str] = ()
    ) -> "Vocabulary":
        toks = tuple(tokens)
        index: dict[str, int] = {}
        for i, t in enumerate(toks):
            if t in index:
                raise TokenizerError(f"duplicate token {t!r} in vocabulary")
            index[t] = i
        specials = frozenset(special_tokens)
        missing = specials - index.keys()
        if missing:
            raise TokenizerError(
                f"special tokens missing from vocabulary: {sorted(missing)}"
            )
        return cls(tokens=toks, special_tokens=specials, _index=index)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def __len__(self) -> int:
        return len(self.tokens)

    def id(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise TokenizerError(f"token {token!r} not in vocabulary") from None

    def token(self, token_id: int) -> str:
        if not 0 <= token_id < len(self.tokens):
            raise TokenizerError(f"token id {token_id} out of range")
        return self.tokens[token_id]


def apply_merges(units: Sequence[str], rules: Sequence[MergeRule]) -> list[str]:
    """Apply merge rules in rank order, mirroring how they were learned."""
    seq = list(units)
    present = set(seq)
    for rule in rules:
        if rule.left not in present or rule.right not in present:
            continue
        merged = merge_pair(seq, rule.left, rule.right)
        if len(merged) != len(seq):
            seq = merged
            present = set(seq)
    return seq


@dataclass(frozen=True, slots=True)
class TokenizerModel:
    """A trained SMILES tokenizer: pre-tokenizer id, merges, vocabulary."""

    pretokenizer_id: str
    merges: tuple[MergeRule, ...]
    vocabulary: Vocabulary

    @property
    def special_tokens(self) -> frozenset[str]:
        return self.vocabulary.special_tokens

    def __post_init__(self) -> None:
        if self.pretokenizer_id != PRETOKENIZER_ID:
            raise TokenizerError(
                f"unknown pretokenizer {self.pretokenizer_id!r}; "
                f"this build supports {PRETOKENIZER_ID!r}"
            )
        for rule in self.merges:
            if rule.token not in self.vocabulary:
                raise TokenizerError(
                    f"merge product {rule.token!r} missing from vocabulary"
                )

    @classmethod
    def build(
        cls,
        merges: Sequence[MergeRule],
        base_units: Iterable[str],
        special_tokens: Iterable[str] = DEFAULT_SPECIAL_TOKENS,
        extra_tokens: Iterable[str] = (),
    ) -> "TokenizerModel":
        """Assemble a model, guaranteeing fallback completeness.

        Vocabulary order: special tokens, fallback characters, sorted base
        units, merge products by rank, then extras; duplicates keep their
        first slot.
        """
        ordered: list[str] = []
        seen: set[str] = set()

        def add(tok: str) -> None:
            if tok not in seen:
                ordered.append(tok)
                seen.add(tok)

        specials = tuple(special_tokens)
        for tok in specials:
            add(tok)
        for ch in FALLBACK_ALPHABET:
            add(ch)
        for unit in sorted(set(base_units)):
            add(unit)
        for rule in merges:
            add(rule.token)
        for tok in extra_tokens:
            add(tok)
        vocab = Vocabulary.from_tokens(ordered, specials)
        return cls(
            pretokenizer_id=PRETOKENIZER_ID,
            merges=tuple(merges),
            vocabulary=vocab,
        )

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "pretokenizer": self.pretokenizer_id,
            "special_tokens": sorted(self.special_tokens),
            "vocab": list(self.vocabulary.tokens),
            "merges": [[r.left, r.right] for r in self.merges],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TokenizerModel":
        version = data.get("format_version")
        if version != MODEL_FORMAT_VERSION:
            raise TokenizerError(f"unsupported model format version {version!r}")
        merges = tuple(
            MergeRule(left=left, right=right, rank=rank)
            for rank, (left, right) in enumerate(data["merges"])
        )
        vocab = Vocabulary.from_tokens(data["vocab"], data["special_tokens"])
        return cls(
            pretokenizer_id=data["pretokenizer"],
            merges=merges,
            vocabulary=vocab,
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json(), ensure_ascii=False, indent=1) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path: str | Path) -> "TokenizerModel":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise TokenizerError(f"not a tokenizer model file: {exc}") from exc
        return cls.from_json(data)


# ---------------------------------------------------------------------------
# SMILES encoding
# ---------------------------------------------------------------------------


def tokenize_smiles(model: TokenizerModel, s: str) -> list[str]:
    """Token strings for a SMILES, with character fallback for unknown
    units. Concatenating them reproduces ``s``."""
    vocab = model.vocabulary
    out: list[str] = []
    for tok in apply_merges(unit_texts(s), model.merges):
        if tok in vocab:
            out.append(tok)
        else:
            out.extend(tok)
    return out


def encode_smiles(model: TokenizerModel, s: str) -> list[int]:
    """Encode one SMILES string to token ids.

    Raises:
        SmilesParseError: when ``s`` does not pre-tokenize.
        TokenizerError: when a fallback character is missing, which only
            happens with hand-made vocabularies.
    """
    vocab = model.vocabulary
    return [vocab.id(tok) for tok in tokenize_smiles(model, s)]


def decode(model: TokenizerModel, ids: Sequence[int]) -> str:
    """Back to text: concatenated token strings for ``ids``."""
    vocab = model.vocabulary
    return "".join(vocab.token(i) for i in ids)


# ---------------------------------------------------------------------------
# base tokenizer and document routing
# ---------------------------------------------------------------------------


class BaseTokenizer(Protocol):
    """What document routing needs from a general-text tokenizer."""

    def encode(self, text: str) -> list[int]: ...

    def decode(self, ids: Sequence[int]) -> str: ...

    def __len__(self) -> int: ...


class GreedyBpeTokenizer:
    """Small byte-level BPE tokenizer for general text.

    Every one of the 256 byte values has a token (stored as the code point
    of that byte value), so any UTF-8 text encodes, and greedy rank-order
    merge application plus concatenation makes decode(encode(s)) == s
    exactly. Serialized as two JSON files: a vocab list and a merge list.
    """

    def __init__(self, vocabulary: Vocabulary, merges: Sequence[MergeRule]):
        for rule in merges:
            if rule.token not in vocabulary:
                raise TokenizerError(
                    f"merge product {rule.token!r} missing from vocabulary"
                )
        self.vocabulary = vocabulary
        self.merges = tuple(merges)

    @classmethod
    def byte_level(
        cls,
        merges: Sequence[tuple[str, str]] = (),
        extra_tokens: Iterable[str] = (),
    ) -> "GreedyBpeTokenizer":
        """A base with the 256 byte tokens plus any merge products."""
        tokens: list[str] = [chr(b) for b in range(256)]
        seen = set(tokens)
        rules = [
            MergeRule(left=left, right=right, rank=i)
            for i, (left, right) in enumerate(merges)
        ]
        for rule in rules:
            if rule.token not in seen:
                tokens.append(rule.token)
                seen.add(rule.token)
        for tok in extra_tokens:
            if tok not in seen:
                tokens.append(tok)
                seen.add(tok)
        return cls(Vocabulary.from_tokens(tokens), rules)

    def __len__(self) -> int:
        return len(self.vocabulary)

    def encode(self, text: str) -> list[int]:
        symbols = [chr(b) for b in text.encode("utf-8")]
        return [self.vocabulary.id(t) for t in apply_merges(symbols, self.merges)]

    def decode(self, ids: Sequence[int]) -> str:
        joined = "".join(self.vocabulary.token(i) for i in ids)
        return joined.encode("latin-1").decode("utf-8")

    def save(self, vocab_path: str | Path, merges_path: str | Path) -> None:
        Path(vocab_path).write_text(
            json.dumps(list(self.vocabulary.tokens), ensure_ascii=True) + "\n",
            encoding="utf-8",
        )
        Path(merges_path).write_text(
            json.dumps([[r.left, r.right] for r in self.merges], ensure_ascii=True)
            + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(
        cls, vocab_path: str | Path, merges_path: str | Path
    ) -> "GreedyBpeTokenizer":
        tokens = json.loads(Path(vocab_path).read_text(encoding="utf-8"))
        pairs = json.loads(Path(merges_path).read_text(encoding="utf-8"))
        rules = [
            MergeRule(left=left, right=right, rank=i)
            for i, (left, right) in enumerate(pairs)
        ]
        return cls(Vocabulary.from_tokens(tokens), rules)


def _tag_scanner(special_tokens: Iterable[str]) -> re.Pattern[str]:
    ordered = sorted(special_tokens, key=len, reverse=True)
    return re.compile("|".join(re.escape(t) for t in ordered))


def encode_document(
    model: TokenizerModel, base: BaseTokenizer, doc: str
) -> list[int]:
    """Encode mixed text with tagged SMILES spans.

    Ids live in one combined space: base-tokenizer ids keep their values
    and model ids (including the tags' special ids) are offset by the base
    vocabulary size, so the result decodes unambiguously.

    Raises:
        TagPairingError: on a nested <SMILES> or an unpaired tag.
    """
    matches = list(_tag_scanner(model.special_tokens).finditer(doc))

    # pairing first, so broken structure is not misreported as bad SMILES
    in_smiles = False
    open_pos = 0
    for m in matches:
        if m.group() == "<SMILES>":
            if in_smiles:
                raise TagPairingError("nested <SMILES> tag", m.start())
            in_smiles = True
            open_pos = m.start()
        elif m.group() == "</SMILES>":
            if not in_smiles:
                raise TagPairingError("unpaired </SMILES> tag", m.start())
            in_smiles = False
    if in_smiles:
        raise TagPairingError("unpaired <SMILES> tag", open_pos)

    offset = len(base)
    out: list[int] = []
    in_smiles = False

    def emit_text(chunk: str) -> None:
        if not chunk:
            return
        if in_smiles:
            out.extend(offset + i for i in encode_smiles(model, chunk))
        else:
            out.extend(base.encode(chunk))

    pos = 0
    for m in matches:
        emit_text(doc[pos : m.start()])
        tag = m.group()
        if tag == "<SMILES>":
            in_smiles = True
        elif tag == "</SMILES>":
            in_smiles = False
        out.append(offset + model.vocabulary.id(tag))
        pos = m.end()
    emit_text(doc[pos:])
    return out


def decode_document(
    model: TokenizerModel, base: BaseTokenizer, ids: Sequence[int]
) -> str:
    """Invert encode_document over the combined id space."""
    offset = len(base)
    parts: list[str] = []
    run: list[int] = []  # pending base ids, decoded together for UTF-8 safety

    def flush() -> None:
        if run:
            parts.append(base.decode(run))
            run.clear()

    for i in ids:
        if i < offset:
            run.append(i)
        else:
            flush()
            parts.append(model.vocabulary.token(i - offset))
    flush()
    return "".join(parts)
