"""Vocabulary extension planning and embedding-table growth.

Builds the ordered list of tokens to add to a base tokenizer (learned
SMILES tokens, frequent fragmented text words, special tags) and grows an
embedding matrix accordingly: existing rows are copied untouched and every
new row starts as the mean of all existing rows.
"""

from __future__ import annotations

import json
import re
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import SmipeError
from .pretokenizer import is_single_unit
from .tokenizer import BaseTokenizer, Vocabulary

_WORD_RE = re.compile(r"[^\W\d_]+", re.UNICODE)
_SMILES_SPAN_RE = re.compile(r"<SMILES>.*?</SMILES>", re.DOTALL)

PLAN_SOURCES = ("smiles", "text", "special")

EMBEDDING_MAGIC = b"EMB1"


@dataclass(frozen=True, slots=True)
class PlanEntry:
    """One token to append: its text, where it came from, corpus frequency."""

    token: str
    source: str
    freq: int = 0


@dataclass(slots=True)
class ExtensionPlan:
    """Ordered additions on top of a base vocabulary.

    New ids are implicit: entry k gets id ``base_vocab_size + k``.
    ``collisions_dropped`` records candidate tokens skipped because the
    base vocabulary already has them.
    """

    base_vocab_size: int
    entries: list[PlanEntry]
    collisions_dropped: list[str]

    @property
    def new_token_count(self) -> int:
        return len(self.entries)

    def to_json(self) -> dict:
        return {
            "base_vocab_size": self.base_vocab_size,
            "entries": [
                {"token": e.token, "source": e.source, "freq": e.freq}
                for e in self.entries
            ],
            "collisions_dropped": list(self.collisions_dropped),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ExtensionPlan":
        entries = [
            PlanEntry(token=e["token"], source=e["source"], freq=e.get("freq", 0))
            for e in data["entries"]
        ]
        return cls(
            base_vocab_size=data["base_vocab_size"],
            entries=entries,
            collisions_dropped=list(data.get("collisions_dropped", ())),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json(), ensure_ascii=False, indent=1) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path: str | Path) -> "ExtensionPlan":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def extract_text_oov(
    corpus: Iterable[str], base: BaseTokenizer, k: int
) -> list[tuple[str, int]]:
    """Most frequent words the base tokenizer fragments.

    Words are maximal alphabetic runs with case preserved; anything inside
    <SMILES>...</SMILES> spans is skipped. A word counts as out of
    vocabulary when the base splits it into two or more tokens. Returns up
    to ``k`` (word, frequency) pairs, most frequent first, ties broken
    alphabetically.
    """
    counts: dict[str, int] = {}
    for text in corpus:
        stripped = _SMILES_SPAN_RE.sub(" ", text)
        for word in _WORD_RE.findall(stripped):
            counts[word] = counts.get(word, 0) + 1
    oov = [
        (word, freq)
        for word, freq in counts.items()
        if len(base.encode(word)) >= 2
    ]
    oov.sort(key=lambda wf: (-wf[1], wf[0]))
    return oov[:k]


def _normalize_tokens(
    items: Iterable[str] | Iterable[tuple[str, int]],
) -> list[tuple[str, int]]:
    out: list[tuple[str, int]] = []
    for item in items:
        if isinstance(item, str):
            out.append((item, 0))
        else:
            token, freq = item
            out.append((token, int(freq)))
    return out


def build_extension_plan(
    smiles_tokens: Iterable[str] | Iterable[tuple[str, int]],
    text_tokens: Iterable[str] | Iterable[tuple[str, int]],
    special_tokens: Iterable[str],
    base_vocab: Vocabulary | Iterable[str],
    include_single_units: bool = True,
) -> ExtensionPlan:
    """Assemble the ordered additions: SMILES tokens, then text words, then
    special tags.

    Candidates already present in the base vocabulary are dropped and
    recorded. With ``include_single_units=False``, SMILES tokens that are a
    lone atom-level unit are left out, keeping only genuine merge products.
    """
    if isinstance(base_vocab, Vocabulary):
        base_set = set(base_vocab.tokens)
        base_size = len(base_vocab)
    else:
        base_list = list(base_vocab)
        base_set = set(base_list)
        base_size = len(base_list)

    entries: list[PlanEntry] = []
    collisions: list[str] = []
    seen: set[str] = set()

    def push(token: str, source: str, freq: int) -> None:
        if token in seen:
            return
        seen.add(token)
        if token in base_set:
            collisions.append(token)
            return
        entries.append(PlanEntry(token=token, source=source, freq=freq))

    for token, freq in _normalize_tokens(smiles_tokens):
        if not include_single_units and is_single_unit(token):
            continue
        push(token, "smiles", freq)
    for token, freq in _normalize_tokens(text_tokens):
        push(token, "text", freq)
    for token in special_tokens:
        push(token, "special", 0)

    return ExtensionPlan(
        base_vocab_size=base_size,
        entries=entries,
        collisions_dropped=collisions,
    )


# ---------------------------------------------------------------------------
# embedding matrix
# ---------------------------------------------------------------------------


def extend_embeddings(matrix: np.ndarray, plan: ExtensionPlan) -> np.ndarray:
    """Grow an embedding table along the plan.

    The result keeps every base row bit-exact and appends one row per plan
    entry, each initialized to the column-wise mean of all base rows
    (accumulated in float64, stored as float32).

    Raises:
        SmipeError: on a row-count mismatch with the plan or a non-float32
            matrix.
    """
    if matrix.ndim != 2:
        raise SmipeError(f"embedding matrix must be 2-D, got {matrix.ndim}-D")
    if matrix.dtype != np.float32:
        raise SmipeError(f"embedding matrix must be float32, got {matrix.dtype}")
    if matrix.shape[0] != plan.base_vocab_size:
        raise SmipeError(
            f"matrix has {matrix.shape[0]} rows but the plan expects "
            f"{plan.base_vocab_size}"
        )
    n_new = plan.new_token_count
    if n_new == 0:
        return matrix.copy()
    if matrix.shape[0] == 0:
        raise SmipeError("cannot initialize new rows from an empty base matrix")
    mean = matrix.astype(np.float64).mean(axis=0).astype(np.float32)
    out = np.empty(
        (matrix.shape[0] + n_new, matrix.shape[1]), dtype=np.float32
    )
    out[: matrix.shape[0]] = matrix
    out[matrix.shape[0] :] = mean
    return out


def write_embeddings(path: str | Path, matrix: np.ndarray) -> None:
    """Write the binary matrix format: magic "EMB1", then row and column
    counts as little-endian u64, then float32 row-major data."""
    if matrix.ndim != 2:
        raise SmipeError(f"embedding matrix must be 2-D, got {matrix.ndim}-D")
    rows, cols = matrix.shape
    with open(path, "wb") as fh:
        fh.write(EMBEDDING_MAGIC)
        fh.write(struct.pack("<QQ", rows, cols))
        fh.write(np.ascontiguousarray(matrix, dtype="<f4").tobytes())


def read_embeddings(path: str | Path) -> np.ndarray:
    """Read the binary matrix format written by write_embeddings."""
    blob = Path(path).read_bytes()
    if blob[:4] != EMBEDDING_MAGIC:
        raise SmipeError(f"{path}: not an embedding matrix file")
    if len(blob) < 20:
        raise SmipeError(f"{path}: truncated embedding header")
    rows, cols = struct.unpack_from("<QQ", blob, 4)
    expected = 20 + rows * cols * 4
    if len(blob) != expected:
        raise SmipeError(
            f"{path}: expected {expected} bytes for {rows}x{cols}, "
            f"got {len(blob)}"
        )
    data = np.frombuffer(blob, dtype="<f4", offset=20, count=rows * cols)
    return data.reshape(rows, cols).astype(np.float32, copy=True)
