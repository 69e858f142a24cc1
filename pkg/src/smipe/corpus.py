"""Corpus assembly: tagging, concatenation, weighted blending, fertility.

The blend draws records from several datasets in target proportions fixed
by the largest-remainder rule, shuffles deterministically from one seed,
and cycles through a reshuffled copy whenever a dataset runs dry. The
fertility report compares tokens-per-string distributions between two
tokenizer callables.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .errors import SmipeError

EOS_TOKEN = "<EOS>"
OPEN_TAG = "<SMILES>"
CLOSE_TAG = "</SMILES>"


# ---------------------------------------------------------------------------
# record IO
# ---------------------------------------------------------------------------


def read_records(
    path: str | Path, format: str = "lines", field: str = "text"
) -> list[str]:
    """Read one record per line, either raw or as a JSON object field."""
    if format not in ("lines", "jsonl"):
        raise SmipeError(f"unknown corpus format {format!r}")
    out: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if format == "lines":
                out.append(line)
                continue
            try:
                obj = json.loads(line)
                out.append(obj[field])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise SmipeError(
                    f"{path}:{lineno}: bad jsonl record ({exc})"
                ) from exc
    return out


def read_smiles_corpus(path: str | Path, format: str = "lines") -> list[str]:
    """SMILES corpus reader; jsonl records carry a "smiles" field."""
    return read_records(path, format=format, field="smiles")


# ---------------------------------------------------------------------------
# tagging and concatenation
# ---------------------------------------------------------------------------


def wrap_smiles(text: str, spans: Sequence[tuple[int, int]]) -> str:
    """Surround the given (offset, length) spans with SMILES tags.

    Spans must be sorted, non-overlapping and inside the text.
    """
    pos = 0
    parts: list[str] = []
    for offset, length in spans:
        if offset < pos or length < 0 or offset + length > len(text):
            raise ValueError(
                f"span ({offset}, {length}) overlaps a previous span or "
                f"leaves the text"
            )
        parts.append(text[pos:offset])
        parts.append(OPEN_TAG)
        parts.append(text[offset : offset + length])
        parts.append(CLOSE_TAG)
        pos = offset + length
    parts.append(text[pos:])
    return "".join(parts)


def concat_records(samples: Iterable[str]) -> str:
    """Join training samples with the literal end-of-sequence token."""
    return EOS_TOKEN.join(samples)


# ---------------------------------------------------------------------------
# weighted blending
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class DatasetSpec:
    """One blend source: a name, a record file, and a mixture weight."""

    name: str
    path: str
    weight: float
    format: str = "lines"


def load_blend_config(path: str | Path) -> list[DatasetSpec]:
    """Read a JSON list of {name, path, weight, format} objects.

    A top-level {"datasets": [...]} wrapper is accepted too.
    """
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict):
        data = data.get("datasets")
    if not isinstance(data, list):
        raise SmipeError(f"{path}: expected a list of dataset objects")
    try:
        specs = [
            DatasetSpec(
                name=d["name"],
                path=d["path"],
                weight=float(d["weight"]),
                format=d.get("format", "lines"),
            )
            for d in data
        ]
    except (KeyError, TypeError) as exc:
        raise SmipeError(
            f"{path}: dataset objects need name, path and weight ({exc})"
        ) from exc
    return specs


def largest_remainder_counts(weights: Sequence[float], total: int) -> list[int]:
    """Integer targets summing to ``total``, each within 1 of its share."""
    shares = [w * total for w in weights]
    counts = [int(s) for s in shares]
    leftover = total - sum(counts)
    order = sorted(
        range(len(weights)), key=lambda i: (-(shares[i] - counts[i]), i)
    )
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def blend(
    specs: Sequence[DatasetSpec], total_records: int, seed: int
) -> tuple[list[str], dict[str, int]]:
    """Draw ``total_records`` from the datasets in their weight proportions.

    Returns the blended record list and a per-dataset manifest of realized
    counts. Fully deterministic for a given seed: per-dataset shuffles,
    reshuffle-on-exhaustion cycling and the interleaving order all flow
    from it.

    Raises:
        SmipeError: on bad weights or an empty dataset.
    """
    if not specs:
        raise SmipeError("no datasets to blend")
    for spec in specs:
        if not 0 < spec.weight <= 1:
            raise SmipeError(
                f"dataset {spec.name}: weight {spec.weight} outside (0, 1]"
            )
    total_weight = sum(s.weight for s in specs)
    if abs(total_weight - 1.0) > 1e-9:
        raise SmipeError(f"weights sum to {total_weight:.6f}, expected 1.0")
    if total_records < 0:
        raise SmipeError("total_records must be non-negative")

    rng = random.Random(seed)
    sub_seeds = [rng.getrandbits(64) for _ in specs]
    counts = largest_remainder_counts([s.weight for s in specs], total_records)

    sources = []
    for spec, sub_seed in zip(specs, sub_seeds):
        records = read_records(spec.path, format=spec.format)
        if not records:
            raise SmipeError(f"dataset {spec.name}: {spec.path} has no records")
        sources.append(_cycle_shuffled(records, random.Random(sub_seed)))

    slots: list[int] = []
    for i, c in enumerate(counts):
        slots.extend([i] * c)
    rng.shuffle(slots)

    out = [next(sources[i]) for i in slots]
    manifest = {spec.name: counts[i] for i, spec in enumerate(specs)}
    return out, manifest


def _cycle_shuffled(records: list[str], rng: random.Random):
    while True:
        pool = list(records)
        rng.shuffle(pool)
        yield from pool


# ---------------------------------------------------------------------------
# fertility
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class FertilityReport:
    """Tokens-per-string comparison between two tokenizers.

    Medians are lower medians. ``single_token_fraction_b`` is the share of
    strings tokenizer B covers with one token. Histogram buckets have unit
    width up to 64 tokens, then double: "65-128", "129-256", and so on.
    """

    n_strings: int
    counts_a: tuple[int, ...]
    counts_b: tuple[int, ...]
    median_a: int
    median_b: int
    single_token_fraction_b: float
    histogram_a: dict[str, int]
    histogram_b: dict[str, int]

    def to_json(self) -> dict:
        return {
            "n_strings": self.n_strings,
            "median_a": self.median_a,
            "median_b": self.median_b,
            "single_token_fraction_b": self.single_token_fraction_b,
            "histogram_a": self.histogram_a,
            "histogram_b": self.histogram_b,
        }

    def tsv_rows(self) -> list[tuple[str, int, int]]:
        """Plot-friendly rows: (bucket, count_a, count_b)."""
        labels = sorted(
            set(self.histogram_a) | set(self.histogram_b), key=_bucket_sort_key
        )
        return [
            (
                label,
                self.histogram_a.get(label, 0),
                self.histogram_b.get(label, 0),
            )
            for label in labels
        ]


def _bucket_label(count: int) -> str:
    if count <= 64:
        return str(count)
    low = 64
    while low * 2 < count:
        low *= 2
    return f"{low + 1}-{low * 2}"


def _bucket_sort_key(label: str) -> int:
    return int(label.split("-")[0])


def lower_median(values: Sequence[int]) -> int:
    if not values:
        raise SmipeError("median of an empty sequence")
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def histogram_buckets(counts: Iterable[int]) -> dict[str, int]:
    out: dict[str, int] = {}
    for c in counts:
        label = _bucket_label(c)
        out[label] = out.get(label, 0) + 1
    return dict(sorted(out.items(), key=lambda kv: _bucket_sort_key(kv[0])))


def fertility_report(
    corpus: Iterable[str],
    tok_a: Callable[[str], Sequence],
    tok_b: Callable[[str], Sequence],
) -> FertilityReport:
    """Compare two tokenizer callables over a corpus.

    Each callable maps a string to its token sequence; only lengths are
    used.
    """
    counts_a: list[int] = []
    counts_b: list[int] = []
    for s in corpus:
        counts_a.append(len(tok_a(s)))
        counts_b.append(len(tok_b(s)))
    if not counts_a:
        raise SmipeError("fertility report over an empty corpus")
    singles = sum(1 for c in counts_b if c == 1)
    return FertilityReport(
        n_strings=len(counts_a),
        counts_a=tuple(counts_a),
        counts_b=tuple(counts_b),
        median_a=lower_median(counts_a),
        median_b=lower_median(counts_b),
        single_token_fraction_b=singles / len(counts_b),
        histogram_a=histogram_buckets(counts_a),
        histogram_b=histogram_buckets(counts_b),
    )
