"""Pair-merge vocabulary training over atom-level units.

The loop is plain byte-pair encoding applied to SMILES units: count every
adjacent pair across the corpus, merge the most frequent one into a single
token, repeat while the best count stays above the frequency threshold.
Ties break on the lexicographically smallest (left, right) pair, so a run
is fully reproducible. Pair counts are maintained incrementally; only the
sequences that contain the merged pair are rewritten.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import SmipeError
from .pretokenizer import unit_texts
from .writer import augment_corpus
from .parser import validate


@dataclass(frozen=True, slots=True)
class MergeRule:
    """One learned merge: ``left + right`` becomes a token.

    ``rank`` is the order the rule was learned in (0-based) and is also the
    order rules are applied in. ``learned_frequency`` is the pair count at
    the moment the rule was learned; it is not part of the serialized model
    format, so rules loaded from disk carry 0 here.
    """

    left: str
    right: str
    rank: int
    learned_frequency: int = 0

    @property
    def token(self) -> str:
        return self.left + self.right


@dataclass(slots=True)
class TrainerConfig:
    """Knobs for a training run.

    threshold: keep merging while the best pair count is strictly above
        this; 3 reproduces the published setup.
    max_merges: optional hard cap on the number of rules.
    augment: when True each valid input contributes itself plus one
        randomized variant before counting.
    augmentation_seed: drives the randomized variants.
    strict: validate inputs against default valences, not just syntax,
        when filtering.
    """

    threshold: int = 3
    max_merges: int | None = None
    augment: bool = True
    augmentation_seed: int = 0
    strict: bool = False


@dataclass(frozen=True, slots=True)
class TrainingStats:
    """What happened to the corpus before merge learning."""

    n_input: int
    n_dropped: int
    n_sequences: int


def count_pairs(sequences: Iterable[Sequence[str]]) -> Counter[tuple[str, str]]:
    """Adjacent-pair frequencies, counted per occurrence."""
    counts: Counter[tuple[str, str]] = Counter()
    for seq in sequences:
        for pair in zip(seq, seq[1:]):
            counts[pair] += 1
    return counts


def merge_pair(seq: list[str], left: str, right: str) -> list[str]:
    """Replace every adjacent (left, right) with the joined token.

    Scans left to right without overlap, so "a a a" under (a, a) becomes
    ["aa", "a"].
    """
    out: list[str] = []
    i = 0
    n = len(seq)
    while i < n:
        if i + 1 < n and seq[i] == left and seq[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(seq[i])
            i += 1
    return out


def prepare_training_sequences(
    corpus: Iterable[str], config: TrainerConfig
) -> tuple[list[list[str]], TrainingStats]:
    """Filter, optionally augment, and pre-tokenize a SMILES corpus."""
    lines = [line.strip() for line in corpus]
    lines = [line for line in lines if line]
    if config.augment:
        kept, dropped = augment_corpus(
            lines, seed=config.augmentation_seed, strict=config.strict
        )
    else:
        kept = [s for s in lines if validate(s, strict=config.strict).valid]
        dropped = len(lines) - len(kept)
    sequences = [unit_texts(s) for s in kept]
    return sequences, TrainingStats(
        n_input=len(lines), n_dropped=dropped, n_sequences=len(sequences)
    )


def learn_merges(
    sequences: Iterable[Sequence[str]],
    threshold: int = 3,
    max_merges: int | None = None,
    progress: Callable[[MergeRule], None] | None = None,
) -> list[MergeRule]:
    """Run the merge loop over pre-tokenized sequences.

    Stops once no pair count exceeds ``threshold`` (or at ``max_merges``).
    Identical sequences are collapsed to one weighted entry, which changes
    nothing about the result but keeps rewrites cheap.
    """
    weighted: dict[tuple[str, ...], int] = {}
    for seq in sequences:
        key = tuple(seq)
        weighted[key] = weighted.get(key, 0) + 1
    entries: list[tuple[list[str], int]] = [
        (list(seq), mult) for seq, mult in weighted.items()
    ]

    pair_counts: Counter[tuple[str, str]] = Counter()
    holders: dict[tuple[str, str], set[int]] = defaultdict(set)
    for idx, (seq, mult) in enumerate(entries):
        for pair in zip(seq, seq[1:]):
            pair_counts[pair] += mult
            holders[pair].add(idx)

    rules: list[MergeRule] = []
    while pair_counts:
        if max_merges is not None and len(rules) >= max_merges:
            break
        best_count = max(pair_counts.values())
        if best_count <= threshold:
            break
        best = min(p for p, c in pair_counts.items() if c == best_count)
        rule = MergeRule(
            left=best[0],
            right=best[1],
            rank=len(rules),
            learned_frequency=best_count,
        )
        rules.append(rule)
        if progress is not None:
            progress(rule)
        for idx in sorted(holders.pop(best, ())):
            seq, mult = entries[idx]
            merged = merge_pair(seq, best[0], best[1])
            if merged == seq:
                continue
            for pair in zip(seq, seq[1:]):
                pair_counts[pair] -= mult
                if pair_counts[pair] <= 0:
                    del pair_counts[pair]
            for pair in zip(merged, merged[1:]):
                pair_counts[pair] += mult
                holders[pair].add(idx)
            entries[idx] = (merged, mult)
        pair_counts.pop(best, None)
    return rules


def train(
    corpus: Iterable[str],
    config: TrainerConfig | None = None,
    progress: Callable[[MergeRule], None] | None = None,
) -> list[MergeRule]:
    """Full training pipeline: filter, augment, pre-tokenize, learn merges.

    Raises:
        SmipeError: when no valid SMILES survive filtering.
    """
    config = config or TrainerConfig()
    sequences, stats = prepare_training_sequences(corpus, config)
    if not sequences:
        raise SmipeError("training corpus contains no valid SMILES")
    return learn_merges(
        sequences,
        threshold=config.threshold,
        max_merges=config.max_merges,
        progress=progress,
    )


def vocab_from_merges(
    rules: Sequence[MergeRule], base_units: Iterable[str]
) -> list[str]:
    """Ordered vocabulary: sorted base units, then merge tokens by rank.

    Duplicates (a merge product that equals a base unit, or two merge
    chains arriving at the same string) keep their first position.
    """
    out: list[str] = []
    seen: set[str] = set()
    for unit in sorted(set(base_units)):
        out.append(unit)
        seen.add(unit)
    for rule in rules:
        if rule.token not in seen:
            out.append(rule.token)
            seen.add(rule.token)
    return out


def report_top_tokens(
    rules: Sequence[MergeRule], k: int
) -> list[tuple[str, int]]:
    """Top learned tokens by learned frequency; ties fall back to rank."""
    ordered = sorted(rules, key=lambda r: (-r.learned_frequency, r.rank))
    return [(r.token, r.learned_frequency) for r in ordered[:k]]
