"""Scoring generated SMILES against gold references.

A prediction is whatever sits between the first well-formed tag pair of
the raw model output. It counts as invalid when no tags are found or the
extracted text does not parse; otherwise it is compared to the gold answer
by canonical form (or raw text, on request) and by fingerprint similarity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .fingerprints import morgan_fingerprint, tanimoto
from .molecule import ValidityReport
from .parser import parse, validate
from .writer import write_canonical

OPEN_TAG = "<SMILES>"
CLOSE_TAG = "</SMILES>"


def extract_tagged(
    output: str,
    open_tag: str = OPEN_TAG,
    close_tag: str = CLOSE_TAG,
    open_tag_in_prompt: bool = False,
) -> str | None:
    """Pull the tagged span out of raw model output.

    Returns the whitespace-trimmed text between the first open tag and the
    next close tag, or None when no such pair exists. With
    ``open_tag_in_prompt=True`` the opening tag is assumed to have been
    part of the prompt, so the prediction is everything before the first
    close tag.
    """
    if open_tag_in_prompt:
        end = output.find(close_tag)
        if end < 0:
            return None
        return output[:end].strip()
    start = output.find(open_tag)
    while start >= 0:
        content_start = start + len(open_tag)
        end = output.find(close_tag, content_start)
        if end >= 0:
            return output[content_start:end].strip()
        start = output.find(open_tag, content_start)
    return None


@dataclass(frozen=True, slots=True)
class EvalRecord:
    """Per-sample outcome.

    ``extracted`` is None when no tag pair was found, and ``validity``
    describes the extracted text when there is one. ``fps`` is None for
    invalid predictions.
    """

    raw_output: str
    gold: str
    extracted: str | None
    validity: ValidityReport | None
    exact_match: bool
    fps: float | None


@dataclass(frozen=True, slots=True)
class TaskScore:
    """Aggregate metrics over one evaluation run."""

    n_samples: int
    n_invalid: int
    n_exact_match: int
    mean_fps: float

    def to_json(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "n_invalid": self.n_invalid,
            "n_exact_match": self.n_exact_match,
            "mean_fps": self.mean_fps,
        }


def evaluate_records(
    records: Sequence[tuple[str, str]],
    match: str = "canonical",
    open_tag: str = OPEN_TAG,
    close_tag: str = CLOSE_TAG,
    open_tag_in_prompt: bool = False,
    radius: int = 2,
    nbits: int = 2048,
) -> list[EvalRecord]:
    """Evaluate (raw_output, gold) pairs one by one.

    Exact match compares canonical forms, or raw extracted text under
    ``match="raw"``. Every gold answer must parse.

    Raises:
        ValueError: naming the record index, when a gold SMILES is invalid
            or ``match`` is unknown.
    """
    if match not in ("canonical", "raw"):
        raise ValueError(f"unknown match mode {match!r}")
    out: list[EvalRecord] = []
    for idx, (raw_output, gold) in enumerate(records):
        try:
            gold_mol = parse(gold)
        except Exception as exc:
            raise ValueError(f"record {idx}: gold SMILES invalid: {exc}") from exc
        extracted = extract_tagged(
            raw_output,
            open_tag=open_tag,
            close_tag=close_tag,
            open_tag_in_prompt=open_tag_in_prompt,
        )
        if extracted is None:
            out.append(
                EvalRecord(
                    raw_output=raw_output,
                    gold=gold,
                    extracted=None,
                    validity=None,
                    exact_match=False,
                    fps=None,
                )
            )
            continue
        report = validate(extracted)
        if not report.valid:
            out.append(
                EvalRecord(
                    raw_output=raw_output,
                    gold=gold,
                    extracted=extracted,
                    validity=report,
                    exact_match=False,
                    fps=None,
                )
            )
            continue
        pred_mol = parse(extracted)
        if match == "canonical":
            exact = write_canonical(pred_mol) == write_canonical(gold_mol)
        else:
            exact = extracted == gold
        fps = tanimoto(
            morgan_fingerprint(pred_mol, radius=radius, nbits=nbits),
            morgan_fingerprint(gold_mol, radius=radius, nbits=nbits),
        )
        out.append(
            EvalRecord(
                raw_output=raw_output,
                gold=gold,
                extracted=extracted,
                validity=report,
                exact_match=exact,
                fps=fps,
            )
        )
    return out


def aggregate(
    evaluated: Sequence[EvalRecord], penalize_invalid: bool = True
) -> TaskScore:
    """Fold per-sample outcomes into one TaskScore.

    Invalid predictions contribute 0 to mean_fps by default; with
    ``penalize_invalid=False`` the mean runs over valid predictions only
    (and is 0.0 when none are valid).
    """
    n = len(evaluated)
    n_invalid = sum(1 for r in evaluated if r.fps is None)
    n_exact = sum(1 for r in evaluated if r.exact_match)
    sims = [r.fps for r in evaluated if r.fps is not None]
    if penalize_invalid:
        mean = sum(sims) / n if n else 0.0
    else:
        mean = sum(sims) / len(sims) if sims else 0.0
    return TaskScore(
        n_samples=n,
        n_invalid=n_invalid,
        n_exact_match=n_exact,
        mean_fps=mean,
    )


def score_task(
    records: Sequence[tuple[str, str]],
    match: str = "canonical",
    open_tag: str = OPEN_TAG,
    close_tag: str = CLOSE_TAG,
    open_tag_in_prompt: bool = False,
    penalize_invalid: bool = True,
    radius: int = 2,
    nbits: int = 2048,
) -> TaskScore:
    """Aggregate evaluation of (raw_output, gold) pairs."""
    evaluated = evaluate_records(
        records,
        match=match,
        open_tag=open_tag,
        close_tag=close_tag,
        open_tag_in_prompt=open_tag_in_prompt,
        radius=radius,
        nbits=nbits,
    )
    return aggregate(evaluated, penalize_invalid=penalize_invalid)
