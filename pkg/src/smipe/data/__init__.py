"""Bundled data files."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def bundled_corpus_path() -> Path:
    """Path of the packaged SMILES corpus (one molecule per line)."""
    return Path(resources.files(__package__) / "corpus.smi")


def load_bundled_corpus() -> list[str]:
    """The packaged corpus as a list of SMILES strings."""
    text = bundled_corpus_path().read_text(encoding="utf-8")
    return [line for line in text.splitlines() if line.strip()]
