"""Atom-level pre-tokenization of SMILES strings.

Splits a SMILES into indivisible units (bracket atoms, two-letter halogens,
single-character atoms, bonds, ring digits, branches, dots, wildcards)
whose concatenation reproduces the input exactly. These units are the
alphabet that pair-merge training builds on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .errors import SmilesParseError

#: unit pattern, longest alternatives first
SMILES_UNIT_PATTERN = (
    r"\[[^\]]*\]|%\d{2}|Cl|Br|[BCNOPSFI]|[bcnops]|[-=#$:/\\]|[().*]|\d"
)

_UNIT_RE = re.compile(SMILES_UNIT_PATTERN)

_BOND_CHARS = frozenset("-=#$:/\\")

_KIND_BY_CHAR = {"(": "branch_open", ")": "branch_close", ".": "dot", "*": "wildcard"}


@dataclass(frozen=True, slots=True)
class SmilesUnit:
    """One indivisible piece of a SMILES string.

    ``kind`` is one of atom, bracket_atom, bond, ring_digit, branch_open,
    branch_close, dot, wildcard and is a pure function of ``text``.
    """

    text: str
    kind: str


def unit_kind(text: str) -> str:
    """Classify a unit string. See SmilesUnit for the kind values."""
    if text.startswith("["):
        return "bracket_atom"
    if text in _KIND_BY_CHAR:
        return _KIND_BY_CHAR[text]
    if text[0] == "%" or text.isdigit():
        return "ring_digit"
    if text in _BOND_CHARS:
        return "bond"
    return "atom"


def atom_tokenize(s: str) -> list[SmilesUnit]:
    """Split a SMILES string into atom-level units.

    The split is lossless: joining the unit texts gives back ``s``.

    Raises:
        SmilesParseError: on a character outside the SMILES alphabet or an
            unterminated bracket atom, with the offending offset.
    """
    units: list[SmilesUnit] = []
    i = 0
    n = len(s)
    while i < n:
        m = _UNIT_RE.match(s, i)
        if m is None:
            if s[i] == "[":
                raise SmilesParseError(
                    "unterminated bracket atom", "bad_bracket_atom", i
                )
            if s[i] == "%":
                raise SmilesParseError(
                    "% ring closure needs two digits", "syntax", i
                )
            raise SmilesParseError(
                f"character {s[i]!r} is not part of the SMILES alphabet",
                "syntax",
                i,
            )
        text = m.group()
        units.append(SmilesUnit(text=text, kind=unit_kind(text)))
        i = m.end()
    return units


def unit_texts(s: str) -> list[str]:
    """Just the unit strings of ``s``; the common trainer-facing form."""
    return [u.text for u in atom_tokenize(s)]


def is_single_unit(token: str) -> bool:
    """True when ``token`` is exactly one atom-level unit."""
    try:
        return len(atom_tokenize(token)) == 1
    except SmilesParseError:
        return False


def count_units(corpus: Iterable[str]) -> dict[str, int]:
    """Frequency of every unit across a corpus."""
    counts: dict[str, int] = {}
    for s in corpus:
        for u in atom_tokenize(s):
            counts[u.text] = counts.get(u.text, 0) + 1
    return counts
