"""Exception types shared across the package."""

from __future__ import annotations


class SmipeError(Exception):
    """Base class for all errors raised by this package."""


class SmilesParseError(SmipeError, ValueError):
    """Raised when a SMILES string cannot be parsed.

    Attributes:
        kind: one of "syntax", "unclosed_ring", "unbalanced_parens",
            "bad_bracket_atom".
        position: character offset of the first offending character.
    """

    def __init__(self, message: str, kind: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.kind = kind
        self.position = position


class TagPairingError(SmipeError, ValueError):
    """Raised for unpaired or nested document tags.

    Attributes:
        position: character offset of the offending tag.
    """

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


class TokenizerError(SmipeError, ValueError):
    """Raised for malformed tokenizer models or undecodable token ids."""
