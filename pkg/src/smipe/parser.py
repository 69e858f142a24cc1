"""SMILES reader: turns text into a molecular graph.

The accepted grammar covers organic-subset atoms, bracket atoms, bond
symbols (- = # $ : / \\), ring closures (single digits and %nn), branches
and dot-separated components. Aromaticity is taken from lowercase symbols
as written; no perception or kekulization is attempted.
"""

from __future__ import annotations

import re
from dataclasses import replace

from .errors import SmilesParseError
from .molecule import (
    AROMATIC_ELEMENTS,
    BOND_VALENCE,
    DEFAULT_VALENCES,
    ELEMENTS,
    Atom,
    Bond,
    Molecule,
    ValidityReport,
    connected_components,
)

# bond symbol -> (order, direction marker)
_BOND_SYMBOLS = {
    "-": ("single", None),
    "=": ("double", None),
    "#": ("triple", None),
    "$": ("quadruple", None),
    ":": ("aromatic", None),
    "/": ("single", "/"),
    "\\": ("single", "\\"),
}

_BRACKET_RE = re.compile(
    r"""^(?P<iso>\d+)?
         (?P<sym>se|as|[bcnops]|[A-Z][a-z]?|\*)
         (?P<chi>@@|@)?
         (?P<hcount>H\d*)?
         (?P<charge>[+-]\d+|\++|-+)?
         (?::(?P<cls>\d+))?$""",
    re.VERBOSE,
)

_RING_PERCENT_RE = re.compile(r"%\d\d")

_MAX_CHARGE = 15


def _flip(direction: str | None) -> str | None:
    if direction is None:
        return None
    return "\\" if direction == "/" else "/"


def _parse_bracket(content: str, offset: int) -> Atom:
    def fail(why: str) -> SmilesParseError:
        return SmilesParseError(
            f"bad bracket atom [{content}]: {why}", "bad_bracket_atom", offset
        )

    m = _BRACKET_RE.match(content)
    if m is None:
        raise fail("unrecognized contents")
    sym = m.group("sym")
    if sym == "*":
        element, aromatic, wildcard = "*", False, True
    elif sym[0].islower():
        element, aromatic, wildcard = sym.capitalize(), True, False
        if element not in AROMATIC_ELEMENTS:
            raise fail(f"element {element} cannot be aromatic")
    else:
        element, aromatic, wildcard = sym, False, False
        if element not in ELEMENTS:
            raise fail(f"unknown element {sym}")
    isotope: int | None = None
    if m.group("iso") is not None:
        isotope = int(m.group("iso"))
        if isotope == 0:
            raise fail("isotope must be positive")
    hcount = 0
    if m.group("hcount") is not None:
        digits = m.group("hcount")[1:]
        hcount = int(digits) if digits else 1
    charge = 0
    if m.group("charge") is not None:
        text = m.group("charge")
        if len(text) > 1 and text[1].isdigit():
            charge = int(text)
        else:
            charge = len(text) if text[0] == "+" else -len(text)
        if abs(charge) > _MAX_CHARGE:
            raise fail(f"charge {charge:+d} out of range")
    cls = int(m.group("cls")) if m.group("cls") is not None else None
    return Atom(
        element=element,
        aromatic=aromatic,
        isotope=isotope,
        charge=charge,
        explicit_h=hcount,
        chirality=m.group("chi"),
        atom_class=cls,
        is_wildcard=wildcard,
    )


def _parse_impl(s: str) -> tuple[Molecule, list[int]]:
    """Parse and also return the source offset of every atom."""

    def err(message: str, kind: str, pos: int) -> SmilesParseError:
        return SmilesParseError(message, kind, pos)

    if not s:
        raise err("empty SMILES", "syntax", 0)

    atoms: list[Atom] = []
    offsets: list[int] = []
    bonds: list[Bond] = []
    bonded_pairs: set[tuple[int, int]] = set()

    prev: int | None = None
    pending: tuple[str, str | None, int] | None = None  # (order, direction, pos)
    expect_atom = False
    # branch stack entries: (saved prev, '(' offset, atom count at push)
    stack: list[tuple[int, int, int]] = []
    # ring slot -> (atom, explicit order or None, direction from atom, offset)
    open_rings: dict[int, tuple[int, str | None, str | None, int]] = {}

    def add_bond(
        a: int,
        b: int,
        order: str | None,
        direction: str | None,
        pos: int,
    ) -> None:
        if a == b:
            raise err("ring bond closes onto its own atom", "syntax", pos)
        pair = (a, b) if a < b else (b, a)
        if pair in bonded_pairs:
            raise err("duplicate bond between the same atoms", "syntax", pos)
        bonded_pairs.add(pair)
        if order is None:
            order = (
                "aromatic"
                if atoms[a].aromatic and atoms[b].aromatic
                else "single"
            )
        bonds.append(Bond(atoms=(a, b), order=order, direction=direction))

    def add_atom(atom: Atom, pos: int) -> None:
        nonlocal prev, pending, expect_atom
        atoms.append(atom)
        offsets.append(pos)
        idx = len(atoms) - 1
        if prev is not None:
            order, direction = (pending[0], pending[1]) if pending else (None, None)
            add_bond(prev, idx, order, direction, pos)
        prev = idx
        pending = None
        expect_atom = False

    def close_ring(slot: int, pos: int) -> None:
        nonlocal pending
        assert prev is not None
        here_order = pending[0] if pending else None
        here_dir = pending[1] if pending else None
        pending = None
        if slot not in open_rings:
            open_rings[slot] = (prev, here_order, here_dir, pos)
            return
        other, there_order, there_dir, _ = open_rings.pop(slot)
        if here_order and there_order and here_order != there_order:
            raise err(
                f"ring bond {slot} reopened with a different bond order",
                "syntax",
                pos,
            )
        order = there_order or here_order
        # a direction written at the closing digit reads from the closing
        # atom; normalize to the opening atom's point of view
        direction = there_dir or _flip(here_dir)
        if there_dir and here_dir and there_dir != _flip(here_dir):
            raise err(
                f"ring bond {slot} has conflicting direction markers",
                "syntax",
                pos,
            )
        add_bond(other, prev, order, direction, pos)

    i = 0
    n = len(s)
    while i < n:
        c = s[i]
        if c == "[":
            end = s.find("]", i + 1)
            if end < 0:
                raise err("unterminated bracket atom", "bad_bracket_atom", i)
            add_atom(_parse_bracket(s[i + 1 : end], i), i)
            i = end + 1
        elif s[i : i + 2] in ("Cl", "Br"):
            add_atom(Atom(element=s[i : i + 2]), i)
            i += 2
        elif c in "BCNOPSFI":
            add_atom(Atom(element=c), i)
            i += 1
        elif c in "bcnops":
            add_atom(Atom(element=c.upper(), aromatic=True), i)
            i += 1
        elif c == "*":
            add_atom(Atom(element="*", is_wildcard=True), i)
            i += 1
        elif c in _BOND_SYMBOLS:
            if prev is None:
                raise err("bond symbol with no preceding atom", "syntax", i)
            if pending is not None:
                raise err("two bond symbols in a row", "syntax", i)
            order, direction = _BOND_SYMBOLS[c]
            pending = (order, direction, i)
            i += 1
        elif c.isdigit() or c == "%":
            if c == "%":
                m = _RING_PERCENT_RE.match(s, i)
                if m is None:
                    raise err("% ring closure needs two digits", "syntax", i)
                slot = int(m.group()[1:])
                width = 3
            else:
                slot = int(c)
                width = 1
            if prev is None:
                raise err("ring closure with no preceding atom", "syntax", i)
            close_ring(slot, i)
            i += width
        elif c == "(":
            if prev is None:
                raise err("branch with no preceding atom", "syntax", i)
            if pending is not None:
                raise err("bond symbol before a branch", "syntax", pending[2])
            stack.append((prev, i, len(atoms)))
            i += 1
        elif c == ")":
            if not stack:
                raise err("unmatched closing parenthesis", "unbalanced_parens", i)
            if pending is not None:
                raise err("dangling bond symbol in branch", "syntax", pending[2])
            if expect_atom:
                raise err("expected an atom after the dot", "syntax", i)
            saved, _, count = stack.pop()
            if len(atoms) == count:
                raise err("empty branch", "syntax", i)
            prev = saved
            i += 1
        elif c == ".":
            if pending is not None:
                raise err("bond symbol before a dot", "syntax", pending[2])
            if prev is None or expect_atom:
                raise err("dot with no preceding atom", "syntax", i)
            prev = None
            expect_atom = True
            i += 1
        else:
            raise err(f"unexpected character {c!r}", "syntax", i)

    if pending is not None:
        raise err("dangling bond symbol", "syntax", pending[2])
    if expect_atom:
        raise err("expected an atom after the dot", "syntax", n)
    if stack:
        raise err("unclosed parenthesis", "unbalanced_parens", stack[0][1])
    if open_rings:
        first = min(pos for _, _, _, pos in open_rings.values())
        raise err("unclosed ring bond", "unclosed_ring", first)

    mol = Molecule(atoms=tuple(atoms), bonds=tuple(bonds))
    mol = replace(mol, components=len(connected_components(mol)))
    return mol, offsets


def parse(s: str) -> Molecule:
    """Parse a SMILES string.

    Args:
        s: the SMILES text, with no surrounding whitespace.

    Returns:
        The molecular graph.

    Raises:
        SmilesParseError: with a kind tag and character offset on the first
            syntactic problem.
    """
    mol, _ = _parse_impl(s)
    return mol


def validate(s: str, strict: bool = False) -> ValidityReport:
    """Check a SMILES string without raising.

    With ``strict=True`` the bond-order sum of every organic-subset atom is
    additionally checked against its allowed valences. Bracket atoms and
    wildcards are exempt, so anything unusual can always be written
    explicitly.
    """
    try:
        mol, offsets = _parse_impl(s)
    except SmilesParseError as exc:
        return ValidityReport(
            valid=False,
            error_kind=exc.kind,
            error_position=exc.position,
            message=str(exc),
        )
    if strict:
        adj = mol.neighbors()
        for i, atom in enumerate(mol.atoms):
            if atom.from_bracket or atom.is_wildcard:
                continue
            allowed = DEFAULT_VALENCES.get(atom.element)
            if allowed is None:
                continue
            load = sum(BOND_VALENCE[mol.bonds[bi].order] for bi, _ in adj[i])
            if load > max(allowed) + 1e-9:
                return ValidityReport(
                    valid=False,
                    error_kind="valence",
                    error_position=offsets[i],
                    message=(
                        f"{atom.element} with bond order sum {load:g} exceeds "
                        f"allowed valence {max(allowed)}"
                    ),
                )
    return ValidityReport(valid=True)
