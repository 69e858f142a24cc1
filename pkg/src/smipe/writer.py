"""Canonical and randomized SMILES emission.

Canonical order comes from iterative neighborhood refinement: atoms start
with an invariant built from their own attributes, then ranks are refined
with sorted neighbor ranks until stable; remaining ties are split at the
lowest-index member and refinement repeats. Output is a DFS from the
lowest-ranked atom of each component.

Randomized output reuses the same emitter with a seeded random start atom
and seeded neighbor order, which is the augmentation primitive.
"""

from __future__ import annotations

import heapq
import random
from collections import Counter
from typing import Iterable

from .molecule import (
    ORGANIC_AROMATIC,
    ORGANIC_SUBSET,
    Atom,
    Molecule,
    connected_components,
    implicit_hydrogens,
)
from .parser import parse, validate

_ORDER_CODE = {"single": 1, "double": 2, "triple": 3, "quadruple": 4, "aromatic": 5}
_DIR_CODE = {None: 0, "/": 1, "\\": 2}
_ORDER_TOKEN = {"double": "=", "triple": "#", "quadruple": "$"}


# ---------------------------------------------------------------------------
# canonical ranking
# ---------------------------------------------------------------------------


def _dense_ranks(keys: list) -> list[int]:
    pos = {k: r for r, k in enumerate(sorted(set(keys)))}
    return [pos[k] for k in keys]


def canonical_ranks(mol: Molecule) -> list[int]:
    """A permutation-independent total order over the atoms.

    Two isomorphic molecules with matching atom and bond attributes rank
    their corresponding atoms identically, which is what makes
    write_canonical stable under input reordering.
    """
    n = len(mol.atoms)
    if n == 0:
        return []
    adj = mol.neighbors()

    def bond_key(bi: int, frm: int) -> tuple[int, int]:
        bond = mol.bonds[bi]
        return (_ORDER_CODE[bond.order], _DIR_CODE[bond.direction_from(frm)])

    init = []
    for i, a in enumerate(mol.atoms):
        init.append(
            (
                a.element,
                int(a.aromatic),
                a.isotope or 0,
                a.charge,
                -1 if a.explicit_h is None else a.explicit_h,
                a.chirality or "",
                -1 if a.atom_class is None else a.atom_class,
                int(a.is_wildcard),
                len(adj[i]),
                implicit_hydrogens(mol, i, adj),
                tuple(sorted(bond_key(bi, i) for bi, _ in adj[i])),
            )
        )
    ranks = _dense_ranks(init)
    classes = len(set(ranks))
    while True:
        while True:
            keys = [
                (
                    ranks[i],
                    tuple(sorted((bond_key(bi, i), ranks[j]) for bi, j in adj[i])),
                )
                for i in range(n)
            ]
            ranks = _dense_ranks(keys)
            refined = len(set(ranks))
            if refined == classes:
                break
            classes = refined
        if classes == n:
            return ranks
        # split the lowest tied class at its lowest-index member, then let
        # the new distinction propagate
        counts = Counter(ranks)
        tied = min(r for r, c in counts.items() if c > 1)
        chosen = min(i for i in range(n) if ranks[i] == tied)
        ranks = _dense_ranks(
            [(ranks[i], 0 if i == chosen else 1) for i in range(n)]
        )
        classes = len(set(ranks))


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------


def _needs_bracket(atom: Atom) -> bool:
    if atom.explicit_h is not None or atom.isotope is not None:
        return True
    if atom.charge or atom.chirality or atom.atom_class is not None:
        return True
    if atom.is_wildcard:
        return False
    if atom.aromatic:
        return atom.element not in ORGANIC_AROMATIC
    return atom.element not in ORGANIC_SUBSET


def _atom_text(atom: Atom) -> str:
    symbol = "*" if atom.is_wildcard else (
        atom.element.lower() if atom.aromatic else atom.element
    )
    if not _needs_bracket(atom):
        return symbol
    parts = ["["]
    if atom.isotope is not None:
        parts.append(str(atom.isotope))
    parts.append(symbol)
    if atom.chirality:
        parts.append(atom.chirality)
    if atom.explicit_h:
        parts.append("H" if atom.explicit_h == 1 else f"H{atom.explicit_h}")
    if atom.charge:
        if atom.charge == 1:
            parts.append("+")
        elif atom.charge == -1:
            parts.append("-")
        else:
            parts.append(f"{atom.charge:+d}")
    if atom.atom_class is not None:
        parts.append(f":{atom.atom_class}")
    parts.append("]")
    return "".join(parts)


def _bond_token(mol: Molecule, bi: int, frm: int) -> str:
    bond = mol.bonds[bi]
    a, b = bond.atoms
    both_aromatic = mol.atoms[a].aromatic and mol.atoms[b].aromatic
    if bond.order == "aromatic":
        return "" if both_aromatic else ":"
    if bond.order == "single":
        marker = bond.direction_from(frm)
        if marker:
            return marker
        # a bare single bond between aromatic atoms would read back as
        # aromatic, so it has to stay explicit
        return "-" if both_aromatic else ""
    return _ORDER_TOKEN[bond.order]


def _digit_text(d: int) -> str:
    return str(d) if d < 10 else f"%{d:02d}"


def _emit(
    mol: Molecule,
    order: list[list[tuple[int, int]]],
    starts: list[int],
) -> str:
    """Serialize along a DFS with the given per-atom neighbor order."""
    visit_pos: dict[int, int] = {}
    tree: dict[int, list[tuple[int, int]]] = {i: [] for i in range(len(mol.atoms))}
    rings: list[tuple[int, int, int]] = []  # (opener, closer, bond index)
    used: set[int] = set()
    pos = 0
    for start in starts:
        visit_pos[start] = pos
        pos += 1
        stack = [(start, iter(order[start]))]
        while stack:
            u, neighbors = stack[-1]
            for bi, v in neighbors:
                if bi in used:
                    continue
                used.add(bi)
                if v in visit_pos:
                    rings.append((v, u, bi))
                else:
                    visit_pos[v] = pos
                    pos += 1
                    tree[u].append((bi, v))
                    stack.append((v, iter(order[v])))
                    break
            else:
                stack.pop()

    opens_at: dict[int, list[tuple[int, int]]] = {}
    closes_at: dict[int, list[int]] = {}
    for opener, closer, bi in rings:
        opens_at.setdefault(opener, []).append((bi, closer))
    open_seq: dict[int, int] = {}
    seq = 0
    for atom in sorted(opens_at, key=visit_pos.get):
        opens_at[atom].sort(key=lambda t: (visit_pos[t[1]], t[0]))
        for bi, _ in opens_at[atom]:
            open_seq[bi] = seq
            seq += 1
    for opener, closer, bi in rings:
        closes_at.setdefault(closer, []).append(bi)
    for atom in closes_at:
        closes_at[atom].sort(key=open_seq.get)

    out: list[str] = []
    free_digits = list(range(1, 100))
    heapq.heapify(free_digits)
    digit_of: dict[int, int] = {}
    for ci, start in enumerate(starts):
        if ci:
            out.append(".")
        stack2 = [("atom", start, None, None)]
        while stack2:
            tag, payload, parent, via = stack2.pop()
            if tag == "text":
                out.append(payload)
                continue
            a = payload
            if parent is not None:
                out.append(_bond_token(mol, via, parent))
            out.append(_atom_text(mol.atoms[a]))
            freed = []
            for bi in closes_at.get(a, ()):
                out.append(_digit_text(digit_of[bi]))
                freed.append(digit_of[bi])
            for bi, _closer in opens_at.get(a, ()):
                digit = heapq.heappop(free_digits)
                digit_of[bi] = digit
                out.append(_bond_token(mol, bi, a) + _digit_text(digit))
            for digit in freed:
                heapq.heappush(free_digits, digit)
            kids = tree[a]
            for k in range(len(kids) - 1, -1, -1):
                bi, child = kids[k]
                if k < len(kids) - 1:
                    stack2.append(("text", ")", None, None))
                    stack2.append(("atom", child, a, bi))
                    stack2.append(("text", "(", None, None))
                else:
                    stack2.append(("atom", child, a, bi))
    return "".join(out)


def write_canonical(mol: Molecule) -> str:
    """Serialize to the canonical form: byte-identical for isomorphic inputs
    with matching attributes, independent of atom order."""
    if not mol.atoms:
        return ""
    ranks = canonical_ranks(mol)
    adj = mol.neighbors()
    order = [sorted(nbrs, key=lambda t: ranks[t[1]]) for nbrs in adj]
    comps = connected_components(mol, adj)
    starts = [min(comp, key=lambda i: ranks[i]) for comp in comps]
    starts.sort(key=lambda i: ranks[i])
    return _emit(mol, order, starts)


def write_random(mol: Molecule, seed: int) -> str:
    """Serialize along a seeded random traversal.

    The start atom of each component is drawn uniformly and every atom's
    neighbor order is shuffled, so the same molecule yields many distinct
    but equivalent strings across seeds. Deterministic for a given seed.
    """
    if not mol.atoms:
        return ""
    rng = random.Random(seed)
    adj = mol.neighbors()
    order = []
    for nbrs in adj:
        row = list(nbrs)
        rng.shuffle(row)
        order.append(row)
    comps = connected_components(mol, adj)
    starts = [rng.choice(comp) for comp in comps]
    return _emit(mol, order, starts)


def canonicalize(s: str) -> str:
    """Parse then re-emit canonically. Convenience wrapper."""
    return write_canonical(parse(s))


def augment_corpus(
    corpus: Iterable[str], seed: int, strict: bool = False
) -> tuple[list[str], int]:
    """One augmentation round over a corpus.

    Every valid SMILES is emitted followed by exactly one randomized
    variant; invalid entries are dropped. Returns the augmented list and
    the dropped count. Output is deterministic for a given seed.
    """
    rng = random.Random(seed)
    out: list[str] = []
    dropped = 0
    for line in corpus:
        s = line.strip()
        if not validate(s, strict=strict).valid:
            dropped += 1
            continue
        out.append(s)
        out.append(write_random(parse(s), rng.getrandbits(64)))
    return out, dropped
