"""Circular atom-environment fingerprints and bit-set similarity.

Each atom starts from an invariant tuple (element, charge, degree, hydrogen
count, aromatic flag, ring membership), then gathers hashed neighborhoods
round by round up to the radius. Every code from every round sets one bit
of a fixed-width fingerprint. Ring membership means "on any cycle", found
by bridge elimination; no smallest-ring analysis is involved.

Hashes come from BLAKE2b over a canonical byte packing of the tuples, so
fingerprints are stable across platforms and runs.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

from .errors import SmipeError
from .molecule import Molecule, implicit_hydrogens

_ORDER_CODE = {"single": 1, "double": 2, "triple": 3, "quadruple": 4, "aromatic": 5}


def _pack(value) -> bytes:
    """Canonical byte encoding of nested ints, bools, strings and tuples."""
    if isinstance(value, bool):
        return b"b" + bytes([value])
    if isinstance(value, int):
        # codes re-entering a hash are unsigned 64-bit; invariants can be
        # negative, so two disjoint fixed-width ranges
        if 0 <= value < 1 << 64:
            return b"u" + struct.pack("<Q", value)
        return b"i" + struct.pack("<q", value)
    if isinstance(value, str):
        raw = value.encode("utf-8")
        return b"s" + struct.pack("<I", len(raw)) + raw
    if isinstance(value, (tuple, list)):
        return b"t" + struct.pack("<I", len(value)) + b"".join(
            _pack(v) for v in value
        )
    raise TypeError(f"cannot pack {type(value).__name__}")


def _hash64(value) -> int:
    digest = hashlib.blake2b(_pack(value), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _ring_bonds(mol: Molecule, adj: list[list[tuple[int, int]]]) -> set[int]:
    """Indices of bonds on at least one cycle: every bond minus the bridges."""
    n = len(mol.atoms)
    visited = [False] * n
    disc = [0] * n
    low = [0] * n
    timer = 0
    bridges: set[int] = set()
    for root in range(n):
        if visited[root]:
            continue
        visited[root] = True
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            u, parent_bond, neighbors = stack[-1]
            descended = False
            for bi, v in neighbors:
                if bi == parent_bond:
                    continue
                if visited[v]:
                    low[u] = min(low[u], disc[v])
                else:
                    visited[v] = True
                    disc[v] = low[v] = timer
                    timer += 1
                    stack.append((v, bi, iter(adj[v])))
                    descended = True
                    break
            if not descended:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[u])
                    if low[u] > disc[p]:
                        bridges.add(parent_bond)
    return set(range(len(mol.bonds))) - bridges


def environment_codes(mol: Molecule, radius: int = 2) -> list[int]:
    """All hashed atom-environment codes from rounds 0..radius."""
    if radius < 0:
        raise SmipeError(f"radius must be non-negative, got {radius}")
    n = len(mol.atoms)
    adj = mol.neighbors()
    ring = _ring_bonds(mol, adj)
    in_ring = [any(bi in ring for bi, _ in adj[i]) for i in range(n)]
    current: list[int] = []
    for i, atom in enumerate(mol.atoms):
        invariant = (
            atom.element,
            atom.charge,
            len(adj[i]),
            implicit_hydrogens(mol, i, adj),
            atom.aromatic,
            in_ring[i],
        )
        current.append(_hash64(invariant))
    codes = list(current)
    for r in range(1, radius + 1):
        refreshed = []
        for i in range(n):
            neighborhood = tuple(
                sorted(
                    (_ORDER_CODE[mol.bonds[bi].order], current[j])
                    for bi, j in adj[i]
                )
            )
            refreshed.append(_hash64((r, current[i], neighborhood)))
        codes.extend(refreshed)
        current = refreshed
    return codes


@dataclass(frozen=True, slots=True)
class Fingerprint:
    """A fixed-width bit set stored as one big integer."""

    bits: int
    nbits: int
    radius: int

    def bit_count(self) -> int:
        return self.bits.bit_count()

    def indices(self) -> list[int]:
        return [i for i in range(self.nbits) if self.bits >> i & 1]

    def to_hex(self) -> str:
        width = (self.nbits + 3) // 4
        return format(self.bits, f"0{width}x")

    @classmethod
    def from_hex(cls, text: str, nbits: int, radius: int) -> "Fingerprint":
        return cls(bits=int(text, 16), nbits=nbits, radius=radius)


def morgan_fingerprint(
    mol: Molecule, radius: int = 2, nbits: int = 2048
) -> Fingerprint:
    """Hash every environment code into ``code % nbits`` and set that bit."""
    if nbits <= 0:
        raise SmipeError(f"nbits must be positive, got {nbits}")
    bits = 0
    for code in environment_codes(mol, radius):
        bits |= 1 << (code % nbits)
    return Fingerprint(bits=bits, nbits=nbits, radius=radius)


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """|a AND b| / |a OR b|, with two empty sets counting as identical."""
    if a.nbits != b.nbits:
        raise SmipeError(
            f"fingerprint sizes differ: {a.nbits} vs {b.nbits}"
        )
    union = (a.bits | b.bits).bit_count()
    if union == 0:
        return 1.0
    return (a.bits & b.bits).bit_count() / union
