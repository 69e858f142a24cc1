"""Molecular graph model produced by the SMILES parser.

Atoms and bonds are plain immutable records. A Molecule is a labelled
undirected graph; nothing in here mutates after construction, so instances
are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Final

# ---------------------------------------------------------------------------
# element tables
# ---------------------------------------------------------------------------

ELEMENTS: Final[frozenset[str]] = frozenset(
    """
    H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni
    Cu Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I
    Xe Cs Ba La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt
    Au Hg Tl Pb Bi Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No Lr
    Rf Db Sg Bh Hs Mt Ds Rg Cn Nh Fl Mc Lv Ts Og
    """.split()
)

#: atoms writable without brackets when they carry no extra attributes
ORGANIC_SUBSET: Final[frozenset[str]] = frozenset(
    {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"}
)

#: elements that may carry the aromatic (lowercase) flag
AROMATIC_ELEMENTS: Final[frozenset[str]] = frozenset(
    {"B", "C", "N", "O", "P", "S", "Se", "As"}
)

#: organic-subset elements writable as bare lowercase aromatic symbols
ORGANIC_AROMATIC: Final[frozenset[str]] = frozenset({"B", "C", "N", "O", "P", "S"})

#: allowed valences used by strict validation; bracket atoms are exempt
DEFAULT_VALENCES: Final[dict[str, tuple[int, ...]]] = {
    "B": (3,),
    "C": (4,),
    "N": (3, 5),
    "O": (2,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "F": (1,),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
}

BOND_ORDERS: Final[tuple[str, ...]] = (
    "single",
    "double",
    "triple",
    "quadruple",
    "aromatic",
)

#: numeric weight of each bond order for valence sums
BOND_VALENCE: Final[dict[str, float]] = {
    "single": 1.0,
    "double": 2.0,
    "triple": 3.0,
    "quadruple": 4.0,
    "aromatic": 1.5,
}


# ---------------------------------------------------------------------------
# graph records
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Atom:
    """One atom as written in the source string.

    Attributes:
        element: standard symbol ("C", "Cl", "Se", ...) or "*" for a wildcard.
        aromatic: True when the atom was written lowercase.
        isotope: mass number from a bracket atom, or None.
        charge: formal charge, 0 unless written.
        explicit_h: bracket hydrogen count. None means the atom was written
            outside brackets and hydrogens are implicit; a bracket atom with
            no H field stores 0. In consequence, ``explicit_h is not None``
            is exactly "this atom came from (and re-emits in) bracket form".
        chirality: "@" or "@@" when present, else None. Tags are carried
            verbatim; no stereo perception happens anywhere in the package.
        atom_class: bracket atom-map class (":n"), or None.
        is_wildcard: True for "*" atoms, which match any element.
    """

    element: str
    aromatic: bool = False
    isotope: int | None = None
    charge: int = 0
    explicit_h: int | None = None
    chirality: str | None = None
    atom_class: int | None = None
    is_wildcard: bool = False

    @property
    def from_bracket(self) -> bool:
        return self.explicit_h is not None


@dataclass(frozen=True, slots=True)
class Bond:
    """An undirected bond between two atom indices.

    ``direction`` stores a "/" or "\\" marker exactly as written when the
    bond was read from ``atoms[0]`` toward ``atoms[1]``; viewed from the
    other endpoint the marker flips. Directional markers only occur on
    single bonds.
    """

    atoms: tuple[int, int]
    order: str = "single"
    direction: str | None = None

    def other(self, idx: int) -> int:
        a, b = self.atoms
        return b if idx == a else a

    def direction_from(self, idx: int) -> str | None:
        """Direction marker as seen when traversing the bond from ``idx``."""
        if self.direction is None:
            return None
        if idx == self.atoms[0]:
            return self.direction
        return "\\" if self.direction == "/" else "/"


@dataclass(frozen=True, slots=True)
class Molecule:
    """A parsed SMILES: atom list, bond list, connected-component count."""

    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    components: int = 1

    def neighbors(self) -> list[list[tuple[int, int]]]:
        """Adjacency as ``[(bond_index, other_atom), ...]`` per atom."""
        adj: list[list[tuple[int, int]]] = [[] for _ in self.atoms]
        for bi, bond in enumerate(self.bonds):
            a, b = bond.atoms
            adj[a].append((bi, b))
            adj[b].append((bi, a))
        return adj


@dataclass(frozen=True, slots=True)
class ValidityReport:
    """Outcome of validating one SMILES string.

    ``error_kind`` is one of "syntax", "unclosed_ring", "unbalanced_parens",
    "bad_bracket_atom", "valence" and is present exactly when ``valid`` is
    False. ``error_position`` is the offset of the first failure.
    """

    valid: bool
    error_kind: str | None = None
    error_position: int | None = None
    message: str | None = None


def connected_components(mol: Molecule, adj: list[list[tuple[int, int]]] | None = None) -> list[list[int]]:
    """Connected components as sorted atom-index lists, ordered by their
    smallest member."""
    if adj is None:
        adj = mol.neighbors()
    seen = [False] * len(mol.atoms)
    comps: list[list[int]] = []
    for i in range(len(mol.atoms)):
        if seen[i]:
            continue
        seen[i] = True
        cur = [i]
        queue = [i]
        while queue:
            u = queue.pop()
            for _, v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    cur.append(v)
                    queue.append(v)
        comps.append(sorted(cur))
    return comps


def implicit_hydrogens(mol: Molecule, idx: int, adj: list[list[tuple[int, int]]] | None = None) -> int:
    """Hydrogen count of an atom: the bracket count when explicit, else the
    smallest default valence that covers the bond-order sum.

    Aromatic bonds count 1.5 toward the sum; fractional leftovers truncate.
    Atoms without a default valence entry get zero implicit hydrogens.
    """
    atom = mol.atoms[idx]
    if atom.explicit_h is not None:
        return atom.explicit_h
    if atom.is_wildcard or atom.element not in DEFAULT_VALENCES:
        return 0
    if adj is None:
        adj = mol.neighbors()
    load = sum(BOND_VALENCE[mol.bonds[bi].order] for bi, _ in adj[idx])
    for allowed in DEFAULT_VALENCES[atom.element]:
        if allowed >= load - 1e-9:
            return int(allowed - load + 1e-9)
    return 0
