"""Shared test utilities.

The isomorphism oracle encodes molecules as attributed digraphs with one
arc per bond direction, so directional markers are compared from each
endpoint's point of view. It comes from a different library than the code
under test, which keeps round-trip checks independent of the writer.
"""

from __future__ import annotations

import networkx as nx
from networkx.algorithms.isomorphism import (
    categorical_edge_match,
    categorical_node_match,
)

from smipe.molecule import Molecule

_ATOM_FIELDS = [
    "element",
    "aromatic",
    "isotope",
    "charge",
    "explicit_h",
    "chirality",
    "atom_class",
    "is_wildcard",
]


def mol_digraph(mol: Molecule) -> nx.DiGraph:
    g = nx.DiGraph()
    for i, atom in enumerate(mol.atoms):
        g.add_node(i, **{f: getattr(atom, f) for f in _ATOM_FIELDS})
    for bond in mol.bonds:
        u, v = bond.atoms
        g.add_edge(u, v, order=bond.order, direction=bond.direction_from(u))
        g.add_edge(v, u, order=bond.order, direction=bond.direction_from(v))
    return g


def isomorphic(a: Molecule, b: Molecule) -> bool:
    if len(a.atoms) != len(b.atoms) or len(a.bonds) != len(b.bonds):
        return False
    return nx.is_isomorphic(
        mol_digraph(a),
        mol_digraph(b),
        node_match=categorical_node_match(_ATOM_FIELDS, [None] * len(_ATOM_FIELDS)),
        edge_match=categorical_edge_match(
            ["order", "direction"], [None, None]
        ),
    )
