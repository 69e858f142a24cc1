"""Extension planning and embedding growth."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smipe.errors import SmipeError
from smipe.extension import (
    ExtensionPlan,
    PlanEntry,
    build_extension_plan,
    extend_embeddings,
    extract_text_oov,
    read_embeddings,
    write_embeddings,
)
from smipe.tokenizer import GreedyBpeTokenizer, Vocabulary


class WordListTokenizer:
    """Toy base: whole words it knows are one token, the rest split."""

    def __init__(self, known):
        self.known = set(known)

    def encode(self, text):
        if text in self.known:
            return [0]
        return list(range(max(len(text), 2)))

    def decode(self, ids):
        raise NotImplementedError

    def __len__(self):
        return 1 + len(self.known)


def test_oov_counts_fragmenting_words_only():
    base = WordListTokenizer(known=["bbb"])
    assert extract_text_oov(["aaa bbb aaa"], base, 10) == [("aaa", 2)]


def test_oov_skips_tagged_spans():
    base = WordListTokenizer(known=[])
    corpus = ["synthesis of <SMILES>CCO</SMILES> compound", "compound two"]
    ranked = dict(extract_text_oov(corpus, base, 10))
    assert "CCO" not in ranked
    assert ranked["compound"] == 2


def test_oov_ordering_and_cap():
    base = WordListTokenizer(known=[])
    corpus = ["beta beta alpha alpha gamma"]
    ranked = extract_text_oov(corpus, base, 2)
    # equal counts fall back to alphabetical order
    assert ranked == [("alpha", 2), ("beta", 2)]
    assert extract_text_oov([], base, 5) == []


def test_oov_preserves_case_and_splits_on_digits():
    base = WordListTokenizer(known=[])
    ranked = dict(extract_text_oov(["Invention 5mmol Invention"], base, 10))
    assert ranked["Invention"] == 2
    assert ranked["mmol"] == 1


def test_plan_order_and_collisions():
    plan = build_extension_plan(
        ["CC", "CCO"],
        [("mmol", 7)],
        ["<SMILES>"],
        ["CC", "x"],
    )
    assert [e.token for e in plan.entries] == ["CCO", "mmol", "<SMILES>"]
    assert [e.source for e in plan.entries] == ["smiles", "text", "special"]
    assert plan.collisions_dropped == ["CC"]
    assert plan.base_vocab_size == 2
    assert plan.new_token_count == 3
    assert plan.entries[1].freq == 7


def test_plan_accepts_vocabulary_objects_and_dedups():
    base = Vocabulary.from_tokens(["a", "b"])
    plan = build_extension_plan(["x", "x"], ["x"], [], base)
    assert [e.token for e in plan.entries] == ["x"]
    assert plan.base_vocab_size == 2


def test_plan_empty_inputs():
    plan = build_extension_plan([], [], [], [])
    assert plan.entries == [] and plan.collisions_dropped == []


def test_plan_can_exclude_single_unit_tokens():
    tokens = ["Cl", "[13C]", "CC", "%12", "c1cc"]
    keep_all = build_extension_plan(tokens, [], [], [])
    merged_only = build_extension_plan(
        tokens, [], [], [], include_single_units=False
    )
    assert [e.token for e in keep_all.entries] == tokens
    assert [e.token for e in merged_only.entries] == ["CC", "c1cc"]


def test_plan_file_roundtrip(tmp_path):
    plan = build_extension_plan(["CC"], [("mmol", 3)], ["<EOS>"], ["a"])
    path = tmp_path / "plan.json"
    plan.save(path)
    loaded = ExtensionPlan.load(path)
    assert loaded.entries == plan.entries
    assert loaded.base_vocab_size == plan.base_vocab_size
    assert loaded.collisions_dropped == plan.collisions_dropped


def python_mean_rows(rows):
    """Independent column means over float values, plain Python arithmetic."""
    n = len(rows)
    cols = len(rows[0])
    return [sum(float(r[c]) for r in rows) / n for c in range(cols)]


def test_two_by_two_mean():
    base = np.array([[1, 3], [3, 1]], dtype=np.float32)
    plan = ExtensionPlan(2, [PlanEntry("t", "text")], [])
    out = extend_embeddings(base, plan)
    assert out.shape == (3, 2)
    assert out[2].tolist() == [2.0, 2.0]


def test_base_rows_are_bit_exact_and_new_rows_match_python_mean():
    rng = np.random.default_rng(7)
    base = rng.standard_normal((37, 12)).astype(np.float32)
    plan = ExtensionPlan(37, [PlanEntry("a", "smiles"), PlanEntry("b", "text")], [])
    out = extend_embeddings(base, plan)
    assert out.dtype == np.float32
    assert np.array_equal(out[:37], base)
    expected = python_mean_rows(base.tolist())
    for row in (out[37], out[38]):
        for got, want in zip(row.tolist(), expected):
            assert abs(got - want) <= 1e-6 * max(1.0, abs(want))
    assert np.array_equal(out[37], out[38])


def test_empty_plan_copies_the_matrix():
    base = np.ones((3, 4), dtype=np.float32)
    plan = ExtensionPlan(3, [], [])
    out = extend_embeddings(base, plan)
    assert np.array_equal(out, base)
    assert out is not base


def test_extend_validates_inputs():
    plan = ExtensionPlan(3, [PlanEntry("a", "smiles")], [])
    with pytest.raises(SmipeError):
        extend_embeddings(np.ones((2, 4), dtype=np.float32), plan)
    with pytest.raises(SmipeError):
        extend_embeddings(np.ones((3, 4), dtype=np.float64), plan)
    with pytest.raises(SmipeError):
        extend_embeddings(np.ones(4, dtype=np.float32), plan)


def test_embedding_file_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    matrix = rng.standard_normal((5, 8)).astype(np.float32)
    path = tmp_path / "emb.bin"
    write_embeddings(path, matrix)
    again = read_embeddings(path)
    assert np.array_equal(matrix, again)
    raw = path.read_bytes()
    assert raw[:4] == b"EMB1"
    assert len(raw) == 20 + 5 * 8 * 4


def test_embedding_file_rejects_garbage(tmp_path):
    bad_magic = tmp_path / "a.bin"
    bad_magic.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(SmipeError):
        read_embeddings(bad_magic)
    truncated = tmp_path / "b.bin"
    truncated.write_bytes(b"EMB1" + b"\x00" * 8)
    with pytest.raises(SmipeError):
        read_embeddings(truncated)
    short_data = tmp_path / "c.bin"
    import struct

    short_data.write_bytes(b"EMB1" + struct.pack("<QQ", 4, 4) + b"\x00" * 8)
    with pytest.raises(SmipeError):
        read_embeddings(short_data)


@settings(max_examples=40, deadline=None)
@given(
    rows=st.integers(1, 40),
    cols=st.integers(1, 16),
    n_new=st.integers(0, 5),
    seed=st.integers(0, 2**31),
)
def test_extension_mean_property(rows, cols, n_new, seed):
    rng = np.random.default_rng(seed)
    base = (rng.standard_normal((rows, cols)) * 10).astype(np.float32)
    plan = ExtensionPlan(
        rows, [PlanEntry(f"t{i}", "text") for i in range(n_new)], []
    )
    out = extend_embeddings(base, plan)
    assert out.shape == (rows + n_new, cols)
    assert np.array_equal(out[:rows], base)
    if n_new:
        expected = python_mean_rows(base.tolist())
        for got, want in zip(out[rows].tolist(), expected):
            assert abs(got - want) <= 1e-6 * max(1.0, abs(want))


def test_real_byte_level_base_oov():
    base = GreedyBpeTokenizer.byte_level(
        merges=[("c", "o"), ("co", "m"), ("com", "p"), ("comp", "o"),
                ("compo", "u"), ("compou", "n"), ("compoun", "d")]
    )
    corpus = ["compound alpha compound", "alpha beta"]
    ranked = dict(extract_text_oov(corpus, base, 10))
    # fully merged word is in-vocabulary now
    assert "compound" not in ranked
    assert ranked["alpha"] == 2
