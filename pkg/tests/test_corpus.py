"""Corpus IO, tagging, weighted blending and fertility statistics."""

from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from smipe.corpus import (
    DatasetSpec,
    blend,
    concat_records,
    fertility_report,
    histogram_buckets,
    largest_remainder_counts,
    load_blend_config,
    lower_median,
    read_records,
    read_smiles_corpus,
    wrap_smiles,
)
from smipe.errors import SmipeError


# ---------------------------------------------------------------------------
# record IO
# ---------------------------------------------------------------------------


def test_read_lines_skips_blanks(tmp_path):
    p = tmp_path / "a.txt"
    p.write_text("one\n\n  \ntwo\n", encoding="utf-8")
    assert read_records(p) == ["one", "two"]


def test_read_jsonl_field(tmp_path):
    p = tmp_path / "a.jsonl"
    p.write_text('{"text": "one"}\n{"text": "two"}\n', encoding="utf-8")
    assert read_records(p, format="jsonl") == ["one", "two"]
    q = tmp_path / "b.jsonl"
    q.write_text('{"smiles": "CCO"}\n', encoding="utf-8")
    assert read_smiles_corpus(q, format="jsonl") == ["CCO"]


def test_read_jsonl_errors_carry_line_numbers(tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_text('{"text": "ok"}\nnot json\n', encoding="utf-8")
    with pytest.raises(SmipeError, match=r"bad\.jsonl:2"):
        read_records(p, format="jsonl")
    q = tmp_path / "field.jsonl"
    q.write_text('{"other": 1}\n', encoding="utf-8")
    with pytest.raises(SmipeError, match=r"field\.jsonl:1"):
        read_records(q, format="jsonl")


def test_read_unknown_format(tmp_path):
    p = tmp_path / "a.txt"
    p.write_text("x\n", encoding="utf-8")
    with pytest.raises(SmipeError, match="format"):
        read_records(p, format="csv")


# ---------------------------------------------------------------------------
# tagging and concatenation
# ---------------------------------------------------------------------------


def test_wrap_single_span():
    assert wrap_smiles("mix CCO now", [(4, 3)]) == "mix <SMILES>CCO</SMILES> now"


def test_wrap_two_spans():
    text = "CCO and CCN"
    assert (
        wrap_smiles(text, [(0, 3), (8, 3)])
        == "<SMILES>CCO</SMILES> and <SMILES>CCN</SMILES>"
    )


def test_wrap_no_spans_is_identity():
    assert wrap_smiles("plain text", []) == "plain text"


def test_wrap_rejects_bad_spans():
    with pytest.raises(ValueError):
        wrap_smiles("CCO", [(1, 5)])
    with pytest.raises(ValueError):
        wrap_smiles("CCO and CCN", [(8, 3), (0, 3)])
    with pytest.raises(ValueError):
        wrap_smiles("CCOCCN", [(0, 4), (3, 3)])


def test_wrap_length_accounting():
    text = "aa CCO bb CCN cc"
    spans = [(3, 3), (10, 3)]
    wrapped = wrap_smiles(text, spans)
    assert len(wrapped) == len(text) + len(spans) * len("<SMILES></SMILES>")


def test_concat_uses_literal_eos():
    assert concat_records(["a", "b", "c"]) == "a<EOS>b<EOS>c"
    assert concat_records(["solo"]) == "solo"
    assert concat_records([]) == ""


# ---------------------------------------------------------------------------
# blending
# ---------------------------------------------------------------------------


def test_largest_remainder_exact():
    assert largest_remainder_counts([0.5, 0.35, 0.1, 0.05], 10000) == [
        5000,
        3500,
        1000,
        500,
    ]
    assert largest_remainder_counts([1 / 3, 1 / 3, 1 / 3], 10) == [4, 3, 3]
    assert largest_remainder_counts([0.5, 0.5], 0) == [0, 0]


@given(
    weights=st.lists(
        st.floats(min_value=0.01, max_value=1.0, allow_nan=False),
        min_size=1,
        max_size=6,
    ),
    total=st.integers(min_value=0, max_value=5000),
)
def test_largest_remainder_properties(weights, total):
    norm = sum(weights)
    weights = [w / norm for w in weights]
    counts = largest_remainder_counts(weights, total)
    assert sum(counts) == total
    for w, c in zip(weights, counts):
        assert abs(c - w * total) < 1.0 + 1e-9


def _write_dataset(tmp_path, name, records, format="lines"):
    p = tmp_path / f"{name}.txt"
    if format == "lines":
        p.write_text("".join(r + "\n" for r in records), encoding="utf-8")
    else:
        p.write_text(
            "".join(json.dumps({"text": r}) + "\n" for r in records),
            encoding="utf-8",
        )
    return DatasetSpec(name=name, path=str(p), weight=0.0, format=format)


def _specs(tmp_path, sizes_weights):
    specs = []
    for name, (size, weight) in sizes_weights.items():
        spec = _write_dataset(
            tmp_path, name, [f"{name}-{i}" for i in range(size)]
        )
        specs.append(DatasetSpec(spec.name, spec.path, weight))
    return specs


def test_blend_counts_and_manifest(tmp_path):
    specs = _specs(
        tmp_path, {"x": (300, 0.5), "y": (300, 0.35), "z": (300, 0.15)}
    )
    out, manifest = blend(specs, 200, seed=7)
    assert manifest == {"x": 100, "y": 70, "z": 30}
    assert len(out) == 200
    by_source = {name: 0 for name in manifest}
    for rec in out:
        by_source[rec.split("-")[0]] += 1
    assert by_source == manifest


def test_blend_is_deterministic(tmp_path):
    specs = _specs(tmp_path, {"x": (50, 0.6), "y": (50, 0.4)})
    a, ma = blend(specs, 80, seed=11)
    b, mb = blend(specs, 80, seed=11)
    assert a == b and ma == mb
    c, _ = blend(specs, 80, seed=12)
    assert a != c


def test_blend_cycles_when_a_dataset_runs_dry(tmp_path):
    specs = _specs(tmp_path, {"x": (3, 1.0)})
    out, manifest = blend(specs, 10, seed=1)
    assert manifest == {"x": 10}
    assert sorted(set(out)) == ["x-0", "x-1", "x-2"]
    # every record appears either 3 or 4 times
    assert {out.count(r) for r in set(out)} <= {3, 4}


def test_blend_interleaves_sources(tmp_path):
    specs = _specs(tmp_path, {"x": (200, 0.5), "y": (200, 0.5)})
    out, _ = blend(specs, 100, seed=3)
    prefixes = [r.split("-")[0] for r in out]
    # not sorted into two solid blocks
    assert prefixes != sorted(prefixes) and prefixes != sorted(
        prefixes, reverse=True
    )


def test_blend_input_validation(tmp_path):
    with pytest.raises(SmipeError, match="no datasets"):
        blend([], 10, seed=0)
    good = _specs(tmp_path, {"x": (5, 1.0)})[0]
    with pytest.raises(SmipeError, match="weights sum"):
        blend([DatasetSpec("x", good.path, 0.4)], 10, seed=0)
    with pytest.raises(SmipeError, match="outside"):
        blend(
            [
                DatasetSpec("x", good.path, 1.5),
                DatasetSpec("y", good.path, -0.5),
            ],
            10,
            seed=0,
        )
    empty = tmp_path / "empty.txt"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(SmipeError, match="no records"):
        blend([DatasetSpec("e", str(empty), 1.0)], 10, seed=0)
    with pytest.raises(SmipeError, match="non-negative"):
        blend([good], -1, seed=0)


def test_blend_config_loading(tmp_path):
    cfg = tmp_path / "blend.json"
    cfg.write_text(
        json.dumps(
            [
                {"name": "a", "path": "a.txt", "weight": 0.7},
                {"name": "b", "path": "b.jsonl", "weight": 0.3, "format": "jsonl"},
            ]
        ),
        encoding="utf-8",
    )
    specs = load_blend_config(cfg)
    assert [s.name for s in specs] == ["a", "b"]
    assert specs[0].format == "lines" and specs[1].format == "jsonl"

    wrapped = tmp_path / "wrapped.json"
    wrapped.write_text(
        json.dumps({"datasets": [{"name": "a", "path": "a", "weight": 1.0}]}),
        encoding="utf-8",
    )
    assert load_blend_config(wrapped)[0].weight == 1.0

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"foo": 1}), encoding="utf-8")
    with pytest.raises(SmipeError, match="list of dataset objects"):
        load_blend_config(bad)
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps([{"name": "a"}]), encoding="utf-8")
    with pytest.raises(SmipeError, match="need name, path and weight"):
        load_blend_config(missing)


# ---------------------------------------------------------------------------
# fertility
# ---------------------------------------------------------------------------


def test_lower_median():
    assert lower_median([3]) == 3
    assert lower_median([1, 2]) == 1
    assert lower_median([5, 1, 3]) == 3
    assert lower_median([4, 1, 3, 2]) == 2
    with pytest.raises(SmipeError):
        lower_median([])


def test_histogram_buckets_unit_then_doubling():
    assert histogram_buckets([1, 1, 2, 64]) == {"1": 2, "2": 1, "64": 1}
    assert histogram_buckets([65, 100, 128, 129, 256, 257]) == {
        "65-128": 3,
        "129-256": 2,
        "257-512": 1,
    }


def test_histogram_is_ordered_by_bucket_start():
    buckets = histogram_buckets([200, 3, 70, 1])
    assert list(buckets) == ["1", "3", "65-128", "129-256"]


def test_fertility_report_fields():
    corpus = ["aa", "bbbb", "cccccc"]
    report = fertility_report(corpus, list, lambda s: [s])
    assert report.n_strings == 3
    assert report.counts_a == (2, 4, 6)
    assert report.counts_b == (1, 1, 1)
    assert report.median_a == 4
    assert report.median_b == 1
    assert report.single_token_fraction_b == 1.0
    assert report.histogram_a == {"2": 1, "4": 1, "6": 1}
    assert report.histogram_b == {"1": 3}


def test_fertility_report_single_token_fraction():
    corpus = ["ab", "cd", "ef", "gh"]
    tok_b = lambda s: [s] if s == "ab" else list(s)
    report = fertility_report(corpus, list, tok_b)
    assert report.single_token_fraction_b == 0.25


def test_fertility_tsv_rows_merge_both_histograms():
    report = fertility_report(["aaa", "b" * 70], list, lambda s: [s])
    rows = report.tsv_rows()
    assert rows == [("1", 0, 2), ("3", 1, 0), ("65-128", 1, 0)]


def test_fertility_json_round_trip():
    report = fertility_report(["ab", "cde"], list, lambda s: [s])
    data = json.loads(json.dumps(report.to_json()))
    assert data["n_strings"] == 2
    assert data["median_a"] == 2
    assert data["single_token_fraction_b"] == 1.0


def test_fertility_empty_corpus():
    with pytest.raises(SmipeError):
        fertility_report([], list, list)
