"""Command line interface.

One binary, subcommand per operation. Conventions: ``--in``/``--out``
default to stdin/stdout so every per-line command works as a stream
filter; exit code 0 on success, 1 on domain errors (bad SMILES where
validity is required, missing files, malformed models), 2 on usage errors.
All randomness flows from ``--seed``; ``--threads`` only bounds worker
pools and never changes output.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from contextlib import contextmanager
from pathlib import Path

from . import __version__
from .corpus import (
    fertility_report,
    load_blend_config,
    read_records,
    blend as blend_records,
    wrap_smiles,
)
from .errors import SmipeError
from .extension import (
    ExtensionPlan,
    build_extension_plan,
    extend_embeddings,
    extract_text_oov,
    read_embeddings,
    write_embeddings,
)
from .fingerprints import morgan_fingerprint, tanimoto
from .metrics import aggregate, evaluate_records
from .parallel import parallel_map
from .parser import parse, validate
from .pretokenizer import unit_texts
from .tokenizer import (
    DEFAULT_SPECIAL_TOKENS,
    GreedyBpeTokenizer,
    TokenizerModel,
    decode,
    decode_document,
    encode_document,
    encode_smiles,
    tokenize_smiles,
)
from .trainer import (
    MergeRule,
    TrainerConfig,
    learn_merges,
    prepare_training_sequences,
)
from .writer import write_canonical, write_random


# ---------------------------------------------------------------------------
# small IO helpers
# ---------------------------------------------------------------------------


def _read_input(path: str, format: str = "lines", field: str = "smiles") -> list[str]:
    if path == "-":
        lines = [line.rstrip("\n") for line in sys.stdin]
        lines = [line for line in lines if line.strip()]
        if format == "lines":
            return lines
        out = []
        for i, line in enumerate(lines, start=1):
            try:
                out.append(json.loads(line)[field])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise SmipeError(f"stdin:{i}: bad jsonl record ({exc})") from exc
        return out
    return read_records(path, format=format, field=field)


@contextmanager
def _out_stream(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def _say(args: argparse.Namespace, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr)


def _load_base(args: argparse.Namespace) -> GreedyBpeTokenizer:
    if not args.base_vocab or not args.base_merges:
        raise SmipeError("this mode needs --base-vocab and --base-merges")
    return GreedyBpeTokenizer.load(args.base_vocab, args.base_merges)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    smiles = _read_input(args.infile, args.format)
    reports = parallel_map(
        lambda s: validate(s, strict=args.strict), smiles, args.threads
    )
    n_bad = 0
    with _out_stream(args.outfile) as out:
        for rep in reports:
            if rep.valid:
                out.write("valid\n")
            else:
                n_bad += 1
                out.write(
                    f"invalid\t{rep.error_kind}\t{rep.error_position}\n"
                )
    _say(args, f"{len(smiles)} records, {n_bad} invalid")
    return 0


def cmd_canon(args: argparse.Namespace) -> int:
    smiles = _read_input(args.infile, args.format)
    skipped = 0
    with _out_stream(args.outfile) as out:
        for i, s in enumerate(smiles, start=1):
            rep = validate(s, strict=args.strict)
            if not rep.valid:
                if args.skip_invalid:
                    skipped += 1
                    continue
                raise SmipeError(f"record {i}: {rep.message}")
            out.write(write_canonical(parse(s)) + "\n")
    if skipped:
        _say(args, f"skipped {skipped} invalid records")
    return 0


def cmd_randomize(args: argparse.Namespace) -> int:
    smiles = _read_input(args.infile, args.format)
    rng = random.Random(args.seed)
    with _out_stream(args.outfile) as out:
        for i, s in enumerate(smiles, start=1):
            line_seed = rng.getrandbits(64)
            rep = validate(s, strict=False)
            if not rep.valid:
                raise SmipeError(f"record {i}: {rep.message}")
            out.write(write_random(parse(s), line_seed) + "\n")
    return 0


def cmd_pretokenize(args: argparse.Namespace) -> int:
    smiles = _read_input(args.infile, args.format)
    with _out_stream(args.outfile) as out:
        for s in smiles:
            out.write(" ".join(unit_texts(s)) + "\n")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    corpus = _read_input(args.infile, args.format)
    config = TrainerConfig(
        threshold=args.threshold,
        max_merges=args.max_merges,
        augment=args.augment,
        augmentation_seed=args.seed,
        strict=args.strict,
    )
    sequences, stats = prepare_training_sequences(corpus, config)
    if not sequences:
        raise SmipeError("training corpus contains no valid SMILES")

    def progress(rule: MergeRule) -> None:
        _say(
            args,
            f"merge {rule.rank} {rule.left}+{rule.right} "
            f"freq={rule.learned_frequency}",
        )

    rules = learn_merges(
        sequences,
        threshold=config.threshold,
        max_merges=config.max_merges,
        progress=progress,
    )
    base_units: set[str] = set()
    for seq in sequences:
        base_units.update(seq)
    model = TokenizerModel.build(rules, base_units)
    model.save(args.out)
    _say(
        args,
        f"{stats.n_sequences} sequences ({stats.n_dropped} inputs dropped); "
        f"learned {len(rules)} merge tokens over {len(base_units)} base "
        f"units; vocabulary size {len(model.vocabulary)}",
    )
    return 0


def cmd_encode(args: argparse.Namespace) -> int:
    model = TokenizerModel.load(args.model)
    lines = _read_input(args.infile, args.format, field="text")
    if args.mode == "doc":
        base = _load_base(args)
        encoded = [encode_document(model, base, line) for line in lines]
    else:
        encoded = parallel_map(
            lambda s: encode_smiles(model, s), lines, args.threads
        )
    with _out_stream(args.outfile) as out:
        for ids in encoded:
            out.write(" ".join(map(str, ids)) + "\n")
    return 0


def cmd_decode(args: argparse.Namespace) -> int:
    model = TokenizerModel.load(args.model)
    base = _load_base(args) if args.mode == "doc" else None
    lines = _read_input(args.infile, "lines")
    if args.format != "lines":
        raise SmipeError("decode reads space-separated id lines only")
    with _out_stream(args.outfile) as out:
        for i, line in enumerate(lines, start=1):
            try:
                ids = [int(tok) for tok in line.split()]
            except ValueError as exc:
                raise SmipeError(f"record {i}: not a token id line") from exc
            if args.mode == "doc":
                out.write(decode_document(model, base, ids) + "\n")
            else:
                out.write(decode(model, ids) + "\n")
    return 0


def cmd_extract_oov(args: argparse.Namespace) -> int:
    base = _load_base(args)
    corpus = _read_input(args.infile, args.format, field="text")
    ranked = extract_text_oov(corpus, base, args.k)
    with _out_stream(args.outfile) as out:
        for word, freq in ranked:
            out.write(f"{word}\t{freq}\n")
    return 0


def _read_token_file(path: str) -> list[tuple[str, int]]:
    out: list[tuple[str, int]] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        if "\t" in line:
            token, freq = line.split("\t", 1)
            out.append((token, int(freq)))
        else:
            out.append((line, 0))
    return out


def cmd_plan(args: argparse.Namespace) -> int:
    smiles_tokens: list[tuple[str, int]] = []
    if args.model:
        model = TokenizerModel.load(args.model)
        units = [
            t
            for t in model.vocabulary.tokens
            if t not in model.special_tokens
        ]
        smiles_tokens.extend((t, 0) for t in units)
    if args.smiles_tokens:
        smiles_tokens.extend(_read_token_file(args.smiles_tokens))
    if not smiles_tokens:
        raise SmipeError("need --smiles-tokens or --model")
    text_tokens = _read_token_file(args.text_oov) if args.text_oov else []
    base_tokens = json.loads(Path(args.base_vocab).read_text(encoding="utf-8"))
    plan = build_extension_plan(
        smiles_tokens,
        text_tokens,
        args.specials,
        base_tokens,
        include_single_units=not args.drop_single_units,
    )
    with _out_stream(args.outfile) as out:
        json.dump(plan.to_json(), out, indent=1)
        out.write("\n")
    _say(
        args,
        f"{plan.new_token_count} additions over base size "
        f"{plan.base_vocab_size}; {len(plan.collisions_dropped)} collisions "
        f"dropped",
    )
    return 0


def cmd_extend_emb(args: argparse.Namespace) -> int:
    matrix = read_embeddings(args.emb)
    plan = ExtensionPlan.load(args.plan)
    write_embeddings(args.out, extend_embeddings(matrix, plan))
    return 0


def cmd_fps(args: argparse.Namespace) -> int:
    smiles = _read_input(args.infile, args.format)

    def one(s: str) -> str:
        return morgan_fingerprint(
            parse(s), radius=args.radius, nbits=args.nbits
        ).to_hex()

    rows = parallel_map(one, smiles, args.threads)
    with _out_stream(args.outfile) as out:
        for row in rows:
            out.write(row + "\n")
    return 0


def cmd_sim(args: argparse.Namespace) -> int:
    left = _read_input(args.file_a, args.format)
    right = _read_input(args.file_b, args.format)
    if len(left) != len(right):
        raise SmipeError(
            f"inputs differ in length: {len(left)} vs {len(right)}"
        )

    def one(pair: tuple[str, str]) -> float:
        fa = morgan_fingerprint(parse(pair[0]), args.radius, args.nbits)
        fb = morgan_fingerprint(parse(pair[1]), args.radius, args.nbits)
        return tanimoto(fa, fb)

    values = parallel_map(one, list(zip(left, right)), args.threads)
    with _out_stream(args.outfile) as out:
        for v in values:
            out.write(f"{v:.6f}\n")
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    # records carry two fields, so read raw jsonl objects here
    records: list[tuple[str, str]] = []
    source = (
        sys.stdin
        if args.infile == "-"
        else open(args.infile, "r", encoding="utf-8")
    )
    try:
        for i, line in enumerate(source, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                records.append((obj["output"], obj["gold"]))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise SmipeError(
                    f"{args.infile}:{i}: bad record, need output and gold "
                    f"fields ({exc})"
                ) from exc
    finally:
        if source is not sys.stdin:
            source.close()
    evaluated = evaluate_records(
        records,
        match=args.match,
        open_tag_in_prompt=args.open_tag_in_prompt,
        radius=args.radius,
        nbits=args.nbits,
    )
    score = aggregate(
        evaluated, penalize_invalid=not args.skip_invalid_in_mean
    )
    if args.per_record:
        with open(args.per_record, "w", encoding="utf-8") as fh:
            fh.write("index\textracted\tvalid\terror_kind\texact\tfps\n")
            for i, rec in enumerate(evaluated):
                valid = rec.validity.valid if rec.validity else False
                kind = (
                    rec.validity.error_kind
                    if rec.validity and rec.validity.error_kind
                    else ""
                )
                fps = "" if rec.fps is None else f"{rec.fps:.6f}"
                extracted = rec.extracted if rec.extracted is not None else ""
                fh.write(
                    f"{i}\t{extracted}\t{int(valid)}\t{kind}\t"
                    f"{int(rec.exact_match)}\t{fps}\n"
                )
    if args.plot:
        from .plots import plot_similarity_histogram

        plot_similarity_histogram(
            [rec.fps for rec in evaluated if rec.fps is not None], args.plot
        )
    with _out_stream(args.outfile) as out:
        json.dump(score.to_json(), out, indent=1)
        out.write("\n")
    return 0


def cmd_blend(args: argparse.Namespace) -> int:
    specs = load_blend_config(args.config)
    records, manifest = blend_records(specs, args.total, args.seed)
    with _out_stream(args.outfile) as out:
        for rec in records:
            out.write(json.dumps({"text": rec}, ensure_ascii=False) + "\n")
    if args.manifest:
        Path(args.manifest).write_text(
            json.dumps(manifest, indent=1) + "\n", encoding="utf-8"
        )
    _say(args, f"blended {len(records)} records: {manifest}")
    return 0


def cmd_wrap(args: argparse.Namespace) -> int:
    source = (
        sys.stdin
        if args.infile == "-"
        else open(args.infile, "r", encoding="utf-8")
    )
    try:
        rows = []
        for i, line in enumerate(source, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                spans = [tuple(span) for span in obj.get("spans", [])]
                rows.append(wrap_smiles(obj["text"], spans))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise SmipeError(f"{args.infile}:{i}: {exc}") from exc
    finally:
        if source is not sys.stdin:
            source.close()
    with _out_stream(args.outfile) as out:
        for text in rows:
            out.write(json.dumps({"text": text}, ensure_ascii=False) + "\n")
    return 0


def cmd_fertility(args: argparse.Namespace) -> int:
    corpus = _read_input(args.infile, args.format)
    model = TokenizerModel.load(args.model)
    report = fertility_report(
        corpus,
        tok_a=unit_texts,
        tok_b=lambda s: tokenize_smiles(model, s),
    )
    if args.tsv:
        with open(args.tsv, "w", encoding="utf-8") as fh:
            fh.write("bucket\tatom_units\ttrained\n")
            for label, a, b in report.tsv_rows():
                fh.write(f"{label}\t{a}\t{b}\n")
    if args.plot:
        from .plots import plot_fertility_histogram

        plot_fertility_histogram(report, args.plot)
    with _out_stream(args.outfile) as out:
        json.dump(report.to_json(), out, indent=1)
        out.write("\n")
    return 0


# ---------------------------------------------------------------------------
# parser assembly
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker pool bound; never changes outputs",
    )
    common.add_argument(
        "--quiet", action="store_true", help="suppress progress on stderr"
    )

    instream = argparse.ArgumentParser(add_help=False)
    instream.add_argument(
        "--in", dest="infile", default="-", help="input path or -"
    )
    instream.add_argument(
        "--format",
        choices=["lines", "jsonl"],
        default="lines",
        help="corpus input format",
    )

    outstream = argparse.ArgumentParser(add_help=False)
    outstream.add_argument(
        "--out", dest="outfile", default="-", help="output path or -"
    )

    stream = [common, instream, outstream]

    parser = argparse.ArgumentParser(
        prog="smipe",
        description="SMILES pair-encoding tokenizer toolkit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=stream, help="check SMILES lines")
    p.add_argument("--strict", action="store_true", help="also check valences")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("canon", parents=stream, help="canonicalize SMILES lines")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--skip-invalid", action="store_true")
    p.set_defaults(func=cmd_canon)

    p = sub.add_parser("randomize", parents=stream, help="randomized variants")
    p.set_defaults(func=cmd_randomize)

    p = sub.add_parser("pretokenize", parents=stream, help="atom-level units")
    p.set_defaults(func=cmd_pretokenize)

    p = sub.add_parser(
        "train", parents=[common, instream], help="learn merge rules"
    )
    p.add_argument("--threshold", type=int, default=3)
    p.add_argument("--max-merges", type=int, default=None)
    p.add_argument(
        "--augment",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="add one randomized variant per input",
    )
    p.add_argument("--strict", action="store_true")
    p.add_argument("--out", required=True, help="model JSON path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("encode", parents=stream, help="text to token ids")
    p.add_argument("--model", required=True)
    p.add_argument("--mode", choices=["smiles", "doc"], default="smiles")
    p.add_argument("--base-vocab")
    p.add_argument("--base-merges")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", parents=stream, help="token ids to text")
    p.add_argument("--model", required=True)
    p.add_argument("--mode", choices=["smiles", "doc"], default="smiles")
    p.add_argument("--base-vocab")
    p.add_argument("--base-merges")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser(
        "extract-oov", parents=stream, help="frequent fragmented words"
    )
    p.add_argument("--base-vocab", required=True)
    p.add_argument("--base-merges", required=True)
    p.add_argument("-k", type=int, default=1000)
    p.set_defaults(func=cmd_extract_oov)

    p = sub.add_parser(
        "plan", parents=[common, outstream], help="vocabulary additions"
    )
    p.add_argument("--model", help="take SMILES tokens from a model file")
    p.add_argument("--smiles-tokens", help="token (or token TAB freq) lines")
    p.add_argument("--text-oov", help="word TAB freq lines")
    p.add_argument(
        "--specials", nargs="*", default=list(DEFAULT_SPECIAL_TOKENS)
    )
    p.add_argument("--base-vocab", required=True, help="JSON token list")
    p.add_argument("--drop-single-units", action="store_true")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser(
        "extend-emb", parents=[common], help="grow an embedding matrix"
    )
    p.add_argument("--emb", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extend_emb)

    p = sub.add_parser("fps", parents=stream, help="fingerprints as hex")
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--nbits", type=int, default=2048)
    p.set_defaults(func=cmd_fps)

    p = sub.add_parser(
        "sim", parents=[common, outstream], help="pairwise similarity"
    )
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument(
        "--format", choices=["lines", "jsonl"], default="lines"
    )
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--nbits", type=int, default=2048)
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("score", parents=stream, help="evaluate predictions")
    p.add_argument("--task", choices=["generation"], default="generation")
    p.add_argument("--match", choices=["canonical", "raw"], default="canonical")
    p.add_argument("--open-tag-in-prompt", action="store_true")
    p.add_argument(
        "--skip-invalid-in-mean",
        action="store_true",
        help="average similarity over valid predictions only",
    )
    p.add_argument("--per-record", help="write a per-record TSV here")
    p.add_argument("--plot", help="write a similarity histogram PNG here")
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--nbits", type=int, default=2048)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser(
        "blend", parents=[common, outstream], help="weighted corpus mix"
    )
    p.add_argument("--config", required=True, help="dataset spec JSON")
    p.add_argument("--total", type=int, required=True)
    p.add_argument("--manifest", help="write realized counts here")
    p.set_defaults(func=cmd_blend)

    p = sub.add_parser("wrap", parents=stream, help="tag SMILES spans")
    p.set_defaults(func=cmd_wrap)

    p = sub.add_parser(
        "fertility", parents=stream, help="tokens-per-string report"
    )
    p.add_argument("--model", required=True)
    p.add_argument("--tsv", help="write bucket rows here")
    p.add_argument("--plot", help="write a histogram PNG here")
    p.set_defaults(func=cmd_fertility)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1
    except (SmipeError, OSError, ValueError) as exc:
        print(f"smipe: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
