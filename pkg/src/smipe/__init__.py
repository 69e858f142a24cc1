"""SMILES pair-encoding toolkit.

Parse and canonicalize SMILES, learn pair-merge vocabularies over
atom-level units, tokenize molecules and mixed documents, plan vocabulary
extensions with mean-initialized embeddings, fingerprint and score
generated molecules, and assemble weighted training corpora.
"""

from __future__ import annotations

from .corpus import (
    CLOSE_TAG,
    EOS_TOKEN,
    OPEN_TAG,
    DatasetSpec,
    FertilityReport,
    blend,
    concat_records,
    fertility_report,
    largest_remainder_counts,
    load_blend_config,
    read_records,
    read_smiles_corpus,
    wrap_smiles,
)
from .errors import (
    SmipeError,
    SmilesParseError,
    TagPairingError,
    TokenizerError,
)
from .extension import (
    ExtensionPlan,
    PlanEntry,
    build_extension_plan,
    extend_embeddings,
    extract_text_oov,
    read_embeddings,
    write_embeddings,
)
from .fingerprints import (
    Fingerprint,
    environment_codes,
    morgan_fingerprint,
    tanimoto,
)
from .metrics import (
    EvalRecord,
    TaskScore,
    aggregate,
    evaluate_records,
    extract_tagged,
    score_task,
)
from .molecule import (
    Atom,
    Bond,
    Molecule,
    ValidityReport,
    connected_components,
    implicit_hydrogens,
)
from .parser import parse, validate
from .pretokenizer import (
    SMILES_UNIT_PATTERN,
    SmilesUnit,
    atom_tokenize,
    unit_texts,
)
from .tokenizer import (
    DEFAULT_SPECIAL_TOKENS,
    FALLBACK_ALPHABET,
    GreedyBpeTokenizer,
    TokenizerModel,
    Vocabulary,
    apply_merges,
    decode,
    decode_document,
    encode_document,
    encode_smiles,
    tokenize_smiles,
)
from .trainer import (
    MergeRule,
    TrainerConfig,
    count_pairs,
    learn_merges,
    merge_pair,
    prepare_training_sequences,
    report_top_tokens,
    train,
    vocab_from_merges,
)
from .writer import (
    augment_corpus,
    canonical_ranks,
    canonicalize,
    write_canonical,
    write_random,
)

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "Bond",
    "CLOSE_TAG",
    "DEFAULT_SPECIAL_TOKENS",
    "DatasetSpec",
    "EOS_TOKEN",
    "EvalRecord",
    "ExtensionPlan",
    "FALLBACK_ALPHABET",
    "FertilityReport",
    "Fingerprint",
    "GreedyBpeTokenizer",
    "MergeRule",
    "Molecule",
    "OPEN_TAG",
    "PlanEntry",
    "SMILES_UNIT_PATTERN",
    "SmilesParseError",
    "SmilesUnit",
    "SmipeError",
    "TagPairingError",
    "TaskScore",
    "TokenizerError",
    "TokenizerModel",
    "TrainerConfig",
    "ValidityReport",
    "Vocabulary",
    "aggregate",
    "apply_merges",
    "atom_tokenize",
    "augment_corpus",
    "blend",
    "build_extension_plan",
    "canonical_ranks",
    "canonicalize",
    "concat_records",
    "connected_components",
    "count_pairs",
    "decode",
    "decode_document",
    "encode_document",
    "encode_smiles",
    "environment_codes",
    "evaluate_records",
    "extend_embeddings",
    "extract_tagged",
    "extract_text_oov",
    "fertility_report",
    "implicit_hydrogens",
    "largest_remainder_counts",
    "learn_merges",
    "load_blend_config",
    "merge_pair",
    "morgan_fingerprint",
    "parse",
    "prepare_training_sequences",
    "read_embeddings",
    "read_records",
    "read_smiles_corpus",
    "report_top_tokens",
    "score_task",
    "tanimoto",
    "tokenize_smiles",
    "train",
    "unit_texts",
    "validate",
    "vocab_from_merges",
    "wrap_smiles",
    "write_canonical",
    "write_embeddings",
    "write_random",
]
