"""Tabular-to-instruction corpus toolkit (Python bindings)."""

from ._tabprompt import (
    DEFAULT_MAX_NEW_TOKENS,
    TabpromptError,
    assemble_prompt,
    augment_probabilities,
    average_ranks,
    class_details,
    extract_probs,
    isotonic,
    parse_corpus_line,
    parse_generation,
    serialize_probabilities,
    serialize_rows,
    sha256_hex,
)


def read_corpus(path):
    """Yield corpus records (dicts) from a JSONL corpus file."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line:
                yield parse_corpus_line(line)


__all__ = [
    "DEFAULT_MAX_NEW_TOKENS",
    "TabpromptError",
    "assemble_prompt",
    "augment_probabilities",
    "average_ranks",
    "class_details",
    "extract_probs",
    "isotonic",
    "parse_corpus_line",
    "parse_generation",
    "read_corpus",
    "serialize_probabilities",
    "serialize_rows",
    "sha256_hex",
]
