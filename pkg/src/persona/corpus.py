"""Labeled-corpus ingestion and per-user statistics.

One document is one user: all their posts or their whole essay, carrying
five binary trait labels. The essays CSV has a fixed header; other
exports are mapped through a user-supplied column mapping. A simple
line-based cache format supports fast reload of normalized corpora.
"""

import base64
import csv
import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path

from .lexicon import Lexicon
from .textproc import count_non_standard, tokenize

log = logging.getLogger(__name__)

TRAITS = ("cEXT", "cNEU", "cAGR", "cCON", "cOPN")

ESSAYS_HEADER = ("#AUTHID", "TEXT") + TRAITS

# Known public distribution points for the essays corpus; the file itself
# has restricted redistribution, so it is never bundled here. Verify a
# downloaded copy with `persona stats` and record its sha256 from the run
# manifest.
ESSAYS_SOURCES = (
    "https://web.archive.org/web/*/essays.csv (Pennebaker & King 1999 "
    "stream-of-consciousness essays)",
    "https://github.com/jcl132/personality-prediction-from-text",
)


class CorpusError(Exception):
    """Malformed or inconsistent corpus input."""


@dataclass(frozen=True)
class LabeledDocument:
    author_id: str
    text: str
    labels: dict  # trait -> bool, all five traits present
    source: str = ""

    def label_string(self) -> str:
        return "".join("y" if self.labels[t] else "n" for t in TRAITS)


@dataclass(frozen=True)
class CorpusStats:
    n_users: int
    sentences_per_user: float
    words_per_user: float
    non_standard_ratio: float


def _read_csv(path):
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        text = raw.decode("cp1252", errors="replace")
        log.warning("%s: not valid UTF-8, decoded as cp1252", path)
    return csv.reader(text.splitlines(True))


def _parse_flag(value, row_num, column):
    flag = value.strip().lower()
    if flag == "y":
        return True
    if flag == "n":
        return False
    raise CorpusError(f"row {row_num}: unknown label token {value!r} "
                      f"in column {column}")


def load_essays(csv_path) -> list:
    """Load the essays corpus: one row per author, y/n trait labels."""
    reader = _read_csv(csv_path)
    try:
        header = next(reader)
    except StopIteration:
        raise CorpusError(f"{csv_path}: empty file") from None
    header = [h.strip().lstrip("﻿") for h in header]
    if header != list(ESSAYS_HEADER):
        raise CorpusError(f"{csv_path}: unexpected header {header!r}")
    docs = []
    seen = set()
    for row_num, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(ESSAYS_HEADER):
            raise CorpusError(f"{csv_path}: row {row_num}: expected "
                              f"{len(ESSAYS_HEADER)} fields, got {len(row)}")
        author = row[0].strip()
        if author in seen:
            raise CorpusError(f"{csv_path}: row {row_num}: duplicate "
                              f"author id {author!r}")
        seen.add(author)
        labels = {t: _parse_flag(row[2 + i], row_num, t)
                  for i, t in enumerate(TRAITS)}
        docs.append(LabeledDocument(author, row[1], labels, "essays"))
    log.info("essays corpus: loaded %d users from %s", len(docs), csv_path)
    return docs


@dataclass(frozen=True)
class ColumnMap:
    """Column names and label convention for a generic labeled CSV."""

    id_column: str
    text_column: str
    trait_columns: dict       # trait -> source column name
    truth: str = "y/n"        # "y/n", "1/0" or "threshold:<float>"

    def parse_label(self, value, row_num, column):
        v = value.strip().lower()
        if self.truth == "y/n":
            return _parse_flag(value, row_num, column)
        if self.truth == "1/0":
            if v in ("1", "0"):
                return v == "1"
            raise CorpusError(f"row {row_num}: unknown label token "
                              f"{value!r} in column {column}")
        if self.truth.startswith("threshold:"):
            try:
                return float(v) >= float(self.truth.split(":", 1)[1])
            except ValueError:
                raise CorpusError(f"row {row_num}: non-numeric label "
                                  f"{value!r} in column {column}") from None
        raise CorpusError(f"unknown label convention {self.truth!r}")


def load_generic_csv(csv_path, column_map: ColumnMap,
                     source: str = "") -> list:
    """Load a user-mapped CSV; rows sharing an author are concatenated."""
    reader = _read_csv(csv_path)
    try:
        header = [h.strip().lstrip("﻿") for h in next(reader)]
    except StopIteration:
        raise CorpusError(f"{csv_path}: empty file") from None
    col = {name: i for i, name in enumerate(header)}
    needed = [column_map.id_column, column_map.text_column,
              *column_map.trait_columns.values()]
    missing = [c for c in needed if c not in col]
    if missing:
        raise CorpusError(f"{csv_path}: missing mapped column(s): "
                          f"{', '.join(missing)}")

    texts = {}
    labels = {}
    for row_num, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) < len(header):
            raise CorpusError(f"{csv_path}: row {row_num}: expected "
                              f"{len(header)} fields, got {len(row)}")
        author = row[col[column_map.id_column]].strip()
        row_labels = {
            t: column_map.parse_label(row[col[c]], row_num, c)
            for t, c in column_map.trait_columns.items()}
        if author in labels and labels[author] != row_labels:
            raise CorpusError(f"{csv_path}: conflicting labels for author "
                              f"{author!r}")
        labels[author] = row_labels
        texts.setdefault(author, []).append(row[col[column_map.text_column]])

    return [LabeledDocument(author, "\n".join(texts[author]),
                            labels[author], source)
            for author in texts]


def stats(docs, lexicon: Lexicon) -> CorpusStats:
    """Per-user sentence/word averages plus the non-standard-word ratio.

    The ratio is corpus-level: non-standard word tokens over all word
    tokens, where non-standard means morphy finds nothing in WordNet
    under any part of speech.
    """
    if not docs:
        raise CorpusError("cannot compute statistics of an empty corpus")
    total_sentences = total_words = total_missing = 0
    for doc in docs:
        tokenized = tokenize(doc.text)
        total_sentences += tokenized.sentence_count
        missing, words = count_non_standard(tokenized, lexicon)
        total_words += words
        total_missing += missing
    n = len(docs)
    return CorpusStats(
        n_users=n,
        sentences_per_user=total_sentences / n,
        words_per_user=total_words / n,
        non_standard_ratio=total_missing / total_words if total_words else 0.0,
    )


def save_cache(path, docs) -> None:
    """author<TAB>yyynn<TAB>base64(text) lines for fast reload."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            b64 = base64.b64encode(doc.text.encode("utf-8")).decode("ascii")
            fh.write(f"{doc.author_id}\t{doc.label_string()}\t{b64}\n")


def load_cache(path, source: str = "") -> list:
    docs = []
    with open(path, encoding="utf-8") as fh:
        for line_num, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3 or len(parts[1]) != len(TRAITS):
                raise CorpusError(f"{path}: line {line_num}: malformed "
                                  f"cache record")
            labels = {t: flag == "y"
                      for t, flag in zip(TRAITS, parts[1])}
            text = base64.b64decode(parts[2]).decode("utf-8")
            docs.append(LabeledDocument(parts[0], text, labels, source))
    return docs


def fingerprint(path) -> str:
    """sha256 of a corpus or resource file, for run manifests."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
