"""Feature extraction pipelines and TF-IDF weighting.

Four bag-of-feature pipelines over a tokenized document:

  word       all normalized tokens (punctuation and clitics included)
  wn-word    first indexed morphy lemma of each token; the rest dropped
  wn-mfs     mixed word/sense features via the most-frequent-sense picker
  wn-s-lesk  mixed word/sense features via Simplified Lesk

The sense-bearing pipelines can add one supersense feature per surviving
sense, three document-level sentiment scores, and a selective mode that
keeps sense level only for a shortlist of word forms.
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import sparse

from . import wsd
from .lexicon import Lexicon
from .textproc import TokenizedDocument

WORD = "word"
WN_WORD = "wn-word"
WN_MFS = "wn-mfs"
WN_S_LESK = "wn-s-lesk"
BASES = (WORD, WN_WORD, WN_MFS, WN_S_LESK)
SENSE_BASES = (WN_MFS, WN_S_LESK)

SENTIMENT_FEATURES = ("posscore", "negscore", "neuscore")

_BASE_LABEL = {WORD: "WORD", WN_WORD: "WN-WORD",
               WN_MFS: "WN-MFS", WN_S_LESK: "WN-S-LESK"}
_BASE_ALGORITHM = {WN_MFS: wsd.MFS, WN_S_LESK: wsd.SIM_LESK}


@dataclass(frozen=True)
class PipelineConfig:
    base: str
    with_supersense: bool = False
    with_sentiment: bool = False
    selective_topk: Optional[int] = None
    feature_cap: int = 5000
    sentiment_scope: str = "all"  # "all" senses or only "polar" ones

    def __post_init__(self):
        if self.base not in BASES:
            raise ValueError(f"unknown pipeline base {self.base!r}")
        if self.with_supersense and not self.sense_bearing:
            raise ValueError(
                "supersense features require a sense-bearing pipeline "
                "(wn-mfs or wn-s-lesk)")
        if self.with_sentiment and not self.sense_bearing:
            raise ValueError(
                "sentiment features require a sense-bearing pipeline "
                "(wn-mfs or wn-s-lesk)")
        if self.selective_topk is not None:
            if not self.sense_bearing:
                raise ValueError("selective WSD requires a sense-bearing "
                                 "pipeline")
            if self.selective_topk < 0:
                raise ValueError("selective topK must be >= 0")
        if self.feature_cap <= 0:
            raise ValueError("feature cap must be positive")
        if self.sentiment_scope not in ("all", "polar"):
            raise ValueError(f"unknown sentiment scope "
                             f"{self.sentiment_scope!r}")

    @property
    def sense_bearing(self) -> bool:
        return self.base in SENSE_BASES

    @property
    def algorithm(self) -> Optional[str]:
        return _BASE_ALGORITHM.get(self.base)

    @property
    def label(self) -> str:
        parts = [_BASE_LABEL[self.base]]
        if self.with_supersense:
            parts.append("S_SENSE")
        if self.with_sentiment:
            parts.append("SENTI")
        label = "-".join(parts)
        if self.selective_topk is not None:
            label += f"-SEL{self.selective_topk}"
        return label


@dataclass(frozen=True)
class DocumentFeatures:
    """Raw per-document extraction result (no weighting applied)."""

    counts: Counter
    sentiment: Optional[tuple] = None


def _first_lemma(resolver, normalized):
    cands = resolver.candidates(normalized)
    return cands[0][0] if cands else None


def _wn_filter(features, resolver):
    """Drop word-level features WordNet does not know (pronouns, punct)."""
    out = []
    for f in features:
        if f.is_sense_level or resolver.candidates(f.name):
            out.append(f)
    return out


def _sentiment_triple(features, lexicon, scope):
    scores = []
    for f in features:
        if not f.is_sense_level:
            continue
        s = lexicon.sentiment_for(f.annotation.synset)
        if scope == "polar" and s.pos_score + s.neg_score <= 0:
            continue
        scores.append(s)
    if not scores:
        return (0.0, 0.0, 0.0)
    n = len(scores)
    return (sum(s.pos_score for s in scores) / n,
            sum(s.neg_score for s in scores) / n,
            sum(s.obj_score for s in scores) / n)


def extract(doc: TokenizedDocument, config: PipelineConfig, lexicon: Lexicon,
            topk_words=None, annotated=None) -> DocumentFeatures:
    """Bag-of-feature counts for one document under a pipeline config.

    ``topk_words`` must be given iff the config is selective. Callers
    that annotate documents once and reuse them across runs can pass the
    mixed stream via ``annotated``.
    """
    if (topk_words is not None) != (config.selective_topk is not None):
        raise ValueError("topk_words must be supplied exactly when "
                         "selective_topk is configured")
    if config.base == WORD:
        return DocumentFeatures(Counter(t.normalized for t in doc.tokens))

    resolver = wsd.resolver_for(lexicon)
    if config.base == WN_WORD:
        counts = Counter()
        for tok in doc.tokens:
            if tok.is_word:
                lemma = _first_lemma(resolver, tok.normalized)
                if lemma is not None:
                    counts[lemma] += 1
        return DocumentFeatures(counts)

    if annotated is None:
        annotated = wsd.annotate_document(doc, config.algorithm, lexicon)
    features = wsd.demote(annotated, topk_words) \
        if config.selective_topk is not None else list(annotated)
    features = _wn_filter(features, resolver)

    counts = Counter(f.name for f in features)
    if config.with_supersense:
        for f in features:
            if f.is_sense_level:
                counts[lexicon.supersense(f.annotation.synset)] += 1
    sentiment = None
    if config.with_sentiment:
        sentiment = _sentiment_triple(features, lexicon,
                                      config.sentiment_scope)
    return DocumentFeatures(counts, sentiment)


def word_level_counts(annotated) -> Counter:
    """Counts of the word-level image of a mixed stream (for ranking)."""
    return Counter(f.word_form for f in annotated)


class FeatureVocabulary:
    """Bidirectional feature-name <-> dense-id map, fit on training data.

    Ids are assigned in sorted name order, so the mapping depends only on
    the feature set, not on document order.
    """

    def __init__(self, names):
        self.names = tuple(sorted(names))
        self.index = {name: i for i, name in enumerate(self.names)}
        if len(self.index) != len(self.names):
            raise ValueError("duplicate feature names")

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self.index

    @classmethod
    def build(cls, docs_counts):
        names = set()
        for counts in docs_counts:
            names.update(counts)
        return cls(names)


def count_matrix(docs_counts, vocab: FeatureVocabulary):
    """CSR matrix of raw counts; features outside the vocabulary drop."""
    indptr = [0]
    indices = []
    data = []
    for counts in docs_counts:
        cols = sorted(vocab.index[n] for n in counts if n in vocab.index)
        indices.extend(cols)
        data.extend(counts[vocab.names[c]] for c in cols)
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (np.asarray(data, dtype=np.float64),
         np.asarray(indices, dtype=np.int32),
         np.asarray(indptr, dtype=np.int64)),
        shape=(len(indptr) - 1, len(vocab)))


@dataclass(frozen=True)
class IdfTable:
    vocab: FeatureVocabulary
    idf: np.ndarray = field(repr=False)


def tfidf_fit(train_counts, vocab: FeatureVocabulary) -> IdfTable:
    """idf(t) = ln((1 + N) / (1 + df(t))) over the training documents."""
    X = count_matrix(train_counts, vocab)
    df = np.asarray((X > 0).sum(axis=0)).ravel()
    idf = np.log((1.0 + X.shape[0]) / (1.0 + df))
    return IdfTable(vocab, idf)


def tfidf_apply_matrix(docs_counts, table: IdfTable):
    """tf * idf with L2-normalized rows; zero rows stay zero."""
    X = count_matrix(docs_counts, table.vocab)
    X = X.multiply(table.idf).tocsr()
    norms = sparse.linalg.norm(X, axis=1)
    scale = np.divide(1.0, norms, out=np.zeros_like(norms),
                      where=norms > 0)
    return sparse.diags(scale) @ X


def tfidf_apply(counts: Counter, table: IdfTable) -> dict:
    """Single-document TF-IDF as a feature_id -> weight map."""
    row = tfidf_apply_matrix([counts], table)
    return {int(j): float(v) for j, v in zip(row.indices, row.data)}


def sentiment_block(docs_features):
    """Dense (n_docs, 3) block of sentiment scalars, zeros when absent."""
    block = np.zeros((len(docs_features), 3))
    for i, doc in enumerate(docs_features):
        if doc.sentiment is not None:
            block[i, :] = doc.sentiment
    return block


def assemble_matrix(docs_features, table: IdfTable, with_sentiment: bool):
    """TF-IDF matrix, with sentiment scalars appended after normalization."""
    X = tfidf_apply_matrix([d.counts for d in docs_features], table)
    if with_sentiment:
        X = sparse.hstack(
            [X, sparse.csr_matrix(sentiment_block(docs_features))],
            format="csr")
    return X


def save_matrix(path, doc_ids, X, vocab: FeatureVocabulary):
    """Sparse text format: '#features N' header, then docId\\tid:value,..."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#features {len(vocab)}\n")
        for doc_id, row in zip(doc_ids, X):
            cells = ",".join(f"{j}:{v:.6g}"
                             for j, v in zip(row.indices, row.data))
            fh.write(f"{doc_id}\t{cells}\n")


def load_matrix(path):
    """Inverse of save_matrix; returns (doc_ids, csr_matrix)."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2 or header[0] != "#features":
            raise ValueError(f"{path}: missing '#features' header")
        width = int(header[1])
        doc_ids = []
        indptr, indices, data = [0], [], []
        for line in fh:
            doc_id, _, cells = line.rstrip("\n").partition("\t")
            doc_ids.append(doc_id)
            if cells:
                for cell in cells.split(","):
                    j, _, v = cell.partition(":")
                    indices.append(int(j))
                    data.append(float(v))
            indptr.append(len(indices))
    X = sparse.csr_matrix(
        (np.asarray(data), np.asarray(indices, dtype=np.int32),
         np.asarray(indptr, dtype=np.int64)),
        shape=(len(doc_ids), width))
    return doc_ids, X
