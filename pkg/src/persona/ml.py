"""Chi-square feature ranking, linear SVM, and 10-fold evaluation.

The SVM solves the standard hinge-loss primal

    min_{w,b}  (1/2)||w||^2 + C * sum_i max(0, 1 - y_i (w.x_i + b))

via SMO on the dual with maximal-violating-pair selection, stopping on a
relative duality gap. The bias is unregularized; it is recovered by exact
line search on the hinge sum, which is also how the reported primal
objective is computed.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import sparse

from . import features as feat
from . import wsd
from .corpus import TRAITS
from .features import PipelineConfig
from .lexicon import Lexicon

log = logging.getLogger(__name__)

__all__ = ["TRAITS", "ContingencyTable", "chi2", "rank_features",
           "LinearModel", "train_svm", "hinge_objective",
           "stratified_folds", "PreparedCorpus", "TraitResult",
           "cross_validate", "averaged_feature_ranking",
           "write_report", "read_report"]


class ContingencyTable(NamedTuple):
    """2x2 document counts: term presence x class membership."""

    a: int  # term present, positive class
    b: int  # term present, negative class
    c: int  # term absent, positive class
    d: int  # term absent, negative class


def chi2(table: ContingencyTable) -> float:
    """Chi-square statistic; 0 when any marginal is empty."""
    a, b, c, d = (float(v) for v in table)
    n = a + b + c + d
    if n <= 0:
        raise ValueError("empty contingency table")
    denom = (a + b) * (c + d) * (a + c) * (b + d)
    if denom == 0:
        return 0.0
    return n * (a * d - b * c) ** 2 / denom


def _chi2_vector(present_pos, present_neg, n_pos, n_neg):
    a = present_pos.astype(np.float64)
    b = present_neg.astype(np.float64)
    c = n_pos - a
    d = n_neg - b
    n = float(n_pos + n_neg)
    denom = (a + b) * (c + d) * (a + c) * (b + d)
    num = n * (a * d - b * c) ** 2
    scores = np.divide(num, denom, out=np.zeros_like(num),
                       where=denom > 0)
    # sign of the report form: + when presence rate is higher in the
    # positive class (cross-multiplied to avoid dividing by zero)
    signs = np.where(a * n_neg >= b * n_pos, 1.0, -1.0)
    return scores, signs


def presence_matrix(docs_counts, vocab: feat.FeatureVocabulary):
    X = feat.count_matrix(docs_counts, vocab)
    X.data = np.ones_like(X.data)
    return X


def rank_features(docs_counts, labels, vocab=None):
    """Features sorted by chi-square of document-level presence vs label.

    Returns (name, signed_score) pairs, ranked by the absolute statistic
    descending with lexicographic tie-breaking. ``labels`` are booleans
    for one trait; fit this on training folds only.
    """
    if vocab is None:
        vocab = feat.FeatureVocabulary.build(docs_counts)
    X = presence_matrix(docs_counts, vocab)
    y = np.asarray(labels, dtype=bool)
    present_pos = np.asarray(X[y].sum(axis=0)).ravel()
    present_neg = np.asarray(X[~y].sum(axis=0)).ravel()
    scores, signs = _chi2_vector(present_pos, present_neg,
                                 int(y.sum()), int((~y).sum()))
    order = sorted(range(len(vocab)), key=lambda j: (-scores[j],
                                                     vocab.names[j]))
    return [(vocab.names[j], float(signs[j] * scores[j])) for j in order]


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    trait: str = ""
    hyper_c: float = 1.0

    def decision(self, X):
        return np.asarray(X @ self.weights).ravel() + self.bias

    def predict(self, X):
        return np.where(self.decision(X) >= 0, 1, -1)


def hinge_objective(X, y, w, b, c_param) -> float:
    margins = 1.0 - y * (np.asarray(X @ w).ravel() + b)
    return 0.5 * float(w @ w) + c_param * float(np.clip(margins, 0,
                                                        None).sum())


def _optimal_bias(fx, y):
    """b minimizing the hinge sum for fixed w.

    The hinge sum is piecewise linear in b with breakpoints y_i - f_i, so
    the minimum sits on a breakpoint; prefix sums evaluate all of them at
    once. Ties at a breakpoint contribute zero margin either way.
    """
    order = np.argsort(y - fx, kind="stable")
    beta = (y - fx)[order]
    pos = (y[order] > 0).astype(np.float64)
    neg = 1.0 - pos
    pos_cnt_from = np.cumsum(pos[::-1])[::-1]
    pos_sum_from = np.cumsum((beta * pos)[::-1])[::-1]
    neg_cnt_upto = np.cumsum(neg)
    neg_sum_upto = np.cumsum(beta * neg)
    values = (pos_sum_from - beta * pos_cnt_from) + \
             (beta * neg_cnt_upto - neg_sum_upto)
    return float(beta[int(np.argmin(values))])


def train_svm(X, y, hyper_c: float = 1.0, tol: float = 1e-4,
              max_epochs: int = 1000, seed: int = 0,
              trait: str = "") -> LinearModel:
    """Train a linear SVM by SMO with maximal-violating-pair selection.

    Stops when the relative duality gap falls below ``tol`` or after
    ``max_epochs`` sweeps worth of pair updates. Deterministic: the seed
    fixes the (mathematically irrelevant) example ordering.

    Raises ValueError on single-class input; callers should fall back to
    the constant-class predictor.
    """
    X = sparse.csr_matrix(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] != len(y):
        raise ValueError("X and y disagree on the number of examples")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise ValueError("training data contains a single class; emit the "
                         "constant-class predictor instead of an SVM")

    rng = np.random.default_rng(seed)
    perm = rng.permutation(X.shape[0])
    X, y = X[perm], y[perm]

    n = X.shape[0]
    c_param = float(hyper_c)
    alpha = np.zeros(n)
    w = np.zeros(X.shape[1])
    sq_norms = np.asarray(X.multiply(X).sum(axis=1)).ravel()
    max_iters = max_epochs * n
    check_every = max(200, n // 2)
    tau = 1e-12

    model_b = 0.0
    for it in range(max_iters):
        fx = np.asarray(X @ w).ravel()
        grad = y * fx - 1.0          # dual gradient
        viol = -y * grad
        up = ((y > 0) & (alpha < c_param)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < c_param))
        if not up.any() or not low.any():
            break
        vi = np.where(up, viol, -np.inf)
        vj = np.where(low, viol, np.inf)
        i = int(np.argmax(vi))
        j = int(np.argmin(vj))
        m, mm = vi[i], vj[j]
        if m - mm < 1e-12:
            break
        if it % check_every == 0:
            model_b = _optimal_bias(fx, y)
            primal = hinge_objective(X, y, w, model_b, c_param)
            dual = float(alpha.sum()) - 0.5 * float(w @ w)
            if primal - dual <= tol * max(1.0, abs(primal)):
                break
        xi = X.getrow(i)
        xj = X.getrow(j)
        kij = float((xi @ xj.T).toarray()[0, 0])
        quad = max(sq_norms[i] + sq_norms[j] - 2.0 * kij, tau)
        t = (m - mm) / quad
        bound_i = (c_param - alpha[i]) if y[i] > 0 else alpha[i]
        bound_j = alpha[j] if y[j] > 0 else (c_param - alpha[j])
        t = min(t, bound_i, bound_j)
        if t <= 0:
            break
        alpha[i] += y[i] * t
        alpha[j] -= y[j] * t
        delta = (xi - xj).multiply(t)
        w[delta.indices] += delta.data
    else:
        log.warning("SVM hit the iteration cap before reaching the gap "
                    "tolerance")

    fx = np.asarray(X @ w).ravel()
    model_b = _optimal_bias(fx, y)
    return LinearModel(w, model_b, trait, c_param)


def stratified_folds(labels, n_folds: int, seed: int):
    """Shuffle once, order by class, deal round-robin into folds.

    Fold sizes differ by at most one overall and per class, every index
    lands in exactly one fold.
    """
    labels = np.asarray(labels, dtype=bool)
    n = len(labels)
    if n < n_folds:
        raise ValueError(f"need at least {n_folds} documents to form "
                         f"{n_folds} folds, got {n}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    ordered = [i for i in perm if labels[i]] + \
              [i for i in perm if not labels[i]]
    folds = [[] for _ in range(n_folds)]
    for pos, idx in enumerate(ordered):
        folds[pos % n_folds].append(int(idx))
    return [sorted(f) for f in folds]


class PreparedCorpus:
    """Tokenization/annotation/extraction caches shared across folds,
    traits and pipeline runs over one corpus."""

    def __init__(self, docs, lexicon: Lexicon):
        from .textproc import tokenize
        self.docs = list(docs)
        self.lexicon = lexicon
        self.tokenized = [tokenize(d.text) for d in self.docs]
        self._annotated = {}
        self._extracted = {}
        self._word_counts = {}

    def __len__(self):
        return len(self.docs)

    def labels(self, trait):
        return [d.labels[trait] for d in self.docs]

    def annotated(self, algorithm):
        streams = self._annotated.get(algorithm)
        if streams is None:
            streams = [wsd.annotate_document(t, algorithm, self.lexicon)
                       for t in self.tokenized]
            self._annotated[algorithm] = streams
        return streams

    def word_counts(self, algorithm):
        """Word-level image of each annotated stream (selective ranking)."""
        counts = self._word_counts.get(algorithm)
        if counts is None:
            counts = [feat.word_level_counts(s)
                      for s in self.annotated(algorithm)]
            self._word_counts[algorithm] = counts
        return counts

    def extracted(self, config: PipelineConfig):
        """Fold-independent extraction, memoized per configuration."""
        if config.selective_topk is not None:
            raise ValueError("selective extraction is fold-dependent")
        key = (config.base, config.with_supersense, config.with_sentiment,
               config.sentiment_scope)
        docs = self._extracted.get(key)
        if docs is None:
            annotated = self.annotated(config.algorithm) \
                if config.sense_bearing else [None] * len(self.docs)
            docs = [feat.extract(t, config, self.lexicon, annotated=a)
                    for t, a in zip(self.tokenized, annotated)]
            self._extracted[key] = docs
        return docs

    def extract_selective(self, config: PipelineConfig, topk_words):
        annotated = self.annotated(config.algorithm)
        return [feat.extract(t, config, self.lexicon,
                             topk_words=topk_words, annotated=a)
                for t, a in zip(self.tokenized, annotated)]


@dataclass
class TraitResult:
    """One evaluation row: a trait under one pipeline configuration."""

    trait: str
    config: str
    accuracy: float
    majority_accuracy: float
    fold_accuracies: list
    seed: int
    feature_cap: int
    positive_rate: float = 0.0

    def to_tsv(self) -> str:
        folds = ",".join(f"{a:.6f}" for a in self.fold_accuracies)
        return (f"{self.trait}\t{self.config}\t{self.accuracy:.6f}\t"
                f"{self.majority_accuracy:.6f}\t{folds}\t{self.seed}\t"
                f"{self.feature_cap}")

    @classmethod
    def from_tsv(cls, line: str):
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 7:
            raise ValueError(f"expected 7 tab-separated columns, got "
                             f"{len(parts)}")
        return cls(parts[0], parts[1], float(parts[2]), float(parts[3]),
                   [float(x) for x in parts[4].split(",")],
                   int(parts[5]), int(parts[6]))


REPORT_HEADER = ("trait\tconfig\taccuracy\tmajority\tfold_accuracies\t"
                 "seed\tfeature_cap")


def write_report(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(REPORT_HEADER + "\n")
        for row in rows:
            fh.write(row.to_tsv() + "\n")


def read_report(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != REPORT_HEADER:
            raise ValueError(f"{path}: unexpected report header")
        return [TraitResult.from_tsv(line) for line in fh if line.strip()]


def select_top_names(ranked, cap):
    return [name for name, _ in ranked[:cap]]


def _fit_fold(prepared, config, train_idx, trait_labels, seed):
    """Everything learned from one training fold."""
    if config.selective_topk is not None:
        word_counts = prepared.word_counts(config.algorithm)
        ranked = rank_features([word_counts[i] for i in train_idx],
                               [trait_labels[i] for i in train_idx])
        topk = frozenset(select_top_names(ranked, config.selective_topk))
        docs = prepared.extract_selective(config, topk)
    else:
        docs = prepared.extracted(config)

    train_counts = [docs[i].counts for i in train_idx]
    train_labels = [trait_labels[i] for i in train_idx]
    ranked = rank_features(train_counts, train_labels)
    selected = select_top_names(ranked, config.feature_cap)
    vocab = feat.FeatureVocabulary(selected)
    table = feat.tfidf_fit(train_counts, vocab)
    return docs, table


def cross_validate(corpus, config: PipelineConfig, trait: str, seed: int,
                   lexicon: Optional[Lexicon] = None,
                   n_folds: int = 10) -> TraitResult:
    """Evaluate one trait under one configuration with rotating folds.

    Vocabulary, IDF, chi-square ranking, the selective shortlist and the
    SVM are all fit per training fold; accuracy is pooled over the held
    out folds. The majority baseline predicts the most frequent training
    class for every test document.
    """
    if not isinstance(corpus, PreparedCorpus):
        if lexicon is None:
            raise ValueError("lexicon required when corpus is a plain list")
        corpus = PreparedCorpus(corpus, lexicon)
    labels = corpus.labels(trait)
    folds = stratified_folds(labels, n_folds, seed)

    correct = majority_correct = 0
    fold_accuracies = []
    for fold_idx, test_idx in enumerate(folds):
        test_set = set(test_idx)
        train_idx = [i for i in range(len(corpus)) if i not in test_set]
        docs, table = _fit_fold(corpus, config, train_idx, labels, seed)

        train_feats = [docs[i] for i in train_idx]
        test_feats = [docs[i] for i in test_idx]
        Xtr = feat.assemble_matrix(train_feats, table,
                                   config.with_sentiment)
        Xte = feat.assemble_matrix(test_feats, table,
                                   config.with_sentiment)
        ytr = np.array([1 if labels[i] else -1 for i in train_idx])
        yte = np.array([1 if labels[i] else -1 for i in test_idx])

        n_pos = int((ytr > 0).sum())
        n_neg = len(ytr) - n_pos
        majority = 1 if n_pos >= n_neg else -1
        if n_pos == 0 or n_neg == 0:
            pred = np.full(len(yte), majority)
        else:
            model = train_svm(Xtr, ytr, seed=seed, trait=trait)
            pred = model.predict(Xte)

        fold_correct = int((pred == yte).sum())
        correct += fold_correct
        majority_correct += int((yte == majority).sum())
        fold_accuracies.append(fold_correct / len(yte))
        log.debug("%s fold %d: acc=%.4f", trait, fold_idx,
                  fold_accuracies[-1])

    n = len(corpus)
    return TraitResult(
        trait=trait,
        config=config.label,
        accuracy=correct / n,
        majority_accuracy=majority_correct / n,
        fold_accuracies=fold_accuracies,
        seed=seed,
        feature_cap=config.feature_cap,
        positive_rate=sum(labels) / n,
    )


def averaged_feature_ranking(corpus, config: PipelineConfig, trait: str,
                             seed: int, n_folds: int = 10,
                             word_level: bool = False):
    """Per-training-fold chi-square scores averaged across the folds.

    Scores are normalized by the training-fold size so values are
    comparable across folds; the sign marks the class direction.
    """
    labels = corpus.labels(trait)
    folds = stratified_folds(labels, n_folds, seed)
    if word_level and config.sense_bearing:
        all_counts = corpus.word_counts(config.algorithm)
    else:
        all_counts = [d.counts for d in corpus.extracted(config)]

    totals = Counter()
    for test_idx in folds:
        test_set = set(test_idx)
        train_idx = [i for i in range(len(corpus)) if i not in test_set]
        ranked = rank_features([all_counts[i] for i in train_idx],
                               [labels[i] for i in train_idx])
        for name, signed in ranked:
            totals[name] += signed / len(train_idx)
    averaged = [(name, total / n_folds) for name, total in totals.items()]
    averaged.sort(key=lambda kv: (-abs(kv[1]), kv[0]))
    return averaged
