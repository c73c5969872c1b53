"""Sense assignment over tokenized sentences.

Two disambiguation algorithms are provided: the most-frequent-sense
baseline and Simplified Lesk (gloss/context overlap). Tokens are mapped
to WordNet evidence with a fixed part-of-speech priority
noun > verb > adjective > adverb, since the pipeline deliberately runs
without a statistical POS tagger.

Sense-level features are named ``lemma_<senseNo><posLetter>``, e.g. the
first verb sense of "love" is ``love_1v``. A selective mode demotes
sense-level features back to their word-level form unless the word is on
a caller-supplied shortlist (see ``selective_wsd``).
"""

import re
import weakref
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .lexicon import POS_LOOKUP, Lexicon, SynsetId, pos_letter
from .stopwords import STOPWORDS
from .textproc import Token, TokenizedDocument, tokenize

MFS = "mfs"
SIM_LESK = "simlesk"
ALGORITHMS = (MFS, SIM_LESK)

_FEATURE_RE = re.compile(r"^(.+)_(\d+)([nvar])$")


def format_feature_name(lemma: str, sense_number: int, pos: str) -> str:
    return f"{lemma}_{sense_number}{pos_letter(pos)}"


def parse_feature_name(name: str):
    """Inverse of format_feature_name; None for word-level names."""
    m = _FEATURE_RE.match(name)
    if not m:
        return None
    return m.group(1), int(m.group(2)), m.group(3)


@dataclass(frozen=True)
class SenseAnnotation:
    token_index: int
    lemma: str
    pos: str
    synset: SynsetId
    sense_number: int

    @property
    def feature_name(self) -> str:
        return format_feature_name(self.lemma, self.sense_number, self.pos)


@dataclass(frozen=True)
class MixedFeature:
    """A word-level or sense-level feature in an annotated stream."""

    name: str                # emitted feature name
    word_form: str           # word-level form this feature demotes to
    annotation: Optional[SenseAnnotation] = None

    @property
    def is_sense_level(self) -> bool:
        return self.annotation is not None

    @classmethod
    def word(cls, form: str):
        return cls(form, form)

    @classmethod
    def sense(cls, annotation: SenseAnnotation):
        return cls(annotation.feature_name, annotation.lemma, annotation)


def word_level_feature(feature) -> str:
    """Word-level form of a mixed feature or of a bare feature name."""
    if isinstance(feature, MixedFeature):
        return feature.word_form
    parsed = parse_feature_name(feature)
    return parsed[0] if parsed else feature


class SenseResolver:
    """Caches per-token candidate senses and per-synset gloss bags.

    All caches are derived purely from the immutable lexicon, so a
    resolver can be shared freely across documents and threads.
    """

    def __init__(self, lexicon: Lexicon):
        self.lexicon = lexicon
        self._candidates = {}
        self._overlap_form = {}
        self._gloss_bags = {}

    def candidates(self, normalized: str):
        """Candidate annotations in MFS order: POS priority, then morphy
        candidate order, then WordNet sense order."""
        cached = self._candidates.get(normalized)
        if cached is None:
            cands = []
            for pos in POS_LOOKUP:
                for lemma in self.lexicon.morphy(normalized, pos):
                    entry = self.lexicon.lookup(lemma, pos)
                    for k, sid in enumerate(entry.synset_ids):
                        cands.append((lemma, pos, sid, k + 1))
            cached = tuple(cands)
            self._candidates[normalized] = cached
        return cached

    def overlap_form(self, normalized: str) -> Optional[str]:
        """Canonical comparison form for gloss/context overlap.

        Stopwords vanish; other words map to their first indexed morphy
        lemma under the POS priority, or pass through unchanged.
        """
        if normalized in STOPWORDS:
            return None
        form = self._overlap_form.get(normalized)
        if form is None:
            form = normalized
            for pos in POS_LOOKUP:
                lemmas = self.lexicon.morphy(normalized, pos)
                if lemmas:
                    form = lemmas[0]
                    break
            self._overlap_form[normalized] = form
        return form

    def gloss_bag(self, sid: SynsetId) -> Counter:
        """Multiset of overlap forms from a synset's gloss (examples kept)."""
        bag = self._gloss_bags.get(sid)
        if bag is None:
            bag = Counter()
            for tok in tokenize(self.lexicon.synset(sid).gloss).tokens:
                if tok.is_word:
                    form = self.overlap_form(tok.normalized)
                    if form is not None:
                        bag[form] += 1
            self._gloss_bags[sid] = bag
        return bag


_RESOLVERS = weakref.WeakKeyDictionary()


def resolver_for(lexicon: Lexicon) -> SenseResolver:
    resolver = _RESOLVERS.get(lexicon)
    if resolver is None:
        resolver = SenseResolver(lexicon)
        _RESOLVERS[lexicon] = resolver
    return resolver


def mfs(lemma: str, pos: str, lexicon: Lexicon,
        token_index: int = 0) -> Optional[SenseAnnotation]:
    """Most-frequent-sense baseline: the first listed WordNet sense."""
    entry = lexicon.lookup(lemma, pos)
    if entry is None:
        return None
    return SenseAnnotation(token_index, entry.lemma, entry.pos,
                           entry.synset_ids[0], 1)


def _context_forms(context, resolver, exclude_index):
    counts = Counter()
    excluded = None
    for i, tok in enumerate(context):
        if not tok.is_word:
            continue
        form = resolver.overlap_form(tok.normalized)
        if form is None:
            continue
        if i == exclude_index:
            excluded = form
            continue
        counts[form] += 1
    return counts, excluded


def _lesk_pick(normalized, context_counts, resolver):
    """Best candidate by gloss overlap; ties keep the earliest (MFS order)."""
    cands = resolver.candidates(normalized)
    if not cands:
        return None
    best = cands[0]
    best_score = -1
    for cand in cands:
        bag = resolver.gloss_bag(cand[2])
        score = sum(n for form, n in bag.items() if context_counts[form])
        if score > best_score:
            best, best_score = cand, score
    return best


def simplified_lesk(target: Token, context, lexicon: Lexicon,
                    token_index: int = 0) -> Optional[SenseAnnotation]:
    """Disambiguate ``target`` against its sentence ``context``.

    The candidate pool spans every POS the token resolves to; overlap is
    counted between the gloss multiset and the context word set after
    lowercasing, stopword removal and morphy normalization. The target
    token itself does not count toward the overlap.
    """
    resolver = resolver_for(lexicon)
    counts = Counter()
    for i, tok in enumerate(context):
        if tok is target or not tok.is_word:
            continue
        form = resolver.overlap_form(tok.normalized)
        if form is not None:
            counts[form] += 1
    pick = _lesk_pick(target.normalized, counts, resolver)
    if pick is None:
        return None
    lemma, pos, sid, sense_number = pick
    return SenseAnnotation(token_index, lemma, pos, sid, sense_number)


def annotate_senses(sentence, algorithm: str, lexicon: Lexicon):
    """Annotate one sentence's tokens into a mixed feature stream.

    Word tokens resolve to a sense-level feature when the lexicon knows
    them, and stay word-level otherwise; non-word tokens pass through at
    word level unchanged.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown WSD algorithm {algorithm!r}")
    resolver = resolver_for(lexicon)
    sentence = list(sentence)
    context_counts = None
    if algorithm == SIM_LESK:
        context_counts, _ = _context_forms(sentence, resolver, None)
    out = []
    for i, tok in enumerate(sentence):
        if not tok.is_word:
            out.append(MixedFeature.word(tok.normalized))
            continue
        if algorithm == MFS:
            cands = resolver.candidates(tok.normalized)
            pick = cands[0] if cands else None
        else:
            own = resolver.overlap_form(tok.normalized)
            if own is not None:
                context_counts[own] -= 1
            pick = _lesk_pick(tok.normalized, context_counts, resolver)
            if own is not None:
                context_counts[own] += 1
        if pick is None:
            out.append(MixedFeature.word(tok.normalized))
        else:
            lemma, pos, sid, sense_number = pick
            out.append(MixedFeature.sense(
                SenseAnnotation(i, lemma, pos, sid, sense_number)))
    return out


def annotate_document(doc: TokenizedDocument, algorithm: str,
                      lexicon: Lexicon):
    """Concatenated per-sentence annotation of a whole document."""
    out = []
    for sentence in doc.sentences():
        out.extend(annotate_senses(sentence, algorithm, lexicon))
    return out


def demote(features, topk_words):
    """Procedure core: keep sense level only for shortlisted word forms.

    ``topk_words`` of None keeps every sense-level feature (All.WSD);
    an empty collection demotes the entire stream to word level.
    """
    if topk_words is None:
        return list(features)
    keep = topk_words if isinstance(topk_words, (set, frozenset)) \
        else set(topk_words)
    out = []
    for f in features:
        if f.is_sense_level and f.word_form not in keep:
            out.append(MixedFeature.word(f.word_form))
        else:
            out.append(f)
    return out


def selective_wsd(doc: TokenizedDocument, topk_words, algorithm: str,
                  lexicon: Lexicon):
    """Mixed word/sense stream keeping senses only for top-ranked words.

    ``topk_words`` is the word-level shortlist (ranked on training data
    elsewhere); everything off the list, and every token WordNet does not
    know, contributes its word-level form.
    """
    return demote(annotate_document(doc, algorithm, lexicon), topk_words)
