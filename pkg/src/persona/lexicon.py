"""WordNet 3.0 database and SentiWordNet 3.0 parsing.

Reads the raw ``dict/`` files (``index.pos``, ``data.pos``, ``lexnames``,
optional ``pos.exc`` exception lists) into immutable in-memory indexes and
answers lemma/synset/supersense/sentiment queries. No third-party wordnet
wrapper is used, so a plain resource directory is all that is needed.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Optional

log = logging.getLogger(__name__)

NOUN, VERB, ADJ, ADJ_SAT, ADV = "n", "v", "a", "s", "r"
POS_ALL = (NOUN, VERB, ADJ, ADJ_SAT, ADV)
# Resolution priority for untagged tokens: noun > verb > adjective > adverb.
POS_LOOKUP = (NOUN, VERB, ADJ, ADV)

# index/data file suffix per part of speech ('s' lives inside the adj files)
_FILE_POS = {"noun": NOUN, "verb": VERB, "adj": ADJ, "adv": ADV}
_SUPERSENSE_PREFIX = {NOUN: "noun.", VERB: "verb.", ADJ: "adj.", ADJ_SAT: "adj.", ADV: "adv."}


class LexiconError(Exception):
    """Fatal problem loading or querying a lexical resource."""


def pos_letter(pos: str) -> str:
    """Letter used in feature names; adjective satellites fold into 'a'."""
    return ADJ if pos == ADJ_SAT else pos


class SynsetId(NamedTuple):
    pos: str
    offset: int


class SentimentScore(NamedTuple):
    pos_score: float
    neg_score: float
    obj_score: float


SENTIMENT_DEFAULT = SentimentScore(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class Synset:
    id: SynsetId
    lemmas: tuple
    gloss: str
    lexfile_num: int
    ss_type: str  # 'a' vs 's' distinction kept here; id.pos is the file POS


@dataclass(frozen=True)
class SenseEntry:
    lemma: str
    pos: str
    synset_ids: tuple  # WordNet sense order: synset_ids[k] is sense k+1

    def sense_number(self, sid: SynsetId) -> int:
        return self.synset_ids.index(sid) + 1


# Suffix detachment rules of WordNet's morphy, in documented order.
DETACHMENT_RULES = {
    NOUN: (("s", ""), ("ses", "s"), ("xes", "x"), ("zes", "z"),
           ("ches", "ch"), ("shes", "sh"), ("men", "man"), ("ies", "y")),
    VERB: (("s", ""), ("ies", "y"), ("es", "e"), ("es", ""),
           ("ed", "e"), ("ed", ""), ("ing", "e"), ("ing", "")),
    ADJ: (("er", ""), ("est", ""), ("er", "e"), ("est", "e")),
    ADV: (),
}


class Lexicon:
    """Immutable after load; all queries are pure and thread-safe."""

    def __init__(self, sense_index, synsets, lexnames, exceptions,
                 sentiment=None, swn_skipped=0):
        self.sense_index = sense_index    # (lemma, pos) -> SenseEntry
        self.synsets = synsets            # SynsetId -> Synset
        self.lexnames = lexnames          # lexfile_num -> supersense label
        self.exceptions = exceptions      # pos -> {inflected: [base, ...]}
        self.sentiment = sentiment if sentiment is not None else {}
        self.swn_skipped = swn_skipped    # SentiWordNet lines with unknown ids

    @property
    def has_sentiment(self) -> bool:
        return bool(self.sentiment)

    def lookup(self, lemma: str, pos: str) -> Optional[SenseEntry]:
        """Sense entry for an exact (lemma, pos), or None if not indexed."""
        return self.sense_index.get((lemma, pos_letter(pos)))

    def synset(self, sid: SynsetId) -> Synset:
        try:
            return self.synsets[sid]
        except KeyError:
            raise LexiconError(f"unknown synset id {sid!r}") from None

    def supersense(self, sid: SynsetId) -> str:
        """Lexicographer-file label of a synset, e.g. 'noun.animal'."""
        syn = self.synset(sid)
        try:
            return self.lexnames[syn.lexfile_num]
        except KeyError:
            raise LexiconError(
                f"synset {sid!r} has lexfile number {syn.lexfile_num} "
                f"absent from lexnames") from None

    def sentiment_for(self, sid: SynsetId) -> SentimentScore:
        """SentiWordNet scores; synsets not in the resource are objective."""
        return self.sentiment.get(sid, SENTIMENT_DEFAULT)

    def morphy(self, surface: str, pos: str) -> list:
        """Candidate base forms of ``surface`` that are indexed under ``pos``.

        Deterministic order: exception-list hits, then suffix-detachment
        results in documented rule order, then the surface itself;
        duplicates removed. Empty when nothing is indexed.
        """
        pos = pos_letter(pos)
        candidates = []
        candidates.extend(self.exceptions.get(pos, {}).get(surface, ()))
        for suffix, repl in DETACHMENT_RULES.get(pos, ()):
            if surface.endswith(suffix) and len(surface) > len(suffix):
                candidates.append(surface[: -len(suffix)] + repl)
        candidates.append(surface)
        out = []
        for cand in candidates:
            if cand not in out and (cand, pos) in self.sense_index:
                out.append(cand)
        return out

    def with_sentiment(self, sentiment, swn_skipped):
        return Lexicon(self.sense_index, self.synsets, self.lexnames,
                       self.exceptions, sentiment, swn_skipped)


def _data_lines(path: Path):
    """Yield (line_number, line) skipping the two-space license header."""
    with open(path, encoding="latin-1") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.startswith("  ") or not line.strip():
                continue
            yield lineno, line.rstrip("\n")


def _normalize_word(word: str) -> str:
    """data-file word form -> index lemma (strip '(p)' markers, lowercase)."""
    if word.endswith(")") and "(" in word:
        word = word[: word.index("(")]
    return word.lower()


def _parse_data_file(path: Path, pos: str, synsets: dict) -> None:
    for lineno, line in _data_lines(path):
        head, sep, gloss = line.partition(" | ")
        fields = head.split()
        try:
            offset = int(fields[0])
            lexfile_num = int(fields[1])
            ss_type = fields[2]
            w_cnt = int(fields[3], 16)
            lemmas = tuple(_normalize_word(fields[4 + 2 * i])
                           for i in range(w_cnt))
        except (IndexError, ValueError) as exc:
            raise LexiconError(f"{path.name}:{lineno}: malformed data line "
                               f"({exc})") from None
        if not sep or not gloss.strip():
            raise LexiconError(f"{path.name}:{lineno}: record has no gloss")
        if not lemmas:
            raise LexiconError(f"{path.name}:{lineno}: record has no words")
        if ss_type not in POS_ALL:
            raise LexiconError(f"{path.name}:{lineno}: bad synset type "
                               f"{ss_type!r}")
        sid = SynsetId(pos, offset)
        synsets[sid] = Synset(sid, lemmas, gloss.strip(), lexfile_num, ss_type)


def _parse_index_file(path: Path, pos: str, sense_index: dict) -> None:
    for lineno, line in _data_lines(path):
        fields = line.split()
        try:
            lemma = fields[0]
            synset_cnt = int(fields[2])
            p_cnt = int(fields[3])
            offsets = fields[6 + p_cnt: 6 + p_cnt + synset_cnt]
            if len(offsets) != synset_cnt:
                raise ValueError("offset count mismatch")
            sids = tuple(SynsetId(pos, int(off)) for off in offsets)
        except (IndexError, ValueError) as exc:
            raise LexiconError(f"{path.name}:{lineno}: malformed index line "
                               f"({exc})") from None
        if len(set(sids)) != len(sids):
            raise LexiconError(f"{path.name}:{lineno}: duplicate synset "
                               f"offsets for {lemma!r}")
        sense_index[(lemma, pos)] = SenseEntry(lemma, pos, sids)


def _parse_lexnames(path: Path) -> dict:
    lexnames = {}
    with open(path, encoding="latin-1") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            try:
                lexnames[int(parts[0])] = parts[1]
            except (IndexError, ValueError):
                raise LexiconError(
                    f"{path.name}:{lineno}: malformed lexnames line") from None
    return lexnames


def _parse_exceptions(dict_dir: Path) -> dict:
    exceptions = {}
    for name, pos in _FILE_POS.items():
        path = dict_dir / f"{name}.exc"
        if not path.exists():
            continue
        table = {}
        with open(path, encoding="latin-1") as fh:
            for line in fh:
                parts = line.split()
                if len(parts) >= 2:
                    table[parts[0]] = tuple(parts[1:])
        exceptions[pos] = table
    return exceptions


def load_wordnet(dict_dir) -> Lexicon:
    """Parse a WordNet 3.0 ``dict/`` directory into a Lexicon.

    Raises LexiconError naming the first missing required file, or the
    file and line of the first malformed record.
    """
    dict_dir = Path(dict_dir)
    required = [f"index.{n}" for n in _FILE_POS] + \
               [f"data.{n}" for n in _FILE_POS] + ["lexnames"]
    missing = [f for f in required if not (dict_dir / f).exists()]
    if missing:
        raise LexiconError(f"WordNet directory {dict_dir} is missing "
                           f"required file(s): {', '.join(sorted(missing))}")

    synsets = {}
    sense_index = {}
    for name, pos in _FILE_POS.items():
        _parse_data_file(dict_dir / f"data.{name}", pos, synsets)
    for name, pos in _FILE_POS.items():
        _parse_index_file(dict_dir / f"index.{name}", pos, sense_index)
    lexnames = _parse_lexnames(dict_dir / "lexnames")
    exceptions = _parse_exceptions(dict_dir)

    for (lemma, pos), entry in sense_index.items():
        for sid in entry.synset_ids:
            if sid not in synsets:
                raise LexiconError(
                    f"index entry {lemma!r}/{pos} references offset "
                    f"{sid.offset} absent from data.{pos}")
    log.info("loaded WordNet: %d synsets, %d index entries",
             len(synsets), len(sense_index))
    return Lexicon(sense_index, synsets, lexnames, exceptions)


def load_sentiwordnet(tsv_path, lexicon: Lexicon) -> Lexicon:
    """Attach SentiWordNet 3.0 scores to a loaded Lexicon.

    Lines whose synset id does not resolve are counted and skipped
    (resource versions drift); a positive+negative mass above 1 is a
    fatal parse error.
    """
    tsv_path = Path(tsv_path)
    if not tsv_path.exists():
        raise LexiconError(f"SentiWordNet file not found: {tsv_path}")
    sentiment = {}
    skipped = 0
    with open(tsv_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip() or line.strip().startswith("#"):
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) < 5:
                raise LexiconError(f"{tsv_path.name}:{lineno}: expected at "
                                   f"least 5 tab-separated fields")
            pos, raw_id, raw_pos_score, raw_neg_score = fields[:4]
            try:
                sid = SynsetId(pos_letter(pos), int(raw_id))
                pos_score = float(raw_pos_score)
                neg_score = float(raw_neg_score)
            except ValueError as exc:
                raise LexiconError(
                    f"{tsv_path.name}:{lineno}: malformed line ({exc})"
                ) from None
            if pos_score + neg_score > 1 + 1e-6:
                raise LexiconError(
                    f"{tsv_path.name}:{lineno}: PosScore+NegScore = "
                    f"{pos_score + neg_score} exceeds 1")
            if sid not in lexicon.synsets:
                skipped += 1
                continue
            obj = max(0.0, 1.0 - pos_score - neg_score)
            sentiment[sid] = SentimentScore(pos_score, neg_score, obj)
    if skipped:
        log.warning("SentiWordNet: skipped %d lines with unknown synset ids",
                    skipped)
    return lexicon.with_sentiment(sentiment, skipped)
