"""Tokenization, sentence splitting and the non-standard-word statistic.

One regex pass segments text into words, clitics, numbers, URLs,
@mentions, #hashtags and single punctuation marks. Clitics are split off
so that forms like ``'d`` become standalone tokens, which the word-level
feature pipelines count as features in their own right.
"""

import re
from dataclasses import dataclass

from .lexicon import POS_LOOKUP, Lexicon

_TOKEN_RE = re.compile(
    r"""(?P<url>https?://\S+|www\.\S+)
      | (?P<mention>@\w+)
      | (?P<hashtag>\#\w+)
      | (?P<number>\d+(?:[.,]\d+)*)
      | (?P<word>[A-Za-z]+(?:['’][A-Za-z]+)*)
      | (?P<space>\s+)
      | (?P<punct>\S)
    """,
    re.VERBOSE,
)

# Peeled off word ends repeatedly, longest-first so n't wins over 't.
_CLITICS = ("n't", "'d", "'s", "'ll", "'re", "'ve", "'m")
_TERMINALS = frozenset(".!?")


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    sentence_index: int
    is_word: bool


@dataclass(frozen=True)
class TokenizedDocument:
    tokens: tuple
    sentence_count: int

    def sentences(self):
        """Tokens grouped by sentence, in order."""
        out = []
        for tok in self.tokens:
            if tok.sentence_index == len(out):
                out.append([tok])
            else:
                out[-1].append(tok)
        return out


def _split_clitics(surface: str):
    """'I'd've' -> ['I', ''d', ''ve']; words without clitics pass through."""
    parts = []
    while True:
        lower = surface.lower().replace("’", "'")
        for clitic in _CLITICS:
            if lower.endswith(clitic) and len(lower) > len(clitic):
                cut = len(surface) - len(clitic)
                parts.append(surface[cut:])
                surface = surface[:cut]
                break
        else:
            parts.append(surface)
            return parts[::-1]


def _word_pieces(surface: str):
    for piece in _split_clitics(surface):
        normalized = piece.lower().replace("’", "'")
        yield piece, normalized, True


def tokenize(text: str) -> TokenizedDocument:
    """Deterministic segmentation with sentence indexes.

    Sentence boundaries fall after runs of '.', '!', '?' and after
    newline runs; empty text yields an empty document.
    """
    tokens = []
    sentence = 0
    term_run = False       # previous token was terminal punctuation
    newline_break = False  # a newline run separates us from the last token
    for match in _TOKEN_RE.finditer(text):
        kind = match.lastgroup
        surface = match.group()
        if kind == "space":
            if "\n" in surface:
                newline_break = True
            continue
        if kind == "word":
            pieces = _word_pieces(surface)
        else:
            pieces = [(surface, surface.lower(), False)]
        for piece, normalized, is_word in pieces:
            terminal = not is_word and piece in _TERMINALS
            if tokens and (newline_break or (term_run and not terminal)):
                sentence += 1
            newline_break = False
            term_run = terminal
            tokens.append(Token(piece, normalized, sentence, is_word))
    count = tokens[-1].sentence_index + 1 if tokens else 0
    return TokenizedDocument(tuple(tokens), count)


def is_standard(normalized: str, lexicon: Lexicon) -> bool:
    """True when morphy finds an indexed lemma under any part of speech."""
    return any(lexicon.morphy(normalized, pos) for pos in POS_LOOKUP)


def count_non_standard(doc: TokenizedDocument, lexicon: Lexicon):
    """(non-standard word tokens, total word tokens) for one document."""
    words = missing = 0
    seen = {}
    for tok in doc.tokens:
        if not tok.is_word:
            continue
        words += 1
        known = seen.get(tok.normalized)
        if known is None:
            known = is_standard(tok.normalized, lexicon)
            seen[tok.normalized] = known
        if not known:
            missing += 1
    return missing, words


def non_standard_ratio(doc: TokenizedDocument, lexicon: Lexicon) -> float:
    """Fraction of word tokens absent from WordNet under every POS."""
    missing, words = count_non_standard(doc, lexicon)
    return missing / words if words else 0.0
