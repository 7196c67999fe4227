"""Vietnamese word segmentation and question-word marking.

Vietnamese words can span several whitespace-separated syllables, so the
segmenter runs greedy longest-match against a lexicon of surfaces. Matching
happens on an NFC-lowercased working copy; the emitted TokenVn annotations
index the original string. Question phrases ("phải không", "bao nhiêu", ...)
are then merged into single QuestionWord annotations carrying the semantic
category used later by the question classifier.
"""

from __future__ import annotations

import unicodedata

from .annotations import AnnotationSet

POS_TAGS = frozenset(
    ["Pn", "Nu", "Nn", "Nt", "Nc", "Ng", "Na", "Np", "Aa", "An", "Vb", "Pp", "Other"]
)

QUESTION_CATEGORIES = frozenset(
    ["HowWhy", "YesNo", "What", "When", "Where", "Many", "Who", "EntityMark", "ListMark"]
)


def nfc(s: str) -> str:
    return unicodedata.normalize("NFC", s)


def fold(s: str) -> str:
    """Lowercase for matching, never stripping diacritics."""
    return nfc(s).lower()


class LexiconError(ValueError):
    pass


class Lexicon:
    """Surface -> POS category map with longest-prefix lookup by syllable count."""

    def __init__(self, entries=()):
        self._entries = {}
        self.max_syllables = 1
        for surface, category in entries:
            self.add(surface, category)

    def add(self, surface: str, category: str):
        surface = fold(surface).strip()
        if not surface:
            raise LexiconError("empty lexicon surface")
        if category not in POS_TAGS:
            raise LexiconError(f"unknown category tag {category!r} for {surface!r}")
        surface = " ".join(surface.split())
        self._entries[surface] = category
        self.max_syllables = max(self.max_syllables, surface.count(" ") + 1)

    def lookup(self, surface: str):
        return self._entries.get(surface)

    def __len__(self):
        return len(self._entries)

    def __contains__(self, surface):
        return fold(surface) in self._entries


def load_lexicon(path) -> Lexicon:
    """Load a UTF-8 TSV lexicon: surface<TAB>category, '#' comments allowed.

    Duplicate surfaces keep the last entry. Unknown tags fail naming the line.
    """
    lexicon = Lexicon()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise LexiconError(f"{path}:{lineno}: expected surface<TAB>category")
            try:
                lexicon.add(parts[0], parts[1])
            except LexiconError as err:
                raise LexiconError(f"{path}:{lineno}: {err}") from None
    return lexicon


def _syllables(text: str):
    """(start, end) spans of whitespace-separated units."""
    spans = []
    start = None
    for i, ch in enumerate(text):
        if ch.isspace():
            if start is not None:
                spans.append((start, i))
                start = None
        elif start is None:
            start = i
    if start is not None:
        spans.append((start, len(text)))
    return spans


def _capitalized(text: str, span) -> bool:
    for ch in text[span[0]:span[1]]:
        if ch.isalpha():
            return ch.isupper()
    return False


def segment(text: str, lexicon: Lexicon) -> AnnotationSet:
    """Tokenize into TokenVn annotations tiling the non-whitespace text.

    Greedy longest match left-to-right against the lexicon; unmatched
    syllables become category Other, except runs of capitalized syllables,
    which merge into a single proper-noun (Np) token.
    """
    text = nfc(text)
    folded = fold(text)
    spans = _syllables(folded)
    aset = AnnotationSet(text)
    specs = []
    i = 0
    while i < len(spans):
        matched = 0
        category = None
        limit = min(lexicon.max_syllables, len(spans) - i)
        for k in range(limit, 0, -1):
            surface = " ".join(folded[s:e] for s, e in spans[i:i + k])
            cat = lexicon.lookup(surface)
            if cat is not None:
                matched, category = k, cat
                break
        if matched:
            start, end = spans[i][0], spans[i + matched - 1][1]
            i += matched
        elif _capitalized(text, spans[i]):
            j = i
            while j + 1 < len(spans) and _capitalized(text, spans[j + 1]):
                j += 1
            start, end = spans[i][0], spans[j][1]
            category = "Np"
            i = j + 1
        else:
            start, end = spans[i]
            category = "Other"
            i += 1
        specs.append(("TokenVn", start, end,
                      {"category": category, "string": text[start:end]}))
    return aset.with_new(specs)


class PhraseTable:
    """Question phrase -> question category, matched over consecutive tokens."""

    def __init__(self, entries=()):
        self._entries = {}
        self.max_tokens = 1
        for phrase, qcat in entries:
            self.add(phrase, qcat)

    def add(self, phrase: str, qcat: str):
        phrase = " ".join(fold(phrase).split())
        if qcat not in QUESTION_CATEGORIES:
            raise LexiconError(f"unknown question category {qcat!r} for {phrase!r}")
        self._entries[phrase] = qcat
        self.max_tokens = max(self.max_tokens, phrase.count(" ") + 1)

    def lookup(self, phrase: str):
        return self._entries.get(phrase)

    def __len__(self):
        return len(self._entries)


def load_phrase_table(path) -> PhraseTable:
    """Load a UTF-8 TSV phrase table: phrase<TAB>category."""
    table = PhraseTable()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise LexiconError(f"{path}:{lineno}: expected phrase<TAB>category")
            try:
                table.add(parts[0], parts[1])
            except LexiconError as err:
                raise LexiconError(f"{path}:{lineno}: {err}") from None
    return table


def mark_question_words(aset: AnnotationSet, table: PhraseTable) -> AnnotationSet:
    """Cover each longest phrase-table match over consecutive TokenVn with one
    QuestionWord annotation; the underlying tokens are kept."""
    tokens = aset.of_kind("TokenVn")
    folded = [fold(aset.covered_text(t)) for t in tokens]
    specs = []
    i = 0
    while i < len(tokens):
        matched = 0
        qcat = None
        limit = min(table.max_tokens, len(tokens) - i)
        for k in range(limit, 0, -1):
            phrase = " ".join(" ".join(f.split()) for f in folded[i:i + k])
            cat = table.lookup(phrase)
            if cat is not None:
                matched, qcat = k, cat
                break
        if matched:
            specs.append(("QuestionWord", tokens[i].start,
                          tokens[i + matched - 1].end, {"qcat": qcat}))
            i += matched
        else:
            i += 1
    return aset.with_new(specs)
