"""Noun phrase and relation phrase detection.

Both detectors are grammar applications over the token annotations. Relation
matches that overlap a QuestionWord are discarded ("có" inside "có phải" is
part of the question marker, not a relation), and noun phrases consumed inside
a verb+NP+preposition or have+NP+is relation ("sinh viên" in "là sinh viên
của") are flagged embedded=true so tuple building skips them as terms.
"""

from __future__ import annotations

from functools import lru_cache

from .annotations import AnnotationSet
from .config import default_resource
from .rules import load_rules, render_features, scan_rules

EMBEDDING_PATTERNS = ("1", "4")


@lru_cache(maxsize=None)
def _default_rules(name):
    return tuple(load_rules(default_resource(name)))


def default_noun_phrase_rules():
    return _default_rules("noun_phrases.rules")


def default_relation_rules():
    return _default_rules("relations.rules")


def detect_noun_phrases(aset: AnnotationSet, rules=None) -> AnnotationSet:
    """Add one NounPhrase annotation per grammar match."""
    rules = rules if rules is not None else default_noun_phrase_rules()
    specs = []
    for rule, match in scan_rules(rules, aset):
        specs.append((rule.emit_kind, match.start, match.end,
                      render_features(rule, match, aset.text)))
    return aset.with_new(specs)


def detect_relations(aset: AnnotationSet, rules=None) -> AnnotationSet:
    """Add RelationPhrase annotations; requires NounPhrase annotations.

    Matches overlapping a QuestionWord are discarded. Noun phrases consumed
    by an embedding pattern get embedded=true.
    """
    rules = rules if rules is not None else default_relation_rules()
    qwords = aset.of_kind("QuestionWord")

    def veto(match):
        return any(q.start < match.end and match.start < q.end for q in qwords)

    specs = []
    embedded = {}
    for rule, match in scan_rules(rules, aset, veto=veto):
        features = render_features(rule, match, aset.text)
        specs.append((rule.emit_kind, match.start, match.end, features))
        if features.get("pattern") in EMBEDDING_PATTERNS:
            for ann in match.captured.get("np", ()):
                if ann.kind == "NounPhrase":
                    embedded[ann.id] = {"embedded": "true"}
    out = aset.with_new(specs)
    if embedded:
        out = out.with_features(embedded)
    return out


def term_phrases(aset: AnnotationSet) -> list:
    """Non-embedded noun phrases, in text order."""
    return [a for a in aset.of_kind("NounPhrase")
            if a.features.get("embedded") != "true"]
