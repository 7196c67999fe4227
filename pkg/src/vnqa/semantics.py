"""Question classification and the intermediate query-tuple representation.

A question becomes a question structure plus one or more query-tuples
(structure, class, term1, relation, term2, term3). Simple questions produce a
single Normal tuple; coordinated questions ("... và ...", "... hoặc ...")
produce an And/Or structure whose tuples share term1. Definition questions
("X là gì", "ai là X") and relation-less two-term questions (UnknRel) are the
other shapes processed downstream; the remaining structure names are
recognized but not processed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .annotations import AnnotationSet
from .preprocessing import fold
from .syntax import term_phrases


class QuestionClass(Enum):
    HOW_WHY = "HowWhy"
    YES_NO = "YesNo"
    WHAT = "What"
    WHEN = "When"
    WHERE = "Where"
    WHO = "Who"
    MANY = "Many"
    MANY_CLASS = "ManyClass"
    LIST = "List"
    ENTITY = "Entity"


class QuestionStructure(Enum):
    NORMAL = "Normal"
    UNKN_TERM = "UnknTerm"
    UNKN_REL = "UnknRel"
    DEFINITION = "Definition"
    COMPARE = "Compare"
    THREE_TERM = "ThreeTerm"
    CLAUSE = "Clause"
    COMBINE = "Combine"
    AND = "And"
    OR = "Or"
    AFFIRM_NEG_3TERM = "AffirmNeg_3Term"
    AFFIRM_NEG_2TRIPLE = "AffirmNeg_2Triple"
    AFFIRM_NEG = "AffirmNeg"


PROCESSABLE_STRUCTURES = frozenset({
    QuestionStructure.NORMAL,
    QuestionStructure.AND,
    QuestionStructure.OR,
    QuestionStructure.DEFINITION,
    QuestionStructure.UNKN_REL,
})

AND_TOKENS = frozenset({"và", "mà"})
OR_TOKENS = frozenset({"hoặc", "hay"})


@dataclass(frozen=True)
class QueryTuple:
    structure: QuestionStructure
    qclass: QuestionClass
    term1: str
    relation: str | None = None
    term2: str | None = None
    term3: str | None = None

    def __post_init__(self):
        if not self.term1:
            raise ValueError("query tuple requires term1")
        if self.structure is QuestionStructure.NORMAL and self.term3 is not None:
            raise ValueError("Normal tuples carry no term3")

    def to_dict(self):
        return {
            "structure": self.structure.value,
            "qclass": self.qclass.value,
            "term1": self.term1,
            "relation": self.relation,
            "term2": self.term2,
            "term3": self.term3,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            QuestionStructure(d["structure"]),
            QuestionClass(d["qclass"]),
            d["term1"],
            d.get("relation"),
            d.get("term2"),
            d.get("term3"),
        )


@dataclass(frozen=True)
class IntermediateRepresentation:
    structure: QuestionStructure
    tuples: tuple
    original_text: str = ""

    def __post_init__(self):
        if not self.tuples:
            raise ValueError("intermediate representation needs at least one tuple")
        if self.structure is QuestionStructure.NORMAL and len(self.tuples) != 1:
            raise ValueError("Normal structure carries exactly one tuple")
        if self.structure in (QuestionStructure.AND, QuestionStructure.OR) \
                and len(self.tuples) < 2:
            raise ValueError("And/Or structures need at least two tuples")

    def to_dict(self):
        return {
            "structure": self.structure.value,
            "tuples": [t.to_dict() for t in self.tuples],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_dict(cls, d, original_text=""):
        return cls(
            QuestionStructure(d["structure"]),
            tuple(QueryTuple.from_dict(t) for t in d["tuples"]),
            original_text,
        )


class UnsupportedStructureError(ValueError):
    """The annotations match none of the processable question shapes."""

    def __init__(self, reason, aset: AnnotationSet | None = None):
        self.reason = reason
        self.annotations = [] if aset is None else [
            (a.kind, aset.covered_text(a)) for a in aset
        ]
        super().__init__(reason)


@dataclass(frozen=True)
class ClassCandidates:
    classes: frozenset
    definition_possible: bool = False


_QCAT_CLASSES = {
    "Who": {QuestionClass.WHO},
    "What": {QuestionClass.WHAT},
    "When": {QuestionClass.WHEN},
    "Where": {QuestionClass.WHERE},
    "HowWhy": {QuestionClass.HOW_WHY},
    "YesNo": {QuestionClass.YES_NO},
    "Many": {QuestionClass.MANY, QuestionClass.MANY_CLASS},
    "EntityMark": {QuestionClass.ENTITY},
    "ListMark": {QuestionClass.LIST},
}


def classify_question(aset: AnnotationSet) -> ClassCandidates:
    """Map question-word categories to candidate classes; no question word
    at all means an Entity question. Ambiguity (Many vs ManyClass, What vs
    definition) is resolved during tuple building."""
    classes = set()
    definition = False
    for qw in aset.of_kind("QuestionWord"):
        qcat = qw.features.get("qcat")
        classes |= _QCAT_CLASSES.get(qcat, set())
        if qcat == "What":
            definition = True
    if not classes:
        classes = {QuestionClass.ENTITY}
    return ClassCandidates(frozenset(classes), definition)


_PRECEDENCE = [
    QuestionClass.LIST,
    QuestionClass.YES_NO,
    QuestionClass.HOW_WHY,
    QuestionClass.MANY,
    QuestionClass.WHO,
    QuestionClass.WHAT,
    QuestionClass.WHEN,
    QuestionClass.WHERE,
    QuestionClass.ENTITY,
]


def _whitespace_between(text, a_end, b_start):
    return a_end <= b_start and text[a_end:b_start].strip() == ""


def _attached_noun_phrase(aset, qw, terms):
    """The noun phrase directly next to a question word, if any."""
    for t in terms:
        if _whitespace_between(aset.text, qw.end, t.start) \
                or _whitespace_between(aset.text, t.end, qw.start):
            return t
    return None


def _relations_between(rels, a, b):
    lo = min(a.end, b.end)
    hi = max(a.start, b.start)
    return [r for r in rels if lo <= r.start and r.end <= hi]


def _conjunctions(aset):
    out = []
    phrases = aset.of_kind("NounPhrase") + aset.of_kind("RelationPhrase")
    for tok in aset.of_kind("TokenVn"):
        word = fold(aset.covered_text(tok))
        if word in AND_TOKENS or word in OR_TOKENS:
            if not any(p.covers(tok) for p in phrases):
                out.append((tok, QuestionStructure.AND if word in AND_TOKENS
                            else QuestionStructure.OR))
    return out


def build_intermediate_representation(
    aset: AnnotationSet,
    candidates: ClassCandidates | None = None,
    term1_defaults=None,
    term2_defaults=None,
) -> IntermediateRepresentation:
    """Assemble query-tuples from noun phrases, relations and question words.

    term1_defaults maps a class name to the concept phrase standing in for an
    implicit subject ("ai là X của Y" asks about a person); term2_defaults
    does the same for an implicit object of What/Where questions.
    """
    if candidates is None:
        candidates = classify_question(aset)
    term1_defaults = term1_defaults or {}
    term2_defaults = term2_defaults or {}

    terms = term_phrases(aset)
    rels = aset.of_kind("RelationPhrase")
    qwords = aset.of_kind("QuestionWord")
    conjs = _conjunctions(aset)

    qclass = next((c for c in _PRECEDENCE if c in candidates.classes),
                  QuestionClass.ENTITY)

    def term_text(np):
        return np.features.get("term") or aset.covered_text(np)

    if not terms:
        raise UnsupportedStructureError("no term candidates found", aset)

    # Definition: "X là gì?" / "ai là X?" with nothing but the copula
    if qclass in (QuestionClass.WHAT, QuestionClass.WHO) and len(terms) == 1 \
            and len(conjs) == 0 and len(rels) <= 1 \
            and all(fold(aset.covered_text(r)) == "là" for r in rels) \
            and (candidates.definition_possible or qclass is QuestionClass.WHO):
        tup = QueryTuple(QuestionStructure.DEFINITION, qclass, term_text(terms[0]))
        return IntermediateRepresentation(QuestionStructure.DEFINITION, (tup,), aset.text)

    # Subject selection: a Many/Entity question word attaches to the noun
    # phrase whose instances are being asked for.
    attached = None
    for qw in qwords:
        if qw.features.get("qcat") in ("Many", "EntityMark", "ListMark"):
            attached = _attached_noun_phrase(aset, qw, terms)
            if attached is not None:
                break
    subject = attached if attached is not None else terms[0]

    if qclass is QuestionClass.MANY:
        qclass = QuestionClass.MANY_CLASS if attached is not None else QuestionClass.MANY

    objects = [t for t in terms if t.id != subject.id]

    # Coordination: subject + (relation, object) groups joined by conjunctions
    if conjs:
        kinds = {kind for _, kind in conjs}
        if len(kinds) != 1:
            raise UnsupportedStructureError("mixed and/or coordination", aset)
        structure = kinds.pop()
        group_rels = [r for r in rels if r.start >= subject.end]
        if len(objects) < 2 or len(group_rels) != len(objects):
            raise UnsupportedStructureError(
                "coordination needs one relation per object", aset)
        tuples = []
        for rel, obj in zip(group_rels, objects):
            if rel.start >= obj.start:
                raise UnsupportedStructureError(
                    "relation does not precede its object", aset)
            tuples.append(QueryTuple(QuestionStructure.NORMAL, qclass,
                                     term_text(subject),
                                     aset.covered_text(rel), term_text(obj)))
        if len({(t.relation, t.term2) for t in tuples}) != len(tuples):
            raise UnsupportedStructureError("duplicate coordinated groups", aset)
        return IntermediateRepresentation(structure, tuple(tuples), aset.text)

    if len(terms) > 2:
        raise UnsupportedStructureError(
            f"{len(terms)} terms without coordination", aset)

    if len(terms) == 2:
        between = _relations_between(rels, subject, objects[0])
        if not between:
            tup = QueryTuple(QuestionStructure.UNKN_REL, qclass,
                             term_text(subject), None, term_text(objects[0]))
            return IntermediateRepresentation(QuestionStructure.UNKN_REL, (tup,), aset.text)
        tup = QueryTuple(QuestionStructure.NORMAL, qclass, term_text(subject),
                         aset.covered_text(between[0]), term_text(objects[0]))
        return IntermediateRepresentation(QuestionStructure.NORMAL, (tup,), aset.text)

    # Single term: "X <rel> <qw>?" asks about X with an implicit object;
    # "<qw> <rel> X?" asks about the class default subject ("ai là X của Y").
    rel_after = next((r for r in rels if r.start >= subject.end), None)
    if rel_after is not None:
        tup = QueryTuple(QuestionStructure.NORMAL, qclass, term_text(subject),
                         aset.covered_text(rel_after),
                         term2_defaults.get(qclass.value))
        return IntermediateRepresentation(QuestionStructure.NORMAL, (tup,), aset.text)
    for qw in qwords:
        rel_mid = next((r for r in rels
                        if qw.end <= r.start and r.end <= subject.start), None)
        if rel_mid is not None and qclass.value in term1_defaults:
            tup = QueryTuple(QuestionStructure.NORMAL, qclass,
                             term1_defaults[qclass.value],
                             aset.covered_text(rel_mid), term_text(subject))
            return IntermediateRepresentation(QuestionStructure.NORMAL, (tup,), aset.text)

    # Bare concept question: "có bao nhiêu môn?", "danh sách các giảng viên?"
    tup = QueryTuple(QuestionStructure.NORMAL, qclass, term_text(subject))
    return IntermediateRepresentation(QuestionStructure.NORMAL, (tup,), aset.text)
