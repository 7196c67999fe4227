"""Resolving query-tuples against the ontology.

Terms and relations are matched by normalized name, first exactly and then by
string distance (the better of Levenshtein ratio and Jaro-Winkler). A phrase
whose leading words name a concept is matched against that concept's
instances with the head stripped, which is how "lớp k50 khoa học máy tính"
reaches the instance named without the classifier.

When scores leave the winner in doubt the mapping suspends and hands back a
ranked option list plus a continuation token; apply_choice resumes it. All
suspended state lives in a bounded, expiring store, so restarting the process
only loses pending disambiguations.
"""

from __future__ import annotations

import secrets
import threading
import time
import unicodedata
from dataclasses import dataclass, field, replace

from .ontology import Element, Ontology
from .semantics import IntermediateRepresentation, QuestionClass, QuestionStructure


def normalize_name(raw: str) -> str:
    """NFC, lowercase, trim, internal whitespace to single underscores."""
    folded = unicodedata.normalize("NFC", raw).lower().strip()
    return "_".join(folded.split())


def levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        for j, cb in enumerate(b, 1):
            current.append(min(previous[j] + 1,
                               current[j - 1] + 1,
                               previous[j - 1] + (ca != cb)))
        previous = current
    return previous[-1]


def levenshtein_ratio(a: str, b: str) -> float:
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein(a, b) / max(len(a), len(b))


def jaro_winkler(a: str, b: str) -> float:
    """Jaro similarity with the standard Winkler prefix boost (p=0.1, prefix
    capped at 4, boost applied above 0.7)."""
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0
    window = max(max(len(a), len(b)) // 2 - 1, 0)
    a_hit = [False] * len(a)
    b_hit = [False] * len(b)
    matches = 0
    for i, ca in enumerate(a):
        for j in range(max(0, i - window), min(len(b), i + window + 1)):
            if not b_hit[j] and b[j] == ca:
                a_hit[i] = b_hit[j] = True
                matches += 1
                break
    if not matches:
        return 0.0
    transpositions = 0
    j = 0
    for i, ca in enumerate(a):
        if not a_hit[i]:
            continue
        while not b_hit[j]:
            j += 1
        if ca != b[j]:
            transpositions += 1
        j += 1
    jaro = (matches / len(a) + matches / len(b)
            + (matches - transpositions // 2) / matches) / 3.0
    if jaro <= 0.7:
        return jaro
    prefix = 0
    for ca, cb in zip(a, b):
        if ca != cb or prefix == 4:
            break
        prefix += 1
    return jaro + prefix * 0.1 * (1.0 - jaro)


def similarity(a: str, b: str) -> float:
    """Best of Levenshtein ratio and Jaro-Winkler over Unicode scalar values;
    symmetric, in [0, 1], and 1.0 exactly when the strings are equal."""
    if a == b:
        return 1.0
    return min(max(levenshtein_ratio(a, b), jaro_winkler(a, b)), 1.0)


@dataclass(frozen=True)
class Candidate:
    element: Element
    score: float

    def to_dict(self):
        return {"id": self.element.id, "kind": self.element.kind,
                "score": round(self.score, 6)}


@dataclass(frozen=True)
class OntoTuple:
    """A query-tuple with slots resolved to ontology identifiers."""

    qclass: QuestionClass
    term1: str  # concept id
    relation: str | None = None
    orientation: str = "forward"
    term2: Element | None = None
    subject: Element | None = None  # term1 as resolved, before concept lifting

    def to_dict(self):
        return {
            "qclass": self.qclass.value,
            "term1": self.term1,
            "relation": self.relation,
            "orientation": self.orientation if self.relation else None,
            "term2": self.term2.to_dict() if self.term2 else None,
        }


@dataclass(frozen=True)
class DisambiguationRequest:
    slot: str  # e.g. "tuple 1 relation 'là sinh viên của'"
    options: tuple
    token: str

    def __post_init__(self):
        if len(self.options) < 2:
            raise ValueError("a disambiguation request needs at least two options")
        scores = [o.score for o in self.options]
        if scores != sorted(scores, reverse=True):
            raise ValueError("options must be sorted by descending score")
        if any(not 0.0 <= s <= 1.0 for s in scores):
            raise ValueError("scores must lie in [0, 1]")

    def to_dict(self):
        return {"slot": self.slot,
                "options": [o.to_dict() for o in self.options],
                "token": self.token}


@dataclass(frozen=True)
class MappingOutcome:
    status: str  # resolved | needs_choice | failed
    onto_tuples: tuple = ()
    request: DisambiguationRequest | None = None
    reason: str = ""
    ir: IntermediateRepresentation | None = None

    @property
    def resolved(self):
        return self.status == "resolved"


class UnknownTokenError(KeyError):
    """The continuation token is unknown or has expired."""


class ChoiceIndexError(IndexError):
    """The chosen option index is out of range."""


@dataclass
class _Slot:
    tuple_index: int
    name: str  # term1 | term2 | relation
    raw: str
    candidates: tuple


@dataclass
class _MappingState:
    ir: IntermediateRepresentation
    fixed: dict = field(default_factory=dict)  # (tuple_index, slot) -> Candidate
    pending: _Slot | None = None


class SuspensionStore:
    """Token -> suspended mapping state, bounded and expiring."""

    def __init__(self, ttl=600.0, capacity=1024, clock=time.monotonic):
        self._ttl = ttl
        self._capacity = capacity
        self._clock = clock
        self._lock = threading.Lock()
        self._states = {}

    def put(self, state) -> str:
        token = secrets.token_hex(16)
        with self._lock:
            now = self._clock()
            for key in [k for k, (_, exp) in self._states.items() if exp <= now]:
                del self._states[key]
            while len(self._states) >= self._capacity:
                self._states.pop(next(iter(self._states)))
            self._states[token] = (state, now + self._ttl)
        return token

    def take(self, token):
        with self._lock:
            entry = self._states.pop(token, None)
            if entry is None:
                raise UnknownTokenError(f"unknown or expired token {token!r}")
            state, expires = entry
            if expires <= self._clock():
                raise UnknownTokenError(f"unknown or expired token {token!r}")
            return state

    def restore(self, token, state):
        with self._lock:
            self._states[token] = (state, self._clock() + self._ttl)


class OntologyMapper:
    """Maps intermediate representations onto one ontology."""

    def __init__(self, ontology: Ontology, threshold=0.75, margin=0.05,
                 max_options=5, suspension_ttl=600.0, capacity=1024):
        self.ontology = ontology
        self.threshold = threshold
        self.margin = margin
        self.max_options = max_options
        self.store = SuspensionStore(ttl=suspension_ttl, capacity=capacity)
        self._names = {}
        for name in ontology.element_names():
            el = ontology.find_element_by_name(name)
            self._names.setdefault(el, []).append(name)

    # -- candidate generation ---------------------------------------------

    def _rank(self, raw, elements, expect=None):
        exact = []
        fuzzy = []
        for el in elements:
            names = self._names.get(el) or [el.id]
            score = max(similarity(raw, n) for n in names)
            if any(n == raw for n in names):
                exact.append(Candidate(el, 1.0))
            elif score >= self.threshold:
                fuzzy.append(Candidate(el, score))
        pool = exact if exact else fuzzy
        return sorted(pool, key=lambda c: (-c.score,
                                           expect is not None and c.element.kind != expect,
                                           c.element.id))

    def map_term(self, raw: str, expect=None) -> list:
        """Candidates for a term phrase; empty means unmapped.

        Head-stripping: when the leading words name a concept, the remainder
        is matched against that concept's instances; otherwise (or when that
        yields nothing) the whole phrase is matched against every element.
        """
        name = normalize_name(raw)
        if not name:
            return []
        words = name.split("_")
        for k in range(len(words) - 1, 0, -1):
            prefix = "_".join(words[:k])
            el = self.ontology.find_element_by_name(prefix)
            if el is not None and el.kind == "concept":
                remainder = "_".join(words[k:])
                pool = [Element("instance", i)
                        for i in self.ontology.instances_of(el.id)]
                found = self._rank(remainder, pool, expect)
                if found:
                    return found
        elements = sorted(set(self._names), key=lambda e: e.id)
        return self._rank(name, elements, expect)

    def map_relation(self, raw, term1: Element, term2: Element) -> list:
        """Candidates for a relation, drawn only from the properties linking
        the two resolved terms. An exact name match wins outright; a pool of
        one resolves regardless of score; otherwise the whole pool is ranked."""
        pool = self.ontology.relations_between(term1, term2)
        name = normalize_name(raw) if raw else ""
        candidates = []
        for pid, orientation in pool:
            prop = self.ontology.properties[pid]
            names = [pid] + list(prop.aliases)
            score = max(similarity(name, n) for n in names) if name else 0.0
            if name and name in names:
                score = 1.0
            candidates.append((Candidate(Element("property", pid), score), orientation))
        candidates.sort(key=lambda co: (-co[0].score, co[0].element.id))
        exact = [co for co in candidates if co[0].score == 1.0]
        return exact if exact else candidates

    # -- tuple mapping ------------------------------------------------------

    def map_tuple(self, ir: IntermediateRepresentation) -> MappingOutcome:
        """Resolve every tuple of the representation, slot order term2, term1,
        relation. Ambiguity suspends the mapping behind a continuation token."""
        if ir.structure not in (QuestionStructure.NORMAL, QuestionStructure.AND,
                                QuestionStructure.OR, QuestionStructure.DEFINITION,
                                QuestionStructure.UNKN_REL):
            return MappingOutcome("failed", ir=ir,
                                  reason=f"unsupported structure {ir.structure.value}")
        return self._solve(_MappingState(ir))

    def apply_choice(self, token: str, choice_index: int) -> MappingOutcome:
        """Fix one pending option and resume the suspended mapping."""
        state = self.store.take(token)
        slot = state.pending
        options = slot.candidates[:self.max_options]
        if not 0 <= choice_index < len(options):
            self.store.restore(token, state)
            raise ChoiceIndexError(
                f"choice {choice_index} out of range 0..{len(options) - 1}")
        state.fixed[(slot.tuple_index, slot.name)] = options[choice_index]
        state.pending = None
        return self._solve(state)

    def _suspend(self, state, slot) -> MappingOutcome:
        state.pending = slot
        token = self.store.put(state)
        request = DisambiguationRequest(
            slot=f"tuple {slot.tuple_index + 1} {slot.name} {slot.raw!r}",
            options=tuple(slot.candidates[:self.max_options]),
            token=token)
        return MappingOutcome("needs_choice", request=request, ir=state.ir)

    def _solve(self, state: _MappingState) -> MappingOutcome:
        ir = state.ir
        onto_tuples = []
        for ti, tup in enumerate(ir.tuples):
            resolved = {}

            # term2 first, then term1; the relation pool needs both.
            for name in ("term2", "term1"):
                raw = getattr(tup, name)
                if name == "term2" and raw is None:
                    resolved[name] = None
                    continue
                fixed = state.fixed.get((ti, name))
                if fixed is None:
                    expect = "concept" if name == "term1" else None
                    candidates = self.map_term(raw, expect)
                    if not candidates:
                        return MappingOutcome(
                            "failed", ir=ir,
                            reason=f"tuple {ti + 1} {name} {raw!r} "
                            f"matches no ontology element")
                    if self._ambiguous(candidates):
                        return self._suspend(state, _Slot(ti, name, raw,
                                                          tuple(candidates)))
                    state.fixed[(ti, name)] = candidates[0]
                    fixed = candidates[0]
                resolved[name] = fixed.element

            subject = resolved["term1"]
            term1_concept = self.ontology.concept_of(subject)

            if tup.structure is QuestionStructure.DEFINITION or (
                    tup.relation is None and tup.term2 is None):
                onto_tuples.append(OntoTuple(tup.qclass, term1_concept,
                                             subject=subject))
                continue

            fixed = state.fixed.get((ti, "relation"))
            if fixed is None:
                pairs = self.map_relation(tup.relation, subject, resolved["term2"])
                if not pairs:
                    return MappingOutcome(
                        "failed", ir=ir,
                        reason=f"tuple {ti + 1} relation "
                        f"{tup.relation!r} has no property linking "
                        f"{subject.id!r} and {resolved['term2'].id!r}")
                if len(pairs) > 1 and pairs[0][0].score < 1.0:
                    # no exact hit in a multi-relation pool: ask the user
                    state.fixed.setdefault((ti, "_orientations"), dict(
                        (c.element.id, o) for c, o in pairs))
                    return self._suspend(state, _Slot(
                        ti, "relation", tup.relation or "",
                        tuple(c for c, _ in pairs)))
                state.fixed[(ti, "relation")] = pairs[0][0]
                state.fixed.setdefault((ti, "_orientations"),
                                       {c.element.id: o for c, o in pairs})
                fixed = pairs[0][0]
            orientations = state.fixed.get((ti, "_orientations"), {})
            orientation = orientations.get(fixed.element.id, "forward")
            onto_tuples.append(OntoTuple(tup.qclass, term1_concept,
                                         fixed.element.id, orientation,
                                         resolved["term2"], subject))
        return MappingOutcome("resolved", onto_tuples=tuple(onto_tuples), ir=ir)

    def _ambiguous(self, candidates) -> bool:
        if len(candidates) < 2:
            return False
        top, second = candidates[0].score, candidates[1].score
        return (top - second) < self.margin or top < self.threshold
