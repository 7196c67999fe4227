"""Typed, feature-bearing text annotations and ordered annotation sets.

Annotations are the currency between pipeline stages: every stage reads
annotations produced by earlier stages and adds new ones. An annotation
marks a half-open character interval [start, end) of the question text
with a kind (e.g. "TokenVn", "NounPhrase") and a string feature map.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Annotation:
    """A typed span over the question text."""

    id: int
    kind: str
    start: int
    end: int
    features: dict = field(default_factory=dict)

    def covers(self, other: "Annotation") -> bool:
        return self.start <= other.start and other.end <= self.end

    def overlaps(self, other: "Annotation") -> bool:
        return self.start < other.end and other.start < self.end

    def sort_key(self):
        return (self.start, -self.end, self.id)


class AnnotationSet:
    """The question text plus its annotations, ordered by (start, -end, id).

    Immutable once built: methods that "add" annotations return a new set.
    Annotation ids are assigned sequentially and are unique within a set.
    """

    def __init__(self, text: str, annotations=()):
        self.text = text
        anns = sorted(annotations, key=Annotation.sort_key)
        seen = set()
        for a in anns:
            if not (0 <= a.start < a.end <= len(text)):
                raise ValueError(
                    f"annotation {a.kind} span [{a.start},{a.end}) out of bounds "
                    f"for text of length {len(text)}"
                )
            if a.id in seen:
                raise ValueError(f"duplicate annotation id {a.id}")
            seen.add(a.id)
        self._annotations = tuple(anns)
        self._next_id = max((a.id for a in anns), default=-1) + 1

    @property
    def annotations(self) -> tuple:
        return self._annotations

    def __len__(self):
        return len(self._annotations)

    def __iter__(self):
        return iter(self._annotations)

    def of_kind(self, kind: str) -> list:
        return [a for a in self._annotations if a.kind == kind]

    def covered_text(self, ann: Annotation) -> str:
        return self.text[ann.start:ann.end]

    def next_id(self) -> int:
        return self._next_id

    def with_new(self, specs) -> "AnnotationSet":
        """Return a new set extended with (kind, start, end, features) tuples."""
        new = list(self._annotations)
        nid = self._next_id
        for kind, start, end, features in specs:
            new.append(Annotation(nid, kind, start, end, dict(features)))
            nid += 1
        return AnnotationSet(self.text, new)

    def with_features(self, updates) -> "AnnotationSet":
        """Return a new set where updates[id] is merged into that annotation's features."""
        new = []
        for a in self._annotations:
            if a.id in updates:
                feats = dict(a.features)
                feats.update(updates[a.id])
                a = Annotation(a.id, a.kind, a.start, a.end, feats)
            new.append(a)
        return AnnotationSet(self.text, new)
