"""Read-only ontology: concept tree, properties, instances, assertions.

The ontology file is UTF-8 JSON with top-level keys `concepts`
[{id,parent,aliases}], `properties` [{id,domain,range,inverse,aliases}],
`instances` [{id,concept,aliases}] and `assertions` [{s,p,o,literal?}].
A `notes` key is ignored. Concepts with parent null hang off the implicit
root "thing". Everything is validated and indexed at load time; queries are
read-only and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

ROOT = "thing"


@dataclass(frozen=True)
class Concept:
    id: str
    parent: str
    aliases: tuple = ()


@dataclass(frozen=True)
class Property:
    id: str
    domain: str
    range: str
    inverse: str | None = None
    aliases: tuple = ()


@dataclass(frozen=True)
class Instance:
    id: str
    concept: str
    aliases: tuple = ()


@dataclass(frozen=True)
class Assertion:
    subject: str
    property: str
    object: str
    literal: bool = False


@dataclass(frozen=True)
class Element:
    """A named ontology element with its kind tag."""

    kind: str  # concept | property | instance
    id: str

    def to_dict(self):
        return {"kind": self.kind, "id": self.id}


class OntologyError(ValueError):
    pass


class Ontology:
    def __init__(self, concepts, properties, instances, assertions):
        self.concepts = {c.id: c for c in concepts}
        self.properties = {p.id: p for p in properties}
        self.instances = {i.id: i for i in instances}
        self.assertions = tuple(assertions)
        self._validate()
        self._index()

    def _validate(self):
        if not self.concepts:
            raise OntologyError("concept tree root missing: no concepts defined")
        for c in self.concepts.values():
            if c.parent != ROOT and c.parent not in self.concepts:
                raise OntologyError(f"concept {c.id!r} has unknown parent {c.parent!r}")
        for c in self.concepts.values():
            seen = {c.id}
            cur = c
            while cur.parent != ROOT:
                if cur.parent in seen:
                    raise OntologyError(f"cycle in concept tree at {cur.parent!r}")
                seen.add(cur.parent)
                cur = self.concepts[cur.parent]
        for p in self.properties.values():
            for end, name in ((p.domain, "domain"), (p.range, "range")):
                if end not in self.concepts:
                    raise OntologyError(f"property {p.id!r} {name} {end!r} is not a concept")
            if p.inverse is not None:
                inv = self.properties.get(p.inverse)
                if inv is None:
                    raise OntologyError(f"property {p.id!r} inverse {p.inverse!r} missing")
                if inv.inverse != p.id:
                    raise OntologyError(
                        f"inverse of {p.id!r} is not symmetric ({p.inverse!r})")
        for i in self.instances.values():
            if i.concept not in self.concepts:
                raise OntologyError(f"instance {i.id!r} has unknown concept {i.concept!r}")
        for a in self.assertions:
            if a.subject not in self.instances:
                raise OntologyError(f"assertion subject {a.subject!r} is not an instance")
            if a.property not in self.properties:
                raise OntologyError(f"assertion property {a.property!r} unknown")
            prop = self.properties[a.property]
            if not self.is_descendant_or_self(self.instances[a.subject].concept, prop.domain):
                raise OntologyError(
                    f"assertion ({a.subject}, {a.property}, {a.object}): subject "
                    f"outside domain {prop.domain!r}")
            if not a.literal:
                if a.object not in self.instances:
                    raise OntologyError(
                        f"assertion object {a.object!r} is not an instance")
                if not self.is_descendant_or_self(self.instances[a.object].concept, prop.range):
                    raise OntologyError(
                        f"assertion ({a.subject}, {a.property}, {a.object}): object "
                        f"outside range {prop.range!r}")

    def _index(self):
        self._by_name = {}
        for kind, pool in (("concept", self.concepts),
                           ("property", self.properties),
                           ("instance", self.instances)):
            for item in pool.values():
                self._by_name.setdefault(item.id, Element(kind, item.id))
                for alias in item.aliases:
                    self._by_name.setdefault(alias, Element(kind, item.id))
        self._children = {}
        for c in self.concepts.values():
            if c.parent != ROOT:
                self._children.setdefault(c.parent, []).append(c.id)
        self._direct_instances = {}
        for i in self.instances.values():
            self._direct_instances.setdefault(i.concept, []).append(i.id)
        self._sp_objects = {}
        self._po_subjects = {}
        for a in self.assertions:
            self._sp_objects.setdefault((a.subject, a.property), []).append(a)
            self._po_subjects.setdefault((a.property, a.object), []).append(a)

    # -- queries ---------------------------------------------------------

    def find_element_by_name(self, name: str):
        """Exact lookup over ids and aliases across all element kinds."""
        return self._by_name.get(name)

    def element_names(self):
        return self._by_name.keys()

    def descendants_or_self(self, concept_id: str):
        out = [concept_id]
        stack = list(self._children.get(concept_id, ()))
        while stack:
            c = stack.pop()
            out.append(c)
            stack.extend(self._children.get(c, ()))
        return out

    def is_descendant_or_self(self, concept_id: str, ancestor_id: str) -> bool:
        if ancestor_id == ROOT:
            return True
        cur = concept_id
        while True:
            if cur == ancestor_id:
                return True
            if cur == ROOT:
                return False
            cur = self.concepts[cur].parent

    def compatible(self, concept_id: str, other_id: str) -> bool:
        """Concepts on the same hierarchy path (either direction)."""
        return self.is_descendant_or_self(concept_id, other_id) \
            or self.is_descendant_or_self(other_id, concept_id)

    def instances_of(self, concept_id: str) -> list:
        """Instances of the concept and all its descendants, in file order."""
        if concept_id != ROOT and concept_id not in self.concepts:
            raise OntologyError(f"unknown concept {concept_id!r}")
        if concept_id == ROOT:
            return list(self.instances)
        member = set(self.descendants_or_self(concept_id))
        return [i.id for i in self.instances.values() if i.concept in member]

    def concept_of(self, element: Element) -> str:
        if element.kind == "concept":
            return element.id
        if element.kind == "instance":
            return self.instances[element.id].concept
        raise OntologyError(f"element {element.id!r} has no concept")

    def relations_between(self, a: Element, b: Element) -> list:
        """Properties whose (domain, range) is compatible with the pair, in
        either orientation; returns (property id, orientation) pairs."""
        ca, cb = self.concept_of(a), self.concept_of(b)
        out = []
        for p in self.properties.values():
            if self.compatible(ca, p.domain) and self.compatible(cb, p.range):
                out.append((p.id, "forward"))
            if self.compatible(ca, p.range) and self.compatible(cb, p.domain):
                out.append((p.id, "inverse"))
        return out

    def objects_of(self, subject: str, prop: str) -> list:
        return list(self._sp_objects.get((subject, prop), ()))

    def subjects_of(self, prop: str, obj: str) -> list:
        return list(self._po_subjects.get((prop, obj), ()))

    def assertions_about(self, instance_id: str) -> list:
        return [a for a in self.assertions
                if a.subject == instance_id
                or (not a.literal and a.object == instance_id)]

    def concept_tree(self):
        def node(cid):
            return {"id": cid,
                    "instances": len(self._direct_instances.get(cid, ())),
                    "children": [node(k) for k in sorted(self._children.get(cid, ()))]}
        roots = sorted(c.id for c in self.concepts.values() if c.parent == ROOT)
        return {"id": ROOT, "instances": 0, "children": [node(c) for c in roots]}

    def summary(self):
        return {
            "concepts": len(self.concepts),
            "properties": len(self.properties),
            "instances": len(self.instances),
            "assertions": len(self.assertions),
        }


def load_ontology(path) -> Ontology:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        concepts = [Concept(c["id"], c.get("parent") or ROOT,
                            tuple(c.get("aliases", ())))
                    for c in data.get("concepts", ())]
        properties = [Property(p["id"], p["domain"], p["range"], p.get("inverse"),
                               tuple(p.get("aliases", ())))
                      for p in data.get("properties", ())]
        instances = [Instance(i["id"], i["concept"], tuple(i.get("aliases", ())))
                     for i in data.get("instances", ())]
        assertions = [Assertion(a["s"], a["p"], a["o"], bool(a.get("literal")))
                      for a in data.get("assertions", ())]
    except (KeyError, TypeError) as err:
        raise OntologyError(f"malformed ontology file {path}: {err}") from None
    return Ontology(concepts, properties, instances, assertions)
