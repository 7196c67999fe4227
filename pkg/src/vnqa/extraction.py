"""Answer extraction: evaluate resolved tuples, combine per structure, render.

For a tuple the answer set is every individual of term1's concept carrying
the relation to term2 (forward) or carried by it (inverse), in ontology
assertion order. And-structures intersect the per-tuple sets, Or-structures
unite them; the first set fixes the ordering. Rendering picks the payload by
question class (count, individuals, boolean, values, description) and fills
the templates file, so every front end shows identical text.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .mapping import OntoTuple
from .ontology import Ontology
from .semantics import QuestionClass, QuestionStructure


@dataclass(frozen=True)
class AnswerSet:
    individuals: tuple
    traces: tuple = ()

    def __post_init__(self):
        if len(set(self.individuals)) != len(self.individuals):
            raise ValueError("duplicate individuals in answer set")


@dataclass(frozen=True)
class Answer:
    qclass: QuestionClass
    structure: QuestionStructure
    payload_kind: str  # count | individuals | boolean | values | description | unsupported
    rendered_text: str
    count: int | None = None
    individuals: tuple = ()
    values: tuple = ()
    boolean: bool | None = None
    description: dict | None = None
    trace: tuple = ()

    def to_dict(self):
        out = {
            "qclass": self.qclass.value,
            "structure": self.structure.value,
            "payload_kind": self.payload_kind,
            "rendered_text": self.rendered_text,
            "trace": list(self.trace),
        }
        if self.payload_kind == "count":
            out["count"] = self.count
            out["individuals"] = list(self.individuals)
        elif self.payload_kind == "individuals":
            out["individuals"] = list(self.individuals)
        elif self.payload_kind == "values":
            out["values"] = list(self.values)
        elif self.payload_kind == "boolean":
            out["boolean"] = self.boolean
        elif self.payload_kind == "description":
            out["description"] = self.description
        return out


def load_templates(path) -> dict:
    templates = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if sep:
                templates[key.strip()] = value
    return templates


def display(name: str) -> str:
    return name.replace("_", " ")


def matched_assertions(ont: Ontology, t: OntoTuple) -> list:
    """Assertions realizing the tuple, in ontology order."""
    if t.relation is None:
        return []
    member1 = set(ont.instances_of(t.term1))
    prop = ont.properties[t.relation]
    hits = []
    for a in ont.assertions:
        if a.property != t.relation:
            continue
        if t.orientation == "forward":
            if a.subject not in member1:
                continue
            if not _object_matches(ont, a, t.term2, prop):
                continue
        else:
            if a.literal or a.object not in member1:
                continue
            if not _subject_matches(ont, a, t.term2):
                continue
        hits.append(a)
    return hits


def _object_matches(ont, assertion, term2, prop):
    if term2 is None:
        return True
    if term2.kind == "instance":
        return not assertion.literal and assertion.object == term2.id
    if assertion.literal:
        return ont.is_descendant_or_self(prop.range, term2.id)
    return ont.is_descendant_or_self(
        ont.instances[assertion.object].concept, term2.id)


def _subject_matches(ont, assertion, term2):
    if term2 is None:
        return True
    if term2.kind == "instance":
        return assertion.subject == term2.id
    return ont.is_descendant_or_self(
        ont.instances[assertion.subject].concept, term2.id)


def evaluate_tuple(ont: Ontology, t: OntoTuple) -> AnswerSet:
    """Individuals of term1 satisfying the tuple, in assertion order.

    A tuple with no relation ("danh sách các giảng viên") denotes the whole
    concept; its individuals come back in instance declaration order.
    """
    if t.relation is None:
        individuals = tuple(ont.instances_of(t.term1))
    else:
        seen = {}
        for a in matched_assertions(ont, t):
            key = a.subject if t.orientation == "forward" else a.object
            seen.setdefault(key, None)
        individuals = tuple(seen)
    trace = {"onto_tuple": t.to_dict(), "individuals": list(individuals)}
    return AnswerSet(individuals, (trace,))


def combine(structure: QuestionStructure, sets) -> AnswerSet:
    """Normal passes through, And intersects, Or unites; the first set's
    order is inherited."""
    sets = list(sets)
    if not sets:
        raise ValueError("combine needs at least one answer set")
    traces = tuple(tr for s in sets for tr in s.traces)
    if structure in (QuestionStructure.NORMAL, QuestionStructure.DEFINITION,
                     QuestionStructure.UNKN_REL):
        if len(sets) != 1:
            raise ValueError(f"{structure.value} combines exactly one answer set")
        return AnswerSet(sets[0].individuals, traces)
    if structure is QuestionStructure.AND:
        rest = [set(s.individuals) for s in sets[1:]]
        kept = tuple(i for i in sets[0].individuals
                     if all(i in r for r in rest))
        return AnswerSet(kept, traces)
    if structure is QuestionStructure.OR:
        seen = dict.fromkeys(sets[0].individuals)
        for s in sets[1:]:
            seen.update(dict.fromkeys(s.individuals))
        return AnswerSet(tuple(seen), traces)
    raise ValueError(f"cannot combine structure {structure.value}")


def render_answer(qclass: QuestionClass, structure: QuestionStructure,
                  result: AnswerSet, ont: Ontology, query_tuple,
                  onto_tuples=(), templates=None) -> Answer:
    """Build the payload determined by the question class and fill templates.

    query_tuple is the first original query-tuple; its surface strings feed
    the count header so the rendered text mirrors the question wording.
    """
    templates = templates or {}

    def tpl(key, **kw):
        return templates.get(key, key).format(**kw)

    base = {"qclass": qclass, "structure": structure, "trace": result.traces}

    if qclass is QuestionClass.HOW_WHY:
        return Answer(payload_kind="unsupported", rendered_text=tpl("unsupported"),
                      **base)

    if structure is QuestionStructure.DEFINITION:
        return _render_description(qclass, structure, ont, onto_tuples, tpl, result)

    if qclass in (QuestionClass.MANY, QuestionClass.MANY_CLASS):
        phrase = " ".join(p for p in (query_tuple.term1, query_tuple.relation,
                                      query_tuple.term2) if p)
        lines = [tpl("count_header", phrase=phrase, count=len(result.individuals))]
        lines += [display(i) for i in result.individuals]
        return Answer(payload_kind="count", count=len(result.individuals),
                      individuals=result.individuals,
                      rendered_text="\n".join(lines), **base)

    if qclass is QuestionClass.YES_NO:
        truth = bool(result.individuals)
        return Answer(payload_kind="boolean", boolean=truth,
                      rendered_text=tpl("boolean_true" if truth else "boolean_false"),
                      **base)

    if qclass in (QuestionClass.WHAT, QuestionClass.WHERE, QuestionClass.WHEN):
        values = _collect_values(ont, onto_tuples, result)
        text = "\n".join(display(v) for v in values) if values else tpl("no_result")
        return Answer(payload_kind="values", values=values, rendered_text=text, **base)

    # Entity, List, Who
    if result.individuals:
        text = "\n".join(display(i) for i in result.individuals)
    else:
        text = tpl("no_result")
    return Answer(payload_kind="individuals", individuals=result.individuals,
                  rendered_text=text, **base)


def _collect_values(ont, onto_tuples, result):
    """The literal or instance objects of the matched assertions, restricted
    to matched subjects that survived combining."""
    values = {}
    kept = set(result.individuals)
    for t in onto_tuples:
        for a in matched_assertions(ont, t):
            anchor = a.subject if t.orientation == "forward" else a.object
            if anchor in kept:
                values.setdefault(a.object, None)
    return tuple(values)


def _render_description(qclass, structure, ont, onto_tuples, tpl, result):
    subject = onto_tuples[0].subject if onto_tuples else None
    lines = []
    description = {}
    if subject is not None and subject.kind == "instance":
        concept = ont.instances[subject.id].concept
        description = {"id": subject.id, "kind": "instance", "concept": concept}
        lines.append(tpl("definition_instance", name=display(subject.id),
                         concept=display(concept)))
        facts = []
        for a in ont.assertions_about(subject.id):
            value = a.object if a.literal else display(a.object)
            prop = a.property
            if a.subject != subject.id:
                prop = f"{prop} (của {display(a.subject)})"
            lines.append(tpl("assertion_line", property=display(prop), value=value))
            facts.append({"property": a.property, "value": a.object,
                          "subject": a.subject, "literal": a.literal})
        description["assertions"] = facts
    elif subject is not None:
        members = ont.instances_of(subject.id)
        description = {"id": subject.id, "kind": "concept",
                       "instances": len(members)}
        lines.append(tpl("definition_concept", name=display(subject.id),
                         count=len(members)))
        lines.extend(display(m) for m in members)
    return Answer(qclass=qclass, structure=structure, payload_kind="description",
                  description=description, rendered_text="\n".join(lines),
                  trace=result.traces)
