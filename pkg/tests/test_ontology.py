import json
import random

import pytest

from vnqa.config import default_resource
from vnqa.ontology import (
    Assertion,
    Concept,
    Instance,
    Ontology,
    OntologyError,
    Property,
    load_ontology,
)


@pytest.fixture(scope="module")
def ont():
    return load_ontology(default_resource("ontology.json"))


def test_fixture_counts(ont):
    assert ont.summary() == {
        "concepts": 15, "properties": 17, "instances": 78,
        "assertions": len(ont.assertions),
    }
    assert len(ont.instances_of("sinh_viên")) == 15
    assert len(ont.instances_of("giảng_viên")) == 4


def test_person_union(ont):
    assert len(ont.instances_of("person")) == 19
    assert set(ont.instances_of("person")) == \
        set(ont.instances_of("giảng_viên")) | set(ont.instances_of("sinh_viên"))


def test_find_element_by_name(ont):
    assert ont.find_element_by_name("sinh_viên").kind == "concept"
    k50 = ont.find_element_by_name("k50_khoa_học_máy_tính")
    assert (k50.kind, ont.concept_of(k50)) == ("instance", "lớp")
    assert ont.find_element_by_name("zzz") is None


def test_alias_lookup(ont):
    assert ont.find_element_by_name("người").id == "person"
    assert ont.find_element_by_name("môn học").id == "môn"


def test_instances_of_unknown_concept(ont):
    with pytest.raises(OntologyError):
        ont.instances_of("nope")


def test_instances_of_monotone_under_hierarchy(ont):
    for c in ont.concepts.values():
        if c.parent != "thing":
            assert set(ont.instances_of(c.parent)) >= set(ont.instances_of(c.id))


def test_relations_between_student_class(ont):
    pool = ont.relations_between(ont.find_element_by_name("sinh_viên"),
                                 ont.find_element_by_name("lớp"))
    assert sorted(pool) == [("có_lớp_là", "forward"),
                            ("có_sinh_viên_là", "inverse"),
                            ("học", "forward")]


def test_relations_between_student_hometown(ont):
    pool = ont.relations_between(ont.find_element_by_name("sinh_viên"),
                                 ont.find_element_by_name("quê"))
    assert sorted(pool) == [("có_quê_ở", "forward"), ("là_quê_của", "inverse")]


def test_relations_between_empty(ont):
    pool = ont.relations_between(ont.find_element_by_name("mã"),
                                 ont.find_element_by_name("mã"))
    assert pool == []


def test_pinned_study_assertions(ont):
    subjects = [a.subject for a in ont.subjects_of("học", "k50_khoa_học_máy_tính")]
    assert subjects == [
        "nguyễn_văn_huy", "nguyễn_quốc_đạt", "nguyễn_quốc_đại", "nguyễn_bá_đạt",
        "nguyễn_trần_ngọc_linh", "trần_bình_giang", "phạm_đức_đăng",
    ]
    hanoi = {a.subject for a in ont.subjects_of("có_quê_ở", "hà_nội")}
    assert hanoi == {"nguyễn_quốc_đạt", "nguyễn_quốc_đại", "nguyễn_bá_đạt"}


def test_index_matches_linear_scan_on_fixture(ont):
    for a in ont.assertions:
        assert a in ont.objects_of(a.subject, a.property)
        assert a in ont.subjects_of(a.property, a.object)
    for (s, p), hits in list(ont._sp_objects.items())[:50]:
        scan = [a for a in ont.assertions if a.subject == s and a.property == p]
        assert hits == scan


def test_index_matches_linear_scan_on_random_ontologies():
    rng = random.Random(99)
    for _ in range(25):
        ont = _random_ontology(rng)
        for c in ont.concepts:
            member = set(ont.descendants_or_self(c))
            scan = [i.id for i in ont.instances.values() if i.concept in member]
            assert ont.instances_of(c) == scan
        for a in ont.assertions:
            assert a in ont.objects_of(a.subject, a.property)
            assert a in ont.subjects_of(a.property, a.object)


def _random_ontology(rng):
    concepts = [Concept("c0", "thing")]
    for i in range(1, rng.randint(2, 6)):
        parent = rng.choice(concepts).id
        concepts.append(Concept(f"c{i}", parent))
    instances = [Instance(f"i{j}", rng.choice(concepts).id)
                 for j in range(rng.randint(1, 12))]
    properties = [Property("p0", rng.choice(concepts).id, rng.choice(concepts).id)]
    skeleton = Ontology(concepts, properties, instances, [])
    p = properties[0]
    subs = [i for i in instances if skeleton.is_descendant_or_self(i.concept, p.domain)]
    objs = [i for i in instances if skeleton.is_descendant_or_self(i.concept, p.range)]
    assertions = []
    if subs and objs:
        for _ in range(rng.randint(0, 10)):
            assertions.append(Assertion(rng.choice(subs).id, "p0", rng.choice(objs).id))
    return Ontology(concepts, properties, instances, assertions)


def test_validation_errors(tmp_path):
    def write(doc):
        path = tmp_path / "ont.json"
        path.write_text(json.dumps(doc, ensure_ascii=False), encoding="utf-8")
        return path

    with pytest.raises(OntologyError, match="root missing"):
        load_ontology(write({"concepts": [], "properties": [], "instances": [],
                             "assertions": []}))

    base = {
        "concepts": [{"id": "a", "parent": None}, {"id": "b", "parent": None}],
        "properties": [{"id": "p", "domain": "a", "range": "b"}],
        "instances": [{"id": "x", "concept": "a"}, {"id": "y", "concept": "b"}],
        "assertions": [],
    }

    bad = json.loads(json.dumps(base))
    bad["instances"][0]["concept"] = "ghost"
    with pytest.raises(OntologyError, match="ghost"):
        load_ontology(write(bad))

    bad = json.loads(json.dumps(base))
    bad["assertions"] = [{"s": "y", "p": "p", "o": "y"}]
    with pytest.raises(OntologyError, match="domain"):
        load_ontology(write(bad))

    bad = json.loads(json.dumps(base))
    bad["assertions"] = [{"s": "x", "p": "p", "o": "x"}]
    with pytest.raises(OntologyError, match="range"):
        load_ontology(write(bad))

    bad = json.loads(json.dumps(base))
    bad["concepts"][1]["parent"] = "b"
    with pytest.raises(OntologyError, match="cycle"):
        load_ontology(write(bad))

    bad = json.loads(json.dumps(base))
    bad["properties"][0]["inverse"] = "p"
    ont = load_ontology(write(bad))  # self-inverse is symmetric
    assert ont.properties["p"].inverse == "p"


def test_fixture_loads_without_validation_errors():
    load_ontology(default_resource("ontology.json"))
