import itertools
import random
import unicodedata

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vnqa.config import default_resource
from vnqa.mapping import (
    ChoiceIndexError,
    OntologyMapper,
    SuspensionStore,
    UnknownTokenError,
    jaro_winkler,
    levenshtein,
    normalize_name,
    similarity,
)
from vnqa.ontology import load_ontology
from vnqa.semantics import (
    IntermediateRepresentation,
    QueryTuple,
    QuestionClass,
    QuestionStructure,
)


def dp_levenshtein(a, b):
    """Full-matrix reference, independent of the two-row implementation."""
    n, m = len(a), len(b)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        d[i][0] = i
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    return d[n][m]


def test_normalize_name():
    assert normalize_name("sinh viên") == "sinh_viên"
    assert normalize_name("Hà Nội") == "hà_nội"
    assert normalize_name("  lớp   k50 ") == "lớp_k50"
    assert normalize_name("quê") == unicodedata.normalize("NFC", "quê")


def test_similarity_identity_and_bounds():
    assert similarity("học", "học") == 1.0
    assert similarity("a", "") == 0.0
    assert similarity("", "") == 1.0


def test_similarity_known_values():
    # Computed with the independent full-matrix DP + reference Jaro-Winkler
    # before this module was written.
    assert similarity("lớp_k50_khoa_học_máy_tính",
                      "k50_khoa_học_máy_tính") == pytest.approx(0.840000, abs=1e-6)
    assert similarity("khoa_học_máy_tính",
                      "k50_khoa_học_máy_tính") == pytest.approx(0.836975, abs=1e-6)
    assert similarity("là_sinh_viên_của", "có_sinh_viên_là") == pytest.approx(0.806944, abs=1e-6)
    assert similarity("là_sinh_viên_của", "có_lớp_là") == pytest.approx(0.481481, abs=1e-6)
    assert similarity("là_sinh_viên_của", "học") == pytest.approx(0.465278, abs=1e-6)
    assert similarity("có", "có_lớp_là") == pytest.approx(0.792593, abs=1e-6)
    assert similarity("có", "có_sinh_viên_là") == pytest.approx(0.768889, abs=1e-6)
    assert jaro_winkler("MARTHA", "MARHTA") == pytest.approx(0.961111, abs=1e-6)


ALPHABET = "abcđêộ"


def test_levenshtein_matches_dp_oracle_exhaustive_small():
    for a_len, b_len in itertools.product(range(4), range(4)):
        for a in itertools.product(ALPHABET[:3], repeat=a_len):
            for b in itertools.product(ALPHABET[:3], repeat=b_len):
                sa, sb = "".join(a), "".join(b)
                assert levenshtein(sa, sb) == dp_levenshtein(sa, sb)


def test_levenshtein_matches_dp_oracle_random():
    rng = random.Random(1234)
    for _ in range(1000):
        a = "".join(rng.choice(ALPHABET) for _ in range(rng.randint(0, 8)))
        b = "".join(rng.choice(ALPHABET) for _ in range(rng.randint(0, 8)))
        assert levenshtein(a, b) == dp_levenshtein(a, b)


@settings(max_examples=300)
@given(st.text(ALPHABET, max_size=8), st.text(ALPHABET, max_size=8))
def test_similarity_properties(a, b):
    s = similarity(a, b)
    assert 0.0 <= s <= 1.0
    assert s == pytest.approx(similarity(b, a), abs=1e-12)
    assert (s == 1.0) == (a == b)


@pytest.fixture(scope="module")
def mapper():
    ont = load_ontology(default_resource("ontology.json"))
    return OntologyMapper(ont)


def test_map_term_exact_concept(mapper):
    got = mapper.map_term("sinh viên")
    assert [(c.element.kind, c.element.id, c.score) for c in got] == \
        [("concept", "sinh_viên", 1.0)]


def test_map_term_head_strip(mapper):
    got = mapper.map_term("lớp k50 khoa học máy tính")
    assert [(c.element.id, c.score) for c in got] == [("k50_khoa_học_máy_tính", 1.0)]


def test_map_term_exact_instance(mapper):
    got = mapper.map_term("Hà Nội")
    assert [(c.element.id, c.score) for c in got] == [("hà_nội", 1.0)]


def test_map_term_fuzzy_head_strip_single_candidate(mapper):
    got = mapper.map_term("lớp khoa học máy tính")
    assert [(c.element.id,) for c in got] == [("k50_khoa_học_máy_tính",)]
    assert got[0].score == pytest.approx(0.836975, abs=1e-6)


def test_map_term_fuzzy_tie(mapper):
    got = mapper.map_term("lớp công nghệ phần mềm")
    assert [c.element.id for c in got] == \
        ["k50_công_nghệ_phần_mềm", "k51_công_nghệ_phần_mềm"]
    assert got[0].score == pytest.approx(got[1].score, abs=1e-9)


def test_map_term_unmapped(mapper):
    assert mapper.map_term("zanzibar") == []


def test_map_relation_exact(mapper):
    ont = mapper.ontology
    got = mapper.map_relation("học", ont.find_element_by_name("sinh_viên"),
                              ont.find_element_by_name("k50_khoa_học_máy_tính"))
    assert [(c.element.id, c.score, o) for c, o in got] == [("học", 1.0, "forward")]


def test_map_relation_fuzzy_ranking(mapper):
    ont = mapper.ontology
    got = mapper.map_relation("là sinh viên của",
                              ont.find_element_by_name("person"),
                              ont.find_element_by_name("k50_khoa_học_máy_tính"))
    assert [c.element.id for c, _ in got] == ["có_sinh_viên_là", "có_lớp_là", "học"]
    assert got[0][1] == "inverse"


def normal_ir(term1, relation, term2, qclass=QuestionClass.ENTITY):
    tup = QueryTuple(QuestionStructure.NORMAL, qclass, term1, relation, term2)
    return IntermediateRepresentation(QuestionStructure.NORMAL, (tup,))


def test_map_tuple_golden_1(mapper):
    ir = normal_ir("sinh viên", "học", "lớp k50 khoa học máy tính",
                   QuestionClass.MANY_CLASS)
    out = mapper.map_tuple(ir)
    assert out.resolved
    tup = out.onto_tuples[0]
    assert (tup.term1, tup.relation, tup.orientation, tup.term2.id) == \
        ("sinh_viên", "học", "forward", "k50_khoa_học_máy_tính")


def test_map_tuple_golden_2(mapper):
    tuples = (
        QueryTuple(QuestionStructure.NORMAL, QuestionClass.ENTITY, "sinh viên",
                   "học", "lớp k50 khoa học máy tính"),
        QueryTuple(QuestionStructure.NORMAL, QuestionClass.ENTITY, "sinh viên",
                   "có quê ở", "Hà Nội"),
    )
    out = mapper.map_tuple(IntermediateRepresentation(QuestionStructure.AND, tuples))
    assert out.resolved
    assert [(t.term1, t.relation, t.term2.id) for t in out.onto_tuples] == [
        ("sinh_viên", "học", "k50_khoa_học_máy_tính"),
        ("sinh_viên", "có_quê_ở", "hà_nội"),
    ]


def test_map_tuple_needs_choice_on_relation(mapper):
    ir = normal_ir("person", "là sinh viên của", "lớp khoa học máy tính",
                   QuestionClass.WHO)
    out = mapper.map_tuple(ir)
    assert out.status == "needs_choice"
    assert "relation" in out.request.slot
    assert [o.element.id for o in out.request.options] == \
        ["có_sinh_viên_là", "có_lớp_là", "học"]


def test_apply_choice_resolves(mapper):
    ir = normal_ir("person", "là sinh viên của", "lớp khoa học máy tính",
                   QuestionClass.WHO)
    out = mapper.map_tuple(ir)
    pick = [o.element.id for o in out.request.options].index("học")
    final = mapper.apply_choice(out.request.token, pick)
    assert final.resolved
    assert final.onto_tuples[0].relation == "học"


def test_apply_choice_out_of_range_keeps_request(mapper):
    ir = normal_ir("person", "là sinh viên của", "lớp khoa học máy tính",
                   QuestionClass.WHO)
    out = mapper.map_tuple(ir)
    with pytest.raises(ChoiceIndexError):
        mapper.apply_choice(out.request.token, 99)
    final = mapper.apply_choice(out.request.token, 0)  # still alive
    assert final.resolved


def test_apply_choice_unknown_token(mapper):
    with pytest.raises(UnknownTokenError):
        mapper.apply_choice("deadbeef", 0)


def test_expired_token_is_distinct_error():
    ont = load_ontology(default_resource("ontology.json"))
    now = [0.0]
    mapper = OntologyMapper(ont, suspension_ttl=10)
    mapper.store._clock = lambda: now[0]
    ir = normal_ir("person", "là sinh viên của", "lớp khoa học máy tính",
                   QuestionClass.WHO)
    out = mapper.map_tuple(ir)
    now[0] = 11.0
    with pytest.raises(UnknownTokenError):
        mapper.apply_choice(out.request.token, 0)


def test_two_stage_disambiguation(mapper):
    ir = normal_ir("person", "là sinh viên của", "lớp công nghệ phần mềm",
                   QuestionClass.WHO)
    out = mapper.map_tuple(ir)
    assert out.status == "needs_choice"
    assert "term2" in out.request.slot
    out2 = mapper.apply_choice(out.request.token, 0)
    assert out2.status == "needs_choice"
    assert "relation" in out2.request.slot
    final = mapper.apply_choice(out2.request.token, 0)
    assert final.resolved
    assert final.onto_tuples[0].term2.id == "k50_công_nghệ_phần_mềm"


def test_map_tuple_failed_names_slot(mapper):
    out = mapper.map_tuple(normal_ir("sinh viên", "có quê ở", "Zanzibar"))
    assert out.status == "failed"
    assert "term2" in out.reason


def test_map_tuple_unkn_rel_pool(mapper):
    tup = QueryTuple(QuestionStructure.UNKN_REL, QuestionClass.ENTITY,
                     "sinh viên", None, "lớp k50 khoa học máy tính")
    out = mapper.map_tuple(
        IntermediateRepresentation(QuestionStructure.UNKN_REL, (tup,)))
    assert out.status == "needs_choice"
    assert [o.element.id for o in out.request.options] == \
        ["có_lớp_là", "có_sinh_viên_là", "học"]


def test_resolved_tuples_satisfy_domain_range_invariant(mapper):
    ont = mapper.ontology
    cases = [
        normal_ir("sinh viên", "học", "lớp k50 khoa học máy tính"),
        normal_ir("sinh viên", "có quê ở", "Hà Tây"),
        normal_ir("môn", "giảng dạy", "giảng viên nguyễn văn a"),
    ]
    for ir in cases:
        out = mapper.map_tuple(ir)
        assert out.resolved, out.reason
        for t in out.onto_tuples:
            pool = ont.relations_between(ont.find_element_by_name(t.term1), t.term2)
            assert (t.relation, t.orientation) in pool


def test_mapping_deterministic(mapper):
    ir = normal_ir("sinh viên", "học", "lớp khoa học máy tính")
    a = mapper.map_tuple(ir)
    b = mapper.map_tuple(ir)
    assert [t.to_dict() for t in a.onto_tuples] == [t.to_dict() for t in b.onto_tuples]


def test_suspension_store_capacity():
    store = SuspensionStore(ttl=100, capacity=3)
    tokens = [store.put(i) for i in range(5)]
    alive = 0
    for t in tokens:
        try:
            store.take(t)
            alive += 1
        except UnknownTokenError:
            pass
    assert alive == 3
