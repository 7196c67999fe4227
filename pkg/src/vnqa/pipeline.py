"""The end-to-end question answering engine.

ask() runs preprocessing, syntactic and semantic analysis, ontology mapping
and answer extraction; the result either carries an answer, a disambiguation
request (resume with resolve_choice), or an error tagged with the failing
stage. Every result carries a trace of the pipeline's annotations and tuples.
All loaded resources are immutable, so one engine serves concurrent requests;
the only shared mutable state is the mapper's suspension store.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field

from .config import Config
from .extraction import combine, evaluate_tuple, load_templates, render_answer
from .mapping import MappingOutcome, OntologyMapper
from .ontology import load_ontology
from .preprocessing import load_lexicon, load_phrase_table, mark_question_words, segment
from .rules import load_rules
from .semantics import (
    UnsupportedStructureError,
    build_intermediate_representation,
    classify_question,
)
from .syntax import detect_noun_phrases, detect_relations

MAX_QUESTION_LENGTH = 512

ANSWERED = "answered"
NEEDS_DISAMBIGUATION = "needs_disambiguation"
ERROR = "error"

STAGE_ANALYSIS = "analysis"
STAGE_MAPPING = "mapping"
STAGE_EXTRACTION = "extraction"


class BadQuestionError(ValueError):
    pass


@dataclass
class AskResult:
    status: str
    answer: object = None
    request: object = None
    trace: dict = field(default_factory=dict)
    failure_stage: str = ""
    message: str = ""

    def to_dict(self):
        out = {"status": self.status, "trace": self.trace}
        if self.answer is not None:
            out["answer"] = self.answer.to_dict()
        if self.request is not None:
            out["disambiguation"] = self.request.to_dict()
        if self.status == ERROR:
            out["failure_stage"] = self.failure_stage
            out["message"] = self.message
        return out


def normalize_question(question: str) -> str:
    text = unicodedata.normalize("NFC", question).strip()
    return text.rstrip("?!.…;: ").strip()


class QAEngine:
    def __init__(self, config: Config | None = None):
        config = config or Config()
        self.lexicon = load_lexicon(config.get("paths.lexicon"))
        self.phrases = load_phrase_table(config.get("paths.phrases"))
        self.np_rules = tuple(load_rules(config.get("paths.noun_phrase_rules")))
        self.relation_rules = tuple(load_rules(config.get("paths.relation_rules")))
        self.ontology = load_ontology(config.get("paths.ontology"))
        self.templates = load_templates(config.get("paths.templates"))
        self.term1_defaults = config.get_pairs("analysis.term1_defaults")
        self.term2_defaults = config.get_pairs("analysis.term2_defaults")
        self.mapper = OntologyMapper(
            self.ontology,
            threshold=config.get_float("mapping.threshold"),
            margin=config.get_float("mapping.margin"),
            max_options=config.get_int("mapping.max_options"),
            suspension_ttl=config.get_float("mapping.suspension_ttl"),
        )

    # -- analysis ---------------------------------------------------------

    def annotate(self, question: str):
        text = normalize_question(question)
        if not text:
            raise BadQuestionError("empty question")
        if len(text) > MAX_QUESTION_LENGTH:
            raise BadQuestionError(
                f"question longer than {MAX_QUESTION_LENGTH} characters")
        aset = mark_question_words(segment(text, self.lexicon), self.phrases)
        aset = detect_noun_phrases(aset, self.np_rules)
        return detect_relations(aset, self.relation_rules)

    def analyze(self, question: str):
        aset = self.annotate(question)
        ir = build_intermediate_representation(
            aset, classify_question(aset),
            self.term1_defaults, self.term2_defaults)
        return aset, ir

    def _trace(self, aset, ir=None, onto_tuples=()):
        trace = {
            "tokens": [[aset.covered_text(a), a.features.get("category", "")]
                       for a in aset.of_kind("TokenVn")],
            "question_words": [[aset.covered_text(a), a.features.get("qcat", "")]
                               for a in aset.of_kind("QuestionWord")],
            "noun_phrases": [{"text": aset.covered_text(a),
                              "term": a.features.get("term", ""),
                              "embedded": a.features.get("embedded") == "true"}
                             for a in aset.of_kind("NounPhrase")],
            "relations": [{"text": aset.covered_text(a),
                           "pattern": a.features.get("pattern", "")}
                          for a in aset.of_kind("RelationPhrase")],
            "ir": ir.to_dict() if ir is not None else None,
            "onto_tuples": [t.to_dict() for t in onto_tuples],
        }
        return trace

    # -- full pipeline ------------------------------------------------------

    def ask(self, question: str) -> AskResult:
        try:
            aset = self.annotate(question)
        except BadQuestionError:
            raise
        try:
            ir = build_intermediate_representation(
                aset, classify_question(aset),
                self.term1_defaults, self.term2_defaults)
        except UnsupportedStructureError as err:
            return AskResult(ERROR, trace=self._trace(aset),
                             failure_stage=STAGE_ANALYSIS, message=str(err))
        outcome = self.mapper.map_tuple(ir)
        return self._finish(outcome, trace_base=(aset, ir))

    def resolve_choice(self, token: str, choice_index: int) -> AskResult:
        outcome = self.mapper.apply_choice(token, choice_index)
        ir = outcome.ir
        aset = self.annotate(ir.original_text) if ir.original_text else None
        return self._finish(outcome, trace_base=(aset, ir))

    def _finish(self, outcome: MappingOutcome, trace_base) -> AskResult:
        aset, ir = trace_base

        def trace(onto_tuples=()):
            if aset is None:
                return {"ir": ir.to_dict(),
                        "onto_tuples": [t.to_dict() for t in onto_tuples]}
            return self._trace(aset, ir, onto_tuples)

        if outcome.status == "failed":
            return AskResult(ERROR, trace=trace(), failure_stage=STAGE_MAPPING,
                             message=outcome.reason)
        if outcome.status == "needs_choice":
            return AskResult(NEEDS_DISAMBIGUATION, request=outcome.request,
                             trace=trace())
        try:
            sets = [evaluate_tuple(self.ontology, t) for t in outcome.onto_tuples]
            result = combine(ir.structure, sets)
            answer = render_answer(ir.tuples[0].qclass, ir.structure, result,
                                   self.ontology, ir.tuples[0],
                                   outcome.onto_tuples, self.templates)
        except ValueError as err:
            return AskResult(ERROR, trace=trace(outcome.onto_tuples),
                             failure_stage=STAGE_EXTRACTION, message=str(err))
        return AskResult(ANSWERED, answer=answer,
                         trace=trace(outcome.onto_tuples))


def build_engine(config: Config | None = None) -> QAEngine:
    return QAEngine(config)
