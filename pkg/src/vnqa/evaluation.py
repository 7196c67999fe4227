"""Batch evaluation over a question corpus.

Corpus lines are question<TAB>expected-IR-JSON<TAB>expected-answer-JSON with
both expectations optional ("-" or empty skips one) and an optional fourth
column of comma-separated disambiguation choices. The report records, per
question, whether analysis produced the expected tuples and whether the
pipeline answered, with or without interaction, and aggregates the counts by
failure stage (analysis, mapping, extraction).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .mapping import normalize_name
from .pipeline import ANSWERED, ERROR, NEEDS_DISAMBIGUATION, BadQuestionError, QAEngine

MAX_INTERACTIONS = 10


@dataclass
class QuestionRecord:
    question: str
    ir_ok: bool = False
    ir_correct: bool | None = None
    answered: bool = False
    interaction_needed: bool = False
    answer_correct: bool | None = None
    failure_stage: str = ""

    def to_dict(self):
        return dict(self.__dict__)


@dataclass
class EvalReport:
    records: list = field(default_factory=list)

    @property
    def total(self):
        return len(self.records)

    def _count(self, pred):
        return sum(1 for r in self.records if pred(r))

    def summary(self):
        answered = self._count(lambda r: r.answered)
        no_interaction = self._count(lambda r: r.answered and not r.interaction_needed)
        with_interaction = self._count(lambda r: r.answered and r.interaction_needed)
        ir_checked = self._count(lambda r: r.ir_correct is not None)
        return {
            "total": self.total,
            "ir_produced": self._count(lambda r: r.ir_ok),
            "ir_checked": ir_checked,
            "ir_correct": self._count(lambda r: r.ir_correct),
            "answered": answered,
            "no_interaction": no_interaction,
            "with_interaction": with_interaction,
            "analysis_errors": self._count(lambda r: r.failure_stage == "analysis"),
            "mapping_errors": self._count(lambda r: r.failure_stage == "mapping"),
            "extraction_errors": self._count(lambda r: r.failure_stage == "extraction"),
            "unanswered": self.total - answered,
        }

    def to_dict(self):
        return {"summary": self.summary(),
                "questions": [r.to_dict() for r in self.records]}

    def to_text(self):
        s = self.summary()
        total = max(s["total"], 1)

        def pct(n):
            return f"{round(100 * n / total)}%"

        def row(label, n):
            return f"  {label:<42} {n:>3}  {pct(n):>4}"

        ir_base = max(s["ir_checked"], 1)
        lines = [
            f"Corpus: {s['total']} questions",
            "",
            "QUESTION ANALYSIS",
            row("Intermediate representation produced", s["ir_produced"]),
            f"  {'Correct against expected tuples':<42} "
            f"{s['ir_correct']:>3}  {round(100 * s['ir_correct'] / ir_base)}% "
            f"(of {s['ir_checked']} checked)",
            "",
            "QUESTIONS SUCCESSFULLY ANSWERED",
            row("No interaction with users", s["no_interaction"]),
            row("With interactions with users", s["with_interaction"]),
            row("Number questions successfully answered", s["answered"]),
            "",
            "QUESTIONS WITH UNSUCCESSFUL ANSWERS",
            row("Question Analysis errors", s["analysis_errors"]),
            row("Ontology Mapping errors", s["mapping_errors"]),
            row("Answer Extraction errors", s["extraction_errors"]),
            row("Number unsuccessfully answered questions", s["unanswered"]),
        ]
        return "\n".join(lines)


def _parse_expected(cell):
    cell = (cell or "").strip()
    if not cell or cell == "-":
        return None
    return json.loads(cell)


def _norm(value):
    return None if value is None else normalize_name(value)


def ir_matches(expected, ir_dict) -> bool:
    """Structure and classes compare exactly; term and relation strings are
    compared after normalization (underscores vs spaces ignored)."""
    if ir_dict is None:
        return False
    if expected.get("structure") != ir_dict.get("structure"):
        return False
    exp_tuples = expected.get("tuples", [])
    got_tuples = ir_dict.get("tuples", [])
    if len(exp_tuples) != len(got_tuples):
        return False
    for exp, got in zip(exp_tuples, got_tuples):
        for key in ("structure", "qclass"):
            if key in exp and exp[key] != got.get(key):
                return False
        for key in ("term1", "relation", "term2", "term3"):
            if key in exp and _norm(exp[key]) != _norm(got.get(key)):
                return False
    return True


def answer_matches(expected, result) -> bool:
    if "answered" in expected:
        if expected["answered"] != (result.status == ANSWERED
                                    and result.answer.payload_kind != "unsupported"):
            return False
        if not expected["answered"]:
            stage = expected.get("failure_stage")
            got_stage = result.failure_stage or (
                "extraction" if result.status == ANSWERED else "")
            return stage is None or stage == got_stage
    if result.status != ANSWERED:
        return False
    answer = result.answer.to_dict()
    if "payload_kind" in expected and expected["payload_kind"] != answer["payload_kind"]:
        return False
    if "count" in expected and expected["count"] != answer.get("count"):
        return False
    if "boolean" in expected and expected["boolean"] != answer.get("boolean"):
        return False
    for key in ("individuals", "values"):
        if key in expected and set(expected[key]) != set(answer.get(key, ())):
            return False
    return True


def load_choices(path) -> dict:
    """Scripted choices: `<question number><TAB>i[,j...]` per line, 1-based."""
    scripted = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            num, _, picks = line.partition("\t")
            scripted[int(num)] = [int(p) for p in picks.split(",") if p.strip()]
    return scripted


def run_eval(engine: QAEngine, corpus_path, mode="auto", choices=None) -> EvalReport:
    """Run every corpus question; auto mode takes the top option whenever the
    pipeline asks for disambiguation, scripted mode consumes the recorded
    choice list first."""
    scripted = dict(choices or {})
    report = EvalReport()
    with open(corpus_path, encoding="utf-8") as fh:
        lines = [l.rstrip("\n") for l in fh]
    number = 0
    for raw in lines:
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        number += 1
        cells = raw.split("\t")
        question = cells[0].strip()
        record = QuestionRecord(question=question)
        report.records.append(record)
        try:
            expected_ir = _parse_expected(cells[1] if len(cells) > 1 else "")
            expected_answer = _parse_expected(cells[2] if len(cells) > 2 else "")
            inline_choices = [int(p) for p in cells[3].split(",") if p.strip()] \
                if len(cells) > 3 and cells[3].strip() else []
        except (json.JSONDecodeError, ValueError) as err:
            record.failure_stage = "analysis"
            record.question = f"{question} [malformed corpus line: {err}]"
            continue
        picks = list(scripted.get(number, inline_choices)) \
            if mode == "scripted-choices" else []

        try:
            result = engine.ask(question)
        except BadQuestionError as err:
            record.failure_stage = "analysis"
            record.question = f"{question} [{err}]"
            continue

        rounds = 0
        while result.status == NEEDS_DISAMBIGUATION and rounds < MAX_INTERACTIONS:
            record.interaction_needed = True
            pick = picks.pop(0) if picks else 0
            result = engine.resolve_choice(result.request.token, pick)
            rounds += 1

        record.ir_ok = result.trace.get("ir") is not None
        if expected_ir is not None:
            record.ir_correct = ir_matches(expected_ir, result.trace.get("ir"))

        if result.status == ANSWERED and result.answer.payload_kind != "unsupported":
            record.answered = True
        elif result.status == ANSWERED:
            record.failure_stage = "extraction"
        elif result.status == ERROR:
            record.failure_stage = result.failure_stage
        else:
            record.failure_stage = "mapping"

        if expected_answer is not None:
            record.answer_correct = answer_matches(expected_answer, result)
    return report
