"""Pattern rules over annotation sequences, in the spirit of JAPE grammars.

A rule is a sequence of elements; each element holds alternative constraints
and a quantifier (exactly-one, optional, one-or-more). Rules match the
annotation sequence ordered by span, not raw characters, so annotations of
different kinds may overlap and still be matched independently.

Matching semantics:

- Anchored at an annotation start offset, the reported match is the longest
  one obtainable at that offset (quantifiers are greedy; bounded backtracking
  satisfies later mandatory elements).
- Scanning is leftmost-longest and non-overlapping per rule: after a match,
  scanning resumes at the first annotation starting at or after the match end.
- Annotations fully covered by another annotation of the rule's output kind
  are invisible to that rule, which makes rule application idempotent.

Rules are data, loaded from a text file; see parse_rules for the grammar.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from enum import Enum

from .annotations import Annotation, AnnotationSet


class Quantifier(Enum):
    EXACTLY_ONE = "one"
    OPTIONAL = "opt"
    ONE_OR_MORE = "plus"


@dataclass(frozen=True)
class Constraint:
    """Matches annotations of a kind, optionally requiring feature values.

    The pseudo-feature "string" matches the covered text case-insensitively;
    other features compare against the annotation's feature map.
    """

    kind: str
    features: tuple = ()

    def matches(self, ann: Annotation, text: str) -> bool:
        if ann.kind != self.kind:
            return False
        for name, value in self.features:
            if name == "string":
                if text[ann.start:ann.end].lower() != value.lower():
                    return False
            elif ann.features.get(name) != value:
                return False
        return True


@dataclass(frozen=True)
class RuleElement:
    constraints: tuple
    quantifier: Quantifier
    captures: tuple = ()

    def matches(self, ann: Annotation, text: str) -> bool:
        return any(c.matches(ann, text) for c in self.constraints)


@dataclass(frozen=True)
class Rule:
    name: str
    priority: int
    elements: tuple
    emit_kind: str
    emit_features: tuple = ()


@dataclass
class Match:
    start: int
    end: int
    captured: dict = field(default_factory=dict)


class RuleSyntaxError(ValueError):
    """Malformed rule, with the position that triggered the rejection."""

    def __init__(self, message, position=""):
        self.position = position
        super().__init__(f"{message}{f' ({position})' if position else ''}")


def compile_rule(name, priority, elements, emit_kind, emit_features=(), position=""):
    """Validate and build a Rule; elements are RuleElement values."""
    if not elements:
        raise RuleSyntaxError(f"rule {name!r} has no elements", position)
    if all(e.quantifier is Quantifier.OPTIONAL for e in elements):
        raise RuleSyntaxError(f"rule {name!r} has no mandatory element", position)
    for i, e in enumerate(elements):
        if not e.constraints:
            raise RuleSyntaxError(f"rule {name!r} element {i + 1} has no constraints", position)
    return Rule(name, priority, tuple(elements), emit_kind, tuple(emit_features))


def _parse_alternative(text, position):
    text = text.strip()
    if not text:
        raise RuleSyntaxError("empty constraint alternative", position)
    if "." in text:
        kind, _, feat = text.partition(".")
        fname, eq, value = feat.partition("=")
        if not eq or not fname or not value:
            raise RuleSyntaxError(f"bad constraint {text!r}, expected kind.feature=value", position)
        return Constraint(kind.strip(), ((fname.strip(), value.strip()),))
    return Constraint(text)


def _parse_element(line, position):
    parts = line.split()
    try:
        quant = Quantifier(parts[0])
    except ValueError:
        raise RuleSyntaxError(f"unknown quantifier {parts[0]!r}", position) from None
    captures = []
    i = 1
    while i < len(parts) and parts[i].startswith("@"):
        captures.append(parts[i][1:])
        i += 1
    rest = " ".join(parts[i:])
    if not rest:
        raise RuleSyntaxError("element has no constraints", position)
    alts = tuple(_parse_alternative(alt, position) for alt in rest.split("|"))
    return RuleElement(alts, quant, tuple(captures))


def parse_rules(source: str, origin: str = "<rules>") -> list:
    """Parse a rules file into a list of Rule, sorted by (priority, file order).

    Grammar (one rule per block, '#' starts a comment):

        rule <name> <priority>
        <quantifier> [@capture ...] <alt>|<alt>...
        ...
        emit <kind> [feature=value ...]

    where <quantifier> is one/opt/plus and <alt> is kind[.feature=value].
    Emit feature values may reference captures: $match is the covered text of
    the whole match, $name spans the captured annotations named by the rule,
    $name:first is the covered text of the first annotation captured as name.
    """
    rules = []
    header = None
    elements = []
    for lineno, raw in enumerate(source.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        position = f"{origin}:{lineno}"
        if line.startswith("rule "):
            if header is not None:
                raise RuleSyntaxError(f"rule {header[0]!r} missing emit line", position)
            parts = line.split()
            if len(parts) != 3:
                raise RuleSyntaxError("expected: rule <name> <priority>", position)
            try:
                header = (parts[1], int(parts[2]), position)
            except ValueError:
                raise RuleSyntaxError(f"bad priority {parts[2]!r}", position) from None
            elements = []
        elif line.startswith("emit "):
            if header is None:
                raise RuleSyntaxError("emit before any rule header", position)
            parts = line.split()
            feats = []
            for item in parts[2:]:
                fname, eq, value = item.partition("=")
                if not eq:
                    raise RuleSyntaxError(f"bad emit feature {item!r}", position)
                feats.append((fname, value))
            if len(parts) < 2:
                raise RuleSyntaxError("emit needs an output kind", position)
            rules.append(compile_rule(header[0], header[1], elements, parts[1], feats, header[2]))
            header = None
        else:
            if header is None:
                raise RuleSyntaxError(f"element line outside a rule: {line!r}", position)
            elements.append(_parse_element(line, position))
    if header is not None:
        raise RuleSyntaxError(f"rule {header[0]!r} missing emit line", f"{origin}:end")
    indexed = sorted(enumerate(rules), key=lambda t: (t[1].priority, t[0]))
    return [r for _, r in indexed]


def load_rules(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return parse_rules(fh.read(), origin=str(path))


class _View:
    """The annotations a rule may see: those not fully covered by a different
    annotation of the rule's output kind."""

    def __init__(self, aset: AnnotationSet, emit_kind: str):
        covers = [a for a in aset if a.kind == emit_kind]
        visible = []
        for a in aset:
            if any(c.id != a.id and c.covers(a) for c in covers):
                continue
            visible.append(a)
        self.text = aset.text
        self.by_start = {}
        for a in visible:
            self.by_start.setdefault(a.start, []).append(a)
        self.starts = sorted(self.by_start)

    def starts_from(self, offset):
        return self.starts[bisect_left(self.starts, offset):]

    def next_start(self, offset):
        i = bisect_left(self.starts, offset)
        return self.starts[i] if i < len(self.starts) else None

    def at(self, start):
        return self.by_start.get(start, ())


def _match_at(rule: Rule, view: _View, anchor: int):
    """Longest match of rule anchored at annotation-start offset anchor."""
    best = None

    def record(end, captured):
        nonlocal best
        if best is None or end > best.end:
            best = Match(anchor, end, {k: list(v) for k, v in captured.items()})

    def advance(ei, pos, captured):
        if ei == len(rule.elements):
            record(pos, captured)
            return
        element = rule.elements[ei]

        def candidates(p):
            start = view.next_start(p)
            if start is None:
                return ()
            return [a for a in view.at(start) if element.matches(a, view.text)]

        def consume(p, captured):
            for ann in candidates(p):
                taken = dict(captured)
                for name in element.captures:
                    taken[name] = taken.get(name, ()) + (ann,)
                if element.quantifier is Quantifier.ONE_OR_MORE:
                    consume(ann.end, taken)
                advance(ei + 1, ann.end, taken)

        if element.quantifier is Quantifier.OPTIONAL:
            consume(pos, captured)
            advance(ei + 1, pos, captured)
        else:
            consume(pos, captured)

    advance(0, anchor, {})
    return best


def _next_match(rule, view, offset, veto=None):
    """Leftmost-longest non-vetoed match with start >= offset, or None."""
    for start in view.starts_from(offset):
        m = _match_at(rule, view, start)
        if m is not None and (veto is None or not veto(m)):
            return m
    return None


def find_matches(rule: Rule, aset: AnnotationSet, veto=None) -> list:
    """All leftmost-longest, non-overlapping matches of one rule."""
    view = _View(aset, rule.emit_kind)
    matches = []
    offset = 0
    while True:
        m = _next_match(rule, view, offset, veto)
        if m is None:
            return matches
        matches.append(m)
        offset = m.end


def scan_rules(rules, aset: AnnotationSet, veto=None) -> list:
    """Run rules jointly over the set; returns the winning (rule, match) pairs.

    At each position the earliest match wins; ties at the same start go to the
    lower priority number, then the longer match, then the rule listed first.
    Scanning resumes after each winner's end.
    """
    order = {id(r): i for i, r in enumerate(rules)}
    views = {id(r): _View(aset, r.emit_kind) for r in rules}
    winners = []
    offset = 0
    while True:
        best = None
        for rule in rules:
            m = _next_match(rule, views[id(rule)], offset, veto)
            if m is None:
                continue
            key = (m.start, rule.priority, -m.end, order[id(rule)])
            if best is None or key < best[0]:
                best = (key, rule, m)
        if best is None:
            return winners
        winners.append((best[1], best[2]))
        offset = best[2].end


def render_features(rule: Rule, match: Match, text: str) -> dict:
    """Resolve a rule's emit features against a match.

    $match covers the whole match; $name spans the annotations captured under
    name; $name:first is the first such annotation's text. Features whose
    capture is empty are omitted.
    """
    features = {}
    for name, value in rule.emit_features:
        if value == "$match":
            features[name] = text[match.start:match.end]
        elif value.startswith("$"):
            ref, _, mod = value[1:].partition(":")
            anns = match.captured.get(ref)
            if not anns:
                continue
            if mod == "first":
                features[name] = text[anns[0].start:anns[0].end]
            else:
                features[name] = text[min(a.start for a in anns):max(a.end for a in anns)]
        else:
            features[name] = value
    return features


def apply_rules(rules, aset: AnnotationSet, veto=None) -> AnnotationSet:
    """Emit one annotation per winning match; input annotations are kept."""
    specs = []
    for rule, match in scan_rules(rules, aset, veto):
        specs.append((rule.emit_kind, match.start, match.end,
                      render_features(rule, match, aset.text)))
    return aset.with_new(specs)
