"""The .exo declaration language: parser, checker, and serializer.

A document declares universes and the agents that inhabit them. The
format is line-oriented UTF-8 with `#` comments and semicolon-terminated
items. Parsing never throws on bad input: it returns diagnostics with
line and column positions, recovering at item boundaries so one mistake
does not hide the rest. A document containing any error is withheld;
callers only ever receive fully checked declarations.

serialize() emits a canonical form (sorted lists, fully explicit
defaults), and parsing a serialized document reproduces it structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .architectures import (
    AgentArchitecture,
    ArchitectureKind,
    PositionalFasa,
    RandomFasa,
    ReactionTable,
    RouteTable,
)
from .digits import ConstantDigits, parse_digit_string
from .representation import Formula, RepresentationMap
from .universe import ActId, EnergyRules, StateClass, StateId, Universe

_ENERGY_FIELDS = ("initial", "per_step", "negative_penalty", "positive_reward", "cap")
_CLASS_WORDS = {
    "positive": StateClass.POSITIVE,
    "neutral": StateClass.NEUTRAL,
    "negative": StateClass.NEGATIVE,
}
_KIND_WORDS = {k.value: k for k in ArchitectureKind}


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: Severity
    message: str
    line: int
    column: int

    def render(self, filename: str = "<string>") -> str:
        return f"{filename}:{self.line}:{self.column}: {self.severity.value}: {self.message}"


class SpecInvalid(Exception):
    """A document needed for an operation failed to parse cleanly."""

    def __init__(self, filename: str, diagnostics: list[ParseDiagnostic]):
        self.filename = filename
        self.diagnostics = diagnostics
        lines = [d.render(filename) for d in diagnostics if d.severity is Severity.ERROR]
        super().__init__("\n".join(lines) or f"{filename}: invalid document")


# ---------------------------------------------------------------------------
# Declarations. These are the structural content of a document; spans are
# excluded from equality so round-tripped documents compare equal.


@dataclass(frozen=True)
class UniverseDecl:
    name: str
    states: tuple[StateId, ...]
    acts: tuple[ActId, ...]
    initial: StateId
    neutral_act: ActId
    classes: tuple[tuple[StateId, str], ...]
    transitions: tuple[tuple[StateId, ActId, StateId], ...]
    energy: tuple[int, int, int, int, int]

    def build(self) -> Universe:
        return Universe(
            name=self.name,
            states=frozenset(self.states),
            acts=frozenset(self.acts),
            initial=self.initial,
            neutral_act=self.neutral_act,
            transitions={(s, a): t for s, a, t in self.transitions},
            classes={s: StateClass(c) for s, c in self.classes},
            energy=EnergyRules(*self.energy),
        )


@dataclass(frozen=True)
class AgentDecl:
    name: str
    universe_name: str
    kind: ArchitectureKind
    seed: int | None = None
    depth: int | None = None
    projection: int | None = None
    constant: tuple[str, str | None] | None = None
    goal: Formula | None = None
    representation: tuple[tuple[StateId, Formula], ...] = ()
    react_rows: tuple[tuple[Formula, ActId], ...] = ()
    predict_rows: tuple[tuple[Formula, Formula, tuple[ActId, ...]], ...] = ()
    pool_rows: tuple[tuple[int, Formula, Formula, tuple[ActId, ...]], ...] = ()

    def build(self, universe: Universe) -> AgentArchitecture:
        act_order = tuple(sorted(universe.acts))
        agent = AgentArchitecture(name=self.name, kind=self.kind)
        if self.kind is ArchitectureKind.RANDOM:
            agent.random_fasa = RandomFasa(seed=self.seed or 0, act_order=act_order)
            return agent
        if self.kind is ArchitectureKind.POSITIONAL:
            kind, payload = self.constant or ("pi", None)
            if kind == "digits":
                source = parse_digit_string(payload or "", len(act_order))
            else:
                source = ConstantDigits(kind, len(act_order))
            agent.positional_fasa = PositionalFasa(source=source, act_order=act_order)
            return agent
        agent.representation = RepresentationMap(dict(self.representation))
        agent.projection_index = self.projection or 1
        agent.goal = self.goal
        if self.kind is ArchitectureKind.AFS1:
            agent.reaction = ReactionTable(dict(self.react_rows))
        elif self.kind in (ArchitectureKind.AFS2A, ArchitectureKind.AFS2B):
            agent.routes = RouteTable(
                {(s, g): seq for s, g, seq in self.predict_rows},
                depth_max=self.depth or 1,
            )
            if self.kind is ArchitectureKind.AFS2B:
                agent.memory = self.goal
        else:
            tables = []
            for index in range(max((i for i, *_ in self.pool_rows), default=-1) + 1):
                entries = {
                    (s, g): seq for i, s, g, seq in self.pool_rows if i == index
                }
                tables.append(RouteTable(entries, depth_max=self.depth or 1))
            agent.candidate_pool = tuple(tables)
        return agent


@dataclass(frozen=True)
class SpecDocument:
    universes: tuple[UniverseDecl, ...]
    agents: tuple[AgentDecl, ...]
    source_spans: dict = field(default_factory=dict, compare=False, repr=False)

    def universe(self, name: str) -> UniverseDecl:
        for u in self.universes:
            if u.name == name:
                return u
        raise KeyError(name)

    def agent(self, name: str) -> AgentDecl:
        for a in self.agents:
            if a.name == name:
                return a
        raise KeyError(name)

    def build_universe(self, name: str) -> Universe:
        return self.universe(name).build()

    def build_agent(self, name: str) -> tuple[AgentArchitecture, Universe]:
        decl = self.agent(name)
        universe = self.build_universe(decl.universe_name)
        return decl.build(universe), universe


@dataclass(frozen=True)
class ParseResult:
    document: SpecDocument | None
    diagnostics: list[ParseDiagnostic]

    @property
    def errors(self) -> list[ParseDiagnostic]:
        return [d for d in self.diagnostics if d.severity is Severity.ERROR]


# ---------------------------------------------------------------------------
# Lexer


@dataclass(frozen=True)
class _Token:
    kind: str  # id, string, int, punct, eof
    value: str
    line: int
    column: int


def _lex(text: str, diags: list[ParseDiagnostic]) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)

    def bump(ch: str) -> None:
        nonlocal line, col
        if ch == "\n":
            line += 1
            col = 1
        else:
            col += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            bump(ch)
            i += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                bump(text[i])
                i += 1
            continue
        start_line, start_col = line, col
        if ch == '"':
            bump(ch)
            i += 1
            buf = []
            closed = False
            while i < n:
                c = text[i]
                if c == "\n":
                    break
                bump(c)
                i += 1
                if c == '"':
                    closed = True
                    break
                if c == "\\" and i < n and text[i] in ('"', "\\"):
                    buf.append(text[i])
                    bump(text[i])
                    i += 1
                else:
                    buf.append(c)
            if not closed:
                diags.append(
                    ParseDiagnostic(
                        Severity.ERROR, "unterminated string", start_line, start_col
                    )
                )
            tokens.append(_Token("string", "".join(buf), start_line, start_col))
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            value = text[i:j]
            for c in value:
                bump(c)
            i = j
            tokens.append(_Token("int", value, start_line, start_col))
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            value = text[i:j]
            for c in value:
                bump(c)
            i = j
            tokens.append(_Token("id", value, start_line, start_col))
            continue
        if ch == "-" and i + 1 < n and text[i + 1] == ">":
            bump("-")
            bump(">")
            i += 2
            tokens.append(_Token("punct", "->", start_line, start_col))
            continue
        if ch in "{};:":
            bump(ch)
            i += 1
            tokens.append(_Token("punct", ch, start_line, start_col))
            continue
        diags.append(
            ParseDiagnostic(
                Severity.ERROR, f"unexpected character {ch!r}", start_line, start_col
            )
        )
        bump(ch)
        i += 1
    tokens.append(_Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser


class _ItemError(Exception):
    """Internal: abandon the current item and resynchronize."""


class _Parser:
    def __init__(self, text: str):
        self.diags: list[ParseDiagnostic] = []
        self.tokens = _lex(text, self.diags)
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_punct(self, value: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.value == value

    def at_id(self, value: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == "id" and (value is None or tok.value == value)

    def error(self, message: str, tok: _Token | None = None) -> None:
        tok = tok or self.peek()
        self.diags.append(ParseDiagnostic(Severity.ERROR, message, tok.line, tok.column))

    def warn(self, message: str, tok: _Token | None = None) -> None:
        tok = tok or self.peek()
        self.diags.append(
            ParseDiagnostic(Severity.WARNING, message, tok.line, tok.column)
        )

    def fail(self, message: str, tok: _Token | None = None) -> None:
        self.error(message, tok)
        raise _ItemError()

    def expect_punct(self, value: str) -> _Token:
        if not self.at_punct(value):
            tok = self.peek()
            self.fail(f"expected {value!r}, found {self._describe(tok)}", tok)
        return self.advance()

    def expect_id(self) -> _Token:
        if self.peek().kind != "id":
            tok = self.peek()
            self.fail(f"expected an identifier, found {self._describe(tok)}", tok)
        return self.advance()

    def expect_string(self) -> _Token:
        if self.peek().kind != "string":
            tok = self.peek()
            self.fail(f"expected a quoted string, found {self._describe(tok)}", tok)
        return self.advance()

    def expect_int(self) -> int:
        if self.peek().kind != "int":
            tok = self.peek()
            self.fail(f"expected an integer, found {self._describe(tok)}", tok)
        return int(self.advance().value)

    @staticmethod
    def _describe(tok: _Token) -> str:
        if tok.kind == "eof":
            return "end of input"
        if tok.kind == "string":
            return f'string "{tok.value}"'
        return f"{tok.value!r}"

    def skip_item(self) -> None:
        """Resynchronize after an item error: consume through the next ';'
        but stop short of a closing '}'. Always makes progress, so a
        stray token can never wedge the block loop."""
        first = True
        while True:
            tok = self.peek()
            if tok.kind == "eof" or (tok.kind == "punct" and tok.value == "}"):
                return
            if tok.kind == "punct" and tok.value == "{" and not first:
                return
            first = False
            self.advance()
            if tok.kind == "punct" and tok.value == ";":
                return

    def end_item(self) -> None:
        self.expect_punct(";")

    # -- document ----------------------------------------------------------

    def parse_document(self) -> tuple[SpecDocument | None, list[ParseDiagnostic]]:
        universes: list[UniverseDecl] = []
        agents: list[_RawAgent] = []
        spans: dict = {}
        while self.peek().kind != "eof":
            if self.at_id("universe"):
                decl = self._parse_universe(spans)
                if decl is not None:
                    if any(u.name == decl.name for u in universes):
                        line, col = spans[("universe", decl.name)]
                        self.diags.append(
                            ParseDiagnostic(
                                Severity.ERROR,
                                f"duplicate universe {decl.name!r}",
                                line,
                                col,
                            )
                        )
                    else:
                        universes.append(decl)
            elif self.at_id("agent"):
                raw = self._parse_agent()
                if raw is not None:
                    agents.append(raw)
            else:
                self.error(
                    f"expected 'universe' or 'agent', found {self._describe(self.peek())}"
                )
                self.advance()
                while self.peek().kind != "eof" and not (
                    self.at_id("universe") or self.at_id("agent")
                ):
                    self.advance()
        decls: list[AgentDecl] = []
        seen: set[str] = set()
        for raw in agents:
            decl = self._resolve_agent(raw, universes)
            if decl is None:
                continue
            if decl.name in seen:
                self.diags.append(
                    ParseDiagnostic(
                        Severity.ERROR,
                        f"duplicate agent {decl.name!r}",
                        raw.line,
                        raw.column,
                    )
                )
                continue
            seen.add(decl.name)
            spans[("agent", decl.name)] = (raw.line, raw.column)
            decls.append(decl)
        if any(d.severity is Severity.ERROR for d in self.diags):
            return None, self.diags
        doc = SpecDocument(tuple(universes), tuple(decls), spans)
        return doc, self.diags

    # -- universe ----------------------------------------------------------

    def _parse_universe(self, spans: dict) -> UniverseDecl | None:
        keyword = self.advance()
        try:
            name = self.expect_string().value
            self.expect_punct("{")
        except _ItemError:
            self.skip_item()
            return None
        spans[("universe", name)] = (keyword.line, keyword.column)
        states: list[StateId] = []
        acts: list[ActId] = []
        singles: dict[str, tuple[str, _Token]] = {}
        classes: dict[StateId, tuple[str, _Token]] = {}
        transitions: dict[tuple[StateId, ActId], tuple[StateId, _Token]] = {}
        energy: tuple[int, ...] | None = None
        while not self.at_punct("}") and self.peek().kind != "eof":
            head = self.peek()
            try:
                parsed = self._parse_uitem(states, acts, singles, classes, transitions)
            except _ItemError:
                self.skip_item()
                continue
            if parsed is not None:
                if energy is not None:
                    self.error("duplicate energy block", head)
                else:
                    energy = parsed
        if self.peek().kind == "eof":
            self.error("unterminated universe block: missing '}'")
        else:
            self.advance()
        return self._resolve_universe(
            name, keyword, states, acts, singles, classes, transitions, energy
        )

    def _parse_uitem(
        self,
        states: list[StateId],
        acts: list[ActId],
        singles: dict[str, tuple[str, _Token]],
        classes: dict[StateId, tuple[str, _Token]],
        transitions: dict[tuple[StateId, ActId], tuple[StateId, _Token]],
    ) -> tuple[int, ...] | None:
        """Parse one universe item; returns energy values for an energy
        block, None for every other item kind."""
        tok = self.peek()
        if tok.kind != "id":
            self.fail(f"expected a universe item, found {self._describe(tok)}")
        head = self.advance()
        if head.value in ("states", "acts"):
            self.expect_punct(":")
            ids = self._id_list(head.value)
            target = states if head.value == "states" else acts
            for ident, id_tok in ids:
                if ident in target:
                    self.warn(f"{head.value[:-1]} {ident!r} listed twice", id_tok)
                else:
                    target.append(ident)
            self.end_item()
        elif head.value in ("initial", "neutral_act"):
            self.expect_punct(":")
            ident = self.expect_id()
            if head.value in singles:
                self.fail(f"duplicate {head.value!r} item", head)
            singles[head.value] = (ident.value, ident)
            self.end_item()
        elif head.value == "classify":
            word = self.expect_id()
            if word.value not in _CLASS_WORDS:
                self.fail(
                    f"expected 'positive', 'neutral' or 'negative', found {word.value!r}",
                    word,
                )
            self.expect_punct(":")
            for ident, id_tok in self._id_list("classified states"):
                if ident in classes and classes[ident][0] != word.value:
                    self.error(
                        f"state {ident!r} classified both {classes[ident][0]} and {word.value}",
                        id_tok,
                    )
                elif ident in classes:
                    self.warn(f"state {ident!r} classified twice", id_tok)
                else:
                    classes[ident] = (word.value, id_tok)
            self.end_item()
        elif head.value == "transition":
            src = self.expect_id()
            act = self.expect_id()
            dst = self.expect_id()
            key = (src.value, act.value)
            if key in transitions and transitions[key][0] != dst.value:
                self.error(
                    f"conflicting transition for ({src.value!r}, {act.value!r})", src
                )
            elif key in transitions:
                self.warn(
                    f"transition ({src.value!r}, {act.value!r}) declared twice", src
                )
            else:
                transitions[key] = (dst.value, src)
            self.end_item()
        elif head.value == "energy":
            return self._parse_energy()
        else:
            self.fail(f"unknown universe item {head.value!r}", head)
        return None

    def _id_list(self, what: str) -> list[tuple[str, _Token]]:
        ids = []
        while self.peek().kind == "id":
            tok = self.advance()
            ids.append((tok.value, tok))
        if not ids:
            self.fail(f"expected at least one identifier in {what}")
        return ids

    def _parse_energy(self) -> tuple[int, ...]:
        self.expect_punct("{")
        values = []
        for expected in _ENERGY_FIELDS:
            label = self.expect_id()
            if label.value != expected:
                # The field order is part of the format.
                self.error(
                    f"energy field {expected!r} expected here, found {label.value!r}",
                    label,
                )
            self.expect_punct(":")
            values.append(self.expect_int())
            self.end_item()
        self.expect_punct("}")
        return tuple(values)

    def _resolve_universe(
        self,
        name: str,
        keyword: _Token,
        states: list[StateId],
        acts: list[ActId],
        singles: dict[str, tuple[str, _Token]],
        classes: dict[StateId, tuple[str, _Token]],
        transitions: dict[tuple[StateId, ActId], tuple[StateId, _Token]],
        energy: tuple[int, ...] | None,
    ) -> UniverseDecl | None:
        ok = True
        for item in ("states", "acts"):
            if not (states if item == "states" else acts):
                self.error(f"universe {name!r} declares no {item}", keyword)
                ok = False
        for item in ("initial", "neutral_act"):
            if item not in singles:
                self.error(f"universe {name!r} is missing the {item!r} item", keyword)
                ok = False
        if energy is None:
            self.error(f"universe {name!r} is missing its energy block", keyword)
            ok = False
        state_set, act_set = set(states), set(acts)
        if "initial" in singles:
            value, tok = singles["initial"]
            if value not in state_set:
                self.error(f"initial state {value!r} is not a declared state", tok)
                ok = False
        if "neutral_act" in singles:
            value, tok = singles["neutral_act"]
            if value not in act_set:
                self.error(f"neutral act {value!r} is not a declared act", tok)
                ok = False
        for ident, (word, tok) in sorted(classes.items()):
            if ident not in state_set:
                self.error(f"classified id {ident!r} is not a declared state", tok)
                ok = False
        for (src, act), (dst, tok) in sorted(transitions.items()):
            for ident, pool, what in (
                (src, state_set, "state"),
                (act, act_set, "act"),
                (dst, state_set, "state"),
            ):
                if ident not in pool:
                    self.error(f"transition uses undeclared {what} {ident!r}", tok)
                    ok = False
        missing = [
            (s, a)
            for s in sorted(state_set)
            for a in sorted(act_set)
            if (s, a) not in transitions
        ]
        for s, a in missing:
            self.error(f"no transition declared for ({s!r}, {a!r})", keyword)
        if missing:
            ok = False
        if energy is not None:
            initial, per_step, penalty, reward, cap = energy
            if initial <= 0:
                self.error("energy initial must be positive", keyword)
                ok = False
            if cap < initial:
                self.error("energy cap must be at least the initial energy", keyword)
                ok = False
        if not ok:
            return None
        full_classes = tuple(
            (s, classes[s][0] if s in classes else "neutral") for s in sorted(state_set)
        )
        return UniverseDecl(
            name=name,
            states=tuple(sorted(state_set)),
            acts=tuple(sorted(act_set)),
            initial=singles["initial"][0],
            neutral_act=singles["neutral_act"][0],
            classes=full_classes,
            transitions=tuple(
                (s, a, transitions[(s, a)][0]) for (s, a) in sorted(transitions)
            ),
            energy=tuple(energy),
        )

    # -- agent ---------------------------------------------------------------

    def _parse_agent(self) -> _RawAgent | None:
        keyword = self.advance()
        try:
            name = self.expect_string().value
            in_tok = self.expect_id()
            if in_tok.value != "in":
                self.fail(f"expected 'in', found {in_tok.value!r}", in_tok)
            universe_name = self.expect_string().value
            self.expect_punct("{")
        except _ItemError:
            self.skip_item()
            return None
        raw = _RawAgent(name, universe_name, keyword.line, keyword.column)
        while not self.at_punct("}") and self.peek().kind != "eof":
            try:
                self._parse_aitem(raw)
            except _ItemError:
                self.skip_item()
        if self.peek().kind == "eof":
            self.error("unterminated agent block: missing '}'")
        else:
            self.advance()
        return raw

    def _parse_aitem(self, raw: _RawAgent) -> None:
        tok = self.peek()
        if tok.kind != "id":
            self.fail(f"expected an agent item, found {self._describe(tok)}")
        head = self.advance()
        if head.value == "architecture":
            self.expect_punct(":")
            word = self.expect_id()
            if word.value not in _KIND_WORDS:
                self.fail(f"unknown architecture {word.value!r}", word)
            self._set_single(raw, "architecture", word.value, head)
            self.end_item()
        elif head.value in ("seed", "depth", "projection"):
            self.expect_punct(":")
            value = self.expect_int()
            self._set_single(raw, head.value, value, head)
            self.end_item()
        elif head.value == "constant":
            self.expect_punct(":")
            word = self.expect_id()
            if word.value in ("pi", "e"):
                value: tuple[str, str | None] = (word.value, None)
            elif word.value == "digits":
                value = ("digits", self.expect_string().value)
            else:
                self.fail(f"expected 'pi', 'e' or 'digits', found {word.value!r}", word)
            self._set_single(raw, "constant", value, head)
            self.end_item()
        elif head.value == "goal":
            self.expect_punct(":")
            value = self.expect_string().value
            self._set_single(raw, "goal", value, head)
            self.end_item()
        elif head.value == "represents":
            state = self.expect_id()
            self.expect_punct("->")
            formula = self.expect_string()
            raw.represents.append((state.value, formula.value, state))
            self.end_item()
        elif head.value == "react":
            formula = self.expect_string()
            self.expect_punct(":")
            act = self.expect_id()
            raw.react.append((formula.value, act.value, head))
            self.end_item()
        elif head.value == "predict":
            self._parse_predict_tail(raw, None, head)
        elif head.value == "pool":
            index = self.expect_int()
            word = self.expect_id()
            if word.value != "predict":
                self.fail(f"expected 'predict' after pool index, found {word.value!r}", word)
            self._parse_predict_tail(raw, index, head)
        else:
            self.fail(f"unknown agent item {head.value!r}", head)

    def _parse_predict_tail(
        self, raw: _RawAgent, pool_index: int | None, head: _Token
    ) -> None:
        source = self.expect_string()
        self.expect_punct("->")
        goal = self.expect_string()
        self.expect_punct(":")
        acts = self._id_list("predicted act sequence")
        row = (source.value, goal.value, tuple(a for a, _ in acts), head)
        if pool_index is None:
            raw.predict.append(row)
        else:
            raw.pool.append((pool_index, *row))
        self.end_item()

    def _set_single(self, raw: _RawAgent, key: str, value, tok: _Token) -> None:
        if key in raw.singles:
            self.error(f"duplicate {key!r} item", tok)
        else:
            raw.singles[key] = (value, tok)

    # -- agent resolution ------------------------------------------------------

    def _resolve_agent(
        self, raw: _RawAgent, universes: list[UniverseDecl]
    ) -> AgentDecl | None:
        at = _Token("id", "agent", raw.line, raw.column)
        universe = next((u for u in universes if u.name == raw.universe_name), None)
        if universe is None:
            self.error(
                f"agent {raw.name!r} inhabits unknown universe {raw.universe_name!r}", at
            )
            return None
        if "architecture" not in raw.singles:
            self.error(f"agent {raw.name!r} declares no architecture", at)
            return None
        kind = _KIND_WORDS[raw.singles["architecture"][0]]
        ok = True

        def single(key: str):
            return raw.singles[key][0] if key in raw.singles else None

        def reject_irrelevant(*keys: str) -> None:
            for key in keys:
                if key in raw.singles:
                    self.warn(
                        f"item {key!r} is ignored for {kind.value} agents",
                        raw.singles[key][1],
                    )

        state_set = set(universe.states)
        act_set = set(universe.acts)

        representation: dict[StateId, Formula] = {}
        for state, formula, tok in raw.represents:
            if state not in state_set:
                self.error(f"represented id {state!r} is not a state", tok)
                ok = False
            elif state in representation and representation[state] != formula:
                self.error(f"state {state!r} represented by two formulas", tok)
                ok = False
            elif state in representation:
                self.warn(f"state {state!r} represented twice", tok)
            elif not formula:
                self.error(f"state {state!r} represented by an empty formula", tok)
                ok = False
            else:
                representation[state] = formula
        image = set(representation.values())

        def check_formula(formula: str, tok: _Token, what: str) -> None:
            nonlocal ok
            if formula not in image:
                self.error(
                    f"{what} {formula!r} is outside the representation image", tok
                )
                ok = False

        def check_acts(tokens: tuple[str, ...], tok: _Token) -> None:
            nonlocal ok
            for act in tokens:
                if act not in act_set:
                    self.error(f"sequence uses undeclared act {act!r}", tok)
                    ok = False

        if not kind.is_sensitive:
            if raw.represents:
                self.warn(
                    f"representation is ignored for {kind.value} agents",
                    raw.represents[0][2],
                )
            for rows, label in ((raw.react, "react"), (raw.predict, "predict")):
                if rows:
                    self.warn(
                        f"{label} rows are ignored for {kind.value} agents", rows[0][-1]
                    )
            if raw.pool:
                self.warn(
                    f"pool rows are ignored for {kind.value} agents", raw.pool[0][-1]
                )
            reject_irrelevant("depth", "projection", "goal")
            if kind is ArchitectureKind.RANDOM:
                reject_irrelevant("constant")
                return None if not ok else AgentDecl(
                    name=raw.name,
                    universe_name=raw.universe_name,
                    kind=kind,
                    seed=single("seed") or 0,
                )
            reject_irrelevant("seed")
            constant = single("constant") or ("pi", None)
            if constant[0] == "digits":
                if not constant[1]:
                    self.error("digit list must not be empty", raw.singles["constant"][1])
                    ok = False
                for i, ch in enumerate(constant[1]):
                    try:
                        value = int(ch, 36)
                    except ValueError:
                        value = -1
                    if not 0 <= value < len(act_set):
                        self.error(
                            f"digit {ch!r} does not fit base {len(act_set)}",
                            raw.singles["constant"][1],
                        )
                        ok = False
                        break
            return None if not ok else AgentDecl(
                name=raw.name,
                universe_name=raw.universe_name,
                kind=kind,
                constant=constant,
            )

        # Sensitive kinds share representation and projection handling.
        reject_irrelevant("seed", "constant")
        if not representation:
            self.error(f"sensitive agent {raw.name!r} declares no representation", at)
            ok = False
        elif len(image) < 2:
            self.error(
                f"representation of {raw.name!r} must use at least two formulas", at
            )
            ok = False
        projection = single("projection")
        if projection is not None and projection < 1:
            self.error("projection must be at least 1", raw.singles["projection"][1])
            ok = False
        projection = projection or 1
        goal = single("goal")
        if goal is not None and kind is not ArchitectureKind.AFS1:
            check_formula(goal, raw.singles["goal"][1], "goal")

        if kind is ArchitectureKind.AFS1:
            reject_irrelevant("depth", "goal")
            if raw.predict:
                self.warn("predict rows are ignored for afs1 agents", raw.predict[0][-1])
            if raw.pool:
                self.warn("pool rows are ignored for afs1 agents", raw.pool[0][-1])
            if projection != 1:
                self.error(
                    "afs1 generates single acts; projection must be 1",
                    raw.singles["projection"][1],
                )
                ok = False
            react: dict[Formula, ActId] = {}
            for formula, act, tok in raw.react:
                check_formula(formula, tok, "react formula")
                if act not in act_set:
                    self.error(f"react act {act!r} is not a declared act", tok)
                    ok = False
                if formula in react and react[formula] != act:
                    self.error(f"formula {formula!r} reacts with two acts", tok)
                    ok = False
                elif formula in react:
                    self.warn(f"react row for {formula!r} declared twice", tok)
                else:
                    react[formula] = act
            return None if not ok else AgentDecl(
                name=raw.name,
                universe_name=raw.universe_name,
                kind=kind,
                projection=1,
                representation=tuple(sorted(representation.items())),
                react_rows=tuple(sorted(react.items())),
            )

        if raw.react:
            self.warn(
                f"react rows are ignored for {kind.value} agents", raw.react[0][-1]
            )

        def gather_routes(
            rows: list, with_index: bool
        ) -> tuple[dict, int]:
            routes: dict = {}
            longest = 1
            for row in rows:
                if with_index:
                    index, source, target, seq, tok = row
                    key = (index, source, target)
                else:
                    source, target, seq, tok = row
                    key = (source, target)
                check_formula(source, tok, "route source")
                check_formula(target, tok, "route goal")
                check_acts(seq, tok)
                if key in routes and routes[key] != seq:
                    self.error(f"conflicting route for {key}", tok)
                elif key in routes:
                    self.warn(f"route {key} declared twice", tok)
                else:
                    routes[key] = seq
                    longest = max(longest, len(seq))
            return routes, longest

        if kind in (ArchitectureKind.AFS2A, ArchitectureKind.AFS2B):
            if raw.pool:
                self.warn(
                    f"pool rows are ignored for {kind.value} agents", raw.pool[0][-1]
                )
            if kind is ArchitectureKind.AFS2A and goal is None:
                self.error(f"afs2a agent {raw.name!r} declares no goal", at)
                ok = False
            routes, longest = gather_routes(raw.predict, with_index=False)
            depth = single("depth")
            if depth is not None and depth < 1:
                self.error("depth must be at least 1", raw.singles["depth"][1])
                ok = False
            depth = depth if depth and depth >= 1 else longest
            too_long = [k for k, seq in routes.items() if len(seq) > depth]
            for key in sorted(too_long):
                self.error(
                    f"route {key} is longer than the declared depth {depth}",
                    raw.singles["depth"][1],
                )
                ok = False
            if projection > depth:
                self.error(
                    f"projection {projection} exceeds the depth bound {depth}",
                    raw.singles["projection"][1],
                )
                ok = False
            return None if not ok else AgentDecl(
                name=raw.name,
                universe_name=raw.universe_name,
                kind=kind,
                depth=depth,
                projection=projection,
                goal=goal,
                representation=tuple(sorted(representation.items())),
                predict_rows=tuple(
                    (s, g, seq) for (s, g), seq in sorted(routes.items())
                ),
            )

        # AFS-IIIA: candidate pool of route tables.
        if raw.predict:
            self.error(
                "afs3a routes must carry a pool index (pool N predict ...)",
                raw.predict[0][-1],
            )
            ok = False
        if goal is None:
            self.error(f"afs3a agent {raw.name!r} declares no goal", at)
            ok = False
        routes, longest = gather_routes(raw.pool, with_index=True)
        indices = {i for (i, _, _) in routes}
        if not indices:
            self.error(f"afs3a agent {raw.name!r} declares an empty pool", at)
            ok = False
        elif sorted(indices) != list(range(len(indices))):
            self.error(
                f"pool indices must be contiguous from 0, found {sorted(indices)}", at
            )
            ok = False
        depth = single("depth")
        if depth is not None and depth < 1:
            self.error("depth must be at least 1", raw.singles["depth"][1])
            ok = False
        depth = depth if depth and depth >= 1 else longest
        for key in sorted(k for k, seq in routes.items() if len(seq) > depth):
            self.error(
                f"route {key} is longer than the declared depth {depth}",
                raw.singles["depth"][1],
            )
            ok = False
        if projection > depth:
            self.error(
                f"projection {projection} exceeds the depth bound {depth}",
                raw.singles["projection"][1],
            )
            ok = False
        return None if not ok else AgentDecl(
            name=raw.name,
            universe_name=raw.universe_name,
            kind=kind,
            depth=depth,
            projection=projection,
            goal=goal,
            representation=tuple(sorted(representation.items())),
            pool_rows=tuple(
                (i, s, g, seq) for (i, s, g), seq in sorted(routes.items())
            ),
        )


@dataclass
class _RawAgent:
    name: str
    universe_name: str
    line: int
    column: int
    singles: dict[str, tuple[object, _Token]] = field(default_factory=dict)
    represents: list[tuple[str, str, _Token]] = field(default_factory=list)
    react: list[tuple[str, str, _Token]] = field(default_factory=list)
    predict: list[tuple[str, str, tuple[str, ...], _Token]] = field(default_factory=list)
    pool: list[tuple[int, str, str, tuple[str, ...], _Token]] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Public entry points


def parse(text: str) -> ParseResult:
    """Parse a document; the document is withheld if any error occurred."""
    parser = _Parser(text)
    doc, diags = parser.parse_document()
    return ParseResult(doc, diags)


def parse_file(path: str | Path) -> ParseResult:
    return parse(Path(path).read_text(encoding="utf-8"))


def load_document(path: str | Path) -> SpecDocument:
    """Parse a file, raising SpecInvalid when it does not check out."""
    result = parse_file(path)
    if result.document is None:
        raise SpecInvalid(str(path), result.diagnostics)
    return result.document


# ---------------------------------------------------------------------------
# Serializer


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _serialize_universe(u: UniverseDecl, out: list[str]) -> None:
    out.append(f"universe {_quote(u.name)} {{")
    out.append("  states: " + " ".join(u.states) + ";")
    out.append("  acts: " + " ".join(u.acts) + ";")
    out.append(f"  initial: {u.initial};")
    out.append(f"  neutral_act: {u.neutral_act};")
    for word in ("positive", "neutral", "negative"):
        members = [s for s, c in u.classes if c == word]
        if members:
            out.append(f"  classify {word}: " + " ".join(members) + ";")
    for s, a, t in u.transitions:
        out.append(f"  transition {s} {a} {t};")
    out.append("  energy {")
    for label, value in zip(_ENERGY_FIELDS, u.energy):
        out.append(f"    {label}: {value};")
    out.append("  }")
    out.append("}")


def _serialize_agent(a: AgentDecl, out: list[str]) -> None:
    out.append(f"agent {_quote(a.name)} in {_quote(a.universe_name)} {{")
    out.append(f"  architecture: {a.kind.value};")
    if a.seed is not None:
        out.append(f"  seed: {a.seed};")
    if a.constant is not None:
        kind, payload = a.constant
        if kind == "digits":
            out.append(f"  constant: digits {_quote(payload)};")
        else:
            out.append(f"  constant: {kind};")
    if a.depth is not None:
        out.append(f"  depth: {a.depth};")
    if a.projection is not None:
        out.append(f"  projection: {a.projection};")
    if a.goal is not None:
        out.append(f"  goal: {_quote(a.goal)};")
    for state, formula in a.representation:
        out.append(f"  represents {state} -> {_quote(formula)};")
    for formula, act in a.react_rows:
        out.append(f"  react {_quote(formula)} : {act};")
    for source, goal, seq in a.predict_rows:
        out.append(f"  predict {_quote(source)} -> {_quote(goal)} : " + " ".join(seq) + ";")
    for index, source, goal, seq in a.pool_rows:
        out.append(
            f"  pool {index} predict {_quote(source)} -> {_quote(goal)} : "
            + " ".join(seq)
            + ";"
        )
    out.append("}")


def serialize(doc: SpecDocument) -> str:
    """Canonical text form; parsing it reproduces doc structurally."""
    out: list[str] = []
    first = True
    for u in doc.universes:
        if not first:
            out.append("")
        first = False
        _serialize_universe(u, out)
    for a in doc.agents:
        if not first:
            out.append("")
        first = False
        _serialize_agent(a, out)
    return "\n".join(out) + "\n"
