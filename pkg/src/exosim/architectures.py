"""Behavior generators and sensitive functional architectures.

Three elementary ways of generating acts:

* random: a seeded pseudo-random draw over the act alphabet,
* positional: replaying the digits of a fixed constant in base |acts|,
* sensitive: reading the current state through a representation map and
  looking the perceived formula up in a prediction table.

Sensitive generation comes in four architectures. ``afs1`` reacts to the
formula directly with one act. ``afs2a`` keeps routes (act sequences)
from a source formula toward a fixed goal formula. ``afs2b`` routes
toward a remembered formula instead, recalling the previous step's
perception. ``afs3a`` carries a pool of candidate route tables and
learns which one to trust by scoring its predictions against outcomes.

Every generated sequence is collapsed to a single act by a fixed
projection index (1-based); an empty generation falls back to the
universe's neutral act, which is what makes unrepresented states safe
to encounter but expensive to linger in.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

from .representation import Formula, RepresentationMap, interpret_act
from .universe import ActId, StateId, Universe, Violation

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One scrambling round of the splitmix64 generator."""
    z = (x + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def unit_draw(seed: int, t: int) -> float:
    """Deterministic draw in [0, 1) for step t of a seeded stream.

    Addressable by position: the stream never needs to be replayed from
    the start to know its value at step t.
    """
    return splitmix64((seed + t * _GOLDEN) & _MASK64) / 2**64


class ArchitectureError(Exception):
    pass


class NotSensitive(ArchitectureError):
    """A sensitive-only operation was applied to an elementary agent."""


class ProjectionOutOfRange(ArchitectureError):
    """The projection index points past the end of a generated sequence."""


class InconsistentMetadata(ArchitectureError):
    """Unit graph inverse/bijectivity declarations contradict each other."""


@dataclass
class RandomFasa:
    """Seeded random act generation over a fixed act order.

    weights, when given, must align with act_order; the default is a
    uniform draw.
    """

    seed: int
    act_order: tuple[ActId, ...]
    weights: tuple[float, ...] | None = None

    def act_at(self, t: int) -> ActId:
        u = unit_draw(self.seed, t)
        if self.weights is None:
            return self.act_order[int(u * len(self.act_order))]
        total = sum(self.weights)
        acc = 0.0
        for act, w in zip(self.act_order, self.weights):
            acc += w / total
            if u < acc:
                return act
        return self.act_order[-1]


@dataclass
class PositionalFasa:
    """Acts read off a digit stream in base len(act_order)."""

    source: object  # anything with digit(position) -> int
    act_order: tuple[ActId, ...]

    def act_at(self, t: int) -> ActId:
        return self.act_order[self.source.digit(t)]


@dataclass(frozen=True)
class ReactionTable:
    """Formula -> single act token; absent formulas generate nothing."""

    entries: Mapping[Formula, ActId]

    def act(self, formula: Formula) -> ActId | None:
        return self.entries.get(formula)


@dataclass(frozen=True)
class RouteTable:
    """(source formula, goal formula) -> act token sequence.

    Sequences are non-empty and no longer than depth_max. A missing
    entry means the table generates nothing for that pair.
    """

    entries: Mapping[tuple[Formula, Formula], tuple[ActId, ...]]
    depth_max: int

    def sequence(self, source: Formula, goal: Formula) -> tuple[ActId, ...] | None:
        return self.entries.get((source, goal))

    def validate(self) -> list[Violation]:
        out: list[Violation] = []
        if self.depth_max < 1:
            out.append(
                Violation(
                    "NonPositiveDepth",
                    (str(self.depth_max),),
                    "route depth bound must be at least 1",
                )
            )
        for (source, goal), seq in sorted(self.entries.items()):
            if not seq:
                out.append(
                    Violation(
                        "EmptyRoute",
                        (source, goal),
                        f"route ({source!r}, {goal!r}) has an empty sequence",
                    )
                )
            elif len(seq) > self.depth_max:
                out.append(
                    Violation(
                        "RouteTooLong",
                        (source, goal),
                        f"route ({source!r}, {goal!r}) is longer than depth {self.depth_max}",
                    )
                )
        return out


class ArchitectureKind(Enum):
    RANDOM = "random"
    POSITIONAL = "positional"
    AFS1 = "afs1"
    AFS2A = "afs2a"
    AFS2B = "afs2b"
    AFS3A = "afs3a"

    @property
    def is_sensitive(self) -> bool:
        return self in (
            ArchitectureKind.AFS1,
            ArchitectureKind.AFS2A,
            ArchitectureKind.AFS2B,
            ArchitectureKind.AFS3A,
        )


@dataclass(frozen=True)
class HistoryRecord:
    """One resolved prediction episode of a learning agent."""

    observed: Formula
    table_index: int
    success: bool


@dataclass
class _Episode:
    """A pending prediction being scored: resolved by reaching the goal
    within limit steps of issuance, or by running out of steps."""

    observed: Formula
    table_index: int
    goal: Formula
    limit: int
    age: int = 0


@dataclass
class AgentArchitecture:
    """One agent: an architecture kind plus the tables that kind needs.

    Mutable fields (memory, history, active_index, episode bookkeeping)
    are per-run state; clone_for_run produces a fresh agent so runs never
    contaminate each other.
    """

    name: str
    kind: ArchitectureKind
    representation: RepresentationMap | None = None
    projection_index: int = 1
    random_fasa: RandomFasa | None = None
    positional_fasa: PositionalFasa | None = None
    reaction: ReactionTable | None = None
    routes: RouteTable | None = None
    goal: Formula | None = None
    memory: Formula | None = None
    candidate_pool: tuple[RouteTable, ...] = ()
    history: list[HistoryRecord] = field(default_factory=list)
    active_index: int = 0
    _episode: _Episode | None = field(default=None, repr=False)

    def clone_for_run(self, seed: int | None = None) -> AgentArchitecture:
        """Fresh copy with per-run state reset; seed overrides the random
        stream when given."""
        clone = copy.copy(self)
        clone.history = []
        clone.active_index = 0
        clone._episode = None
        if self.kind is ArchitectureKind.AFS2B:
            clone.memory = self.goal
        if self.random_fasa is not None:
            clone.random_fasa = replace(
                self.random_fasa,
                seed=self.random_fasa.seed if seed is None else seed,
            )
        return clone

    def active_routes(self) -> RouteTable | None:
        """The route table currently steering the agent, if any."""
        if self.kind is ArchitectureKind.AFS3A:
            return self.candidate_pool[self.active_index]
        return self.routes


def via_class(agent: AgentArchitecture) -> int:
    """Which via the agent acts through: the 1-based projection index
    selecting one act out of each generated sequence."""
    if not agent.kind.is_sensitive:
        raise NotSensitive(f"agent {agent.name!r} has no generation to project")
    return agent.projection_index


@dataclass(frozen=True)
class StepTrace:
    """What one sensitive step perceived, generated, and chose."""

    formula: Formula | None
    sequence: tuple[ActId, ...] | None
    act: ActId


def step_random(fasa: RandomFasa, t: int) -> ActId:
    return fasa.act_at(t)


def step_positional(fasa: PositionalFasa, t: int) -> ActId:
    return fasa.act_at(t)


def _generate(agent: AgentArchitecture, formula: Formula) -> tuple[ActId, ...] | None:
    kind = agent.kind
    if kind is ArchitectureKind.AFS1:
        act = agent.reaction.act(formula) if agent.reaction else None
        return None if act is None else (act,)
    if kind is ArchitectureKind.AFS2A:
        if agent.routes is None or agent.goal is None:
            return None
        return agent.routes.sequence(formula, agent.goal)
    if kind is ArchitectureKind.AFS2B:
        if agent.routes is None or agent.memory is None:
            return None
        return agent.routes.sequence(formula, agent.memory)
    if kind is ArchitectureKind.AFS3A:
        table = agent.active_routes()
        if table is None or agent.goal is None:
            return None
        return table.sequence(formula, agent.goal)
    raise NotSensitive(f"agent {agent.name!r} is {kind.value}, not sensitive")


def _resolve_episode(agent: AgentArchitecture, formula: Formula | None) -> None:
    ep = agent._episode
    if ep is None:
        return
    ep.age += 1
    if formula is not None and formula == ep.goal:
        agent._episode = None
        update_learning(agent, ep.observed, True, table_index=ep.table_index)
    elif ep.age >= ep.limit:
        agent._episode = None
        update_learning(agent, ep.observed, False, table_index=ep.table_index)


def step_sensitive_traced(
    agent: AgentArchitecture, universe: Universe, state: StateId
) -> StepTrace:
    """One sensitive step: perceive, generate, project, fall back.

    Returns the full trace; step_sensitive returns just the act.
    """
    if not agent.kind.is_sensitive:
        raise NotSensitive(f"agent {agent.name!r} is {agent.kind.value}, not sensitive")
    formula = (
        agent.representation.formula_for(state)
        if agent.representation is not None
        else None
    )
    if agent.kind is ArchitectureKind.AFS3A:
        _resolve_episode(agent, formula)
    sequence = None if formula is None else _generate(agent, formula)
    if agent.kind is ArchitectureKind.AFS3A and sequence and agent._episode is None:
        table = agent.active_routes()
        agent._episode = _Episode(
            observed=formula,
            table_index=agent.active_index,
            goal=agent.goal,
            limit=table.depth_max,
        )
    if agent.kind is ArchitectureKind.AFS2B:
        # One-step recall: next step routes toward what was just seen.
        agent.memory = formula
    if not sequence:
        return StepTrace(formula, sequence, universe.neutral_act)
    c = agent.projection_index
    if c > len(sequence):
        raise ProjectionOutOfRange(
            f"projection index {c} exceeds generated sequence of length {len(sequence)}"
        )
    act = interpret_act(universe, sequence[c - 1])
    return StepTrace(formula, sequence, act)


def step_sensitive(agent: AgentArchitecture, universe: Universe, state: StateId) -> ActId:
    return step_sensitive_traced(agent, universe, state).act


def choose_act(
    agent: AgentArchitecture, universe: Universe, state: StateId, t: int
) -> ActId:
    """Dispatch one step of any architecture kind."""
    if agent.kind is ArchitectureKind.RANDOM:
        return step_random(agent.random_fasa, t)
    if agent.kind is ArchitectureKind.POSITIONAL:
        return step_positional(agent.positional_fasa, t)
    return step_sensitive(agent, universe, state)


def choose_act_traced(
    agent: AgentArchitecture, universe: Universe, state: StateId, t: int
) -> StepTrace:
    if agent.kind.is_sensitive:
        return step_sensitive_traced(agent, universe, state)
    return StepTrace(None, None, choose_act(agent, universe, state, t))


def success_rates(agent: AgentArchitecture) -> list[Fraction]:
    """Per-candidate empirical success rate; unattempted candidates are 0."""
    attempts = [0] * len(agent.candidate_pool)
    successes = [0] * len(agent.candidate_pool)
    for rec in agent.history:
        attempts[rec.table_index] += 1
        if rec.success:
            successes[rec.table_index] += 1
    return [
        Fraction(successes[i], attempts[i]) if attempts[i] else Fraction(0)
        for i in range(len(agent.candidate_pool))
    ]


def update_learning(
    agent: AgentArchitecture,
    observed: Formula,
    success: bool,
    table_index: int | None = None,
) -> AgentArchitecture:
    """Record one scored prediction and re-pick the active candidate.

    The active candidate is the one with the highest empirical success
    rate so far; ties go to the lowest index. Mutates and returns agent.
    """
    if agent.kind is not ArchitectureKind.AFS3A:
        raise NotSensitive(f"agent {agent.name!r} is not a learning architecture")
    if not agent.candidate_pool:
        raise ArchitectureError(f"agent {agent.name!r} has an empty candidate pool")
    index = agent.active_index if table_index is None else table_index
    if not 0 <= index < len(agent.candidate_pool):
        raise ArchitectureError(f"candidate index {index} out of range")
    agent.history.append(HistoryRecord(observed, index, success))
    rates = success_rates(agent)
    best = max(range(len(rates)), key=lambda i: (rates[i], -i))
    agent.active_index = best
    return agent


@dataclass(frozen=True)
class OrientedViolation:
    """A route that, replayed from its source state, misses its goal."""

    source_formula: Formula
    goal_formula: Formula
    sequence: tuple[ActId, ...]
    reached: StateId
    expected: StateId


def check_oriented_table(
    table: RouteTable, rmap: RepresentationMap, universe: Universe
) -> list[OrientedViolation]:
    """Replay every route from its source state; report routes that do
    not land on the state its goal formula represents.

    Source and goal formulas must each represent exactly one state.
    """
    out: list[OrientedViolation] = []
    for (source_f, goal_f), seq in sorted(table.entries.items()):
        state = rmap.inverse(source_f)
        expected = rmap.inverse(goal_f)
        for token in seq:
            state = universe.successor(state, interpret_act(universe, token))
        if state != expected:
            out.append(OrientedViolation(source_f, goal_f, seq, state, expected))
    return out


def check_oriented(agent: AgentArchitecture, universe: Universe) -> list[OrientedViolation]:
    """check_oriented_table for the agent's steering route table."""
    table = agent.active_routes()
    if table is None:
        raise ArchitectureError(f"agent {agent.name!r} has no route table to check")
    if agent.representation is None:
        raise ArchitectureError(f"agent {agent.name!r} has no representation")
    return check_oriented_table(table, agent.representation, universe)


@dataclass(frozen=True)
class FunctionalUnit:
    """A node in a composition graph of functional units."""

    id: str
    bijective: bool = False
    inverse_of: str | None = None


@dataclass(frozen=True)
class UnitGraph:
    """Functional units wired output-to-input; edges are (from, to)."""

    units: tuple[FunctionalUnit, ...]
    edges: frozenset[tuple[str, str]]

    def unit(self, unit_id: str) -> FunctionalUnit:
        for u in self.units:
            if u.id == unit_id:
                return u
        raise InconsistentMetadata(f"edge references unknown unit {unit_id!r}")


def detect_redundancy(graph: UnitGraph) -> list[tuple[str, str, str]]:
    """Find compositions g(f_inv(f(x))) that collapse to g(x).

    A triple (f, f_inv, g) is redundant when f is bijective, f_inv is
    declared its inverse, f feeds f_inv, and f_inv feeds g. Declarations
    must be mutual and bijective on both sides, else the metadata is
    inconsistent.
    """
    by_id: dict[str, FunctionalUnit] = {}
    for u in graph.units:
        if u.id in by_id:
            raise InconsistentMetadata(f"duplicate unit id {u.id!r}")
        by_id[u.id] = u
    for u in graph.units:
        if u.inverse_of is None:
            continue
        partner = by_id.get(u.inverse_of)
        if partner is None:
            raise InconsistentMetadata(
                f"{u.id!r} claims to invert unknown unit {u.inverse_of!r}"
            )
        if partner.inverse_of != u.id:
            raise InconsistentMetadata(
                f"{u.id!r} inverts {partner.id!r} but not vice versa"
            )
        if not (u.bijective and partner.bijective):
            raise InconsistentMetadata(
                f"inverse pair ({u.id!r}, {partner.id!r}) must both be bijective"
            )
    for a, b in graph.edges:
        if a not in by_id or b not in by_id:
            raise InconsistentMetadata(f"edge ({a!r}, {b!r}) references unknown units")
    out: list[tuple[str, str, str]] = []
    for f_id, inv_id in sorted(graph.edges):
        inv = by_id[inv_id]
        if inv.inverse_of != f_id:
            continue
        for tail, g_id in sorted(graph.edges):
            if tail == inv_id:
                out.append((f_id, inv_id, g_id))
    return out
