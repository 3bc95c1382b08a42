"""Trajectory runner and the persistence experiment.

A trajectory steps one agent through its universe until it goes
exoinactive or hits the step bound. The experiment repeats that for
every agent in a document, derives one fresh seed per run from the
master seed, and collects persistence times into a CSV plus per-agent
summaries with rank-sum comparisons of the sensitive group against the
random and positional groups.

Identical inputs reproduce identical output bytes: rows are emitted in
run_id order and every random stream is positioned by its derived seed
alone.
"""

from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass
from pathlib import Path

from .architectures import AgentArchitecture, ArchitectureKind, choose_act_traced, splitmix64
from .dsl import SpecDocument, load_document
from .representation import Formula
from .stats import rank_sum_test
from .universe import (
    ActId,
    TerminalReason,
    Trajectory,
    TrajectoryStep,
    Universe,
)

CSV_HEADER = ("run_id", "agent", "kind", "seed", "persistence_steps", "terminal_reason")


class HarnessError(Exception):
    pass


class MissingAgentKind(HarnessError):
    """The experiment needs random, positional, and sensitive agents."""


def derive_seed(master_seed: int, k: int) -> int:
    """Seed for run k: two scrambling rounds keep runs k and k+1 apart."""
    return splitmix64(splitmix64(master_seed) + k)


@dataclass(frozen=True)
class TraceRecord:
    """One step as the agent saw it: perception, generation, choice."""

    t: int
    state: str
    formula: Formula | None
    sequence: tuple[ActId, ...] | None
    act: ActId
    energy_after: int


def run_trajectory(
    universe: Universe,
    agent: AgentArchitecture,
    max_steps: int,
    seed: int | None = None,
) -> Trajectory:
    trajectory, _ = run_trajectory_traced(universe, agent, max_steps, seed)
    return trajectory


def run_trajectory_traced(
    universe: Universe,
    agent: AgentArchitecture,
    max_steps: int,
    seed: int | None = None,
) -> tuple[Trajectory, tuple[TraceRecord, ...]]:
    """Run one agent from the initial state; returns the trajectory and
    one trace record per step.

    The agent is cloned first, so repeated calls with the same inputs
    replay the same run regardless of what earlier runs did.
    """
    runner = agent.clone_for_run(seed)
    state = universe.initial
    energy = universe.energy.initial_energy
    steps: list[TrajectoryStep] = []
    traces: list[TraceRecord] = []
    reason = TerminalReason.STEP_LIMIT
    for t in range(max_steps):
        trace = choose_act_traced(runner, universe, state, t)
        nxt, energy, exoactive = universe.advance(state, trace.act, energy)
        steps.append(TrajectoryStep(t, state, trace.act, nxt, energy))
        traces.append(
            TraceRecord(t, state, trace.formula, trace.sequence, trace.act, energy)
        )
        state = nxt
        if not exoactive:
            reason = TerminalReason.EXOINACTIVE
            break
    return (
        Trajectory(
            initial_state=universe.initial,
            initial_energy=universe.energy.initial_energy,
            steps=tuple(steps),
            terminal_reason=reason,
        ),
        tuple(traces),
    )


@dataclass(frozen=True)
class ExperimentConfig:
    spec_path: Path
    runs_per_agent: int
    max_steps: int
    master_seed: int
    output_path: Path


@dataclass(frozen=True)
class RunRecord:
    run_id: int
    agent: str
    kind: str
    seed: int
    persistence_steps: int
    terminal_reason: str


@dataclass(frozen=True)
class AgentSummary:
    agent: str
    kind: str
    mean: float
    median: float
    min: int
    max: int


@dataclass(frozen=True)
class GroupComparison:
    """Sensitive group versus one elementary group."""

    against: str
    u_statistic: float
    p_value: float
    sensitive_mean: float
    other_mean: float


@dataclass(frozen=True)
class ExperimentResult:
    rows: tuple[RunRecord, ...]
    summaries: tuple[AgentSummary, ...]
    comparisons: tuple[GroupComparison, ...]


def _group_of(kind: ArchitectureKind) -> str:
    if kind.is_sensitive:
        return "sensitive"
    return kind.value


def run_experiment_from_document(
    doc: SpecDocument, cfg: ExperimentConfig
) -> ExperimentResult:
    agents: list[tuple[AgentArchitecture, Universe, str]] = []
    for decl in doc.agents:
        universe = doc.build_universe(decl.universe_name)
        agents.append((decl.build(universe), universe, decl.kind.value))
    groups_present = {_group_of(a.kind) for a, _, _ in agents}
    for required in ("random", "positional", "sensitive"):
        if required not in groups_present:
            raise MissingAgentKind(
                f"experiment needs at least one {required} agent"
            )
    rows: list[RunRecord] = []
    by_group: dict[str, list[int]] = {"random": [], "positional": [], "sensitive": []}
    summaries: list[AgentSummary] = []
    for agent_index, (agent, universe, kind) in enumerate(agents):
        persistences: list[int] = []
        for run_index in range(cfg.runs_per_agent):
            run_id = agent_index * cfg.runs_per_agent + run_index
            seed = derive_seed(cfg.master_seed, run_id)
            trajectory = run_trajectory(universe, agent, cfg.max_steps, seed)
            rows.append(
                RunRecord(
                    run_id=run_id,
                    agent=agent.name,
                    kind=kind,
                    seed=seed,
                    persistence_steps=trajectory.persistence,
                    terminal_reason=trajectory.terminal_reason.value,
                )
            )
            persistences.append(trajectory.persistence)
        by_group[_group_of(agent.kind)].extend(persistences)
        summaries.append(
            AgentSummary(
                agent=agent.name,
                kind=kind,
                mean=statistics.fmean(persistences) if persistences else 0.0,
                median=statistics.median(persistences) if persistences else 0.0,
                min=min(persistences, default=0),
                max=max(persistences, default=0),
            )
        )
    comparisons = []
    for against in ("random", "positional"):
        if by_group["sensitive"] and by_group[against]:
            u, p = rank_sum_test(by_group["sensitive"], by_group[against])
            comparisons.append(
                GroupComparison(
                    against=against,
                    u_statistic=u,
                    p_value=p,
                    sensitive_mean=statistics.fmean(by_group["sensitive"]),
                    other_mean=statistics.fmean(by_group[against]),
                )
            )
    return ExperimentResult(tuple(rows), tuple(summaries), tuple(comparisons))


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Load the document, run every agent, and write the CSV."""
    doc = load_document(cfg.spec_path)
    result = run_experiment_from_document(doc, cfg)
    write_csv(result, cfg.output_path)
    return result


def write_csv(result: ExperimentResult, path: Path | str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in result.rows:
            writer.writerow(
                (
                    row.run_id,
                    row.agent,
                    row.kind,
                    row.seed,
                    row.persistence_steps,
                    row.terminal_reason,
                )
            )
