"""Multi-particle random search with reversibility-based flagging.

Each particle repeats the single-particle draw process. After every
round a particle checks whether its newest position strictly improves
on any of its earlier ones; each such improvement is tested for
reversibility after ``epsilon`` coarsening steps in every objective,
and positions whose final improvement arrow is reversible get flagged
as near-frontier candidates. Particles that saw no flag this round
select their longest improvement chain and probe the other particles'
current positions from its tip; reversible cross-particle improvements
flag the other particle's position and are recorded as cross links.

Flagging is a heuristic. The report therefore also carries the measured
precision and recall against the exact frontier oracle instead of
assuming either.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import PreconditionError
from .instance import Instance
from .particle import sample_admissible
from .scale import interleaving_distance
from .valuation import admissible, longest_strict_chains, minorizes, pareto_frontier


@dataclass(frozen=True)
class SwarmConfig:
    particles: int
    draws: int
    epsilon: int
    seed: int
    budget: int = 10**5

    def validate(self) -> None:
        if self.particles < 1:
            raise PreconditionError("need at least one particle")
        if self.draws < 1:
            raise PreconditionError("need at least one draw round")
        if self.epsilon < 0:
            raise PreconditionError("epsilon must be non-negative")


@dataclass(frozen=True)
class FlagEntry:
    particle: int
    draw_index: int
    functor: tuple
    witness: tuple  # ((particle, draw_index), ...) ending at the flagged position
    epsilon: int

    def to_dict(self) -> dict:
        return {
            "particle": self.particle,
            "draw_index": self.draw_index,
            "functor": list(self.functor),
            "witness": [list(w) for w in self.witness],
            "epsilon": self.epsilon,
        }


@dataclass(frozen=True)
class SwarmReport:
    config: SwarmConfig
    positions: tuple        # [particle][round] -> functor
    flagged: tuple          # FlagEntry, deduplicated, discovery order
    chains: tuple           # [particle] -> all longest improvement chains
    cross_links: tuple      # (from_particle, tip_index, to_particle, draw_index)
    statistics: dict = field(compare=False)

    def to_dict(self) -> dict:
        return {
            "config": {
                "particles": self.config.particles,
                "draws": self.config.draws,
                "epsilon": self.config.epsilon,
                "seed": self.config.seed,
            },
            "positions": [[list(p) for p in row] for row in self.positions],
            "flagged": [f.to_dict() for f in self.flagged],
            "chains": [[list(c) for c in per] for per in self.chains],
            "cross_links": [list(x) for x in self.cross_links],
            "statistics": self.statistics,
        }


def _reversible_improvement(inst: Instance, src: tuple, dst: tuple, eps: int) -> bool:
    """All objectives: the scaled conversion src -> dst exists at every
    scale and can be reversed after ``eps`` coarsening steps.

    A missing scaled conversion counts as not reversible rather than an
    error: the flag test is advisory and simply fails."""
    for alpha in range(len(inst.objectives)):
        y = inst.scaled_image(alpha, src)
        z = inst.scaled_image(alpha, dst)
        hom = y.base.hom
        for s in range(y.grid_len):
            if not hom[y.values[s]][z.values[s]]:
                return False
            if not hom[z.values[s]][y.value_at(s + eps)]:
                return False
    return True


def _chains_ending_at(j: int, edge, best) -> list:
    """All maximal-length improvement chains that end at index j."""
    out: list = []

    def walk(i: int, suffix: list) -> None:
        if best[i] == 1:
            out.append(tuple([i] + suffix))
            return
        for p in range(i):
            if edge[p][i] and best[p] == best[i] - 1:
                walk(p, [i] + suffix)

    walk(j, [])
    return out


def run_swarm(inst: Instance, config: SwarmConfig) -> SwarmReport:
    """Deterministic for a fixed seed: per-particle RNG substreams are
    spawned up front and every search loop runs in fixed index order."""
    config.validate()
    if inst.scale is None:
        raise PreconditionError("swarm search needs the instance's scale section")
    system = inst.system
    n_rounds = config.draws
    n_particles = config.particles
    streams = np.random.SeedSequence(config.seed).spawn(n_particles)
    gens = [np.random.default_rng(s) for s in streams]
    counters = [[0, 0] for _ in range(n_particles)]

    positions: list = [[] for _ in range(n_particles)]
    for i in range(n_particles):
        positions[i].append(
            sample_admissible(system, inst.distribution, gens[i], config.budget, counters[i])
        )

    flags: list = []
    flagged_keys: set = set()
    cross_links: list = []
    # incremental improvement DAG per particle: edge[i][a][b] for a < b
    edges: list = [[[False]] for _ in range(n_particles)]

    def add_flag(particle: int, k: int, functor: tuple, witness: tuple) -> None:
        key = (particle, k)
        if key not in flagged_keys:
            flagged_keys.add(key)
            flags.append(FlagEntry(particle, k, functor, witness, config.epsilon))

    for k in range(1, n_rounds + 1):
        for i in range(n_particles):
            positions[i].append(
                sample_admissible(system, inst.distribution, gens[i], config.budget, counters[i])
            )
            for row in edges[i]:
                row.append(False)
            edges[i].append([False] * (k + 1))
            for a in range(k):
                edges[i][a][k] = minorizes(system, positions[i][a], positions[i][k], strict=True)

        flagged_this_round = set()
        for i in range(n_particles):
            edge = edges[i]
            best = [1] * (k + 1)
            for b in range(k + 1):
                for a in range(b):
                    if edge[a][b] and best[a] + 1 > best[b]:
                        best[b] = best[a] + 1
            hits = [
                a for a in range(k)
                if edge[a][k] and _reversible_improvement(
                    inst, positions[i][a], positions[i][k], config.epsilon)
            ]
            if hits:
                top = max(best[a] for a in hits)
                candidates = []
                for a in hits:
                    if best[a] == top:
                        for c in _chains_ending_at(a, edge, best):
                            candidates.append(c + (k,))
                chain = min(candidates)
                add_flag(i, k, positions[i][k], tuple((i, idx) for idx in chain))
                flagged_this_round.add(i)

        for i in range(n_particles):
            if i in flagged_this_round:
                continue
            edge = edges[i]
            best = [1] * (k + 1)
            for b in range(k + 1):
                for a in range(b):
                    if edge[a][b] and best[a] + 1 > best[b]:
                        best[b] = best[a] + 1
            top = max(best)
            own_chains = []
            for j in range(k + 1):
                if best[j] == top:
                    own_chains.extend(_chains_ending_at(j, edge, best))
            chain = min(own_chains)
            tip = chain[-1]
            tip_draw = positions[i][tip]
            for j in range(n_particles):
                if j == i:
                    continue
                cand = positions[j][k]
                if minorizes(system, tip_draw, cand, strict=True):
                    cross_links.append((i, tip, j, k))
                    if _reversible_improvement(inst, tip_draw, cand, config.epsilon):
                        witness = tuple((i, idx) for idx in chain) + ((j, k),)
                        add_flag(j, k, cand, witness)

    final_chains = tuple(
        tuple(longest_strict_chains(system, positions[i])) for i in range(n_particles)
    )
    frontier = pareto_frontier(system)
    certified = [
        certify_neighborhood(inst, f.functor, config.epsilon, _frontier=frontier)
        for f in flags
    ]
    represented = 0
    for group in frontier.groups:
        hit = False
        for f in flags:
            for member in group.members:
                if all(
                    interleaving_distance(
                        inst.scaled_image(a, f.functor), inst.scaled_image(a, member)
                    ) <= config.epsilon
                    for a in range(len(inst.objectives))
                ):
                    hit = True
                    break
            if hit:
                break
        if hit:
            represented += 1

    lengths = [max((len(c) for c in per), default=1) for per in final_chains]
    hist: dict = {}
    for L in lengths:
        hist[str(L)] = hist.get(str(L), 0) + 1
    attempts = sum(c[0] for c in counters)
    accepted = sum(c[1] for c in counters)
    stats = {
        "acceptance_rate": accepted / attempts if attempts else 1.0,
        "acceptance_rate_per_particle": [
            c[1] / c[0] if c[0] else 1.0 for c in counters
        ],
        "chain_length_histogram": hist,
        "flag_count": len(flags),
        "cross_link_count": len(cross_links),
        "frontier_group_count": len(frontier.groups),
        "precision": (sum(certified) / len(certified)) if certified else None,
        "recall": (represented / len(frontier.groups)) if frontier.groups else None,
    }
    return SwarmReport(
        config=config,
        positions=tuple(tuple(p) for p in positions),
        flagged=tuple(flags),
        chains=final_chains,
        cross_links=tuple(cross_links),
        statistics=stats,
    )


def certify_neighborhood(inst: Instance, values: Sequence[int], eps: int,
                         _frontier=None) -> bool:
    """Exact oracle: is some frontier member within interleaving distance
    ``eps`` of ``values`` in every objective?"""
    if inst.scale is None:
        raise PreconditionError("certification needs the instance's scale section")
    values = tuple(values)
    if not admissible(inst.system, values):
        raise PreconditionError(f"system {values} is not admissible")
    frontier = _frontier if _frontier is not None else pareto_frontier(inst.system)
    mine = [inst.scaled_image(a, values) for a in range(len(inst.objectives))]
    for group in frontier.groups:
        for member in group.members:
            if all(
                interleaving_distance(mine[a], inst.scaled_image(a, member)) <= eps
                for a in range(len(inst.objectives))
            ):
                return True
    return False
