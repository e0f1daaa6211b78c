"""Multi-objective valuations, admissibility and the upper frontier.

Each objective sends a system (length-n tuple of resource ids) to an
object of a target preorder, either through a lookup table indexed by
the system's lexicographic rank or by applying an object map to the
tensor evaluation of the full index set. A system is admissible when
every objective's image converts into that objective's goal. ``psi``
improves on ``phi`` when every objective has an arrow from the image of
``phi`` to the image of ``psi``; the frontier collects admissible
systems that no admissible system strictly improves on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np

from .errors import CapacityError, LoadError, PreconditionError, StructureError
from .rescat import ResourceCategory, TargetCategory
from .summing import DEFAULT_CAP, count_functors, evaluate, tuple_rank, tuple_unrank


@dataclass(frozen=True)
class Objective:
    """One valuation: a target preorder, a goal object, and the map itself.

    ``kind`` is ``"table"`` (``entries[rank]`` per system, K^n entries in
    lexicographic order) or ``"composed"`` (``h[c]`` per resource object,
    applied to the tensor evaluation of the whole index set).
    """

    target: TargetCategory
    goal: int
    kind: str
    entries: Optional[tuple] = None
    h: Optional[tuple] = None

    def image(self, cat: ResourceCategory, values: Sequence[int], rank: Optional[int] = None) -> int:
        if self.kind == "table":
            if rank is None:
                rank = tuple_rank(cat.size, values)
            return self.entries[rank]
        return self.h[evaluate(cat, values, range(len(values)))]


@dataclass(frozen=True)
class ObjectDistribution:
    """Strictly positive weights on resource objects, summing to one.

    Weights are kept as exact fractions; ``as_floats`` is the double view
    used on the fast paths. Induces the product measure on systems.
    """

    weights: tuple

    def __init__(self, weights: Sequence[Union[Fraction, float, int, str]]):
        ws = tuple(w if isinstance(w, Fraction) else Fraction(str(w)) for w in weights)
        object.__setattr__(self, "weights", ws)

    def validate(self, k: int, tol: float = 1e-12) -> None:
        if len(self.weights) != k:
            raise LoadError("distribution.shape", "distribution.weights",
                            f"expected {k} weights, got {len(self.weights)}")
        if any(w <= 0 for w in self.weights):
            raise LoadError("distribution.positive", "distribution.weights",
                            "all weights must be strictly positive")
        if abs(float(sum(self.weights)) - 1.0) > tol:
            raise LoadError("distribution.sum", "distribution.weights",
                            f"weights sum to {float(sum(self.weights))!r}, not 1")

    @cached_property
    def as_floats(self) -> np.ndarray:
        arr = np.array([float(w) for w in self.weights], dtype=float)
        arr.setflags(write=False)
        return arr

    def tuple_weight(self, values: Sequence[int], exact: bool = False):
        """Product-measure weight of one system."""
        if exact:
            out = Fraction(1)
            for v in values:
                out *= self.weights[v]
            return out
        out = 1.0
        for v in values:
            out *= self.as_floats[v]
        return out


@dataclass(frozen=True)
class ValuationSystem:
    """A resource category, a system size, and one or more objectives."""

    cat: ResourceCategory
    n: int
    objectives: tuple
    cap: int = DEFAULT_CAP

    @property
    def functor_count(self) -> int:
        return count_functors(self.cat.size, self.n)

    def _guard(self) -> None:
        total = self.functor_count
        if total > self.cap:
            raise CapacityError(
                f"{self.cat.size}^{self.n} = {total} systems exceeds cap {self.cap}",
                required=total,
                cap=self.cap,
            )

    @cached_property
    def image_tables(self) -> tuple:
        """Per objective, the image object for every rank."""
        self._guard()
        k, n = self.cat.size, self.n
        tables = []
        for obj in self.objectives:
            if obj.kind == "table":
                tables.append(tuple(obj.entries))
            else:
                import itertools

                tables.append(
                    tuple(
                        obj.h[evaluate(self.cat, tup, range(n))]
                        for tup in itertools.product(range(k), repeat=n)
                    )
                )
        return tuple(tables)

    @cached_property
    def image_class_vectors(self) -> tuple:
        """Per rank, the tuple of target iso classes of all objective images."""
        per_alpha = [
            tuple(obj.target.iso_class_of[img] for img in table)
            for obj, table in zip(self.objectives, self.image_tables)
        ]
        return tuple(zip(*per_alpha))

    @cached_property
    def admissible_flags(self) -> tuple:
        flags = [True] * self.functor_count
        for obj, table in zip(self.objectives, self.image_tables):
            hom, goal = obj.target.hom, obj.goal
            for r, img in enumerate(table):
                if flags[r] and not hom[img][goal]:
                    flags[r] = False
        return tuple(flags)

    def rank(self, values: Sequence[int]) -> int:
        if len(values) != self.n:
            raise PreconditionError(f"system size mismatch: {len(values)} != {self.n}")
        return tuple_rank(self.cat.size, values)

    def validate_maps(self) -> list:
        """Structural and iso-respect checks for the objectives.

        Returns LoadError records (not raised) so a loader can batch them.
        """
        problems = []
        k, total = self.cat.size, self.functor_count
        for i, obj in enumerate(self.objectives):
            path = f"valuations[{i}]"
            if obj.kind == "table":
                if obj.entries is None or len(obj.entries) != total:
                    problems.append(LoadError("valuation.shape", path + ".map.entries",
                                              f"table needs {total} entries"))
                    continue
                bad = [v for v in obj.entries if not 0 <= v < obj.target.size]
                if bad:
                    problems.append(LoadError("valuation.range", path + ".map.entries",
                                              f"image id {bad[0]} out of range"))
                    continue
            elif obj.kind == "composed":
                if obj.h is None or len(obj.h) != k:
                    problems.append(LoadError("valuation.shape", path + ".map.h",
                                              f"composed map needs {k} entries"))
                    continue
                if any(not 0 <= v < obj.target.size for v in obj.h):
                    problems.append(LoadError("valuation.range", path + ".map.h",
                                              "image id out of range"))
                    continue
            else:
                problems.append(LoadError("valuation.kind", path + ".map.kind",
                                          f"unknown kind {obj.kind!r}"))
                continue
            if not 0 <= obj.goal < obj.target.size:
                problems.append(LoadError("valuation.range", path + ".goal",
                                          f"goal {obj.goal} out of range"))
        if problems:
            return problems
        # The map must send isomorphic systems to isomorphic images.
        cls = self.cat.iso_class_of
        for i, (obj, table) in enumerate(zip(self.objectives, self.image_tables)):
            seen: dict = {}
            tcls = obj.target.iso_class_of
            for r, img in enumerate(table):
                sig = tuple(cls[v] for v in tuple_unrank(self.cat.size, self.n, r))
                prev = seen.get(sig)
                if prev is None:
                    seen[sig] = (r, tcls[img])
                elif tcls[img] != prev[1]:
                    problems.append(LoadError(
                        "valuation.iso_respect",
                        f"valuations[{i}]",
                        f"systems at ranks {prev[0]} and {r} are isomorphic but their "
                        f"images land in different iso classes",
                    ))
                    break
        return problems


def images_of(system: ValuationSystem, values: Sequence[int]) -> tuple:
    r = system.rank(values)
    return tuple(table[r] for table in system.image_tables)


def admissible(system: ValuationSystem, values: Sequence[int]) -> bool:
    """True when every objective's image converts into its goal."""
    return system.admissible_flags[system.rank(values)]


def prime_admissibility(system: ValuationSystem, threads: int = 1) -> tuple:
    """Compute (and cache on the system) the admissibility table, splitting
    the rank scan across ``threads`` workers.

    Chunks cover contiguous rank ranges and merge in rank order, so the
    result is byte-identical for every thread count. Only the boolean
    scan is split; the image tables are built once up front.
    """
    if threads < 1:
        raise PreconditionError("threads must be at least 1")
    if "admissible_flags" in system.__dict__:
        return system.admissible_flags
    tables = system.image_tables
    homs = [obj.target.hom for obj in system.objectives]
    goals = [obj.goal for obj in system.objectives]
    total = system.functor_count

    def scan(lo: int, hi: int) -> list:
        out = [True] * (hi - lo)
        for hom, goal, table in zip(homs, goals, tables):
            for r in range(lo, hi):
                if out[r - lo] and not hom[table[r]][goal]:
                    out[r - lo] = False
        return out

    if threads == 1 or total < 2 * threads:
        flags = tuple(scan(0, total))
    else:
        from concurrent.futures import ThreadPoolExecutor

        step = -(-total // threads)
        bounds = [(lo, min(lo + step, total)) for lo in range(0, total, step)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: scan(*b), bounds))
        merged: list = []
        for part in parts:
            merged.extend(part)
        flags = tuple(merged)
    # plant into the cached_property slot so later reads reuse it
    system.__dict__["admissible_flags"] = flags
    return flags


def minorizes(system: ValuationSystem, phi: Sequence[int], psi: Sequence[int],
              strict: bool = False) -> bool:
    """Does ``psi`` improve on ``phi``: an arrow image(phi) -> image(psi)
    in every objective; strictly when some objective's images are not
    isomorphic."""
    rp, rq = system.rank(phi), system.rank(psi)
    not_iso = False
    for obj, table in zip(system.objectives, system.image_tables):
        a, b = table[rp], table[rq]
        if not obj.target.hom[a][b]:
            return False
        if not obj.target.isomorphic(a, b):
            not_iso = True
    return not_iso if strict else True


def strict_minorization_set(system: ValuationSystem, phi: Sequence[int]) -> list:
    """All admissible systems strictly improving on admissible ``phi``.

    Returned in lexicographic order. The admissibility of ``phi`` itself
    is a precondition: the improvement relation used by the frontier is
    only read on admissible systems.
    """
    rp = system.rank(phi)
    if not system.admissible_flags[rp]:
        raise PreconditionError(f"system {tuple(phi)} is not admissible")
    k, n = system.cat.size, system.n
    vecs = system.image_class_vectors
    flags = system.admissible_flags
    out = []
    # hom at iso-class level is well defined: validated maps respect iso
    u = vecs[rp]
    homs = [obj.target.hom for obj in system.objectives]
    imgs = [table[rp] for table in system.image_tables]
    for rq in range(system.functor_count):
        if not flags[rq]:
            continue
        v = vecs[rq]
        if v == u:
            continue
        ok = True
        for a_img, hom, table in zip(imgs, homs, system.image_tables):
            if not hom[a_img][table[rq]]:
                ok = False
                break
        if ok:
            out.append(tuple_unrank(k, n, rq))
    return out


def minorization_mass(system: ValuationSystem, dist: ObjectDistribution,
                      phi: Sequence[int], exact: bool = False):
    """Product-measure mass of the strict improvement set of ``phi``.

    Zero exactly when ``phi`` lies on the frontier, since all object
    weights are strictly positive. Doubles by default; exact fractions
    on request.
    """
    improving = strict_minorization_set(system, phi)
    if exact:
        return sum((dist.tuple_weight(t, exact=True) for t in improving), Fraction(0))
    return float(sum(dist.tuple_weight(t) for t in improving))


@dataclass(frozen=True)
class FrontierGroup:
    representative: tuple
    members: tuple


@dataclass(frozen=True)
class FrontierResult:
    groups: tuple
    admissible_count: int
    functor_count: int

    @property
    def member_set(self) -> frozenset:
        return frozenset(m for g in self.groups for m in g.members)

    def to_dict(self) -> dict:
        return {
            "groups": [
                {"representative": list(g.representative),
                 "members": [list(m) for m in g.members]}
                for g in self.groups
            ],
            "admissible_count": self.admissible_count,
            "functor_count": self.functor_count,
            "frontier_count": sum(len(g.members) for g in self.groups),
        }


def _group_members(system: ValuationSystem, ranks: list) -> tuple:
    """Group systems by componentwise iso class; lexicographically least
    member represents the group; groups sorted by representative."""
    k, n = system.cat.size, system.n
    cls = system.cat.iso_class_of
    buckets: dict = {}
    for r in sorted(ranks):
        tup = tuple_unrank(k, n, r)
        sig = tuple(cls[v] for v in tup)
        buckets.setdefault(sig, []).append(tup)
    groups = [FrontierGroup(members[0], tuple(members)) for members in buckets.values()]
    groups.sort(key=lambda g: g.representative)
    return tuple(groups)


def _admissible_vector_index(system: ValuationSystem):
    """Distinct image-class vectors of admissible systems -> member ranks."""
    vecs = system.image_class_vectors
    flags = system.admissible_flags
    index: dict = {}
    for r, ok in enumerate(flags):
        if ok:
            index.setdefault(vecs[r], []).append(r)
    return index


def _class_hom(system: ValuationSystem, index) -> dict:
    """hom between image-class vectors, read off one representative each."""
    reps = {vec: ranks[0] for vec, ranks in index.items()}
    homs = [obj.target.hom for obj in system.objectives]
    tables = system.image_tables
    arrows = {}
    for u, ru in reps.items():
        for v, rv in reps.items():
            arrows[(u, v)] = all(
                hom[table[ru]][table[rv]] for hom, table in zip(homs, tables)
            )
    return arrows


def pareto_frontier(system: ValuationSystem) -> FrontierResult:
    """Admissible systems with an empty strict improvement set.

    Works on distinct image-class vectors (improvement only reads iso
    classes of images), then expands back to member systems grouped by
    componentwise iso class.
    """
    index = _admissible_vector_index(system)
    arrows = _class_hom(system, index)
    frontier_ranks: list = []
    for u, ranks in index.items():
        dominated = any(v != u and arrows[(u, v)] for v in index)
        if not dominated:
            frontier_ranks.extend(ranks)
    admissible_count = sum(len(r) for r in index.values())
    return FrontierResult(
        groups=_group_members(system, frontier_ranks),
        admissible_count=admissible_count,
        functor_count=system.functor_count,
    )


def frontier_via_chains(system: ValuationSystem) -> FrontierResult:
    """The frontier as terminal elements of the improvement digraph.

    Builds the strict-arrow digraph on admissible image-class vectors and
    keeps the vertices every one of whose outgoing arrows stays in its
    own class (out-degree zero). Independent route; must agree with
    :func:`pareto_frontier`.
    """
    index = _admissible_vector_index(system)
    arrows = _class_hom(system, index)
    out_strict = {u: set() for u in index}
    for (u, v), has in arrows.items():
        if has and u != v:
            out_strict[u].add(v)
    terminal = [u for u, targets in out_strict.items() if not targets]
    frontier_ranks = [r for u in terminal for r in index[u]]
    admissible_count = sum(len(r) for r in index.values())
    return FrontierResult(
        groups=_group_members(system, frontier_ranks),
        admissible_count=admissible_count,
        functor_count=system.functor_count,
    )


def longest_strict_chains(system: ValuationSystem, draws: Sequence[Sequence[int]]) -> list:
    """All maximal-length strictly improving index subsequences.

    ``draws[i]`` must all be admissible. Consecutive chain members are
    related by strict improvement (later draw improves on the earlier).
    Returns every longest chain as a tuple of indices, sorted.
    """
    draws = [tuple(d) for d in draws]
    for d in draws:
        if not admissible(system, d):
            raise PreconditionError(f"draw {d} is not admissible")
    m = len(draws)
    if m == 0:
        return []
    edge = [[False] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            edge[i][j] = minorizes(system, draws[i], draws[j], strict=True)
    best = [1] * m
    for j in range(m):
        for i in range(j):
            if edge[i][j] and best[i] + 1 > best[j]:
                best[j] = best[i] + 1
    top = max(best)
    chains: list = []

    def backtrack(j: int, suffix: list) -> None:
        if best[j] == 1:
            chains.append(tuple([j] + suffix))
            return
        for i in range(j):
            if edge[i][j] and best[i] == best[j] - 1:
                backtrack(i, [j] + suffix)

    for j in range(m):
        if best[j] == top:
            backtrack(j, [])
    return sorted(chains)
