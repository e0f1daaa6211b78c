"""Random search dynamics of a single particle and its induced mixtures.

A particle draws admissible systems i.i.d. from the product measure
conditioned on admissibility. Writing ``jump_probs[k]`` for the mass of
the strict improvement set of the k-th draw, the index of the current
best position evolves as a Markov jump chain: in state ``k`` at step
``t`` it moves to ``t`` with probability ``jump_probs[k]`` and stays
put otherwise. ``coeffs[n][k]`` is the probability that position ``k``
is still the best after ``n`` steps; the closed recursion, its matrix
form and a Monte-Carlo oracle for it all live here, together with the
induced probabilistic objects and cocones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import PreconditionError, SamplingError
from .probcat import ProbMorphism, ProbObject
from .rescat import TargetCategory
from .valuation import (
    ObjectDistribution,
    ValuationSystem,
    admissible,
    images_of,
    longest_strict_chains,
    minorization_mass,
    minorizes,
)

ESTIMATE_TOL = 1e-12


def _check_probs(lambdas: Sequence) -> list:
    ls = list(lambdas)
    if any(not 0 <= float(l) <= 1 for l in ls):
        raise PreconditionError("jump probabilities must lie in [0, 1]")
    return ls


def diagonal_coefficients(lambdas: Sequence) -> tuple:
    """c_k^k for k = 0..n: the probability that the k-th draw becomes the
    best position the moment it happens."""
    ls = _check_probs(lambdas)
    diag = [1]
    for n in range(1, len(ls) + 1):
        acc = 0
        for k in range(n):
            acc += ls[k] * (1 - ls[k]) ** (n - 1 - k) * diag[k]
        diag.append(acc)
    return tuple(diag)


def evolve_coefficients(lambdas: Sequence) -> tuple:
    """Distribution of the best index after n steps, by the closed
    recursion: stale entries decay geometrically, the newest entry
    collects one jump from each predecessor.

    Exact when given fractions, double precision otherwise.
    """
    ls = _check_probs(lambdas)
    n = len(ls)
    diag = diagonal_coefficients(ls)
    out = [diag[k] * (1 - ls[k]) ** (n - k) for k in range(n)]
    out.append(diag[n])
    return tuple(out)


def step_matrix(lambdas: Sequence, n: int, exact: bool = False) -> list:
    """The (n+2) x (n+1) column-stochastic step: diagonal ``1 - l_k``,
    last row ``l_k``. Maps the best-index distribution after n steps to
    the one after n+1."""
    ls = _check_probs(lambdas)
    if n >= len(ls):
        raise PreconditionError(f"step {n} needs jump probability index {n}")
    conv = (lambda x: x if isinstance(x, Fraction) else Fraction(x)) if exact else (lambda x: x)
    zero = Fraction(0) if exact else 0.0
    rows = [[zero] * (n + 1) for _ in range(n + 2)]
    for k in range(n + 1):
        lk = conv(ls[k])
        rows[k][k] = 1 - lk
        rows[n + 1][k] = lk
    return rows


def evolve_by_matrix(lambdas: Sequence) -> tuple:
    """Same distribution as :func:`evolve_coefficients`, produced by
    repeated multiplication with the explicit step matrices."""
    ls = _check_probs(lambdas)
    exact = bool(ls) and isinstance(ls[0], Fraction)
    c = [Fraction(1)] if exact else [1.0]
    for n in range(len(ls)):
        s = step_matrix(ls, n, exact=exact)
        c = [sum(s[r][k] * c[k] for k in range(len(c))) for r in range(len(c) + 1)]
    return tuple(c)


def markov_oracle(lambdas: Sequence, trials: int = 10**6,
                  seed: Optional[int] = 0) -> np.ndarray:
    """Empirical best-index distribution from simulating the jump chain.

    Trials are exchangeable, so the per-state counts are advanced with
    one binomial split per occupied state and step; this is identical in
    law to simulating each trial separately and merging by summation.
    """
    ls = [float(l) for l in _check_probs(lambdas)]
    n = len(ls)
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    gen = np.random.default_rng(seed)
    counts = np.zeros(n + 1, dtype=np.int64)
    counts[0] = trials
    for t in range(1, n + 1):
        movers = 0
        for k in range(t):
            if counts[k]:
                jump = gen.binomial(counts[k], ls[k])
                counts[k] -= jump
                movers += jump
        counts[t] = movers
    return counts / float(trials)


def jump_pattern_frequencies(lambdas: Sequence, trials: int = 10**6,
                             seed: Optional[int] = 0) -> dict:
    """Empirical frequency of every realized jump-time pattern.

    Keys are strictly increasing tuples of jump times (the accepted-draw
    indices); the same binomial aggregation as :func:`markov_oracle`,
    tracking whole paths instead of final states.
    """
    ls = [float(l) for l in _check_probs(lambdas)]
    n = len(ls)
    gen = np.random.default_rng(seed)
    paths = {(): trials}
    for t in range(1, n + 1):
        nxt: dict = {}
        for pattern, count in sorted(paths.items()):
            state = pattern[-1] if pattern else 0
            jump = gen.binomial(count, ls[state]) if count else 0
            stay = count - jump
            if stay:
                nxt[pattern] = nxt.get(pattern, 0) + stay
            if jump:
                moved = pattern + (t,)
                nxt[moved] = nxt.get(moved, 0) + jump
        paths = nxt
    return {pat: cnt / float(trials) for pat, cnt in paths.items()}


def chain_probability(lambdas: Sequence, chain: Sequence[int], n: int):
    """Probability that the accepted improvements happen exactly at the
    given times within an n-step run.

    The factor structure follows the jump chain: stay factors use the
    probability of the state currently occupied, the jump factor at time
    ``chain[j]`` uses the state occupied just before it. Summing over
    all patterns of {1..n} gives exactly one.
    """
    ls = _check_probs(lambdas)
    times = list(chain)
    if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
        raise PreconditionError(f"jump times must be strictly increasing: {times}")
    if times and (times[0] < 1 or times[-1] > n):
        raise PreconditionError(f"jump times must lie in 1..{n}")
    if n > len(ls):
        raise PreconditionError(f"{n} steps need {n} jump probabilities, got {len(ls)}")
    prob = 1
    state = 0
    prev = 0
    for t in times:
        prob *= (1 - ls[state]) ** (t - prev - 1) * ls[state]
        state, prev = t, t
    if state < len(ls):
        prob *= (1 - ls[state]) ** (n - prev)
    elif n != prev:
        raise PreconditionError("final state has no jump probability for its stay factors")
    return prob


def check_estimate(lambdas: Sequence, diag: Optional[Sequence] = None) -> bool:
    """Sandwich bounds for the newest-entry probability under a
    non-increasing jump sequence.

    Verifies ``c_n^n <= c_k^k`` for all k < n and
    ``c_k^k (1-l_0)^(n-k) <= c_n^n`` for 1 <= k < n, with 1e-12 slack.
    The lower bound is not checked at k = 0: there it reads
    ``(1-l_0)^n <= c_n^n``, which already fails at n = 1 for any
    ``l_0 < 1/2`` (``c_1^1 = l_0``), and for the all-zero sequence.
    """
    ls = [float(l) for l in _check_probs(lambdas)]
    if any(b > a for a, b in zip(ls, ls[1:])):
        raise PreconditionError("jump sequence must be monotone non-increasing")
    if diag is None:
        diag = diagonal_coefficients(ls)
    diag = [float(d) for d in diag]
    n = len(ls)
    cnn = diag[n]
    for k in range(n):
        if cnn > diag[k] + ESTIMATE_TOL:
            return False
        if k >= 1 and diag[k] * (1 - ls[0]) ** (n - k) > cnn + ESTIMATE_TOL:
            return False
    return True


def tv_distance(p: Sequence[float], q: Sequence[float]) -> float:
    pa, qa = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    if pa.shape != qa.shape:
        raise PreconditionError("total variation needs equal-length distributions")
    return 0.5 * float(np.abs(pa - qa).sum())


@dataclass(frozen=True)
class ParticleTrace:
    draws: tuple
    jump_probs: tuple
    coeffs: tuple
    seed: int
    acceptance_rate: float
    rough_bound_ok: bool = True
    chains_monotone: bool = True

    def to_dict(self) -> dict:
        return {
            "draws": [list(d) for d in self.draws],
            "jump_probs": [float(l) for l in self.jump_probs],
            "coeffs": [float(c) for c in self.coeffs],
            "seed": self.seed,
            "acceptance_rate": self.acceptance_rate,
            "rough_bound_ok": self.rough_bound_ok,
            "chains_monotone": self.chains_monotone,
        }


def sample_admissible(system: ValuationSystem, dist: ObjectDistribution,
                      gen: np.random.Generator, budget: int = 10**5,
                      _counter: Optional[list] = None) -> tuple:
    """One draw from the product measure conditioned on admissibility,
    by rejection. Raises :class:`SamplingError` with the measured
    acceptance rate when the attempt budget runs out."""
    k, n = system.cat.size, system.n
    w = dist.as_floats
    for attempt in range(1, budget + 1):
        tup = tuple(int(v) for v in gen.choice(k, size=n, p=w)) if n else ()
        if _counter is not None:
            _counter[0] += 1
        if system.admissible_flags[system.rank(tup)]:
            if _counter is not None:
                _counter[1] += 1
            return tup
    raise SamplingError(
        f"no admissible draw within {budget} attempts",
        acceptance_rate=0.0,
    )


def run_particle(system: ValuationSystem, dist: ObjectDistribution, n: int,
                 seed: int, budget: int = 10**5, exact: bool = False) -> ParticleTrace:
    """Draw positions 0..n, score each with its strict-improvement mass,
    and evolve the best-index distribution.

    Deterministic and replayable for a fixed seed. The trace records
    whether the coarse lower bound ``c_n^n >= (1-l_0)^n`` held and
    whether jump probabilities were non-increasing along every realized
    longest improvement chain; neither is asserted here, since both can
    legitimately fail (the former whenever ``l_0 < 1/2``, the latter on
    instances with improvement cycles).
    """
    if n < 0:
        raise PreconditionError("number of steps must be >= 0")
    gen = np.random.default_rng(np.random.SeedSequence(seed))
    counter = [0, 0]
    draws = tuple(sample_admissible(system, dist, gen, budget, counter) for _ in range(n + 1))
    jump_probs = tuple(minorization_mass(system, dist, d, exact=exact) for d in draws)
    coeffs = evolve_coefficients(jump_probs[:-1] if n else ())
    l0 = float(jump_probs[0])
    rough_ok = float(coeffs[-1]) >= (1 - l0) ** n - ESTIMATE_TOL
    mono = True
    for chain in longest_strict_chains(system, draws):
        probs = [float(jump_probs[i]) for i in chain]
        if any(b > a + ESTIMATE_TOL for a, b in zip(probs, probs[1:])):
            mono = False
            break
    return ParticleTrace(
        draws=draws,
        jump_probs=jump_probs,
        coeffs=tuple(coeffs),
        seed=seed,
        acceptance_rate=counter[1] / counter[0] if counter[0] else 1.0,
        rough_bound_ok=rough_ok,
        chains_monotone=mono,
    )


@dataclass(frozen=True)
class InducedSystem:
    """The particle dynamics written out in one objective: mixture
    objects over the drawn images, and one stochastic step morphism
    between consecutive mixtures."""

    objects: tuple
    steps: tuple
    images: tuple
    jump_probs: tuple


def induced_system(vsys: ValuationSystem, trace: ParticleTrace, alpha: int) -> InducedSystem:
    """Requires the trace's draws to form a strict improvement chain in
    objective ``alpha``; weights come from the step matrices so that
    stochastic consistency holds by construction."""
    if not 0 <= alpha < len(vsys.objectives):
        raise PreconditionError(f"objective index {alpha} out of range")
    target = vsys.objectives[alpha].target
    imgs = [images_of(vsys, d)[alpha] for d in trace.draws]
    for k in range(len(imgs) - 1):
        if not target.hom[imgs[k]][imgs[k + 1]]:
            raise PreconditionError(
                f"draws {k} -> {k + 1} are not linked by an improvement arrow in objective {alpha}"
            )
        if target.isomorphic(imgs[k], imgs[k + 1]):
            raise PreconditionError(
                f"draws {k} -> {k + 1} are isomorphic in objective {alpha}; the chain must be strict"
            )
    ls = list(trace.jump_probs)
    exact = bool(ls) and isinstance(ls[0], Fraction)
    one = Fraction(1) if exact else 1.0
    objects = [ProbObject([(one, imgs[0])])]
    steps = []
    weights = [one]
    for n in range(len(imgs) - 1):
        s = step_matrix(ls, n)
        weights = [sum(s[r][k] * weights[k] for k in range(len(weights)))
                   for r in range(len(weights) + 1)]
        families = []
        for k in range(n + 1):
            stay = 1 - ls[k]
            if float(stay) > 0:
                families.append((k, k, (imgs[k], imgs[k]), stay))
            if float(ls[k]) > 0:
                families.append((n + 1, k, (imgs[k], imgs[n + 1]), ls[k]))
        steps.append(ProbMorphism(s, families))
        objects.append(ProbObject(list(zip(weights, imgs[: n + 2]))))
    return InducedSystem(
        objects=tuple(objects),
        steps=tuple(steps),
        images=tuple(imgs),
        jump_probs=tuple(ls),
    )


@dataclass(frozen=True)
class Cocone:
    tip: ProbObject
    legs: tuple


def induced_cocone(isys: InducedSystem, tips: Sequence[int], target: TargetCategory) -> Cocone:
    """Uniform mixture over candidate tips with uniform-column legs.

    Every chain image must convert into every tip. Leg matrices hold the
    exact fraction 1/M, which is what makes the compatibility identity
    below exact.
    """
    tips = list(tips)
    if not tips:
        raise PreconditionError("a cocone needs at least one tip")
    m = len(tips)
    for img in isys.images:
        for y in tips:
            if not target.hom[img][y]:
                raise PreconditionError(f"missing arrow from chain image {img} to tip {y}")
    u = Fraction(1, m)
    tip_obj = ProbObject([(u, y) for y in tips])
    legs = []
    for n in range(len(isys.objects)):
        matrix = [[u] * (n + 1) for _ in range(m)]
        families = [
            (r, k, (isys.images[k], tips[r]), u)
            for r in range(m)
            for k in range(n + 1)
        ]
        legs.append(ProbMorphism(matrix, families))
    return Cocone(tip=tip_obj, legs=tuple(legs))


def verify_cocone(isys: InducedSystem, cocone: Cocone) -> bool:
    """Exact check of leg compatibility: leg_{n+1} . step_n == leg_n.

    Step matrices are rebuilt in exact rational arithmetic (the float
    jump probabilities embed exactly), so the comparison is equality,
    not tolerance.
    """
    for n, leg in enumerate(cocone.legs[:-1]):
        nxt = cocone.legs[n + 1].matrix
        step = step_matrix(isys.jump_probs, n, exact=True)
        rows, cols = len(leg.matrix), len(leg.matrix[0])
        for r in range(rows):
            for k in range(cols):
                acc = sum(Fraction(nxt[r][j]) * step[j][k] for j in range(len(step)))
                if acc != Fraction(leg.matrix[r][k]):
                    return False
    return True
