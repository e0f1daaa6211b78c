"""Scale-indexed objects over an integer grid and their interleavings.

A scale object assigns a target-category object to each grid point
``0..grid_len-1``, with a conversion arrow from each value to the next
(coarsening never loses convertibility). Beyond the grid the last value
repeats, so shifting by ``eps`` is total and acts as a monoid. Thin
semantics make every structural question a finite conjunction of hom
lookups.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import PreconditionError, StructureError
from .rescat import TargetCategory

INF = math.inf


@dataclass(frozen=True)
class ScaleObject:
    base: TargetCategory
    values: tuple

    def __init__(self, base: TargetCategory, values: Sequence[int]):
        vals = tuple(int(v) for v in values)
        if not vals:
            raise StructureError("a scale object needs at least one grid point")
        if any(not 0 <= v < base.size for v in vals):
            raise StructureError(f"scale values out of range for a {base.size}-object category")
        for s in range(len(vals) - 1):
            if not base.hom[vals[s]][vals[s + 1]]:
                raise StructureError(
                    f"missing transition arrow {vals[s]} -> {vals[s + 1]} at scale {s}"
                )
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "values", vals)

    @property
    def grid_len(self) -> int:
        return len(self.values)

    def value_at(self, s: int) -> int:
        """Value at scale s, the grid extended by repeating its last entry."""
        if s < 0:
            raise PreconditionError(f"scale {s} is negative")
        return self.values[min(s, len(self.values) - 1)]


def shift(y: ScaleObject, eps: int) -> ScaleObject:
    """Advance by ``eps`` scale steps: s -> value at s + eps.

    shift(y, 0) == y and shift(shift(y, a), b) == shift(y, a + b).
    """
    if eps < 0:
        raise PreconditionError(f"shift must be non-negative, got {eps}")
    return ScaleObject(y.base, tuple(y.value_at(s + eps) for s in range(y.grid_len)))


def _check_pair(y: ScaleObject, z: ScaleObject) -> None:
    if y.base is not z.base and y.base != z.base:
        raise PreconditionError("scale objects live over different target categories")
    if y.grid_len != z.grid_len:
        raise PreconditionError(
            f"grid length mismatch: {y.grid_len} vs {z.grid_len}"
        )


def epsilon_interleaved(y: ScaleObject, z: ScaleObject, eps: int) -> bool:
    """Mutual conversion up to an ``eps`` scale shift at every grid point."""
    if eps < 0:
        raise PreconditionError(f"interleaving shift must be non-negative, got {eps}")
    _check_pair(y, z)
    hom = y.base.hom
    for s in range(y.grid_len):
        if not hom[y.values[s]][z.value_at(s + eps)]:
            return False
        if not hom[z.values[s]][y.value_at(s + eps)]:
            return False
    return True


def interleaving_distance(y: ScaleObject, z: ScaleObject) -> Union[int, float]:
    """Least eps in 0..grid_len-1 with the pair eps-interleaved, else inf.

    Beyond grid_len-1 the interleaving condition is constant (both sides
    have gone flat), so the finite scan is exhaustive. Infinity is
    absorbing under the triangle inequality.
    """
    _check_pair(y, z)
    for eps in range(y.grid_len):
        if epsilon_interleaved(y, z, eps):
            return eps
    return INF


def epsilon_reversible(y: ScaleObject, z: ScaleObject, s: int, eps: int) -> bool:
    """Can the conversion y(s) -> z(s) be undone after ``eps`` coarsening
    steps? Requires the conversion to exist at scale ``s``."""
    if eps < 0:
        raise PreconditionError(f"shift must be non-negative, got {eps}")
    _check_pair(y, z)
    if not y.base.hom[y.value_at(s)][z.value_at(s)]:
        raise PreconditionError(f"no conversion at scale {s} to reverse")
    return y.base.hom[z.value_at(s)][y.value_at(s + eps)]


def check_convergence(chain: Sequence[ScaleObject], eps: int, n0: int = 0) -> bool:
    """Reversing arrows force convergence to the chain's last element.

    The chain must be strictly improving at every scale (arrow at each
    grid point, endpoints not isomorphic everywhere). Returns True when
    both hold from ``n0`` on: the hypothesis (each improvement can be
    reversed after ``eps`` coarsening steps) and the conclusion (each
    chain element is within interleaving distance ``eps`` of the last).
    """
    chain = list(chain)
    if not chain:
        raise PreconditionError("empty chain")
    if not 0 <= n0 < len(chain):
        raise PreconditionError(f"start index {n0} out of range")
    if eps < 0:
        raise PreconditionError(f"shift must be non-negative, got {eps}")
    for k in range(len(chain) - 1):
        y, z = chain[k], chain[k + 1]
        _check_pair(y, z)
        cls = y.base.iso_class_of
        for s in range(y.grid_len):
            if not y.base.hom[y.values[s]][z.values[s]]:
                raise PreconditionError(
                    f"chain link {k} -> {k + 1} breaks at scale {s}: no arrow"
                )
        if all(cls[y.values[s]] == cls[z.values[s]] for s in range(y.grid_len)):
            raise PreconditionError(
                f"chain link {k} -> {k + 1} is not strict: isomorphic at every scale"
            )
    limit = chain[-1]
    for k in range(n0, len(chain) - 1):
        y, z = chain[k], chain[k + 1]
        hom = y.base.hom
        for s in range(y.grid_len):
            if not hom[z.values[s]][y.value_at(s + eps)]:
                return False
    for k in range(n0, len(chain)):
        if not interleaving_distance(chain[k], limit) <= eps:
            return False
    return True
