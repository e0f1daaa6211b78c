"""Finite symmetric monoidal preorders used as resource models.

Objects are ids ``0..K-1``. Convertibility is a boolean hom table (thin
semantics: at most the existence of an arrow matters), isomorphism is an
explicit partition of the objects, and the monoidal product is a total
``K x K`` table. All laws involving the tensor are required up to
isomorphism only, and are checked by :func:`validate_category` rather
than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from .errors import PreconditionError, StructureError


def _freeze_bool_table(rows) -> tuple:
    return tuple(tuple(bool(x) for x in row) for row in rows)


def _freeze_int_table(rows) -> tuple:
    return tuple(tuple(int(x) for x in row) for row in rows)


@dataclass(frozen=True)
class TargetCategory:
    """Objects, convertibility and isomorphism only (no tensor).

    Used as the codomain of valuations, where combining objects is never
    needed.
    """

    size: int
    hom: tuple = field(repr=False)
    iso_classes: tuple = field(repr=False)

    def __init__(self, size: int, hom, iso_classes):
        object.__setattr__(self, "size", int(size))
        object.__setattr__(self, "hom", _freeze_bool_table(hom))
        object.__setattr__(
            self, "iso_classes", tuple(tuple(sorted(int(x) for x in c)) for c in iso_classes)
        )

    @cached_property
    def iso_class_of(self) -> tuple:
        """Map object id -> index of its iso class (partition cell)."""
        out = [-1] * self.size
        for ci, cell in enumerate(self.iso_classes):
            for x in cell:
                if not 0 <= x < self.size or out[x] != -1:
                    raise StructureError(f"iso_classes is not a partition of 0..{self.size - 1}")
                out[x] = ci
        if any(v == -1 for v in out):
            raise StructureError(f"iso_classes does not cover 0..{self.size - 1}")
        return tuple(out)

    def isomorphic(self, a: int, b: int) -> bool:
        return self.iso_class_of[a] == self.iso_class_of[b]


@dataclass(frozen=True)
class ResourceCategory(TargetCategory):
    """A target category plus unit object and total tensor table."""

    unit: int = 0
    tensor: tuple = field(default=(), repr=False)

    def __init__(self, size: int, hom, iso_classes, unit: int, tensor):
        TargetCategory.__init__(self, size, hom, iso_classes)
        object.__setattr__(self, "unit", int(unit))
        object.__setattr__(self, "tensor", _freeze_int_table(tensor))

    def tens(self, a: int, b: int) -> int:
        return self.tensor[a][b]


@dataclass(frozen=True)
class Violation:
    code: str
    witness: tuple
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple

    def codes(self) -> set:
        return {v.code for v in self.violations}


def _check_shape(cat: TargetCategory) -> None:
    k = cat.size
    if k < 1:
        raise StructureError("category needs at least one object")
    if len(cat.hom) != k or any(len(row) != k for row in cat.hom):
        raise StructureError(f"hom table must be {k}x{k}")
    cat.iso_class_of  # raises StructureError if not a partition
    if isinstance(cat, ResourceCategory):
        if not 0 <= cat.unit < k:
            raise StructureError(f"unit {cat.unit} out of range")
        if len(cat.tensor) != k or any(len(row) != k for row in cat.tensor):
            raise StructureError(f"tensor table must be {k}x{k}")
        for a in range(k):
            for b in range(k):
                if not 0 <= cat.tensor[a][b] < k:
                    raise StructureError(f"tensor[{a}][{b}] = {cat.tensor[a][b]} out of range")


def validate_category(cat: TargetCategory, max_violations: int = 50) -> ValidationReport:
    """Check the category laws and report violations with witnesses.

    Shape problems raise :class:`StructureError`; law failures are
    collected (up to ``max_violations``) and returned. Codes are stable:
    ``rescat.hom.reflexivity``, ``rescat.hom.transitivity``,
    ``rescat.iso.mutual_hom``, ``rescat.hom.iso_respect``, and for
    resource categories additionally ``rescat.tensor.symmetry``,
    ``rescat.tensor.associativity``, ``rescat.tensor.unit``,
    ``rescat.tensor.iso_respect``, ``rescat.tensor.functoriality``.
    """
    _check_shape(cat)
    k = cat.size
    hom = cat.hom
    cls = cat.iso_class_of
    out: list[Violation] = []

    def add(code, witness, message):
        if len(out) < max_violations:
            out.append(Violation(code, tuple(witness), message))

    for a in range(k):
        if not hom[a][a]:
            add("rescat.hom.reflexivity", (a,), f"hom({a},{a}) is false")
    for a in range(k):
        for b in range(k):
            if not hom[a][b]:
                continue
            for c in range(k):
                if hom[b][c] and not hom[a][c]:
                    add(
                        "rescat.hom.transitivity",
                        (a, b, c),
                        f"hom({a},{b}) and hom({b},{c}) but not hom({a},{c})",
                    )
    for cell in cat.iso_classes:
        for a in cell:
            for b in cell:
                if not (hom[a][b] and hom[b][a]):
                    add(
                        "rescat.iso.mutual_hom",
                        (a, b),
                        f"isomorphic pair ({a},{b}) lacks a hom arrow",
                    )
    # hom must only depend on iso classes
    seen: dict = {}
    for a in range(k):
        for b in range(k):
            key = (cls[a], cls[b])
            if key in seen:
                a0, b0 = seen[key]
                if hom[a][b] != hom[a0][b0]:
                    add(
                        "rescat.hom.iso_respect",
                        (a0, b0, a, b),
                        f"hom({a0},{b0}) != hom({a},{b}) on isomorphic arguments",
                    )
            else:
                seen[key] = (a, b)

    if isinstance(cat, ResourceCategory):
        tens = cat.tensor
        seen_t: dict = {}
        for a in range(k):
            for b in range(k):
                key = (cls[a], cls[b])
                if key in seen_t:
                    a0, b0 = seen_t[key]
                    if cls[tens[a][b]] != cls[tens[a0][b0]]:
                        add(
                            "rescat.tensor.iso_respect",
                            (a0, b0, a, b),
                            "tensor lands in different iso classes on isomorphic arguments",
                        )
                else:
                    seen_t[key] = (a, b)
        for a in range(k):
            if cls[tens[a][cat.unit]] != cls[a] or cls[tens[cat.unit][a]] != cls[a]:
                add("rescat.tensor.unit", (a,), f"unit law fails at {a}")
            for b in range(k):
                if cls[tens[a][b]] != cls[tens[b][a]]:
                    add("rescat.tensor.symmetry", (a, b), f"{a}x{b} not symmetric up to iso")
        for a in range(k):
            for b in range(k):
                ab = tens[a][b]
                for c in range(k):
                    if cls[tens[ab][c]] != cls[tens[a][tens[b][c]]]:
                        add(
                            "rescat.tensor.associativity",
                            (a, b, c),
                            f"associativity fails up to iso at ({a},{b},{c})",
                        )
        for a in range(k):
            for b in range(k):
                if not hom[a][b]:
                    continue
                for a2 in range(k):
                    for b2 in range(k):
                        if hom[a2][b2] and not hom[tens[a][a2]][tens[b][b2]]:
                            add(
                                "rescat.tensor.functoriality",
                                (a, b, a2, b2),
                                "tensor of two arrows is not an arrow",
                            )

    return ValidationReport(ok=not out, violations=tuple(out))


def close_hom(hom: Sequence[Sequence[bool]]) -> tuple:
    """Reflexive-transitive closure of a hom table (Warshall)."""
    k = len(hom)
    m = [[bool(x) for x in row] for row in hom]
    for a in range(k):
        m[a][a] = True
    for b in range(k):
        for a in range(k):
            if m[a][b]:
                row_a, row_b = m[a], m[b]
                for c in range(k):
                    if row_b[c]:
                        row_a[c] = True
    return tuple(tuple(row) for row in m)


def convertible(cat: TargetCategory, a: int, b: int) -> bool:
    """True when a morphism a -> b exists (a can be converted into b)."""
    if not (0 <= a < cat.size and 0 <= b < cat.size):
        raise StructureError(f"object id out of range: ({a},{b})")
    return cat.hom[a][b]


def tensor_power(cat: ResourceCategory, a: int, n: int) -> int:
    """n-fold tensor of ``a`` with itself, folded left to right; n >= 1."""
    if n < 1:
        raise PreconditionError(f"tensor power needs n >= 1, got {n}")
    if not 0 <= a < cat.size:
        raise StructureError(f"object id out of range: {a}")
    out = a
    for _ in range(n - 1):
        out = cat.tensor[out][a]
    return out


def conversion_rate(
    cat: ResourceCategory, a: int, b: int, n_max: int = 16
) -> Optional[Fraction]:
    """Best ratio m/n with n copies of ``a`` convertible into m of ``b``.

    Scans all 1 <= m, n <= n_max against precomputed tensor powers and
    returns the maximum as an exact fraction, or None when no pair of
    powers is convertible. The true rate is a supremum; this is its
    bounded-window approximation and is monotone in ``n_max``.
    """
    if n_max < 1:
        raise PreconditionError(f"n_max must be >= 1, got {n_max}")
    pow_a = [None] * (n_max + 1)
    pow_b = [None] * (n_max + 1)
    pow_a[1] = a
    pow_b[1] = b
    for i in range(2, n_max + 1):
        pow_a[i] = cat.tensor[pow_a[i - 1]][a]
        pow_b[i] = cat.tensor[pow_b[i - 1]][b]
    best: Optional[Fraction] = None
    for n in range(1, n_max + 1):
        src = pow_a[n]
        for m in range(1, n_max + 1):
            if cat.hom[src][pow_b[m]]:
                r = Fraction(m, n)
                if best is None or r > best:
                    best = r
    return best


def mutually_convertible(cat: TargetCategory, a: int, b: int) -> bool:
    return cat.hom[a][b] and cat.hom[b][a]
