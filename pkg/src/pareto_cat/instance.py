"""On-disk problem instances: parsing, validation, emission.

The JSON layout is documented in docs/instance-schema.md. Loading is
two-phase: structural problems (bad shapes, ids out of range) raise
immediately with a ``*.shape`` / ``*.range`` code, then every law is
checked and the violations are reported together, each with a stable
machine-readable code such as ``rescat.hom.transitivity``,
``valuation.iso_respect`` or ``distribution.sum``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Optional, Sequence, Union

from .errors import LoadError, StructureError
from .rescat import ResourceCategory, TargetCategory, close_hom, validate_category
from .scale import ScaleObject
from .summing import DEFAULT_CAP, count_functors
from .valuation import Objective, ObjectDistribution, ValuationSystem


def _parse_weight(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    s = str(x)
    try:
        return Fraction(s)
    except ValueError:
        return Fraction(Decimal(s))


def _weight_json(w: Fraction):
    """Emit a weight as a number when the decimal literal reproduces it
    exactly, else as an exact "p/q" string."""
    if w.denominator == 1:
        return int(w)
    f = float(w)
    if _parse_weight(repr(f)) == w:
        return f
    return f"{w.numerator}/{w.denominator}"


@dataclass(frozen=True, eq=True)
class ScaleData:
    grid_len: int
    tables: tuple  # [objective][rank] -> tuple of grid values


@dataclass(frozen=True, eq=True)
class Instance:
    cat: ResourceCategory
    n: int
    objectives: tuple
    distribution: ObjectDistribution
    scale: Optional[ScaleData] = None
    metadata: dict = field(default_factory=dict)
    cap: int = DEFAULT_CAP

    @cached_property
    def system(self) -> ValuationSystem:
        return ValuationSystem(cat=self.cat, n=self.n, objectives=self.objectives, cap=self.cap)

    def scaled_image(self, alpha: int, values: Sequence[int]) -> ScaleObject:
        """The scale-indexed image of a system in one objective."""
        if self.scale is None:
            raise LoadError("scale.missing", "scale", "instance has no scale section")
        rank = self.system.rank(values)
        target = self.objectives[alpha].target
        return ScaleObject(target, self.scale.tables[alpha][rank])

    def admissible_mass(self, exact: bool = False):
        """Product-measure mass of the admissible set (0 iff it is empty)."""
        from .summing import tuple_unrank

        flags = self.system.admissible_flags
        total = Fraction(0) if exact else 0.0
        for r, ok in enumerate(flags):
            if ok:
                tup = tuple_unrank(self.cat.size, self.n, r)
                total += self.distribution.tuple_weight(tup, exact=exact)
        return total


def _bool_table(rows, path: str) -> list:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise LoadError("category.shape", path, "hom must be a list of lists")
    return [[bool(x) for x in r] for r in rows]


def _build_target(doc: dict, path: str, use_closure: bool) -> TargetCategory:
    try:
        size = int(doc["objects"])
        hom = _bool_table(doc["hom"], path + ".hom")
        iso = doc["iso_classes"]
    except KeyError as e:
        raise LoadError("category.shape", path, f"missing field {e}")
    if use_closure:
        hom = close_hom(hom)
    cat = TargetCategory(size, hom, iso)
    try:
        cat.iso_class_of
        if len(cat.hom) != size or any(len(r) != size for r in cat.hom):
            raise StructureError("hom shape")
    except StructureError as e:
        raise LoadError("category.shape", path, str(e))
    return cat


def _build_category(doc: dict, use_closure: bool) -> ResourceCategory:
    path = "category"
    try:
        size = int(doc["objects"])
        hom = _bool_table(doc["hom"], path + ".hom")
        iso = doc["iso_classes"]
        unit = int(doc["unit"])
        tensor = doc["tensor"]
    except KeyError as e:
        raise LoadError("category.shape", path, f"missing field {e}")
    if use_closure:
        hom = close_hom(hom)
    cat = ResourceCategory(size, hom, iso, unit, tensor)
    try:
        from .rescat import _check_shape

        _check_shape(cat)
    except StructureError as e:
        raise LoadError("category.shape", path, str(e))
    return cat


def build_instance(doc: dict, cap: int = DEFAULT_CAP, use_closure: bool = False) -> Instance:
    """Structural phase: construct an Instance or raise LoadError."""
    if not isinstance(doc, dict):
        raise LoadError("parse.shape", "$", "instance document must be an object")
    for key in ("category", "system_size", "valuations", "distribution"):
        if key not in doc:
            raise LoadError("parse.shape", "$", f"missing section {key!r}")
    cat = _build_category(doc["category"], use_closure)
    n = int(doc["system_size"])
    if n < 0:
        raise LoadError("parse.shape", "system_size", "system size must be >= 0")

    objectives = []
    vals = doc["valuations"]
    if not isinstance(vals, list) or not vals:
        raise LoadError("valuation.shape", "valuations", "need at least one objective")
    for i, v in enumerate(vals):
        path = f"valuations[{i}]"
        target = _build_target(v.get("target", {}), path + ".target", use_closure)
        m = v.get("map", {})
        kind = m.get("kind")
        if kind == "table":
            entries = tuple(int(x) for x in m.get("entries", []))
            objectives.append(Objective(target=target, goal=int(v.get("goal", -1)),
                                        kind="table", entries=entries))
        elif kind == "composed":
            h = tuple(int(x) for x in m.get("h", []))
            objectives.append(Objective(target=target, goal=int(v.get("goal", -1)),
                                        kind="composed", h=h))
        else:
            raise LoadError("valuation.kind", path + ".map.kind", f"unknown kind {kind!r}")

    dw = doc["distribution"].get("weights")
    if not isinstance(dw, list):
        raise LoadError("distribution.shape", "distribution.weights", "weights must be a list")
    dist = ObjectDistribution([_parse_weight(w) for w in dw])

    scale = None
    if "scale" in doc and doc["scale"] is not None:
        sdoc = doc["scale"]
        grid_len = int(sdoc.get("grid_len", 0))
        if grid_len < 1:
            raise LoadError("scale.shape", "scale.grid_len", "grid_len must be >= 1")
        tables = sdoc.get("valuations_scaled")
        total = count_functors(cat.size, n)
        if not isinstance(tables, list) or len(tables) != len(objectives):
            raise LoadError("scale.shape", "scale.valuations_scaled",
                            f"need one table per objective ({len(objectives)})")
        frozen = []
        for a, table in enumerate(tables):
            if len(table) != total:
                raise LoadError("scale.shape", f"scale.valuations_scaled[{a}]",
                                f"need {total} rows (one per system)")
            rows = []
            for r, row in enumerate(table):
                if len(row) != grid_len:
                    raise LoadError("scale.shape", f"scale.valuations_scaled[{a}][{r}]",
                                    f"need {grid_len} grid values")
                tsize = objectives[a].target.size
                vals_row = tuple(int(x) for x in row)
                if any(not 0 <= x < tsize for x in vals_row):
                    raise LoadError("scale.range", f"scale.valuations_scaled[{a}][{r}]",
                                    "grid value out of range")
                rows.append(vals_row)
            frozen.append(tuple(rows))
        scale = ScaleData(grid_len=grid_len, tables=tuple(frozen))

    return Instance(
        cat=cat,
        n=n,
        objectives=tuple(objectives),
        distribution=dist,
        scale=scale,
        metadata=dict(doc.get("metadata", {})),
        cap=cap,
    )


def validate_instance(inst: Instance) -> list:
    """Law phase: every violation as a LoadError record (not raised)."""
    problems: list[LoadError] = []
    report = validate_category(inst.cat)
    for v in report.violations:
        problems.append(LoadError(v.code, "category", v.message))
    for i, obj in enumerate(inst.objectives):
        t_report = validate_category(obj.target)
        for v in t_report.violations:
            problems.append(LoadError(v.code, f"valuations[{i}].target", v.message))
    try:
        inst.distribution.validate(inst.cat.size)
    except LoadError as e:
        problems.append(e)
    if not problems:
        if count_functors(inst.cat.size, inst.n) <= inst.cap:
            problems.extend(inst.system.validate_maps())
        if inst.scale is not None:
            for a in range(len(inst.objectives)):
                target = inst.objectives[a].target
                for r, row in enumerate(inst.scale.tables[a]):
                    try:
                        ScaleObject(target, row)
                    except StructureError as e:
                        problems.append(LoadError(
                            "scale.transition",
                            f"scale.valuations_scaled[{a}][{r}]",
                            str(e),
                        ))
                        break
    return problems


def load_instance(source: Union[str, Path, dict], cap: int = DEFAULT_CAP,
                  use_closure: bool = False, strict: bool = True):
    """Parse, build and validate an instance.

    ``source`` may be a path or an already-parsed document. With
    ``strict`` (the default) the first law violation raises; otherwise
    returns ``(instance, problems)`` for reporting.
    """
    if isinstance(source, dict):
        doc = source
    else:
        try:
            doc = json.loads(Path(source).read_text())
        except json.JSONDecodeError as e:
            raise LoadError("parse.json", str(source), str(e))
        except OSError as e:
            raise LoadError("parse.io", str(source), str(e))
    inst = build_instance(doc, cap=cap, use_closure=use_closure)
    problems = validate_instance(inst)
    if strict:
        if problems:
            raise problems[0]
        return inst
    return inst, problems


def emit_instance(inst: Instance) -> dict:
    """Write the instance back out; reloading reproduces it exactly."""
    doc: dict = {
        "metadata": dict(inst.metadata),
        "category": {
            "objects": inst.cat.size,
            "unit": inst.cat.unit,
            "hom": [[int(x) for x in row] for row in inst.cat.hom],
            "iso_classes": [list(c) for c in inst.cat.iso_classes],
            "tensor": [list(row) for row in inst.cat.tensor],
        },
        "system_size": inst.n,
        "valuations": [],
        "distribution": {"weights": [_weight_json(w) for w in inst.distribution.weights]},
    }
    for obj in inst.objectives:
        v = {
            "target": {
                "objects": obj.target.size,
                "hom": [[int(x) for x in row] for row in obj.target.hom],
                "iso_classes": [list(c) for c in obj.target.iso_classes],
            },
            "goal": obj.goal,
        }
        if obj.kind == "table":
            v["map"] = {"kind": "table", "entries": list(obj.entries)}
        else:
            v["map"] = {"kind": "composed", "h": list(obj.h)}
        doc["valuations"].append(v)
    if inst.scale is not None:
        doc["scale"] = {
            "grid_len": inst.scale.grid_len,
            "valuations_scaled": [
                [list(row) for row in table] for table in inst.scale.tables
            ],
        }
    return doc


def save_instance(inst: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(emit_instance(inst), indent=2, sort_keys=True) + "\n")
