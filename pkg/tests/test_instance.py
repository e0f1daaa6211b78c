import copy
import json
from fractions import Fraction

import pytest

import pareto_cat as pc

from conftest import fixture_doc


def broken(doc, mutate):
    d = copy.deepcopy(doc)
    mutate(d)
    return d


def code_of(excinfo) -> str:
    return excinfo.value.code


# ------------------------------------------------------------- round trips

@pytest.mark.parametrize("name", ["chain3", "cycle2", "staircase"])
def test_load_emit_load_is_identity(name):
    inst = pc.load_instance(pc.fixture_path(name))
    again = pc.load_instance(pc.emit_instance(inst))
    assert again == inst


def test_save_and_reload(tmp_path, cycle2):
    p = tmp_path / "out.json"
    pc.save_instance(cycle2, p)
    assert pc.load_instance(p) == cycle2
    # exact thirds survive the trip as exact fractions
    doc = json.loads(p.read_text())
    assert doc["distribution"]["weights"] == ["1/3", "1/3", "1/3"]


def test_decimal_weights_round_trip():
    doc = fixture_doc("chain3")
    inst = pc.load_instance(doc)
    assert inst.distribution.weights == (
        Fraction(2, 5), Fraction(3, 10), Fraction(1, 5), Fraction(1, 10),
    )
    emitted = pc.emit_instance(inst)
    assert emitted["distribution"]["weights"] == [0.4, 0.3, 0.2, 0.1]


def test_metadata_preserved():
    doc = fixture_doc("staircase")
    doc["metadata"] = {"note": "two objectives"}
    inst = pc.load_instance(doc)
    assert inst.metadata == {"note": "two objectives"}
    assert pc.emit_instance(inst)["metadata"] == {"note": "two objectives"}


# ---------------------------------------------------------- structural phase

def test_malformed_json_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{ not json")
    with pytest.raises(pc.LoadError) as e:
        pc.load_instance(p)
    assert code_of(e) == "parse.json"


def test_document_shape_errors():
    doc = fixture_doc("chain3")
    with pytest.raises(pc.LoadError) as e:
        pc.build_instance([])
    assert code_of(e) == "parse.shape"
    for key in ("category", "system_size", "valuations", "distribution"):
        with pytest.raises(pc.LoadError) as e:
            pc.build_instance(broken(doc, lambda d, k=key: d.pop(k)))
        assert code_of(e) == "parse.shape"
    with pytest.raises(pc.LoadError) as e:
        pc.build_instance(broken(doc, lambda d: d.update(system_size=-1)))
    assert code_of(e) == "parse.shape"


def test_category_shape_errors():
    doc = fixture_doc("chain3")
    with pytest.raises(pc.LoadError) as e:
        pc.build_instance(broken(doc, lambda d: d["category"].pop("tensor")))
    assert code_of(e) == "category.shape"
    with pytest.raises(pc.LoadError) as e:
        pc.build_instance(broken(doc, lambda d: d["category"].update(hom=[1, 0])))
    assert code_of(e) == "category.shape"
    with pytest.raises(pc.LoadError) as e:
        pc.build_instance(
            broken(doc, lambda d: d["category"]["hom"].append([1, 1, 1, 1]))
        )
    assert code_of(e) == "category.shape"
    with pytest.raises(pc.LoadError) as e:
        pc.build_instance(
            broken(doc, lambda d: d["category"].update(iso_classes=[[0, 1], [1, 2, 3]]))
        )
    assert code_of(e) == "category.shape"


def test_valuation_shape_and_kind():
    doc = fixture_doc("chain3")
    with pytest.raises(pc.LoadError) as e:
        pc.build_instance(broken(doc, lambda d: d.update(valuations=[])))
    assert code_of(e) == "valuation.shape"
    with pytest.raises(pc.LoadError) as e:
        pc.build_instance(
            broken(doc, lambda d: d["valuations"][0]["map"].update(kind="affine"))
        )
    assert code_of(e) == "valuation.kind"


def test_distribution_errors():
    doc = fixture_doc("chain3")
    with pytest.raises(pc.LoadError) as e:
        pc.build_instance(broken(doc, lambda d: d["distribution"].update(weights=0.4)))
    assert code_of(e) == "distribution.shape"
    with pytest.raises(pc.LoadError) as e:
        pc.load_instance(
            broken(doc, lambda d: d["distribution"].update(weights=[0.5, 0.5]))
        )
    assert code_of(e) == "distribution.shape"
    with pytest.raises(pc.LoadError) as e:
        pc.load_instance(
            broken(doc, lambda d: d["distribution"].update(weights=[0.5, 0.5, 0.1, -0.1]))
        )
    assert code_of(e) == "distribution.positive"
    with pytest.raises(pc.LoadError) as e:
        pc.load_instance(
            broken(doc, lambda d: d["distribution"].update(weights=[0.4, 0.3, 0.2, 0.2]))
        )
    assert code_of(e) == "distribution.sum"


def test_scale_errors():
    doc = fixture_doc("chain3")
    with pytest.raises(pc.LoadError) as e:
        pc.build_instance(broken(doc, lambda d: d["scale"].update(grid_len=0)))
    assert code_of(e) == "scale.shape"
    with pytest.raises(pc.LoadError) as e:
        pc.build_instance(
            broken(doc, lambda d: d["scale"].update(valuations_scaled=[]))
        )
    assert code_of(e) == "scale.shape"
    with pytest.raises(pc.LoadError) as e:
        pc.build_instance(
            broken(doc, lambda d: d["scale"]["valuations_scaled"][0].pop())
        )
    assert code_of(e) == "scale.shape"
    with pytest.raises(pc.LoadError) as e:
        pc.build_instance(
            broken(doc, lambda d: d["scale"]["valuations_scaled"][0][5].pop())
        )
    assert code_of(e) == "scale.shape"
    with pytest.raises(pc.LoadError) as e:
        pc.build_instance(
            broken(doc, lambda d: d["scale"]["valuations_scaled"][0][5].__setitem__(0, 9))
        )
    assert code_of(e) == "scale.range"


def test_scale_transition_law():
    # value 0 -> 2 is not an arrow in the chain3 target, caught in the law phase
    doc = broken(
        fixture_doc("chain3"),
        lambda d: d["scale"]["valuations_scaled"][0][5].__setitem__(
            slice(None), [0, 2, 0]
        ),
    )
    inst, problems = pc.load_instance(doc, strict=False)
    assert any(p.code == "scale.transition" for p in problems)
    with pytest.raises(pc.LoadError) as e:
        pc.load_instance(doc)
    assert code_of(e) == "scale.transition"


# ---------------------------------------------------------------- law phase

def test_law_violations_are_collected_not_raised():
    doc = fixture_doc("chain3")
    doc["category"]["hom"][2][0] = 0  # breaks transitivity (2 -> 1 -> 0)
    inst, problems = pc.load_instance(doc, strict=False)
    assert any(p.code == "rescat.hom.transitivity" for p in problems)
    with pytest.raises(pc.LoadError) as e:
        pc.load_instance(doc)
    assert code_of(e) == problems[0].code


def test_use_closure_repairs_transitivity():
    doc = fixture_doc("chain3")
    doc["category"]["hom"][2][0] = 0
    inst = pc.load_instance(doc, use_closure=True)
    assert inst.cat.hom[2][0]  # closure restored the composite arrow


def test_validate_instance_clean_on_fixtures(all_instances):
    for inst in all_instances.values():
        assert pc.validate_instance(inst) == []


def test_iso_respect_detected():
    # resource objects 1 and 3 are isomorphic; a table objective that
    # separates the systems (0,1) and (0,3) breaks iso respect
    doc = fixture_doc("chain3")
    doc.pop("scale")
    entries = [1] * 16
    entries[3] = 2  # rank of (0,3); rank of (0,1) keeps image 1
    doc["valuations"][0]["map"] = {"kind": "table", "entries": entries}
    inst, problems = pc.load_instance(doc, strict=False)
    codes = {p.code for p in problems}
    assert "valuation.iso_respect" in codes


# ------------------------------------------------------------ derived data

def test_admissible_mass_values(chain3, cycle2, staircase):
    assert chain3.admissible_mass() == pytest.approx(0.84)
    assert chain3.admissible_mass(exact=True) == Fraction(21, 25)
    assert cycle2.admissible_mass(exact=True) == Fraction(2, 3)
    assert staircase.admissible_mass(exact=True) == Fraction(15, 16)


def test_scaled_image_requires_scale_section():
    doc = fixture_doc("chain3")
    doc.pop("scale")
    inst = pc.load_instance(doc)
    assert inst.scale is None
    with pytest.raises(pc.LoadError) as e:
        inst.scaled_image(0, (1, 1))
    assert code_of(e) == "scale.missing"


def test_cap_defers_to_first_enumeration():
    inst = pc.build_instance(fixture_doc("chain3"), cap=4)
    with pytest.raises(pc.CapacityError) as e:
        inst.system.image_tables
    assert e.value.required == 16
    assert e.value.cap == 4


def test_fixture_path_unknown_name():
    with pytest.raises(pc.LoadError) as e:
        pc.fixture_path("nonexistent")
    assert code_of(e) == "fixture.unknown"
