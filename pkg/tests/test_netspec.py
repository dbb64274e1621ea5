import json
import math
from pathlib import Path

import pytest

from qubitnet.netspec import (
    SpecError,
    dump_spec,
    parse_angle,
    parse_spec,
    spec_from_dict,
    spec_from_topologies,
)
from qubitnet.topology import F1Graph, f1_is_strongly_connected, f2_is_base, star_f1, star_f2

SPECS = Path(__file__).resolve().parent.parent / "specs"


def base(**over):
    d = {
        "qubits": 3,
        "phi": "pi/3",
        "interactions": [
            {"kind": "cu2", "controls": [1], "targets": [2], "p": 0.5},
            {"kind": "cu2", "controls": [2], "targets": [1], "p": 0.5},
        ],
    }
    d.update(over)
    return d


def test_parse_angle():
    assert parse_angle("pi/2") == math.pi / 2
    assert parse_angle("pi/3") == math.pi / 3
    assert parse_angle("2*pi/3") == 2 * math.pi / 3
    assert parse_angle("pi") == math.pi
    assert parse_angle(1.25) == 1.25
    assert parse_angle("0.5") == 0.5
    with pytest.raises(SpecError):
        parse_angle("tau/4")
    with pytest.raises(SpecError):
        parse_angle(True)


def test_fig1_spec_parses_and_is_not_base():
    spec = parse_spec(SPECS / "fig1_f1.json")
    (t,) = spec.topologies().values()
    assert isinstance(t, F1Graph)
    assert t.labels() == ["(1,23)", "(3,14)", "(2,13)"]
    assert not f1_is_strongly_connected(t)


def test_fig2_spec_is_base():
    (t,) = parse_spec(SPECS / "fig2_f2.json").topologies().values()
    assert f2_is_base(t)


def test_probability_sum_error_names_family_and_sum():
    d = base()
    d["interactions"][1]["p"] = 0.4
    with pytest.raises(SpecError, match=r"cu2 probabilities sum to 0\.9"):
        spec_from_dict(d)


def test_control_equal_target_rejected():
    d = base()
    d["interactions"][0]["targets"] = [1]
    with pytest.raises(SpecError, match=r"interactions\[0\].*distinct"):
        spec_from_dict(d)


@pytest.mark.parametrize("mutate,pattern", [
    (lambda d: d.update(phi=0), "phi"),
    (lambda d: d.update(phi="pi"), "phi"),
    (lambda d: d.update(qubits=1), "qubits"),
    (lambda d: d.update(interactions=[]), "interactions"),
    (lambda d: d["interactions"][0].update(kind="cz"), r"interactions\[0\]\.kind"),
    (lambda d: d["interactions"][0].update(controls=[4]), "outside"),
    (lambda d: d["interactions"][0].update(controls=[1, 3]), "control"),
    (lambda d: d["interactions"][0].update(p=-1), r"interactions\[0\]\.p"),
    (lambda d: d.update(extra=1), "unknown field"),
    (lambda d: d["interactions"].append({"kind": "cu2", "controls": [1], "targets": [2], "p": 0.1}),
     "duplicate|sum"),
])
def test_invalid_specs(mutate, pattern):
    d = base()
    mutate(d)
    with pytest.raises(SpecError, match=pattern):
        spec_from_dict(d)


def test_family_weights_rules():
    d = base()
    d["interactions"].append({"kind": "cu31", "controls": [1], "targets": [2, 3], "p": 1.0})
    with pytest.raises(SpecError, match="family_weights"):
        spec_from_dict(d)
    d["family_weights"] = {"p2": 0.5, "p31": 0.5, "p32": 0.1}
    with pytest.raises(SpecError, match="p32"):
        spec_from_dict(d)
    d["family_weights"] = {"p2": 0.5, "p31": 0.4}
    with pytest.raises(SpecError, match="sum"):
        spec_from_dict(d)
    d["family_weights"] = {"p2": 0.3, "p31": 0.7}
    spec = spec_from_dict(d)
    r = spec.ruo()
    assert len(r) == 3
    assert r.probs == pytest.approx((0.15, 0.15, 0.7))


def test_malformed_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "qubits": 3,\n  "phi": ,\n}')
    with pytest.raises(SpecError, match="line 3"):
        parse_spec(p)


def test_roundtrip(tmp_path):
    spec = spec_from_topologies([star_f1(4), star_f2(4)], 1.0, {"p31": 0.5, "p32": 0.5})
    p = tmp_path / "s.json"
    dump_spec(spec, p)
    again = parse_spec(p)
    assert again.topologies() == spec_from_dict(json.loads(p.read_text())).topologies()
    assert set(again.topologies()["cu31"].hyperedges) == set(star_f1(4).hyperedges)
    assert again.weights() == {"cu31": 0.5, "cu32": 0.5}


def test_bundled_specs_parse():
    for p in SPECS.glob("*.json"):
        spec = parse_spec(p)
        assert 0 < spec.phi < math.pi
        spec.ruo()
