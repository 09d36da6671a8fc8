import json

import pytest

from mvb import formats
from mvb.atlas import decomposed, FiniteBase, validate
from mvb.cubecat import full_set, nonempty_subsets
from mvb.errors import ParseError, SchemaError
from mvb.gauge import DimAssignment
from mvb.rand import random_element, seeded, twisted_instance
from mvb.split import decompose
from mvb.tower import InfinityPresentation, RuleGenerator, StabilizingGenerator


def fixture_corpus():
    out = [
        decomposed(DimAssignment(2, {s: 1 for s in nonempty_subsets(full_set(2))}),
                   FiniteBase(["p"])),
        twisted_instance(301, n=1, n_points=2, n_charts=2),
        twisted_instance(302, n=2, n_points=2, n_charts=2),
        twisted_instance(303, n=3, n_points=2, n_charts=3),
    ]
    return out


def test_atlas_round_trip_bit_exact():
    for instance in fixture_corpus():
        blob = formats.dumps(instance)
        parsed = formats.parse(blob)
        assert formats.dumps(parsed) == blob
        assert parsed.dims == instance.dims
        assert parsed.transitions == instance.transitions
        assert validate(parsed).valid


def test_element_round_trip():
    rng = seeded(1)
    a = twisted_instance(304, n=2, n_points=2, n_charts=2)
    e = random_element(rng, a)
    blob = formats.dumps(e)
    back = formats.parse(blob)
    assert back == e
    assert formats.dumps(back) == blob


def test_gauge_round_trip():
    a = twisted_instance(305, n=2, n_points=1, n_charts=2)
    g = next(iter(a.transitions.values()))
    body = formats.to_json(g)
    blob = formats.canonical_bytes(body)
    back = formats.parse(blob)
    assert back == g


def test_morphism_round_trip_with_binding():
    a = twisted_instance(306, n=2, n_points=2, n_charts=2)
    dec = decompose(a)
    body = formats.morphism_to_json(dec)
    blob = formats.canonical_bytes(body)
    parsed = json.loads(blob.decode("utf-8"))
    bound = formats.morphism_from_json(parsed, dec.source, dec.target)
    assert bound.data == dec.data


def test_generator_round_trips():
    stab = InfinityPresentation(
        StabilizingGenerator(twisted_instance(307, n=2, n_points=2, n_charts=2)))
    rule = InfinityPresentation(RuleGenerator(
        ["p"], [("0", ("p",))],
        {"kind": "threshold", "dim": 1, "max_card": 2},
        {"kind": "conjugate", "seed": 3}))
    for gen in (stab, rule):
        blob = formats.dumps(gen)
        back = formats.parse(blob)
        assert formats.dumps(back) == blob
        assert back.truncate(2).dims == gen.truncate(2).dims
        assert back.truncate(2).transitions == gen.truncate(2).transitions


def test_truncated_file_reports_byte_offset():
    blob = formats.dumps(fixture_corpus()[0])
    with pytest.raises(ParseError) as err:
        formats.parse(blob[:max(1, len(blob) // 2)])
    assert err.value.position is not None


def test_wrong_tensor_length_names_component():
    instance = fixture_corpus()[0]
    body = formats.atlas_to_json(instance)
    bad = json.loads(json.dumps(body))
    target = bad["transitions"][0]["gauge"]["components"][0]
    target["tensor"]["entries"].append("1")
    with pytest.raises(SchemaError) as err:
        formats.parse(formats.canonical_bytes(bad))
    message = str(err.value)
    assert "entries" in message
    assert str(target["target"]) in message or "at (" in message


def test_missing_trivial_component_rejected():
    instance = fixture_corpus()[0]
    body = formats.atlas_to_json(instance)
    bad = json.loads(json.dumps(body))
    bad["transitions"][0]["gauge"]["components"] = []
    with pytest.raises(SchemaError) as err:
        formats.parse(formats.canonical_bytes(bad))
    assert "one-block" in str(err.value)


def test_unknown_kind_rejected():
    with pytest.raises(SchemaError):
        formats.parse(b'{"kind": "mystery"}')


def test_not_utf8_is_parse_error():
    with pytest.raises(ParseError):
        formats.parse(b"\xff\xfe{}")


def test_fingerprint_stable_and_sensitive():
    instance = fixture_corpus()[2]
    body = formats.atlas_to_json(instance)
    f1 = formats.fingerprint(body)
    f2 = formats.fingerprint(json.loads(json.dumps(body)))
    assert f1 == f2
    other = formats.atlas_to_json(fixture_corpus()[3])
    assert formats.fingerprint(other) != f1


def test_zero_dimensional_slots_round_trip():
    from mvb.gauge import DimAssignment
    from mvb.cubecat import IndexSet
    dims = DimAssignment(2, {IndexSet([1]): 1, IndexSet([2]): 0,
                             IndexSet([1, 2]): 2})
    instance = twisted_instance(308, n=2, n_points=2, n_charts=2, dims=dims)
    blob = formats.dumps(instance)
    parsed = formats.parse(blob)
    assert formats.dumps(parsed) == blob
    assert parsed.dims.dim(IndexSet([2])) == 0
    assert validate(parsed).valid


def test_zero_components_omitted_in_serialized_form():
    instance = fixture_corpus()[0]  # identity transitions
    body = formats.atlas_to_json(instance)
    for item in body["transitions"]:
        for comp in item["gauge"]["components"]:
            assert len(comp["blocks"]) == 1
