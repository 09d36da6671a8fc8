"""JSON wire formats with canonical serialization.

One versioned JSON dialect covers atlases, elements, gauges, morphism
data, and tower generators.  Serialization is canonical: keys sorted,
compact separators, components listed in enumeration order with zero
non-trivial components omitted (one-block components are always
explicit).  Parsing distinguishes syntax errors (with byte positions),
schema errors (wrong shapes or missing fields, located by component
coordinates), and semantic errors (invariant violations found by
validation).
"""

import hashlib
import json
from fractions import Fraction

from .atlas import AtlasPresentation, Chart, FiniteBase
from .bundle import BundleElement, BundleMorphism
from .cubecat import IndexSet, Partition, full_set, nonempty_subsets, partitions
from .errors import ParseError, SchemaError
from .exactlin import MultiTensor
from .gauge import DimAssignment, Gauge

FORMAT_VERSION = 1


def rational_to_str(x):
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


def rational_from_str(text):
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as err:
        raise SchemaError("bad rational %r: %s" % (text, err))


def tensor_to_json(tensor):
    return {
        "out_dim": tensor.out_dim,
        "in_dims": list(tensor.in_dims),
        "entries": [rational_to_str(x) for x in tensor.entries],
    }


def tensor_from_json(obj, where=""):
    if not isinstance(obj, dict):
        raise SchemaError("tensor%s must be an object" % where)
    try:
        out_dim = int(obj["out_dim"])
        in_dims = [int(d) for d in obj["in_dims"]]
        entries = [rational_from_str(x) for x in obj["entries"]]
    except (KeyError, TypeError) as err:
        raise SchemaError("tensor%s malformed: %s" % (where, err))
    expected = out_dim
    for d in in_dims:
        expected *= d
    if len(entries) != expected:
        raise SchemaError(
            "tensor%s has %d entries, expected %d" % (where, len(entries), expected))
    return MultiTensor(out_dim, in_dims, entries)


def dims_to_json(dims):
    return [
        {"set": list(key), "dim": dims.dims[key]}
        for key in sorted(dims.dims, key=lambda s: (len(s), tuple(s)))
    ]


def dims_from_json(n, obj, where="dims"):
    if not isinstance(obj, list):
        raise SchemaError("%s must be a list" % where)
    out = {}
    for item in obj:
        try:
            key = IndexSet(item["set"])
            out[key] = int(item["dim"])
        except (KeyError, TypeError) as err:
            raise SchemaError("%s entry malformed: %s" % (where, err))
    try:
        return DimAssignment(n, out)
    except Exception as err:
        raise SchemaError("%s incomplete: %s" % (where, err))


def gauge_to_json(gauge):
    components = []
    for subset in nonempty_subsets(full_set(gauge.n)):
        for rho in partitions(subset):
            tensor = gauge.components[(subset, rho)]
            if len(rho) > 1 and tensor.is_zero():
                continue
            components.append({
                "target": list(subset),
                "blocks": [list(b) for b in rho],
                "tensor": tensor_to_json(tensor),
            })
    return {
        "n": gauge.n,
        "source_dims": dims_to_json(gauge.source_dims),
        "target_dims": dims_to_json(gauge.target_dims),
        "components": components,
    }


def gauge_from_json(obj, where="gauge"):
    if not isinstance(obj, dict):
        raise SchemaError("%s must be an object" % where)
    try:
        n = int(obj["n"])
    except (KeyError, TypeError):
        raise SchemaError("%s missing cube dimension" % where)
    src = dims_from_json(n, obj.get("source_dims"), where + ".source_dims")
    tgt = dims_from_json(n, obj.get("target_dims"), where + ".target_dims")
    components = {}
    for item in obj.get("components", []):
        try:
            target = IndexSet(item["target"])
            blocks = Partition(item["blocks"])
        except (KeyError, TypeError) as err:
            raise SchemaError("%s component malformed: %s" % (where, err))
        label = " at (%s, %s)" % (list(target), [list(b) for b in blocks])
        tensor = tensor_from_json(item.get("tensor"), where=label)
        expected_out = tgt.dim(target)
        expected_in = tuple(src.dim(b) for b in blocks)
        if tensor.out_dim != expected_out or tensor.in_dims != expected_in:
            raise SchemaError(
                "%s component%s has shape %dx%s, expected %dx%s"
                % (where, label, tensor.out_dim, list(tensor.in_dims),
                   expected_out, list(expected_in)))
        components[(target, blocks)] = tensor
    for subset in nonempty_subsets(full_set(n)):
        trivial = Partition([subset])
        if (subset, trivial) not in components:
            raise SchemaError(
                "%s missing explicit one-block component at %s"
                % (where, list(subset)))
    return Gauge(src, tgt, components)


def atlas_to_json(presentation):
    a = presentation
    return {
        "format_version": FORMAT_VERSION,
        "kind": "atlas",
        "n": a.n,
        "base": list(a.base.points),
        "dims": dims_to_json(a.dims),
        "charts": [{"id": c.id, "domain": list(c.domain)} for c in a.charts],
        "transitions": [
            {
                "from": src,
                "to": dst,
                "point": p,
                "gauge": gauge_to_json(g),
            }
            for (dst, src, p), g in sorted(a.transitions.items())
        ],
    }


def atlas_from_json(obj):
    if not isinstance(obj, dict) or obj.get("kind") != "atlas":
        raise SchemaError("expected an atlas object")
    if obj.get("format_version") != FORMAT_VERSION:
        raise SchemaError("unsupported format_version %r" % (obj.get("format_version"),))
    try:
        n = int(obj["n"])
        base = FiniteBase(obj["base"])
        charts = tuple(Chart(c["id"], tuple(c["domain"])) for c in obj["charts"])
    except (KeyError, TypeError) as err:
        raise SchemaError("atlas malformed: %s" % err)
    dims = dims_from_json(n, obj.get("dims"))
    transitions = {}
    for item in obj.get("transitions", []):
        try:
            src, dst, p = item["from"], item["to"], item["point"]
        except (KeyError, TypeError) as err:
            raise SchemaError("transition malformed: %s" % err)
        g = gauge_from_json(item.get("gauge"),
                            where="transition %s<-%s at %s" % (dst, src, p))
        transitions[(dst, src, p)] = g
    try:
        return AtlasPresentation(n, dims, base, charts, transitions)
    except Exception as err:
        raise SchemaError("atlas inconsistent: %s" % err)


def element_to_json(elem):
    return {
        "format_version": FORMAT_VERSION,
        "kind": "element",
        "node": list(elem.node),
        "chart": elem.chart,
        "point": elem.point,
        "components": [
            {"set": list(key), "vector": [rational_to_str(x) for x in vec]}
            for key, vec in sorted(elem.components.items(),
                                   key=lambda kv: (len(kv[0]), tuple(kv[0])))
        ],
    }


def element_from_json(obj):
    if not isinstance(obj, dict) or obj.get("kind") != "element":
        raise SchemaError("expected an element object")
    try:
        comps = {
            IndexSet(item["set"]): tuple(rational_from_str(x)
                                         for x in item["vector"])
            for item in obj["components"]
        }
        return BundleElement(IndexSet(obj["node"]), obj["chart"], obj["point"], comps)
    except (KeyError, TypeError) as err:
        raise SchemaError("element malformed: %s" % err)


def morphism_to_json(morphism):
    return {
        "format_version": FORMAT_VERSION,
        "kind": "morphism",
        "n": morphism.source.n,
        "base": list(morphism.source.base.points),
        "source_dims": dims_to_json(morphism.source.dims),
        "target_dims": dims_to_json(morphism.target.dims),
        "data": [
            {"chart": chart, "point": p, "gauge": gauge_to_json(g)}
            for (chart, p), g in sorted(morphism.data.items())
        ],
    }


def morphism_from_json(obj, source, target):
    """Bind serialized morphism data to source and target presentations."""
    if not isinstance(obj, dict) or obj.get("kind") != "morphism":
        raise SchemaError("expected a morphism object")
    data = {}
    for item in obj.get("data", []):
        try:
            chart, p = item["chart"], item["point"]
        except (KeyError, TypeError) as err:
            raise SchemaError("morphism data malformed: %s" % err)
        data[(chart, p)] = gauge_from_json(
            item.get("gauge"), where="morphism data at (%s, %s)" % (chart, p))
    try:
        return BundleMorphism(source, target, data)
    except Exception as err:
        raise SchemaError("morphism inconsistent with presentations: %s" % err)


def generator_to_json(infinity):
    from .tower import RuleGenerator, StabilizingGenerator
    gen = infinity.generator
    if isinstance(gen, StabilizingGenerator):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "generator",
            "generator": {
                "kind": "stabilizing",
                "N": gen.level,
                "instance": atlas_to_json(gen.instance),
            },
        }
    if isinstance(gen, RuleGenerator):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "generator",
            "generator": {
                "kind": "rule",
                "base": list(gen.base.points),
                "charts": [{"id": cid, "domain": list(dom)}
                           for cid, dom in gen.chart_specs],
                "dim_rule": gen.dim_rule,
                "transition_rule": gen.transition_rule,
            },
        }
    raise SchemaError("unknown generator type %r" % (type(gen),))


def generator_from_json(obj):
    from .tower import InfinityPresentation, RuleGenerator, StabilizingGenerator
    if not isinstance(obj, dict) or obj.get("kind") != "generator":
        raise SchemaError("expected a generator object")
    body = obj.get("generator")
    if not isinstance(body, dict):
        raise SchemaError("generator body missing")
    if body.get("kind") == "stabilizing":
        instance = atlas_from_json(body.get("instance"))
        return InfinityPresentation(StabilizingGenerator(instance))
    if body.get("kind") == "rule":
        try:
            charts = [(c["id"], tuple(c["domain"])) for c in body["charts"]]
            return InfinityPresentation(RuleGenerator(
                body["base"], charts, body["dim_rule"], body["transition_rule"]))
        except (KeyError, TypeError) as err:
            raise SchemaError("rule generator malformed: %s" % err)
    raise SchemaError("unknown generator kind %r" % (body.get("kind"),))


def to_json(value):
    """Serialize any supported object to its JSON form."""
    from .tower import InfinityPresentation
    if isinstance(value, AtlasPresentation):
        return atlas_to_json(value)
    if isinstance(value, BundleElement):
        return element_to_json(value)
    if isinstance(value, BundleMorphism):
        return morphism_to_json(value)
    if isinstance(value, Gauge):
        out = gauge_to_json(value)
        out["format_version"] = FORMAT_VERSION
        out["kind"] = "gauge"
        return out
    if isinstance(value, InfinityPresentation):
        return generator_to_json(value)
    raise SchemaError("cannot serialize %r" % (type(value),))


def canonical_bytes(obj):
    """Canonical serialization: sorted keys, compact separators."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def dumps(value):
    return canonical_bytes(to_json(value))


def fingerprint(obj):
    """Content hash of the canonical serialization of a JSON object."""
    return hashlib.sha256(canonical_bytes(obj)).hexdigest()


def parse_json_bytes(data):
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        return json.loads(data.decode("utf-8"))
    except UnicodeDecodeError as err:
        raise ParseError("input is not UTF-8: %s" % err, position=err.start)
    except json.JSONDecodeError as err:
        raise ParseError("invalid JSON at offset %d: %s" % (err.pos, err.msg),
                         position=err.pos)


def parse(data):
    """Parse bytes into the object named by their ``kind`` field."""
    obj = parse_json_bytes(data)
    if not isinstance(obj, dict):
        raise SchemaError("top-level JSON value must be an object")
    kind = obj.get("kind")
    if kind == "atlas":
        return atlas_from_json(obj)
    if kind == "element":
        return element_from_json(obj)
    if kind == "gauge":
        return gauge_from_json(obj)
    if kind == "generator":
        return generator_from_json(obj)
    if kind == "morphism":
        raise SchemaError(
            "morphism data must be bound with morphism_from_json and its presentations")
    raise SchemaError("unknown kind %r" % (kind,))
