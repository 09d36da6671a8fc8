"""Command-line surface: parse instances, run operations, emit reports.

Every run prints one machine-readable report: the command, a content
fingerprint of the primary input, a status, certificates, and any
counterexamples.  Reports are deterministic for fixed input, flags, and
seed; the timing field is excluded from the report hash.  Exit codes:
0 success, 1 semantic failure (references a counterexample), 2 usage or
input errors.
"""

import argparse
import json
import os
import sys
import time

from . import formats
from .atlas import validate
from .cubecat import IndexSet
from .errors import MvbError, ParseError, SchemaError, SemanticError
from .rand import twisted_instance

FIXTURE_ENV = "MVB_FIXTURES"


def _resolve(path):
    if os.path.exists(path):
        return path
    root = os.environ.get(FIXTURE_ENV)
    if root:
        candidate = os.path.join(root, path)
        if os.path.exists(candidate):
            return candidate
    raise FileNotFoundError(path)


def _load(path):
    with open(_resolve(path), "rb") as handle:
        return handle.read()


def _load_atlas(path):
    data = _load(path)
    obj = formats.parse(data)
    from .atlas import AtlasPresentation
    if not isinstance(obj, AtlasPresentation):
        raise SchemaError("%s does not hold an atlas" % path)
    return obj, formats.fingerprint(formats.atlas_to_json(obj))


def _load_generator(path):
    data = _load(path)
    obj = formats.parse(data)
    from .tower import InfinityPresentation
    if not isinstance(obj, InfinityPresentation):
        raise SchemaError("%s does not hold a tower generator" % path)
    return obj, formats.fingerprint(formats.generator_to_json(obj))


def _load_gauge(path):
    data = _load(path)
    obj = formats.parse(data)
    from .gauge import Gauge
    if not isinstance(obj, Gauge):
        raise SchemaError("%s does not hold a gauge" % path)
    return obj


def _subset(text):
    try:
        return IndexSet(int(x) for x in str(text).split(",") if x != "")
    except Exception:
        raise SchemaError("bad index set %r (expected e.g. 1,2)" % (text,))


class Report:
    def __init__(self, command, fingerprint):
        self.command = command
        self.fingerprint = fingerprint
        self.status = "ok"
        self.certificates = []
        self.counterexamples = []
        self.result = None
        self.started = time.monotonic()

    def add_certificate(self, cert):
        self.certificates.append(cert.to_dict() if hasattr(cert, "to_dict") else cert)
        if getattr(cert, "passed", True) is False or (
                isinstance(cert, dict) and cert.get("status") == "fail"):
            self.status = "fail"

    def add_counterexample(self, item):
        self.counterexamples.append(item)
        self.status = "fail"

    def to_dict(self):
        body = {
            "command": self.command,
            "fingerprint": self.fingerprint,
            "status": self.status,
            "certificates": self.certificates,
            "counterexamples": self.counterexamples,
        }
        if self.result is not None:
            body["result"] = self.result
        body["report_hash"] = formats.fingerprint(body)
        body["timing_ms"] = int((time.monotonic() - self.started) * 1000)
        return body


def _emit(report, args):
    body = report.to_dict()
    if args.output == "json":
        sys.stdout.write(json.dumps(body, sort_keys=True, separators=(",", ":")))
        sys.stdout.write("\n")
    else:
        lines = [
            "command: %s" % body["command"],
            "fingerprint: %s" % body["fingerprint"],
            "status: %s" % body["status"],
        ]
        for cert in body["certificates"]:
            lines.append("certificate: %s: %s" % (cert.get("claim"), cert.get("status")))
        for ce in body["counterexamples"]:
            lines.append("counterexample: %s" % json.dumps(ce, sort_keys=True))
        if "result" in body:
            lines.append("result: %s" % json.dumps(body["result"], sort_keys=True,
                                                   separators=(",", ":")))
        lines.append("report_hash: %s" % body["report_hash"])
        lines.append("timing_ms: %d" % body["timing_ms"])
        sys.stdout.write("\n".join(lines) + "\n")
    if getattr(report, "outfile", None) and report.result is not None:
        with open(report.outfile, "wb") as handle:
            handle.write(formats.canonical_bytes(report.result))
            handle.write(b"\n")
    return 0 if report.status == "ok" else 1


def _validation_into(report, presentation):
    outcome = validate(presentation)
    if outcome.valid:
        report.add_certificate({"claim": "atlas validates", "status": "pass",
                                "witnesses": []})
    else:
        for violation in outcome.violations:
            report.add_counterexample(violation.to_dict())
    return outcome.valid


def cmd_validate(args):
    presentation, fp = _load_atlas(args.instance)
    report = Report("validate", fp)
    _validation_into(report, presentation)
    return _emit(report, args)


def cmd_face(args):
    from .bundle import face
    presentation, fp = _load_atlas(args.instance)
    report = Report("face", fp)
    outer = _subset(args.outer)
    inner = _subset(args.inner) if args.inner else IndexSet()
    result = face(presentation, outer, inner)
    report.result = formats.atlas_to_json(result)
    report.outfile = args.out
    _validation_into(report, result)
    return _emit(report, args)


def cmd_core(args):
    from .cores import core, core_closure_certificate
    presentation, fp = _load_atlas(args.instance)
    report = Report("core", fp)
    spec, pres = core(presentation, _subset(args.s), _subset(args.j), check=False)
    report.add_certificate(core_closure_certificate(
        presentation, spec.ambient, spec.reindexing.as_partition()))
    report.result = formats.atlas_to_json(pres)
    report.outfile = args.out
    return _emit(report, args)


def cmd_core_stages(args):
    from .cores import core_by_stages
    presentation, fp = _load_atlas(args.instance)
    report = Report("core-stages", fp)
    report.add_certificate(core_by_stages(
        presentation, _subset(args.s), _subset(args.j), _subset(args.k)))
    return _emit(report, args)


def cmd_pullback(args):
    from .cores import pullback
    presentation, fp = _load_atlas(args.instance)
    report = Report("pullback", fp)
    pb = pullback(presentation)
    report.add_certificate(pb.certificate)
    report.result = formats.atlas_to_json(pb.presentation)
    report.outfile = args.out
    return _emit(report, args)


def cmd_ultracore(args):
    from .cores import ultracore_sequence
    presentation, fp = _load_atlas(args.instance)
    report = Report("ultracore", fp)
    iota, pi, cert = ultracore_sequence(presentation, args.k)
    report.add_certificate(cert)
    report.result = {
        "inclusion": formats.morphism_to_json(iota),
        "projection": formats.morphism_to_json(pi),
    }
    report.outfile = args.out
    return _emit(report, args)


def cmd_split(args):
    from .split import find_splitting, is_splitting
    presentation, fp = _load_atlas(args.instance)
    report = Report("split", fp)
    sigma = find_splitting(presentation, args.strategy)
    ok = is_splitting(sigma)
    report.add_certificate({"claim": "output is a splitting",
                            "status": "pass" if ok else "fail", "witnesses": []})
    report.result = formats.morphism_to_json(sigma)
    report.outfile = args.out
    return _emit(report, args)


def cmd_decompose(args):
    from .split import decompose, is_decomposition
    presentation, fp = _load_atlas(args.instance)
    report = Report("decompose", fp)
    dec = decompose(presentation, args.strategy)
    ok = is_decomposition(dec)
    report.add_certificate({"claim": "output is a decomposition",
                            "status": "pass" if ok else "fail", "witnesses": []})
    report.result = formats.morphism_to_json(dec)
    report.outfile = args.out
    return _emit(report, args)


def cmd_normalize(args):
    from .split import decompose, normalize_atlas
    presentation, fp = _load_atlas(args.instance)
    report = Report("normalize", fp)
    dec = decompose(presentation, args.strategy)
    normalized = normalize_atlas(presentation, dec)
    diagonal = all(g.is_block_diagonal() for g in normalized.transitions.values())
    report.add_certificate({"claim": "normalized transitions are one-block",
                            "status": "pass" if diagonal else "fail",
                            "witnesses": []})
    _validation_into(report, normalized)
    report.result = formats.atlas_to_json(normalized)
    report.outfile = args.out
    return _emit(report, args)


def cmd_torsor(args):
    from .split import decompose, torsor_statomorphism, act_by_statomorphism
    presentation, fp = _load_atlas(args.instance)
    report = Report("torsor", fp)
    d1 = decompose(presentation, args.strategy_a)
    d2 = decompose(presentation, args.strategy_b)
    tau = torsor_statomorphism(d1, d2)
    stato = all(g.is_statomorphism() for g in tau.data.values())
    report.add_certificate({"claim": "decompositions differ by a statomorphism",
                            "status": "pass" if stato else "fail", "witnesses": []})
    acted = act_by_statomorphism(d1, tau)
    round_trip = acted.data == d2.data
    report.add_certificate({"claim": "acting then extracting round-trips",
                            "status": "pass" if round_trip else "fail",
                            "witnesses": []})
    report.result = formats.morphism_to_json(tau)
    report.outfile = args.out
    return _emit(report, args)


def cmd_stato(args):
    report = Report("stato-%s" % args.action, "-")
    if args.action == "check":
        g = _load_gauge(args.gauge)
        ok = g.is_statomorphism()
        report.add_certificate({"claim": "gauge is a statomorphism",
                                "status": "pass" if ok else "fail",
                                "witnesses": []})
    elif args.action == "invert":
        g = _load_gauge(args.gauge)
        inv = g.invert()
        report.result = formats.to_json(inv)
        report.outfile = args.out
    else:
        if not args.second:
            raise SchemaError("stato compose needs two gauge files")
        g1 = _load_gauge(args.gauge)
        g2 = _load_gauge(args.second)
        report.result = formats.to_json(g1.compose(g2))
        report.outfile = args.out
    return _emit(report, args)


def cmd_hom(args):
    from .bundle import hom_bundle
    e_pres, fp = _load_atlas(args.source)
    f_pres, _ = _load_atlas(args.target)
    report = Report("hom", fp)
    result = hom_bundle(e_pres, f_pres)
    _validation_into(report, result)
    report.result = formats.atlas_to_json(result)
    report.outfile = args.out
    return _emit(report, args)


def cmd_tangent(args):
    from .bundle import tangent_prolongation
    presentation, fp = _load_atlas(args.instance)
    report = Report("tangent", fp)
    result = tangent_prolongation(presentation)
    _validation_into(report, result)
    report.result = formats.atlas_to_json(result)
    report.outfile = args.out
    return _emit(report, args)


def cmd_lift2(args):
    from .sections import linear_module_certificate, local_split_double
    from .split import is_splitting
    presentation, fp = _load_atlas(args.instance)
    report = Report("lift2", fp)
    report.add_certificate(linear_module_certificate(presentation))
    built = local_split_double(presentation)
    ok = is_splitting(built)
    report.add_certificate({"claim": "frame construction yields a splitting",
                            "status": "pass" if ok else "fail", "witnesses": []})
    report.result = formats.morphism_to_json(built)
    report.outfile = args.out
    return _emit(report, args)


def cmd_lift3(args):
    from .sections import (
        decomposition_to_lift,
        doubly_linear_sequence,
        lift_to_decomposition,
    )
    from .split import decompose
    presentation, fp = _load_atlas(args.instance)
    report = Report("lift3", fp)
    report.add_certificate(doubly_linear_sequence(presentation))
    dec = decompose(presentation)
    pieces = decomposition_to_lift(presentation, dec)
    rebuilt = lift_to_decomposition(
        presentation, pieces["split_d"], pieces["split_e"], pieces["split_f"],
        pieces["split_lde"], pieces["split_lfd"], pieces["lift"])
    ok = rebuilt.data == dec.data
    report.add_certificate({"claim": "horizontal lift round trip reproduces"
                                     " the decomposition",
                            "status": "pass" if ok else "fail", "witnesses": []})
    return _emit(report, args)


def cmd_inf(args):
    from .split import is_decomposition
    from .tower import decompose_infinity
    infinity, fp = _load_generator(args.generator)
    report = Report("inf-%s" % args.action, fp)
    if args.action == "truncate":
        result = infinity.truncate(args.n)
        if args.n >= 1:
            _validation_into(report, result)
        report.result = formats.atlas_to_json(result)
        report.outfile = args.out
    else:
        tower = decompose_infinity(infinity)
        dec = tower.level(args.n)
        ok = is_decomposition(dec)
        report.add_certificate({"claim": "level decomposition verifies",
                                "status": "pass" if ok else "fail",
                                "witnesses": [{"level": args.n}]})
        agree = tower.node_map_agrees(
            IndexSet(range(1, args.n + 1)), args.n, args.n + 1)
        report.add_certificate({"claim": "next level restricts to this one",
                                "status": "pass" if agree else "fail",
                                "witnesses": [{"levels": [args.n, args.n + 1]}]})
        report.result = formats.morphism_to_json(dec)
        report.outfile = args.out
    return _emit(report, args)


def cmd_gen(args):
    instance = twisted_instance(
        args.seed, n=args.n, max_dim=args.max_dim,
        n_points=args.points, n_charts=args.charts)
    body = formats.atlas_to_json(instance)
    report = Report("gen", formats.fingerprint(body))
    _validation_into(report, instance)
    report.result = body
    report.outfile = args.out
    return _emit(report, args)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mvb",
        description="Exact-arithmetic toolkit for multiple vector bundles "
                    "presented over finite bases.")
    parser.add_argument("--output", choices=("json", "text"), default="json")
    # the same flag is accepted after the subcommand; SUPPRESS keeps the
    # subparser from clobbering a value parsed at the top level
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--output", choices=("json", "text"),
                        default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    def instance_command(name, fn, **extra):
        p = sub.add_parser(name, parents=[shared])
        p.add_argument("instance")
        p.add_argument("-o", "--out", default=None)
        for flag, kwargs in extra.items():
            p.add_argument(flag, **kwargs)
        p.set_defaults(fn=fn)
        return p

    instance_command("validate", cmd_validate)
    instance_command("face", cmd_face,
                     **{"--outer": {"required": True},
                        "--inner": {"default": None}})
    instance_command("core", cmd_core,
                     **{"--s": {"required": True}, "--j": {"required": True}})
    instance_command("core-stages", cmd_core_stages,
                     **{"--s": {"required": True}, "--j": {"required": True},
                        "--k": {"required": True}})
    instance_command("pullback", cmd_pullback)
    instance_command("ultracore", cmd_ultracore,
                     **{"--k": {"type": int, "required": True}})
    instance_command("split", cmd_split,
                     **{"--strategy": {"default": "least-chart",
                                       "choices": ("least-chart", "uniform-average")}})
    instance_command("decompose", cmd_decompose,
                     **{"--strategy": {"default": "least-chart",
                                       "choices": ("least-chart", "uniform-average")}})
    instance_command("normalize", cmd_normalize,
                     **{"--strategy": {"default": "least-chart",
                                       "choices": ("least-chart", "uniform-average")}})
    instance_command("torsor", cmd_torsor,
                     **{"--strategy-a": {"default": "least-chart",
                                         "choices": ("least-chart", "uniform-average")},
                        "--strategy-b": {"default": "uniform-average",
                                         "choices": ("least-chart", "uniform-average")}})

    stato = sub.add_parser("stato", parents=[shared])
    stato.add_argument("action", choices=("compose", "invert", "check"))
    stato.add_argument("gauge")
    stato.add_argument("second", nargs="?")
    stato.add_argument("-o", "--out", default=None)
    stato.set_defaults(fn=cmd_stato)

    hom = sub.add_parser("hom", parents=[shared])
    hom.add_argument("source")
    hom.add_argument("target")
    hom.add_argument("-o", "--out", default=None)
    hom.set_defaults(fn=cmd_hom)

    instance_command("tangent", cmd_tangent)
    instance_command("lift2", cmd_lift2)
    instance_command("lift3", cmd_lift3)

    inf = sub.add_parser("inf", parents=[shared])
    inf.add_argument("action", choices=("truncate", "decompose"))
    inf.add_argument("generator")
    inf.add_argument("--n", type=int, required=True)
    inf.add_argument("-o", "--out", default=None)
    inf.set_defaults(fn=cmd_inf)

    gen = sub.add_parser("gen", parents=[shared])
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--n", type=int, default=2)
    gen.add_argument("--points", type=int, default=2)
    gen.add_argument("--charts", type=int, default=2)
    gen.add_argument("--max-dim", type=int, default=2)
    gen.add_argument("-o", "--out", default=None)
    gen.set_defaults(fn=cmd_gen)

    return parser


def run(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 2 if err.code else 0
    try:
        return args.fn(args)
    except (FileNotFoundError, OSError) as err:
        sys.stderr.write("input error: %s\n" % err)
        return 2
    except (ParseError, SchemaError) as err:
        sys.stderr.write("input error: %s\n" % err)
        return 2
    except SemanticError as err:
        sys.stderr.write("semantic failure: %s\n" % err)
        return 1
    except MvbError as err:
        sys.stderr.write("error: %s\n" % err)
        return 2


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
