"""Command line front end.

Verbs:
  gen        emit a deterministic random instance file
  check      run the full property suite against an instance
  spectrum   spectral measure and spectral function of a named unitary
  hodge      harmonic ranks per degree of a named complex
  index      the index of d + d* of a named complex
  lefschetz  both Lefschetz invariants plus consistency verdicts
  demo       the sampled multiplication-kernel demonstration

Instances come from a positional path or from --seed/--profile.  Exit
codes: 0 all passed, 2 property failure, 3 input error, 4 convergence
error.  Reports are deterministic; the timestamp header is suppressed by
--no-timestamp.  The environment variable WSTAR_TOL rescales every
tolerance proportionally.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys

import numpy as np

from . import config
from .algebra import k0_of_projection
from .checks import CASE_NAMES, run_cases
from .complexes import chern_consistency, fredholm_F, hodge_spaces, index_report, lefschetz_L0, lefschetz_L1
from .demo import demo_lines
from .errors import ConvergenceError, InstanceError, WstarError
from .instances import PROFILES, emit_instance, generate_instance, parse_instance
from .operators import fredholm_index
from .oracle import oracle_lefschetz
from .spectral import spectral_function, spectral_measure

EXIT_OK = 0
EXIT_PROPERTY = 2
EXIT_INPUT = 3
EXIT_CONVERGENCE = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit2(f"{self.prog}: error: {message}")


class SystemExit2(Exception):
    """Argument errors map to the input-error exit code."""


def _add_instance_args(p):
    p.add_argument("instance", nargs="?", help="path to an instance file")
    p.add_argument("--seed", type=int, help="generate the instance from this seed")
    p.add_argument("--profile", choices=PROFILES, default="small")


def _add_report_args(p):
    p.add_argument("--json-out", metavar="PATH", help="also write a structured report")
    p.add_argument("--no-timestamp", action="store_true", help="suppress the timestamp header")


def build_parser():
    parser = _Parser(prog="wstar", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    g = sub.add_parser("gen", help="emit a deterministic instance file")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--profile", choices=PROFILES, default="small")
    g.add_argument("-o", "--output", help="write to a file instead of stdout")

    c = sub.add_parser("check", help="run the property suite")
    _add_instance_args(c)
    _add_report_args(c)
    c.add_argument("--parallel", type=int, metavar="N", default=0,
                   help="fan case groups out over N processes")

    s = sub.add_parser("spectrum", help="spectral data of a named unitary")
    _add_instance_args(s)
    _add_report_args(s)
    s.add_argument("--unitary", default="U", help="map name (default U)")

    h = sub.add_parser("hodge", help="harmonic ranks of a named complex")
    _add_instance_args(h)
    _add_report_args(h)
    h.add_argument("--complex", dest="complex_name", default="E")

    i = sub.add_parser("index", help="index of d + d* of a named complex")
    _add_instance_args(i)
    _add_report_args(i)
    i.add_argument("--complex", dest="complex_name", default="E")

    lf = sub.add_parser("lefschetz", help="Lefschetz invariants of a named endomorphism")
    _add_instance_args(lf)
    _add_report_args(lf)
    lf.add_argument("--endo", default="V")

    d = sub.add_parser("demo", help="built-in demonstrations")
    d.add_argument("which", choices=["example1"])
    d.add_argument("--points", type=int, default=9)
    _add_report_args(d)
    return parser


def _load_instance(args):
    if args.instance is not None:
        return parse_instance(args.instance), f"file:{args.instance}"
    if args.seed is not None:
        return generate_instance(args.seed, args.profile), f"seed:{args.seed}/{args.profile}"
    raise InstanceError("no instance: give a path or --seed")


def _emit(lines, args, payload):
    if not getattr(args, "no_timestamp", False):
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
        print(f"# generated {stamp}")
    for line in lines:
        print(line)
    path = getattr(args, "json_out", None)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")


def _run_check(args):
    inst, origin = _load_instance(args)
    if args.parallel and args.parallel > 1:
        results = _parallel_cases(args, origin)
    else:
        results = run_cases(inst)
    lines = [r.line() for r in results]
    failed = [r for r in results if not r.passed]
    lines.append("")
    lines.append(f"{len(results) - len(failed)} of {len(results)} checks passed on {origin}")
    payload = {
        "verb": "check",
        "instance": origin,
        "results": [
            {
                "name": r.name,
                "passed": r.passed,
                "residual": r.residual,
                "tolerance": r.tolerance,
                "detail": r.detail,
            }
            for r in results
        ],
        "summary": {"passed": len(results) - len(failed), "failed": len(failed)},
    }
    _emit(lines, args, payload)
    return EXIT_PROPERTY if failed else EXIT_OK


def _parallel_cases(args, origin):
    """Deterministic fan-out: each worker re-creates the instance."""
    import concurrent.futures as cf

    spec = (args.instance, args.seed, args.profile)
    ordered = {}
    with cf.ProcessPoolExecutor(max_workers=args.parallel) as pool:
        futures = {
            pool.submit(_worker_case, spec, name): name for name in CASE_NAMES
        }
        for fut in cf.as_completed(futures):
            ordered[futures[fut]] = fut.result()
    results = []
    for name in CASE_NAMES:
        results.extend(ordered[name])
    return results


def _worker_case(spec, case_name):
    path, seed, profile = spec
    if path is not None:
        inst = parse_instance(path)
    else:
        inst = generate_instance(seed, profile)
    return run_cases(inst, [case_name])


def _run_spectrum(args):
    inst, origin = _load_instance(args)
    if args.unitary not in inst.maps:
        raise InstanceError(f"no map named {args.unitary!r} in the instance")
    u = inst.maps[args.unitary]
    measure = spectral_measure(u)
    fn = spectral_function(u)
    lines = [f"spectral resolution of {args.unitary} on {origin}", ""]
    lines.append("   angle/pi        class")
    for angle, proj in measure.points:
        cls = k0_of_projection(proj.matrix)
        lines.append(f"  {angle / np.pi:12.9f}  {cls.ranks}")
    for w in measure.warnings:
        lines.append(f"  warning: {w}")
    lines.append("")
    lines.append(f"total class {fn.total_class(inst.algebra.k).ranks}"
                 f" (module class {u.source.k0().ranks})")
    payload = {
        "verb": "spectrum",
        "instance": origin,
        "unitary": args.unitary,
        "points": [
            {"angle": angle, "class": list(k0_of_projection(p.matrix).ranks)}
            for angle, p in measure.points
        ],
        "warnings": list(measure.warnings),
    }
    _emit(lines, args, payload)
    return EXIT_OK


def _run_hodge(args):
    inst, origin = _load_instance(args)
    cx = inst.complex_object(args.complex_name)
    h = hodge_spaces(cx)
    lines = [f"harmonic summands of complex {args.complex_name} on {origin}", ""]
    lines.append("  degree   space class        harmonic class")
    for m, sub in enumerate(h.spaces):
        lines.append(
            f"  {m:5d}    {str(cx.spaces[m].k0().ranks):16s} {sub.k0().ranks}"
        )
    payload = {
        "verb": "hodge",
        "instance": origin,
        "complex": args.complex_name,
        "harmonic": [list(sub.k0().ranks) for sub in h.spaces],
    }
    _emit(lines, args, payload)
    return EXIT_OK


def _run_index(args):
    inst, origin = _load_instance(args)
    cx = inst.complex_object(args.complex_name)
    f = fredholm_F(cx)
    idx = fredholm_index(f)
    idx3 = index_report(cx)
    agree = idx3[0] == idx3[1] == idx3[2]
    lines = [
        f"index of d + d* of complex {args.complex_name} on {origin}",
        "",
        f"  index class        {idx.ranks}",
        f"  euler class        {idx3[1].ranks}",
        f"  harmonic ev - od   {idx3[2].ranks}",
        f"  three-way agreement: {'PASS' if agree else 'FAIL'}",
    ]
    payload = {
        "verb": "index",
        "instance": origin,
        "complex": args.complex_name,
        "index": list(idx.ranks),
        "euler": list(idx3[1].ranks),
        "harmonic_difference": list(idx3[2].ranks),
        "agree": agree,
    }
    _emit(lines, args, payload)
    return EXIT_OK if agree else EXIT_PROPERTY


def _run_lefschetz(args):
    inst, origin = _load_instance(args)
    cx, endo = inst.endomorphism_object(args.endo)
    l1 = lefschetz_L1(cx, endo)
    l0 = lefschetz_L0(cx, endo)
    lhs, rhs, chern_ok = chern_consistency(cx, endo)
    flat = oracle_lefschetz(cx, endo)
    weighted = sum(n * t for n, t in zip(inst.algebra.block_sizes, l0.traces))
    bridge_ok = abs(flat - weighted) <= config.current().loose
    lines = [f"Lefschetz invariants of {args.endo} on {origin}", ""]
    lines.append("  angle-resolved invariant (angle/pi -> class):")
    if not l1.support:
        lines.append("    empty support")
    for angle, cls in l1.support:
        lines.append(f"    {angle / np.pi:12.9f}  {cls.ranks}")
    lines.append("")
    l0_fmt = ", ".join(f"{t.real:+.9f}{t.imag:+.9f}i" for t in l0.traces)
    lines.append(f"  trace-valued invariant: ({l0_fmt})")
    lines.append(f"  chern consistency: {'PASS' if chern_ok else 'FAIL'}")
    lines.append(f"  flat-trace bridge: {'PASS' if bridge_ok else 'FAIL'}")
    payload = {
        "verb": "lefschetz",
        "instance": origin,
        "endomorphism": args.endo,
        "l1": [
            {"angle": a, "class": list(c.ranks)} for a, c in l1.support
        ],
        "l0": [[t.real, t.imag] for t in l0.traces],
        "chern_consistent": chern_ok,
        "oracle_bridge": bridge_ok,
    }
    _emit(lines, args, payload)
    return EXIT_OK if (chern_ok and bridge_ok) else EXIT_PROPERTY


def _run_demo(args):
    lines = demo_lines(args.points)
    payload = {"verb": "demo", "which": args.which, "points": args.points}
    _emit(lines, args, payload)
    return EXIT_OK


def _run_gen(args):
    inst = generate_instance(args.seed, args.profile)
    text = emit_instance(inst)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    config.refresh_from_env()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit2 as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    try:
        if args.verb == "gen":
            return _run_gen(args)
        if args.verb == "check":
            return _run_check(args)
        if args.verb == "spectrum":
            return _run_spectrum(args)
        if args.verb == "hodge":
            return _run_hodge(args)
        if args.verb == "index":
            return _run_index(args)
        if args.verb == "lefschetz":
            return _run_lefschetz(args)
        if args.verb == "demo":
            return _run_demo(args)
        print(f"unknown verb {args.verb!r}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (InstanceError, FileNotFoundError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except WstarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
