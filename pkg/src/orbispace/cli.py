"""Command line front end.

Every subcommand reads one JSON spec document (a path, or stdin when the path
is omitted or ``-``) and writes one canonical JSON report to stdout. Exit
codes: 0 success, 1 invalid input, 2 cap exceeded, 3 internal contradiction.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from typing import Sequence

from . import numlab
from .errors import CapExceeded, InvalidInput, OrbispaceError
from .reducer import ReductionTrace, reduce_to_2stable
from .repmodel import RepSpec, component_group, coset_meets_Omega, rank_E_minus_g, validate
from .serialize import dumps, element_to_json, loads, matrix_to_json, spec_from_json, spec_to_json
from .verdict import analyze
from .weightset import is_q_stable

DEFAULT_MAX_LINES = 24


def _read(path: str | None) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InvalidInput(f"cannot read {path}: {e.strerror}") from e


def _load_spec(args) -> RepSpec:
    spec = spec_from_json(loads(_read(args.input)))
    if spec.n_lines > args.max_lines:
        raise CapExceeded(f"{spec.n_lines} lines exceed --max-lines {args.max_lines}")
    cap = os.environ.get("ORBISPACE_CAP")
    if cap is not None:
        try:
            value = int(cap)
        except ValueError as e:
            raise InvalidInput(f"ORBISPACE_CAP={cap!r} is not an integer") from e
        if value < 1:
            raise InvalidInput("ORBISPACE_CAP must be positive")
        spec = dataclasses.replace(spec, group_order_cap=value)
    return spec


def trace_to_json(trace: ReductionTrace) -> dict:
    steps = []
    for st in trace.steps:
        steps.append({
            "classes": [list(N) for N in st.class_orbit],
            "exponents": [list(r.coefficients) for r in st.relations],
            "flips": [list(r.sign_flips) for r in st.relations],
            "new_weights": [list(w) for w in st.new_weights],
            "m": [st.m_before, st.m_after],
            "v0_dim": [st.v0_before, st.v0_after],
            "group_propagated": st.group_propagated,
            "warnings": list(st.warnings),
        })
    return {"steps": steps, "final_spec": spec_to_json(trace.final_spec)}


def cmd_validate(spec: RepSpec, args) -> tuple[dict, str]:
    infos = validate(spec)
    gens = []
    for g, info in zip(spec.generators, infos):
        gens.append({"name": g.name, "Ad": matrix_to_json(info.A), "rank_E_minus_g": info.rk_E_minus_g,
                     "omega": info.omega})
    return {"valid": True, "generators": gens}, f"valid: {len(gens)} generator(s)"


def cmd_stability(spec: RepSpec, args) -> tuple[dict, str]:
    stable = is_q_stable(spec.weight_multiset, args.q)
    return {"q": args.q, "stable": stable}, f"{args.q}-stable: {stable}"


def cmd_reduce(spec: RepSpec, args) -> tuple[dict, str]:
    validate(spec)
    trace = reduce_to_2stable(spec)
    fs = trace.final_spec
    return trace_to_json(trace), f"{len(trace.steps)} step(s); final m={fs.m}, v0_dim={fs.v0_dim}"


def cmd_group(spec: RepSpec, args) -> tuple[dict, str]:
    validate(spec)
    group = component_group(spec)
    cosets = []
    for c in group:
        meets = coset_meets_Omega(c, spec)
        cosets.append({
            "representative": element_to_json(c.representative),
            "Ad": matrix_to_json(c.A),
            "rank_E_minus_g": rank_E_minus_g(c.representative),
            "meets_omega": meets.status,
        })
    return {"order": len(group), "cosets": cosets}, f"|G/G0| = {len(group)}"


def cmd_analyze(spec: RepSpec, args) -> tuple[dict, str]:
    v = analyze(spec, iv_trials=args.iv_trials, seed=args.seed)
    out = v.to_json()
    out["reduction_trace"] = trace_to_json(v.trace) if v.trace is not None else None
    lines = [f"topological: {v.topological}", f"smooth for all d: {v.smooth_all_d}"]
    lines += [f"  [{c.theorem}] {c.detail}" for c in v.certificate]
    return out, "\n".join(lines)


def cmd_lab(spec: RepSpec, args) -> tuple[dict, str]:
    seed = spec.seed if args.seed is None else args.seed
    rows = numlab.verify_suite(spec, seed, args.trials)
    summary = "\n".join(f"{'ok  ' if r['pass'] else 'FAIL'} {r['check']}: {r['max_defect']:.3g}" for r in rows)
    return {"checks": rows, "pass": all(r["pass"] for r in rows)}, summary


COMMANDS = {
    "validate": cmd_validate,
    "stability": cmd_stability,
    "reduce": cmd_reduce,
    "group": cmd_group,
    "analyze": cmd_analyze,
    "lab": cmd_lab,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", help="spec document (default: stdin)")
    common.add_argument("--pretty", action="store_true", help="indent JSON and print a summary to stderr")
    common.add_argument("--max-lines", type=int, default=DEFAULT_MAX_LINES)
    p = argparse.ArgumentParser(prog="orbispace", description="Decide whether orbit spaces are manifolds.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a spec and report Ad data")
    s = sub.add_parser("stability", parents=[common], help="test q-stability of the weights")
    s.add_argument("--q", type=int, required=True)
    sub.add_parser("reduce", parents=[common], help="reduce to a 2-stable weight multiset")
    sub.add_parser("group", parents=[common], help="enumerate the component group")
    a = sub.add_parser("analyze", parents=[common], help="full verdict with certificate")
    a.add_argument("--iv-trials", type=int, default=None)
    a.add_argument("--seed", type=int, default=None)
    lab = sub.add_parser("lab", parents=[common], help="floating-point cross-checks")
    lab.add_argument("--trials", type=int, default=200)
    lab.add_argument("--seed", type=int, default=None)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        spec = _load_spec(args)
        report, summary = COMMANDS[args.command](spec, args)
    except OrbispaceError as e:
        print(dumps({"error": type(e).__name__, "message": str(e)}, args.pretty))
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    print(dumps(report, args.pretty))
    if args.pretty:
        print(summary, file=sys.stderr)
    if args.command == "analyze" and report.get("capped"):
        return CapExceeded.exit_code
    return 0


def main() -> None:
    sys.exit(run())


__all__ = ["run", "main", "build_parser"]
