"""JSON documents: parsing and canonical serialization.

Rationals always travel as strings ``"p/q"`` (or ``"p"``), never as floats.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import InvalidInput
from .linalg import fmt, frac
from .repmodel import (
    DEFAULT_GROUP_ORDER_CAP,
    DEFAULT_IV_TRIALS,
    MonomialElement,
    RepSpec,
)

VERSION = "1"


def _rational(x, where: str):
    try:
        return frac(x)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise InvalidInput(f"{where}: {x!r} is not an exact rational") from e


def _int(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise InvalidInput(f"{where}: expected an integer, got {x!r}")
    return x


def _list(x, where: str) -> list:
    if not isinstance(x, list):
        raise InvalidInput(f"{where}: expected a list, got {type(x).__name__}")
    return x


def matrix_to_json(M) -> list:
    return [[fmt(v) for v in row] for row in M]


def element_to_json(g: MonomialElement) -> dict:
    return {
        "perm": list(g.perm),
        "conj": list(g.conj),
        "rot": [fmt(r) for r in g.rot],
        "v0_block": matrix_to_json(g.v0_block),
        "name": g.name,
    }


def element_from_json(d: Any, n_lines: int, v0_dim: int, where: str) -> MonomialElement:
    if not isinstance(d, dict):
        raise InvalidInput(f"{where}: generator must be an object")
    perm = [_int(p, f"{where}.perm") for p in _list(d.get("perm", list(range(n_lines))), f"{where}.perm")]
    conj = d.get("conj", [False] * n_lines)
    if not all(isinstance(c, bool) for c in _list(conj, f"{where}.conj")):
        raise InvalidInput(f"{where}.conj: expected booleans")
    rot = [_rational(r, f"{where}.rot") for r in _list(d.get("rot", ["0"] * n_lines), f"{where}.rot")]
    default_block = [["1" if i == j else "0" for j in range(v0_dim)] for i in range(v0_dim)]
    block = [[_rational(v, f"{where}.v0_block") for v in _list(row, f"{where}.v0_block")]
             for row in _list(d.get("v0_block", default_block), f"{where}.v0_block")]
    name = d.get("name", "")
    if not isinstance(name, str):
        raise InvalidInput(f"{where}.name: expected a string")
    if len(perm) != n_lines or len(conj) != n_lines or len(rot) != n_lines:
        raise InvalidInput(f"{where}: perm, conj and rot need one entry per line ({n_lines})")
    if len(block) != v0_dim or any(len(r) != v0_dim for r in block):
        raise InvalidInput(f"{where}.v0_block: expected a {v0_dim}x{v0_dim} matrix")
    return MonomialElement(tuple(perm), tuple(conj), tuple(rot), tuple(map(tuple, block)), name)


def spec_from_json(doc: Any) -> RepSpec:
    if not isinstance(doc, dict):
        raise InvalidInput("document must be a JSON object")
    m = _int(doc.get("m"), "m")
    weights = [[_int(x, "weights") for x in _list(w, "weights")] for w in _list(doc.get("weights", []), "weights")]
    v0_dim = _int(doc.get("v0_dim", 0), "v0_dim")
    gram = doc.get("v0_gram")
    if gram is not None:
        gram = tuple(tuple(_rational(v, "v0_gram") for v in _list(row, "v0_gram"))
                     for row in _list(gram, "v0_gram"))
    gens = tuple(element_from_json(g, len(weights), v0_dim, f"generators[{i}]")
                 for i, g in enumerate(_list(doc.get("generators", []), "generators")))
    caps = doc.get("caps", {})
    if not isinstance(caps, dict):
        raise InvalidInput("caps must be an object")
    cap = _int(caps.get("group_order_cap", DEFAULT_GROUP_ORDER_CAP), "caps.group_order_cap")
    trials = _int(caps.get("iv_trials", DEFAULT_IV_TRIALS), "caps.iv_trials")
    seed = _int(caps.get("seed", 0), "caps.seed")
    if m < 0 or v0_dim < 0 or cap < 1 or trials < 0:
        raise InvalidInput("dimensions and caps must be nonnegative (cap positive)")
    return RepSpec(m, tuple(map(tuple, weights)), v0_dim, gram, gens, cap, trials, seed)


def spec_to_json(spec: RepSpec) -> dict:
    return {
        "version": VERSION,
        "m": spec.m,
        "weights": [list(w) for w in spec.weights],
        "v0_dim": spec.v0_dim,
        "v0_gram": matrix_to_json(spec.v0_gram),
        "generators": [element_to_json(g) for g in spec.generators],
        "caps": {"group_order_cap": spec.group_order_cap, "iv_trials": spec.iv_trials, "seed": spec.seed},
    }


def dumps(obj: Any, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInput(f"malformed JSON at line {e.lineno}, column {e.colno} (char {e.pos}): {e.msg}") from e
