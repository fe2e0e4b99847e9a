"""Acceptance criteria 1-10, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines; they are
printed with capture disabled so they also appear in a plain ``pytest -v`` log.
"""

import json
import random
import time
from functools import lru_cache
from itertools import combinations

import numpy as np

from orbispace import numlab
from orbispace.linalg import rank
from orbispace.reducer import reduce_to_2stable
from orbispace.repmodel import component_group, rank_E_minus_g, validate
from orbispace.serialize import dumps, spec_from_json
from orbispace.verdict import analyze, check_main_conditions
from orbispace.weightset import (
    WeightMultiset,
    indecomposable_components,
    is_q_stable,
    two_stable_via_crit,
)

from oracles import (
    DATA,
    closure,
    decomposition_oracle,
    imprimitive_order,
    load_doc,
    np_rank,
    random_multiset,
    scalar_normal_form,
    stable_oracle,
    svd_rank_E_minus,
)


def emit(capsys, n: int, ok: bool, msg: str) -> None:
    with capsys.disabled():
        print(f"\nACCEPTANCE {n:2d} {'PASS' if ok else 'FAIL'}: {msg}")
    assert ok, msg


# ------------------------------------------------------------ generators


@lru_cache(maxsize=None)
def stability_sets() -> tuple:
    rng = random.Random(1001)
    return tuple(random_multiset(rng, 8, 4, -3, 3) for _ in range(1000))


def _one_stable_candidate(rng: random.Random):
    m = rng.randint(1, 3)
    base = [tuple(rng.randint(-2, 2) for _ in range(m)) for _ in range(rng.randint(1, 4))]
    base = [v for v in base if any(v)] or [tuple([1] + [0] * (m - 1))]
    items = list(base)
    for _ in range(rng.randint(1, 4)):
        if rng.random() < 0.4:
            items.append(rng.choice(base))
        else:
            picks = rng.sample(base, rng.randint(1, min(3, len(base))))
            v = tuple(sum(rng.choice([-1, 1]) * p[k] for p in picks) for k in range(m))
            items.append(v)
    rng.shuffle(items)
    return m, items


@lru_cache(maxsize=None)
def one_stable_sets() -> tuple:
    rng = random.Random(2002)
    out = []
    while len(out) < 300:
        m, items = _one_stable_candidate(rng)
        if any(map(any, items)) and stable_oracle(items, 1):
            out.append((m, items))
    return tuple(out)


@lru_cache(maxsize=None)
def decomposition_sets() -> tuple:
    rng = random.Random(3003)
    out = []
    while len(out) < 300:
        m, items = random_multiset(rng, 7, 4, -3, 3)
        if any(map(any, items)):
            out.append((m, items))
    return tuple(out)


# --------------------------------------------------------------- criteria


def test_criterion_01_stability_oracle(capsys):
    sets = stability_sets()
    mismatches = 0
    elapsed = 0.0
    for m, items in sets:
        P = WeightMultiset.of(items, m)
        for q in (1, 2, 3):
            t0 = time.perf_counter()
            got = is_q_stable(P, q)
            elapsed += time.perf_counter() - t0
            mismatches += got != stable_oracle(items, q)
    emit(capsys, 1, mismatches == 0 and elapsed < 10,
         f"{len(sets)} multisets x q in 1..3, {mismatches} mismatches, {elapsed:.2f}s")


def test_criterion_02_crit_matches_two_stability(capsys):
    sets = one_stable_sets()
    mismatches = 0
    outcomes = set()
    for m, items in sets:
        P = WeightMultiset.of(items, m)
        crit = two_stable_via_crit(P)
        outcomes.add(crit)
        mismatches += crit != is_q_stable(P, 2)
        mismatches += crit != stable_oracle(items, 2)
    # both answers must occur, otherwise the sample says nothing
    emit(capsys, 2, mismatches == 0 and outcomes == {True, False},
         f"{len(sets)} 1-stable multisets, {mismatches} mismatches, outcomes {sorted(outcomes)}")


def test_criterion_03_decomposition_oracle(capsys):
    sets = decomposition_sets()
    mismatches = 0
    multi_block = 0
    for m, items in sets:
        got = {frozenset(b) for b in indecomposable_components(WeightMultiset.of(items, m)).blocks}
        want = decomposition_oracle(items)
        mismatches += got != want
        multi_block += len(want) > 1
    emit(capsys, 3, mismatches == 0 and multi_block > 30,
         f"{len(sets)} multisets, {mismatches} mismatches, {multi_block} with several blocks")


def test_criterion_04_count_bound(capsys):
    checked = violations = 0
    for m, items in stability_sets() + one_stable_sets() + decomposition_sets():
        P = WeightMultiset.of(items, m)
        k = np_rank(items)
        nnz = sum(1 for v in items if any(v))
        for q in (1, 2, 3):
            if k and is_q_stable(P, q):
                checked += 1
                violations += nnz < k + q
    emit(capsys, 4, violations == 0 and checked > 500,
         f"{checked} q-stable sets, {violations} with fewer than k+q nonzero items")


def test_criterion_05_exact_vs_svd_rank(capsys):
    rng = np.random.default_rng(5005)
    elements = [numlab.random_element(rng, int(rng.integers(1, 7)), int(rng.integers(0, 4)))
                for _ in range(500)]
    t0 = time.perf_counter()
    exact = [rank_E_minus_g(g) for g in elements]
    floats = [svd_rank_E_minus(g, 1e-7) for g in elements]
    elapsed = time.perf_counter() - t0
    mismatches = sum(a != b for a, b in zip(exact, floats))
    emit(capsys, 5, mismatches == 0 and elapsed < 5,
         f"500 elements, {mismatches} mismatches, {elapsed:.2f}s")


def test_criterion_06_reduction_end_to_end(capsys):
    two = spec_from_json(load_doc("two_classes"))
    hopf = spec_from_json(load_doc("hopf"))
    tr2, tr1 = reduce_to_2stable(two), reduce_to_2stable(hopf)
    f2 = tr2.final_spec
    v2, v1 = analyze(two), analyze(hopf)
    ok = (len(tr2.steps) == 2 and (f2.m, f2.v0_dim, f2.n_lines) == (0, 6, 0)
          and len(tr1.steps) == 1 and v2.topological == "yes" and v1.topological == "yes"
          and "TorExample" in v1.tags())
    emit(capsys, 6, ok,
         f"two classes: {len(tr2.steps)} steps to m={f2.m}, v0_dim={f2.v0_dim}, {v2.topological}; "
         f"Hopf: {len(tr1.steps)} step, {v1.topological}")


SUITE = {
    "torus3": (None, "no", "Abel"),
    "not1stable": ("no", None, "Prop1st"),
    "g23": ("yes", None, "GiHr"),
    "main_m2": ("yes", None, "MainSufficiency"),
    "reflection": ("no", None, "Cor1dim"),
    "minus_e": ("yes", None, "Mich"),
}


def test_criterion_07_verdict_suite(capsys):
    frozen = json.loads((DATA / "expected_certificates.json").read_text())
    failures = []
    t0 = time.perf_counter()
    for name, (topo, smooth, tag) in SUITE.items():
        spec = spec_from_json(load_doc(name))
        a, b = analyze(spec), analyze(spec)
        text = dumps(a.to_json())
        if topo is not None and a.topological != topo:
            failures.append(f"{name}: topological {a.topological}")
        if smooth is not None and a.smooth_all_d != smooth:
            failures.append(f"{name}: smooth {a.smooth_all_d}")
        if tag not in a.tags():
            failures.append(f"{name}: no {tag}")
        if name == "main_m2" and "AdGE" not in a.tags():
            failures.append("main_m2: no AdGE")
        if text != dumps(b.to_json()) or text != dumps(frozen[name]):
            failures.append(f"{name}: certificate not byte-stable")
    elapsed = time.perf_counter() - t0
    emit(capsys, 7, not failures and elapsed < 5,
         f"{len(SUITE)} documents, {elapsed:.2f}s" + (f", failures: {failures}" if failures else ""))


def test_criterion_08_condition_i(capsys):
    spec = spec_from_json(load_doc("main_m2"))
    report = check_main_conditions(spec)
    weights = [list(w) for w in spec.weights]
    m = spec.m
    subsets = list(combinations(weights, m))
    independent = all(rank(list(S)) == m == np_rank(S) for S in subsets)
    ok = report.i and len(weights) == 4 == m + 2 and independent and len(subsets) == 6
    emit(capsys, 8, ok,
         f"|P|={len(weights)}, m={m}, condition i {report.i}, "
         f"{len(subsets)} {m}-subsets all independent: {independent}")


def test_criterion_09_quotient_lab(capsys):
    t0 = time.perf_counter()
    tor = numlab.check_tor_invariance(1000, 0)
    qre, qnorm = numlab.check_quaternion(1000, 0)
    sep_map, sep_dist = numlab.check_separation(500, 0)
    elapsed = time.perf_counter() - t0
    ok = (tor < 1e-9 and qre < 1e-12 and qnorm < 1e-9 and sep_map < 1e-10
          and sep_dist < numlab.SEPARATION_TOL and elapsed < 10)
    emit(capsys, 9, ok,
         f"tor {tor:.1e}, quaternion Re {qre:.1e}, separation map {sep_map:.1e} "
         f"dist {sep_dist:.1e}, {elapsed:.2f}s")


def test_criterion_10_component_group_order(capsys):
    spec = spec_from_json(load_doc("g23"))
    validate(spec)
    cosets = len(component_group(spec))
    full = imprimitive_order(2, 1, 3)
    ledger = full // 2 // 2 * 2  # even half, scalar quotient, antilinear doubling
    enumerated = len(closure(spec.generators, scalar_normal_form, spec.identity_element()))
    ok = cosets == 24 == ledger == enumerated and full == 48
    emit(capsys, 10, ok, f"{cosets} cosets, ledger {full}->{ledger}, independent closure {enumerated}")
