import json
import random
from fractions import Fraction as F
from itertools import product

import numpy as np
import pytest

from orbispace.errors import InternalContradiction
from orbispace.repmodel import (
    MonomialElement,
    RepSpec,
    component_group,
    flip_lines,
    relabel_lines,
)
from orbispace.serialize import dumps, spec_from_json
from orbispace.verdict import (
    Verdict,
    _check_vector,
    _stabilizer,
    analyze,
    character_norm,
    check_dim1,
    check_finite_case,
    check_main_conditions,
    recognize_imprimitive,
    reflection_subgroup,
    sample_condition_iv,
)

from oracles import closure, load_doc, svd_rank_E_minus

YES_TAGS = {"MainSufficiency", "Mainp", "Mich", "GrHi", "HG3", "GiHr", "ProductRule", "TorExample"}
NO_TAGS = {"Prop1st", "Cor1dim", "Cor2dim"}
SMOOTH_NO_TAGS = {"Submain", "MainNecessity", "Abel", "Main1", "GrHi", "GiHr", "Mich"}


def el(perm, conj=None, rot=None, block=(), name=""):
    n = len(perm)
    return MonomialElement(tuple(perm), tuple(conj or [False] * n),
                           tuple(F(r) for r in (rot or [0] * n)), block, name)


def doc(name):
    return spec_from_json(load_doc(name))


def spec(m, weights, gens=(), v0_dim=0):
    return RepSpec(m, tuple(map(tuple, weights)), v0_dim, None, tuple(gens))


# the G(2,1,3) reflection group with an antilinear involution
G213 = spec(1, [(1,)] * 3, [el([1, 0, 2], name="s01"), el([1, 2, 0], name="c3"),
                            el([0, 1, 2], rot=[F(1, 2), 0, 0], name="d"),
                            el([0, 1, 2], [True] * 3, name="conj")])
# G(3,3,3) with an antilinear involution: H irreducible of the excluded type
G333 = spec(1, [(1,)] * 3, [el([1, 0, 2], name="s01"), el([1, 2, 0], name="c3"),
                            el([0, 1, 2], rot=[F(1, 3), F(2, 3), 0], name="d"),
                            el([0, 1, 2], [True] * 3, name="conj")])

SUITE = {
    "torus3": ("unknown", "no", "Abel"),
    "not1stable": ("no", "no", "Prop1st"),
    "g23": ("yes", "open", "GiHr"),
    "main_m2": ("yes", "open", "MainSufficiency"),
    "reflection": ("no", "no", "Cor1dim"),
    "minus_e": ("yes", "open", "Mich"),
    "hopf": ("yes", "open", "TorExample"),
    "two_classes": ("yes", "open", "TorExample"),
    "conj3": ("yes", "open", "GrHi"),
}


@pytest.mark.parametrize("name", sorted(SUITE))
def test_suite_verdicts(name):
    topo, smooth, tag = SUITE[name]
    v = analyze(doc(name))
    assert (v.topological, v.smooth_all_d) == (topo, smooth)
    assert tag in v.tags()


def test_main_example_cites_adge():
    assert {"MainSufficiency", "AdGE"} <= set(analyze(doc("main_m2")).tags())


def test_certificates_frozen():
    expected = json.loads((load_doc.__globals__["DATA"] / "expected_certificates.json").read_text())
    for name, cert in expected.items():
        assert dumps(analyze(doc(name)).to_json()) == dumps(cert)


def test_verdict_state_invariants():
    with pytest.raises(InternalContradiction):
        Verdict("yes", "no", ())
    with pytest.raises(InternalContradiction):
        Verdict("no", "open", ())
    with pytest.raises(ValueError):
        Verdict("maybe", "open", ())


def _sound(v):
    tags = set(v.tags())
    if v.topological == "yes":
        assert tags & YES_TAGS
    if v.topological == "no":
        assert tags & NO_TAGS
    if v.smooth_all_d == "no":
        assert tags & (SMOOTH_NO_TAGS | NO_TAGS)


def test_certificate_soundness_on_fixtures():
    for name in SUITE:
        _sound(analyze(doc(name)))
    for S in (G213, G333, doc("swap_m2")):
        _sound(analyze(S, iv_trials=50))


# ------------------------------------------------------- finite case


def test_finite_case_examples():
    assert check_finite_case(doc("minus_e")).topological == "yes"
    assert check_finite_case(doc("reflection")).topological == "no"
    assert check_finite_case(spec(0, [], v0_dim=3)).topological == "yes"


def test_finite_case_not_generated_by_pseudoreflections():
    # -E on R^4 fixes only 0 and is not a pseudoreflection
    minus = tuple(tuple(-1 if i == j else 0 for j in range(4)) for i in range(4))
    r = check_finite_case(spec(0, [], [el([], block=minus)], v0_dim=4))
    assert (r.topological, r.smooth_all_d) == ("unknown", "no")


# -------------------------------------------------- main conditions


def test_main_conditions_example():
    r = check_main_conditions(doc("main_m2"))
    assert (r.i, r.ii, r.iii, r.iv) == (True, True, True, "proved")


def test_main_conditions_failures():
    r = check_main_conditions(spec(1, [(1,)] * 3))
    assert not r.iii
    five = spec(2, [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2)], [el([0] + [1, 2, 3, 4], [True] * 5)])
    assert not check_main_conditions(five).i


# ------------------------------------------------------ dimension one


def test_reflection_subgroup_g23():
    H = reflection_subgroup(doc("g23"))
    assert H.order == 8 and not H.is_irreducible_C
    assert all(all(r == 0 or r == F(1, 2) for r in h.rot) for h in H.elements)


def test_reflection_subgroup_trivial_for_torus():
    H = reflection_subgroup(doc("torus3"))
    assert H.order == 1 and not H.is_irreducible_C


def test_reflection_subgroup_imprimitive():
    H = reflection_subgroup(G213)
    assert H.order == 48 and H.is_irreducible_C and H.is_G_pq_p_3 == (1, 2) and H.degrees_distinct
    H = reflection_subgroup(G333)
    assert H.order == 54 and H.is_irreducible_C and H.is_G_pq_p_3 == (3, 1) and not H.degrees_distinct


def test_recognition_rejects_non_imprimitive_sets():
    H = closure([el([1, 0, 2]), el([0, 1, 2], rot=[F(1, 2), 0, 0])],
                lambda g: g, MonomialElement.identity(3))
    assert recognize_imprimitive(H) is None


def test_character_norm_matches_float_average():
    for S in (G213, G333):
        H = reflection_subgroup(S).elements
        chars = []
        for h in H:
            tr = sum(np.exp(2j * np.pi * float(h.rot[j])) for j in range(3) if h.perm[j] == j)
            chars.append(abs(tr) ** 2)
        assert character_norm(H) == F(round(np.mean(chars)))


def test_dim1_branches():
    assert "HG3" in check_dim1(G213).certificate[0].theorem
    r = check_dim1(G333)
    assert r.certificate[0].theorem == "GrHi"
    r = check_dim1(spec(1, [(1,)] * 4, [el([0, 1, 2, 3], [True] * 4)]))
    assert (r.smooth_all_d, r.certificate[0].theorem) == ("no", "Main1")


# ------------------------------------------------ relabeling invariance


def _summary(v):
    return v.topological, v.smooth_all_d, sorted(set(v.tags()))


@pytest.mark.parametrize("name", ["g23", "main_m2", "conj3", "hopf", "two_classes", "torus3"])
def test_permutation_and_sign_invariance(name):
    S = doc(name)
    base = _summary(analyze(S))
    rng = random.Random(name)
    for _ in range(3):
        order = list(range(S.n_lines))
        rng.shuffle(order)
        assert _summary(analyze(relabel_lines(S, order))) == base
        lines = [j for j in range(S.n_lines) if rng.random() < 0.5]
        assert _summary(analyze(flip_lines(S, lines))) == base


# ------------------------------------------------------ condition iv


def test_sampler_trivial_cases():
    assert sample_condition_iv(doc("swap_m2"), 0, 0) is None
    assert sample_condition_iv(doc("main_m2"), 3, 300) is None


def _brute_stabilizer(S, r, phase, K):
    """Stabilizer over the torus grid (1/K)Z^m, from the action rule.

    For h = g t_x the rotation on line j is rot_j + s_j lambda_j . x, and h
    fixes v iff moduli match and phase[perm j] = rot_j + s_j lambda_j.x + s_j phase[j].
    Everything is scaled to integers mod D.
    """
    D = K
    for c in component_group(S):
        for t in c.representative.rot:
            D = np.lcm(D, t.denominator)
    for p in phase:
        D = np.lcm(D, p.denominator)
    D = int(D)
    grid = np.array(list(product(range(K), repeat=S.m)), dtype=np.int64)
    lam = np.array(S.weights, dtype=np.int64)
    dots = (grid @ lam.T) * (D // K)  # lambda_j . x scaled by D
    ph = [int(p * D) for p in phase]
    out = set()
    for c in component_group(S):
        g = c.representative
        if any(r[g.perm[j]] != r[j] for j in range(S.n_lines)):
            continue
        ok = np.ones(len(grid), dtype=bool)
        for j in range(S.n_lines):
            if r[j] == 0:
                continue
            s = g.sign(j)
            resid = ph[g.perm[j]] - int(g.rot[j] * D) - s * dots[:, j] - s * ph[j]
            ok &= resid % D == 0
        for x in grid[ok]:
            out.add(g * S.torus_element([F(int(v), K) for v in x]))
    return out


def _float_omega(h, S):
    A = np.linalg.lstsq(np.array(S.weights, float),
                        np.array([[h.sign(j) * x for x in S.weights[h.perm[j]]] for j in range(S.n_lines)],
                                 float), rcond=None)[0].T
    return svd_rank_E_minus(h) - int(np.linalg.matrix_rank(np.eye(S.m) - A, tol=1e-9))


def test_sampler_against_grid_exhaustion():
    S = doc("swap_m2")
    L, K = 4, 24
    group = component_group(S)
    violations = 0
    checked = 0
    for r in product([1, 2], repeat=S.n_lines):
        for phase in product(range(L), repeat=S.n_lines):
            if checked >= 400:
                break
            ph = [F(p, L) for p in phase]
            Gv = _brute_stabilizer(S, r, ph, K)
            assert Gv == set(_stabilizer(S, group, r, ph))
            om = [h for h in Gv if _float_omega(h, S) in (0, 2)]
            gen = closure(om, lambda g: g, S.identity_element())
            violations += len(gen) != len(Gv)
            assert (len(gen) != len(Gv)) == (_check_vector(S, group, r, ph) is not None)
            checked += 1
    assert checked == 400
    if violations == 0:
        assert sample_condition_iv(S, 0, 200) is None


def test_sampler_finds_genuine_violation():
    S = doc("swap_iv")
    v = analyze(S)
    assert (v.topological, v.smooth_all_d) == ("unknown", "no")
    (step,) = [c for c in v.certificate if c.theorem == "MainNecessity"]
    w = step.witness
    assert w["stabilizer_order"] > w["omega_subgroup_order"]
    # the same support with grid phases, checked without the package solver
    r, ph = (0, 0, 1, 1), [F(0), F(0), F(1, 8), F(3, 8)]
    Gv = _brute_stabilizer(S, r, ph, 48)
    om = [h for h in Gv if _float_omega(h, S) in (0, 2)]
    assert len(Gv) == 32 and len(closure(om, lambda g: g, S.identity_element())) == 16
    assert Gv == set(_stabilizer(S, component_group(S), r, ph))
