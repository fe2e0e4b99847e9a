from fractions import Fraction as F

import numpy as np

from orbispace import numlab
from orbispace.repmodel import MonomialElement, RepSpec, rank_E_minus_g
from orbispace.serialize import spec_from_json

from oracles import float_matrix, load_doc


def test_materialize_examples():
    g = MonomialElement.identity(2, 1)
    assert np.array_equal(numlab.materialize(g), np.eye(5))
    q = MonomialElement((0,), (False,), (F(1, 4),))
    assert np.allclose(numlab.materialize(q), [[0, -1], [1, 0]], atol=1e-15)
    g23 = MonomialElement((0, 2, 1), (True,) * 3, (0, 0, 0))
    M = numlab.materialize(g23)
    assert M.shape == (6, 6) and numlab.float_rank(np.eye(6) - M) == 3 == rank_E_minus_g(g23)


def test_materialize_matches_action_rule_oracle():
    rng = np.random.default_rng(4)
    for _ in range(200):
        g = numlab.random_element(rng, int(rng.integers(1, 5)), int(rng.integers(0, 3)))
        assert np.allclose(numlab.materialize(g), float_matrix(g), atol=1e-12)


def test_tor_map_examples():
    r, w = numlab.tor_quotient_map([1, 0], [1, 1])
    assert np.allclose(r, [0.5, -0.5]) and w == 0
    r, w = numlab.tor_quotient_map([1, 1], [1, 1])
    assert np.allclose(r, [0, 0]) and w == 1


def test_quaternion_examples():
    assert np.allclose(numlab.quaternion_map([1, 0, 0, 0]), [0, 1, 0, 0])
    assert np.allclose(numlab.quaternion_map([0, 0, 1, 0]), [0, -1, 0, 0])
    # Hamilton product sanity: ij = k, ji = -k
    i, j = np.array([0, 1, 0, 0.]), np.array([0, 0, 1, 0.])
    assert np.array_equal(numlab.qmul(i, j), [0, 0, 0, 1])
    assert np.array_equal(numlab.qmul(j, i), [0, 0, 0, -1])


def test_quaternion_map_identities():
    re, norm = numlab.check_quaternion(1000, 0)
    assert re < 1e-12 and norm < 1e-9


def test_tor_invariance():
    assert numlab.check_tor_invariance(1000, 0) < 1e-9


def test_separation():
    mismatch, dist = numlab.check_separation(500, 0)
    assert mismatch < 1e-10 and dist < 1e-3


def test_separation_detects_distinct_orbits():
    """Points with different invariants are far apart on the orbit grid."""
    a = np.array([1, 2])
    z = np.array([0.6, 0.8j])
    z2 = np.array([0.8, 0.6j])
    assert numlab.orbit_distance(z, z2, a) > 0.1


def test_verify_suite_trivial_and_g23():
    trivial = RepSpec(0, (), 0)
    rows = {r["check"]: r for r in numlab.verify_suite(trivial, 0, 50)}
    for name in ("orthogonality", "homomorphism", "exact_vs_svd_rank"):
        assert rows[name]["max_defect"] == 0
    assert all(r["pass"] for r in rows.values())
    g23 = spec_from_json(load_doc("g23"))
    assert all(r["pass"] for r in numlab.verify_suite(g23, 1, 100))


def test_verify_suite_negative_control():
    bad = MonomialElement((), (), (), ((2, 0), (0, 1)), "bad")
    rows = {r["check"]: r for r in numlab.verify_suite(RepSpec(0, (), 2, None, (bad,)), 0, 20)}
    assert rows["orthogonality"]["max_defect"] > 1e-3 and not rows["orthogonality"]["pass"]


def test_reproducible():
    g23 = spec_from_json(load_doc("g23"))
    assert numlab.verify_suite(g23, 3, 30) == numlab.verify_suite(g23, 3, 30)
