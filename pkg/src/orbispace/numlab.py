"""Floating-point cross-checks of the exact machinery.

Complex line ``j`` occupies real coordinates ``(2j, 2j+1)`` as (Re, Im); V0
follows after all lines. Every check draws randomness from
``numpy.random.default_rng([seed, trial])`` so single trials can be replayed.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np

from .repmodel import MonomialElement, RepSpec, rank_E_minus_g

RANK_TOL = 1e-7
ALGEBRA_TOL = 1e-9
QUATERNION_TOL = 1e-12
SEPARATION_TOL = 1e-3
GRID_POINTS = 10_000
_WORD_STREAM = 2**32 - 1  # keeps group words apart from per-trial streams

_CONJ = np.array([[1.0, 0.0], [0.0, -1.0]])


def _rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def _rotation(theta: float) -> np.ndarray:
    c, s = np.cos(2 * np.pi * theta), np.sin(2 * np.pi * theta)
    return np.array([[c, -s], [s, c]])


def materialize(g: MonomialElement) -> np.ndarray:
    n = g.n_lines
    M = np.zeros((2 * n + g.v0_dim, 2 * n + g.v0_dim))
    for j in range(n):
        block = _rotation(float(g.rot[j]))
        if g.conj[j]:
            block = block @ _CONJ
        k = g.perm[j]
        M[2 * k:2 * k + 2, 2 * j:2 * j + 2] = block
    if g.v0_dim:
        M[2 * n:, 2 * n:] = np.array(g.v0_block, dtype=float)
    return M


def gram(spec: RepSpec) -> np.ndarray:
    n = 2 * spec.n_lines
    G = np.eye(n + spec.v0_dim)
    if spec.v0_dim:
        G[n:, n:] = np.array(spec.v0_gram, dtype=float)
    return G


def float_rank(M: np.ndarray, tol: float = RANK_TOL) -> int:
    if M.size == 0:
        return 0
    return int(np.sum(np.linalg.svd(M, compute_uv=False) > tol))


def rank_via_svd(g: MonomialElement) -> int:
    M = materialize(g)
    return float_rank(np.eye(len(M)) - M)


def random_element(rng: np.random.Generator, n_lines: int, v0_dim: int = 0,
                   max_den: int = 12) -> MonomialElement:
    """Random monomial element with a signed-permutation V0 block."""
    perm = tuple(int(p) for p in rng.permutation(n_lines))
    conj = tuple(bool(c) for c in rng.integers(0, 2, n_lines))
    rot = []
    for _ in range(n_lines):
        d = int(rng.integers(1, max_den + 1))
        rot.append(Fraction(int(rng.integers(0, d)), d))
    B = [[0] * v0_dim for _ in range(v0_dim)]
    for i, p in enumerate(rng.permutation(v0_dim)):
        B[int(p)][i] = int(rng.choice([-1, 1]))
    return MonomialElement(perm, conj, tuple(rot), tuple(map(tuple, B)))


# ---------------------------------------------------------- quotient maps


def tor_quotient_map(z: np.ndarray, a: np.ndarray) -> tuple[np.ndarray, complex]:
    """Invariants of the subtorus annihilating the character ``a``."""
    z = np.asarray(z, dtype=complex)
    x = np.abs(z) ** 2
    r = x - x.mean()
    w = complex(np.prod(z ** np.asarray(a)))
    return r, w


def qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product of quaternions stored as (1, i, j, k) coefficients."""
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return np.array([
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ])


def qconj(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


_I = np.array([0.0, 1.0, 0.0, 0.0])


def quaternion_map(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return qmul(qmul(v, _I), qconj(v))


# ---------------------------------------------------------------- checks


def _random_z(rng, n):
    return (rng.normal(size=n) + 1j * rng.normal(size=n)) / np.sqrt(2 * n)


def check_tor_invariance(trials: int, seed: int) -> float:
    """Max change of the map under random elements of the annihilator torus."""
    worst = 0.0
    for t in range(trials):
        rng = _rng(seed, t)
        n = int(rng.integers(2, 5))
        a = rng.integers(1, 4, n)
        z = _random_z(rng, n)
        phi = rng.random(n)
        phi[-1] = -np.dot(a[:-1], phi[:-1]) / a[-1]
        hz = np.exp(2j * np.pi * phi) * z
        r1, w1 = tor_quotient_map(z, a)
        r2, w2 = tor_quotient_map(hz, a)
        worst = max(worst, float(np.max(np.abs(r1 - r2))), abs(w1 - w2))
    return worst


def check_quaternion(trials: int, seed: int) -> tuple[float, float]:
    """(max |Re|, max ||pi(v)| - |v|^2|) over random quaternions."""
    re = norm = 0.0
    for t in range(trials):
        v = _rng(seed, t).normal(size=4)
        q = quaternion_map(v)
        re = max(re, abs(q[0]))
        norm = max(norm, abs(np.linalg.norm(q) - np.dot(v, v)))
    return re, norm


def _preimage(r1: float, w: complex, a: np.ndarray, alpha: float) -> np.ndarray:
    """A point of C^2 with the given invariants and first phase ``alpha``.

    With ``x_1 - x_2 = 2 r_1`` fixed, ``|w| = x_1^{a_1/2} x_2^{a_2/2}`` grows
    with ``x_2``, so bisection recovers the moduli.
    """
    target = abs(w)
    lo, hi = max(0.0, -2 * r1), max(0.0, -2 * r1) + 1.0
    f = lambda x2: (x2 + 2 * r1) ** (a[0] / 2) * x2 ** (a[1] / 2)
    while f(hi) < target:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    x2 = (lo + hi) / 2
    x1 = x2 + 2 * r1
    beta = (np.angle(w) - a[0] * alpha) / a[1]
    return np.array([np.sqrt(x1) * np.exp(1j * alpha), np.sqrt(x2) * np.exp(1j * beta)])


def orbit_distance(z: np.ndarray, z2: np.ndarray, a: np.ndarray, points: int = GRID_POINTS) -> float:
    """``min_h |z - h z2|`` over a grid on the circle ``(e^{a_2 it}, e^{-a_1 it})``."""
    t = np.arange(points) / points
    h = np.stack([np.exp(2j * np.pi * a[1] * t), np.exp(-2j * np.pi * a[0] * t)], axis=1)
    return float(np.min(np.linalg.norm(z[None, :] - h * z2[None, :], axis=1)))


def check_separation(trials: int, seed: int) -> tuple[float, float]:
    """(max map mismatch, max orbit distance) for pairs with equal invariants.

    The second point is rebuilt from the invariants alone, with a fresh
    random phase, so agreement is not built in.
    """
    worst_map = worst_dist = 0.0
    for t in range(trials):
        rng = _rng(seed, t)
        while True:
            a = rng.integers(1, 4, 2)
            if gcd(int(a[0]), int(a[1])) == 1:
                break
        z = _random_z(rng, 2)
        z /= np.linalg.norm(z)  # grid error is at most 3*pi/points * |z|
        r, w = tor_quotient_map(z, a)
        z2 = _preimage(float(r[0]), w, a, float(rng.uniform(0, 2 * np.pi)))
        r2, w2 = tor_quotient_map(z2, a)
        worst_map = max(worst_map, float(np.max(np.abs(r - r2))), abs(w - w2))
        worst_dist = max(worst_dist, orbit_distance(z, z2, a))
    return worst_map, worst_dist


def _words(spec: RepSpec, rng, count: int, length: int = 4) -> list[MonomialElement]:
    out = []
    for _ in range(count):
        g = spec.identity_element()
        for _ in range(int(rng.integers(0, length + 1))):
            if spec.generators and rng.random() < 0.6:
                g = spec.generators[int(rng.integers(len(spec.generators)))] * g
            elif spec.m:
                x = [Fraction(int(rng.integers(0, 24)), 24) for _ in range(spec.m)]
                g = spec.torus_element(x) * g
        out.append(g)
    return out


def verify_suite(spec: RepSpec, seed: int = 0, trials: int = 200) -> list[dict]:
    """Float checks on the spec plus the quotient-map identities."""
    rng = _rng(seed, _WORD_STREAM)
    G = gram(spec)
    orth = hom = 0.0
    mismatches = 0
    for _ in range(trials):
        g, h = _words(spec, rng, 2)
        Mg, Mh = materialize(g), materialize(h)
        orth = max(orth, float(np.max(np.abs(Mg.T @ G @ Mg - G), initial=0.0)))
        hom = max(hom, float(np.max(np.abs(materialize(g * h) - Mg @ Mh), initial=0.0)))
        mismatches += rank_via_svd(g) != rank_E_minus_g(g)
    tor = check_tor_invariance(trials, seed)
    qre, qnorm = check_quaternion(trials, seed)
    sep_map, sep_dist = check_separation(trials, seed)
    rows = [
        ("orthogonality", orth, ALGEBRA_TOL),
        ("homomorphism", hom, ALGEBRA_TOL),
        ("exact_vs_svd_rank", float(mismatches), 0.5),
        ("tor_invariance", tor, ALGEBRA_TOL),
        ("quaternion_real_part", qre, QUATERNION_TOL),
        ("quaternion_norm", qnorm, ALGEBRA_TOL),
        ("separation_map", sep_map, 1e-10),
        ("separation_orbit_distance", sep_dist, SEPARATION_TOL),
    ]
    return [{"check": name, "trials": trials, "max_defect": d, "pass": bool(d < tol)}
            for name, d, tol in rows]
