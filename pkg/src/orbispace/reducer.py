"""Dimension-lowering simplification down to a 2-stable weight multiset.

One step removes the isotypic block ``V_N`` of a non-singleton equivalence
class ``N`` (or of a whole orbit of classes under the generators) and
replaces it by its torus quotient: ``|N| - 1`` real coordinates
``|z_j|^2`` modulo the diagonal, plus one complex coordinate
``w = prod (z_j^{[f_j]})^{a_j}`` carrying the character
``sum a_j f_j lambda_j``. Here ``z^{[-1]}`` means the conjugate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (
    InternalContradiction,
    InvalidInput,
    MixedConjugationOnClass,
    NoReducibleClass,
    Not1Stable,
)
from .linalg import Matrix, identity, matmul, rank, saturate
from .repmodel import MonomialElement, RepSpec, _coordinates, mod1, validate
from .weightset import ClassRelation, class_relation, equivalence_classes, is_q_stable

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReductionStep:
    class_orbit: tuple[tuple[int, ...], ...]
    relations: tuple[ClassRelation, ...]
    new_weights: tuple[tuple[int, ...], ...]
    m_before: int
    m_after: int
    v0_before: int
    v0_after: int
    group_propagated: bool
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class ReductionTrace:
    steps: tuple[ReductionStep, ...]
    final_spec: RepSpec
    initial_spec: RepSpec = field(repr=False, default=None)

    @property
    def group_propagated(self) -> bool:
        return all(s.group_propagated for s in self.steps)


def _orbit(N: tuple[int, ...], classes: list[tuple[int, ...]],
           gens: Sequence[MonomialElement]) -> tuple[list[tuple[int, ...]], bool]:
    orbit = [N]
    ok = True
    i = 0
    while i < len(orbit):
        for g in gens:
            image = tuple(sorted(g.perm[j] for j in orbit[i]))
            if image not in classes:
                return [N], False
            if image not in orbit:
                orbit.append(image)
        i += 1
    return sorted(orbit), ok


# exact 2x2 models of C acting by rotations of order dividing 4 or 6
_SQUARE = {
    "gram": ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))),
    "rot": ((0, -1), (1, 0)),          # multiplication by i in basis (1, i)
    "conj": ((1, 0), (0, -1)),
    "order": 4,
}
_HEX = {
    "gram": ((Fraction(1), Fraction(-1, 2)), (Fraction(-1, 2), Fraction(1))),
    "rot": ((1, -1), (1, 0)),          # multiplication by 1 + w in basis (1, w)
    "conj": ((1, -1), (0, -1)),
    "order": 6,
}


def _plane_model(phases: list[Fraction]):
    for model in (_SQUARE, _HEX):
        if all((p * model["order"]).denominator == 1 for p in phases):
            return model
    return None


def _plane_matrix(model, phi: Fraction, conj: bool) -> Matrix:
    k = int(mod1(phi) * model["order"])
    M = identity(2)
    for _ in range(k):
        M = matmul(model["rot"], M)
    if conj:
        M = matmul(M, model["conj"])
    return tuple(tuple(Fraction(v) for v in row) for row in M)


def _hyperplane_gram(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) - Fraction(1, n) for j in range(n - 1))
                 for i in range(n - 1))


def _hyperplane_map(N: Sequence[int], Nt: Sequence[int], perm: Sequence[int]) -> Matrix:
    """Action on ``|z|^2`` coordinates of class ``N`` landing in class ``Nt``.

    A point of ``R^n / R(1,...,1)`` is stored as ``x`` with its last entry
    zero; the first ``n - 1`` entries are the coordinates.
    """
    n = len(N)
    inv = {perm[j]: j for j in N}
    M = [[Fraction(0)] * (n - 1) for _ in range(n - 1)]
    src_last = inv[Nt[-1]]
    for k in range(n - 1):
        src = inv[Nt[k]]
        if src != N[-1]:
            M[k][N.index(src)] += 1
        if src_last != N[-1]:
            M[k][N.index(src_last)] -= 1
    return tuple(tuple(row) for row in M)


def _block_diag(blocks: list[Matrix]) -> Matrix:
    n = sum(len(b) for b in blocks)
    out = [[Fraction(0)] * n for _ in range(n)]
    o = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[o + i][o + j] = Fraction(v)
        o += len(b)
    return tuple(tuple(r) for r in out)


def reduce_step(spec: RepSpec) -> tuple[RepSpec, ReductionStep]:
    P = spec.weight_multiset
    if not is_q_stable(P, 1):
        raise Not1Stable("weight multiset is not 1-stable")
    classes = equivalence_classes(P)
    candidates = sorted(c for c in classes if len(c) >= 2)
    if not candidates:
        raise NoReducibleClass("all equivalence classes are singletons")
    warnings: list[str] = []
    orbit, propagated = _orbit(candidates[0], classes, spec.generators)
    if not propagated:
        warnings.append("generators do not permute the equivalence classes; dropped")
    rels = [class_relation(P, N) for N in orbit]
    removed = {j for N in orbit for j in N}
    survivors = [j for j in range(spec.n_lines) if j not in removed]

    sums = [rel.combination(P) for rel in rels]
    rest = [spec.weights[j] for j in survivors]
    basis = saturate(rest, spec.m)
    m_after = len(basis)
    if m_after != spec.m - sum(len(N) - 1 for N in orbit):
        raise InternalContradiction("torus dimension ledger violated")
    restricted_rest = [_coordinates(w, basis) for w in rest]
    new_weights = []
    for s in sums:
        if any(s):
            if rank(list(rest) + [s]) != rank(rest):
                raise InternalContradiction("class character outside the surviving span")
            new_weights.append(_coordinates(s, basis))
        else:
            new_weights.append((0,) * m_after)

    lines_out = survivors + [("new", k) for k, s in enumerate(sums) if any(s)]
    folded = [k for k, s in enumerate(sums) if not any(s)]

    # V0 layout: old block, then per class its hyperplane and (if folded) a plane
    offsets = {}
    o = spec.v0_dim
    grams = [spec.v0_gram]
    for k, N in enumerate(orbit):
        offsets[("hyp", k)] = o
        grams.append(_hyperplane_gram(len(N)))
        o += len(N) - 1
        if k in folded:
            offsets[("fold", k)] = o
            o += 2
            grams.append(None)  # filled once the plane model is known
    v0_after = o

    gens: list[MonomialElement] = []
    model = _SQUARE
    if propagated and spec.generators:
        gens, model, ok = _propagate(spec, orbit, rels, survivors, lines_out, folded, offsets, v0_after)
        if not ok:
            propagated = False
            gens = []
            model = _SQUARE
            warnings.append("class plane rotations have no exact rational model; generators dropped")
    grams = [model["gram"] if g is None else g for g in grams]
    gram = _block_diag([g for g in grams if g])

    weights = tuple(restricted_rest) + tuple(w for w, s in zip(new_weights, sums) if any(s))
    new_spec = RepSpec(m_after, weights, v0_after, gram, tuple(gens), spec.group_order_cap,
                       spec.iv_trials, spec.seed)
    for w in warnings:
        log.warning(w)
    if gens:
        try:
            validate(new_spec)
        except InvalidInput as e:
            raise InternalContradiction(f"propagated generators fail validation: {e}") from e
    step = ReductionStep(tuple(orbit), tuple(rels), tuple(new_weights), spec.m, m_after,
                         spec.v0_dim, v0_after, propagated, tuple(warnings))
    return new_spec, step


def _propagate(spec, orbit, rels, survivors, lines_out, folded, offsets, v0_dim):
    pos = {key: i for i, key in enumerate(lines_out)}
    cls_index = {N: k for k, N in enumerate(orbit)}
    raw = []
    phases = []
    for g in spec.generators:
        data = {}
        for k, N in enumerate(orbit):
            image = tuple(sorted(g.perm[j] for j in N))
            kt = cls_index[image]
            rel, relt = rels[k], rels[kt]
            eps = {relt.flip(g.perm[j]) * rel.flip(j) * g.sign(j) for j in N}
            if len(eps) != 1:
                raise MixedConjugationOnClass(f"generator {g.name!r} conjugates class {list(N)} inconsistently")
            if any(relt.coef(g.perm[j]) != rel.coef(j) for j in N):
                raise InternalContradiction("class exponents are not preserved")
            phi = mod1(sum(rel.coef(j) * relt.flip(g.perm[j]) * g.rot[j] for j in N))
            data[k] = (kt, eps.pop() == -1, phi)
            if k in folded:
                phases.append(phi)
        raw.append((g, data))
    model = _plane_model(phases)
    if model is None:
        return [], None, False

    gens = []
    for g, data in raw:
        n = len(lines_out)
        perm, conj, rot = [0] * n, [False] * n, [Fraction(0)] * n
        for j in survivors:
            i = pos[j]
            perm[i] = pos[g.perm[j]]
            conj[i] = g.conj[j]
            rot[i] = g.rot[j]
        B = [[Fraction(0)] * v0_dim for _ in range(v0_dim)]
        for i, row in enumerate(g.v0_block):
            for j, v in enumerate(row):
                B[i][j] = v
        for k, N in enumerate(orbit):
            kt, cj, phi = data[k]
            Nt = orbit[kt]
            H = _hyperplane_map(N, Nt, g.perm)
            oi, oj = offsets[("hyp", kt)], offsets[("hyp", k)]
            for a, row in enumerate(H):
                for b, v in enumerate(row):
                    B[oi + a][oj + b] = v
            if k in folded:
                F = _plane_matrix(model, phi, cj)
                oi, oj = offsets[("fold", kt)], offsets[("fold", k)]
                for a in range(2):
                    for b in range(2):
                        B[oi + a][oj + b] = F[a][b]
            else:
                i = pos[("new", k)]
                perm[i] = pos[("new", kt)]
                conj[i] = cj
                rot[i] = phi
        gens.append(MonomialElement(tuple(perm), tuple(conj), tuple(rot),
                                    tuple(tuple(r) for r in B), g.name))
    return gens, model, True


def reduce_to_2stable(spec: RepSpec) -> ReductionTrace:
    steps = []
    cur = spec
    while True:
        classes = equivalence_classes(cur.weight_multiset)
        if all(len(c) == 1 for c in classes):
            if not is_q_stable(cur.weight_multiset, 1):
                raise Not1Stable("weight multiset is not 1-stable")
            break
        cur, step = reduce_step(cur)
        steps.append(step)
    return ReductionTrace(tuple(steps), cur, spec)
