"""Representation data model and exact group computations.

The space is ``V = C_0 + ... + C_{n-1} + V0``: one complex line per weight plus
a real block ``V0`` on which the torus acts trivially. A monomial element acts
by the left-action convention

    (g z)_{perm[j]} = exp(2 pi i rot[j]) * c_j(z_j),   g v = v0_block @ v,

where ``c_j`` is complex conjugation when ``conj[j]`` is set and the identity
otherwise. Composition ``g * h`` means "apply h, then g".
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .errors import (
    CapExceeded,
    InconsistentAd,
    InternalContradiction,
    InvalidInput,
    NotOrthogonal,
    WeightsDontSpan,
)
from .linalg import (
    Lattice,
    Matrix,
    dot,
    frac,
    hermite_normal_form,
    identity,
    integer_kernel,
    inverse,
    in_subtorus,
    is_positive_definite,
    matmul,
    rank,
    rref,
    solve_congruences,
    sub,
    transpose,
)
from .weightset import WeightMultiset

DEFAULT_GROUP_ORDER_CAP = 20000
DEFAULT_IV_TRIALS = 2000
MAX_LINEAR_CYCLES = 16
MAX_CONGRUENCE_POINTS = 100000


def mod1(x) -> Fraction:
    x = frac(x)
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class MonomialElement:
    perm: tuple[int, ...]
    conj: tuple[bool, ...]
    rot: tuple[Fraction, ...]
    v0_block: Matrix = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(int(p) for p in self.perm))
        object.__setattr__(self, "conj", tuple(bool(c) for c in self.conj))
        object.__setattr__(self, "rot", tuple(mod1(r) for r in self.rot))
        object.__setattr__(self, "v0_block", tuple(tuple(frac(v) for v in row) for row in self.v0_block))
        n = len(self.perm)
        if len(self.conj) != n or len(self.rot) != n:
            raise InvalidInput("perm, conj and rot must have equal length")
        if sorted(self.perm) != list(range(n)):
            raise InvalidInput(f"perm {list(self.perm)} is not a permutation")
        if any(len(row) != len(self.v0_block) for row in self.v0_block):
            raise InvalidInput("v0_block must be square")

    @classmethod
    def identity(cls, n_lines: int, v0_dim: int = 0, name: str = "") -> "MonomialElement":
        return cls(tuple(range(n_lines)), (False,) * n_lines, (Fraction(0),) * n_lines,
                   identity(v0_dim), name)

    @property
    def n_lines(self) -> int:
        return len(self.perm)

    @property
    def v0_dim(self) -> int:
        return len(self.v0_block)

    def sign(self, j: int) -> int:
        return -1 if self.conj[j] else 1

    def __mul__(self, other: "MonomialElement") -> "MonomialElement":
        if other.n_lines != self.n_lines or other.v0_dim != self.v0_dim:
            raise InvalidInput("incompatible elements")
        perm, conj, rot = [], [], []
        for j in range(self.n_lines):
            k = other.perm[j]
            perm.append(self.perm[k])
            conj.append(self.conj[k] != other.conj[j])
            rot.append(self.rot[k] + self.sign(k) * other.rot[j])
        B = matmul(self.v0_block, other.v0_block) if self.v0_dim else ()
        return MonomialElement(tuple(perm), tuple(conj), tuple(rot), B)

    def inverse(self) -> "MonomialElement":
        n = self.n_lines
        perm, conj, rot = [0] * n, [False] * n, [Fraction(0)] * n
        for j in range(n):
            k = self.perm[j]
            perm[k] = j
            conj[k] = self.conj[j]
            rot[k] = -self.sign(j) * self.rot[j]
        B = inverse(self.v0_block) if self.v0_dim else ()
        return MonomialElement(tuple(perm), tuple(conj), tuple(rot), B)

    def is_identity(self) -> bool:
        return self == MonomialElement.identity(self.n_lines, self.v0_dim)

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for j in range(self.n_lines):
            if j in seen:
                continue
            cyc = [j]
            seen.add(j)
            k = self.perm[j]
            while k != j:
                cyc.append(k)
                seen.add(k)
                k = self.perm[k]
            out.append(tuple(cyc))
        return out


def element_algebra(g: MonomialElement, h: MonomialElement) -> MonomialElement:
    return g * h


def inverse_element(g: MonomialElement) -> MonomialElement:
    return g.inverse()


@dataclass(frozen=True)
class RepSpec:
    m: int
    weights: tuple[tuple[int, ...], ...]
    v0_dim: int = 0
    v0_gram: Matrix | None = None
    generators: tuple[MonomialElement, ...] = ()
    group_order_cap: int = DEFAULT_GROUP_ORDER_CAP
    iv_trials: int = DEFAULT_IV_TRIALS
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(tuple(int(x) for x in w) for w in self.weights))
        gram = identity(self.v0_dim) if self.v0_gram is None else self.v0_gram
        object.__setattr__(self, "v0_gram", tuple(tuple(frac(v) for v in row) for row in gram))
        object.__setattr__(self, "generators", tuple(self.generators))

    @property
    def n_lines(self) -> int:
        return len(self.weights)

    @property
    def real_dim(self) -> int:
        return 2 * self.n_lines + self.v0_dim

    @property
    def weight_multiset(self) -> WeightMultiset:
        return WeightMultiset(self.m, self.weights)

    @cached_property
    def annihilator(self) -> Lattice:
        """Saturated lattice of integer relations among the weights."""
        return integer_kernel(self.weights, self.n_lines, self.m)

    def identity_element(self) -> MonomialElement:
        return MonomialElement.identity(self.n_lines, self.v0_dim)

    def torus_element(self, x: Sequence) -> MonomialElement:
        """The torus point ``x in R^m/Z^m`` as an element (rotation ``lambda_j . x``)."""
        rot = tuple(dot(w, [frac(v) for v in x]) for w in self.weights)
        return MonomialElement(tuple(range(self.n_lines)), (False,) * self.n_lines, rot,
                               identity(self.v0_dim))

    def with_generators(self, gens: Iterable[MonomialElement]) -> "RepSpec":
        return replace(self, generators=tuple(gens))


@dataclass(frozen=True)
class AdInfo:
    A: Matrix
    rk_E_minus_A: int
    dim_ker_E_minus_g: int
    rk_E_minus_g: int
    omega: int
    in_Omega: bool


# ------------------------------------------------------------------ Ad


def ad_matrix(g: MonomialElement, spec: RepSpec) -> Matrix:
    """The rational ``A`` with ``A lambda_j = s_j lambda_{perm j}`` for all lines."""
    m, n = spec.m, spec.n_lines
    if m == 0:
        return ()
    target = [tuple(g.sign(j) * x for x in spec.weights[g.perm[j]]) for j in range(n)]
    # rows: lambda_j^T A^T = target_j^T
    aug = [list(spec.weights[j]) + list(target[j]) for j in range(n)]
    R, piv = rref(aug, 2 * m)
    if any(p >= m for p in piv):
        raise InconsistentAd(f"no linear map realizes the weight permutation of {g.name or 'element'}")
    if len(piv) < m:
        raise WeightsDontSpan("weights do not span the torus character space")
    At = [R[i][m:] for i in range(m)]
    return transpose(At, m)


def _ad_rank(A: Matrix) -> int:
    m = len(A)
    return rank(sub(identity(m), A)) if m else 0


def dim_ker_E_minus_g(g: MonomialElement) -> int:
    """Exact ``dim Ker(E - g)`` from the cycle structure and the V0 block."""
    d = 0
    for cyc in g.cycles():
        parity, phi = _cycle_return(g, cyc)
        if parity:
            d += 1
        elif phi == 0:
            d += 2
    if g.v0_dim:
        d += g.v0_dim - rank(sub(identity(g.v0_dim), g.v0_block))
    return d


def rank_E_minus_g(g: MonomialElement) -> int:
    return 2 * g.n_lines + g.v0_dim - dim_ker_E_minus_g(g)


def _cycle_return(g: MonomialElement, cyc: Sequence[int]) -> tuple[bool, Fraction]:
    """Conjugation parity and rotation of the return map of ``g`` on a cycle."""
    parity = False
    phi = Fraction(0)
    for j in cyc:
        phi = g.rot[j] + g.sign(j) * phi
        parity ^= g.conj[j]
    return parity, mod1(phi)


def omega_invariants(g: MonomialElement, spec: RepSpec) -> AdInfo:
    A = ad_matrix(g, spec)
    rkA = _ad_rank(A)
    dk = dim_ker_E_minus_g(g)
    rk = spec.real_dim - dk
    om = rk - rkA
    return AdInfo(A, rkA, dk, rk, om, om in (0, 2))


# ---------------------------------------------------------- validation


def _check_element_shape(g: MonomialElement, spec: RepSpec) -> None:
    if g.n_lines != spec.n_lines:
        raise InvalidInput(f"generator {g.name!r} acts on {g.n_lines} lines, spec has {spec.n_lines}")
    if g.v0_dim != spec.v0_dim:
        raise InvalidInput(f"generator {g.name!r} has a {g.v0_dim}-dim V0 block, spec has {spec.v0_dim}")


def validate(spec: RepSpec) -> list[AdInfo]:
    """Check the spec and return the Ad data of every generator."""
    if spec.m < 0 or spec.v0_dim < 0:
        raise InvalidInput("dimensions must be nonnegative")
    for w in spec.weights:
        if len(w) != spec.m:
            raise InvalidInput(f"weight {list(w)} does not have length m={spec.m}")
        if not any(w):
            raise InvalidInput("line weights must be nonzero (torus-fixed directions belong to V0)")
    if rank(spec.weights) != spec.m:
        raise WeightsDontSpan("weights do not span the torus character space")
    G = spec.v0_gram
    if len(G) != spec.v0_dim or any(len(row) != spec.v0_dim for row in G):
        raise InvalidInput("v0_gram has the wrong shape")
    if G != transpose(G, spec.v0_dim) or not is_positive_definite(G):
        raise InvalidInput("v0_gram must be symmetric positive definite")
    out = []
    for g in spec.generators:
        _check_element_shape(g, spec)
        if spec.v0_dim:
            B = g.v0_block
            if matmul(matmul(transpose(B), G), B) != G:
                raise NotOrthogonal(f"v0 block of {g.name!r} is not orthogonal for the Gram form")
        A = ad_matrix(g, spec)
        if spec.m and rank(A) != spec.m:
            raise InconsistentAd(f"Ad of {g.name!r} is singular")
        out.append(omega_invariants(g, spec))
    return out


# ---------------------------------------------------- component group


def coset_key(g: MonomialElement, spec: RepSpec) -> tuple:
    """Canonical label of the coset ``g G0``.

    Right translates ``g t`` change the rotation on line ``j`` by
    ``s_j delta_j`` with ``delta`` in the image subtorus, so the signed
    rotation vector modulo that subtorus is an invariant; the annihilator
    lattice evaluates it exactly.
    """
    signed = [g.sign(j) * g.rot[j] for j in range(g.n_lines)]
    res = tuple(mod1(dot(d, signed)) for d in spec.annihilator.basis)
    return (g.perm, g.conj, g.v0_block, res)


def same_coset(g: MonomialElement, h: MonomialElement, spec: RepSpec) -> bool:
    """Whether ``g^{-1} h`` lies in the identity component."""
    d = g.inverse() * h
    if d.perm != tuple(range(d.n_lines)) or any(d.conj) or d.v0_block != identity(d.v0_dim):
        return False
    return in_subtorus(d.rot, spec.annihilator)


@dataclass(frozen=True)
class Coset:
    representative: MonomialElement
    A: Matrix
    key: tuple = field(repr=False)


class ComponentGroup:
    """The finite group ``G / G0`` with cosets in BFS discovery order."""

    def __init__(self, spec: RepSpec, cosets: list[Coset]):
        self.spec = spec
        self.cosets = cosets
        self._index = {c.key: i for i, c in enumerate(cosets)}

    def __len__(self) -> int:
        return len(self.cosets)

    def __iter__(self):
        return iter(self.cosets)

    def find(self, g: MonomialElement) -> Coset | None:
        i = self._index.get(coset_key(g, self.spec))
        return None if i is None else self.cosets[i]

    def index(self, c: Coset) -> int:
        return self._index[c.key]

    def contains(self, g: MonomialElement) -> bool:
        return coset_key(g, self.spec) in self._index


def _closure(start: MonomialElement, gens: Sequence[MonomialElement],
             key: Callable[[MonomialElement], object], cap: int) -> list[MonomialElement]:
    seen = {key(start)}
    out = [start]
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = g * x
            k = key(y)
            if k not in seen:
                seen.add(k)
                out.append(y)
                if len(out) > cap:
                    raise CapExceeded(f"group enumeration exceeded the cap of {cap}")
                queue.append(y)
    return out


def _cap(spec: RepSpec) -> int:
    return spec.group_order_cap


@lru_cache(maxsize=128)
def _component_group(spec: RepSpec) -> ComponentGroup:
    elems = _closure(spec.identity_element(), spec.generators,
                     lambda g: coset_key(g, spec), _cap(spec))
    cosets = [Coset(g, ad_matrix(g, spec), coset_key(g, spec)) for g in elems]
    return ComponentGroup(spec, cosets)


def component_group(spec: RepSpec) -> ComponentGroup:
    return _component_group(spec)


def finite_closure(gens: Sequence[MonomialElement], n_lines: int, v0_dim: int,
                   cap: int) -> list[MonomialElement]:
    """Exact closure of a finite set of elements (no torus quotient)."""
    return _closure(MonomialElement.identity(n_lines, v0_dim), list(gens), lambda g: g, cap)


# ------------------------------------------------ translates and Omega


@dataclass(frozen=True)
class MeetsOmega:
    status: str  # "yes" | "no" | "capped"
    witness: MonomialElement | None = None

    def __bool__(self) -> bool:
        return self.status == "yes"


def _linear_cycle_data(g: MonomialElement, spec: RepSpec):
    """Split cycles into the fixed-kernel part and affine data of linear cycles.

    For the right translate ``g t_x`` the return rotation of a linear cycle
    is ``phi0 + mu . x (mod 1)`` with an integer vector ``mu``.
    """
    fixed = 0
    linear = []
    for cyc in g.cycles():
        parity = False
        phi = Fraction(0)
        coef: dict[int, int] = {}
        for j in cyc:
            s = g.sign(j)
            phi = g.rot[j] + s * phi
            coef = {k: s * c for k, c in coef.items()}
            coef[j] = coef.get(j, 0) + s
            parity ^= g.conj[j]
        if parity:
            fixed += 1
            continue
        mu = [0] * spec.m
        for j, c in coef.items():
            for t in range(spec.m):
                mu[t] += c * spec.weights[j][t]
        linear.append((mod1(phi), tuple(mu), cyc))
    if g.v0_dim:
        fixed += g.v0_dim - rank(sub(identity(g.v0_dim), g.v0_block))
    return fixed, linear


def _generic_point(constraints: list[tuple[list[int], Fraction]], nfree: int) -> list[Fraction]:
    """A rational ``y`` with ``c . y != beta (mod 1)`` for every constraint.

    Every constraint has a nonzero integer vector ``c``. Along the direction
    ``(1, b, b^2, ...)`` with ``b`` larger than twice every coefficient each
    ``c`` pairs to a nonzero integer ``K``; the point ``y = (1/P) * dir`` for a
    prime ``P`` exceeding all ``|K|`` and all denominators of ``beta`` then
    gives ``K/P``, whose reduced denominator is ``P``, never congruent to beta.
    """
    if not constraints:
        return [Fraction(0)] * nfree
    b = 2 * max(abs(x) for c, _ in constraints for x in c) + 1
    direction = [b ** i for i in range(nfree)]
    bound = max(max(abs(dot(c, direction)), beta.denominator) for c, beta in constraints)
    P = _next_prime(bound + 1)
    return [Fraction(d, P) for d in direction]


def _next_prime(n: int) -> int:
    n = max(n, 2)
    while any(n % p == 0 for p in range(2, int(n ** 0.5) + 1)):
        n += 1
    return n


def _exact_pattern(linear, Z: Sequence[int], m: int) -> list[Fraction] | None:
    """A torus point making exactly the linear cycles in ``Z`` fixed, if any."""
    zs = set(Z)
    M = [linear[i][1] for i in Z]
    b = [-linear[i][0] for i in Z]
    sol = solve_congruences(M, b, m)
    if not sol.feasible:
        return None
    if sol.count() > MAX_CONGRUENCE_POINTS:
        raise CapExceeded("too many discrete torus solutions")
    free = sol.free_directions
    others = [i for i in range(len(linear)) if i not in zs]
    for p in sol.points():
        constraints = []
        ok = True
        for i in others:
            phi0, mu, _ = linear[i]
            c = [dot(mu, f) for f in free]
            beta = mod1(-(phi0 + dot(mu, p)))
            if any(c):
                constraints.append((c, beta))
            elif beta == 0:
                ok = False
                break
        if not ok:
            continue
        y = _generic_point(constraints, len(free))
        return [mod1(p[t] + sum(y[k] * free[k][t] for k in range(len(free)))) for t in range(m)]
    return None


def find_translate(g: MonomialElement, spec: RepSpec, accept_rank: Callable[[int], bool],
                   prefer_small: bool = True) -> MonomialElement | None:
    """A translate ``g t`` (``t`` in the torus) with ``accept_rank(rk(E - g t))``."""
    fixed, linear = _linear_cycle_data(g, spec)
    if len(linear) > MAX_LINEAR_CYCLES:
        raise CapExceeded(f"{len(linear)} linear cycles exceed the cap of {MAX_LINEAR_CYCLES}")
    sizes = range(len(linear), -1, -1) if prefer_small else range(len(linear) + 1)
    for size in sizes:
        rk = spec.real_dim - fixed - 2 * size
        if not accept_rank(rk):
            continue
        for Z in combinations(range(len(linear)), size):
            x = _exact_pattern(linear, Z, spec.m)
            if x is None:
                continue
            w = g * spec.torus_element(x)
            if rank_E_minus_g(w) != rk:
                raise InternalContradiction("translate witness has the wrong rank")
            return w
    return None


def coset_meets_Omega(c: Coset | MonomialElement, spec: RepSpec) -> MeetsOmega:
    """Decide whether some element of the coset has ``omega in {0, 2}``."""
    g = c.representative if isinstance(c, Coset) else c
    rkA = _ad_rank(ad_matrix(g, spec))
    w = find_translate(g, spec, lambda rk: rk - rkA in (0, 2))
    if w is None:
        return MeetsOmega("no")
    if not omega_invariants(w, spec).in_Omega:
        raise InternalContradiction("Omega witness fails the omega test")
    return MeetsOmega("yes", w)


# ------------------------------------------------- products and generation


V0 = "v0"


def restrict_element(g: MonomialElement, block: Iterable) -> MonomialElement | None:
    """``g`` on the block (line indices and/or ``"v0"``), identity elsewhere.

    Returns ``None`` when ``g`` does not preserve the block.
    """
    block = set(block)
    lines = {b for b in block if b != V0}
    if any(g.perm[j] not in lines for j in lines):
        return None
    perm = [g.perm[j] if j in lines else j for j in range(g.n_lines)]
    conj = [g.conj[j] if j in lines else False for j in range(g.n_lines)]
    rot = [g.rot[j] if j in lines else Fraction(0) for j in range(g.n_lines)]
    B = g.v0_block if V0 in block else identity(g.v0_dim)
    return MonomialElement(tuple(perm), tuple(conj), tuple(rot), B)


def factors_over_partition(c: Coset, partition: Sequence[Iterable], spec: RepSpec) -> bool:
    """Whether every block restriction of the coset representative lies in G.

    Exact when the image subtorus splits over the partition (true for the
    partition into indecomposable components plus V0), because torus factors
    then restrict into the torus.
    """
    group = component_group(spec)
    for block in partition:
        r = restrict_element(c.representative, block)
        if r is None or not group.contains(r):
            return False
    return True


def cosets_generate(subset: Iterable[Coset], spec: RepSpec) -> bool:
    group = component_group(spec)
    reps = [c.representative for c in subset]
    reached = _closure(spec.identity_element(), reps, lambda g: coset_key(g, spec), len(group))
    return len(reached) == len(group)


# ------------------------------------------------------- spec transforms


def flip_lines(spec: RepSpec, lines: Iterable[int]) -> RepSpec:
    """Replace the coordinate ``z_j`` by its conjugate on the given lines.

    The stored weight changes sign and every generator is rewritten in the
    new coordinates, so the represented group is unchanged.
    """
    lines = set(lines)
    f = [-1 if j in lines else 1 for j in range(spec.n_lines)]
    weights = tuple(tuple(f[j] * x for x in w) for j, w in enumerate(spec.weights))
    gens = []
    for g in spec.generators:
        conj = tuple(g.sign(j) * f[g.perm[j]] * f[j] == -1 for j in range(g.n_lines))
        rot = tuple(f[g.perm[j]] * g.rot[j] for j in range(g.n_lines))
        gens.append(MonomialElement(g.perm, conj, rot, g.v0_block, g.name))
    return replace(spec, weights=weights, generators=tuple(gens))


def relabel_lines(spec: RepSpec, order: Sequence[int]) -> RepSpec:
    """Reorder lines: new line ``i`` is old line ``order[i]``."""
    pos = {old: new for new, old in enumerate(order)}
    weights = tuple(spec.weights[o] for o in order)
    gens = []
    for g in spec.generators:
        perm = tuple(pos[g.perm[o]] for o in order)
        gens.append(MonomialElement(perm, tuple(g.conj[o] for o in order),
                                    tuple(g.rot[o] for o in order), g.v0_block, g.name))
    return replace(spec, weights=weights, generators=tuple(gens))


def restrict_spec(spec: RepSpec, lines: Sequence[int], with_v0: bool) -> RepSpec:
    """The factor representation on the given lines (and optionally V0).

    The factor torus is the image of ``G0`` on those lines; its character
    lattice is the integer span of their weights, used as new coordinates.
    Every generator must preserve the block.
    """
    lines = sorted(lines)
    pos = {j: i for i, j in enumerate(lines)}
    rows = [spec.weights[j] for j in lines]
    basis = hermite_normal_form(rows, spec.m) if rows else ()
    k = len(basis)
    new_weights = []
    for w in rows:
        coords = _coordinates(w, basis)
        new_weights.append(coords)
    v0_dim = spec.v0_dim if with_v0 else 0
    gram = spec.v0_gram if with_v0 else ()
    gens = []
    for g in spec.generators:
        if any(g.perm[j] not in pos for j in lines):
            raise InvalidInput(f"generator {g.name!r} does not preserve the block")
        gens.append(MonomialElement(tuple(pos[g.perm[j]] for j in lines),
                                    tuple(g.conj[j] for j in lines),
                                    tuple(g.rot[j] for j in lines),
                                    g.v0_block if with_v0 else (), g.name))
    return replace(spec, m=k, weights=tuple(new_weights), v0_dim=v0_dim, v0_gram=gram,
                   generators=tuple(gens))


def _coordinates(w: Sequence[int], basis: Matrix) -> tuple[int, ...]:
    """Integer coordinates of ``w`` in the rows of ``basis``."""
    k = len(basis)
    aug = [list(col) + [x] for col, x in zip(transpose(basis, len(w)), w)]
    R, piv = rref(aug, k + 1)
    if any(p >= k for p in piv):
        raise InternalContradiction("weight outside its lattice")
    coords = [R[i][k] for i in range(k)]
    if any(c.denominator != 1 for c in coords):
        raise InternalContradiction("weight not integral in its lattice basis")
    return tuple(int(c) for c in coords)


def all_translates_with_rank(g: MonomialElement, spec: RepSpec, rk: int) -> list[MonomialElement]:
    """Every translate ``g t`` with ``rk(E - g t) = rk``; the set must be finite."""
    fixed, linear = _linear_cycle_data(g, spec)
    if len(linear) > MAX_LINEAR_CYCLES:
        raise CapExceeded(f"{len(linear)} linear cycles exceed the cap of {MAX_LINEAR_CYCLES}")
    twice = spec.real_dim - fixed - rk
    if twice < 0 or twice % 2 or twice // 2 > len(linear):
        return []
    out: dict[MonomialElement, None] = {}
    for Z in combinations(range(len(linear)), twice // 2):
        zs = set(Z)
        sol = solve_congruences([linear[i][1] for i in Z], [-linear[i][0] for i in Z], spec.m)
        if not sol.feasible:
            continue
        if sol.free_directions:
            raise InternalContradiction("translate family is infinite")
        if sol.count() > MAX_CONGRUENCE_POINTS:
            raise CapExceeded("too many discrete torus solutions")
        for x in sol.points():
            if any(mod1(linear[i][0] + dot(linear[i][1], x)) == 0
                   for i in range(len(linear)) if i not in zs):
                continue
            out[g * spec.torus_element(x)] = None
    return list(out)
