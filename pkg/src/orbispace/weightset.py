"""Finite multisets of integer weight vectors.

Items are identified by list index so duplicates stay distinguishable; every
partition returned here is a partition of indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import gcd
from typing import Sequence

from .errors import CapExceeded, InternalContradiction, Not1Stable, NotAClass
from .linalg import int_rank, kernel_basis, rank, transpose

MAX_NONZERO = 24


@dataclass(frozen=True)
class WeightMultiset:
    m: int
    items: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        items = tuple(tuple(int(x) for x in v) for v in self.items)
        if any(len(v) != self.m for v in items):
            raise ValueError("every weight must have length m")
        object.__setattr__(self, "items", items)

    @classmethod
    def of(cls, items: Sequence[Sequence[int]], m: int | None = None) -> "WeightMultiset":
        items = [tuple(v) for v in items]
        if m is None:
            if not items:
                raise ValueError("torus dimension needed for an empty multiset")
            m = len(items[0])
        return cls(m, tuple(items))

    def __len__(self) -> int:
        return len(self.items)

    def nonzero_indices(self) -> list[int]:
        return [i for i, v in enumerate(self.items) if any(v)]

    def zero_indices(self) -> list[int]:
        return [i for i, v in enumerate(self.items) if not any(v)]

    def span_dim(self, indices: Sequence[int] | None = None) -> int:
        idx = range(len(self.items)) if indices is None else indices
        rows = [self.items[i] for i in idx]
        return int_rank(rows) if rows and self.m else 0


@dataclass(frozen=True)
class Decomposition:
    blocks: tuple[tuple[int, ...], ...]
    zeros: tuple[int, ...]


@dataclass(frozen=True)
class ClassRelation:
    class_indices: tuple[int, ...]
    sign_flips: tuple[int, ...]   # aligned with class_indices
    coefficients: tuple[int, ...]  # aligned with class_indices

    def flip(self, i: int) -> int:
        return self.sign_flips[self.class_indices.index(i)]

    def coef(self, i: int) -> int:
        return self.coefficients[self.class_indices.index(i)]

    def combination(self, P: WeightMultiset) -> tuple[int, ...]:
        """``sum_j a_j * flip_j * lambda_j`` in the coordinates of ``P``."""
        out = [0] * P.m
        for j, f, a in zip(self.class_indices, self.sign_flips, self.coefficients):
            for k in range(P.m):
                out[k] += a * f * P.items[j][k]
        return tuple(out)


def is_q_stable(P: WeightMultiset, q: int) -> bool:
    """Whether ``span`` survives the removal of any ``q`` or fewer items.

    Zero items never change the span, so only nonzero items are removed, and
    since removing more items can only shrink the span it suffices to try
    removals of exactly ``min(q, #nonzero)`` items.
    """
    if q < 0:
        raise ValueError("q must be nonnegative")
    nz = P.nonzero_indices()
    if len(nz) > MAX_NONZERO:
        raise CapExceeded(f"{len(nz)} nonzero weights exceed the cap of {MAX_NONZERO}")
    full = P.span_dim(nz)
    if full == 0:
        return True
    k = min(q, len(nz))
    for removed in combinations(range(len(nz)), k):
        gone = set(removed)
        rest = [P.items[nz[i]] for i in range(len(nz)) if i not in gone]
        if not rest or int_rank(rest) < full:
            return False
    return True


def _kernel(P: WeightMultiset, idx: Sequence[int]):
    """Pivot-normalized kernel basis of the column matrix of items ``idx``."""
    cols = [P.items[i] for i in idx]
    M = transpose(cols, P.m) if cols else ()
    if P.m == 0:
        M = ()
    return kernel_basis(M, len(idx))


def indecomposable_components(P: WeightMultiset) -> Decomposition:
    """Finest splitting of the nonzero items into blocks with independent spans."""
    nz = P.nonzero_indices()
    parent = list(range(len(nz)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for vec in _kernel(P, nz):
        supp = [i for i, c in enumerate(vec) if c]
        for i in supp[1:]:
            a, b = find(supp[0]), find(i)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for i in range(len(nz)):
        groups.setdefault(find(i), []).append(nz[i])
    blocks = tuple(sorted(tuple(g) for g in groups.values()))
    if sum(P.span_dim(b) for b in blocks) != P.span_dim(nz):
        raise InternalContradiction("component spans are not independent")
    return Decomposition(blocks, tuple(P.zero_indices()))


def _class_partition(P: WeightMultiset, basis, nz: list[int]) -> list[list[int]]:
    # row i of the basis matrix holds coordinate i of every kernel vector; two
    # coordinates vanish together on the kernel iff their rows have equal rank
    # individually and jointly
    rows = [tuple(v[i] for v in basis) for i in range(len(nz))]
    r1 = [rank([r]) if basis else 0 for r in rows]
    classes: list[list[int]] = []
    for i in range(len(nz)):
        for cls in classes:
            j = cls[0]
            if r1[i] == r1[j] == (rank([rows[i], rows[j]]) if basis else 0):
                cls.append(i)
                break
        else:
            classes.append([i])
    return [[nz[i] for i in c] for c in classes]


def equivalence_classes(P: WeightMultiset) -> list[tuple[int, ...]]:
    """Partition of all indices by simultaneous vanishing in linear relations."""
    nz = P.nonzero_indices()
    basis = _kernel(P, nz)
    classes = [tuple(c) for c in _class_partition(P, basis, nz)]
    classes += [(z,) for z in P.zero_indices()]
    return sorted(classes)


def two_stable_via_crit(P: WeightMultiset) -> bool:
    """2-stability of a 1-stable multiset, read off its equivalence classes."""
    if not is_q_stable(P, 1):
        raise Not1Stable("weight multiset is not 1-stable")
    return all(len(c) == 1 for c in equivalence_classes(P))


def class_relation(P: WeightMultiset, N: Sequence[int]) -> ClassRelation:
    """The unique positive relation carried by an equivalence class.

    Sign convention: when the combination ``sum a_j flip_j lambda_j`` is
    nonzero it is made lexicographically positive; when it vanishes, the
    entry of smallest magnitude (earliest on ties) gets flip ``+1``.

    Only the items of ``N`` need to survive single removals; items outside
    the class do not affect the relation.
    """
    N = tuple(sorted(N))
    nz = P.nonzero_indices()
    full = P.span_dim(nz)
    for i in N:
        if i in nz and P.span_dim([j for j in nz if j != i]) < full:
            raise Not1Stable(f"removing item {i} drops the span")
    if len(N) < 2 or N not in equivalence_classes(P):
        raise NotAClass(f"{list(N)} is not an equivalence class with at least 2 items")
    basis = _kernel(P, nz)
    pos = [nz.index(i) for i in N]
    proj = [tuple(v[p] for p in pos) for v in basis]
    if rank(proj) != 1:
        raise InternalContradiction("class projection of the kernel is not one-dimensional")
    gen = next(v for v in proj if any(v))
    if any(c == 0 for c in gen):
        raise InternalContradiction("class relation has a vanishing coefficient")
    pivot = min(range(len(gen)), key=lambda i: (abs(gen[i]), i))
    scaled = [c / gen[pivot] for c in gen]
    den = 1
    for c in scaled:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in scaled]
    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = [c // g for c in ints]
    rel = ClassRelation(N, tuple(1 if c > 0 else -1 for c in ints), tuple(abs(c) for c in ints))
    comb = rel.combination(P)
    first = next((c for c in comb if c), 0)
    if first < 0:
        rel = ClassRelation(N, tuple(-f for f in rel.sign_flips), rel.coefficients)
    return rel
