"""Exact rational and integer linear algebra.

Matrices are plain row lists (tuples of tuples once canonicalized). Rational
entries are ``fractions.Fraction``, which keeps every value gcd-reduced with a
positive denominator, so structural equality is value equality. Integer
matrices use Python ints, so no intermediate blowup can overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Sequence

from .errors import NotSaturated

Vector = tuple
Matrix = tuple  # tuple of row tuples


def frac(x) -> Fraction:
    """Parse an int, Fraction, or ``"p/q"`` string into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def fmt(x: Fraction) -> str:
    x = frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rat_matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(frac(v) for v in row) for row in rows)


def int_matrix(rows: Iterable[Iterable[int]]) -> Matrix:
    return tuple(tuple(int(v) for v in row) for row in rows)


def identity(n: int, one=Fraction(1)) -> Matrix:
    zero = one - one
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def transpose(M: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    if not M:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*M))


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    Bt = list(zip(*B)) if B else []
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def matvec(A: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in A)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def sub(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def rref(M: Sequence[Sequence], ncols: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row-echelon form over the rationals.

    Args:
        M: matrix as a sequence of rows.
        ncols: column count, needed only when ``M`` has no rows.

    Returns:
        ``(R, pivots)`` with ``R`` the unique RREF of ``M`` (same shape, zero
        rows last) and ``pivots`` the pivot column of each nonzero row.
    """
    A = [[frac(v) for v in row] for row in M]
    nrows = len(A)
    n = len(A[0]) if A else (ncols or 0)
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(nrows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return tuple(tuple(row) for row in A), pivots


def rank(M: Sequence[Sequence]) -> int:
    if not M or not M[0]:
        return 0
    if all(isinstance(v, int) for row in M for v in row):
        return int_rank(M)
    return len(rref(M)[1])


def int_rank(M: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix by fraction-free (Bareiss) elimination."""
    A = [list(row) for row in M]
    if not A:
        return 0
    nrows, ncols = len(A), len(A[0])
    r = 0
    prev = 1
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        piv = A[r][c]
        for i in range(r + 1, nrows):
            a = A[i][c]
            A[i] = [(piv * x - a * y) // prev for x, y in zip(A[i], A[r])]
        prev = piv
        r += 1
    return r


def kernel_basis(M: Sequence[Sequence], ncols: int | None = None) -> list[Vector]:
    """Pivot-normalized basis of the right kernel of ``M``.

    Each basis vector has a 1 in one free column and 0 in every other free
    column; its pivot entries are read off the RREF.
    """
    R, piv = rref(M, ncols)
    n = len(R[0]) if R else (ncols or 0)
    free = [c for c in range(n) if c not in set(piv)]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -R[i][f]
        basis.append(tuple(v))
    return basis


def inverse(M: Sequence[Sequence]) -> Matrix:
    n = len(M)
    aug = [list(map(frac, row)) + list(e) for row, e in zip(M, identity(n))]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(row[n:]) for row in R)


def solve_left(A: Sequence[Sequence], B: Sequence[Sequence], ncols: int) -> Matrix | None:
    """Solve ``X A = B`` where ``A`` is ``k x n`` and ``B`` is ``r x n``.

    Returns the ``r x k`` solution when ``A`` has independent rows and the
    system is consistent, else ``None``.
    """
    # X A = B  <=>  A^T X^T = B^T
    At = transpose(A, ncols)
    Bt = transpose(B, ncols)
    k = len(A)
    aug = [list(a) + list(b) for a, b in zip(At, Bt)]
    R, piv = rref(aug, k + len(B))
    if any(p >= k for p in piv) or len(piv) < k:
        return None
    Xt = [R[i][k:] for i in range(k)]
    return transpose(Xt, len(B))


def is_positive_definite(M: Sequence[Sequence]) -> bool:
    """Sylvester-free test via exact symmetric Gaussian elimination (LDL^T)."""
    A = [[frac(v) for v in row] for row in M]
    n = len(A)
    for k in range(n):
        if A[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            f = A[i][k] / A[k][k]
            for j in range(k, n):
                A[i][j] -= f * A[k][j]
    return True


# ---------------------------------------------------------------- integers


def smith_normal_form(M: Sequence[Sequence[int]], nrows: int | None = None,
                      ncols: int | None = None) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form ``U M V = S``.

    Args:
        M: integer matrix.
        nrows, ncols: shape, needed only for degenerate (empty) inputs.

    Returns:
        ``(U, S, V)`` with ``U`` and ``V`` unimodular and ``S`` diagonal,
        nonnegative, each invariant factor dividing the next.
    """
    A = [[int(v) for v in row] for row in M]
    n = len(A) if nrows is None else nrows
    m = (len(A[0]) if A else 0) if ncols is None else ncols
    if not A:
        A = [[0] * m for _ in range(n)]
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        A[dst] = [a - q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in A:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    for t in range(min(n, m)):
        while True:
            cands = [(abs(A[i][j]), i, j) for i in range(t, n) for j in range(t, m) if A[i][j]]
            if not cands:
                break
            _, i, j = min(cands)
            swap_rows(t, i)
            swap_cols(t, j)
            clean = True
            for i in range(t + 1, n):
                if A[i][t]:
                    add_row(i, t, A[i][t] // A[t][t])
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, m):
                if A[t][j]:
                    add_col(j, t, A[t][j] // A[t][t])
                    clean = clean and A[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, n) for j in range(t + 1, m)
                        if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            add_row(t, bad, -1)
        if t < n and t < m and A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return int_matrix(U), int_matrix(A), int_matrix(V)


def int_inverse(M: Sequence[Sequence[int]]) -> Matrix:
    """Inverse of a unimodular integer matrix."""
    inv = inverse(M)
    if any(v.denominator != 1 for row in inv for v in row):
        raise ValueError("matrix is not unimodular")
    return tuple(tuple(int(v) for v in row) for row in inv)


def hermite_normal_form(rows: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Row-style HNF of the lattice spanned by ``rows`` (zero rows dropped)."""
    A = [[int(v) for v in row] for row in rows]
    r0 = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(r0, len(A)) if A[i][c]]
            if len(nz) <= 1:
                break
            p = min(nz, key=lambda i: abs(A[i][c]))
            for i in nz:
                if i != p:
                    q = A[i][c] // A[p][c]
                    A[i] = [a - q * b for a, b in zip(A[i], A[p])]
        nz = [i for i in range(r0, len(A)) if A[i][c]]
        if not nz:
            continue
        p = nz[0]
        A[r0], A[p] = A[p], A[r0]
        if A[r0][c] < 0:
            A[r0] = [-a for a in A[r0]]
        for i in range(r0):
            q = A[i][c] // A[r0][c]
            if q:
                A[i] = [a - q * b for a, b in zip(A[i], A[r0])]
        r0 += 1
    return int_matrix(A[:r0])


def saturate(rows: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """HNF basis of ``span_Q(rows) ∩ Z^ncols``."""
    rows = [r for r in rows if any(r)]
    if not rows:
        return ()
    U, S, V = smith_normal_form(rows, len(rows), ncols)
    r = sum(1 for i in range(min(len(rows), ncols)) if S[i][i])
    Vinv = int_inverse(V)
    return hermite_normal_form(Vinv[:r], ncols)


@dataclass(frozen=True)
class Lattice:
    """A sublattice of ``Z^ambient_dim`` stored by its row HNF."""

    ambient_dim: int
    basis: Matrix
    saturated: bool

    @classmethod
    def from_basis(cls, vectors: Sequence[Sequence[int]], ambient_dim: int) -> "Lattice":
        H = hermite_normal_form(vectors, ambient_dim)
        if not H:
            return cls(ambient_dim, (), True)
        _, S, _ = smith_normal_form(H, len(H), ambient_dim)
        sat = all(S[i][i] == 1 for i in range(len(H)))
        return cls(ambient_dim, H, sat)

    @property
    def rank(self) -> int:
        return len(self.basis)


def integer_kernel(M: Sequence[Sequence[int]], nrows: int | None = None,
                   ncols: int | None = None) -> Lattice:
    """Saturated lattice ``{d in Z^n : d^T M = 0}`` for an ``n x m`` matrix."""
    n = len(M) if nrows is None else nrows
    m = (len(M[0]) if M else 0) if ncols is None else ncols
    if n == 0:
        return Lattice(0, (), True)
    if m == 0:
        return Lattice(n, identity(n, 1), True)
    Mt = transpose(M, m)
    _, S, V = smith_normal_form(Mt, m, n)
    r = sum(1 for i in range(min(m, n)) if S[i][i])
    cols = [tuple(V[i][j] for i in range(n)) for j in range(r, n)]
    return Lattice(n, hermite_normal_form(cols, n), True)


def in_subtorus(delta: Sequence, D: Lattice) -> bool:
    """Whether the point ``delta`` of ``R^n/Z^n`` lies in the annihilator of ``D``.

    ``D`` must be saturated: only then is its annihilator connected and equal
    to the image subtorus that produced it.
    """
    if not D.saturated:
        raise NotSaturated("lattice is not saturated")
    if len(delta) != D.ambient_dim:
        raise ValueError("dimension mismatch")
    delta = [frac(x) for x in delta]
    return all(dot(d, delta).denominator == 1 for d in D.basis)


# ------------------------------------------------------- congruence systems


def _mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class CongruenceSolutions:
    """Solution set of ``M x ≡ b (mod 1)`` for ``x`` in ``R^m / Z^m``.

    The set is a finite union of translates of a subtorus: ``x = p + V_free y``
    with ``p`` from :meth:`points` and ``y`` arbitrary.
    """

    feasible: bool
    V: Matrix
    rank: int
    targets: tuple  # (Ub)_i / s_i style data: list of (residue, s)
    m: int

    @property
    def free_directions(self) -> list[Vector]:
        return [tuple(self.V[i][j] for i in range(self.m)) for j in range(self.rank, self.m)]

    def count(self) -> int:
        if not self.feasible:
            return 0
        c = 1
        for _, s in self.targets:
            c *= s
        return c

    def points(self) -> Iterator[Vector]:
        """Particular solutions, one per discrete component (free part zero)."""
        if not self.feasible:
            return
        ranges = [range(s) for _, s in self.targets]
        for ks in product(*ranges):
            y = [(res + k) / s for (res, s), k in zip(self.targets, ks)]
            y += [Fraction(0)] * (self.m - self.rank)
            x = tuple(_mod1(sum(self.V[i][j] * y[j] for j in range(self.m))) for i in range(self.m))
            yield x


def solve_congruences(M: Sequence[Sequence[int]], b: Sequence, m: int) -> CongruenceSolutions:
    """Solve the integer congruence system ``M x ≡ b (mod 1)`` via SNF."""
    k = len(M)
    if k == 0:
        return CongruenceSolutions(True, identity(m, 1), 0, (), m)
    U, S, V = smith_normal_form(M, k, m)
    Ub = [sum(U[i][j] * frac(b[j]) for j in range(k)) for i in range(k)]
    r = sum(1 for i in range(min(k, m)) if S[i][i])
    if any(_mod1(Ub[i]) != 0 for i in range(r, k)):
        return CongruenceSolutions(False, V, r, (), m)
    targets = tuple((Ub[i], S[i][i]) for i in range(r))
    return CongruenceSolutions(True, V, r, targets, m)
