"""Subspaces of PG(n, q) in reduced row echelon form.

A :class:`Subspace` is identified by its RREF basis, so equality, hashing
and set membership are plain tuple comparisons.  Vectors are tuples of
field-element indices of length n+1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gfq import FieldSpec, field_make

Row = tuple[int, ...]


class GeometryError(ValueError):
    pass


def get_field(q: int) -> FieldSpec:
    return field_make(q, max_q=None)


# -- row reduction -----------------------------------------------------------

def rref_rows(rows, F: FieldSpec) -> list[Row]:
    """Reduced row echelon form of the row span, zero rows dropped."""
    m = [list(r) for r in rows]
    if not m:
        return []
    add, mul, inv, neg = F.add_table, F.mul_table, F.inv_table, F.neg_table
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        iv = inv[m[r][c]]
        if iv != 1:
            mi = mul[iv]
            m[r] = [mi[x] for x in m[r]]
        mr = m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                mf = mul[neg[m[i][c]]]
                m[i] = [add[a][mf[b]] for a, b in zip(m[i], mr)]
        r += 1
        if r == len(m):
            break
    return [tuple(row) for row in m[:r]]


def null_space(rows, F: FieldSpec, length: int) -> list[Row]:
    """Basis of {x : row . x = 0 for every row} (standard dot product)."""
    red = rref_rows(rows, F)
    pivots = [next(j for j, x in enumerate(r) if x) for r in red]
    free = [j for j in range(length) if j not in pivots]
    out = []
    for f in free:
        v = [0] * length
        v[f] = 1
        for r, p in zip(red, pivots):
            v[p] = F.neg_table[r[f]]
        out.append(tuple(v))
    return out


def mat_vec(rows, v, F: FieldSpec) -> list[int]:
    add, mul = F.add_table, F.mul_table
    out = []
    for r in rows:
        acc = 0
        for a, b in zip(r, v):
            if a and b:
                acc = add[acc][mul[a][b]]
        out.append(acc)
    return out


def combine(coeffs, rows, F: FieldSpec) -> Row:
    """Linear combination sum(c_i * rows[i])."""
    add, mul = F.add_table, F.mul_table
    acc = [0] * len(rows[0])
    for c, r in zip(coeffs, rows):
        if c:
            mc = mul[c]
            acc = [add[a][mc[b]] for a, b in zip(acc, r)]
    return tuple(acc)


def mat_mul(a, b, F: FieldSpec) -> list[Row]:
    return [combine(row, b, F) for row in a]


def mat_inverse(rows, F: FieldSpec) -> list[Row]:
    size = len(rows)
    aug = [tuple(r) + tuple(int(i == j) for j in range(size)) for i, r in enumerate(rows)]
    red = rref_rows(aug, F)
    if len(red) < size or any(red[i][i] != 1 for i in range(size)):
        raise GeometryError("matrix is singular")
    return [r[size:] for r in red]


# -- subspaces ---------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Subspace:
    """A projective subspace of PG(n, q) stored by its RREF basis."""

    q: int
    n: int
    rows: tuple[Row, ...]

    @property
    def dim(self) -> int:
        return len(self.rows) - 1

    @property
    def field(self) -> FieldSpec:
        return get_field(self.q)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(r) if x) for r in self.rows)

    def __repr__(self):
        return f"Subspace(q={self.q}, n={self.n}, dim={self.dim}, rows={self.rows})"

    def points(self):
        """Iterate the points of this subspace as Subspaces."""
        if self.dim < 0:
            return
        F = self.field
        for c in rref_coefficients(self.dim, self.q, 0):
            yield Subspace(self.q, self.n, (combine(c[0], self.rows, F),))

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


def canonicalize(vectors, q: int, n: int) -> Subspace:
    vectors = [tuple(v) for v in vectors]
    for v in vectors:
        if len(v) != n + 1:
            raise GeometryError(f"vector {v} has length {len(v)}, expected {n + 1}")
        if any(not 0 <= x < q for x in v):
            raise GeometryError(f"vector {v} has entries outside F_{q}")
    return Subspace(q, n, tuple(rref_rows(vectors, get_field(q))))


def empty(n: int, q: int) -> Subspace:
    return Subspace(q, n, ())


def whole(n: int, q: int) -> Subspace:
    return standard_subspace(n, q, range(n + 1))


def standard_subspace(n: int, q: int, indices) -> Subspace:
    """Span of the standard basis vectors at ``indices``."""
    rows = []
    for i in sorted(indices):
        v = [0] * (n + 1)
        v[i] = 1
        rows.append(tuple(v))
    return Subspace(q, n, tuple(rows))


def _check_same(A: Subspace, B: Subspace):
    if A.q != B.q or A.n != B.n:
        raise GeometryError(f"ambient mismatch: PG({A.n},{A.q}) vs PG({B.n},{B.q})")


def span(A: Subspace, B: Subspace) -> Subspace:
    _check_same(A, B)
    return Subspace(A.q, A.n, tuple(rref_rows(A.rows + B.rows, A.field)))


def meet(A: Subspace, B: Subspace) -> Subspace:
    _check_same(A, B)
    if A.dim < 0 or B.dim < 0:
        return empty(A.n, A.q)
    F, length = A.field, A.n + 1
    ann = null_space(A.rows, F, length) + null_space(B.rows, F, length)
    return Subspace(A.q, A.n, tuple(rref_rows(null_space(ann, F, length), F)))


def contains(A: Subspace, B: Subspace) -> bool:
    """True when B is a subspace of A."""
    _check_same(A, B)
    if B.dim > A.dim:
        return False
    return len(rref_rows(A.rows + B.rows, A.field)) == len(A.rows)


def is_point_in(A: Subspace, v) -> bool:
    return len(rref_rows(A.rows + (tuple(v),), A.field)) == len(A.rows)


# -- counting and enumeration ------------------------------------------------

def gaussian_binomial(m: int, d: int, q: int) -> int:
    """Number of d-dimensional subspaces of an m-dimensional vector space
    over F_q."""
    if m < 0 or d < 0:
        raise ValueError("m and d must be non-negative")
    if d > m:
        return 0
    num = den = 1
    for i in range(d):
        num *= q ** (m - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _free_positions(pivots, n):
    pset = set(pivots)
    return [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, n + 1) if j not in pset]


def pivot_sets(n: int, d: int):
    return itertools.combinations(range(n + 1), d + 1)


def rref_batches_for_pivots(n: int, q: int, pivots, chunk: int = 1 << 14):
    """RREF matrices with the given pivot columns, free entries in
    lexicographic order, as numpy arrays of shape (b, d+1, n+1)."""
    d = len(pivots) - 1
    free = _free_positions(pivots, n)
    base = np.zeros((d + 1, n + 1), dtype=np.int64)
    for i, p in enumerate(pivots):
        base[i, p] = 1
    total = q ** len(free)
    rows_idx = np.array([i for i, _ in free], dtype=np.int64)
    cols_idx = np.array([j for _, j in free], dtype=np.int64)
    weights = q ** np.arange(len(free) - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        out = np.broadcast_to(base, (len(codes), d + 1, n + 1)).copy()
        if free:
            out[:, rows_idx, cols_idx] = (codes[:, None] // weights[None, :]) % q
        yield out


def rref_batches(n: int, q: int, d: int, chunk: int = 1 << 14):
    """Yield numpy arrays of shape (b, d+1, n+1) holding every RREF matrix
    of a d-subspace of PG(n, q), in lexicographic order of (pivot set,
    free entries)."""
    if d < 0:
        yield np.zeros((1, 0, n + 1), dtype=np.int64)
        return
    for pivots in pivot_sets(n, d):
        yield from rref_batches_for_pivots(n, q, pivots, chunk)


@lru_cache(maxsize=None)
def rref_coefficients(n: int, q: int, d: int) -> tuple[tuple[Row, ...], ...]:
    """All RREF matrices of d-subspaces of PG(n, q) as nested tuples."""
    out = []
    for batch in rref_batches(n, q, d):
        out.extend(tuple(tuple(r) for r in m) for m in batch.tolist())
    return tuple(out)


def grassmann_enumerate(n: int, q: int, d: int):
    """Stream every d-subspace of PG(n, q) exactly once."""
    if not -1 <= d <= n:
        raise GeometryError(f"d={d} outside [-1, {n}]")
    for batch in rref_batches(n, q, d):
        for m in batch.tolist():
            yield Subspace(q, n, tuple(tuple(r) for r in m))


def subspaces_of(Y: Subspace, d: int):
    """Every d-subspace of Y, expressed in the ambient space of Y."""
    F = Y.field
    if d < 0:
        yield empty(Y.n, Y.q)
        return
    for c in rref_coefficients(Y.dim, Y.q, d):
        # RREF coefficients times an RREF basis is again in RREF
        yield Subspace(Y.q, Y.n, tuple(combine(r, Y.rows, F) for r in c))


# -- frames ------------------------------------------------------------------

class SubspaceFrame:
    """Coordinates on K itself: K is identified with PG(k, q) through its
    RREF basis, coordinates being the entries at K's pivot columns."""

    def __init__(self, K: Subspace):
        self.K = K
        self._piv = K.pivots

    def to_inner(self, Y: Subspace) -> Subspace:
        if not contains(self.K, Y):
            raise GeometryError("subspace is not contained in the frame")
        return Subspace(self.K.q, self.K.dim, tuple(tuple(r[p] for p in self._piv) for r in Y.rows))

    def from_inner(self, Z: Subspace) -> Subspace:
        if Z.n != self.K.dim or Z.q != self.K.q:
            raise GeometryError("inner subspace lives in the wrong space")
        F = self.K.field
        return Subspace(self.K.q, self.K.n, tuple(combine(r, self.K.rows, F) for r in Z.rows))


class QuotientFrame:
    """Identification of X/K with PG(n-k-1, q).

    The complement N is spanned by the standard basis vectors at the
    non-pivot columns of K.  A subspace Z containing K is lowered to the
    span of its rows reduced modulo K, read at those columns.
    """

    def __init__(self, K: Subspace):
        self.K = K
        piv = set(K.pivots)
        self.free = [j for j in range(K.n + 1) if j not in piv]
        self.N = standard_subspace(K.n, K.q, self.free)
        self.quotient_dim = K.n - K.dim - 1

    def reduce(self, v) -> Row:
        """Reduce a vector modulo K so it is zero at K's pivot columns."""
        F = self.K.field
        v = list(v)
        for r, p in zip(self.K.rows, self.K.pivots):
            c = v[p]
            if c:
                mc = F.mul_table[F.neg_table[c]]
                v = [F.add_table[a][mc[b]] for a, b in zip(v, r)]
        return tuple(v)

    def lower(self, Z: Subspace) -> Subspace:
        if not contains(Z, self.K):
            raise GeometryError("subspace does not contain K")
        vecs = [tuple(self.reduce(r)[j] for j in self.free) for r in Z.rows]
        return canonicalize(vecs, self.K.q, self.quotient_dim)

    def lift(self, Y: Subspace) -> Subspace:
        if Y.n != self.quotient_dim or Y.q != self.K.q:
            raise GeometryError("quotient subspace lives in the wrong space")
        vecs = []
        for r in Y.rows:
            v = [0] * (self.K.n + 1)
            for j, x in zip(self.free, r):
                v[j] = x
            vecs.append(tuple(v))
        return canonicalize(list(self.K.rows) + vecs, self.K.q, self.K.n)

    def lift_point_vector(self, coords) -> Row:
        v = [0] * (self.K.n + 1)
        for j, x in zip(self.free, coords):
            v[j] = x
        return tuple(v)


def quotient_frame(K: Subspace) -> QuotientFrame:
    return QuotientFrame(K)


# -- the four structural maps -------------------------------------------------

def map_pi(K: Subspace, Y: Subspace) -> Subspace:
    """Y -> <K, Y>, the projection to X/K (represented inside X)."""
    return span(K, Y)


def map_rho(K: Subspace, Y: Subspace) -> Subspace:
    """Y -> K meet Y."""
    return meet(K, Y)


def map_iota(K: Subspace, Y: Subspace) -> Subspace:
    if not contains(K, Y):
        raise GeometryError("iota expects a subspace of K")
    return Y


def map_theta(K: Subspace, Z: Subspace) -> Subspace:
    if not contains(Z, K):
        raise GeometryError("theta expects a subspace containing K")
    return Z


def quotient_dim(K: Subspace, Z: Subspace) -> int:
    """Dimension of Z (containing K) as an element of X/K."""
    return Z.dim - K.dim - 1


def pullback_delta(K: Subspace, N: Subspace, T1: Subspace, T2: Subspace) -> Subspace:
    """<T1, T2 meet N>: the subspace with rho_K = T1 and pi_K = T2."""
    if span(K, N).dim != K.n or meet(K, N).dim != -1:
        raise GeometryError("K and N are not complements")
    if not contains(K, T1):
        raise GeometryError("T1 must lie in K")
    if not contains(T2, K):
        raise GeometryError("T2 must contain K")
    return span(T1, meet(T2, N))
