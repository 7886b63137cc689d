"""Symmetric non-degenerate bilinear forms and the polarities they induce."""

from __future__ import annotations

import numpy as np

from .pgspace import (
    GeometryError,
    Subspace,
    canonicalize,
    get_field,
    mat_inverse,
    mat_mul,
    null_space,
    rref_batches,
    rref_rows,
)


class BilinearForm:
    """beta(u, v) = u G v^T for a symmetric invertible Gram matrix G."""

    def __init__(self, gram, q: int):
        self.q = q
        self.gram = tuple(tuple(r) for r in gram)
        self.size = len(self.gram)
        self.n = self.size - 1
        F = get_field(q)
        if any(len(r) != self.size for r in self.gram):
            raise GeometryError("Gram matrix must be square")
        if any(self.gram[i][j] != self.gram[j][i]
               for i in range(self.size) for j in range(i)):
            raise GeometryError("Gram matrix is not symmetric")
        if len(rref_rows(self.gram, F)) != self.size:
            raise GeometryError("bilinear form is degenerate")

    @classmethod
    def standard(cls, n: int, q: int) -> "BilinearForm":
        return cls([[int(i == j) for j in range(n + 1)] for i in range(n + 1)], q)

    def __call__(self, u, v) -> int:
        F = get_field(self.q)
        add, mul = F.add_table, F.mul_table
        acc = 0
        for i, a in enumerate(u):
            if a:
                row = self.gram[i]
                for j, b in enumerate(v):
                    if b and row[j]:
                        acc = add[acc][mul[mul[a][row[j]]][b]]
        return acc


def _extend_basis(rows, n: int, q: int) -> list[tuple[int, ...]]:
    """Extension vectors: standard basis vectors, greedily in index order."""
    F = get_field(q)
    current = list(rows)
    ext = []
    for i in range(n + 1):
        e = tuple(int(j == i) for j in range(n + 1))
        if len(rref_rows(current + [e], F)) > len(current):
            current.append(e)
            ext.append(e)
    return ext


def form_absolute_for(K: Subspace) -> BilinearForm:
    """A form vanishing on K x K, so that K lies in its own polar.

    Basis B = K's rows followed by the extension vectors.  The involution
    pairs the i-th row of K with the i-th extension vector, then pairs the
    remaining extension vectors consecutively (the last one is fixed when
    their count is odd).  The Gram matrix in basis B is the permutation
    matrix of the involution.
    """
    n, q, k = K.n, K.q, K.dim
    if 2 * k > n - 1:
        raise GeometryError(f"need dim K <= (n-1)/2, got k={k}, n={n}")
    F = get_field(q)
    ext = _extend_basis(K.rows, n, q)
    basis = list(K.rows) + ext
    u = len(K.rows)
    phi = list(range(n + 1))
    for i in range(u):
        phi[i], phi[u + i] = u + i, i
    rest = list(range(2 * u, n + 1))
    for a, b in zip(rest[::2], rest[1::2]):
        phi[a], phi[b] = b, a
    gram_b = [[int(phi[i] == j) for j in range(n + 1)] for i in range(n + 1)]
    # beta(v, w) = c_v G_B c_w^T with c_v = v M^{-1}; so G = M^{-1} G_B M^{-T}
    minv = mat_inverse(basis, F)
    minv_t = [tuple(minv[j][i] for j in range(n + 1)) for i in range(n + 1)]
    gram = mat_mul(mat_mul(minv, gram_b, F), minv_t, F)
    return BilinearForm(gram, q)


def perp(form: BilinearForm, Y: Subspace) -> Subspace:
    """The polar subspace {w : beta(y, w) = 0 for all y in Y}."""
    if Y.n != form.n or Y.q != form.q:
        raise GeometryError("subspace does not live in the form's space")
    F = get_field(form.q)
    if Y.dim < 0:
        return canonicalize(
            [tuple(int(i == j) for j in range(Y.n + 1)) for i in range(Y.n + 1)], Y.q, Y.n)
    yg = mat_mul(Y.rows, form.gram, F)
    return canonicalize(null_space(yg, F, Y.n + 1), Y.q, Y.n)


def _all_points(n: int, q: int) -> np.ndarray:
    return np.concatenate([m[:, 0, :] for m in rref_batches(n, q, 0)])


def balloon_check(form: BilinearForm, L: Subspace) -> bool:
    """Whether the polars of the points of the line L cover every point."""
    if L.dim != 1:
        raise GeometryError("balloon_check expects a line")
    F = get_field(form.q)
    add, mul = np.array(F.add_table), np.array(F.mul_table)
    X = _all_points(form.n, form.q)
    covered = np.zeros(len(X), dtype=bool)
    for P in L.points():
        # beta(x, p) = sum_i x_i * (G p^T)_i
        w = [form(e, P.rows[0]) for e in np.eye(form.size, dtype=int).tolist()]
        acc = np.zeros(len(X), dtype=np.int64)
        for i, wi in enumerate(w):
            acc = add[acc, mul[X[:, i], wi]]
        covered |= acc == 0
    return bool(covered.all())


def hyperplane_assignment(K: Subspace, form: BilinearForm | None = None) -> dict[Subspace, Subspace]:
    """Map each point P of K to the hyperplane perp(P) of an absolute form."""
    if form is None:
        form = form_absolute_for(K)
    if K.dim < 0:
        return {}
    return {P: perp(form, P) for P in K.points()}

