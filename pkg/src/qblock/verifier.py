"""Exhaustive verification of blocking sets.

Subspaces are handled in bulk as numpy arrays of RREF matrices.  If S is the
RREF basis of an s-space and C the RREF coefficient matrix of a t-subspace
of PG(s, q), then C @ S is already the RREF basis of the corresponding
t-subspace of S, so membership needs no row reduction: each matrix is packed
into an integer code and looked up with ``np.isin``.
"""

from __future__ import annotations

import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .constructions import LineSet
from .pgspace import (
    GeometryError,
    Subspace,
    SubspaceFrame,
    contains,
    gaussian_binomial,
    get_field,
    pivot_sets,
    rref_batches,
    rref_batches_for_pivots,
    rref_coefficients,
)

THREADS_ENV = "QBLOCK_THREADS"


@dataclass
class VerifyReport:
    blocked: bool
    s: int
    t: int
    n: int
    q: int
    s_spaces_checked: int
    expected_total: int
    witness: Subspace | None = None
    elapsed: float = 0.0

    def to_json(self) -> dict:
        return {
            "blocked": self.blocked,
            "n": self.n,
            "q": self.q,
            "s": self.s,
            "t": self.t,
            "s_spaces_checked": self.s_spaces_checked,
            "expected_total": self.expected_total,
            "witness": None if self.witness is None else self.witness.to_json(),
            "elapsed_seconds": round(self.elapsed, 6),
        }


@dataclass
class DegreeProfile:
    """Histogram of deg_B(Y) over every y-space Y of PG(n, q).

    For y <= t the degree counts members through Y; for y >= t it counts
    members inside Y.  ``incidence_sum`` is the sum of count * degree and
    ``incidence_expected`` the same incidence count taken over the members.
    """

    layer: int
    histogram: dict[int, int] = field(default_factory=dict)
    incidence_sum: int = 0
    incidence_expected: int = 0

    @property
    def total(self) -> int:
        return sum(self.histogram.values())

    @property
    def min(self) -> int:
        return min(self.histogram)

    @property
    def max(self) -> int:
        return max(self.histogram)

    @property
    def mean(self) -> Fraction:
        return Fraction(self.incidence_sum, self.total)

    @property
    def consistent(self) -> bool:
        return self.incidence_sum == self.incidence_expected

    def to_json(self) -> dict:
        return {
            "layer": self.layer,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "min": self.min,
            "max": self.max,
            "mean": str(self.mean),
            "incidence_sum": self.incidence_sum,
            "incidence_expected": self.incidence_expected,
        }


# -- array kernels ---------------------------------------------------------------------

def _tables(q: int):
    F = get_field(q)
    return np.array(F.add_table, dtype=np.int64), np.array(F.mul_table, dtype=np.int64)


def _products(C: np.ndarray, S: np.ndarray, q: int) -> np.ndarray:
    """out[b, l] = C[l] @ S[b] over F_q; shapes (L, a, m) x (B, m, c) -> (B, L, a, c)."""
    F = get_field(q)
    if F.e == 1:
        return np.einsum("lij,bjc->blic", C, S) % q
    add, mul = _tables(q)
    out = np.zeros((S.shape[0], C.shape[0], C.shape[1], S.shape[2]), dtype=np.int64)
    for j in range(C.shape[2]):
        term = mul[C[None, :, :, j, None], S[:, None, None, j, :]]
        out = add[out, term]
    return out


class _Encoder:
    """Packs RREF matrices with a fixed shape into sortable keys."""

    def __init__(self, n: int, q: int, rows: int):
        self.n, self.q, self.rows = n, q, rows
        self.packed = q ** ((n + 1) * rows) < 2 ** 62
        if self.packed:
            self.col_w = q ** np.arange(n, -1, -1, dtype=np.int64)
            self.row_w = np.array([q ** ((n + 1) * i) for i in range(rows - 1, -1, -1)],
                                  dtype=np.int64)

    def encode(self, mats: np.ndarray) -> np.ndarray:
        """mats has shape (..., rows, n+1); returns keys of shape (...)."""
        if self.packed:
            return (mats * self.col_w).sum(axis=-1) @ self.row_w
        # wide matrices: compare raw bytes instead
        flat = np.ascontiguousarray(mats.astype(np.uint8).reshape(mats.shape[:-2] + (-1,)))
        return flat.view(np.dtype((np.void, flat.shape[-1])))[..., 0]


def _member_keys(B: LineSet, enc: _Encoder) -> np.ndarray:
    if not B.members:
        return enc.encode(np.zeros((0, B.t + 1, B.n + 1), dtype=np.int64))
    mats = np.array([T.rows for T in B.members], dtype=np.int64)
    return np.unique(enc.encode(mats))


def _contained_counts(S: np.ndarray, C: np.ndarray, keys: np.ndarray, enc: _Encoder, q: int):
    prods = _products(C, S, q)
    hits = np.isin(enc.encode(prods), keys)
    return hits.sum(axis=1)


def _scan_pivots(args):
    """Worker: scan the s-spaces with one pivot set.  Returns (checked,
    witness rows or None); checked stops at the witness."""
    n, q, s, t, pivots, keys = args
    C = np.array(rref_coefficients(s, q, t), dtype=np.int64)
    enc = _Encoder(n, q, t + 1)
    checked = 0
    for S in rref_batches_for_pivots(n, q, pivots):
        counts = _contained_counts(S, C, keys, enc, q)
        bad = np.flatnonzero(counts == 0)
        if bad.size:
            i = int(bad[0])
            return checked + i + 1, tuple(tuple(r) for r in S[i].tolist())
        checked += S.shape[0]
    return checked, None


def _workers(requested: int | None) -> int:
    if requested is not None:
        return max(1, requested)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise GeometryError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return 1


def is_blocking(B: LineSet, s: int, workers: int | None = None) -> VerifyReport:
    """Check that every s-space of PG(n, q) contains a member of B.

    Stops at the first uncovered s-space in enumeration order and returns
    it as the witness.  ``workers`` (default: $QBLOCK_THREADS or 1) splits
    the scan by pivot set across processes; the result does not depend on it.
    """
    n, q, t = B.n, B.q, B.t
    if not t <= s <= n:
        raise GeometryError(f"need t <= s <= n, got t={t}, s={s}, n={n}")
    start = time.perf_counter()
    total = gaussian_binomial(n + 1, s + 1, q)
    enc = _Encoder(n, q, t + 1)
    keys = _member_keys(B, enc)
    jobs = [(n, q, s, t, piv, keys) for piv in pivot_sets(n, s)]
    nw = _workers(workers)
    pool = None
    if len(keys) == 0:
        # nothing can be covered: the first s-space is a witness
        jobs = jobs[:1]
    if nw > 1 and len(jobs) > 1:
        pool = ProcessPoolExecutor(max_workers=nw)
        results = pool.map(_scan_pivots, jobs)
    else:
        results = map(_scan_pivots, jobs)
    checked, witness = 0, None
    try:
        for c, w in results:
            checked += c
            if w is not None:
                witness = Subspace(q, n, w)
                break
    finally:
        if pool is not None:
            pool.shutdown(wait=True, cancel_futures=True)
    return VerifyReport(
        blocked=witness is None, s=s, t=t, n=n, q=q,
        s_spaces_checked=checked, expected_total=total,
        witness=witness, elapsed=time.perf_counter() - start,
    )


def degree_profile(B: LineSet, layer) -> DegreeProfile:
    """Degrees over points (``layer="points"`` or 0) or over y-spaces
    (``layer=y``)."""
    n, q, t = B.n, B.q, B.t
    y = 0 if layer == "points" else int(layer)
    if not 0 <= y <= n:
        raise GeometryError(f"layer {layer!r} is not a subspace dimension of PG({n},{q})")
    total = gaussian_binomial(n + 1, y + 1, q)
    size = len(B)
    hist: Counter = Counter()
    if y <= t:
        # count y-subspaces of every member
        expected = size * gaussian_binomial(t + 1, y + 1, q)
        if size:
            enc = _Encoder(n, q, y + 1)
            C = np.array(rref_coefficients(t, q, y), dtype=np.int64)
            mats = np.array([T.rows for T in B.members], dtype=np.int64)
            _, counts = np.unique(enc.encode(_products(C, mats, q)), return_counts=True)
            hist.update(Counter(counts.tolist()))
        zero = total - sum(hist.values())
        if zero:
            hist[0] += zero
    else:
        expected = size * gaussian_binomial(n - t, y - t, q)
        enc = _Encoder(n, q, t + 1)
        keys = _member_keys(B, enc)
        C = np.array(rref_coefficients(y, q, t), dtype=np.int64)
        for S in rref_batches(n, q, y):
            vals, counts = np.unique(_contained_counts(S, C, keys, enc, q), return_counts=True)
            hist.update(dict(zip(vals.tolist(), counts.tolist())))
    incidence = sum(d * c for d, c in hist.items())
    return DegreeProfile(layer=y, histogram=dict(sorted(hist.items())),
                         incidence_sum=incidence, incidence_expected=expected)


def restrict(B: LineSet, K: Subspace) -> LineSet:
    """Members of B inside K, in K's own coordinates (K as PG(dim K, q))."""
    if K.n != B.n or K.q != B.q:
        raise GeometryError("K does not live in the space of B")
    frame = SubspaceFrame(K)
    inside = [frame.to_inner(T) for T in B.members if contains(K, T)]
    return LineSet(K.dim, B.q, B.t, frozenset(inside),
                   f"restrict({B.construction}, {K.to_json()})")
