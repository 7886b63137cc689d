import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from qblock.pgspace import (
    GeometryError,
    QuotientFrame,
    Subspace,
    SubspaceFrame,
    canonicalize,
    contains,
    empty,
    gaussian_binomial,
    grassmann_enumerate,
    map_pi,
    map_rho,
    meet,
    pullback_delta,
    quotient_dim,
    span,
    standard_subspace,
    subspaces_of,
    whole,
)


# oracle for prime q: a subspace as the full set of its vectors

def closure(vectors, q, length):
    out = {(0,) * length}
    for v in vectors:
        out = {tuple((a + c * b) % q for a, b in zip(w, v)) for w in out for c in range(q)}
    return frozenset(out)


def vecset(Y: Subspace):
    return closure(Y.rows, Y.q, Y.n + 1)


def brute_force_counts(n, q):
    """Number of vector subspaces of F_q^{n+1} of each dimension, by growing spans."""
    length = n + 1
    vectors = set(itertools.product(range(q), repeat=length))
    layers = [{frozenset({(0,) * length})}]
    for _ in range(length):
        nxt = set()
        for U in layers[-1]:
            rest = vectors - U
            while rest:
                v = rest.pop()
                W = frozenset(tuple((a + c * b) % q for a, b in zip(u, v))
                              for u in U for c in range(q))
                nxt.add(W)
                rest -= W
        layers.append(nxt)
    return [len(layer) for layer in layers]


def random_subspace(rng, n, q, d):
    while True:
        Y = canonicalize([tuple(rng.randrange(q) for _ in range(n + 1)) for _ in range(d + 1)], q, n)
        if Y.dim == d:
            return Y


@pytest.mark.parametrize("n,q", [(n, q) for n in range(0, 5) for q in (2, 3)])
def test_gaussian_binomial_matches_brute_force(n, q):
    counts = brute_force_counts(n, q)
    for d in range(-1, n + 1):
        assert gaussian_binomial(n + 1, d + 1, q) == counts[d + 1]
        assert sum(1 for _ in grassmann_enumerate(n, q, d)) == counts[d + 1]


def test_gaussian_binomial_values():
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(6, 3, 2) == 1395
    assert gaussian_binomial(6, 4, 2) == 651
    assert gaussian_binomial(3, 5, 2) == 0
    assert gaussian_binomial(3, 0, 7) == 1


@pytest.mark.parametrize("n,q,d", [(3, 2, 1), (3, 4, 1), (4, 3, 2), (2, 9, 0)])
def test_enumeration_is_canonical_and_distinct(n, q, d):
    seen = list(grassmann_enumerate(n, q, d))
    assert len(seen) == len(set(seen)) == gaussian_binomial(n + 1, d + 1, q)
    for Y in seen[:: max(1, len(seen) // 50)]:
        assert canonicalize(Y.rows, q, n) == Y
        assert Y.dim == d


def test_canonical_form_independent_of_spanning_set():
    rng = random.Random(1)
    for q in (2, 3, 4, 5):
        for _ in range(50):
            Y = random_subspace(rng, 4, q, rng.randrange(0, 4))
            F = Y.field
            # random invertible recombination of the rows plus a redundant row
            mix = []
            for _ in range(Y.dim + 2):
                coeffs = [rng.randrange(q) for _ in Y.rows]
                v = [0] * 5
                for c, r in zip(coeffs, Y.rows):
                    v = [F.add(a, F.mul(c, b)) for a, b in zip(v, r)]
                mix.append(tuple(v))
            Z = canonicalize(list(Y.rows) + mix, q, 4)
            assert Z == Y
            assert canonicalize(list(reversed(Y.rows)) + mix, q, 4) == Y


@pytest.mark.parametrize("q", [2, 3])
def test_span_meet_contains_against_vector_sets(q):
    rng = random.Random(q)
    n = 4
    for _ in range(150):
        A = random_subspace(rng, n, q, rng.randrange(-1, n + 1))
        B = random_subspace(rng, n, q, rng.randrange(-1, n + 1))
        va, vb = vecset(A), vecset(B)
        assert vecset(meet(A, B)) == va & vb
        assert vecset(span(A, B)) == closure(list(A.rows) + list(B.rows), q, n + 1)
        assert contains(A, B) == (vb <= va)
        assert span(A, B).dim + meet(A, B).dim == A.dim + B.dim


@given(st.sampled_from([2, 3, 4, 5, 7, 8, 9]), st.integers(0, 2 ** 32))
@settings(max_examples=100, deadline=None)
def test_dimension_formula(q, seed):
    rng = random.Random(seed)
    n = 5
    A = random_subspace(rng, n, q, rng.randrange(-1, n + 1))
    B = random_subspace(rng, n, q, rng.randrange(-1, n + 1))
    assert span(A, B).dim + meet(A, B).dim == A.dim + B.dim
    assert contains(span(A, B), A) and contains(A, meet(A, B))


def test_points_of_a_subspace():
    for q in (2, 3, 4):
        Y = standard_subspace(4, q, (0, 2, 3))
        pts = list(Y.points())
        assert len(pts) == q * q + q + 1
        assert all(contains(Y, P) for P in pts)


def test_invalid_input_rejected():
    with pytest.raises(GeometryError):
        canonicalize([(1, 0)], 2, 3)
    with pytest.raises(GeometryError):
        canonicalize([(0, 2, 0)], 2, 2)
    with pytest.raises(GeometryError):
        span(whole(2, 2), whole(3, 2))


def test_empty_and_whole():
    assert empty(3, 2).dim == -1
    assert whole(3, 5).dim == 3
    assert list(empty(3, 2).points()) == []


def test_subspace_frame_round_trip():
    rng = random.Random(7)
    for q in (2, 3, 4):
        K = random_subspace(rng, 5, q, 3)
        frame = SubspaceFrame(K)
        for Z in grassmann_enumerate(3, q, 1):
            Y = frame.from_inner(Z)
            assert contains(K, Y) and Y.dim == 1
            assert frame.to_inner(Y) == Z
        outside = next(P for P in grassmann_enumerate(5, q, 0) if not contains(K, P))
        with pytest.raises(GeometryError):
            frame.to_inner(outside)


def test_quotient_frame_is_a_lattice_bijection():
    rng = random.Random(11)
    for q in (2, 3):
        K = random_subspace(rng, 4, q, 1)
        frame = QuotientFrame(K)
        assert frame.quotient_dim == 2
        assert meet(K, frame.N).dim == -1 and span(K, frame.N) == whole(4, q)
        tops = [Z for Z in grassmann_enumerate(4, q, 2) if contains(Z, K)]
        assert len(tops) == gaussian_binomial(3, 1, q)
        lowered = {frame.lower(Z) for Z in tops}
        assert lowered == set(grassmann_enumerate(2, q, 0))
        for Z in tops:
            assert frame.lift(frame.lower(Z)) == Z
            assert quotient_dim(K, Z) == 0


@pytest.mark.parametrize("n,q", [(5, 2), (4, 3)])
def test_pullback_round_trip(n, q):
    rng = random.Random(n * 100 + q)
    for _ in range(1000):
        k = rng.randrange(-1, n)
        K = random_subspace(rng, n, q, k)
        frame = QuotientFrame(K)
        T1 = SubspaceFrame(K).from_inner(random_subspace(rng, k, q, rng.randrange(-1, k + 1)))
        m = n - k - 1
        T2 = frame.lift(random_subspace(rng, m, q, rng.randrange(-1, m + 1)))
        T = pullback_delta(K, frame.N, T1, T2)
        assert map_rho(K, T) == T1
        assert map_pi(K, T) == T2


def test_pullback_preconditions():
    K = standard_subspace(3, 2, (0,))
    N = standard_subspace(3, 2, (0, 1))
    with pytest.raises(GeometryError):
        pullback_delta(K, N, K, whole(3, 2))
    N = standard_subspace(3, 2, (1, 2, 3))
    with pytest.raises(GeometryError):
        pullback_delta(K, N, standard_subspace(3, 2, (1,)), whole(3, 2))
    with pytest.raises(GeometryError):
        pullback_delta(K, N, K, standard_subspace(3, 2, (1,)))


def test_subspaces_of_counts():
    Y = standard_subspace(5, 3, (1, 2, 4))
    lines = list(subspaces_of(Y, 1))
    assert len(lines) == gaussian_binomial(3, 2, 3)
    assert all(contains(Y, L) for L in lines)
