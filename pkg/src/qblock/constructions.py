"""Constructions of (s,t)-blocking sets in PG(n, q).

Every construction is deterministic: fixed subspaces are spanned by leading
standard basis vectors, and the hyperplane used by the trivial and basic
constructions is x_n = 0.
"""

from __future__ import annotations

import ast
import itertools
import json
import re
from dataclasses import dataclass, field
from functools import lru_cache

from .bounds import k_star
from .gfq import field_embed, field_make
from .pgspace import (
    GeometryError,
    QuotientFrame,
    Subspace,
    SubspaceFrame,
    canonicalize,
    combine,
    contains,
    empty,
    grassmann_enumerate,
    meet,
    rref_rows,
    span,
    standard_subspace,
    subspaces_of,
)
from .polarity import hyperplane_assignment


class ConstructionError(ValueError):
    pass


@dataclass
class LineSet:
    """A set of t-subspaces of PG(n, q) plus the call that built it."""

    n: int
    q: int
    t: int
    members: frozenset = field(default_factory=frozenset)
    construction: str = ""

    def __post_init__(self):
        self.members = frozenset(self.members)
        for T in self.members:
            if T.n != self.n or T.q != self.q or T.dim != self.t:
                raise ConstructionError(f"{T} is not a {self.t}-space of PG({self.n},{self.q})")

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def __contains__(self, T):
        return T in self.members

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "t": self.t,
            "construction": self.construction,
            "members": [T.to_json() for T in sorted(self.members)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LineSet":
        try:
            n, q, t = int(data["n"]), int(data["q"]), int(data["t"])
            raw = data["members"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConstructionError(f"malformed line set: {exc}") from None
        members = []
        for m in raw:
            rows = tuple(tuple(int(x) for x in r) for r in m)
            try:
                T = canonicalize(rows, q, n)
            except GeometryError as exc:
                raise ConstructionError(str(exc)) from None
            if T.rows != rows:
                raise ConstructionError(f"member {m} is not in canonical RREF")
            members.append(T)
        if len(set(members)) != len(members):
            raise ConstructionError("duplicate members")
        return cls(n, q, t, frozenset(members), str(data.get("construction", "")))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":")) + "\n"

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "LineSet":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConstructionError(f"malformed JSON: {exc}") from None
        return cls.from_json(data)


def _pad(Y: Subspace, n: int) -> Subspace:
    """Embed a subspace of PG(m, q) into the first m+1 coordinates of PG(n, q)."""
    pad = (0,) * (n - Y.n)
    return Subspace(Y.q, n, tuple(r + pad for r in Y.rows))


def _call(name: str, **kw) -> str:
    args = ", ".join(f"{k}={v!r}" for k, v in kw.items() if v is not None)
    return f"{name}({args})"


# -- direct constructions ------------------------------------------------------

def spread(n: int, t: int, q: int) -> LineSet:
    """The Desarguesian t-spread of PG(n, q)."""
    if t < 0 or t > n or (n + 1) % (t + 1):
        raise ConstructionError(f"no {t}-spread in PG({n},{q}): need (t+1) | (n+1)")
    m = (n + 1) // (t + 1)
    Fq = field_make(q)
    FQ = field_make(q ** (t + 1), max_q=None)
    emb = field_embed(Fq, FQ)
    members = set()
    for P in grassmann_enumerate(m - 1, FQ.q, 0):
        v = P.rows[0]
        rows = []
        for b in emb.basis:
            rows.append(tuple(c for x in v for c in emb.coords(FQ.mul(b, x))))
        members.add(canonicalize(rows, q, n))
    return LineSet(n, q, t, members, _call("spread", n=n, t=t, q=q))


def bose_burton(n: int, s: int, q: int) -> LineSet:
    """The points of the (n-s)-space spanned by e_0, ..., e_{n-s}."""
    if not 0 <= s <= n:
        raise ConstructionError(f"need 0 <= s <= n, got s={s}, n={n}")
    U = standard_subspace(n, q, range(n - s + 1))
    return LineSet(n, q, 0, set(U.points()), _call("bose_burton", n=n, s=s, q=q))


def beutel_blocking(n: int, s: int, t: int, q: int) -> LineSet:
    """A t-spread of the ((n+1-s)(t+1)-1)-space on the leading coordinates."""
    if t < 1 or not t <= s <= n:
        raise ConstructionError(f"need 1 <= t <= s <= n, got n={n}, s={s}, t={t}")
    if n * t > s * t + s - t:
        raise ConstructionError(f"hypothesis n <= s + s/t - 1 fails for n={n}, s={s}, t={t}")
    D = (n + 1 - s) * (t + 1) - 1
    inner = spread(D, t, q)
    return LineSet(n, q, t, {_pad(T, n) for T in inner.members},
                   _call("beutel_blocking", n=n, s=s, t=t, q=q))


def trivial_21(n: int, q: int) -> LineSet:
    """All lines of the hyperplane x_n = 0."""
    if n < 2:
        raise ConstructionError("trivial_21 needs n >= 2")
    members = {_pad(L, n) for L in grassmann_enumerate(n - 1, q, 1)}
    return LineSet(n, q, 1, members, _call("trivial_21", n=n, q=q))


def grassmannian(n: int, q: int, t: int) -> LineSet:
    return LineSet(n, q, t, set(grassmann_enumerate(n, q, t)), _call("grassmannian", n=n, q=q, t=t))


# -- fibres over the quotient -------------------------------------------------

def _complement_in(K: Subspace, T1: Subspace) -> list[tuple[int, ...]]:
    """Rows of K completing a basis of T1 to one of K."""
    F = K.field
    current = list(T1.rows)
    out = []
    for r in K.rows:
        if len(rref_rows(current + [r], F)) > len(current):
            current.append(r)
            out.append(r)
    return out


def _fibre(K: Subspace, N: Subspace, M: Subspace, T1: Subspace):
    """All T with K meet T = T1 and <K, T> = M.

    T = <T1, w_i + sum_j a_ij c_j> where w_i span M meet N, c_j complete T1
    to a basis of K, and a runs over all matrices.
    """
    F = K.field
    W = meet(M, N).rows
    C = _complement_in(K, T1)
    base = list(T1.rows)
    for a in itertools.product(range(K.q), repeat=len(W) * len(C)):
        rows = list(base)
        for i, w in enumerate(W):
            coeffs = (1,) + a[i * len(C):(i + 1) * len(C)]
            rows.append(combine(coeffs, [w] + C, F))
        yield Subspace(K.q, K.n, tuple(rref_rows(rows, F)))


def fiber_lift(K: Subspace, B_quot, t: int) -> LineSet:
    """All t-spaces T of X with K meet T empty and <K, T> in B_quot.

    ``B_quot`` is a LineSet or iterable of subspaces.  Members living in
    PG(n-k-1, q) are read in the quotient frame of K; members living in X
    must contain K.
    """
    frame = QuotientFrame(K)
    members = list(B_quot.members if isinstance(B_quot, LineSet) else B_quot)
    lifted = []
    for M in members:
        if M.n == frame.quotient_dim and K.dim >= 0:
            if M.dim != t:
                raise ConstructionError(f"quotient member has dimension {M.dim}, expected {t}")
            M = frame.lift(M)
        elif M.n != K.n:
            raise ConstructionError("member lives in neither X nor X/K")
        elif M.dim != t + K.dim + 1 or not contains(M, K):
            raise ConstructionError("member must contain K with quotient dimension t")
        lifted.append(M)
    none = empty(K.n, K.q)
    out = set()
    for M in lifted:
        out.update(_fibre(K, frame.N, M, none))
    return LineSet(K.n, K.q, t, out, f"fiber_lift(k={K.dim})")


def _lines_meeting(H: Subspace, K: Subspace):
    for L in subspaces_of(H, 1):
        if span(K, L).dim <= K.dim + 1:
            yield L


def basic_21(n: int, q: int, k: int, inner: LineSet) -> LineSet:
    """Lift a (2,1)-blocking set of X/K and add the lines of x_n = 0 meeting K."""
    if not -1 <= k <= n - 3:
        raise ConstructionError(f"need -1 <= k <= n-3, got k={k}, n={n}")
    if inner.n != n - k - 1 or inner.q != q or inner.t != 1:
        raise ConstructionError(
            f"inner set must be lines of PG({n - k - 1},{q}), got t={inner.t} in PG({inner.n},{inner.q})")
    K = standard_subspace(n, q, range(k + 1))
    H = standard_subspace(n, q, range(n))
    part = set(fiber_lift(K, inner, 1).members)
    part.update(_lines_meeting(H, K))
    return LineSet(n, q, 1, part, _call("basic_21", n=n, q=q, k=k) + f"[{inner.construction}]")


# -- improved (2,1) recursion ----------------------------------------------------

def _schedule_key(schedule) -> tuple:
    if not schedule:
        return ()
    return tuple(sorted((int(a), int(b)) for a, b in dict(schedule).items()))


def improved_k(n: int, schedule=None) -> int:
    return dict(schedule or {}).get(n, k_star(n))


@lru_cache(maxsize=None)
def _improved_parts(n: int, q: int, sched: tuple):
    """(B(-1), B(0), B(2)) as frozensets; only B(-1) is used below n = 4."""
    if n < 2:
        return frozenset(), frozenset(), frozenset()
    if n == 2:
        return frozenset({standard_subspace(2, q, (0, 1))}), frozenset(), frozenset()
    if n == 3:
        return frozenset(spread(3, 1, q).members), frozenset(), frozenset()
    k = improved_k(n, dict(sched))
    if k < 0 or 2 * k > n - 1 or k > n - 3:
        raise ConstructionError(f"k={k} is not admissible for n={n}")
    K = standard_subspace(n, q, range(k + 1))
    frame = QuotientFrame(K)

    quot = _improved_members(n - k - 1, q, sched)
    b_minus = fiber_lift(K, [frame.lift(L) for L in quot], 1).members

    b_zero = set()
    for P, H in hyperplane_assignment(K).items():
        pf = QuotientFrame(P)
        Hq, Kq = pf.lower(H), pf.lower(K)
        for Q in subspaces_of(Hq, 0):
            if not contains(Kq, Q):
                b_zero.add(pf.lift(Q))

    inner = SubspaceFrame(K)
    b_two = frozenset(inner.from_inner(L) for L in _improved_members(k, q, sched))
    return frozenset(b_minus), frozenset(b_zero), b_two


def _improved_members(n: int, q: int, sched: tuple) -> frozenset:
    a, b, c = _improved_parts(n, q, sched)
    return a | b | c


def improved_21_parts(n: int, q: int, schedule=None):
    """The three disjoint parts B(-1), B(0), B(2) of the improved construction."""
    return _improved_parts(n, q, _schedule_key(schedule))


def improved_21(n: int, q: int, schedule=None) -> LineSet:
    """Lines of PG(n, q) blocking every plane, built recursively with
    step k*(n) (or ``schedule[n]`` when given)."""
    if n < -1:
        raise ConstructionError("n must be >= -1")
    sched = _schedule_key(schedule)
    members = _improved_members(n, q, sched)
    return LineSet(n, q, 1, members,
                   _call("improved_21", n=n, q=q, schedule=dict(sched) or None))


# -- general (s,t) recursion -------------------------------------------------------

def _quotient_blocking(m: int, s: int, t: int, q: int) -> set:
    """An (s,t)-blocking set of PG(m, q) from the base rules or recursion."""
    if t == -1:
        return {empty(m, q)}
    if t == s:
        return set(grassmann_enumerate(m, q, t))
    if t == 0:
        return set(bose_burton(m, s, q).members)
    if (s, t) == (2, 1):
        return set(improved_21(m, q).members)
    if s == m:
        return {next(grassmann_enumerate(m, q, t))}
    return set(explicit_st(m, s, t, q, 0).members)


def explicit_st(n: int, s: int, t: int, q: int, k: int) -> LineSet:
    """The disjoint union over d of {T : dim(K meet T) = d, <K,T> in B_d}."""
    if not -1 <= t <= s <= n:
        raise ConstructionError(f"need -1 <= t <= s <= n, got n={n}, s={s}, t={t}")
    if not -1 <= k <= n - s - 1:
        raise ConstructionError(f"need -1 <= k <= n-s-1, got k={k}")
    name = _call("explicit_st", n=n, s=s, t=t, q=q, k=k)
    if t in (-1, s):
        return LineSet(n, q, t, set(grassmann_enumerate(n, q, t)), name)
    if k == -1:
        if t == 0 or (s, t) == (2, 1) or s == n:
            return LineSet(n, q, t, _quotient_blocking(n, s, t, q), name)
        raise ConstructionError("k = -1 needs a base case for (s,t)")
    K = standard_subspace(n, q, range(k + 1))
    frame = QuotientFrame(K)
    m = n - k - 1
    out = set()
    for d in range(-1, min(k, t) + 1):
        B_d = _quotient_blocking(m, s - d - 1, t - d - 1, q)
        lifted = [frame.lift(Y) for Y in B_d]
        for T1 in subspaces_of(K, d):
            for M in lifted:
                out.update(_fibre(K, frame.N, M, T1))
    return LineSet(n, q, t, out, name)


# -- replay ----------------------------------------------------------------------

_BUILDERS = {
    "spread": spread,
    "bose_burton": bose_burton,
    "beutel_blocking": beutel_blocking,
    "trivial_21": trivial_21,
    "improved_21": improved_21,
    "explicit_st": explicit_st,
    "grassmannian": grassmannian,
}


def replay(construction: str) -> LineSet:
    """Rebuild a line set from its top-level construction string."""
    match = re.fullmatch(r"(\w+)\((.*)\)", construction.strip())
    if not match or match.group(1) not in _BUILDERS:
        raise ConstructionError(f"cannot replay {construction!r}")
    call = ast.parse(f"f({match.group(2)})", mode="eval").body
    kwargs = {kw.arg: ast.literal_eval(kw.value) for kw in call.keywords}
    return _BUILDERS[match.group(1)](**kwargs)
