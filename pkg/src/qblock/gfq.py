"""Finite fields F_q for prime powers q.

Elements are integers in ``range(q)``: the base-p digits of an index are the
coefficients of the element's polynomial representative, constant term in
the lowest digit.  Index 0 is zero and index 1 is one.  All arithmetic goes
through tables built once when the field is made.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

#: Largest field order built by default.  Callers that need an extension
#: field (spreads) pass a larger ``max_q`` explicitly.
DEFAULT_MAX_Q = 16


class FieldError(ValueError):
    pass


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, e)`` with ``q == p**e``, or raise :class:`FieldError`."""
    if q < 2:
        raise FieldError(f"q={q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    if r != 1:
        raise FieldError(f"q={q} is not a prime power")
    return p, e


# -- polynomials over F_p, coefficient lists low-order first -----------------

def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _poly_trim([c % p for c in a])
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _poly_trim(a)
    return a


def _monic_polys(degree: int, p: int):
    """Monic polynomials of the given degree, lexicographic in the
    high-order-first coefficient tuple."""
    for tail in itertools.product(range(p), repeat=degree):
        # tail is (c_{d-1}, ..., c_0)
        yield list(reversed(tail)) + [1]


def is_irreducible(poly: list[int], p: int) -> bool:
    """Irreducibility over F_p by trial division with every monic
    polynomial of degree at most deg/2."""
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for f in _monic_polys(d, p):
            if not _poly_mod(list(poly), f, p):
                return False
    return True


def smallest_irreducible(e: int, p: int) -> list[int]:
    for f in _monic_polys(e, p):
        if is_irreducible(f, p):
            return f
    raise AssertionError("an irreducible polynomial exists for every degree")


class FieldSpec:
    """The field F_q with q = p**e.

    ``modulus`` is the monic irreducible defining polynomial, low-order
    first.  For prime fields it is the placeholder ``x - 0``.
    """

    def __init__(self, q: int, max_q: int | None = DEFAULT_MAX_Q):
        if max_q is not None and q > max_q:
            raise FieldError(f"q={q} exceeds the supported limit {max_q}")
        p, e = prime_power(q)
        self.p, self.e, self.q = p, e, q
        if e == 1:
            self.modulus = (0, 1)
        else:
            self.modulus = tuple(smallest_irreducible(e, p))
            if not is_irreducible(list(self.modulus), p):
                raise FieldError("modulus is reducible")
        self._build_tables()

    def __repr__(self):
        return f"FieldSpec(p={self.p}, e={self.e}, q={self.q})"

    def __eq__(self, other):
        return (isinstance(other, FieldSpec) and self.q == other.q
                and self.modulus == other.modulus)

    def __hash__(self):
        return hash((self.q, self.modulus))

    # digit vector helpers
    def digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.e):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def from_digits(self, ds) -> int:
        a = 0
        for d in reversed(list(ds)):
            a = a * self.p + d
        return a

    def _build_tables(self):
        p, q = self.p, self.q
        r = range(q)
        if self.e == 1:
            self.add_table = [[(a + b) % p for b in r] for a in r]
            self.mul_table = [[(a * b) % p for b in r] for a in r]
        else:
            dig = [self.digits(a) for a in r]
            self.add_table = [[self.from_digits((x + y) % p for x, y in zip(dig[a], dig[b]))
                               for b in r] for a in r]
            self.mul_table = [[0] * q for _ in r]
            for a in r:
                for b in range(a, q):
                    prod = [0] * (2 * self.e - 1)
                    for i, x in enumerate(dig[a]):
                        if x:
                            for j, y in enumerate(dig[b]):
                                prod[i + j] += x * y
                    red = _poly_mod(prod, list(self.modulus), p)
                    v = self.from_digits(red + [0] * (self.e - len(red)))
                    self.mul_table[a][b] = self.mul_table[b][a] = v
        self.neg_table = [self.add_table[a].index(0) for a in r]
        self.inv_table = [0] + [self.mul_table[a].index(1) for a in range(1, q)]
        self.sub_table = [[self.add_table[a][self.neg_table[b]] for b in r] for a in r]

        # log/antilog over the smallest primitive element
        for g in (range(2, q) if q > 2 else [1]):
            exp = [1]
            while len(exp) < q - 1:
                exp.append(self.mul_table[exp[-1]][g])
            if len(set(exp)) == q - 1:
                break
        self.generator = g
        self.exp_table = exp
        self.log_table = [None] * q
        for i, v in enumerate(exp):
            self.log_table[v] = i

    # arithmetic -------------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.sub_table[a][b]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp_table[(self.log_table[a] + self.log_table[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_%d" % self.q)
        return self.exp_table[-self.log_table[a] % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def power(self, a: int, k: int) -> int:
        if a == 0:
            return 0 if k else 1
        return self.exp_table[self.log_table[a] * k % (self.q - 1)]

    def elements(self):
        return range(self.q)


@lru_cache(maxsize=None)
def _cached_field(q: int) -> FieldSpec:
    return FieldSpec(q, max_q=None)


def field_make(q: int, max_q: int | None = DEFAULT_MAX_Q) -> FieldSpec:
    """Return the (cached) field of order ``q``."""
    if max_q is not None and q > max_q:
        prime_power(q)
        raise FieldError(f"q={q} exceeds the supported limit {max_q}")
    return _cached_field(q)


_OPS = {
    "add": FieldSpec.add,
    "sub": FieldSpec.sub,
    "mul": FieldSpec.mul,
    "div": FieldSpec.div,
    "neg": FieldSpec.neg,
    "inv": FieldSpec.inv,
}


def field_ops(spec: FieldSpec, op: str, a: int, b: int | None = None) -> int:
    """Dispatch a named field operation on element indices."""
    try:
        fn = _OPS[op]
    except KeyError:
        raise FieldError(f"unknown field operation {op!r}") from None
    for x in (a,) if b is None else (a, b):
        if not 0 <= x < spec.q:
            raise FieldError(f"{x} is not an element of F_{spec.q}")
    if op in ("neg", "inv"):
        return fn(spec, a)
    if b is None:
        raise FieldError(f"{op} needs two operands")
    return fn(spec, a, b)


class Embedding:
    """An injective homomorphism F_q -> F_{q^m} with an F_q-basis of F_{q^m}.

    ``image[a]`` is the image of subfield element ``a``.  ``coords(x)``
    expresses an extension element in the basis; ``from_coords`` inverts it.
    """

    def __init__(self, sub: FieldSpec, ext: FieldSpec, image: list[int], basis: list[int]):
        self.sub, self.ext = sub, ext
        self.image = image
        self.basis = basis
        self.degree = len(basis)
        self._coords: dict[int, tuple[int, ...]] = {}
        for cs in itertools.product(range(sub.q), repeat=self.degree):
            self._coords[self._combine(cs)] = cs

    def _combine(self, cs) -> int:
        x = 0
        for c, b in zip(cs, self.basis):
            x = self.ext.add(x, self.ext.mul(self.image[c], b))
        return x

    def __call__(self, a: int) -> int:
        return self.image[a]

    def coords(self, x: int) -> tuple[int, ...]:
        return self._coords[x]

    def from_coords(self, cs) -> int:
        return self._combine(cs)


def field_embed(sub: FieldSpec, ext: FieldSpec) -> Embedding:
    if sub.p != ext.p or ext.e % sub.e:
        raise FieldError(f"F_{sub.q} does not embed in F_{ext.q}")
    # a root of sub's modulus in ext gives the image of x
    if sub.e == 1:
        image = list(range(sub.q))
    else:
        def ev(poly, x):
            acc = 0
            for c in reversed(poly):
                acc = ext.add(ext.mul(acc, x), c)
            return acc
        root = next(x for x in range(ext.q) if ev(sub.modulus, x) == 0)
        image = []
        for a in range(sub.q):
            image.append(ev(sub.digits(a), root))
    # greedy basis in index order
    basis: list[int] = []
    span = {0}
    for x in range(1, ext.q):
        if x in span:
            continue
        basis.append(x)
        span = {ext.add(s, ext.mul(image[c], x)) for s in span for c in range(sub.q)}
        if len(span) == ext.q:
            break
    return Embedding(sub, ext, image, basis)
