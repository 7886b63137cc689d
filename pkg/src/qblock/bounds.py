"""Exact upper and lower bounds on f(n, q), the smallest number of lines of
PG(n, q) blocking every plane.

Everything here is exact integer or rational arithmetic.  The recursion
helpers accept either an integer ``q`` or the polynomial variable
:data:`Q`, so the same code yields numbers and polynomials in q.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .pgspace import gaussian_binomial


class BoundsError(ValueError):
    pass


class IntPolynomial:
    """A polynomial in q with integer coefficients, stored low-order first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def _lift(cls, other):
        if isinstance(other, IntPolynomial):
            return other
        if isinstance(other, int):
            return cls((other,))
        return NotImplemented

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def leading_term(self) -> tuple[int, int]:
        """(exponent, coefficient) of the highest nonzero monomial."""
        return self.degree, self.leading

    def coefficient_sequence(self) -> tuple[int, ...]:
        return tuple(reversed(self.coeffs))

    def __call__(self, q):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        size = max(len(a), len(b))
        return IntPolynomial(
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(size))

    __radd__ = __add__

    def __neg__(self):
        return IntPolynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return IntPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        if len(self.coeffs) == 2 and self.coeffs[0] == 0:
            # monomial c*q: fast path
            return IntPolynomial([0] * k + [self.coeffs[1] ** k])
        out = IntPolynomial((1,))
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return False
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"IntPolynomial({list(self.coeffs)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for e in range(self.degree, -1, -1):
            c = self.coeffs[e]
            if not c:
                continue
            mono = "" if e == 0 else ("q" if e == 1 else f"q^{e}")
            coef = str(c) if (c != 1 or not mono) else ""
            if c == -1 and mono:
                coef = "-"
            terms.append(coef + ("*" if coef not in ("", "-") and mono else "") + mono)
        return " + ".join(terms).replace("+ -", "- ")


#: The variable q as a polynomial.
Q = IntPolynomial((0, 1))


def lex_compare(p1: IntPolynomial, p2: IntPolynomial) -> int:
    """Compare coefficient sequences (leading coefficient first, padded with
    zeros).  Returns -1, 0 or 1."""
    a, b = p1.coefficient_sequence(), p2.coefficient_sequence()
    for x, y in itertools.zip_longest(a, b, fillvalue=0):
        if x != y:
            return -1 if x < y else 1
    return 0


def first_difference(p1: IntPolynomial, p2: IntPolynomial):
    """1-based position and difference (p2 - p1) of the first differing
    entry of the coefficient sequences, or None when equal."""
    a, b = p1.coefficient_sequence(), p2.coefficient_sequence()
    for i, (x, y) in enumerate(itertools.zip_longest(a, b, fillvalue=0), start=1):
        if x != y:
            return i, y - x
    return None


# -- recursion ---------------------------------------------------------------------

def k_star(n: int) -> int:
    """n minus the largest power of two not exceeding n."""
    if n < 1:
        raise BoundsError("k_star needs n >= 1")
    return n - (1 << (n.bit_length() - 1))


def valid_pair(n: int, k: int) -> bool:
    return -1 <= k and 2 * k <= n - 1


def _call_phi(phi, m):
    return phi(m) if callable(phi) else phi[m]


def _geom(q, lo: int, hi: int):
    """sum_{j=lo}^{hi} q^j (empty sum is 0)."""
    return sum((q ** j for j in range(lo, hi + 1)), 0)


def step_tail(n: int, q, k: int):
    """sum_{i=0}^{k} q^i * sum_{j=k}^{n-2} q^j."""
    return _geom(q, 0, k) * _geom(q, k, n - 2)


def u_step(phi, n: int, q, k: int):
    """Bound from one application of the recursion with step k."""
    if not valid_pair(n, k):
        raise BoundsError(f"(n={n}, k={k}) is not a valid pair")
    if k == -1:
        return _call_phi(phi, n)
    return q ** (2 * k + 2) * _call_phi(phi, n - k - 1) + _call_phi(phi, k) + step_tail(n, q, k)


def u_two_step(phi, n: int, q, k1: int, k2: int):
    """Two consecutive applications: k1 on n, then k2 on n - k1 - 1."""
    if not valid_pair(n, k1) or not valid_pair(n - k1 - 1, k2):
        raise BoundsError(f"(n={n}, k1={k1}, k2={k2}) are not valid pairs")
    inner = u_step(phi, n - k1 - 1, q, k2)
    if k1 == -1:
        return inner
    return q ** (2 * k1 + 2) * inner + _call_phi(phi, k1) + step_tail(n, q, k1)


def f_small(n: int, q):
    """Exact f(n, q) for n <= 4."""
    if n <= 1:
        return 0 * q
    if n == 2:
        return 1 + 0 * q
    if n == 3:
        return q ** 2 + 1
    if n == 4:
        return q ** 4 + 2 * q ** 2 + q + 1
    raise BoundsError("f(n, q) is only known exactly for n <= 4")


@lru_cache(maxsize=None)
def _f_star(n: int, q):
    if n < -1:
        raise BoundsError("n must be >= -1")
    if n <= 4:
        return f_small(n, q)
    return u_step(lambda m: _f_star(m, q), n, q, k_star(n))


def f_star_poly(n: int) -> IntPolynomial:
    p = _f_star(n, Q)
    return p if isinstance(p, IntPolynomial) else IntPolynomial((p,))


def f_star(n: int, q: int) -> int:
    return _f_star(n, q)


def coefficient_sequence(n: int) -> tuple[int, ...]:
    """High-order-first coefficients of f*(n, q), length 2n - 3."""
    if n < 2:
        raise BoundsError("coefficient_sequence needs n >= 2")
    seq = f_star_poly(n).coefficient_sequence()
    return seq + (0,) * (2 * n - 3 - len(seq))


@lru_cache(maxsize=None)
def _f_opt(n: int, q: int):
    if n <= 4:
        return f_small(n, q), ()
    best = None
    for k in range(0, (n - 1) // 2 + 1):
        val = u_step(lambda m: _f_opt(m, q)[0], n, q, k)
        if best is None or val < best[0]:
            best = (val, k)
    val, k = best
    sched = dict(_f_opt(n - k - 1, q)[1])
    for m, km in _f_opt(k, q)[1]:
        sched.setdefault(m, km)
    sched[n] = k
    return val, tuple(sorted(sched.items()))


def f_opt(n: int, q: int) -> tuple[int, dict[int, int]]:
    """Minimum of the recursion over all admissible steps, with the argmin
    step (smallest k on ties) for every level the optimum uses."""
    if n < -1:
        raise BoundsError("n must be >= -1")
    val, sched = _f_opt(n, q)
    return val, dict(sched)


def f_opt_argmins(n: int, q: int) -> list[int]:
    """Every step k attaining f_opt(n, q) at the top level (n >= 5)."""
    if n < 5:
        raise BoundsError("f_opt_argmins needs n >= 5")
    vals = {k: u_step(lambda m: _f_opt(m, q)[0], n, q, k) for k in range(0, (n - 1) // 2 + 1)}
    best = min(vals.values())
    return [k for k, v in vals.items() if v == best]


def schedule_value(n: int, q, schedule: dict[int, int]):
    """Size of the recursive construction under an explicit step schedule
    (k*(m) for levels the schedule does not mention)."""
    @lru_cache(maxsize=None)
    def g(m):
        if m <= 4 and m not in schedule:
            return f_small(m, q)
        if m <= 3:
            return f_small(m, q)
        return u_step(g, m, q, schedule.get(m, k_star(m)))
    return g(n)


def known_upper(n: int, q):
    """The earlier n-1 -> n recursion: k = 0 steps upward from f*(5, q)."""
    if n <= 5:
        return _f_star(n, q)
    return u_step(lambda m: known_upper(m, q) if m == n - 1 else _f_star(m, q), n, q, 0)


# -- two-step comparison ------------------------------------------------------------------

def further_better_admissible(n: int, k1: int, k2: int, l1: int, l2: int) -> bool:
    d = k1 + k2
    total = n + d + 2
    return (n >= 1 and k1 >= 0 and k2 >= 0 and l2 >= 0 and l1 >= -1
            and l1 + l2 == d and k2 < l2
            and valid_pair(total, k1) and valid_pair(n + k2 + 1, k2)
            and valid_pair(total, l1) and valid_pair(n + l2 + 1, l2))


def further_better_diff(n: int, k1: int, k2: int, l1: int, l2: int) -> IntPolynomial:
    """u_two_step(f*, n+d+2, q, k1, k2) - u_two_step(f*, n+d+2, q, l1, l2)
    as a polynomial in q, where d = k1 + k2."""
    if not further_better_admissible(n, k1, k2, l1, l2):
        raise BoundsError(f"inadmissible instance n={n}, k=({k1},{k2}), l=({l1},{l2})")
    total = n + k1 + k2 + 2
    phi = f_star_poly
    return u_two_step(phi, total, Q, k1, k2) - u_two_step(phi, total, Q, l1, l2)


def further_better_instances(max_total: int):
    """Every admissible (n, k1, k2, l1, l2) with n + d + 2 <= max_total."""
    for total in range(3, max_total + 1):
        for d in range(0, total - 2):
            n = total - d - 2
            for k1 in range(0, d + 1):
                k2 = d - k1
                for l2 in range(k2 + 1, d + 2):
                    l1 = d - l2
                    if further_better_admissible(n, k1, k2, l1, l2):
                        yield n, k1, k2, l1, l2


# -- lower bounds -----------------------------------------------------------------------

def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def lower_schonheim_chain(n: int, q: int) -> int:
    """Iterated q-Schonheim bound seeded with the exact f(4, q)."""
    if n < 4:
        raise BoundsError("the Schonheim chain starts at n = 4")
    val = f_small(4, q)
    for m in range(5, n + 1):
        val = _ceil_div((q ** (m + 1) - 1) * val, q ** (m - 1) - 1)
    return val


def lower_stdeq(n: int, q: int) -> int:
    if n < 2:
        raise BoundsError("n must be >= 2")
    return _ceil_div((q ** (n + 1) - 1) * (q ** (n - 1) - 1), (q ** 2 - 1) ** 2)


def lower_trivial(n: int, q: int) -> int:
    if n < 2:
        raise BoundsError("n must be >= 2")
    return _ceil_div((q ** (n + 1) - 1) * (q ** n - 1), (q ** 3 - 1) * (q ** 2 - 1))


def lower_main1(n: int, q: int) -> int:
    if n < 4:
        raise BoundsError("n must be >= 4")
    return _ceil_div((q ** (n + 1) - 1) * (q ** n - 1) * (q ** 4 + 2 * q ** 2 + q + 1),
                     (q ** 5 - 1) * (q ** 4 - 1))


def lines_count(n: int, q: int) -> int:
    return gaussian_binomial(n + 1, 2, q)


def density(n: int, q: int) -> tuple[Fraction, Fraction]:
    """Interval for f(n, q) / #lines of PG(n, q)."""
    if n < 2:
        raise BoundsError("n must be >= 2")
    lines = lines_count(n, q)
    if n <= 4:
        exact = Fraction(f_small(n, q), lines)
        return exact, exact
    return Fraction(lower_schonheim_chain(n, q), lines), Fraction(f_opt(n, q)[0], lines)


# -- tables --------------------------------------------------------------------------------

REFERENCE_BOUNDS = {
    2: {"lower": (27, 114, 468, 1895, 7625, 30590),
        "known": (27, 122, 519, 2139, 8683, 34987),
        "upper": (27, 122, 517, 2125, 8627, 34762)},
    3: {"lower": (103, 938, 8474, 76360, 687520, 6188519),
        "known": (103, 966, 8815, 79699, 718384, 6468736),
        "upper": (103, 966, 8812, 79660, 718033, 6465576)},
}

COEFFICIENT_TABLE = {
    2: (1,),
    3: (1, 0, 1),
    4: (1, 0, 2, 1, 1),
    5: (1, 0, 2, 2, 2, 1, 0),
    6: (1, 0, 2, 2, 3, 2, 1, 0, 1),
    7: (1, 0, 2, 2, 3, 3, 2, 1, 1, 0, 1),
    8: (1, 0, 2, 2, 3, 3, 3, 2, 2, 1, 2, 1, 1),
    9: (1, 0, 2, 2, 3, 3, 3, 3, 3, 2, 3, 2, 2, 1, 0),
}

CSV_FIELDS = ("n", "q", "lower_trivial", "lower_stdeq", "lower_schonheim", "lower_main1",
              "upper_fstar", "upper_fopt", "fopt_schedule", "density_low", "density_high")


@dataclass
class BoundsRow:
    n: int
    q: int
    lower_trivial: int
    lower_stdeq: int
    lower_schonheim: int
    lower_main1: int
    upper_fstar: int
    upper_fopt: int
    fopt_argmin: dict[int, int] = field(default_factory=dict)
    density_low: Fraction = Fraction(0)
    density_high: Fraction = Fraction(0)

    def as_record(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "lower_trivial": self.lower_trivial,
            "lower_stdeq": self.lower_stdeq,
            "lower_schonheim": self.lower_schonheim,
            "lower_main1": self.lower_main1,
            "upper_fstar": self.upper_fstar,
            "upper_fopt": self.upper_fopt,
            "fopt_schedule": ";".join(f"{m}:{k}" for m, k in sorted(self.fopt_argmin.items())),
            "density_low": str(self.density_low),
            "density_high": str(self.density_high),
        }


def bounds_row(n: int, q: int) -> BoundsRow:
    low, high = density(n, q)
    fo, sched = f_opt(n, q)
    return BoundsRow(
        n=n, q=q,
        lower_trivial=lower_trivial(n, q),
        lower_stdeq=lower_stdeq(n, q),
        lower_schonheim=lower_schonheim_chain(n, q),
        lower_main1=lower_main1(n, q),
        upper_fstar=f_star(n, q),
        upper_fopt=fo,
        fopt_argmin=sched,
        density_low=low,
        density_high=high,
    )


def bounds_table(q: int, n_max: int) -> list[BoundsRow]:
    if n_max < 4:
        raise BoundsError("n_max must be >= 4")
    from .gfq import prime_power
    prime_power(q)
    return [bounds_row(n, q) for n in range(4, n_max + 1)]


def check_reference_bounds(rows) -> list[str]:
    """Mismatches between computed rows and the reference q = 2, 3 values."""
    problems = []
    for r in rows:
        ref = REFERENCE_BOUNDS.get(r.q)
        if ref is None or not 4 <= r.n <= 9:
            continue
        i = r.n - 4
        if r.lower_schonheim != ref["lower"][i]:
            problems.append(f"q={r.q} n={r.n}: lower {r.lower_schonheim} != {ref['lower'][i]}")
        if r.upper_fstar != ref["upper"][i]:
            problems.append(f"q={r.q} n={r.n}: upper {r.upper_fstar} != {ref['upper'][i]}")
    return problems
