"""Exact first-swap law of a uniform sorting network and its Stein structure.

Everything here is :class:`fractions.Fraction` arithmetic; identities are
expected to hold with exact equality, never up to rounding.
"""

from __future__ import annotations

import csv
import io
import random
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, lcm

__all__ = [
    "DomainError",
    "FirstLetterLaw",
    "IntervalPMF",
    "SteinTriple",
    "TestFunction",
    "c_weight",
    "exact_cumsum",
    "exact_sum",
    "check_characterization",
    "check_identity_prop21",
    "first_letter_triple",
    "format_rational",
    "linear_coefficient",
    "moments",
    "parse_rational",
    "pmf",
    "pmf_csv",
    "psi",
    "random_rational",
    "random_test_function",
    "rescaled_identity_residual",
]

Rational = Fraction | int


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


def format_rational(x: Rational) -> str:
    """Serialize as ``"num/den"``; the denominator is always written."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    num, sep, den = text.strip().partition("/")
    if not sep:
        raise ValueError(f"expected 'num/den', got {text!r}")
    return Fraction(int(num), int(den))


def _common_numerators(xs: Sequence[Fraction]) -> tuple[list[int], int]:
    den = lcm(*(x.denominator for x in xs)) if xs else 1
    return [x.numerator * (den // x.denominator) for x in xs], den


def exact_sum(xs: Sequence[Fraction]) -> Fraction:
    """Sum over one common denominator; far cheaper than chained Fraction adds."""
    nums, den = _common_numerators(list(xs))
    return Fraction(sum(nums), den)


def exact_cumsum(xs: Sequence[Fraction]) -> tuple[list[int], int]:
    """Integer partial sums of ``xs`` over their common denominator."""
    nums, den = _common_numerators(list(xs))
    out, acc = [], 0
    for a in nums:
        acc += a
        out.append(acc)
    return out, den


# ---------------------------------------------------------------------------
# First-letter law
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FirstLetterLaw:
    """Law of the first letter ``X`` of a uniform reduced word of w0 in S_n."""

    n: int
    probs: tuple[Fraction, ...]  # probs[k - 1] = P(X = k), k = 1..n-1

    def __post_init__(self):
        if len(self.probs) != self.n - 1:
            raise DomainError(f"need {self.n - 1} masses, got {len(self.probs)}")

    def __getitem__(self, k: int) -> Fraction:
        if not 1 <= k <= self.n - 1:
            raise DomainError(f"k={k} outside 1..{self.n - 1}")
        return self.probs[k - 1]

    @property
    def support(self) -> range:
        return range(1, self.n)

    def cumulative(self) -> tuple[Fraction, ...]:
        cums, den = exact_cumsum(self.probs)
        return tuple(Fraction(c, den) for c in cums)

    def is_symmetric(self) -> bool:
        return all(self.probs[i] == self.probs[-1 - i] for i in range(len(self.probs)))


@lru_cache(maxsize=None)
def _pmf_numerators(n: int) -> tuple[tuple[int, ...], int]:
    # prod_{j=1}^{m} (2j+1)/(2j) = (2m+1) * C(2m, m) / 4^m, so over the common
    # denominator 4^(n-2) * C(n,2) every mass has an integer numerator.
    odd, central = [], 1
    for m in range(n - 1):
        odd.append((2 * m + 1) * central)
        central = central * (2 * m + 1) * (2 * m + 2) // ((m + 1) * (m + 1))
    nums = tuple(odd[k - 1] * odd[n - k - 1] for k in range(1, n))
    den = 4 ** (n - 2) * comb(n, 2)
    return nums, den


@lru_cache(maxsize=256)
def pmf(n: int) -> FirstLetterLaw:
    """Exact ``P(X = k)`` for k = 1..n-1."""
    if not isinstance(n, int) or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n!r}")
    nums, den = _pmf_numerators(n)
    return FirstLetterLaw(n, tuple(Fraction(a, den) for a in nums))


def pmf_csv(ns: Sequence[int]) -> str:
    """CSV table with columns ``n,k,p_num,p_den,p_float64``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "k", "p_num", "p_den", "p_float64"])
    for n in ns:
        for k, p in enumerate(pmf(n).probs, start=1):
            w.writerow([n, k, p.numerator, p.denominator, repr(float(p))])
    return buf.getvalue()


def psi(n: int, k: int) -> Fraction:
    """Discrete score ``(p(k+1) - p(k)) / p(k)`` in closed form."""
    if n < 2 or not 1 <= k <= n - 1:
        raise DomainError(f"psi needs 1 <= k <= n-1, got n={n}, k={k}")
    return Fraction(n - 2 * k - 1, k * (2 * (n - k) - 1))


def c_weight(n: int, k: int) -> Fraction:
    if n < 2 or not 0 <= k <= n - 1:
        raise DomainError(f"c needs 0 <= k <= n-1, got n={n}, k={k}")
    return Fraction(k * (2 * (n - k) - 1))


def linear_coefficient(n: int, k: int) -> Fraction:
    """``c(k) psi(k) + c(k) - c(k-1)``; simplifies to ``3n - 6k``."""
    if n < 2 or not 1 <= k <= n - 1:
        raise DomainError(f"need 1 <= k <= n-1, got n={n}, k={k}")
    ck = c_weight(n, k)
    return ck * psi(n, k) + ck - c_weight(n, k - 1)


# ---------------------------------------------------------------------------
# Generic integer-interval laws and test functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntervalPMF:
    """A pmf with positive mass on every integer of ``[a, b]``."""

    a: int
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.probs:
            raise DomainError("empty pmf")
        if any(p <= 0 for p in self.probs):
            raise DomainError("masses must be positive on the whole support")
        total = exact_sum(self.probs)
        if total != 1:
            raise DomainError(f"masses sum to {total}, not 1")

    @property
    def b(self) -> int:
        return self.a + len(self.probs) - 1

    def p(self, k: int) -> Fraction:
        if self.a <= k <= self.b:
            return self.probs[k - self.a]
        return Fraction(0)

    def psi(self, k: int) -> Fraction:
        # p(b + 1) = 0, so psi(b) = -1
        if not self.a <= k <= self.b:
            raise DomainError(f"psi undefined at {k}, support is [{self.a}, {self.b}]")
        pk = self.p(k)
        return (self.p(k + 1) - pk) / pk


@dataclass(frozen=True)
class TestFunction:
    """Exact values of ``f`` on the integers ``lo..hi``."""

    __test__ = False  # not a pytest class

    lo: int
    values: tuple[Fraction, ...]

    @property
    def hi(self) -> int:
        return self.lo + len(self.values) - 1

    def __call__(self, k: int) -> Fraction:
        if not self.lo <= k <= self.hi:
            raise DomainError(f"f evaluated at {k}, outside [{self.lo}, {self.hi}]")
        return self.values[k - self.lo]

    def covers(self, lo: int, hi: int) -> bool:
        return self.lo <= lo and hi <= self.hi

    @classmethod
    def from_callable(cls, fn: Callable[[int], Rational], lo: int, hi: int) -> TestFunction:
        return cls(lo, tuple(Fraction(fn(k)) for k in range(lo, hi + 1)))


@dataclass(frozen=True)
class SteinTriple:
    """A pmf on ``[a, b]`` together with a weight ``c`` on ``[a-1, b]``."""

    law: IntervalPMF
    c_values: tuple[Fraction, ...]  # c_values[k - (a-1)]

    def __post_init__(self):
        if len(self.c_values) != len(self.law.probs) + 1:
            raise DomainError("c must be given on [a-1, b]")

    @property
    def support(self) -> tuple[int, int]:
        return self.law.a, self.law.b

    @property
    def pmf(self) -> tuple[Fraction, ...]:
        return self.law.probs

    @property
    def psi(self) -> tuple[Fraction, ...]:
        return tuple(self.law.psi(k) for k in range(self.law.a, self.law.b + 1))

    def c(self, k: int) -> Fraction:
        lo = self.law.a - 1
        if not lo <= k <= self.law.b:
            raise DomainError(f"c undefined at {k}")
        return self.c_values[k - lo]


def first_letter_triple(n: int) -> SteinTriple:
    law = pmf(n)
    return SteinTriple(
        IntervalPMF(1, law.probs),
        tuple(c_weight(n, k) for k in range(0, n)),
    )


def _require_domain(f: TestFunction, lo: int, hi: int) -> None:
    if not f.covers(lo, hi):
        raise DomainError(
            f"test function lives on [{f.lo}, {f.hi}], needs [{lo}, {hi}]"
        )


def check_identity_prop21(triple: SteinTriple, f: TestFunction) -> Fraction:
    """E[c(Y-1) Df(Y-1) + (c(Y) psi(Y) + c(Y) - c(Y-1)) f(Y)].

    Zero for every ``f`` whenever ``c(a-1) = 0``.
    """
    a, b = triple.support
    if triple.c(a - 1) != 0:
        raise DomainError("weight must vanish at a-1")
    _require_domain(f, a - 1, b)
    law = triple.law
    total = Fraction(0)
    for y in range(a, b + 1):
        cy, cprev = triple.c(y), triple.c(y - 1)
        fy = f(y)
        total += law.p(y) * (cprev * (fy - f(y - 1)) + (cy * law.psi(y) + cy - cprev) * fy)
    return total


def check_characterization(law: IntervalPMF, f: TestFunction) -> Fraction:
    """E[Df(Y-1) + psi(Y) f(Y) + f(a-1) 1(Y = a)]; zero for every ``f``."""
    a, b = law.a, law.b
    _require_domain(f, a - 1, b)
    total = law.p(a) * f(a - 1)
    for y in range(a, b + 1):
        fy = f(y)
        total += law.p(y) * (fy - f(y - 1) + law.psi(y) * fy)
    return total


def _grid_value(f, x: Fraction) -> Fraction:
    try:
        v = f[x] if isinstance(f, Mapping) else f(x)
    except (KeyError, DomainError) as exc:
        raise DomainError(f"f is not defined at grid point {x}") from exc
    if v is None:
        raise DomainError(f"f is not defined at grid point {x}")
    return Fraction(v)


def rescaled_identity_residual(n: int, f) -> Fraction:
    """Residual of the identity for ``W = X/n`` on the grid ``{k/n : 0 <= k < n}``.

    ``f`` is a mapping from grid points (as Fractions) to rationals, or a
    callable taking a Fraction. Returns
    E[(nW - 1)(1 - W + 1/(2n)) (f(W) - f(W - 1/n)) + (3/2)(1 - 2W) f(W)].
    """
    law = pmf(n)
    grid = [_grid_value(f, Fraction(k, n)) for k in range(n)]
    half_n = Fraction(1, 2 * n)
    total = Fraction(0)
    for k in range(1, n):
        w = Fraction(k, n)
        slope = (k - 1) * (1 - w + half_n)
        drift = Fraction(3, 2) * (1 - 2 * w)
        total += law[k] * (slope * (grid[k] - grid[k - 1]) + drift * grid[k])
    return total


def moments(n: int) -> tuple[Fraction, Fraction]:
    """``(E W, E W^2)`` for ``W = X/n``, summed directly from the pmf."""
    law = pmf(n)
    nums, den = _common_numerators(list(law.probs))
    m1 = Fraction(sum(k * a for k, a in enumerate(nums, start=1)), den * n)
    m2 = Fraction(sum(k * k * a for k, a in enumerate(nums, start=1)), den * n * n)
    return m1, m2


# ---------------------------------------------------------------------------
# Random rationals for property checks
# ---------------------------------------------------------------------------


def random_rational(rng: random.Random) -> Fraction:
    """``u/v`` with ``u`` uniform on [-16, 16] and ``v`` uniform on [1, 16]."""
    return Fraction(rng.randint(-16, 16), rng.randint(1, 16))


def random_test_function(rng: random.Random, lo: int, hi: int) -> TestFunction:
    return TestFunction(lo, tuple(random_rational(rng) for _ in range(lo, hi + 1)))
