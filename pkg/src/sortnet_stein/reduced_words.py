"""Reduced words of the longest permutation: validation, enumeration, statistics.

Letters are 1-based: letter ``s`` swaps positions ``s`` and ``s + 1``. Words
are built by right multiplication from the identity, so a letter is
admissible exactly when the current one-line array ascends at ``s``.

Randomness uses numpy's PCG64 (64-bit state, splittable via SeedSequence).
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import stats

from . import exact
from .kernels import enumerate_reduced_words

__all__ = [
    "CapacityError",
    "ENUMERATION_CAP",
    "Permutation",
    "ReducedWord",
    "YBStats",
    "enumerate_words",
    "first_letter_histogram",
    "is_reduced_word",
    "reduced_word_diagnostic",
    "sample_first_letter",
    "sample_word",
    "stanley_count",
    "word_array",
    "yb_count",
    "yb_counts",
    "yb_stats",
]

ENUMERATION_CAP = 6


class CapacityError(ValueError):
    """Exhaustive enumeration requested beyond the supported size."""


def _check_cap(n: int) -> None:
    if not 2 <= n <= ENUMERATION_CAP:
        raise CapacityError(
            f"enumeration supports 2 <= n <= {ENUMERATION_CAP}, got n={n}: S_7 already "
            f"has {stanley_count(7):,} reduced words of w0. For larger n use "
            "sample_first_letter, which draws from the closed-form law."
        )


@dataclass(frozen=True)
class Permutation:
    one_line: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.one_line) != list(range(1, len(self.one_line) + 1)):
            raise ValueError(f"{self.one_line} is not a permutation of 1..n")

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def longest(cls, n: int) -> Permutation:
        return cls(tuple(range(n, 0, -1)))

    @property
    def n(self) -> int:
        return len(self.one_line)

    def length(self) -> int:
        """Number of inversions."""
        p = self.one_line
        return sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])

    def swap(self, s: int) -> Permutation:
        """Right-multiply by the adjacent transposition at ``s`` (1-based)."""
        p = list(self.one_line)
        p[s - 1], p[s] = p[s], p[s - 1]
        return Permutation(tuple(p))


@dataclass(frozen=True)
class ReducedWord:
    n: int
    letters: tuple[int, ...]

    def __len__(self):
        return len(self.letters)

    def reversed(self) -> ReducedWord:
        return ReducedWord(self.n, self.letters[::-1])

    def flipped(self) -> ReducedWord:
        """Conjugate by w0: ``s -> n - s``."""
        return ReducedWord(self.n, tuple(self.n - s for s in self.letters))

    def __str__(self):
        return " ".join(map(str, self.letters))


def reduced_word_diagnostic(word: ReducedWord) -> str | None:
    """``None`` when ``word`` is a reduced word of w0, else the first problem."""
    n, letters = word.n, word.letters
    need = n * (n - 1) // 2
    if len(letters) != need:
        return f"length {len(letters)}, expected C({n},2) = {need}"
    perm = list(range(1, n + 1))
    for t, s in enumerate(letters):
        if not 1 <= s <= n - 1:
            return f"letter {s} at position {t + 1} outside 1..{n - 1}"
        if perm[s - 1] > perm[s]:
            return f"prefix of length {t + 1} is not reduced (descent at {s})"
        perm[s - 1], perm[s] = perm[s], perm[s - 1]
    # C(n,2) length-increasing steps can only end at w0; check anyway
    if perm != list(range(n, 0, -1)):
        return f"product is {perm}, not the longest element"
    return None


def is_reduced_word(word: ReducedWord) -> bool:
    return reduced_word_diagnostic(word) is None


def stanley_count(n: int) -> int:
    """Number of reduced words of w0 in S_n."""
    if n < 2:
        raise exact.DomainError(f"n must be >= 2, got {n}")
    den = 1
    for i in range(1, n):
        den *= (2 * i - 1) ** (n - i)
    q, r = divmod(math.factorial(n * (n - 1) // 2), den)
    if r:
        raise ArithmeticError(f"Stanley quotient not integral for n={n}")
    return q


@lru_cache(maxsize=None)
def _cached_words(n: int) -> np.ndarray:
    arr = enumerate_reduced_words(n, stanley_count(n))
    arr.setflags(write=False)
    return arr


def word_array(n: int) -> np.ndarray:
    """Every reduced word of w0 in S_n as rows of a read-only ``uint8`` array.

    Rows are in lexicographic order. Built once per ``n`` and cached.
    """
    _check_cap(n)
    return _cached_words(n)


def enumerate_words(n: int) -> Iterator[ReducedWord]:
    for row in word_array(n):
        yield ReducedWord(n, tuple(int(s) for s in row))


def words_text(n: int) -> str:
    """One word per line, letters separated by spaces."""
    return "".join(" ".join(map(str, row)) + "\n" for row in word_array(n).tolist())


def first_letter_histogram(n: int) -> exact.FirstLetterLaw:
    words = word_array(n)
    counts = np.bincount(words[:, 0], minlength=n)[1:n]
    total = len(words)
    return exact.FirstLetterLaw(n, tuple(Fraction(int(c), total) for c in counts))


# ---------------------------------------------------------------------------
# Yang-Baxter moves
# ---------------------------------------------------------------------------


def yb_counts(words: np.ndarray) -> np.ndarray:
    """Yang-Baxter count for each row; overlapping windows all count."""
    w = words.astype(np.int16)
    a, b, c = w[:, :-2], w[:, 1:-1], w[:, 2:]
    return np.sum((a == c) & (np.abs(a - b) == 1), axis=1)


def yb_count(word: ReducedWord | Sequence[int]) -> int:
    letters = word.letters if isinstance(word, ReducedWord) else tuple(word)
    return sum(
        1
        for x, y, z in zip(letters, letters[1:], letters[2:])
        if x == z and abs(x - y) == 1
    )


@dataclass(frozen=True)
class YBStats:
    n: int
    mean: Fraction
    variance: Fraction
    histogram: dict[int, Fraction]
    tv_to_poisson1: float
    conjectured_variance: Fraction | None  # only stated for n >= 4

    @property
    def variance_agrees(self) -> bool | None:
        if self.conjectured_variance is None:
            return None
        return self.variance == self.conjectured_variance

    def histogram_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["count", "prob_num", "prob_den"])
        for j in sorted(self.histogram):
            p = self.histogram[j]
            w.writerow([j, p.numerator, p.denominator])
        return buf.getvalue()


def _tv_to_poisson1(hist: dict[int, Fraction]) -> float:
    top = max(hist)
    js = np.arange(top + 1)
    pois = stats.poisson.pmf(js, 1.0)
    emp = np.array([float(hist.get(int(j), 0)) for j in js])
    tail = stats.poisson.sf(top, 1.0)  # P(Poisson > top), no cancellation
    return 0.5 * (float(np.sum(np.abs(emp - pois))) + float(tail))


def yb_stats(n: int) -> YBStats:
    if n < 3:
        raise exact.DomainError("Yang-Baxter statistics need n >= 3")
    counts = yb_counts(word_array(n))
    total = len(counts)
    values, freq = np.unique(counts, return_counts=True)
    hist = {int(v): Fraction(int(f), total) for v, f in zip(values, freq)}
    mean = sum((j * p for j, p in hist.items()), Fraction(0))
    var = sum(((j - mean) ** 2 * p for j, p in hist.items()), Fraction(0))
    big_n = n * (n - 1) // 2
    conj = Fraction(big_n - 4, big_n - 2) if n >= 4 else None
    return YBStats(n, mean, var, hist, _tv_to_poisson1(hist), conj)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def _thresholds(n: int) -> np.ndarray:
    # u (53-bit integer) maps to the least k with u / 2^53 < P(X <= k).
    # For integer u that is u < ceil(cum_k * 2^53 / den).
    cums, den = exact.exact_cumsum(exact.pmf(n).probs)
    scale = 1 << 53
    return np.array([-((-c * scale) // den) for c in cums], dtype=np.int64)


def sample_first_letter(n: int, seed: int, count: int) -> np.ndarray:
    """``count`` i.i.d. draws of ``X``; inverse CDF against exact cumulative sums."""
    if n < 2:
        raise exact.DomainError(f"n must be >= 2, got {n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.integers(0, 1 << 53, size=count, dtype=np.int64)
    return np.searchsorted(_thresholds(n), u, side="right") + 1


def sample_word(n: int, seed: int) -> ReducedWord:
    """Uniform reduced word of w0, drawn as a uniform row of the enumeration."""
    words = word_array(n)
    rng = np.random.Generator(np.random.PCG64(seed))
    row = words[int(rng.integers(len(words)))]
    return ReducedWord(n, tuple(int(s) for s in row))
