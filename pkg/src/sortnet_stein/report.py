"""One-command reproduction: every acceptance check with its verdict."""

from __future__ import annotations

import math
import random
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import continuous as cl
from . import exact as ex
from . import reduced_words as rw
from . import wasserstein as ws


@dataclass
class Criterion:
    number: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    hard: bool = True  # soft criteria are reported, never failed on

    def line(self) -> str:
        verdict = "PASS" if self.passed else ("FAIL" if self.hard else "NOTE")
        return f"[{verdict}] {self.number:2d}. {self.name}"


def pmf_validity(n_max=200) -> Criterion:
    bad = [n for n in range(2, n_max + 1)
           if ex.exact_sum(ex.pmf(n).probs) != 1 or not ex.pmf(n).is_symmetric()]
    return Criterion(1, "exact pmf sums to 1 and is symmetric", not bad, {"failures": bad})


def enumeration_counts() -> Criterion:
    expected = {3: 2, 4: 16, 5: 768, 6: 292_864}
    got = {n: len(rw.word_array(n)) for n in expected}
    stanley = {n: rw.stanley_count(n) for n in expected}
    ok = got == expected == stanley
    return Criterion(2, "enumeration matches Stanley's count", ok, {"enumerated": got})


def first_letter_oracle() -> Criterion:
    mism = [n for n in range(3, 7) if rw.first_letter_histogram(n) != ex.pmf(n)]
    counts4 = np.bincount(rw.word_array(4)[:, 0])[1:].tolist()
    ok = not mism and counts4 == [5, 6, 5]
    return Criterion(3, "enumerated first-letter law equals the closed form", ok,
                     {"mismatches": mism, "n4_counts": counts4})


def stein_identities(seed=0, draws=100) -> Criterion:
    rng = random.Random(seed)
    nonzero = []
    for n in range(3, 51):
        triple = ex.first_letter_triple(n)
        for _ in range(draws):
            if ex.check_identity_prop21(triple, ex.random_test_function(rng, 0, n - 1)) != 0:
                nonzero.append(("c-identity", n))
    for _ in range(20):
        a = rng.randint(-10, 10)
        size = rng.randint(1, 13)
        raw = [rng.randint(1, 20) for _ in range(size)]
        law = ex.IntervalPMF(a, tuple(Fraction(r, sum(raw)) for r in raw))
        f = ex.random_test_function(rng, a - 1, law.b)
        if ex.check_characterization(law, f) != 0:
            nonzero.append(("characterization", a))
    for n in range(2, 51):
        grid = {Fraction(k, n): ex.random_rational(rng) for k in range(n)}
        if ex.rescaled_identity_residual(n, grid) != 0:
            nonzero.append(("rescaled", n))
    return Criterion(4, "discrete Stein identities vanish exactly", not nonzero,
                     {"nonzero": nonzero})


def moment_identities(n_max=200) -> Criterion:
    bad = []
    for n in range(2, n_max + 1):
        ew, ew2 = ex.moments(n)
        if ew != Fraction(1, 2) or ew2 / 2 != Fraction(5, 32) - Fraction(2 + n, 32 * n * n):
            bad.append(n)
    ok = not bad and ex.moments(4)[1] / 2 == Fraction(37, 256)
    return Criterion(5, "EW = 1/2 and E(W^2/2) = 5/32 - (2+n)/(32n^2)", ok, {"failures": bad})


def beta_bounds(reports) -> Criterion:
    bad = [r.n for r in reports if not (r.passed and r.witness_ok)]
    d2 = next(r.distance for r in reports if r.n == 2)
    spot = abs(d2 - 2.0 / (3.0 * math.pi))
    return Criterion(
        6, "1/(32n) <= d_W(W_n, Z) <= 59/(2n) and witness bound", not bad and spot <= 1e-10,
        {"failures": bad, "n2_error": spot,
         "n_times_distance_range": [min(r.n_times_distance for r in reports),
                                    max(r.n_times_distance for r in reports)]},
    )


def semicircle_bounds(reports) -> Criterion:
    bad = [r.n for r in reports if not (r.passed and r.scaling_ok)]
    return Criterion(7, "d_W(2X/n-1, S) = 2 d_W(W_n, Z) in [1/(16n), 59/n]", not bad,
                     {"failures": bad, "max_scaling_gap": max(r.scaling_gap for r in reports)})


def cdf_identity() -> Criterion:
    z = np.linspace(0.0, 1.0, 1001)
    gap = float(np.max(np.abs(cl.beta_cdf(z, 1.5, 1.5) - cl.semicircle_cdf(2 * z - 1))))
    return Criterion(8, "Beta(3/2,3/2) CDF equals semicircle CDF at 2z-1", gap <= 1e-12,
                     {"max_gap": gap})


def stein_solution_bounds() -> Criterion:
    worst = {"sup_f": 0.0, "sup_fprime": 0.0, "residual": 0.0}
    for h in cl.lipschitz_family().values():
        sol = cl.solve_stein_equation(h)
        worst["sup_f"] = max(worst["sup_f"], sol.sup_f)
        worst["sup_fprime"] = max(worst["sup_fprime"], sol.sup_fprime)
        worst["residual"] = max(worst["residual"], sol.max_residual)
    ok = (worst["sup_f"] <= 2 / 3 + 1e-6 and worst["sup_fprime"] <= 8 + 1e-4
          and worst["residual"] <= 1e-8)
    return Criterion(9, "Stein solution obeys |f| <= 2/3, |f'| <= 8", ok, worst)


def yang_baxter() -> tuple[Criterion, Criterion]:
    stats = {n: rw.yb_stats(n) for n in range(3, 7)}
    means_ok = all(s.mean == 1 for s in stats.values())
    detail = {
        n: {"mean": ex.format_rational(s.mean), "variance": ex.format_rational(s.variance),
            "conjectured": None if s.conjectured_variance is None
            else ex.format_rational(s.conjectured_variance),
            "tv_to_poisson1": s.tv_to_poisson1}
        for n, s in stats.items()
    }
    agree = all(stats[n].variance_agrees for n in (4, 5, 6))
    return (
        Criterion(10, "Yang-Baxter mean is exactly 1 for n = 3..6", means_ok, detail),
        Criterion(10, "Yang-Baxter variance matches the conjecture at n = 4..6",
                  agree, {}, hard=False),
    )


def sampling(seed=2024, count=100_000) -> Criterion:
    x3 = rw.sample_first_letter(3, seed, count)
    freq = float(np.mean(x3 == 1))
    ok3 = abs(freq - 0.5) <= 4 * math.sqrt(0.25 / count)
    w50 = rw.sample_first_letter(50, seed + 1, count) / 50.0
    sd = float(np.std(w50, ddof=1))
    ok50 = abs(float(np.mean(w50)) - 0.5) <= 4 * sd / math.sqrt(count)
    return Criterion(11, "sampled first letters agree with the exact law", ok3 and ok50,
                     {"n3_freq1": freq, "n50_mean_w": float(np.mean(w50))})


def run_all(n_max: int = 1000, progress: Callable[[str], None] | None = None) -> list[Criterion]:
    say = progress or (lambda _: None)
    out = [pmf_validity(), enumeration_counts(), first_letter_oracle(),
           stein_identities(), moment_identities()]
    for c in out:
        say(c.line())
    pairs = ws.paired_sweep(range(2, n_max + 1))
    beta_side = [b for b, _ in pairs]
    semi_side = [s for _, s in pairs]
    for c in (beta_bounds(beta_side), semicircle_bounds(semi_side), cdf_identity(),
              stein_solution_bounds(), *yang_baxter(), sampling()):
        out.append(c)
        say(c.line())
    return out
