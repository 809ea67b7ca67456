"""Wasserstein-1 distance between a finite atomic law and a continuous law.

In one dimension ``d_W = int |F_mu - F_nu|``. Between consecutive atoms
``F_mu`` is flat, so each piece splits at the one point where the increasing
``F_nu`` crosses that level; both halves integrate in closed form through the
CDF antiderivative.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import exact
from .continuous import BETA_3_2, SEMICIRCLE, ContinuousLaw, _quad
from .kernels import bisect_crossings_numpy, semicircle_crossings

__all__ = [
    "DiscreteAtomLaw",
    "DistanceReport",
    "bounds_sweep",
    "distance_report",
    "lower_bound_witness",
    "paired_sweep",
    "scaled_distance_report",
    "sweep_csv",
    "wasserstein_1d",
]

EPS = float(np.finfo(np.float64).eps)
SLACK = 1e-9
SCALING_TOL = 2e-10


@dataclass(frozen=True)
class DiscreteAtomLaw:
    locations: tuple[float, ...]
    masses: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.locations) != len(self.masses) or not self.masses:
            raise ValueError("need one mass per atom and at least one atom")
        if any(b <= a for a, b in zip(self.locations, self.locations[1:])):
            raise ValueError("atom locations must be strictly increasing")
        if any(m <= 0 for m in self.masses):
            raise ValueError("atom masses must be positive")
        total = exact.exact_sum(self.masses)
        if total != 1:
            raise ValueError(f"atom masses sum to {total}, not 1")

    @classmethod
    def first_letter(cls, n: int, scale: float = 1.0, shift: float = 0.0) -> DiscreteAtomLaw:
        """Law of ``scale * X / n + shift``."""
        law = exact.pmf(n)
        locs = tuple(scale * k / n + shift for k in range(1, n))
        return cls(locs, law.probs)

    def cumulative_floats(self) -> np.ndarray:
        # exact partial sums, each rounded once (int / int is correctly rounded)
        cums, den = exact.exact_cumsum(self.masses)
        return np.array([c / den for c in cums])


def _pieces(mu: DiscreteAtomLaw, nu: ContinuousLaw):
    x = np.array(mu.locations, dtype=np.float64)
    lo_s, hi_s = nu.support
    left = min(lo_s, x[0])
    right = max(hi_s, x[-1])
    edges = np.concatenate([[left], x, [right]])
    levels = np.concatenate([[0.0], mu.cumulative_floats()])
    levels[-1] = 1.0
    return edges[:-1], edges[1:], levels


def _crossings(nu: ContinuousLaw, levels, a, b, iters):
    if nu.kind == "semicircle":
        return semicircle_crossings(levels, a, b, 1.0, 0.0, iters)
    if nu.is_beta_three_halves:
        return semicircle_crossings(levels, a, b, 2.0, -1.0, iters)
    return bisect_crossings_numpy(nu.cdf, levels, a, b, iters)


def wasserstein_1d(
    mu: DiscreteAtomLaw,
    nu: ContinuousLaw,
    *,
    iters: int = 60,
    method: str = "closed",
) -> tuple[float, float]:
    """Return ``(distance, abs_error_bound)``.

    ``method="quadrature"`` integrates each half-piece adaptively instead of
    through the antiderivative; it is slower and exists as a cross-check.
    """
    a, b, c = _pieces(mu, nu)
    t = _crossings(nu, c, a, b, iters)
    width = b - a
    scale = max(abs(a[0]), abs(b[-1]), 1.0)

    if method == "closed":
        G = nu.cdf_antiderivative
        ga, gt, gb = G(a), G(t), G(b)
        parts = c * (t - a) - (gt - ga) + (gb - gt) - c * (b - t)
        # a handful of roundings per piece in values of size <= 2 * scale
        round_err = 16.0 * EPS * scale * len(parts)
    elif method == "quadrature":
        parts = np.empty_like(c)
        round_err = 0.0
        for i in range(len(c)):
            ci = c[i]
            lhs, e1 = (0.0, 0.0) if t[i] <= a[i] else _quad(
                lambda s: ci - nu.cdf(s), a[i], t[i], epsabs=1e-14, what="d_W piece"
            )
            rhs, e2 = (0.0, 0.0) if b[i] <= t[i] else _quad(
                lambda s: nu.cdf(s) - ci, t[i], b[i], epsabs=1e-14, what="d_W piece"
            )
            parts[i] = lhs + rhs
            round_err += e1 + e2 + 4.0 * EPS
    else:
        raise ValueError(f"unknown method {method!r}")

    distance = float(np.sum(parts))
    # misplaced crossing costs at most the level error times the miss;
    # float masses are off by <= EPS each
    crossing_err = float(np.sum(width)) * (2.0 ** -iters + 2.0 * EPS)
    mass_err = EPS * float(np.sum(width))
    return distance, float(round_err + crossing_err + mass_err)


@dataclass(frozen=True)
class DistanceReport:
    n: int
    target: str  # "beta" for W_n vs Beta(3/2,3/2), "semicircle" for 2X/n - 1 vs S
    distance: float
    abs_error_bound: float
    lower_paper: float
    lower_witness: float
    upper_paper: float
    passed: bool
    witness_ok: bool
    scaling_gap: float | None = None  # |d(2X/n-1, S) - 2 d(W_n, Z)|, semicircle only

    @property
    def n_times_distance(self) -> float:
        return self.n * self.distance

    @property
    def scaling_ok(self) -> bool | None:
        if self.scaling_gap is None:
            return None
        return self.scaling_gap <= SCALING_TOL

    def as_dict(self) -> dict:
        d = asdict(self)
        d["n_times_distance"] = self.n_times_distance
        return d


def lower_bound_witness(n: int) -> Fraction:
    """``|E(W^2/2) - E(Z^2/2)|`` from the exact moments; equals ``(2+n)/(32 n^2)``."""
    _, ew2 = exact.moments(n)
    ez2 = Fraction(5, 16)  # (3/2)(5/2) / (3 * 4)
    return abs(ew2 / 2 - ez2 / 2)


def _report(n, target, distance, err, lower, witness, upper, gap=None, slack=SLACK):
    tol = err + slack
    return DistanceReport(
        n=n,
        target=target,
        distance=distance,
        abs_error_bound=err,
        lower_paper=lower,
        lower_witness=witness,
        upper_paper=upper,
        passed=bool(lower - tol <= distance <= upper + tol),
        witness_ok=bool(distance >= witness - tol),
        scaling_gap=gap,
    )


def distance_report(n: int, slack: float = SLACK) -> DistanceReport:
    """``d_W(X/n, Beta(3/2,3/2))`` against ``1/(32n)`` and ``59/(2n)``."""
    if n < 2:
        raise exact.DomainError(f"n must be >= 2, got {n}")
    d, err = wasserstein_1d(DiscreteAtomLaw.first_letter(n), BETA_3_2)
    return _report(
        n, "beta", d, err,
        1.0 / (32 * n), float(lower_bound_witness(n)), 59.0 / (2 * n), slack=slack,
    )


def scaled_distance_report(
    n: int, beta_report: DistanceReport | None = None, slack: float = SLACK
) -> DistanceReport:
    """``d_W(2X/n - 1, S)`` against ``1/(16n)`` and ``59/n``.

    ``scaling_gap`` compares it with twice the Beta-side distance.
    """
    if n < 2:
        raise exact.DomainError(f"n must be >= 2, got {n}")
    if beta_report is None:
        beta_report = distance_report(n, slack)
    d, err = wasserstein_1d(DiscreteAtomLaw.first_letter(n, 2.0, -1.0), SEMICIRCLE)
    return _report(
        n, "semicircle", d, err,
        1.0 / (16 * n), 2.0 * float(lower_bound_witness(n)), 59.0 / n,
        gap=float(abs(d - 2.0 * beta_report.distance)), slack=slack,
    )


def paired_sweep(
    ns: Iterable[int], slack: float = SLACK
) -> list[tuple[DistanceReport, DistanceReport]]:
    """``(beta_side, semicircle_side)`` reports for each ``n``, ascending."""
    out = []
    for n in ns:
        rep = distance_report(n, slack)
        out.append((rep, scaled_distance_report(n, rep, slack)))
    return out


def bounds_sweep(
    ns: Iterable[int], scaled: bool = False, slack: float = SLACK
) -> list[DistanceReport]:
    if scaled:
        return [semi for _, semi in paired_sweep(ns, slack)]
    return [distance_report(n, slack) for n in ns]


SWEEP_COLUMNS = ("n", "distance", "lower_paper", "lower_witness", "upper_paper", "n_times_distance", "pass")


def sweep_csv(reports: Sequence[DistanceReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in reports:
        w.writerow([
            r.n, repr(r.distance), repr(r.lower_paper), repr(r.lower_witness),
            repr(r.upper_paper), repr(r.n_times_distance), str(r.passed).lower(),
        ])
    return buf.getvalue()
