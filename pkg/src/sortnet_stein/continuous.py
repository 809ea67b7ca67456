"""Semicircle and Beta laws, and the Beta Stein equation.

Double precision throughout. For Beta(3/2, 3/2) the CDF and its
antiderivative are also available in closed form through ``2Z - 1 ~ S``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .exact import DomainError
from .kernels import semicircle_cdf_array, semicircle_cdf_scalar

__all__ = [
    "ContinuousLaw",
    "QuadratureError",
    "SEMICIRCLE",
    "BETA_3_2",
    "SteinSolution",
    "beta_cdf",
    "beta_cdf_antiderivative",
    "beta_moments",
    "beta_pdf",
    "check_beta_stein_characterization",
    "lipschitz_family",
    "semicircle_cdf",
    "semicircle_cdf_antiderivative",
    "semicircle_pdf",
    "solve_stein_equation",
]

NORM_TOL = 1e-12
EXPECTATION_TOL = 1e-10


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach its tolerance."""


def _quad(fn, a, b, *, epsabs, what, **kw):
    val, err, info, *warn = integrate.quad(
        fn, a, b, epsabs=epsabs, epsrel=0.0, limit=200, full_output=1, **kw
    )
    if warn and err > 10 * epsabs:
        raise QuadratureError(
            f"{what}: quad on [{a}, {b}] gave {val!r} with error estimate "
            f"{err:.3g} after {info.get('neval')} evaluations: {warn[0]}"
        )
    return val, err


# ---------------------------------------------------------------------------
# Semicircle
# ---------------------------------------------------------------------------


def semicircle_pdf(s):
    s = np.asarray(s, dtype=np.float64)
    inside = np.abs(s) < 1.0
    out = np.where(inside, (2.0 / np.pi) * np.sqrt(np.clip((1.0 - s) * (1.0 + s), 0, None)), 0.0)
    return out if out.ndim else float(out)


def semicircle_cdf(s):
    """``1/2 + (s sqrt(1-s^2) + arcsin s)/pi`` clipped outside (-1, 1)."""
    if np.ndim(s) == 0:
        return semicircle_cdf_scalar(float(s))
    return semicircle_cdf_array(s)


def semicircle_cdf_antiderivative(s):
    """``G(s) = int_{-1}^s F(t) dt``; equals ``s`` for ``s >= 1`` and 0 below -1."""
    s = np.asarray(s, dtype=np.float64)
    sc = np.clip(s, -1.0, 1.0)
    root = np.sqrt((1.0 - sc) * (1.0 + sc))
    g = sc / 2.0 + (-(root**3) / 3.0 + sc * np.arcsin(sc) + root) / np.pi
    g = np.where(s > 1.0, s, g)
    out = np.where(s < -1.0, 0.0, g)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Beta
# ---------------------------------------------------------------------------


def _check_params(alpha, beta):
    if not (alpha > 0 and beta > 0):
        raise DomainError(f"Beta parameters must be positive, got ({alpha}, {beta})")


def beta_pdf(z, alpha, beta):
    _check_params(alpha, beta)
    z = np.asarray(z, dtype=np.float64)
    inside = (z > 0.0) & (z < 1.0)
    zc = np.where(inside, z, 0.5)
    logd = (
        (alpha - 1.0) * np.log(zc)
        + (beta - 1.0) * np.log1p(-zc)
        - special.betaln(alpha, beta)
    )
    out = np.where(inside, np.exp(logd), 0.0)
    return out if out.ndim else float(out)


def beta_cdf(z, alpha, beta):
    """Regularized incomplete beta, clipped to [0, 1] outside the support."""
    _check_params(alpha, beta)
    z = np.asarray(z, dtype=np.float64)
    out = special.betainc(alpha, beta, np.clip(z, 0.0, 1.0))
    return out if out.ndim else float(out)


def beta_cdf_antiderivative(z, alpha, beta):
    """``int_0^z F(t) dt = z F(z) - E[Z; Z <= z]``.

    The truncated mean is ``alpha/(alpha+beta) * I_z(alpha+1, beta)``.
    """
    _check_params(alpha, beta)
    z = np.asarray(z, dtype=np.float64)
    zc = np.clip(z, 0.0, 1.0)
    mean = alpha / (alpha + beta)
    g = zc * special.betainc(alpha, beta, zc) - mean * special.betainc(alpha + 1.0, beta, zc)
    g = np.where(z > 1.0, z - mean, g)
    out = np.where(z < 0.0, 0.0, g)
    return out if out.ndim else float(out)


def beta_moments(alpha, beta):
    """``(E Z, E Z^2)`` for ``Z ~ Beta(alpha, beta)``."""
    _check_params(alpha, beta)
    mean = alpha / (alpha + beta)
    second = alpha * (alpha + 1.0) / ((alpha + beta) * (alpha + beta + 1.0))
    return mean, second


@dataclass(frozen=True)
class ContinuousLaw:
    """Either the semicircle on (-1, 1) or ``Beta(alpha, beta)`` on (0, 1)."""

    kind: str
    alpha: float | None = None
    beta: float | None = None

    def __post_init__(self):
        if self.kind == "semicircle":
            if self.alpha is not None or self.beta is not None:
                raise DomainError("semicircle takes no parameters")
        elif self.kind == "beta":
            if self.alpha is None or self.beta is None:
                raise DomainError("beta law needs alpha and beta")
            _check_params(self.alpha, self.beta)
        else:
            raise DomainError(f"unknown law kind {self.kind!r}")

    @classmethod
    def semicircle(cls):
        return cls("semicircle")

    @classmethod
    def beta_law(cls, alpha, beta):
        return cls("beta", float(alpha), float(beta))

    @property
    def support(self) -> tuple[float, float]:
        return (-1.0, 1.0) if self.kind == "semicircle" else (0.0, 1.0)

    @property
    def is_beta_three_halves(self) -> bool:
        return self.kind == "beta" and self.alpha == 1.5 and self.beta == 1.5

    def pdf(self, x):
        if self.kind == "semicircle":
            return semicircle_pdf(x)
        return beta_pdf(x, self.alpha, self.beta)

    def cdf(self, x):
        if self.kind == "semicircle":
            return semicircle_cdf(x)
        return beta_cdf(x, self.alpha, self.beta)

    def cdf_antiderivative(self, x):
        """``int_{left}^x F(t) dt`` in closed form."""
        if self.kind == "semicircle":
            return semicircle_cdf_antiderivative(x)
        if self.is_beta_three_halves:
            return 0.5 * semicircle_cdf_antiderivative(2.0 * np.asarray(x, dtype=np.float64) - 1.0)
        return beta_cdf_antiderivative(x, self.alpha, self.beta)

    def moments(self) -> tuple[float, float]:
        if self.kind == "semicircle":
            return 0.0, 0.25
        return beta_moments(self.alpha, self.beta)

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind, "alpha": self.alpha, "beta": self.beta})

    @classmethod
    def from_json(cls, text: str) -> ContinuousLaw:
        d = json.loads(text)
        return cls(d["kind"], d.get("alpha"), d.get("beta"))


SEMICIRCLE = ContinuousLaw.semicircle()
BETA_3_2 = ContinuousLaw.beta_law(1.5, 1.5)


def beta_expectation(g: Callable[[float], float], alpha, beta, epsabs=NORM_TOL) -> float:
    """``E g(Z)`` by quadrature with the algebraic endpoint weight."""
    _check_params(alpha, beta)
    val, _ = _quad(
        g, 0.0, 1.0, epsabs=epsabs, what="Beta expectation",
        weight="alg", wvar=(alpha - 1.0, beta - 1.0),
    )
    return val / math.exp(special.betaln(alpha, beta))


# ---------------------------------------------------------------------------
# Stein equation  w(1-w) f'(w) + (alpha(1-w) - beta w) f(w) = h(w) - Bh
# ---------------------------------------------------------------------------


@dataclass
class SteinSolution:
    """Bounded solution of the Beta Stein equation sampled on a grid of [0, 1]."""

    alpha: float
    beta: float
    bh: float
    grid: np.ndarray
    f: np.ndarray
    fprime: np.ndarray
    residual: np.ndarray  # NaN where not evaluated (endpoints)
    h_lipschitz: float | None = None
    _evaluate: Callable[[float], float] | None = field(default=None, repr=False)

    @property
    def sup_f(self) -> float:
        return float(np.max(np.abs(self.f)))

    @property
    def sup_fprime(self) -> float:
        return float(np.max(np.abs(self.fprime[1:-1])))

    @property
    def max_residual(self) -> float:
        r = self.residual[1:-1]
        return float(np.nanmax(r)) if np.any(np.isfinite(r)) else float("nan")

    def __call__(self, w: float) -> float:
        """Solution value at an arbitrary point; zero outside [0, 1]."""
        if not 0.0 <= w <= 1.0:
            return 0.0
        return self._evaluate(w)

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["w", "f", "fprime", "residual"])
        for row in zip(self.grid, self.f, self.fprime, self.residual):
            out.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def _stein_evaluator(h, alpha, beta, bh, epsabs):
    median_split = alpha / (alpha + beta)
    g = lambda t: h(t) - bh  # noqa: E731

    def value(w: float) -> float:
        if w <= 0.0:
            return (h(0.0) - bh) / alpha
        if w >= 1.0:
            return -(h(1.0) - bh) / beta
        # int_0^w g(t) t^(a-1) (1-t)^(b-1) dt, or minus the integral over [w, 1]
        # (the full integral vanishes); pick the side without cancellation.
        if w <= median_split:
            num, _ = _quad(
                lambda t: g(t) * (1.0 - t) ** (beta - 1.0), 0.0, w,
                epsabs=epsabs, what="Stein solution", weight="alg", wvar=(alpha - 1.0, 0.0),
            )
        else:
            num, _ = _quad(
                lambda t: g(t) * t ** (alpha - 1.0), w, 1.0,
                epsabs=epsabs, what="Stein solution", weight="alg", wvar=(0.0, beta - 1.0),
            )
            num = -num
        return num / (w**alpha * (1.0 - w) ** beta)

    return value


def solve_stein_equation(
    h: Callable[[float], float],
    alpha: float = 1.5,
    beta: float = 1.5,
    grid_size: int = 401,
    *,
    h_lipschitz: float | None = None,
    residual_step: float = 1e-3,
    check_residual: bool = True,
) -> SteinSolution:
    """Solve the Beta Stein equation for ``h`` on ``grid_size`` points of [0, 1].

    ``f`` comes from the integral representation, ``f'`` from the equation
    itself. The residual column plugs a five-point difference of ``f`` back
    into the equation; it is independent of how ``f'`` was obtained.
    """
    _check_params(alpha, beta)
    if grid_size < 100:
        raise DomainError("grid_size must be at least 100")
    probe = np.linspace(0.0, 1.0, 257)
    hv = np.array([h(float(t)) for t in probe])
    if not np.all(np.isfinite(hv)):
        raise DomainError("h is not finite on [0, 1]")

    bh = beta_expectation(h, alpha, beta, epsabs=1e-14)
    value = _stein_evaluator(h, alpha, beta, bh, epsabs=1e-14)
    grid = np.linspace(0.0, 1.0, grid_size)
    f = np.array([value(float(w)) for w in grid])

    inner = grid[1:-1]
    hi = np.array([h(float(w)) for w in inner])
    drift = alpha * (1.0 - inner) - beta * inner
    fp = np.empty_like(grid)
    fp[1:-1] = (hi - bh - drift * f[1:-1]) / (inner * (1.0 - inner))
    # endpoint derivative: linear extrapolation from the two nearest interior points
    fp[0] = 2.0 * fp[1] - fp[2]
    fp[-1] = 2.0 * fp[-2] - fp[-3]

    residual = np.full_like(grid, np.nan)
    if check_residual:
        d = residual_step
        for i, w in enumerate(inner, start=1):
            step = min(d, w / 2.0, (1.0 - w) / 2.0)
            f2p, f1p = value(w + 2 * step), value(w + step)
            f1m, f2m = value(w - step), value(w - 2 * step)
            dfd = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * step)
            lhs = w * (1.0 - w) * dfd + (alpha * (1.0 - w) - beta * w) * f[i]
            residual[i] = abs(lhs - (hi[i - 1] - bh))

    return SteinSolution(alpha, beta, bh, grid, f, fp, residual, h_lipschitz, value)


def check_beta_stein_characterization(
    f: Callable[[float], float],
    alpha: float = 1.5,
    beta: float = 1.5,
    fprime: Callable[[float], float] | None = None,
) -> float:
    """``E[Z(1-Z) f'(Z) + (alpha(1-Z) - beta Z) f(Z)]``; zero for smooth ``f``.

    Without ``fprime`` the derivative is a Richardson-extrapolated central
    difference, good to roughly 1e-11 for analytic ``f``.
    """
    _check_params(alpha, beta)
    if fprime is None:
        fprime = _richardson_derivative(f)

    def integrand(z):
        return z * (1.0 - z) * fprime(z) + (alpha * (1.0 - z) - beta * z) * f(z)

    return beta_expectation(integrand, alpha, beta, epsabs=EXPECTATION_TOL * 1e-2)


def _richardson_derivative(f, step=1e-2, levels=4):
    def d(z):
        table = []
        hstep = step
        for _ in range(levels):
            table.append((f(z + hstep) - f(z - hstep)) / (2 * hstep))
            hstep /= 2
        for j in range(1, levels):
            fac = 4.0**j
            table = [(fac * table[i + 1] - table[i]) / (fac - 1) for i in range(len(table) - 1)]
        return table[0]

    return d


def _soft_abs(center, width=0.1):
    # width * log(2 cosh(x / width)), derivative tanh, so 1-Lipschitz
    def h(w):
        x = (w - center) / width
        return width * (abs(x) + math.log1p(math.exp(-2.0 * abs(x))))

    return h


def lipschitz_family() -> dict[str, Callable[[float], float]]:
    """Twenty smooth test functions with ``sup |h'| <= 1`` on [0, 1]."""
    fam: dict[str, Callable[[float], float]] = {
        "w": lambda w: w,
        "1-w": lambda w: 1.0 - w,
        "w^2/2": lambda w: 0.5 * w * w,
        "(1-w)^2/2": lambda w: 0.5 * (1.0 - w) ** 2,
        "exp(-w)": lambda w: math.exp(-w),
        "w^3/3": lambda w: w**3 / 3.0,
        "sqrt(1+w^2)-1": lambda w: math.sqrt(1.0 + w * w) - 1.0,
        "atan(w)": math.atan,
        "log(1+w)": math.log1p,
    }
    for k in range(1, 5):
        fam[f"sin({k}pi w)/({k}pi)"] = lambda w, k=k: math.sin(k * math.pi * w) / (k * math.pi)
        fam[f"cos({k}pi w)/({k}pi)"] = lambda w, k=k: math.cos(k * math.pi * w) / (k * math.pi)
    for c in (0.2, 0.5, 0.8):
        fam[f"softabs(w-{c})"] = _soft_abs(c)
    return fam
