"""Conditional Laplace transform of the aggregate interference.

Given serving distance l, the interference is the sum of N - 2 i.i.d.
terms G U^{-alpha}, so its transform is a single-interferer factor raised
to the power N - 2:

    L_I(t | l) = g(t | l)^(N-2),
    g(t | l)   = int_l^{d_max} (1 + t u^{-alpha} / m)^{-m} f(u | l) du,

where the kernel is the Gamma MGF of the fading gain and f(u | l) is the
conditional interferer density.  Extending the upper limit beyond d_max
changes nothing because the density vanishes there.

Derivatives in t up to order m - 1 feed the coverage series.  They are
computed analytically: differentiation under the integral gives the
derivatives of g, and the derivatives of g^(N-2) follow from Faa di
Bruno's formula (hard-coded Bell polynomials up to order 4, enough for
m <= 5).  Numeric differentiation is used only as a test oracle.

The u-integrals for all needed orders share one quadrature pass through
the tabulated density's cell-aligned Gauss rule (the tabulated density is
piecewise cubic, so cell alignment makes the rule exact up to the tiny
Gauss error on the smooth kernel factor).  Everything is deterministic
and pure; evaluations at distinct (t, l) can run concurrently.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .distance import TabulatedDistribution
from .errors import DegenerateConditionError, DomainError, UnsupportedParameterError
from .network import NetworkScenario, _check_geometry

_SURVIVAL_FLOOR = 1e-12
MAX_ANALYTIC_M = 5


@dataclass(frozen=True)
class LaplaceEvaluation:
    """L_I(t | l) together with its t-derivatives of order 0 .. m-1."""

    t: float
    value: float
    derivatives: Tuple[float, ...]


def require_analytic_m(m) -> int:
    """Validate the Nakagami shape for the analytic path; return it as int."""
    if isinstance(m, float) and not m.is_integer():
        raise UnsupportedParameterError(
            f"analytic path needs integer Nakagami m, got {m!r}; "
            "use the Monte Carlo simulator instead"
        )
    m = int(m)
    if not (1 <= m <= MAX_ANALYTIC_M):
        raise UnsupportedParameterError(
            f"analytic path supports m in [1, {MAX_ANALYTIC_M}], got {m}; "
            "use the Monte Carlo simulator instead"
        )
    return m


def _g_derivatives(
    t: float, l: float, scenario: NetworkScenario, dist: TabulatedDistribution, orders: int
) -> np.ndarray:
    """Signed derivatives g^(j)(t | l) for j = 0 .. orders-1.

    g^(j) = (-1)^j (m)_j int (u^{-a}/m)^j (1 + t u^{-a}/m)^{-m-j} f(u|l) du,
    with (m)_j the rising factorial from the Gamma-kernel derivative.
    """
    t = float(t)
    if t < 0.0:
        raise DomainError(f"transform argument t={t!r} must be nonnegative")
    l = float(l)
    if not (0.0 <= l < dist.d_max):
        raise DomainError(f"serving distance l={l!r} outside [0, d_max)")
    survival = dist.sf(l)
    if survival < _SURVIVAL_FLOOR:
        raise DegenerateConditionError(
            f"1 - F(l) = {survival!r} at l={l!r}; conditioning is degenerate"
        )
    m = scenario.channel.m
    alpha = scenario.channel.alpha
    rising = np.cumprod(np.concatenate(([1.0], m + np.arange(orders - 1))))
    signs = (-1.0) ** np.arange(orders)

    def rows_fn(u):
        x = np.power(u, -alpha) / m
        base = 1.0 + t * x
        return np.vstack(
            [np.power(base, -(m + j)) * np.power(x, j) for j in range(orders)]
        )

    raw = dist.integrate_pdf_product(l, rows_fn, orders) / survival
    if t == 0.0:
        # the conditional density integrates to 1 by construction; pin the
        # normalization identity g(0 | l) = 1 instead of its float residue
        raw[0] = 1.0
    return signs * rising * raw


def inner_integral(
    t: float,
    l: float,
    j: int,
    scenario: NetworkScenario,
    dist: TabulatedDistribution,
) -> float:
    """j-th t-derivative of the single-interferer factor g(t | l).

    j = 0 is g itself, in (0, 1]; higher orders carry sign (-1)^j.
    """
    if j != int(j) or j < 0:
        raise DomainError(f"derivative order j={j!r} must be a nonnegative integer")
    if j > scenario.channel.m - 1:
        raise DomainError(
            f"derivative order j={j} exceeds m - 1 = {scenario.channel.m - 1}"
        )
    _check_geometry(scenario.geom, dist)
    return float(_g_derivatives(t, l, scenario, dist, int(j) + 1)[int(j)])


def _falling(n: int, j: int) -> float:
    out = 1.0
    for i in range(j):
        out *= n - i
    return out


def _power_derivatives(g: np.ndarray, n: int, orders: int) -> np.ndarray:
    """Derivatives of g(t)^n from the derivatives of g (Faa di Bruno).

    Bell polynomials hard-coded through order 4; sufficient for the
    supported m <= 5.  Falling factorials vanish once j exceeds n, which
    handles small N without special cases.
    """
    if orders > 5:
        raise UnsupportedParameterError("derivative orders above 4 are not supported")
    g0 = g[0]
    powers = {
        j: _falling(n, j) * g0 ** (n - j)
        for j in range(orders)
        if _falling(n, j) != 0.0
    }

    def p(j):
        return powers.get(j, 0.0)

    out = np.zeros(orders)
    out[0] = g0**n
    if orders > 1:
        g1 = g[1]
        out[1] = p(1) * g1
    if orders > 2:
        g2 = g[2]
        out[2] = p(2) * g1**2 + p(1) * g2
    if orders > 3:
        g3 = g[3]
        out[3] = p(3) * g1**3 + 3.0 * p(2) * g1 * g2 + p(1) * g3
    if orders > 4:
        g4 = g[4]
        out[4] = (
            p(4) * g1**4
            + 6.0 * p(3) * g1**2 * g2
            + p(2) * (3.0 * g2**2 + 4.0 * g1 * g3)
            + p(1) * g4
        )
    return out


def laplace_with_derivatives(
    t: float,
    l: float,
    scenario: NetworkScenario,
    dist: TabulatedDistribution,
) -> LaplaceEvaluation:
    """L_I(t | l) = g(t | l)^(N-2) with derivatives of order 0 .. m-1.

    N = 2 means no interferers: the transform is identically 1 and all
    derivatives vanish.
    """
    m = require_analytic_m(scenario.channel.m)
    if t < 0.0:
        raise DomainError(f"transform argument t={t!r} must be nonnegative")
    if scenario.N == 2:
        return LaplaceEvaluation(t=float(t), value=1.0, derivatives=(1.0,) + (0.0,) * (m - 1))
    _check_geometry(scenario.geom, dist)
    g = _g_derivatives(t, l, scenario, dist, m)
    ds = _power_derivatives(g, scenario.N - 2, m)
    return LaplaceEvaluation(
        t=float(t), value=float(ds[0]), derivatives=tuple(float(d) for d in ds)
    )
