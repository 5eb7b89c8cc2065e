"""European call pricing under the variable-volatility-elasticity model.

Three routes:

* ``price_formula`` — the explicit formula: with the risk-neutral solution
  map f_t from Brownian value to price,

      C(t, x) = e^{-r(T-t)} E[ f_T(Z) 1_{Z > d} ] - K e^{-r(T-t)} (1 - N(d)),
      d = (f_T^{-1}(K) - f_t^{-1}(x)) / sqrt(T - t),

  evaluated by adaptive quadrature against the standard normal density.
  ``d`` uses a numeric monotone inverse of f; the literal closed-form
  inverse (``literal_inverse_map``) has a logarithm whose argument goes
  negative for admissible inputs and is kept only for cross-checking.

* ``price_mc`` — risk-neutral Monte Carlo via the Euler scheme (deliberately
  NOT the closed-form path map, so it is an independent check on the
  formula).

* ``price_bs`` — the Black-Scholes closed form, the c1 = 0 oracle.

Caveat: the solution map f is the closed-form candidate of
:mod:`vve.sde`, which does not satisfy the SDE for c1 > 0 (see that module's
docstring).  ``price_formula`` therefore prices the process S~_t = f_t(B*_t)
exactly, which for c1 > 0 systematically exceeds the Monte Carlo price of
the true SDE; the gap grows with c1 * s0.  The comparison machinery reports
the difference rather than hiding it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .errors import (
    ExplosionRegion,
    NegativeCoefficient,
    NonPositiveSpot,
    OutOfRange,
    SigmaZeroUnsupported,
    SingularDelta,
)
from .model import GAMMA_TOL, ModelParams
from .sde import DEN_TOL_FACTOR, euler_terminal

#: margin denominator (in units of sigma + c1*s0) at which the quadrature
#: domain is cut short of the explosion asymptote of f_T
_QUAD_DEN_MARGIN = 1e-6


def norm_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


@dataclass(frozen=True)
class OptionSpec:
    """European call: strike, maturity T, valuation time t, risk-free rate."""

    strike: float
    maturity: float
    rate: float
    t: float = 0.0

    def __post_init__(self):
        if self.strike < 0:
            raise NegativeCoefficient(f"strike must be >= 0, got {self.strike}")
        if not (0 <= self.t <= self.maturity):
            raise NegativeCoefficient(
                f"need 0 <= t <= maturity, got t={self.t}, maturity={self.maturity}")


@dataclass(frozen=True)
class RiskNeutralParams:
    """Model parameters under the risk-neutral measure (drift = rate)."""

    sigma: float
    c1: float
    s0: float
    r: float

    def __post_init__(self):
        if self.s0 <= 0:
            raise NonPositiveSpot(f"s0 must be > 0, got {self.s0}")
        if self.sigma < 0 or self.c1 < 0:
            raise NegativeCoefficient("sigma and c1 must be >= 0")
        if abs(self.r - 0.5 * self.sigma ** 2) < GAMMA_TOL:
            raise SingularDelta(
                f"|r - sigma^2/2| = {abs(self.r - 0.5 * self.sigma**2):.3e} < {GAMMA_TOL}")

    @property
    def gamma(self) -> float:
        return self.r - 0.5 * self.sigma ** 2

    @property
    def delta(self) -> float:
        return self.r / self.gamma


@dataclass(frozen=True)
class OptionQuote:
    price: float
    method: str
    error_estimate: float
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.price < 0 or self.error_estimate < 0:
            raise NegativeCoefficient("price and error_estimate must be >= 0")

    def to_dict(self) -> dict:
        return {"price": self.price, "method": self.method,
                "error_estimate": self.error_estimate,
                "diagnostics": dict(self.diagnostics)}


# --------------------------------------------------------------------------
# The solution map f_t and its inverse
# --------------------------------------------------------------------------

def _map_coefficients(rn: RiskNeutralParams, t: float) -> tuple[float, float, float]:
    """(a, b, c) with f_t(w) = c * u / (a*u + b), u = exp(sigma*w)."""
    if rn.sigma == 0:
        raise SigmaZeroUnsupported("solution map requires sigma > 0")
    delta, gamma = rn.delta, rn.gamma
    egt = math.exp(gamma * t)
    a = rn.c1 * rn.s0 * ((delta - 1.0) * egt - delta)
    b = rn.sigma + rn.c1 * rn.s0
    c = rn.sigma * rn.s0 * egt
    return a, b, c


def _forward_raw(rn: RiskNeutralParams, t: float, w):
    """f_t(w) and the (positive-in-domain) denominator a + b*exp(-sigma*w)."""
    a, b, c = _map_coefficients(rn, t)
    w = np.asarray(w, dtype=float)
    with np.errstate(over="ignore"):
        den = a + b * np.exp(-rn.sigma * w)
        values = np.where(np.isinf(den), 0.0, c / den)
    return values, den


def forward_map(rn: RiskNeutralParams, t: float, w):
    """Price f_t(w) for Brownian value(s) w; strictly increasing in w.

    Raises ExplosionRegion when the denominator is at or below tolerance
    (beyond the map's asymptote).
    """
    values, den = _forward_raw(rn, t, w)
    _, b, _ = _map_coefficients(rn, t)
    den_tol = DEN_TOL_FACTOR * b
    w = np.asarray(w, dtype=float)
    if np.any(den <= den_tol * np.exp(-rn.sigma * w)):
        raise ExplosionRegion(f"denominator at or below tolerance for t={t}")
    return float(values) if values.ndim == 0 else values


def _explosion_w(rn: RiskNeutralParams, t: float, den_level: float) -> float | None:
    """w at which a + b*exp(-sigma*w) equals den_level (None if never)."""
    a, b, _ = _map_coefficients(rn, t)
    if a >= den_level:
        return None
    return -math.log((den_level - a) / b) / rn.sigma


def inverse_map(rn: RiskNeutralParams, t: float, x: float) -> float:
    """Brownian value w with f_t(w) = x, to relative residual 1e-12.

    Monotone bracketing and Brent root-finding on ``forward_map``, followed
    by Newton polish with the analytic derivative.  Raises OutOfRange for x
    outside the range of f_t (including beyond the explosion asymptote).
    """
    if x <= 0 or not math.isfinite(x):
        raise OutOfRange(f"x must be a finite positive price, got {x}")
    a, b, c = _map_coefficients(rn, t)
    sigma = rn.sigma
    den_tol = DEN_TOL_FACTOR * b

    if a > 0 and x >= c / a:
        raise OutOfRange(f"x={x} at or above the map's supremum {c / a}")
    if a < 0:
        w_hi = _explosion_w(rn, t, den_tol)
        f_hi = c / den_tol
        if x >= f_hi:
            raise OutOfRange(f"x={x} beyond the explosion asymptote (f <= {f_hi:.6g})")
    else:
        # expand upward from a GBM-style guess
        w_hi = (math.log(x / rn.s0) - rn.gamma * t) / sigma + 1.0
        step = 1.0
        while _forward_raw(rn, t, w_hi)[0] < x:
            step *= 2.0
            w_hi += step

    w_lo = min((math.log(x / rn.s0) - rn.gamma * t) / sigma, w_hi) - 1.0
    step = 1.0
    while _forward_raw(rn, t, w_lo)[0] >= x:
        step *= 2.0
        w_lo -= step

    w = optimize.brentq(lambda v: _forward_raw(rn, t, v)[0] - x, w_lo, w_hi,
                        xtol=1e-14, rtol=8.9e-16, maxiter=200)
    # Newton polish: f'(w) = sigma*b*c*u / (a*u + b)^2 with u = exp(sigma*w)
    for _ in range(3):
        f, den = _forward_raw(rn, t, w)
        resid = float(f) - x
        if abs(resid) <= 1e-12 * x:
            break
        deriv = sigma * b * c * math.exp(-sigma * w) / float(den) ** 2
        if deriv <= 0 or not math.isfinite(deriv):
            break
        w -= resid / deriv
    return float(w)


def literal_inverse_map(rn: RiskNeutralParams, t: float, x: float) -> float:
    """The literal closed-form inverse, kept only for cross-checking.

    w = ln[ ((delta-1)e^{gamma t} - delta) * c1 * x / sigma ] / sigma
        - gamma * t / sigma

    Its logarithm argument is non-positive for admissible inputs (e.g. near
    t = 0 when r > sigma^2/2), in which case NaN is returned.  Where defined
    it generally disagrees with :func:`inverse_map`; use
    :func:`compare_inverse_forms` to tabulate the discrepancy.
    """
    if rn.sigma == 0:
        raise SigmaZeroUnsupported("solution map requires sigma > 0")
    delta, gamma, sigma = rn.delta, rn.gamma, rn.sigma
    arg = ((delta - 1.0) * math.exp(gamma * t) - delta) * rn.c1 * x / sigma
    if arg <= 0:
        return math.nan
    return math.log(arg) / sigma - gamma * t / sigma


def compare_inverse_forms(rn: RiskNeutralParams, t: float, xs) -> list[dict]:
    """Cross-evaluate the numeric and literal inverse at each price in xs."""
    rows = []
    for x in np.asarray(xs, dtype=float):
        numeric = inverse_map(rn, t, float(x))
        literal = literal_inverse_map(rn, t, float(x))
        rows.append({"x": float(x), "numeric": numeric, "literal": literal,
                     "abs_diff": abs(numeric - literal) if math.isfinite(literal)
                     else math.inf})
    return rows


# --------------------------------------------------------------------------
# Pricers
# --------------------------------------------------------------------------

def _intrinsic_quote(x: float, strike: float, method: str) -> OptionQuote:
    return OptionQuote(price=max(x - strike, 0.0), method=method,
                       error_estimate=0.0, diagnostics={"intrinsic": True})


def price_formula(rn: RiskNeutralParams, opt: OptionSpec, tol: float = 1e-10) -> OptionQuote:
    """Explicit-formula price by adaptive quadrature.

    The integral E[f_T(w_t + z*sqrt(T-t)) 1_{z > d}] is truncated at
    max(d, 0) + 12 standard deviations, or earlier where f_T approaches its
    explosion asymptote (denominator margin ``_QUAD_DEN_MARGIN``); the
    leftover logarithmic tail mass is bounded analytically and reported in
    the diagnostics.
    """
    tau = opt.maturity - opt.t
    x = rn.s0
    if tau == 0:
        return _intrinsic_quote(x, opt.strike, "formula")
    sqrt_tau = math.sqrt(tau)

    w_t = inverse_map(rn, opt.t, x)
    if opt.strike == 0:
        d = -math.inf
        w_K = -math.inf
        z_lo = -12.0
    else:
        w_K = inverse_map(rn, opt.maturity, opt.strike)
        d = (w_K - w_t) / sqrt_tau
        z_lo = d

    a, b, c = _map_coefficients(rn, opt.maturity)
    z_hi = max(d if math.isfinite(d) else 0.0, 0.0) + 12.0
    tail_bound = 0.0
    if a < 0:
        w_star = _explosion_w(rn, opt.maturity, 0.0)
        w_cut = _explosion_w(rn, opt.maturity, _QUAD_DEN_MARGIN * b)
        w_dentol = _explosion_w(rn, opt.maturity, DEN_TOL_FACTOR * b)
        z_cut = (w_cut - w_t) / sqrt_tau
        if z_cut < z_hi:
            z_hi = z_cut
            # f ~ c / (sigma*|a|*(w* - w)) near the asymptote; bound the cut
            # logarithmic tail mass by its value at the cut point
            phi_cut = math.exp(-0.5 * z_cut ** 2) / math.sqrt(2.0 * math.pi)
            tail_bound = (phi_cut / sqrt_tau * c / (rn.sigma * abs(a))
                          * math.log((w_star - w_cut) / (w_star - w_dentol)))
    if z_hi <= z_lo:
        raise OutOfRange("strike beyond the quadrature domain of f_T")

    def integrand(z):
        f, _ = _forward_raw(rn, opt.maturity, w_t + z * sqrt_tau)
        return float(f) * math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)

    integral, quad_err, info = integrate.quad(
        integrand, z_lo, z_hi, epsabs=tol, epsrel=0.0, limit=200, full_output=1)[:3]

    disc = math.exp(-rn.r * tau)
    n_d = norm_cdf(d) if math.isfinite(d) else 0.0
    price = disc * integral - opt.strike * disc * (1.0 - n_d)
    return OptionQuote(
        price=max(price, 0.0), method="formula", error_estimate=tol,
        diagnostics={"d": d, "fT_inv_K": w_K, "ft_inv_x": w_t,
                     "nodes_or_paths": int(info["neval"]),
                     "quad_abserr": float(quad_err),
                     "z_cut": z_hi, "truncation_bound": tail_bound,
                     "exploded_fraction": 0.0})


def price_mc(rn: RiskNeutralParams, opt: OptionSpec, n_paths: int, steps: int,
             seed: int) -> OptionQuote:
    """Risk-neutral Monte Carlo price via the Euler scheme.

    Discounted mean call payoff over ``n_paths`` terminal values; the error
    estimate is the Monte Carlo standard error.  Paths frozen by the
    overflow guard contribute their truncated values, with the exploded
    fraction reported in the diagnostics.
    """
    tau = opt.maturity - opt.t
    if tau == 0:
        return _intrinsic_quote(rn.s0, opt.strike, "monte_carlo")
    disc = math.exp(-rn.r * tau)
    if rn.sigma == 0 and rn.c1 == 0:
        payoff = max(rn.s0 * math.exp(rn.r * tau) - opt.strike, 0.0)
        return OptionQuote(price=disc * payoff, method="monte_carlo",
                           error_estimate=0.0,
                           diagnostics={"nodes_or_paths": n_paths,
                                        "deterministic": True,
                                        "exploded_fraction": 0.0})
    params = ModelParams(mu=rn.r, sigma=rn.sigma, c1=rn.c1, s0=rn.s0)
    terminal, exploded_fraction = euler_terminal(params, tau, steps, n_paths, seed)
    payoffs = np.maximum(terminal - opt.strike, 0.0)
    mean = float(payoffs.mean())
    se = float(payoffs.std(ddof=1) / math.sqrt(n_paths))
    return OptionQuote(price=disc * mean, method="monte_carlo",
                       error_estimate=disc * se,
                       diagnostics={"nodes_or_paths": n_paths, "steps": steps,
                                    "seed": seed,
                                    "exploded_fraction": exploded_fraction})


def price_bs(s: float, strike: float, tau: float, r: float, sigma: float) -> OptionQuote:
    """Black-Scholes European call price."""
    if s <= 0:
        raise NonPositiveSpot(f"s must be > 0, got {s}")
    if sigma <= 0 or tau <= 0:
        raise NegativeCoefficient("sigma and tau must be > 0")
    if strike == 0:
        return OptionQuote(price=s, method="black_scholes", error_estimate=0.0,
                           diagnostics={"d1": math.inf, "d2": math.inf})
    sqrt_tau = math.sqrt(tau)
    d1 = (math.log(s / strike) + (r + 0.5 * sigma ** 2) * tau) / (sigma * sqrt_tau)
    d2 = d1 - sigma * sqrt_tau
    price = s * norm_cdf(d1) - strike * math.exp(-r * tau) * norm_cdf(d2)
    return OptionQuote(price=max(price, 0.0), method="black_scholes",
                       error_estimate=0.0, diagnostics={"d1": d1, "d2": d2})


def bs_delta(s: float, strike: float, tau: float, r: float, sigma: float) -> float:
    """Analytic Black-Scholes call delta N(d1)."""
    d1 = (math.log(s / strike) + (r + 0.5 * sigma ** 2) * tau) / (sigma * math.sqrt(tau))
    return norm_cdf(d1)


def greeks_bump(pricer, rn: RiskNeutralParams, opt: OptionSpec,
                ds: float | None = None, dsig: float | None = None,
                **pricer_kwargs) -> dict:
    """Central-finite-difference delta, gamma (spot) and vega (sigma).

    ``pricer(rn, opt, **pricer_kwargs) -> OptionQuote``; pass price_mc with a
    fixed seed to get common random numbers across bumps.
    """
    if ds is None:
        ds = 1e-3 * rn.s0
    if dsig is None:
        dsig = 1e-3 * max(rn.sigma, 0.1)

    def reprice(**over):
        fields = {"sigma": rn.sigma, "c1": rn.c1, "s0": rn.s0, "r": rn.r}
        fields.update(over)
        return pricer(RiskNeutralParams(**fields), opt, **pricer_kwargs).price

    p0 = reprice()
    p_up, p_dn = reprice(s0=rn.s0 + ds), reprice(s0=rn.s0 - ds)
    v_up, v_dn = reprice(sigma=rn.sigma + dsig), reprice(sigma=rn.sigma - dsig)
    return {
        "delta": (p_up - p_dn) / (2.0 * ds),
        "gamma": (p_up - 2.0 * p0 + p_dn) / ds ** 2,
        "vega": (v_up - v_dn) / (2.0 * dsig),
        "ds": ds, "dsig": dsig,
    }
