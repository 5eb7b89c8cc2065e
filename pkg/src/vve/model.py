"""Core model parameters and the pure volatility/elasticity primitives.

The asset price follows

    dS_t = S_t [ mu dt + (sigma + c1 S_t) dB_t ]

so its volatility level is the affine function ``sigma + c1 * s`` and its
volatility elasticity is ``c1 * s / (sigma + c1 * s)``.  Setting c1 = 0
recovers geometric Brownian motion (constant volatility, zero elasticity);
setting sigma = 0 recovers the quadratic-diffusion model with elasticity
identically 1.  All rates and volatilities are annualized; time is in years.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDiffusion,
    InvalidCevParams,
    NegativeCoefficient,
    NegativePrice,
    NegativeTime,
    NonPositivePrice,
    NonPositiveSpot,
)

# Tolerance for the mu = sigma^2/2 singularity in the closed-form solution map.
GAMMA_TOL = 1e-8


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the variable-volatility-elasticity price process.

    Attributes
    ----------
    mu : float
        Instantaneous expected return, per year.
    sigma : float
        Base volatility level, per sqrt(year).
    c1 : float
        Volatility-per-price coefficient, per price unit per sqrt(year).
    s0 : float
        Initial price, > 0.
    """

    mu: float
    sigma: float
    c1: float
    s0: float

    def __post_init__(self):
        _check(self.mu, self.sigma, self.c1, self.s0)


def _check(mu, sigma, c1, s0):
    if not np.isfinite([mu, sigma, c1, s0]).all():
        raise NegativeCoefficient("parameters must be finite numbers")
    if s0 <= 0:
        raise NonPositiveSpot(f"s0 must be > 0, got {s0}")
    if sigma < 0 or c1 < 0:
        raise NegativeCoefficient(f"sigma and c1 must be >= 0, got sigma={sigma}, c1={c1}")
    if sigma == 0 and c1 == 0:
        raise DegenerateDiffusion("sigma = c1 = 0 leaves a risk-free asset, not a risk asset")


def validate_params(mu: float, sigma: float, c1: float, s0: float) -> ModelParams:
    """Validate raw numeric inputs and build a ModelParams.

    Raises NonPositiveSpot, NegativeCoefficient, or DegenerateDiffusion on
    invalid input; never constructs an invalid instance.
    """
    return ModelParams(float(mu), float(sigma), float(c1), float(s0))


@dataclass(frozen=True)
class CevParams:
    """Constant-elasticity-of-variance comparison model: vol(s) = sigma * s**(beta/2 - 1)."""

    sigma: float
    beta: float

    def __post_init__(self):
        if not (self.sigma > 0):
            raise InvalidCevParams(f"sigma must be > 0, got {self.sigma}")
        if not (0 < self.beta <= 2):
            raise InvalidCevParams(f"beta must lie in (0, 2], got {self.beta}")


def volatility(params: ModelParams, s):
    """Volatility level sigma + c1 * s.  Accepts scalar or array s >= 0."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise NegativePrice("price must be >= 0")
    out = params.sigma + params.c1 * s
    return float(out) if out.ndim == 0 else out


def elasticity(params: ModelParams, s):
    """Volatility elasticity c1*s / (sigma + c1*s), in [0, 1].

    Equals 0 identically when c1 = 0 and 1 identically when sigma = 0.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise NegativePrice("price must be >= 0")
    num = params.c1 * s
    den = params.sigma + num
    if np.any(den <= 0):
        raise NegativePrice("sigma + c1*s must be > 0")
    out = num / den
    return float(out) if out.ndim == 0 else out


def elasticity_derivative(params: ModelParams, s):
    """d/ds of the elasticity: c1*sigma / (sigma + c1*s)**2."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise NegativePrice("price must be >= 0")
    out = params.c1 * params.sigma / (params.sigma + params.c1 * s) ** 2
    return float(out) if out.ndim == 0 else out


def cev_volatility(params: CevParams, s):
    """CEV volatility sigma * s**(beta/2 - 1); requires s > 0."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise NonPositivePrice("CEV volatility requires s > 0")
    out = params.sigma * s ** (params.beta / 2.0 - 1.0)
    return float(out) if out.ndim == 0 else out


def riskfree_value(b0: float, r: float, t: float) -> float:
    """Value of the risk-free accumulator: b0 * exp(r * t)."""
    if t < 0:
        raise NegativeTime(f"t must be >= 0, got {t}")
    return b0 * math.exp(r * t)
