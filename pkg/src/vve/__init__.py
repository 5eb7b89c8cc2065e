"""Variable-volatility-elasticity (VVE) asset-price model.

The price process follows dS_t = S_t [mu dt + (sigma + c1 S_t) dB_t], so
volatility is an affine, increasing function of price (the positive
price-volatility coupling seen in commodity markets).  The package provides
path simulation, calibration of (sigma, c1) from close-price series, and
European call pricing with independent Monte Carlo and Black-Scholes checks.
"""

from .calibration import (
    CalibrationResult,
    MarketSeries,
    RegressionReport,
    VolSeries,
    calibrate_vve,
    estimate_drift,
    log_returns,
    ols_fit,
    rolling_hv,
)
from .io import ensemble_summary, ensemble_to_csv, ingest_csv
from .model import (
    CevParams,
    ModelParams,
    cev_volatility,
    elasticity,
    elasticity_derivative,
    riskfree_value,
    validate_params,
    volatility,
)
from .pricing import (
    OptionQuote,
    OptionSpec,
    RiskNeutralParams,
    bs_delta,
    compare_inverse_forms,
    forward_map,
    greeks_bump,
    inverse_map,
    literal_inverse_map,
    price_bs,
    price_formula,
    price_mc,
)
from .sde import (
    BrownianPath,
    ConvergenceReport,
    ExactPath,
    PathEnsemble,
    TimeGrid,
    coarsen_brownian,
    exact_path,
    sample_brownian,
    simulate_euler,
    simulate_exact,
    simulate_milstein,
    strong_convergence,
)

__version__ = "0.1.0"
