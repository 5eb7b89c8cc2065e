"""Path simulation for the variable-volatility-elasticity SDE.

    dS_t = S_t [ mu dt + (sigma + c1 S_t) dB_t ]

Schemes: Euler-Maruyama and Milstein with full truncation at zero (the
diffusion vanishes at 0, so 0 is absorbing), plus the closed-form candidate
solution ``exact_path``.

Verification status of the closed form
--------------------------------------
For c1 = 0 the closed form reduces to the exact geometric-Brownian-motion
solution.  For c1 > 0 it does NOT satisfy the SDE: the Ito drift/diffusion
residuals are nonzero (checked symbolically), and the gap between the closed
form and refined Euler paths plateaus instead of vanishing as dt -> 0.  No
function of (t, B_t) alone can solve this SDE, so the defect is structural,
not a transcription issue.  The closed form is kept as stated for
cross-checking; use a refined Euler path as the convergence reference when
c1 > 0 (``strong_convergence(..., reference="refined")``).

Randomness
----------
Brownian increments are generated by the counter-based Philox generator.
Paths are grouped in fixed blocks of ``BLOCK_SIZE``; block ``b`` of seed
``s`` draws from ``Philox(key=[s, b])``, and path ``i`` owns row
``i % BLOCK_SIZE`` of its block's increment matrix.  Every path is therefore
a pure function of (seed, path_index, grid), independent of execution order,
chunking, or thread count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GammaNearZero, InvalidGrid, SigmaZeroUnsupported
from .model import GAMMA_TOL, ModelParams

BLOCK_SIZE = 4096

#: denominator threshold factor for flagging exploded closed-form paths
DEN_TOL_FACTOR = 1e-10


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on [0, horizon] with ``steps`` intervals."""

    horizon: float
    steps: int

    def __post_init__(self):
        if not (self.horizon > 0):
            raise InvalidGrid(f"horizon must be > 0, got {self.horizon}")
        if self.steps < 1:
            raise InvalidGrid(f"steps must be >= 1, got {self.steps}")

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.steps + 1)


@dataclass(frozen=True)
class BrownianPath:
    """One Brownian path on a grid: per-step increments and their partial sums."""

    grid: TimeGrid
    increments: np.ndarray

    @property
    def cumulative(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.increments)])


@dataclass
class PathEnsemble:
    """Matrix of simulated price paths with seed provenance.

    ``paths`` has shape (n_paths, steps + 1); column 0 is s0.  ``exploded``
    flags paths whose update left the finite range (the value is then frozen
    at the last finite state).
    """

    grid: TimeGrid
    paths: np.ndarray
    seed: int
    scheme: str
    exploded: np.ndarray = field(default=None)

    @property
    def n_paths(self) -> int:
        return self.paths.shape[0]

    @property
    def exploded_fraction(self) -> float:
        if self.exploded is None:
            return 0.0
        return float(np.mean(self.exploded))


@dataclass(frozen=True)
class ExactPath:
    """Closed-form path evaluation with explosion bookkeeping."""

    grid: TimeGrid
    values: np.ndarray
    exploded: bool
    explosion_index: int | None = None


@dataclass(frozen=True)
class ConvergenceReport:
    dt_levels: np.ndarray
    strong_errors: np.ndarray
    fitted_slope: float
    scheme: str
    reference: str


# --------------------------------------------------------------------------
# Brownian increments
# --------------------------------------------------------------------------

def _block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[int(seed), int(block)]))


def _block_increments(seed: int, block: int, rows: int, steps: int, dt: float) -> np.ndarray:
    """Increment matrix for the first ``rows`` paths of one block."""
    z = _block_generator(seed, block).standard_normal((rows, steps))
    return z * np.sqrt(dt)


def sample_brownian(grid: TimeGrid, seed: int, path_index: int) -> BrownianPath:
    """Brownian path for (seed, path_index): increments ~ Normal(0, dt) i.i.d.

    Deterministic: the same arguments always produce the identical path.
    """
    if path_index < 0:
        raise InvalidGrid(f"path_index must be >= 0, got {path_index}")
    block, row = divmod(int(path_index), BLOCK_SIZE)
    inc = _block_increments(seed, block, row + 1, grid.steps, grid.dt)[row]
    return BrownianPath(grid=grid, increments=inc)


def coarsen_brownian(bpath: BrownianPath, factor: int) -> BrownianPath:
    """Aggregate increments onto a ``factor``-times-coarser grid (exact sums)."""
    steps = bpath.grid.steps
    if factor < 1 or steps % factor != 0:
        raise InvalidGrid(f"factor {factor} does not divide {steps} steps")
    inc = bpath.increments.reshape(steps // factor, factor).sum(axis=1)
    grid = TimeGrid(bpath.grid.horizon, steps // factor)
    return BrownianPath(grid=grid, increments=inc)


# --------------------------------------------------------------------------
# Discretization schemes
# --------------------------------------------------------------------------

def _step_paths(params: ModelParams, dt: float, s0, db, milstein: bool):
    """Advance an array of states through all columns of ``db``.

    Returns (full path matrix including the initial column, exploded mask).
    """
    mu, sigma, c1 = params.mu, params.sigma, params.c1
    n, steps = db.shape
    out = np.empty((n, steps + 1))
    out[:, 0] = s0
    s = np.full(n, float(s0)) if np.isscalar(s0) else np.array(s0, dtype=float)
    exploded = np.zeros(n, dtype=bool)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            b = s * (sigma + c1 * s)
            s_new = s + mu * s * dt + b * db[:, k]
            if milstein:
                s_new += 0.5 * b * (sigma + 2.0 * c1 * s) * (db[:, k] ** 2 - dt)
            s_new = np.maximum(s_new, 0.0)
            bad = ~np.isfinite(s_new)
            if bad.any():
                s_new[bad] = s[bad]
                exploded |= bad
            s = s_new
            out[:, k + 1] = s
    return out, exploded


def _simulate(params: ModelParams, grid: TimeGrid, n_paths: int, seed: int,
              milstein: bool, scheme_name: str) -> PathEnsemble:
    if n_paths < 1:
        raise InvalidGrid(f"n_paths must be >= 1, got {n_paths}")
    paths = np.empty((n_paths, grid.steps + 1))
    exploded = np.zeros(n_paths, dtype=bool)
    for start in range(0, n_paths, BLOCK_SIZE):
        rows = min(BLOCK_SIZE, n_paths - start)
        db = _block_increments(seed, start // BLOCK_SIZE, rows, grid.steps, grid.dt)
        paths[start:start + rows], exploded[start:start + rows] = _step_paths(
            params, grid.dt, params.s0, db, milstein)
    return PathEnsemble(grid=grid, paths=paths, seed=seed, scheme=scheme_name,
                        exploded=exploded)


def simulate_euler(params: ModelParams, grid: TimeGrid, n_paths: int, seed: int) -> PathEnsemble:
    """Euler-Maruyama ensemble with full truncation at zero."""
    return _simulate(params, grid, n_paths, seed, milstein=False, scheme_name="euler")


def simulate_milstein(params: ModelParams, grid: TimeGrid, n_paths: int, seed: int) -> PathEnsemble:
    """Milstein ensemble: Euler plus 0.5*b*b'*(dB^2 - dt), full truncation at zero."""
    return _simulate(params, grid, n_paths, seed, milstein=True, scheme_name="milstein")


def euler_terminal(params: ModelParams, horizon: float, steps: int, n_paths: int,
                   seed: int) -> tuple[np.ndarray, float]:
    """Terminal Euler values without storing intermediate columns.

    Identical per-path values to ``simulate_euler(...).paths[:, -1]``; used by
    the Monte Carlo pricer where full path matrices would not fit in memory.
    Returns (terminal values, exploded fraction).
    """
    grid = TimeGrid(horizon, steps)
    mu, sigma, c1 = params.mu, params.sigma, params.c1
    dt = grid.dt
    terminal = np.empty(n_paths)
    n_exploded = 0
    for start in range(0, n_paths, BLOCK_SIZE):
        rows = min(BLOCK_SIZE, n_paths - start)
        db = _block_increments(seed, start // BLOCK_SIZE, rows, steps, dt)
        s = np.full(rows, params.s0)
        exploded = np.zeros(rows, dtype=bool)
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(steps):
                s_new = s + mu * s * dt + s * (sigma + c1 * s) * db[:, k]
                s_new = np.maximum(s_new, 0.0)
                bad = ~np.isfinite(s_new)
                if bad.any():
                    s_new[bad] = s[bad]
                    exploded |= bad
                s = s_new
        terminal[start:start + rows] = s
        n_exploded += int(exploded.sum())
    return terminal, n_exploded / n_paths


# --------------------------------------------------------------------------
# Closed-form candidate solution
# --------------------------------------------------------------------------

def exact_values(params: ModelParams, t, b):
    """Evaluate the closed-form candidate solution at times t, Brownian values b.

    S(t, B) = sigma*s0*E / [ (mu/g - 1)*c1*s0*E - (mu/g)*c1*s0*F + sigma + c1*s0 ]

    with E = exp(g*t + sigma*B), F = exp(sigma*B), g = mu - sigma^2/2.  Exact
    for c1 = 0 (geometric Brownian motion); see the module docstring for the
    c1 > 0 verification status.  Returns (values, denominator).
    """
    mu, sigma, c1, s0 = params.mu, params.sigma, params.c1, params.s0
    if sigma == 0:
        raise SigmaZeroUnsupported("closed form requires sigma > 0")
    gamma = mu - 0.5 * sigma ** 2
    if abs(gamma) < GAMMA_TOL:
        raise GammaNearZero(f"|mu - sigma^2/2| = {abs(gamma):.3e} < {GAMMA_TOL}")
    delta = mu / gamma
    t = np.asarray(t, dtype=float)
    b = np.asarray(b, dtype=float)
    big_e = np.exp(gamma * t + sigma * b)
    big_f = np.exp(sigma * b)
    den = (delta - 1.0) * c1 * s0 * big_e - delta * c1 * s0 * big_f + sigma + c1 * s0
    with np.errstate(divide="ignore", invalid="ignore"):
        values = sigma * s0 * big_e / den
    return values, den


def exact_path(params: ModelParams, bpath: BrownianPath) -> ExactPath:
    """Closed-form candidate path on the grid of ``bpath``.

    Paths whose denominator falls to or below ``DEN_TOL_FACTOR*(sigma+c1*s0)``
    are flagged exploded; values from the first crossing onward are NaN.
    """
    values, den = exact_values(params, bpath.grid.times, bpath.cumulative)
    values[0] = params.s0  # t=0, B=0 reduces algebraically to s0
    den_tol = DEN_TOL_FACTOR * (params.sigma + params.c1 * params.s0)
    bad = den <= den_tol
    if bad.any():
        first = int(np.argmax(bad))
        values = values.copy()
        values[first:] = np.nan
        return ExactPath(grid=bpath.grid, values=values, exploded=True,
                         explosion_index=first)
    return ExactPath(grid=bpath.grid, values=values, exploded=False)


def simulate_exact(params: ModelParams, grid: TimeGrid, n_paths: int, seed: int) -> PathEnsemble:
    """Ensemble of closed-form candidate paths (see the module docstring).

    Exploded paths carry NaN from the first denominator crossing onward and
    are flagged in ``exploded``.
    """
    if n_paths < 1:
        raise InvalidGrid(f"n_paths must be >= 1, got {n_paths}")
    den_tol = DEN_TOL_FACTOR * (params.sigma + params.c1 * params.s0)
    paths = np.empty((n_paths, grid.steps + 1))
    exploded = np.zeros(n_paths, dtype=bool)
    for start in range(0, n_paths, BLOCK_SIZE):
        rows = min(BLOCK_SIZE, n_paths - start)
        db = _block_increments(seed, start // BLOCK_SIZE, rows, grid.steps, grid.dt)
        b = np.concatenate([np.zeros((rows, 1)), np.cumsum(db, axis=1)], axis=1)
        values, den = exact_values(params, grid.times[None, :], b)
        values[:, 0] = params.s0  # t=0, B=0 reduces algebraically to s0
        bad = den <= den_tol
        hit = bad.any(axis=1)
        if hit.any():
            first = np.argmax(bad, axis=1)
            col = np.arange(grid.steps + 1)[None, :]
            values = np.where(hit[:, None] & (col >= first[:, None]), np.nan, values)
        paths[start:start + rows] = values
        exploded[start:start + rows] = hit
    return PathEnsemble(grid=grid, paths=paths, seed=seed, scheme="exact",
                        exploded=exploded)


# --------------------------------------------------------------------------
# Strong convergence measurement
# --------------------------------------------------------------------------

def _validate_dt_levels(horizon: float, dt_levels) -> list[int]:
    """Check dyadic refinement structure; return steps per level, coarse to fine."""
    dts = np.asarray(dt_levels, dtype=float)
    if len(dts) < 2 or np.any(np.diff(dts) >= 0):
        raise InvalidGrid("dt_levels must be strictly decreasing with >= 2 entries")
    steps = []
    for dt in dts:
        n = horizon / dt
        if abs(n - round(n)) > 1e-9:
            raise InvalidGrid(f"dt={dt} does not divide horizon={horizon}")
        steps.append(int(round(n)))
    finest = steps[-1]
    for n in steps:
        if finest % n != 0:
            raise InvalidGrid("dt_levels must be dyadic refinements of a common grid")
    return steps


def strong_convergence(params: ModelParams, horizon: float, dt_levels, n_paths: int,
                       seed: int, scheme: str = "euler",
                       reference: str = "auto", refine_factor: int = 8) -> ConvergenceReport:
    """Mean absolute terminal error of a scheme against a pathwise reference.

    All levels share Brownian increments: coarse increments are exact sums of
    the finest-level ones.  ``reference``:

    * ``"exact"``   — closed-form value at (horizon, B_T); valid for c1 = 0.
    * ``"refined"`` — Euler on a grid ``refine_factor`` x finer than the
      finest level (the reference when c1 > 0).
    * ``"auto"``    — "exact" if c1 == 0 else "refined".

    Fitted slope is the least-squares slope of log2(error) vs log2(dt).
    """
    if scheme not in ("euler", "milstein"):
        raise InvalidGrid(f"unknown scheme {scheme!r}")
    if reference == "auto":
        reference = "exact" if params.c1 == 0 else "refined"
    if reference not in ("exact", "refined"):
        raise InvalidGrid(f"unknown reference {reference!r}")

    level_steps = _validate_dt_levels(horizon, dt_levels)
    finest = level_steps[-1]
    gen_steps = finest * refine_factor if reference == "refined" else finest
    gen_dt = horizon / gen_steps

    milstein = scheme == "milstein"
    errors = np.zeros(len(level_steps))
    count = 0
    for start in range(0, n_paths, BLOCK_SIZE):
        rows = min(BLOCK_SIZE, n_paths - start)
        db = _block_increments(seed, start // BLOCK_SIZE, rows, gen_steps, gen_dt)
        b_T = db.sum(axis=1)
        if reference == "exact":
            ref, _ = exact_values(params, horizon, b_T)
        else:
            ref = _step_paths(params, gen_dt, params.s0, db, milstein=False)[0][:, -1]
        for i, n in enumerate(level_steps):
            db_level = db.reshape(rows, n, gen_steps // n).sum(axis=2)
            term = _step_paths(params, horizon / n, params.s0, db_level, milstein)[0][:, -1]
            errors[i] += np.abs(term - ref).sum()
        count += rows
    errors /= count

    log_dt = np.log2(horizon / np.asarray(level_steps, dtype=float))
    slope = float(np.polyfit(log_dt, np.log2(errors), 1)[0])
    return ConvergenceReport(
        dt_levels=horizon / np.asarray(level_steps, dtype=float),
        strong_errors=errors, fitted_slope=slope, scheme=scheme, reference=reference)
