"""Closed-loop parameter estimation: propose p, simulate, score, update."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .metrics import cost_J, metric_report
from .patternsearch import SearchConfig, minimize
from .solver import FrontSeries, NumericalError, SolverConfig, simulate
from .spread import ParamVector

logger = logging.getLogger(__name__)

# beta bounds ordered low-to-high; the published ordering has them swapped
DEFAULT_P_MIN = (2.0, 0.1, 0.1, 0.1, 0.1, 0.01, 0.001, 0.001)
DEFAULT_P_MAX = (4.0, 3.0, 3.0, 3.0, 3.0, 1.0, 0.12, 0.12)


def generate_synthetic_measurements(scenario, p_star, solver=None):
    """Simulate with known parameters and keep only the burnt masks."""
    sim = simulate(scenario, p_star, solver)
    return FrontSeries.from_masks(sim.grid, sim.times, sim.burnt())


def _solver_for(scenario, measured, solver):
    solver = solver or SolverConfig()
    allowed = np.asarray(scenario.times if solver.snapshot_times is None
                         else [scenario.t0, *solver.snapshot_times])
    for t in measured.times:
        if not np.any(np.abs(allowed - t) <= 1e-9):
            raise ValueError(f"measured snapshot t={t} is not a solver snapshot time")
    wanted = tuple(float(t) for t in measured.times if t > scenario.t0 + 1e-12)
    if not wanted:
        raise ValueError("measured series has no snapshot after t0")
    return SolverConfig(solver.cfl, wanted, solver.reinit_period)


class CostObjective:
    """``J(p)`` for fixed scenario and measurements; failed runs score ``inf``."""

    def __init__(self, scenario, measured, solver=None):
        if measured.grid != scenario.grid:
            raise ValueError("measured fronts and scenario use different grids")
        self.scenario = scenario
        self.measured = measured
        self.solver = _solver_for(scenario, measured, solver)

    def __call__(self, x):
        try:
            p = ParamVector.from_array(x)
            return float(cost_J(simulate(self.scenario, p, self.solver), self.measured))
        except (NumericalError, ValueError) as exc:
            logger.warning("objective failed at %s: %s", np.round(x, 6).tolist(), exc)
            return math.inf


@dataclass
class EstimationReport:
    p_hat: ParamVector
    J: int
    N: int
    r: float
    e: float | None
    snapshots: list
    status: str
    nfev: int
    nit: int
    seconds: float
    trace: list = field(default_factory=list, repr=False)

    def to_dict(self):
        return {
            "p_hat": dict(zip(ParamVector.names(), self.p_hat.to_array().tolist())),
            "J": self.J, "N": self.N, "r": self.r, "e": self.e,
            "snapshots": [asdict(s) for s in self.snapshots],
            "status": self.status, "nfev": self.nfev, "nit": self.nit,
            "seconds": self.seconds,
        }


def estimate(scenario, measured, config, solver=None, p_star=None):
    """Fit the eight spread parameters to measured fronts by pattern search.

    ``J`` in the report comes from a fresh simulation at ``p_hat`` and must
    agree with the optimizer's best value.
    """
    objective = CostObjective(scenario, measured, solver)
    start = time.monotonic()
    result = minimize(objective, config)
    seconds = time.monotonic() - start
    p_hat = ParamVector.from_array(result.x)
    sim = simulate(scenario, p_hat, objective.solver)
    metrics = metric_report(sim, measured, p_hat, p_star)
    if math.isfinite(result.fun) and metrics.J != result.fun:
        raise RuntimeError(f"recomputed cost {metrics.J} differs from search value {result.fun}")
    logger.info("estimate: J=%d r=%.4g status=%s nfev=%d in %.1fs",
                metrics.J, metrics.r, result.status, result.nfev, seconds)
    return EstimationReport(p_hat, metrics.J, metrics.N, metrics.r, metrics.e,
                            metrics.snapshots, result.status, result.nfev, result.nit,
                            seconds, result.trace)


def forecast(scenario, p, start_front, horizon, *, t_start=None, step=None, times=None,
             solver=None):
    """Simulate forward from a burnt mask.

    Snapshots are taken at ``times`` if given, otherwise every ``step`` up to
    ``t_start + horizon`` (a single snapshot at the horizon by default).
    """
    t_start = scenario.t0 if t_start is None else float(t_start)
    if times is None:
        if horizon < 0:
            raise ValueError("horizon must be non-negative")
        if horizon == 0:
            times = []
        else:
            step = horizon if step is None else step
            k = max(1, round(horizon / step))
            times = [round(t_start + i * step, 12) for i in range(1, k + 1)]
    times = [float(t) for t in times if t > t_start + 1e-12]
    mask = np.asarray(start_front, dtype=bool)
    if not times:
        start = scenario.restart(mask, t_start, [t_start + 1.0])
        return FrontSeries(scenario.grid, [t_start], start.phi0[None])
    restarted = scenario.restart(mask, t_start, times)
    cfl = (solver or SolverConfig()).cfl
    return simulate(restarted, p, SolverConfig(cfl=cfl, reinit_period=getattr(solver, "reinit_period", None)))


class FireSpreadEstimator(BaseEstimator):
    """Estimate spread parameters from observed fronts, scikit-learn style.

    ``fit`` takes a measured :class:`FrontSeries`; ``predict`` simulates the
    fitted model at the requested snapshot times; ``score`` is the fraction
    of cells (over all snapshots after t0) whose burnt state agrees.
    """

    def __init__(self, scenario=None, p_min=DEFAULT_P_MIN, p_max=DEFAULT_P_MAX,
                 mesh_init=0.25, expand=2.0, contract=0.5, tol=1e-4, max_iter=2000,
                 max_evals=None, budget_seconds=None, random_state=0, x0=None,
                 parallel_poll=False, cfl=0.5, reinit_period=None):
        self.scenario = scenario
        self.p_min = p_min
        self.p_max = p_max
        self.mesh_init = mesh_init
        self.expand = expand
        self.contract = contract
        self.tol = tol
        self.max_iter = max_iter
        self.max_evals = max_evals
        self.budget_seconds = budget_seconds
        self.random_state = random_state
        self.x0 = x0
        self.parallel_poll = parallel_poll
        self.cfl = cfl
        self.reinit_period = reinit_period

    def _search_config(self):
        x0 = self.x0
        if isinstance(x0, ParamVector):
            x0 = x0.to_array()
        return SearchConfig(tuple(self.p_min), tuple(self.p_max), self.mesh_init, self.expand,
                            self.contract, self.tol, self.max_iter, self.max_evals,
                            self.budget_seconds, self.random_state,
                            None if x0 is None else tuple(np.asarray(x0, dtype=float)),
                            self.parallel_poll)

    def _solver_config(self):
        return SolverConfig(cfl=self.cfl, reinit_period=self.reinit_period)

    def _check_series(self, X):
        if self.scenario is None:
            raise ValueError("FireSpreadEstimator needs a scenario")
        if not isinstance(X, FrontSeries):
            raise TypeError(f"expected a FrontSeries, got {type(X).__name__}")
        if X.grid != self.scenario.grid:
            raise ValueError("fronts and scenario use different grids")
        return X

    def fit(self, X, y=None, p_star=None):
        X = self._check_series(X)
        report = estimate(self.scenario, X, self._search_config(), self._solver_config(), p_star)
        self.params_ = report.p_hat
        self.cost_ = report.J
        self.n_iter_ = report.nit
        self.report_ = report
        return self

    def predict(self, X=None):
        check_is_fitted(self, "params_")
        if X is None:
            times = self.scenario.times
        elif isinstance(X, FrontSeries):
            times = X.times
        else:
            times = np.atleast_1d(np.asarray(X, dtype=float))
        snaps = tuple(float(t) for t in times if t > self.scenario.t0 + 1e-12)
        config = SolverConfig(self.cfl, snaps or None, self.reinit_period)
        return simulate(self.scenario, self.params_, config)

    def score(self, X, y=None):
        X = self._check_series(X)
        sim = self.predict(X)
        J = cost_J(sim, X)
        n_snap = int(np.sum(X.times > self.scenario.t0 + 1e-12))
        return 1.0 - J / (X.grid.size * max(n_snap, 1))
