"""Bound-constrained generalized pattern search.

Variables are mapped affinely onto the unit box. Each iteration polls the
``2 d`` coordinate points ``x +/- mesh * e_i`` (clipped to the box); the mesh
expands after a successful poll and contracts after a failed one.
"""
from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchConfig:
    p_min: tuple
    p_max: tuple
    mesh_init: float = 0.25
    expand: float = 2.0
    contract: float = 0.5
    tol: float = 1e-4
    max_iter: int = 2000
    max_evals: int | None = None
    budget_seconds: float | None = None
    seed: int | None = 0
    x0: tuple | None = None
    parallel_poll: bool = False
    max_workers: int | None = None

    def __post_init__(self):
        lo = np.asarray(self.p_min, dtype=float)
        hi = np.asarray(self.p_max, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("p_min and p_max must be 1-d and of equal length")
        if not np.all(lo < hi):
            bad = np.flatnonzero(~(lo < hi)).tolist()
            raise ValueError(f"p_min must be strictly below p_max (components {bad})")
        if not 0 < self.contract < 1 < self.expand:
            raise ValueError("need 0 < contract < 1 < expand")
        if self.tol <= 0 or self.mesh_init <= 0:
            raise ValueError("tol and mesh_init must be positive")
        if self.max_iter < 0:
            raise ValueError("max_iter must be non-negative")
        if self.x0 is not None:
            x0 = np.asarray(self.x0, dtype=float)
            if x0.shape != lo.shape or np.any(x0 < lo) or np.any(x0 > hi):
                raise ValueError("x0 must lie inside [p_min, p_max]")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    x: np.ndarray
    fun: float
    mesh: float
    nfev: int


@dataclass
class SearchResult:
    x: np.ndarray
    fun: float
    status: str
    nfev: int
    nit: int
    trace: list = field(default_factory=list, repr=False)


def _workers(config):
    if config.max_workers:
        return config.max_workers
    env = os.environ.get("FIREFRONT_THREADS")
    return max(1, int(env)) if env else min(16, os.cpu_count() or 1)


def minimize(objective, config):
    """Minimize ``objective`` over the box ``[p_min, p_max]``.

    Non-finite objective values count as ``+inf``. Stops with status
    ``mesh_tol`` (mesh below ``tol``), ``step_tol`` (step and decrease both
    below ``tol``), ``max_iter``, ``max_evals`` or ``budget``.
    """
    lo = np.asarray(config.p_min, dtype=float)
    hi = np.asarray(config.p_max, dtype=float)
    span = hi - lo
    d = lo.size
    start = time.monotonic()
    cache = {}
    nfev = 0

    def to_x(u):
        return lo + u * span

    def evaluate(u):
        nonlocal nfev
        key = tuple(np.round(u, 12))
        if key not in cache:
            nfev += 1
            val = float(objective(to_x(u)))
            cache[key] = val if math.isfinite(val) else math.inf
        return cache[key]

    def out_of_budget():
        if config.max_evals is not None and nfev >= config.max_evals:
            return "max_evals"
        if config.budget_seconds is not None and time.monotonic() - start >= config.budget_seconds:
            return "budget"
        return None

    if config.x0 is not None:
        u = (np.asarray(config.x0, dtype=float) - lo) / span
    else:
        u = np.random.default_rng(config.seed).uniform(size=d)
    f = evaluate(u)
    mesh = config.mesh_init
    trace = [TraceRecord(0, to_x(u), f, mesh, nfev)]
    pool = ThreadPoolExecutor(_workers(config)) if config.parallel_poll else None
    status = "max_iter"
    it = 0
    try:
        while it < config.max_iter:
            if mesh < config.tol:
                status = "mesh_tol"
                break
            stop = out_of_budget()
            if stop:
                status = stop
                break
            it += 1
            polls = []
            for i in range(d):
                for sign in (1.0, -1.0):
                    v = u.copy()
                    v[i] = min(1.0, max(0.0, v[i] + sign * mesh))
                    if v[i] != u[i]:
                        polls.append(v)

            best = None
            exhausted = None
            if pool is not None:
                fresh = [v for v in polls if tuple(np.round(v, 12)) not in cache]
                if config.max_evals is not None and len(fresh) > config.max_evals - nfev:
                    fresh = fresh[:max(0, config.max_evals - nfev)]
                    exhausted = "max_evals"
                # objective values land in the cache; bookkeeping stays on this thread
                for v, val in zip(fresh, pool.map(objective, [to_x(v) for v in fresh])):
                    nfev += 1
                    val = float(val)
                    cache[tuple(np.round(v, 12))] = val if math.isfinite(val) else math.inf
                scored = [(cache[k], n, v) for n, v in enumerate(polls)
                          if (k := tuple(np.round(v, 12))) in cache]
                improving = [s for s in scored if s[0] < f]
                if improving:
                    best = min(improving, key=lambda s: (s[0], s[1]))
            else:
                for n, v in enumerate(polls):
                    exhausted = out_of_budget()
                    if exhausted:
                        break
                    val = evaluate(v)
                    if val < f:
                        best = (val, n, v)
                        break

            if best is not None:
                f_new, _, u_new = best
                step = float(np.linalg.norm(u_new - u))
                drop = f - f_new
                u, f = u_new, f_new
                mesh = min(mesh * config.expand, 1.0)
                trace.append(TraceRecord(it, to_x(u), f, mesh, nfev))
                if step < config.tol and drop < config.tol:
                    status = "step_tol"
                    break
            elif exhausted:
                status = exhausted
                break
            else:
                mesh *= config.contract
                trace.append(TraceRecord(it, to_x(u), f, mesh, nfev))
            logger.debug("iter %d f=%g mesh=%g nfev=%d", it, f, mesh, nfev)
    finally:
        if pool is not None:
            pool.shutdown()
    return SearchResult(to_x(u), f, status, nfev, it, trace)
