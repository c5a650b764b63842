"""Agreement between simulated and measured fronts.

Burnt areas are cell counts of ``phi >= 0``; ``A`` is the measured burnt
set, ``B`` the simulated one.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np


def _matched(simulated, measured, include_t0):
    if simulated.grid != measured.grid:
        raise ValueError("simulated and measured fronts live on different grids")
    times = measured.times
    if not include_t0:
        times = times[np.abs(times - simulated.times[0]) > 1e-9]
    try:
        sim = simulated.at_times(times)
    except KeyError as exc:
        raise ValueError(f"measured snapshot times not simulated: {exc.args[0]}") from None
    return sim, measured.at_times(times)


def snapshot_mismatch(simulated, measured, include_t0=False):
    """Per-snapshot count of cells whose burnt state differs."""
    sim, meas = _matched(simulated, measured, include_t0)
    return sim.times, (sim.burnt() != meas.burnt()).sum(axis=(1, 2))


def cost_J(simulated, measured, include_t0=False):
    """Symmetric-difference cost summed over the measured snapshots.

    The snapshot at the simulation start is skipped unless
    ``include_t0``; both series start from the same front there.
    """
    _, counts = snapshot_mismatch(simulated, measured, include_t0)
    return int(counts.sum())


def relative_error(p_hat, p_star):
    p_hat = np.asarray(getattr(p_hat, "to_array", lambda: p_hat)(), dtype=float)
    p_star = np.asarray(getattr(p_star, "to_array", lambda: p_star)(), dtype=float)
    if p_hat.shape != p_star.shape:
        raise ValueError("parameter vectors differ in length")
    ref = np.linalg.norm(p_star)
    if ref == 0:
        raise ValueError("reference parameter vector has zero norm")
    return float(np.linalg.norm(p_hat - p_star) / ref)


def similarity_indexes(simulated_phi, measured_phi):
    """Sorensen, Jaccard and kappa indexes ``(SSI, JSC, KS)``."""
    B = np.asarray(simulated_phi) >= 0
    A = np.asarray(measured_phi) >= 0
    if A.shape != B.shape:
        raise ValueError("fields have different shapes")
    N = A.size
    nA, nB = int(A.sum()), int(B.sum())
    inter = int((A & B).sum())
    union = nA + nB - inter
    if nA + nB == 0:
        raise ValueError("both burnt areas are empty; SSI and JSC are undefined")
    if (nA == 0 and nB == 0) or (nA == N and nB == N):
        raise ValueError("chance agreement is 1; kappa is undefined")
    ssi = 2.0 * inter / (nA + nB)
    jsc = inter / union
    p_agree = (inter + (N - union)) / N
    p_chance = (nA * nB + (N - nA) * (N - nB)) / N ** 2
    ks = (p_agree - p_chance) / (1.0 - p_chance)
    return ssi, jsc, ks


@dataclass
class SnapshotMetrics:
    time: float
    mismatch: int
    ssi: float | None
    jsc: float | None
    ks: float | None


@dataclass
class MetricReport:
    J: int
    N: int
    r: float
    snapshots: list = field(default_factory=list)
    e: float | None = None

    def to_dict(self):
        return asdict(self)


def metric_report(simulated, measured, p_hat=None, p_star=None, include_t0=False):
    sim, meas = _matched(simulated, measured, include_t0)
    rows = []
    for t, s, m in zip(sim.times, sim.fields, meas.fields):
        try:
            ssi, jsc, ks = similarity_indexes(s, m)
        except ValueError:
            ssi = jsc = ks = None
        rows.append(SnapshotMetrics(float(t), int(((s >= 0) != (m >= 0)).sum()), ssi, jsc, ks))
    J = sum(row.mismatch for row in rows)
    N = simulated.grid.size
    e = relative_error(p_hat, p_star) if p_hat is not None and p_star is not None else None
    return MetricReport(J, N, J / N, rows, e)
