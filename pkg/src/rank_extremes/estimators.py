"""Tail-index and extremal-index estimators for stationary paths.

All estimators are pure functions of their input vectors and return an
:class:`EstimateReport`.  Extremal-index estimates are clamped to (0, 1]
with the clamping recorded on the report.  Quantiles use the nearest-rank
convention (no interpolation) so results are bit-exact reproducible.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, ParameterError


@dataclass(frozen=True)
class ThresholdRule:
    """How to pick the tail region: top fraction, top count, or quantile."""

    kind: str
    value: float

    def __post_init__(self):
        if self.kind == "top_fraction":
            if not (0 < self.value < 1):
                raise ParameterError(f"top fraction must be in (0, 1), got {self.value}")
        elif self.kind == "top_count":
            if self.value < 1 or self.value != int(self.value):
                raise ParameterError(f"top count must be an integer >= 1, got {self.value}")
        elif self.kind == "quantile":
            if not (0 < self.value < 1):
                raise ParameterError(f"quantile must be in (0, 1), got {self.value}")
        else:
            raise ParameterError(f"unknown threshold rule '{self.kind}'")

    @classmethod
    def top_fraction(cls, p: float) -> "ThresholdRule":
        return cls("top_fraction", float(p))

    @classmethod
    def top_count(cls, k: int) -> "ThresholdRule":
        return cls("top_count", float(k))

    @classmethod
    def quantile(cls, q: float) -> "ThresholdRule":
        return cls("quantile", float(q))

    def order_count(self, sorted_desc: np.ndarray) -> int:
        """Number of upper order statistics selected on a sorted sample."""
        n = len(sorted_desc)
        if self.kind == "top_fraction":
            return int(math.floor(self.value * n))
        if self.kind == "top_count":
            return int(self.value)
        u = nearest_rank_quantile(sorted_desc[::-1], self.value, presorted=True)
        return int(np.count_nonzero(sorted_desc > u))


def nearest_rank_quantile(values: np.ndarray, q: float, presorted: bool = False) -> float:
    """Nearest-rank empirical quantile (no interpolation)."""
    if not (0 < q < 1):
        raise ParameterError(f"quantile level must be in (0, 1), got {q}")
    data = values if presorted else np.sort(values)
    n = len(data)
    idx = min(max(int(math.ceil(q * n)) - 1, 0), n - 1)
    return float(data[idx])


@dataclass(frozen=True)
class EstimateReport:
    """One estimate with the metadata needed to reproduce it."""

    estimate: float
    method: str
    n: int
    threshold: float | None = None
    exceedances: int | None = None
    block_length: int | None = None
    run_gap: int | None = None
    replications: int | None = None
    seed: int | None = None
    clamped: bool = False
    details: dict = field(default_factory=dict)

    # Documented serialization field order (JSON object keys / CSV columns).
    FIELDS = (
        "method", "estimate", "n", "threshold", "exceedances",
        "block_length", "run_gap", "replications", "seed", "clamped",
    )

    def to_json(self) -> str:
        payload = {name: getattr(self, name) for name in self.FIELDS}
        payload["details"] = self.details
        return json.dumps(payload, sort_keys=False)

    def to_csv_row(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow([getattr(self, name) for name in self.FIELDS])
        return buf.getvalue().rstrip("\n")

    @staticmethod
    def csv_header() -> str:
        return ",".join(EstimateReport.FIELDS)


def _clamp_theta(theta: float) -> tuple[float, bool]:
    """Clamp a finite-sample extremal-index estimate to (0, 1]."""
    if theta > 1.0:
        return 1.0, True
    if theta <= 0.0:
        return float(np.nextafter(0.0, 1.0)), True
    return theta, False


def hill(path: np.ndarray, rule: ThresholdRule) -> EstimateReport:
    """Hill estimator of the tail index over the upper order statistics.

    ``k_hat = 1 / mean(log(X_(i) / X_(m+1)))`` over the top ``m`` order
    statistics selected by ``rule``; ties are broken by a stable sort.
    """
    path = np.asarray(path, dtype=float)
    n = len(path)
    order = np.sort(path, kind="stable")[::-1]
    m = rule.order_count(order)
    # Callers should supply >= 10 upper order statistics for a meaningful
    # estimate; fewer than 2 makes the formula mechanically undefined.
    if m < 2:
        raise DataError(f"need at least 2 upper order statistics, rule selected {m}")
    if m >= n:
        raise DataError(f"rule selected {m} order statistics out of n={n}")
    top = order[:m]
    ref = order[m]
    if ref <= 0 or top[-1] <= 0:
        raise DataError("nonpositive values in the tail region; log undefined")
    mean_log = float(np.mean(np.log(top / ref)))
    if mean_log == 0.0:
        raise DataError("degenerate tail region (all selected values tied)")
    return EstimateReport(
        estimate=1.0 / mean_log,
        method="hill",
        n=n,
        threshold=float(ref),
        exceedances=m,
    )


def blocks_theta(
    path: np.ndarray,
    u: float,
    b: int | None = None,
    exceed_prob: float | None = None,
) -> EstimateReport:
    """Disjoint-blocks extremal-index estimator at threshold ``u``.

    ``theta_hat = log(mean 1{M_block <= u}) / (b * log(1 - p_u))`` over
    ``floor(n / b)`` disjoint blocks.  ``p_u`` defaults to the path's own
    exceedance frequency; pass ``exceed_prob`` to calibrate against a
    reference law instead (used by the preference-dominant verification,
    where the defining threshold sequence is tied to the preference
    variable rather than to the aggregate itself).
    """
    path = np.asarray(path, dtype=float)
    n = len(path)
    if b is None:
        b = int(math.isqrt(n))
    if b < 1:
        raise ParameterError(f"block length must be >= 1, got {b}")
    if n < 10 * b:
        raise ParameterError(f"need n >= 10*b, got n={n}, b={b}")
    exceed = path > u
    n_exc = int(np.count_nonzero(exceed))
    p_u = n_exc / n if exceed_prob is None else float(exceed_prob)
    if exceed_prob is None and n_exc == 0:
        raise DataError("no exceedances of the threshold")
    if not (0 < p_u < 1):
        raise DataError(f"exceedance probability {p_u} outside (0, 1)")
    n_b = n // b
    block_max = np.maximum.reduceat(path[: n_b * b], np.arange(0, n_b * b, b))
    below = float(np.mean(block_max <= u))
    if below == 0.0:
        raise DataError("every block exceeds the threshold; threshold too low")
    theta = math.log(below) / (b * math.log1p(-p_u))
    theta, clamped = _clamp_theta(theta)
    return EstimateReport(
        estimate=theta,
        method="blocks",
        n=n,
        threshold=float(u),
        exceedances=n_exc,
        block_length=b,
        clamped=clamped,
        details={"blocks": n_b, "blocks_below": int(round(below * n_b))},
    )


def intervals_theta(path: np.ndarray, u: float) -> EstimateReport:
    """Interexceedance-time moment estimator of the extremal index.

    With gaps ``T_1..T_{N-1}`` between consecutive exceedances of ``u``:
    ``theta_hat = min(1, 2 (sum T)^2 / ((N-1) sum T^2))``, switching to the
    ``(T - 1)`` variant when ``max T > 2``.
    """
    path = np.asarray(path, dtype=float)
    n = len(path)
    idx = np.flatnonzero(path > u)
    n_exc = len(idx)
    if n_exc < 2:
        raise DataError(f"need at least 2 exceedances, got {n_exc}")
    gaps = np.diff(idx).astype(float)
    m = len(gaps)
    if gaps.max() > 2:
        t = gaps - 1.0
        theta = 2.0 * t.sum() ** 2 / (m * np.sum(t * (t - 1.0)))
    else:
        theta = 2.0 * gaps.sum() ** 2 / (m * np.sum(gaps**2))
    theta, clamped = _clamp_theta(min(1.0, float(theta)))
    return EstimateReport(
        estimate=theta,
        method="intervals",
        n=n,
        threshold=float(u),
        exceedances=n_exc,
        clamped=clamped,
    )


def definition_theta(
    paths,
    tau: float,
    calibration_paths=None,
) -> EstimateReport:
    """Definition-based estimator from replicated path maxima.

    ``u_n`` is the nearest-rank ``1 - tau/n`` quantile pooled over the
    calibration sample (the paths themselves by default), and
    ``theta_hat = -log(mean 1{M_n <= u_n}) / tau`` over replications.
    Pass ``calibration_paths`` to tie ``u_n`` to a reference sequence (the
    preference draws in the preference-dominant regime).
    """
    paths = np.asarray(paths, dtype=float)
    if paths.ndim != 2:
        raise ParameterError("paths must be a 2-D array (replications x length)")
    r, n = paths.shape
    if r < 100:
        raise ParameterError(f"need at least 100 replications, got {r}")
    if not tau > 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    calib = paths if calibration_paths is None else np.asarray(calibration_paths, dtype=float)
    level = 1.0 - tau / n
    if not (0 < level < 1):
        raise ParameterError(f"tau={tau} incompatible with path length n={n}")
    u_n = nearest_rank_quantile(calib.ravel(), level)
    maxima = paths.max(axis=1)
    below = int(np.count_nonzero(maxima <= u_n))
    if below == 0:
        raise DataError("every replication maximum exceeds u_n; threshold failure")
    theta = -math.log(below / r) / tau
    theta, clamped = _clamp_theta(theta)
    return EstimateReport(
        estimate=theta,
        method="definition",
        n=n,
        threshold=float(u_n),
        exceedances=int(np.count_nonzero(paths > u_n)),
        replications=r,
        clamped=clamped,
        details={"tau": tau, "maxima_below": below},
    )


@dataclass(frozen=True)
class ClusterStats:
    """Runs-declustering summary: 1/theta approximates the mean cluster size."""

    cluster_count: int
    exceedance_count: int
    mean_size: float
    theta_runs: float


def mean_cluster_size(path: np.ndarray, u: float, run_gap: int | None = None) -> ClusterStats:
    """Runs declustering of the exceedances of ``u``.

    A new cluster starts when consecutive exceedances are separated by at
    least ``run_gap`` non-exceedances.  ``theta_runs = clusters /
    exceedances`` and the mean cluster size is its reciprocal (exactly).
    """
    path = np.asarray(path, dtype=float)
    n = len(path)
    if run_gap is None:
        run_gap = int(math.ceil(math.log(n)))
    if run_gap < 1:
        raise ParameterError(f"run gap must be >= 1, got {run_gap}")
    idx = np.flatnonzero(path > u)
    n_exc = len(idx)
    if n_exc == 0:
        raise DataError("no exceedances of the threshold")
    # gap in indices minus one = number of intervening non-exceedances
    clusters = 1 + int(np.count_nonzero(np.diff(idx) - 1 >= run_gap))
    return ClusterStats(
        cluster_count=clusters,
        exceedance_count=n_exc,
        mean_size=n_exc / clusters,
        theta_runs=clusters / n_exc,
    )
