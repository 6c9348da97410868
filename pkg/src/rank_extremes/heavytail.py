"""Samplers for regularly varying inputs.

Three families are provided:

* exact Pareto draws with survival function ``P{X > x} = c * x**(-k)``,
* stationary moving-maxima paths with a prescribed extremal index,
* truncated power-law integers used as in-degrees.

All samplers are pure functions of ``(spec, n, seed)``; see
:mod:`rank_extremes.rng` for the stream-splitting rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta

from .errors import ParameterError
from .rng import STREAMS, child_rng


@dataclass(frozen=True)
class TailSpec:
    """Regularly varying tail ``P{X > x} = c * x**(-k)`` for ``x >= c**(1/k)``.

    ``k`` is the tail index (smaller is heavier), ``c`` the scale constant.
    """

    k: float
    c: float = 1.0

    def __post_init__(self):
        if not (self.k > 0 and np.isfinite(self.k)):
            raise ParameterError(f"tail index k must be positive, got {self.k}")
        if not (self.c > 0 and np.isfinite(self.c)):
            raise ParameterError(f"scale constant c must be positive, got {self.c}")

    @property
    def support_left(self) -> float:
        """Left endpoint of the exact-Pareto support."""
        return self.c ** (1.0 / self.k)

    def survival(self, x):
        """Exact survival function of the Pareto realization."""
        x = np.asarray(x, dtype=float)
        return np.minimum(1.0, self.c * x ** (-self.k))


@dataclass(frozen=True)
class DependenceSpec:
    """Serial dependence of a stationary sequence.

    ``coeffs`` are the moving-maxima weights ``a_0..a_{m-1}``; a single
    coefficient means the sequence is i.i.d.  Coefficients must be
    nonnegative with at least one positive entry.
    """

    coeffs: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        if len(self.coeffs) < 1:
            raise ParameterError("at least one moving-maxima coefficient required")
        a = np.asarray(self.coeffs, dtype=float)
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise ParameterError("coefficients must be finite and nonnegative")
        if not np.any(a > 0):
            raise ParameterError("all-zero coefficient vector")

    @classmethod
    def iid(cls) -> "DependenceSpec":
        return cls((1.0,))

    @classmethod
    def moving_maxima(cls, *coeffs: float) -> "DependenceSpec":
        return cls(tuple(float(a) for a in coeffs))

    @property
    def is_iid(self) -> bool:
        return len(self.coeffs) == 1


@dataclass(frozen=True)
class SequenceSpec:
    """Marginal tail plus serial dependence of one stationary sequence."""

    tail: TailSpec
    dep: DependenceSpec = field(default_factory=DependenceSpec.iid)

    @property
    def theta(self) -> float:
        """Extremal index implied by the dependence structure."""
        return theoretical_mm_theta(self.dep, self.tail.k)


@dataclass(frozen=True)
class InDegreeSpec:
    """Truncated power-law integer law on ``{1, .., n_max}``.

    ``P{N = l}`` is proportional to ``l**-(alpha + 1)``, so the survival
    function decays with index ``alpha``.
    """

    alpha: float
    n_max: int

    def __post_init__(self):
        if not (self.alpha > 0 and np.isfinite(self.alpha)):
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        if self.n_max < 1:
            raise ParameterError(f"n_max must be >= 1, got {self.n_max}")


# pmf/cdf tables are O(n_max); memoize so replication loops do not rebuild them.
_LAW_CACHE: dict[tuple[float, int], tuple[np.ndarray, np.ndarray]] = {}


def _power_law_tables(spec: InDegreeSpec):
    """Normalized pmf and cdf of the truncated law, cached per spec."""
    key = (spec.alpha, spec.n_max)
    hit = _LAW_CACHE.get(key)
    if hit is not None:
        return hit
    support = np.arange(1, spec.n_max + 1, dtype=float)
    weights = support ** -(spec.alpha + 1.0)
    pmf = weights / weights.sum()
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    if len(_LAW_CACHE) > 16:
        _LAW_CACHE.clear()
    _LAW_CACHE[key] = (pmf, cdf)
    return pmf, cdf


def sample_pareto(spec: TailSpec, n: int, seed: int, *, _rng=None) -> np.ndarray:
    """Draw ``n`` i.i.d. exact-Pareto values with the tail of ``spec``.

    Inverse transform: ``X = (c / U)**(1/k)`` with ``U`` uniform on (0, 1],
    so ``P{X > x} = c * x**(-k)`` holds exactly on the support.
    """
    if n < 1:
        raise ParameterError(f"sample size must be >= 1, got {n}")
    rng = _rng if _rng is not None else child_rng(seed, STREAMS["column"], 0)
    u = 1.0 - rng.random(n)  # uniform on (0, 1]; avoids division by zero
    return (spec.c / u) ** (1.0 / spec.k)


def pareto_from_uniform(spec: TailSpec, u) -> np.ndarray:
    """Inverse-CDF map used by :func:`sample_pareto`, exposed for oracles."""
    u = np.asarray(u, dtype=float)
    return (spec.c / u) ** (1.0 / spec.k)


def theoretical_mm_theta(dep: DependenceSpec, k: float) -> float:
    """Closed-form extremal index of the moving-maxima generator.

    ``theta = max_j a_j**k / sum_j a_j**k``; equals 1 iff exactly one
    coefficient is nonzero (in particular for the i.i.d. case).
    """
    if not k > 0:
        raise ParameterError(f"tail index k must be positive, got {k}")
    a = np.asarray(dep.coeffs, dtype=float) ** k
    return float(a.max() / a.sum())


def _frechet(rng: np.random.Generator, scale: float, k: float, n: int) -> np.ndarray:
    """Fréchet draws with survival ``1 - exp(-scale * z**-k) ~ scale * z**-k``."""
    e = rng.exponential(size=n)
    return (scale / e) ** (1.0 / k)


def gen_moving_maxima(seq: SequenceSpec, n: int, seed: int, *, _rng=None) -> np.ndarray:
    """Stationary path ``Y_t = max_j a_j * Z_{t-j}`` of length ``n``.

    Innovations ``Z`` are Fréchet with tail index ``seq.tail.k`` and scale
    chosen so the marginal tail of ``Y`` matches ``seq.tail`` at leading
    order: ``P{Y > y} ~ c * y**-k``.  The resulting extremal index is
    ``max_j a_j**k / sum_j a_j**k``.

    A single-coefficient spec degenerates to an i.i.d. path, drawn as exact
    Pareto so marginal tails are sharp.
    """
    if n < 1:
        raise ParameterError(f"path length must be >= 1, got {n}")
    a = np.asarray(seq.dep.coeffs, dtype=float)
    m = len(a)
    rng = _rng if _rng is not None else child_rng(seed, STREAMS["column"], 0)
    if m == 1:
        return sample_pareto(seq.tail, n, seed, _rng=rng)
    k = seq.tail.k
    innov_scale = seq.tail.c / float(np.sum(a**k))
    z = _frechet(rng, innov_scale, k, n + m - 1)
    path = a[0] * z[m - 1 : m - 1 + n]
    for j in range(1, m):
        if a[j] == 0.0:
            continue
        np.maximum(path, a[j] * z[m - 1 - j : m - 1 - j + n], out=path)
    return path


def sample_sequence(seq: SequenceSpec, n: int, seed: int, *, _rng=None) -> np.ndarray:
    """Stationary path for ``seq``: i.i.d. Pareto or moving maxima."""
    return gen_moving_maxima(seq, n, seed, _rng=_rng)


def sample_power_law_int(spec: InDegreeSpec, n: int, seed: int, *, _rng=None) -> np.ndarray:
    """Draw ``n`` i.i.d. integers from the truncated power law of ``spec``."""
    if n < 1:
        raise ParameterError(f"sample size must be >= 1, got {n}")
    rng = _rng if _rng is not None else child_rng(seed, STREAMS["in_degree"], 0)
    _, cdf = _power_law_tables(spec)
    u = rng.random(n)
    return np.searchsorted(cdf, u, side="right").astype(np.int64) + 1


def power_law_survival(spec: InDegreeSpec, x) -> np.ndarray:
    """Exact ``P{N > x}`` of the truncated law, by direct summation."""
    pmf, cdf = _power_law_tables(spec)
    x = np.asarray(x)
    idx = np.clip(np.floor(x).astype(np.int64), 0, spec.n_max)
    surv = np.where(idx == 0, 1.0, 1.0 - cdf[np.maximum(idx, 1) - 1])
    return np.where(x < 1, 1.0, surv)


@dataclass(frozen=True)
class VonMisesDiagnostic:
    """Ratio sequence ``n * P{N = n} / P{N > n}`` with truncation flags.

    ``truncated[i]`` marks points where the finite support removes more
    than 1% of the untruncated tail mass, so the ratio no longer tracks
    ``alpha`` there.
    """

    n: np.ndarray
    ratio: np.ndarray
    alpha: float
    truncated: np.ndarray


def von_mises_check(spec: InDegreeSpec) -> VonMisesDiagnostic:
    """Evaluate the Fréchet-domain ratio diagnostic over ``n = 1..n_max-1``.

    For the truncated power law the ratio approaches ``alpha`` well inside
    the support and diverges near ``n_max`` (flagged).
    """
    if spec.n_max < 10:
        raise ParameterError("von Mises diagnostic needs n_max >= 10")
    pmf, cdf = _power_law_tables(spec)
    ns = np.arange(1, spec.n_max)
    tail = 1.0 - cdf[ns - 1]
    ratio = ns * pmf[ns - 1] / tail
    # Missing mass relative to the infinite-support tail; Hurwitz zeta gives
    # the exact untruncated tail sum for exponent alpha + 1 > 1.
    norm = pmf[0]  # pmf(1) = 1/Z, so Z = 1/pmf(1)
    infinite_tail = zeta(spec.alpha + 1.0, ns + 1.0) * norm
    truncated = (infinite_tail - tail) / infinite_tail > 0.01
    return VonMisesDiagnostic(n=ns, ratio=ratio, alpha=spec.alpha, truncated=truncated)
