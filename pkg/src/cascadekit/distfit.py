"""Heavy-tailed distribution fitting with maximum likelihood and KS scoring.

Five families: lognormal, three-parameter Weibull (shape, scale, location),
Weibull mixtures of two-parameter components, a power-law tail with
data-driven cutoff, and the double-Pareto-lognormal (dpln) family whose body
is lognormal and whose two tails are power laws.

Integer-valued samples are treated as draws from a continuous density that
were rounded on capture: the likelihood is evaluated on the values as given.
The only place the discreteness flag changes an estimator is the power-law
exponent, which uses the half-step-shifted form of the MLE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar
from scipy.special import log_ndtr, ndtr

from .errors import (
    ConvergenceError,
    DegenerateSampleError,
    ParameterDomainError,
)

FAMILIES = ("lognormal", "weibull", "weibull-mixture", "powerlaw-tail", "dpln")

_SQRT2 = math.sqrt(2.0)
_LOG_2PI = math.log(2.0 * math.pi)


# ---------------------------------------------------------------------------
# Samples and results
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Sample:
    """Positive observations, sorted ascending, with a discreteness flag."""

    values: np.ndarray
    discrete: bool

    @classmethod
    def from_values(
        cls, values: Iterable[float], *, discrete: bool | None = None
    ) -> "Sample":
        arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                         dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise DegenerateSampleError("sample must be a non-empty 1-d collection")
        if not np.all(np.isfinite(arr)):
            raise DegenerateSampleError("sample contains non-finite values")
        if np.any(arr <= 0):
            raise DegenerateSampleError("sample values must be strictly positive")
        arr = np.sort(arr)
        if discrete is None:
            discrete = bool(np.all(arr == np.round(arr)))
        return cls(values=arr, discrete=discrete)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def spread_check(self, minimum_distinct: int = 2) -> None:
        if np.unique(self.values).size < minimum_distinct:
            raise DegenerateSampleError(
                f"sample needs at least {minimum_distinct} distinct values"
            )


@dataclass(frozen=True)
class FitResult:
    """One family's maximum-likelihood fit and its KS distance."""

    family: str
    params: dict
    loglik: float
    ks: float
    n: int
    tail_fraction: float | None = None
    notes: tuple[str, ...] = ()
    loglik_history: tuple[float, ...] = ()

    def to_json_dict(self) -> dict:
        out = {
            "family": self.family,
            "params": self.params,
            "loglik": self.loglik,
            "ks": self.ks,
            "n": self.n,
        }
        if self.tail_fraction is not None:
            out["tail_fraction"] = self.tail_fraction
        if self.notes:
            out["notes"] = list(self.notes)
        return out


@dataclass(frozen=True)
class FitConfig:
    """Optimizer budgets and deterministic starting points."""

    mixture_components: int = 2
    max_iter: int = 500
    tol: float = 1e-9
    eta_grid: int = 96
    xmin_candidates: int = 256
    seed: int = 0
    dpln_extra_starts: tuple[tuple[float, float], ...] = (
        (2.0, 2.0),
        (3.0, 1.5),
        (1.5, 3.0),
    )


DEFAULT_CONFIG = FitConfig()


# ---------------------------------------------------------------------------
# Distribution functions
# ---------------------------------------------------------------------------


def lognormal_cdf(x, mu: float, sigma: float):
    if sigma <= 0:
        raise ParameterDomainError("lognormal sigma must be positive")
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = ndtr((np.log(x[pos]) - mu) / sigma)
    return out


def weibull_cdf(x, k: float, lam: float, eta: float = 0.0):
    if k <= 0 or lam <= 0:
        raise ParameterDomainError("weibull shape and scale must be positive")
    x = np.asarray(x, dtype=float)
    y = np.maximum(x - eta, 0.0)
    return 1.0 - np.exp(-((y / lam) ** k))


def weibull_mixture_cdf(x, components: Sequence[Mapping[str, float]]):
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    weight_sum = 0.0
    for comp in components:
        w, k, lam = comp["weight"], comp["k"], comp["lambda"]
        if w < 0 or k <= 0 or lam <= 0:
            raise ParameterDomainError("mixture component out of domain")
        weight_sum += w
        total += w * (1.0 - np.exp(-((np.maximum(x, 0.0) / lam) ** k)))
    if not math.isclose(weight_sum, 1.0, rel_tol=1e-6):
        raise ParameterDomainError("mixture weights must sum to 1")
    return total


def power_law_tail_cdf(x, alpha: float, x_min: float):
    """CDF of the continuous power-law tail on x >= x_min.

    The survival form (x / x_min) ** (1 - alpha) is the quantity usually
    plotted; this returns its complement so KS comparisons see a CDF.
    """
    if alpha <= 1 or x_min <= 0:
        raise ParameterDomainError("power law needs alpha > 1 and x_min > 0")
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    tail = x >= x_min
    out[tail] = 1.0 - (x[tail] / x_min) ** (1.0 - alpha)
    return out


def _dpln_check(alpha: float, beta: float, sigma: float) -> None:
    if alpha <= 0 or beta <= 0 or sigma <= 0:
        raise ParameterDomainError("dpln needs alpha, beta, sigma > 0")


def dpln_logpdf(x, alpha: float, beta: float, mu: float, sigma: float):
    _dpln_check(alpha, beta, sigma)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ParameterDomainError("dpln is supported on x > 0")
    lx = np.log(x)
    z = (lx - mu) / sigma
    t_upper = (
        alpha * mu
        + 0.5 * alpha * alpha * sigma * sigma
        + (-alpha - 1.0) * lx
        + log_ndtr(z - alpha * sigma)
    )
    t_lower = (
        -beta * mu
        + 0.5 * beta * beta * sigma * sigma
        + (beta - 1.0) * lx
        + log_ndtr(-(z + beta * sigma))
    )
    return math.log(alpha * beta / (alpha + beta)) + np.logaddexp(t_upper, t_lower)


def dpln_pdf(x, alpha: float, beta: float, mu: float, sigma: float):
    return np.exp(dpln_logpdf(x, alpha, beta, mu, sigma))


def dpln_cdf(x, alpha: float, beta: float, mu: float, sigma: float):
    """Double-Pareto-lognormal CDF, with A(theta) = exp(theta*mu + theta^2 sigma^2/2).

    Both correction terms are evaluated in log space so the x**alpha and
    A(theta) factors never overflow on their own.
    """
    _dpln_check(alpha, beta, sigma)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ParameterDomainError("dpln is supported on x > 0")
    lx = np.log(x)
    z = (lx - mu) / sigma
    log_a_up = alpha * mu + 0.5 * alpha * alpha * sigma * sigma
    log_a_dn = -beta * mu + 0.5 * beta * beta * sigma * sigma
    upper = np.exp(-alpha * lx + log_a_up + log_ndtr(z - alpha * sigma))
    lower = np.exp(beta * lx + log_a_dn + log_ndtr(-(z + beta * sigma)))
    out = ndtr(z) - (beta * upper - alpha * lower) / (alpha + beta)
    return np.clip(out, 0.0, 1.0)


_CDFS: dict[str, Callable] = {
    "lognormal": lambda x, p: lognormal_cdf(x, p["mu"], p["sigma"]),
    "weibull": lambda x, p: weibull_cdf(x, p["k"], p["lambda"], p["eta"]),
    "weibull-mixture": lambda x, p: weibull_mixture_cdf(x, p["components"]),
    "powerlaw-tail": lambda x, p: power_law_tail_cdf(x, p["alpha"], p["x_min"]),
    "dpln": lambda x, p: dpln_cdf(x, p["alpha"], p["beta"], p["mu"], p["sigma"]),
}


def family_cdf(family: str, params: Mapping, x):
    """Evaluate the fitted CDF of any supported family."""
    try:
        fn = _CDFS[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}") from None
    return fn(x, params)


def ks_statistic(sorted_values: np.ndarray, model_cdf: np.ndarray) -> float:
    """Two-sided sup distance between the empirical CDF and a model CDF."""
    n = sorted_values.size
    hi = np.arange(1, n + 1, dtype=float) / n
    lo = np.arange(0, n, dtype=float) / n
    return float(np.max(np.maximum(np.abs(model_cdf - hi), np.abs(model_cdf - lo))))


# ---------------------------------------------------------------------------
# Per-family fitters
# ---------------------------------------------------------------------------


def _fit_lognormal(sample: Sample, config: FitConfig) -> FitResult:
    sample.spread_check()
    lx = np.log(sample.values)
    mu = float(np.mean(lx))
    sigma = float(np.std(lx))
    if sigma <= 0:
        raise DegenerateSampleError("all values identical; lognormal sigma is zero")
    n = sample.n
    loglik = float(
        -n * (math.log(sigma) + 0.5 * _LOG_2PI)
        - np.sum(lx)
        - np.sum((lx - mu) ** 2) / (2.0 * sigma * sigma)
    )
    ks = ks_statistic(sample.values, lognormal_cdf(sample.values, mu, sigma))
    return FitResult(
        family="lognormal",
        params={"mu": mu, "sigma": sigma},
        loglik=loglik,
        ks=ks,
        n=n,
    )


def _weibull_shape_mle(
    log_y: np.ndarray, weights: np.ndarray | None = None
) -> tuple[float, float]:
    """Solve the (weighted) Weibull shape equation; returns (k, log lambda).

    Powers are computed relative to the largest observation so y**k stays
    finite for any bracketed k.
    """
    if weights is None:
        weights = np.ones_like(log_y)
    wsum = float(np.sum(weights))
    mean_log = float(np.sum(weights * log_y) / wsum)
    m = float(np.max(log_y))

    def g(k: float) -> float:
        w = weights * np.exp(k * (log_y - m))
        return float(np.sum(w * log_y) / np.sum(w)) - 1.0 / k - mean_log

    lo, hi = 1e-6, 1.0
    while g(hi) < 0.0:
        hi *= 2.0
        if hi > 1e6:
            raise ConvergenceError("weibull shape equation has no root below 1e6")
    k = float(brentq(g, lo, hi, xtol=1e-12, rtol=1e-14))
    w = weights * np.exp(k * (log_y - m))
    log_lam = m + math.log(float(np.sum(w) / wsum)) / k
    return k, log_lam


def _weibull_profile_loglik(y: np.ndarray) -> tuple[float, float, float]:
    """Profile over (k, lambda) at fixed location; returns (ll, k, lambda)."""
    log_y = np.log(y)
    k, log_lam = _weibull_shape_mle(log_y)
    n = y.size
    ll = (
        n * (math.log(k) - k * log_lam)
        + (k - 1.0) * float(np.sum(log_y))
        - n  # sum((y/lam)**k) equals n at the shape/scale MLE
    )
    return float(ll), k, math.exp(log_lam)


def _fit_weibull(sample: Sample, config: FitConfig) -> FitResult:
    sample.spread_check()
    x = sample.values
    lo, hi = float(x[0]), float(x[-1])
    span = hi - lo
    epsilon = 1e-6 * span
    eta_max = lo - epsilon

    def objective(eta: float) -> float:
        return -_weibull_profile_loglik(x - eta)[0]

    grid = np.linspace(lo - span, eta_max, config.eta_grid)
    values = np.array([objective(e) for e in grid])
    best = int(np.argmin(values))
    left = grid[max(best - 1, 0)]
    right = grid[min(best + 1, grid.size - 1)]
    if right > left:
        res = minimize_scalar(objective, bounds=(left, right), method="bounded")
        eta = float(min(res.x, eta_max))
        if objective(eta) > values[best]:
            eta = float(grid[best])
    else:
        eta = float(grid[best])
    ll, k, lam = _weibull_profile_loglik(x - eta)
    notes: tuple[str, ...] = ()
    if eta >= eta_max - 1e-9 * max(1.0, abs(eta_max)):
        notes = ("eta at constraint boundary",)
    ks = ks_statistic(x, weibull_cdf(x, k, lam, eta))
    return FitResult(
        family="weibull",
        params={"k": k, "lambda": lam, "eta": eta},
        loglik=ll,
        ks=ks,
        n=sample.n,
        notes=notes,
    )


def _weibull_component_logpdf(x: np.ndarray, k: float, lam: float) -> np.ndarray:
    return (
        math.log(k)
        - k * math.log(lam)
        + (k - 1.0) * np.log(x)
        - (x / lam) ** k
    )


def _fit_weibull_mixture(sample: Sample, config: FitConfig) -> FitResult:
    c = config.mixture_components
    if c < 2:
        raise ParameterDomainError("mixture needs at least two components")
    sample.spread_check(minimum_distinct=c)
    x = sample.values
    n = sample.n
    blocks = np.array_split(x, c)
    ks_shape = np.ones(c)
    lams = np.array([max(float(np.mean(b)), 1e-12) for b in blocks])
    weights = np.full(c, 1.0 / c)
    log_x = np.log(x)

    history: list[float] = []
    for _ in range(config.max_iter):
        logd = np.empty((c, n))
        for i in range(c):
            logd[i] = math.log(weights[i]) + _weibull_component_logpdf(
                x, ks_shape[i], lams[i]
            )
        m = np.max(logd, axis=0)
        total = m + np.log(np.sum(np.exp(logd - m), axis=0))
        ll = float(np.sum(total))
        resp = np.exp(logd - total)
        history.append(ll)
        if len(history) > 1 and abs(history[-1] - history[-2]) <= config.tol * (
            1.0 + abs(history[-1])
        ):
            break
        weights = np.mean(resp, axis=1)
        if np.any(weights < 1e-12):
            raise ConvergenceError(
                "mixture component collapsed",
                last=_mixture_result(weights, ks_shape, lams, sample, history),
            )
        for i in range(c):
            k_i, log_lam_i = _weibull_shape_mle(log_x, weights=resp[i])
            ks_shape[i] = k_i
            lams[i] = math.exp(log_lam_i)
    else:
        raise ConvergenceError(
            f"mixture EM did not converge in {config.max_iter} iterations",
            last=_mixture_result(weights, ks_shape, lams, sample, history),
        )
    return _mixture_result(weights, ks_shape, lams, sample, history)


def _mixture_result(
    weights: np.ndarray,
    ks_shape: np.ndarray,
    lams: np.ndarray,
    sample: Sample,
    history: list[float],
) -> FitResult:
    order = np.argsort(lams)
    components = [
        {
            "weight": float(weights[i]),
            "k": float(ks_shape[i]),
            "lambda": float(lams[i]),
        }
        for i in order
    ]
    total = sum(comp["weight"] for comp in components)
    for comp in components:
        comp["weight"] /= total
    ks = ks_statistic(
        sample.values, weibull_mixture_cdf(sample.values, components)
    )
    return FitResult(
        family="weibull-mixture",
        params={"components": components},
        loglik=history[-1] if history else float("-inf"),
        ks=ks,
        n=sample.n,
        loglik_history=tuple(history),
    )


def _fit_power_law(sample: Sample, config: FitConfig) -> FitResult:
    sample.spread_check()
    x = sample.values
    n = sample.n
    lx = np.log(x)
    suffix = np.concatenate([np.cumsum(lx[::-1])[::-1], [0.0]])
    first_pos = np.flatnonzero(np.diff(np.concatenate([[np.nan], x])) != 0)
    # candidate cutoffs: first occurrence of each distinct value, excluding the maximum
    candidates = [i for i in first_pos if x[i] < x[-1]]
    if not candidates:
        raise DegenerateSampleError("power-law tail needs at least two distinct values")
    if len(candidates) > config.xmin_candidates:
        pick = np.linspace(0, len(candidates) - 1, config.xmin_candidates)
        candidates = [candidates[int(i)] for i in pick]
    best: tuple[float, float, float, int] | None = None
    for i0 in candidates:
        x_min = float(x[i0])
        nt = n - i0
        shift = x_min - 0.5 if sample.discrete and x_min > 0.5 else x_min
        denom = float(suffix[i0]) - nt * math.log(shift)
        if denom <= 0:
            continue
        alpha = float(1.0 + nt / denom)
        tail = x[i0:]
        model = 1.0 - (tail / x_min) ** (1.0 - alpha)
        ks = ks_statistic(tail, model)
        if best is None or ks < best[0]:
            best = (ks, alpha, x_min, i0)
    if best is None:
        raise DegenerateSampleError("no usable power-law cutoff found")
    ks, alpha, x_min, i0 = best
    nt = n - i0
    loglik = float(
        nt * math.log((alpha - 1.0) / x_min)
        - alpha * (float(suffix[i0]) - nt * math.log(x_min))
    )
    return FitResult(
        family="powerlaw-tail",
        params={"alpha": alpha, "x_min": x_min},
        loglik=loglik,
        ks=ks,
        n=sample.n,
        tail_fraction=nt / n,
    )


def _dpln_moment_start(lx: np.ndarray) -> tuple[float, float, float, float]:
    m1 = float(np.mean(lx))
    m2 = float(np.var(lx))
    m3 = float(np.mean((lx - m1) ** 3))
    half = max(m2 / 2.0, 1e-6)
    radius = math.sqrt(half)
    grid = np.linspace(1e-3 * radius, radius * (1 - 1e-9), 201)
    b = np.sqrt(np.maximum(half - grid**2, 0.0))
    mismatch = np.abs(2.0 * (grid**3 - b**3) - m3)
    a = float(grid[int(np.argmin(mismatch))])
    b_val = math.sqrt(max(half - a * a, 1e-12))
    alpha = min(max(1.0 / max(a, 1e-3), 0.2), 100.0)
    beta = min(max(1.0 / max(b_val, 1e-3), 0.2), 100.0)
    mu = m1 - 1.0 / alpha + 1.0 / beta
    sigma = math.sqrt(half)
    return alpha, beta, mu, sigma


def _fit_dpln(sample: Sample, config: FitConfig) -> FitResult:
    sample.spread_check()
    x = sample.values
    lx = np.log(x)

    def nll(theta: np.ndarray) -> float:
        a, b, mu, s = theta
        try:
            return -float(np.sum(dpln_logpdf(x, a, b, mu, s)))
        except (ParameterDomainError, FloatingPointError):
            return float("inf")

    bounds = [(1e-2, 1e3), (1e-2, 1e3), (-1e3, 1e3), (1e-4, 1e3)]
    a0, b0, mu0, s0 = _dpln_moment_start(lx)
    sd = float(np.std(lx)) or 1.0
    starts = [np.array([a0, b0, mu0, s0])]
    for a_extra, b_extra in config.dpln_extra_starts:
        starts.append(np.array([a_extra, b_extra, float(np.mean(lx)), sd / _SQRT2]))
    best_res = None
    for start in starts:
        res = minimize(
            nll,
            start,
            method="L-BFGS-B",
            bounds=bounds,
            options={"maxiter": config.max_iter},
        )
        if not np.isfinite(res.fun):
            continue
        if best_res is None or res.fun < best_res.fun:
            best_res = res
    if best_res is None:
        raise ConvergenceError("dpln likelihood optimization failed from all starts")
    alpha, beta, mu, sigma = (float(v) for v in best_res.x)
    params = {"alpha": alpha, "beta": beta, "mu": mu, "sigma": sigma}
    partial = FitResult(
        family="dpln",
        params=params,
        loglik=-float(best_res.fun),
        ks=float("nan"),
        n=sample.n,
    )
    if not best_res.success and best_res.nit >= config.max_iter:
        raise ConvergenceError(
            f"dpln optimizer hit its {config.max_iter}-iteration budget", last=partial
        )
    ks = ks_statistic(x, dpln_cdf(x, alpha, beta, mu, sigma))
    return FitResult(
        family="dpln", params=params, loglik=-float(best_res.fun), ks=ks, n=sample.n
    )


_FITTERS = {
    "lognormal": _fit_lognormal,
    "weibull": _fit_weibull,
    "weibull-mixture": _fit_weibull_mixture,
    "powerlaw-tail": _fit_power_law,
    "dpln": _fit_dpln,
}


def fit(sample: Sample, family: str, config: FitConfig | None = None) -> FitResult:
    """Maximum-likelihood fit of one family to a sample."""
    if family not in _FITTERS:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    return _FITTERS[family](sample, config or DEFAULT_CONFIG)


@dataclass(frozen=True)
class ComparisonResult:
    """Fits ranked by KS distance, with per-family failures kept aside."""

    fits: tuple[FitResult, ...]
    failures: Mapping[str, str] = field(default_factory=dict)

    def best(self) -> FitResult:
        if not self.fits:
            raise DegenerateSampleError("no family produced a fit")
        return self.fits[0]


def compare(
    sample: Sample,
    families: Sequence[str] = FAMILIES,
    config: FitConfig | None = None,
) -> ComparisonResult:
    """Fit several families and rank them by goodness of fit."""
    fits = []
    failures: dict[str, str] = {}
    for family in families:
        try:
            fits.append(fit(sample, family, config))
        except (ConvergenceError, DegenerateSampleError, ParameterDomainError) as exc:
            failures[family] = str(exc)
    fits.sort(key=lambda r: (r.ks, r.family))
    return ComparisonResult(fits=tuple(fits), failures=failures)


# ---------------------------------------------------------------------------
# Reference samplers (used by tests and the synthetic corpus)
# ---------------------------------------------------------------------------


def sample_lognormal(mu: float, sigma: float, size: int, rng: np.random.Generator):
    return rng.lognormal(mean=mu, sigma=sigma, size=size)


def sample_weibull(
    k: float, lam: float, eta: float, size: int, rng: np.random.Generator
):
    return eta + lam * rng.weibull(k, size=size)


def sample_weibull_mixture(
    components: Sequence[Mapping[str, float]], size: int, rng: np.random.Generator
):
    weights = np.array([c["weight"] for c in components])
    weights = weights / weights.sum()
    choices = rng.choice(len(components), size=size, p=weights)
    out = np.empty(size)
    for i, comp in enumerate(components):
        mask = choices == i
        out[mask] = comp["lambda"] * rng.weibull(comp["k"], size=int(mask.sum()))
    return out


def sample_power_law(alpha: float, x_min: float, size: int, rng: np.random.Generator):
    u = rng.random(size)
    return x_min * (1.0 - u) ** (-1.0 / (alpha - 1.0))


def sample_dpln(
    alpha: float, beta: float, mu: float, sigma: float, size: int,
    rng: np.random.Generator,
):
    z = rng.standard_normal(size)
    e_up = rng.standard_exponential(size)
    e_dn = rng.standard_exponential(size)
    return np.exp(mu + sigma * z + e_up / alpha - e_dn / beta)
