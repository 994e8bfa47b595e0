"""Regression samples, lag embedding and affine domain normalization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateAxisError, ParameterError, SizingError

__all__ = [
    "RegressionSample",
    "DomainMap",
    "LagSpec",
    "lag_embed",
    "fit_domain_map",
    "normalize",
    "denormalize",
]


def _frozen_array(values, dtype=float, ndim=None):
    arr = np.array(values, dtype=dtype)
    if ndim is not None and arr.ndim != ndim:
        raise ParameterError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RegressionSample:
    """A response vector ``y`` paired with an ``n x d`` predictor matrix ``x``.

    Values are copied and marked read-only so a sample can be shared freely
    across concurrent fits.
    """

    y: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        y = _frozen_array(self.y, ndim=1)
        x = np.array(self.x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        x = _frozen_array(x, ndim=2)
        if y.shape[0] != x.shape[0]:
            raise SizingError(
                f"y has {y.shape[0]} rows but x has {x.shape[0]}"
            )
        if y.shape[0] < 1:
            raise SizingError("sample must contain at least one row")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def select(self, mask) -> "RegressionSample":
        """Return the sub-sample of rows where ``mask`` is true."""
        mask = np.asarray(mask, dtype=bool)
        return RegressionSample(self.y[mask], self.x[mask])


@dataclass(frozen=True)
class DomainMap:
    """Per-axis affine maps sending ``[lo, hi]`` onto the unit interval."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = _frozen_array(np.atleast_1d(self.lo), ndim=1)
        hi = _frozen_array(np.atleast_1d(self.hi), ndim=1)
        if lo.shape != hi.shape:
            raise ParameterError("lo and hi must have equal length")
        if not np.all(lo < hi):
            raise ParameterError("domain map requires lo < hi on every axis")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def d(self) -> int:
        return self.lo.shape[0]

    @property
    def width(self) -> np.ndarray:
        return self.hi - self.lo

    def to_unit(self, x):
        return (np.asarray(x, dtype=float) - self.lo) / self.width

    def from_unit(self, u):
        return np.asarray(u, dtype=float) * self.width + self.lo


@dataclass(frozen=True)
class LagSpec:
    """Which lags of a univariate series become predictor columns."""

    lags: tuple
    burn_in: int = 0

    def __post_init__(self):
        lags = tuple(int(k) for k in self.lags)
        if len(lags) == 0:
            raise ParameterError("at least one lag is required")
        if any(k <= 0 for k in lags):
            raise ParameterError("lags must be positive integers")
        if list(lags) != sorted(set(lags)):
            raise ParameterError("lags must be strictly ascending with no duplicates")
        if self.burn_in < 0:
            raise ParameterError("burn_in must be nonnegative")
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "burn_in", int(self.burn_in))


def lag_embed(series, spec: LagSpec) -> RegressionSample:
    """Embed a univariate series as response plus lagged predictor columns.

    Row ``t`` of the result (after discarding ``burn_in + max(lags)`` leading
    values) has response ``series[t]`` and predictors ``series[t - lag]`` for
    each lag in ``spec.lags``.
    """
    series = np.asarray(series, dtype=float)
    if series.ndim != 1:
        raise ParameterError("series must be one-dimensional")
    start = spec.burn_in + max(spec.lags)
    n = series.shape[0] - start
    if n < 1:
        raise SizingError(
            f"series of length {series.shape[0]} is too short: "
            f"need at least {start + 1} values for burn_in={spec.burn_in} "
            f"and max lag {max(spec.lags)}"
        )
    y = series[start:]
    x = np.column_stack([series[start - k : series.shape[0] - k] for k in spec.lags])
    return RegressionSample(y, x)


def fit_domain_map(x, mode: str = "observed", q: float = 0.95, bounds=None) -> DomainMap:
    """Calibrate per-axis ranges for normalization to the unit cube.

    Parameters
    ----------
    x : array, shape (n, d)
        Predictor matrix.
    mode : {"observed", "quantile", "explicit"}
        "observed" uses the per-axis min/max, "quantile" the central
        ``q`` empirical quantile interval, "explicit" copies ``bounds``.
    q : float
        Central coverage for mode "quantile"; must satisfy 0.5 < q < 1.
    bounds : sequence of (lo, hi) pairs
        Required for mode "explicit".
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if mode == "explicit":
        if bounds is None:
            raise ParameterError("mode='explicit' requires bounds")
        b = np.asarray(bounds, dtype=float)
        if b.ndim == 1:
            b = np.tile(b, (x.shape[1], 1))
        return DomainMap(b[:, 0], b[:, 1])
    if x.shape[0] < 2:
        raise SizingError("need at least two rows to calibrate a range")
    if mode == "observed":
        lo, hi = x.min(axis=0), x.max(axis=0)
    elif mode == "quantile":
        if not 0.5 < q < 1.0:
            raise ParameterError("quantile coverage must satisfy 0.5 < q < 1")
        lo = np.quantile(x, (1.0 - q) / 2.0, axis=0)
        hi = np.quantile(x, (1.0 + q) / 2.0, axis=0)
    else:
        raise ParameterError(f"unknown range mode {mode!r}")
    flat = np.flatnonzero(hi <= lo)
    if flat.size:
        raise DegenerateAxisError(
            f"axis {flat[0]} is constant over the calibration rows"
        )
    return DomainMap(lo, hi)


def normalize(sample: RegressionSample, dmap: DomainMap):
    """Map predictors onto the unit cube; flag rows that fall outside it.

    Returns the normalized sample together with an out-of-range mask
    (true for rows with any coordinate outside ``[0, 1]``).  Out-of-range
    values are kept as-is in the normalized sample so callers can report
    them; they must be excluded (via the mask) before basis fitting.
    """
    if dmap.d != sample.d:
        raise ParameterError(
            f"domain map covers {dmap.d} axes but sample has {sample.d}"
        )
    u = dmap.to_unit(sample.x)
    out_of_range = np.any((u < 0.0) | (u > 1.0), axis=1)
    return RegressionSample(sample.y, u), out_of_range


def denormalize(sample: RegressionSample, dmap: DomainMap) -> RegressionSample:
    """Inverse of :func:`normalize` on the predictor matrix."""
    if dmap.d != sample.d:
        raise ParameterError(
            f"domain map covers {dmap.d} axes but sample has {sample.d}"
        )
    return RegressionSample(sample.y, dmap.from_unit(sample.x))
