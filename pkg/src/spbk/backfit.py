"""Stage two: Nadaraya-Watson re-smoothing of pseudo-responses, the oracle
benchmark smoother, pointwise confidence bands and full additive prediction."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import norm

from .errors import DomainError, ParameterError
from .kernels import (
    DEFAULT_H_SCALE,
    QUARTIC,
    Bandwidth,
    KernelSpec,
    kde_at_points,
    nw_at_points,
    plugin_bandwidth,
)
from .pilot import PilotFit
from .sample import RegressionSample

__all__ = [
    "SpbkFit",
    "AdditiveTruth",
    "AdditiveFit",
    "AsymptoticConstants",
    "BiasInputs",
    "pseudo_responses",
    "spbk_component",
    "oracle_component",
    "asymptotic_constants",
    "confidence_band",
    "full_fit",
    "default_grid",
]


def default_grid(size: int = 101):
    return np.linspace(0.0, 1.0, size)


@dataclass(frozen=True)
class SpbkFit:
    """A smoothed component curve on a grid of the unit interval.

    ``values`` holds NaN at grid points whose kernel window was empty.
    ``interior`` marks points with ``h <= x <= 1 - h``, the range on which
    confidence bands are meaningful; bands are NaN elsewhere.
    """

    axis: int
    grid: np.ndarray
    values: np.ndarray
    h: Bandwidth
    interior: np.ndarray
    band_lo: np.ndarray | None = None
    band_hi: np.ndarray | None = None

    def __post_init__(self):
        for name in ("grid", "values", "interior", "band_lo", "band_hi"):
            v = getattr(self, name)
            if v is None:
                continue
            arr = np.array(v, dtype=bool if name == "interior" else float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def defined(self):
        return ~np.isnan(self.values)

    def __call__(self, x):
        """Evaluate by linear interpolation between defined grid points."""
        good = self.defined
        if not np.any(good):
            raise ParameterError("component has no defined grid values")
        return np.interp(np.asarray(x, dtype=float), self.grid[good], self.values[good])

    def to_csv_rows(self, dmap=None):
        """Rows (x, value, band_lo, band_hi, interior); x on the raw scale
        when a domain map is given."""
        x = self.grid if dmap is None else (
            self.grid * dmap.width[self.axis] + dmap.lo[self.axis]
        )
        nans = np.full(self.grid.shape, np.nan)
        lo = self.band_lo if self.band_lo is not None else nans
        hi = self.band_hi if self.band_hi is not None else nans
        return [
            (x[i], self.values[i], lo[i], hi[i], int(self.interior[i]))
            for i in range(self.grid.shape[0])
        ]

    def to_dict(self):
        def listify(a):
            return None if a is None else [None if np.isnan(v) else float(v) for v in a]

        return {
            "axis": self.axis,
            "h": self.h.h,
            "grid": self.grid.tolist(),
            "values": listify(self.values),
            "band_lo": listify(self.band_lo),
            "band_hi": listify(self.band_hi),
            "interior": self.interior.astype(int).tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass(frozen=True)
class AdditiveTruth:
    """True centered component callables (on the unit scale) plus the constant."""

    components: tuple
    constant: float


def _leave_one_out_sum(values, axis):
    keep = [b for b in range(values.shape[1]) if b != axis]
    return values[:, keep].sum(axis=1)


def pseudo_responses(sample: RegressionSample, pilot: PilotFit, axis: int):
    """Responses with the estimated constant and all other fitted components
    removed, isolating the ``axis`` direction for the second-stage smoother."""
    if not 0 <= axis < sample.d:
        raise DomainError(f"axis {axis} out of range for d={sample.d}")
    comps = pilot.component_values(sample.x)
    return sample.y - pilot.c_hat - _leave_one_out_sum(comps, axis)


def _smooth(sample, axis, ys, h, grid, h_scale, kernel):
    xs = sample.x[:, axis]
    if h is None:
        hb = plugin_bandwidth(xs, ys, h_scale, kernel)
    else:
        hb = h if isinstance(h, Bandwidth) else Bandwidth(float(h))
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if np.any((grid < 0.0) | (grid > 1.0)):
        raise DomainError("evaluation grid must lie within [0, 1]")
    values, _ = nw_at_points(xs, ys, hb, grid, kernel)
    interior = (grid >= hb.h) & (grid <= 1.0 - hb.h)
    return SpbkFit(axis=axis, grid=grid, values=values, h=hb, interior=interior)


def spbk_component(
    sample: RegressionSample,
    pilot: PilotFit,
    axis: int,
    h=None,
    grid=None,
    h_scale: float = DEFAULT_H_SCALE,
    kernel: KernelSpec = QUARTIC,
) -> SpbkFit:
    """Second-stage component estimate: Nadaraya-Watson smoothing of the
    pseudo-responses over the ``axis`` coordinate.

    Grid points with an empty window are flagged missing (NaN), not fatal.
    The default bandwidth is the plug-in rule of thumb on this axis's
    pseudo-responses.
    """
    ys = pseudo_responses(sample, pilot, axis)
    return _smooth(sample, axis, ys, h, grid, h_scale, kernel)


def oracle_component(
    sample: RegressionSample,
    truth: AdditiveTruth,
    axis: int,
    h=None,
    grid=None,
    h_scale: float = DEFAULT_H_SCALE,
    kernel: KernelSpec = QUARTIC,
) -> SpbkFit:
    """The infeasible benchmark: the same smoother applied to responses with
    the *true* constant and true other components subtracted."""
    if not 0 <= axis < sample.d:
        raise DomainError(f"axis {axis} out of range for d={sample.d}")
    vals = np.column_stack([
        np.asarray(m_b(sample.x[:, b]), dtype=float)
        for b, m_b in enumerate(truth.components)
    ])
    ys = sample.y - truth.constant - _leave_one_out_sum(vals, axis)
    return _smooth(sample, axis, ys, h, grid, h_scale, kernel)


@dataclass(frozen=True)
class AsymptoticConstants:
    """Pointwise bias factor b and variance factor v^2 of the second-stage
    smoother's normal limit."""

    b: float
    v2: float

    def __post_init__(self):
        if self.v2 < 0:
            raise ParameterError("variance factor cannot be negative")


def asymptotic_constants(
    x1: float,
    m1_prime,
    m1_double_prime,
    f1,
    f1_prime,
    cond_var,
    kernel: KernelSpec = QUARTIC,
) -> AsymptoticConstants:
    """Evaluate the bias/variance constants of the limit distribution at x1.

    All functional inputs are callables on the unit scale: the first two
    derivatives of the component, the marginal density and its derivative,
    and the conditional noise variance given this coordinate.
    """
    fx = float(f1(x1))
    if fx <= 0.0:
        raise DomainError(f"marginal density must be positive at x1={x1:g}")
    b = kernel.mu2_k * (
        float(m1_double_prime(x1)) * fx / 2.0 + float(m1_prime(x1)) * float(f1_prime(x1))
    ) / fx
    v2 = kernel.r_k * float(cond_var(x1)) / fx
    return AsymptoticConstants(b=b, v2=v2)


@dataclass(frozen=True)
class BiasInputs:
    """Truth callables needed for analytic bias centering of a band."""

    m_prime: object
    m_double_prime: object
    f: object
    f_prime: object


@dataclass(frozen=True)
class AdditiveFit:
    """All second-stage component curves plus the estimated constant."""

    c_hat: float
    components: tuple

    def predict(self, x_unit):
        """Constant plus the sum of interpolated component values."""
        x_unit = np.atleast_2d(np.asarray(x_unit, dtype=float))
        if x_unit.shape[1] != len(self.components):
            raise ParameterError(
                f"expected {len(self.components)} axes, got {x_unit.shape[1]}"
            )
        total = np.full(x_unit.shape[0], self.c_hat)
        for a, fit in enumerate(self.components):
            total += fit(x_unit[:, a])
        return total

    def residuals(self, sample: RegressionSample):
        return sample.y - self.predict(sample.x)


def full_fit(
    sample: RegressionSample,
    pilot: PilotFit,
    h_per_axis=None,
    grids=None,
    h_scale: float = DEFAULT_H_SCALE,
    kernel: KernelSpec = QUARTIC,
) -> AdditiveFit:
    """Fit every component with its own bandwidth and assemble the additive
    predictor ``c_hat + sum of components``."""
    d = sample.d
    hs = h_per_axis if h_per_axis is not None else [None] * d
    gs = grids if grids is not None else [None] * d
    comps = tuple(
        spbk_component(sample, pilot, a, h=hs[a], grid=gs[a], h_scale=h_scale,
                       kernel=kernel)
        for a in range(d)
    )
    return AdditiveFit(c_hat=pilot.c_hat, components=comps)


def confidence_band(
    fit: SpbkFit,
    sample: RegressionSample,
    full: AdditiveFit,
    level: float = 0.95,
    bias: BiasInputs | None = None,
    kernel: KernelSpec = QUARTIC,
) -> SpbkFit:
    """Attach asymptotic pointwise confidence bands to a component curve.

    At interior grid points the band is centered at the estimate (or at the
    estimate minus ``b(x) h^2`` when analytic bias inputs are supplied) with
    half-width ``z * sqrt(sigma2_hat(x) * int(K^2) / (n h f_hat(x)))``, where
    ``sigma2_hat`` smooths the squared full-fit residuals with the same
    bandwidth and ``f_hat`` is the kernel density estimate on this axis.
    Non-interior points and points with a vanishing density estimate carry
    no band.
    """
    if not 0.0 < level < 1.0:
        raise ParameterError("confidence level must lie in (0, 1)")
    z = float(norm.ppf(0.5 + level / 2.0))
    xs = sample.x[:, fit.axis]
    r2 = full.residuals(sample) ** 2
    s2, s2_ok = nw_at_points(xs, r2, fit.h, fit.grid, kernel)
    f_hat = kde_at_points(xs, fit.h, fit.grid, kernel)

    ok = fit.interior & fit.defined & s2_ok & (f_hat > 0.0)
    suppressed = fit.interior & ~(f_hat > 0.0)
    if np.any(suppressed):
        warnings.warn(
            f"axis {fit.axis}: zero density estimate at "
            f"{int(suppressed.sum())} interior grid point(s); band suppressed",
            stacklevel=2,
        )

    center = fit.values.copy()
    if bias is not None:
        h2 = fit.h.h ** 2
        for i in np.flatnonzero(ok):
            x = float(fit.grid[i])
            const = asymptotic_constants(
                x, bias.m_prime, bias.m_double_prime, bias.f, bias.f_prime,
                lambda _: 0.0, kernel,
            )
            center[i] -= const.b * h2

    half = np.full(fit.grid.shape, np.nan)
    n, hv = sample.n, fit.h.h
    half[ok] = z * np.sqrt(s2[ok] * kernel.r_k / (n * hv * f_hat[ok]))
    lo = np.where(ok, center - half, np.nan)
    hi = np.where(ok, center + half, np.nan)
    return replace(fit, band_lo=lo, band_hi=hi)
