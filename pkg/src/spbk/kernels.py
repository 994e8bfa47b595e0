"""Kernel primitives: quartic kernel, Nadaraya-Watson smoothing, KDE,
and the rule-of-thumb bandwidth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateAxisError, EmptyWindowError, ParameterError, SizingError

__all__ = [
    "KernelSpec",
    "QUARTIC",
    "Bandwidth",
    "quartic",
    "kernel_fn",
    "nw_estimate",
    "nw_at_points",
    "kde",
    "kde_at_points",
    "rot_bandwidth",
    "plugin_bandwidth",
    "DEFAULT_CH",
    "DEFAULT_H_SCALE",
]

# Constant of the spread-based bandwidth rule on the normalized [0,1] scale.
DEFAULT_CH = 2.0

# Scale multiplier of the plug-in rule-of-thumb; 1.0 is the plain rule.
DEFAULT_H_SCALE = 1.0

# Plug-in bandwidths are clamped to [0.025, 0.35] on the unit scale: the floor
# keeps windows nonempty on the default 101-point grid, the cap keeps the
# interior range [h, 1-h] from collapsing when the curvature proxy is
# noise-level (flat targets).
_H_FLOOR = 0.025
_H_CAP = 0.35


def quartic(u):
    """Quartic (biweight) kernel (15/16)(1 - u^2)^2 on [-1, 1], 0 outside."""
    u = np.asarray(u, dtype=float)
    w = 1.0 - u * u
    out = 0.9375 * w * w
    return np.where(np.abs(u) <= 1.0, out, 0.0)


@dataclass(frozen=True)
class KernelSpec:
    """A kernel shape plus its moment constants.

    ``r_k`` is the integral of K^2 and ``mu2_k`` the second moment
    (integral of u^2 K); both feed the asymptotic variance/bias formulas.
    """

    shape: str = "quartic"
    r_k: float = 5.0 / 7.0
    mu2_k: float = 1.0 / 7.0
    support: tuple = (-1.0, 1.0)


QUARTIC = KernelSpec()

_KERNEL_FNS = {"quartic": quartic}


def kernel_fn(spec: KernelSpec):
    """Callable for a kernel spec's shape."""
    try:
        return _KERNEL_FNS[spec.shape]
    except KeyError:
        raise ParameterError(f"unknown kernel shape {spec.shape!r}") from None


@dataclass(frozen=True)
class Bandwidth:
    """Kernel half-window on the normalized [0, 1] scale."""

    h: float

    def __post_init__(self):
        if not 0.0 < self.h < 1.0:
            raise ParameterError(f"bandwidth must lie in (0, 1), got {self.h!r}")


def _h_value(h) -> float:
    if isinstance(h, Bandwidth):
        return h.h
    return Bandwidth(float(h)).h


def nw_at_points(xs, ys, h, points, kernel: KernelSpec = QUARTIC):
    """Nadaraya-Watson estimates at many points at once.

    Returns ``(values, defined)``; points with an empty kernel window get
    NaN and ``defined`` false rather than raising.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    points = np.asarray(points, dtype=float)
    if xs.shape != ys.shape:
        raise SizingError("xs and ys must have equal length")
    hv = _h_value(h)
    k = kernel_fn(kernel)
    w = k((xs[None, :] - points[:, None]) / hv)
    den = w.sum(axis=1)
    defined = den > 0.0
    values = np.full(points.shape, np.nan)
    if np.any(defined):
        values[defined] = (w[defined] @ ys) / den[defined]
    return values, defined


def nw_estimate(xs, ys, h, x0: float, kernel: KernelSpec = QUARTIC) -> float:
    """Kernel-weighted mean of ``ys`` around ``x0``; the ratio of the two
    kernel sums.  Raises :class:`EmptyWindowError` when no observation lies
    within the window."""
    values, defined = nw_at_points(xs, ys, h, np.asarray([x0], dtype=float), kernel)
    if not defined[0]:
        raise EmptyWindowError(x0, _h_value(h))
    return float(values[0])


def kde_at_points(xs, h, points, kernel: KernelSpec = QUARTIC):
    """Kernel density estimates at many points (0 where the window is empty)."""
    xs = np.asarray(xs, dtype=float)
    points = np.asarray(points, dtype=float)
    hv = _h_value(h)
    k = kernel_fn(kernel)
    w = k((xs[None, :] - points[:, None]) / hv)
    return w.sum(axis=1) / (xs.shape[0] * hv)


def kde(xs, h, x0: float, kernel: KernelSpec = QUARTIC) -> float:
    return float(kde_at_points(xs, h, np.asarray([x0], dtype=float), kernel)[0])


def rot_bandwidth(xs, c_h: float = DEFAULT_CH) -> Bandwidth:
    """Spread-based bandwidth ``c_h * sd(xs) * n^(-1/5)``, capped at 0.5."""
    xs = np.asarray(xs, dtype=float)
    if xs.shape[0] < 2:
        raise SizingError("bandwidth selection needs at least two points")
    if c_h <= 0:
        raise ParameterError("bandwidth constant must be positive")
    sd = float(np.std(xs, ddof=1))
    if sd <= 0.0:
        raise DegenerateAxisError("zero-variance axis: cannot pick a bandwidth")
    return Bandwidth(min(c_h * sd * xs.shape[0] ** (-0.2), 0.5))


def plugin_bandwidth(
    xs, ys, scale: float = DEFAULT_H_SCALE, kernel: KernelSpec = QUARTIC
) -> Bandwidth:
    """Response-adaptive rule-of-thumb bandwidth for regression smoothing.

    A global quartic polynomial fit of ``ys`` on ``xs`` supplies a curvature
    proxy and a residual variance; the bandwidth is the AMISE-form rule

        (r_k / mu2_k^2)^(1/5) * (sigma2 * range / sum_i m''(x_i)^2)^(1/5)

    times ``scale``, clamped to [0.025, 0.35] on the unit scale.  Flat targets
    get wide windows (the curvature sum is noise-level), curved targets get
    narrow ones.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape:
        raise SizingError("xs and ys must have equal length")
    if xs.shape[0] < 9:
        raise SizingError("plug-in bandwidth needs at least 9 points")
    if scale <= 0:
        raise ParameterError("bandwidth scale must be positive")
    span = float(xs.max() - xs.min())
    if span <= 0.0:
        raise DegenerateAxisError("zero-variance axis: cannot pick a bandwidth")
    coef = np.polyfit(xs, ys, 4)
    resid = ys - np.polyval(coef, xs)
    sigma2 = float(resid @ resid) / (xs.shape[0] - 5)
    curv = np.polyval(np.polyder(coef, 2), xs)
    curv_sum = float(curv @ curv)
    if sigma2 <= 0.0:
        return Bandwidth(_H_FLOOR)
    if curv_sum <= 0.0:
        return Bandwidth(_H_CAP)
    c_k = (kernel.r_k / kernel.mu2_k**2) ** 0.2
    h = scale * c_k * (sigma2 * span / curv_sum) ** 0.2
    return Bandwidth(min(max(h, _H_FLOOR), _H_CAP))
