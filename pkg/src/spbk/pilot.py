"""Stage one: undersmoothed constant-spline pilot fit of all additive
components, empirically centered."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .basis import BasisSpec, bin_indices, indicator_design
from .errors import DomainError, ParameterError, SizingError
from .lsq import solve_least_squares
from .sample import RegressionSample

__all__ = ["PilotFit", "choose_knot_count", "fit_pilot", "pilot_component_at"]


def choose_knot_count(n: int, d: int, c: float) -> int:
    """Interior-knot count ``min(floor(c * n^(2/5) * ln n) + 1, floor((n/2 - 1)/d))``.

    The second branch keeps the column count ``1 + d*N`` at or below n/2.
    The result is clamped to at least 1.
    """
    if c <= 0:
        raise ParameterError("knot-rule constant must be positive")
    if n < 2 * (1 + d):
        raise SizingError(f"need n >= {2 * (1 + d)} rows for d={d}, got {n}")
    by_rate = math.floor(c * n ** 0.4 * math.log(n)) + 1
    by_cap = math.floor((n / 2.0 - 1.0) / d)
    return max(1, min(by_rate, by_cap))


@dataclass(frozen=True)
class PilotFit:
    """Indicator-basis pilot fit with empirically centered components.

    ``lam[a, J-1]`` is the coefficient of bin J on axis a (0 where dropped);
    component a evaluates to that coefficient minus ``comp_offsets[a]``.
    ``c_hat`` is the sample mean of the responses, the constant used for
    pseudo-responses downstream; ``m_hat_c`` is the fitted-constant
    diagnostic (intercept plus the centering offsets), which coincides with
    ``c_hat`` whenever the intercept column is retained.
    """

    spec: BasisSpec
    lambda0: float
    lam: np.ndarray
    comp_offsets: np.ndarray
    c_hat: float
    m_hat_c: float
    dropped_bins: tuple
    n_used: int

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float)
        lam.setflags(write=False)
        off = np.array(self.comp_offsets, dtype=float)
        off.setflags(write=False)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "comp_offsets", off)

    def component_values(self, x_unit):
        """Centered component values at an (n, d) matrix of unit-cube points."""
        x_unit = np.atleast_2d(np.asarray(x_unit, dtype=float))
        if x_unit.shape[1] != self.spec.dims:
            raise ParameterError(
                f"expected {self.spec.dims} axes, got {x_unit.shape[1]}"
            )
        out = np.empty_like(x_unit)
        for a in range(self.spec.dims):
            out[:, a] = pilot_component_at(self, a, x_unit[:, a])
        return out

    def fitted_values(self, x_unit):
        """Additive reassembly ``m_hat_c + sum of components`` at given points."""
        return self.m_hat_c + self.component_values(x_unit).sum(axis=1)

    def to_json(self) -> str:
        doc = {
            "n_knots": self.spec.n_knots,
            "dims": self.spec.dims,
            "lambda0": self.lambda0,
            "lambda": self.lam.tolist(),
            "comp_offsets": self.comp_offsets.tolist(),
            "c_hat": self.c_hat,
            "m_hat_c": self.m_hat_c,
            "dropped_bins": [list(b) for b in self.dropped_bins],
            "n_used": self.n_used,
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "PilotFit":
        doc = json.loads(text)
        return cls(
            spec=BasisSpec(doc["n_knots"], doc["dims"]),
            lambda0=float(doc["lambda0"]),
            lam=np.asarray(doc["lambda"], dtype=float),
            comp_offsets=np.asarray(doc["comp_offsets"], dtype=float),
            c_hat=float(doc["c_hat"]),
            m_hat_c=float(doc["m_hat_c"]),
            dropped_bins=tuple((int(a), int(j)) for a, j in doc["dropped_bins"]),
            n_used=int(doc["n_used"]),
        )


def fit_pilot(sample: RegressionSample, n_knots: int) -> PilotFit:
    """Least-squares indicator-spline fit on a unit-cube sample.

    Builds the ``n x (1 + d*N)`` indicator design, solves it with the
    rank-guarded solver (empty bins drop out with coefficient 0), and
    centers each axis's fitted component so its empirical mean over the
    design rows is zero.
    """
    n, d = sample.n, sample.d
    if n < 2 * (1 + d):
        raise SizingError(f"need n >= {2 * (1 + d)} rows for d={d}, got {n}")
    spec = BasisSpec(n_knots, d)
    design = indicator_design(sample.x, spec)
    sol = solve_least_squares(design, sample.y)

    N = spec.n_knots
    lam = sol.coeffs[1:].reshape(d, N)
    raw = np.zeros((n, d))
    for a in range(d):
        j = bin_indices(sample.x[:, a], N)
        hit = j >= 1
        raw[hit, a] = lam[a, j[hit] - 1]
    offsets = raw.mean(axis=0)

    dropped_bins = tuple(
        (int((col - 1) // N), int((col - 1) % N) + 1) for col in sol.dropped
    )
    lambda0 = float(sol.coeffs[0])
    return PilotFit(
        spec=spec,
        lambda0=lambda0,
        lam=lam,
        comp_offsets=offsets,
        c_hat=float(np.mean(sample.y)),
        m_hat_c=lambda0 + float(offsets.sum()),
        dropped_bins=dropped_bins,
        n_used=n,
    )


def pilot_component_at(fit: PilotFit, alpha: int, x):
    """Centered pilot component of axis ``alpha`` at unit-interval points.

    Piecewise constant: the bin coefficient minus the axis centering offset;
    points in bin 0 (or in a dropped bin) get minus the offset alone.
    """
    if not 0 <= alpha < fit.spec.dims:
        raise DomainError(f"axis {alpha} out of range for d={fit.spec.dims}")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    j = bin_indices(np.atleast_1d(x), fit.spec.n_knots)
    values = np.where(j >= 1, fit.lam[alpha, np.maximum(j - 1, 0)], 0.0)
    values = values - fit.comp_offsets[alpha]
    return float(values[0]) if scalar else values
