"""Constant B-spline (indicator) basis on an equispaced partition of [0, 1].

The fitting path uses the indicator parameterization directly: one intercept
column plus, per axis, one 0/1 column per bin J = 1..N (bin 0 is the dropped
reference).  The centered/standardized variant spans the same space and is
exposed for equivalence testing; its norms depend on the sample and are
supplied by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError, SizingError

__all__ = [
    "BasisSpec",
    "bin_index",
    "bin_indices",
    "indicator_row",
    "indicator_design",
    "empirical_basis_stats",
    "centered_basis_row",
    "centered_design",
    "empirical_inner_product",
]


@dataclass(frozen=True)
class BasisSpec:
    """Indicator basis with ``n_knots`` interior knots on each of ``dims`` axes."""

    n_knots: int
    dims: int

    def __post_init__(self):
        if self.n_knots < 1:
            raise ParameterError("need at least one interior knot")
        if self.dims < 1:
            raise ParameterError("need at least one axis")

    @property
    def bin_width(self) -> float:
        return 1.0 / (self.n_knots + 1)

    @property
    def n_bins(self) -> int:
        return self.n_knots + 1

    @property
    def n_columns(self) -> int:
        return 1 + self.dims * self.n_knots


def bin_indices(x, n_knots: int):
    """Vectorized bin lookup: J such that J*H <= x < (J+1)*H, with x=1 -> N."""
    x = np.asarray(x, dtype=float)
    if np.any((x < 0.0) | (x > 1.0)):
        bad = x[(x < 0.0) | (x > 1.0)].flat[0]
        raise DomainError(f"coordinate {bad:g} lies outside [0, 1]")
    j = np.floor(x * (n_knots + 1)).astype(int)
    # right endpoint of the last bin is closed
    return np.minimum(j, n_knots)


def bin_index(x: float, n_knots: int) -> int:
    """Bin number of a single coordinate (0-based, 0..N)."""
    return int(bin_indices(np.asarray([x]), n_knots)[0])


def indicator_design(x_unit, spec: BasisSpec):
    """Dense indicator design matrix, shape (n, 1 + dims*n_knots).

    Column 0 is the intercept; column 1 + a*N + (J-1) is the indicator of
    bin J >= 1 on axis a.  Rows whose coordinate falls in bin 0 have an
    all-zero block for that axis.
    """
    x_unit = np.atleast_2d(np.asarray(x_unit, dtype=float))
    n, d = x_unit.shape
    if d != spec.dims:
        raise ParameterError(f"design expects {spec.dims} axes, got {d}")
    N = spec.n_knots
    design = np.zeros((n, spec.n_columns))
    design[:, 0] = 1.0
    rows = np.arange(n)
    for a in range(d):
        j = bin_indices(x_unit[:, a], N)
        hit = j >= 1
        design[rows[hit], 1 + a * N + (j[hit] - 1)] = 1.0
    return design


def indicator_row(xrow, spec: BasisSpec):
    """Single design row for one point of the unit cube."""
    return indicator_design(np.asarray(xrow, dtype=float)[None, :], spec)[0]


def empirical_basis_stats(x_unit, spec: BasisSpec):
    """Empirical norm ratios and centered-basis norms from a sample.

    Returns ``(ratios, b_norms)``, both of shape (dims, n_knots):
    ``ratios[a, j]`` is the ratio of the empirical norms of the indicators
    of bins j+1 and j on axis a, and ``b_norms[a, j]`` the empirical norm
    of the corresponding centered difference.  Every bin of every axis must
    contain at least one observation.
    """
    x_unit = np.atleast_2d(np.asarray(x_unit, dtype=float))
    n, d = x_unit.shape
    if d != spec.dims:
        raise ParameterError(f"expected {spec.dims} axes, got {d}")
    N = spec.n_knots
    ratios = np.empty((d, N))
    b_norms = np.empty((d, N))
    for a in range(d):
        counts = np.bincount(bin_indices(x_unit[:, a], N), minlength=N + 1)
        if np.any(counts == 0):
            empty = int(np.flatnonzero(counts == 0)[0])
            raise ParameterError(
                f"bin {empty} on axis {a} is empty; centered basis undefined"
            )
        # ||I_J||^2_{2,n} = count_J / n; supports of consecutive bins are disjoint
        ratios[a] = np.sqrt(counts[1:] / counts[:-1])
        b_norms[a] = np.sqrt((counts[1:] + ratios[a] ** 2 * counts[:-1]) / n)
    return ratios, b_norms


def centered_basis_row(xrow, spec: BasisSpec, ratios, b_norms):
    """Standardized centered-basis values at one point, shape (dims*n_knots,).

    Entry (a, j) pairs bins j and j+1 of axis a: indicator of bin j+1 minus
    ``ratios[a, j]`` times the indicator of bin j, divided by ``b_norms[a, j]``.
    """
    xrow = np.asarray(xrow, dtype=float)
    ratios = np.asarray(ratios, dtype=float)
    b_norms = np.asarray(b_norms, dtype=float)
    if np.any(ratios <= 0) or np.any(b_norms <= 0):
        raise ParameterError("norm ratios and basis norms must be positive")
    N = spec.n_knots
    out = np.zeros(spec.dims * N)
    for a in range(spec.dims):
        j = bin_index(float(xrow[a]), N)
        if j >= 1:
            out[a * N + (j - 1)] += 1.0
        if j <= N - 1:
            out[a * N + j] -= ratios[a, j]
        out[a * N : (a + 1) * N] /= b_norms[a]
    return out


def centered_design(x_unit, spec: BasisSpec, ratios, b_norms):
    """Centered-basis design matrix with an intercept column prepended."""
    x_unit = np.atleast_2d(np.asarray(x_unit, dtype=float))
    rows = [centered_basis_row(r, spec, ratios, b_norms) for r in x_unit]
    return np.column_stack([np.ones(x_unit.shape[0]), np.vstack(rows)])


def empirical_inner_product(phi_values, psi_values) -> float:
    """Mean of the elementwise product of two function-value vectors."""
    phi = np.asarray(phi_values, dtype=float)
    psi = np.asarray(psi_values, dtype=float)
    if phi.shape != psi.shape:
        raise ParameterError("value vectors must have equal length")
    if phi.size == 0:
        raise SizingError("empirical inner product of empty vectors")
    return float(np.mean(phi * psi))
