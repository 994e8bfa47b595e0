"""Dense least squares with rank diagnostics for the pilot regression."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegenerateDesignError, SizingError

__all__ = ["LsqSolution", "solve_least_squares"]

RANK_TOL = 1e-10


@dataclass(frozen=True)
class LsqSolution:
    """Least-squares coefficients with the dropped-column report.

    ``coeffs[j]`` is exactly zero for every dropped column j, so fitted
    values are always ``design @ coeffs``.
    """

    coeffs: np.ndarray
    dropped: tuple
    residual_norm: float


def solve_least_squares(design, response, rank_tol: float = RANK_TOL) -> LsqSolution:
    """Minimize ``||design @ beta - response||`` by column-pivoted QR.

    Columns whose pivot magnitude falls below ``rank_tol`` times the largest
    pivot are treated as numerically rank deficient: they get coefficient 0
    and are reported in ``dropped``.  The indicator designs produced by the
    spline basis are 0/1 matrices, so deficiency only arises from empty or
    duplicated bins.
    """
    a = np.atleast_2d(np.asarray(design, dtype=float))
    y = np.asarray(response, dtype=float)
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise SizingError("design must have at least one row and one column")
    if a.shape[0] != y.shape[0]:
        raise SizingError(
            f"design has {a.shape[0]} rows but response has {y.shape[0]}"
        )

    q, r, piv = scipy.linalg.qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] <= 0.0:
        raise DegenerateDesignError("all design columns are numerically zero")
    rank = int(np.sum(diag >= rank_tol * diag[0]))
    if rank == 0:
        raise DegenerateDesignError("all design columns are numerically zero")

    z = q[:, :rank].T @ y
    beta_kept = scipy.linalg.solve_triangular(r[:rank, :rank], z)
    coeffs = np.zeros(a.shape[1])
    coeffs[piv[:rank]] = beta_kept
    residual = y - a @ coeffs
    return LsqSolution(
        coeffs=coeffs,
        dropped=tuple(sorted(int(j) for j in piv[rank:])),
        residual_norm=float(np.linalg.norm(residual)),
    )
