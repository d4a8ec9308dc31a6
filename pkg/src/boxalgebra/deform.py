"""Entropy-weighted combination of CHSH limits and the bound equation.

The combination of two limits Y and X is the ordinary integral

    Z(Y, X) = integral_0^1 w(a, T) Y^a X^(1-a) da,
    w(a, T) = exp(T * S(a)),   S(a) = -a ln a - (1-a) ln(1-a),

with w extended to 0 at the endpoints.  Z is strictly increasing in X,
so the bound equation Z(2, X) = 4 has a unique root on [2, 4]; at T = 1
it sits about 0.17% below the Tsirelson bound 2*sqrt(2).

The sup-valued (idempotent) reading of the same integrand is exposed as
idempotent_combined_chsh for comparison; at T = 1 its value is X + Y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .boxmodel import TSIRELSON_BOUND
from .errors import BracketError, NumericError, ValidationError
from .semiring import idempotent_integral

DEFAULT_QUAD_ORDER = 128
DEFAULT_ROOT_TOL = 1e-8
DEFAULT_TARGET = 4.0
QUAD_CONVERGENCE_TOL = 1e-8
MAX_BISECTION_ITERATIONS = 200

_X_RANGE = (2.0, 4.0)


@dataclass(frozen=True)
class DeformationParams:
    """Knobs of the combination integral and the root solve.

    ``target`` defaults to 4 (the no-signaling ceiling of the bound
    equation); round-trip studies may set any positive value.
    """

    T: float = 1.0
    quad_order: int = DEFAULT_QUAD_ORDER
    root_tol: float = DEFAULT_ROOT_TOL
    target: float = DEFAULT_TARGET

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T > 0.0):
            raise ValidationError(f"deformation parameter T must be positive, got {self.T}")
        if not isinstance(self.quad_order, (int, np.integer)) or self.quad_order < 8:
            raise ValidationError(f"quad_order must be an integer >= 8, got {self.quad_order!r}")
        if not (math.isfinite(self.root_tol) and self.root_tol > 0.0):
            raise ValidationError(f"root_tol must be positive, got {self.root_tol}")
        if not (math.isfinite(self.target) and self.target > 0.0):
            raise ValidationError(f"target must be positive, got {self.target}")


@dataclass(frozen=True)
class CombineResult:
    Z: float
    abs_error_estimate: float
    n_evals: int


@dataclass(frozen=True)
class SolveResult:
    x_max: float
    residual: float
    iterations: int
    bracket: tuple[float, float]
    gap_to_tsirelson: float


@dataclass(frozen=True)
class SweepRow:
    """One row of a T sweep; failed rows carry NaNs and an error message."""

    T: float
    x_max: float
    residual: float
    gap: float
    error: str | None = None


def binary_entropy(alpha):
    """Natural-log binary entropy, extended continuously to 0 at 0 and 1.

    Accepts a scalar or an ndarray in [0, 1].
    """
    arr = np.asarray(alpha, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValidationError("entropy argument must lie in [0, 1]")
    out = np.zeros_like(arr)
    interior = (arr > 0.0) & (arr < 1.0)
    a = arr[interior]
    out[interior] = -a * np.log(a) - (1.0 - a) * np.log1p(-a)
    return float(out) if arr.ndim == 0 else out


def omega(alpha, T: float):
    """Deformation weight exp(T * S(alpha)), set to exactly 0 at the endpoints."""
    if not (math.isfinite(T) and T > 0.0):
        raise ValidationError(f"deformation parameter T must be positive, got {T}")
    arr = np.asarray(alpha, dtype=float)
    out = np.exp(T * binary_entropy(arr))
    endpoint = (arr == 0.0) | (arr == 1.0)
    out = np.where(endpoint, 0.0, out)
    return float(out) if arr.ndim == 0 else out


def combine_integrand(alpha, X: float, Y: float, T: float):
    """w(alpha, T) * Y^alpha * X^(1-alpha) for limits X, Y in [2, 4]."""
    for name, v in (("X", X), ("Y", Y)):
        if not (math.isfinite(v) and _X_RANGE[0] <= v <= _X_RANGE[1]):
            raise ValidationError(f"{name} must lie in [2, 4], got {v}")
    arr = np.asarray(alpha, dtype=float)
    out = omega(arr, T) * Y**arr * X ** (1.0 - arr)
    return float(out) if arr.ndim == 0 else out


@lru_cache(maxsize=8)
def _unit_interval_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped from [-1, 1] to (0, 1)."""
    t, w = np.polynomial.legendre.leggauss(order)
    nodes = 0.5 * (t + 1.0)
    weights = 0.5 * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _quadrature_z(X: float, Y: float, T: float, order: int) -> float:
    nodes, weights = _unit_interval_nodes(order)
    return float(weights @ combine_integrand(nodes, X, Y, T))


def combined_chsh(Y: float, X: float, params: DeformationParams | None = None) -> CombineResult:
    """The combination integral Z(Y, X) by Gauss-Legendre quadrature.

    The nodes are interior to (0, 1), so the endpoint extension of the
    weight never enters.  The error estimate is the change under
    doubling the order; if it stays above QUAD_CONVERGENCE_TOL after
    doubling twice, the estimate is declared non-convergent.
    """
    params = params or DeformationParams()
    order = params.quad_order
    z_base = _quadrature_z(X, Y, params.T, order)
    z_check = _quadrature_z(X, Y, params.T, 2 * order)
    n_evals = 3 * order
    estimate = abs(z_check - z_base)
    if estimate <= QUAD_CONVERGENCE_TOL:
        return CombineResult(Z=z_base, abs_error_estimate=estimate, n_evals=n_evals)
    z_refined = _quadrature_z(X, Y, params.T, 4 * order)
    n_evals += 4 * order
    estimate = abs(z_refined - z_check)
    if estimate <= QUAD_CONVERGENCE_TOL:
        return CombineResult(Z=z_check, abs_error_estimate=estimate, n_evals=n_evals)
    raise NumericError(
        f"quadrature estimate {estimate:.3e} above {QUAD_CONVERGENCE_TOL} after doubling twice"
    )


def tsirelson_gap(x: float) -> float:
    """Relative gap (2*sqrt(2) - x) / (2*sqrt(2))."""
    if not (math.isfinite(x) and x > 0.0):
        raise ValidationError(f"gap argument must be positive, got {x}")
    return (TSIRELSON_BOUND - x) / TSIRELSON_BOUND


def solve_xmax(params: DeformationParams | None = None) -> SolveResult:
    """Root of Z(2, X) = target by bisection on [2, 4].

    Relies on strict monotonicity of Z in X; stops when the residual
    Z(2, X) - target is within root_tol.  The target must satisfy
    Z(2, 2) < target <= Z(2, 4).
    """
    params = params or DeformationParams()
    lo, hi = _X_RANGE
    z_lo = combined_chsh(2.0, lo, params).Z
    z_hi = combined_chsh(2.0, hi, params).Z
    if not (z_lo < params.target <= z_hi):
        raise BracketError(
            f"target {params.target} outside attainable bracket ({z_lo:.6f}, {z_hi:.6f}]"
        )
    for iterations in range(1, MAX_BISECTION_ITERATIONS + 1):
        x = 0.5 * (lo + hi)
        residual = combined_chsh(2.0, x, params).Z - params.target
        if abs(residual) <= params.root_tol:
            break
        if residual < 0.0:
            lo = x
        else:
            hi = x
    else:
        raise NumericError(
            f"bisection residual {residual:.3e} above {params.root_tol} "
            f"after {MAX_BISECTION_ITERATIONS} iterations"
        )
    return SolveResult(
        x_max=x,
        residual=residual,
        iterations=iterations,
        bracket=(lo, hi),
        gap_to_tsirelson=tsirelson_gap(x),
    )


def sweep_T(T_values, params: DeformationParams | None = None) -> list[SweepRow]:
    """Run solve_xmax for each T, in the given order.

    Bracket and convergence failures are reported in the row (NaN
    values plus the message) and the sweep continues.
    """
    params = params or DeformationParams()
    rows = []
    for t in T_values:
        try:
            result = solve_xmax(replace(params, T=float(t)))
            rows.append(
                SweepRow(
                    T=float(t),
                    x_max=result.x_max,
                    residual=result.residual,
                    gap=result.gap_to_tsirelson,
                )
            )
        except (NumericError, ValidationError) as exc:
            nan = float("nan")
            rows.append(SweepRow(T=float(t), x_max=nan, residual=nan, gap=nan, error=str(exc)))
    return rows


def idempotent_combined_chsh(
    Y: float, X: float, T: float = 1.0, grid_size: int = 1_000_000
) -> float:
    """Sup-valued reading of the combination integrand over (0, 1)."""
    combine_integrand(0.5, X, Y, T)  # validate the scalar arguments once
    return idempotent_integral(lambda a: combine_integrand(a, X, Y, T), grid_size)
