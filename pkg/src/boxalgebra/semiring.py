"""The idempotent algebra of model labels and its tropical extension.

A model label is either an additive zero (bottom) or a CHSH limit
X in [2, 4].  Addition is idempotent (take the larger limit), scalars
come from the Boolean semifield {0, 1}, and multiplication encodes the
absorption of the wiring product: a local stage (limit 2) absorbs
anything, bottom annihilates, equal labels square to themselves, and
any other product is left undefined.

Lifting a label to its positive numeric value embeds the labels into
the max-times semifield on [0, inf), where fractional powers and the
idempotent (sup) integral make sense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NumericError, UndefinedProductError, ValidationError

MIN_LIMIT = 2.0
MAX_LIMIT = 4.0

DEFAULT_GRID_SIZE = 1_000_000


@dataclass(frozen=True)
class ModelLabel:
    """A CHSH-limit label; ``value=None`` encodes the additive zero."""

    value: float | None = None

    def __post_init__(self):
        if self.value is None:
            return
        v = float(self.value)
        if not math.isfinite(v) or not (MIN_LIMIT <= v <= MAX_LIMIT):
            raise ValidationError(f"CHSH limit must lie in [2, 4], got {self.value}")
        object.__setattr__(self, "value", v)

    @classmethod
    def bottom(cls) -> "ModelLabel":
        return cls(None)

    @property
    def is_bottom(self) -> bool:
        return self.value is None


BOTTOM = ModelLabel.bottom()


@dataclass(frozen=True)
class LiftValue:
    """A label lifted to its positive numeric value (supports real powers)."""

    v: float

    def __post_init__(self):
        if not (math.isfinite(self.v) and self.v > 0.0):
            raise ValidationError(f"lift value must be a positive real, got {self.v}")


@dataclass(frozen=True)
class TropicalValue:
    """An element of the max-times semifield on [0, inf)."""

    t: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t >= 0.0):
            raise ValidationError(f"tropical value must be a nonnegative real, got {self.t}")


TROP_ZERO = TropicalValue(0.0)
TROP_ONE = TropicalValue(1.0)


def label_add(a: ModelLabel, b: ModelLabel) -> ModelLabel:
    """Idempotent addition: bottom is the identity, otherwise the larger limit."""
    if a.is_bottom:
        return b
    if b.is_bottom:
        return a
    return a if a.value >= b.value else b


def scalar_act(lam: int, a: ModelLabel) -> ModelLabel:
    """Boolean scalar action: 1*a = a, 0*a = bottom."""
    if lam not in (0, 1):
        raise ValidationError(f"scalar must be 0 or 1, got {lam!r}")
    return a if lam == 1 else BOTTOM


def label_mul(a: ModelLabel, b: ModelLabel) -> ModelLabel:
    """Wiring product on labels: bottom annihilates, the local label absorbs.

    label_mul(local, X) = label_mul(X, local) = local for every X, and
    equal labels multiply to themselves.  The product of two distinct
    labels both strictly above the local bound is not defined by this
    algebra and raises UndefinedProductError.
    """
    if a.is_bottom or b.is_bottom:
        return BOTTOM
    if a.value == MIN_LIMIT or b.value == MIN_LIMIT:
        return ModelLabel(MIN_LIMIT)
    if a.value == b.value:
        return a
    raise UndefinedProductError(
        f"product of distinct labels {a.value} and {b.value} above the local bound is undefined"
    )


def lift(a: ModelLabel) -> LiftValue:
    """Lift a non-bottom label to its numeric value."""
    if a.is_bottom:
        raise ValidationError("the additive zero has no lift")
    return LiftValue(a.value)


def power(l: LiftValue, alpha: float) -> LiftValue:
    """Real power of a lifted value."""
    if not math.isfinite(alpha):
        raise ValidationError(f"exponent must be finite, got {alpha}")
    return LiftValue(l.v**alpha)


def lift_mul(l1: LiftValue, l2: LiftValue) -> LiftValue:
    return LiftValue(l1.v * l2.v)


def trop_add(a: TropicalValue, b: TropicalValue) -> TropicalValue:
    """Tropical addition: max."""
    return a if a.t >= b.t else b


def trop_mul(a: TropicalValue, b: TropicalValue) -> TropicalValue:
    """Tropical multiplication: the ordinary product."""
    return TropicalValue(a.t * b.t)


def idempotent_integral(
    f: Callable[[np.ndarray | float], np.ndarray | float],
    grid_size: int = DEFAULT_GRID_SIZE,
) -> float:
    """Sup of f over a uniform open grid of (0, 1).

    The grid is the ``grid_size`` interior points k/(grid_size+1); the
    endpoints are never evaluated.  ``f`` is called once with the whole
    grid when it accepts arrays, else point by point.  Deterministic
    for a fixed grid_size.
    """
    if not isinstance(grid_size, (int, np.integer)) or grid_size < 2:
        raise ValidationError(f"grid_size must be an integer >= 2, got {grid_size!r}")
    grid = np.linspace(0.0, 1.0, int(grid_size) + 2)[1:-1]
    try:
        values = np.asarray(f(grid), dtype=float)
        if values.ndim == 0:
            values = np.full(grid.shape, float(values))
        elif values.shape != grid.shape:
            raise TypeError
    except (TypeError, ValueError):
        values = np.array([float(f(a)) for a in grid])
    if not np.all(np.isfinite(values)):
        raise NumericError("integrand produced a non-finite value on the grid")
    return float(values.max())
