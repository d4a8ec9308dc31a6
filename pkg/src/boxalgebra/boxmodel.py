"""Bipartite binary-input/binary-output behavior boxes.

A box is the joint conditional distribution p(a, b | x, y) with
x, y, a, b all in {0, 1}, stored as a (2, 2, 2, 2) array indexed
[x, y, a, b].  The flat storage order is index = 8x + 4y + 2a + b,
which is also the order of the ``{"p": [16 reals]}`` JSON format.

Conventions used throughout:

- correlator E(x,y) = P(a=b|xy) - P(a!=b|xy)
- canonical CHSH value |E00 + E01 + E10 - E11|
- facet index i = 2*x + y names the input pair whose correlator takes
  the minus sign in the symmetrized expression |sum(E) - 2*E(x,y)|
- deterministic strategies are encoded 0..3:
  0 -> constant 0, 1 -> constant 1, 2 -> identity, 3 -> negation
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import NumericError, ValidationError

NORMALIZATION_TOL = 1e-9
CLAMP_TOL = 1e-12
NO_SIGNALING_TOL = 1e-7
LP_TOL = 1e-7
FACET_SLACK = 1e-9

LOCAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)
NO_SIGNALING_BOUND = 4.0

#: strategy index -> response function on {0, 1}
STRATEGIES = (
    lambda x: 0,
    lambda x: 1,
    lambda x: x,
    lambda x: 1 - x,
)


class BehaviorBox:
    """Immutable table of the 16 joint probabilities p(a, b | x, y).

    Accepts a (2,2,2,2) array or a flat length-16 sequence in the
    canonical order.  Entries may stray outside [0, 1] by at most
    ``CLAMP_TOL`` (they are clamped); each input pair (x, y) must sum
    to 1 within ``NORMALIZATION_TOL``.
    """

    __slots__ = ("_p",)

    def __init__(self, p):
        arr = np.asarray(p, dtype=float)
        if arr.shape == (16,):
            arr = arr.reshape(2, 2, 2, 2)
        if arr.shape != (2, 2, 2, 2):
            raise ValidationError(
                f"box needs 16 probabilities in shape (16,) or (2,2,2,2), got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValidationError("box probabilities must be finite")
        if float(arr.min()) < -CLAMP_TOL or float(arr.max()) > 1.0 + CLAMP_TOL:
            raise ValidationError(
                f"box probabilities outside [{-CLAMP_TOL}, {1.0 + CLAMP_TOL}]"
            )
        arr = np.clip(arr, 0.0, 1.0)
        sums = arr.sum(axis=(2, 3))
        worst = float(np.max(np.abs(sums - 1.0)))
        if worst > NORMALIZATION_TOL:
            raise ValidationError(
                f"per-input normalization off by {worst:.3e} (> {NORMALIZATION_TOL})"
            )
        arr.setflags(write=False)
        self._p = arr

    @property
    def p(self) -> np.ndarray:
        """Read-only (2,2,2,2) probability table indexed [x, y, a, b]."""
        return self._p

    def flat(self) -> np.ndarray:
        """The 16 probabilities in canonical flat order 8x + 4y + 2a + b."""
        return self._p.reshape(16)

    def approx_equal(self, other: "BehaviorBox", tol: float = 1e-9) -> bool:
        return bool(np.max(np.abs(self._p - other._p)) <= tol)

    def __repr__(self) -> str:
        vals = ", ".join(f"{v:.6g}" for v in self.flat())
        return f"BehaviorBox([{vals}])"


@dataclass(frozen=True)
class CorrelatorTable:
    """The four correlators E(x,y), in field order E00, E01, E10, E11."""

    e00: float
    e01: float
    e10: float
    e11: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.e00, self.e01, self.e10, self.e11)

    def at(self, x: int, y: int) -> float:
        return self.as_tuple()[2 * x + y]


@dataclass(frozen=True)
class NoSignalingReport:
    """Marginal-consistency residuals; ``ok`` means all within tolerance.

    ``alice_residuals[x][a]`` is |P(a|x, y=0) - P(a|x, y=1)| and
    ``bob_residuals[y][b]`` is |P(b|x=0, y) - P(b|x=1, y)|.
    """

    ok: bool
    max_residual: float
    alice_residuals: tuple[tuple[float, float], tuple[float, float]]
    bob_residuals: tuple[tuple[float, float], tuple[float, float]]


@dataclass(frozen=True)
class LocalityReport:
    """Verdict of a local-polytope membership test.

    ``method`` is "facets" or "lp".  ``violated_facet`` names the first
    maximizing facet when the facet test rejects; ``lp_weights`` carries
    the 16 vertex weights witnessing membership when the LP accepts.
    """

    is_local: bool
    method: str
    violated_facet: int | None
    max_facet_value: float
    lp_weights: tuple[float, ...] | None


def correlators(box: BehaviorBox) -> CorrelatorTable:
    """E(x,y) = p(x,y,0,0) + p(x,y,1,1) - p(x,y,0,1) - p(x,y,1,0)."""
    p = box.p
    e = p[:, :, 0, 0] + p[:, :, 1, 1] - p[:, :, 0, 1] - p[:, :, 1, 0]
    return CorrelatorTable(float(e[0, 0]), float(e[0, 1]), float(e[1, 0]), float(e[1, 1]))


def chsh_canonical(box: BehaviorBox) -> float:
    """The canonical CHSH value |E00 + E01 + E10 - E11|."""
    e = correlators(box)
    return abs(e.e00 + e.e01 + e.e10 - e.e11)


def chsh_max(box: BehaviorBox) -> tuple[float, list[int]]:
    """Max CHSH value over the four input-relabeled sign patterns.

    Returns the maximum of |sum(E) - 2*E(x,y)| over (x,y) together with
    the sorted list of maximizing facet indices (ties reported, not
    broken; equality is exact on the computed values).
    """
    e = correlators(box).as_tuple()
    total = sum(e)
    values = [abs(total - 2.0 * e[i]) for i in range(4)]
    best = max(values)
    return best, [i for i, v in enumerate(values) if v == best]


def check_no_signaling(box: BehaviorBox, tol: float = NO_SIGNALING_TOL) -> NoSignalingReport:
    """Test that each party's output marginals ignore the other's input."""
    pa = box.p.sum(axis=3)  # [x, y, a]
    pb = box.p.sum(axis=2)  # [x, y, b]
    alice = tuple(
        tuple(abs(float(pa[x, 0, a] - pa[x, 1, a])) for a in range(2)) for x in range(2)
    )
    bob = tuple(
        tuple(abs(float(pb[0, y, b] - pb[1, y, b])) for b in range(2)) for y in range(2)
    )
    worst = max(max(row) for row in alice + bob)
    return NoSignalingReport(worst <= tol, worst, alice, bob)


def deterministic_box(fa: int, fb: int) -> BehaviorBox:
    """The local deterministic box with strategies ``fa`` for Alice, ``fb`` for Bob."""
    if fa not in range(4) or fb not in range(4):
        raise ValidationError(f"strategy indices must be in 0..3, got ({fa}, {fb})")
    fA, fB = STRATEGIES[fa], STRATEGIES[fb]
    p = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            p[x, y, fA(x), fB(y)] = 1.0
    return BehaviorBox(p)


def pr_box() -> BehaviorBox:
    """The extremal no-signaling box: a xor b = x*y with uniform outcomes."""
    p = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            for a in range(2):
                for b in range(2):
                    if a ^ b == x * y:
                        p[x, y, a, b] = 0.5
    return BehaviorBox(p)


def uniform_box() -> BehaviorBox:
    """The maximally noisy box: every outcome pair has probability 1/4."""
    return BehaviorBox(np.full((2, 2, 2, 2), 0.25))


def box_from_correlators(e00: float, e01: float, e10: float, e11: float) -> BehaviorBox:
    """Uniform-marginal box with the given correlators, each in [-1, 1]."""
    e = np.array([[e00, e01], [e10, e11]], dtype=float)
    if not np.all(np.isfinite(e)) or float(np.max(np.abs(e))) > 1.0:
        raise ValidationError("correlators must lie in [-1, 1]")
    p = np.empty((2, 2, 2, 2))
    for a in range(2):
        for b in range(2):
            sign = 1.0 if a == b else -1.0
            p[:, :, a, b] = (1.0 + sign * e) / 4.0
    return BehaviorBox(p)


def isotropic_box(v: float) -> BehaviorBox:
    """Mixture v * pr_box + (1 - v) * uniform noise, v in [0, 1]."""
    if not (0.0 <= v <= 1.0):
        raise ValidationError(f"visibility must be in [0, 1], got {v}")
    return convex_mix(pr_box(), uniform_box(), v)


def tsirelson_box() -> BehaviorBox:
    """Uniform-marginal box with the quantum-optimal correlators (CHSH = 2*sqrt(2))."""
    s = 1.0 / math.sqrt(2.0)
    return box_from_correlators(s, s, s, -s)


def convex_mix(b1: BehaviorBox, b2: BehaviorBox, lam: float) -> BehaviorBox:
    """Entrywise mixture lam * b1 + (1 - lam) * b2."""
    if not (0.0 <= lam <= 1.0):
        raise ValidationError(f"mixing weight must be in [0, 1], got {lam}")
    return BehaviorBox(lam * b1.p + (1.0 - lam) * b2.p)


def random_correlator_box(rng: np.random.Generator) -> BehaviorBox:
    """Seeded sample from the uniform-marginal no-signaling family.

    Draws the four correlators uniformly from [-1, 1]; the resulting box
    always passes check_no_signaling and may be local or non-local.
    """
    e = rng.uniform(-1.0, 1.0, size=4)
    return box_from_correlators(*e)


def is_local_facets(box: BehaviorBox) -> LocalityReport:
    """Membership test by the CHSH facet inequalities.

    Valid only for no-signaling boxes, where CHSH <= 2 on all facets
    characterizes the local polytope; signaling boxes are rejected with
    a validation error.
    """
    ns = check_no_signaling(box)
    if not ns.ok:
        raise ValidationError(
            f"facet test needs a no-signaling box (marginal residual {ns.max_residual:.3e})"
        )
    value, indices = chsh_max(box)
    local = value <= LOCAL_BOUND + FACET_SLACK
    return LocalityReport(
        is_local=local,
        method="facets",
        violated_facet=None if local else indices[0],
        max_facet_value=value,
        lp_weights=None,
    )


@lru_cache(maxsize=1)
def _vertex_matrix() -> np.ndarray:
    """16x16 matrix whose column 4*fa + fb is the flat deterministic box."""
    cols = [deterministic_box(fa, fb).flat() for fa in range(4) for fb in range(4)]
    m = np.column_stack(cols)
    m.setflags(write=False)
    return m


def is_local_lp(box: BehaviorBox) -> LocalityReport:
    """Membership test by linear programming over the 16 deterministic vertices.

    Minimizes the max-norm reconstruction error of the box over convex
    weights; the box is local iff the optimum is within ``LP_TOL``.
    Works for any valid box (serves as the independent cross-check of
    the facet test).
    """
    d = _vertex_matrix()
    target = box.flat()
    # variables: 16 weights plus the max-norm error t
    c = np.zeros(17)
    c[16] = 1.0
    ones = np.ones((16, 1))
    a_ub = np.block([[d, -ones], [-d, -ones]])
    b_ub = np.concatenate([target, -target])
    a_eq = np.concatenate([np.ones(16), [0.0]]).reshape(1, 17)
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=[1.0],
        bounds=[(0.0, None)] * 17,
        method="highs",
    )
    if not res.success:
        raise NumericError(f"membership LP failed: {res.message}")
    err = float(res.fun)
    local = err <= LP_TOL
    weights = tuple(max(float(w), 0.0) for w in res.x[:16]) if local else None
    value, _ = chsh_max(box)
    return LocalityReport(
        is_local=local,
        method="lp",
        violated_facet=None,
        max_facet_value=value,
        lp_weights=weights,
    )


def box_to_dict(box: BehaviorBox) -> dict:
    """Box as a JSON-ready mapping ``{"p": [16 reals]}`` in flat order."""
    return {"p": [float(v) for v in box.flat()]}


def box_from_dict(data: Mapping) -> BehaviorBox:
    """Parse the ``{"p": [16 reals]}`` format, rejecting malformed input."""
    if not isinstance(data, Mapping) or "p" not in data:
        raise ValidationError('box JSON must be an object with a "p" array')
    p = data["p"]
    if not isinstance(p, Sequence) or isinstance(p, (str, bytes)) or len(p) != 16:
        raise ValidationError('box JSON "p" must be an array of 16 numbers')
    try:
        values = [float(v) for v in p]
    except (TypeError, ValueError) as exc:
        raise ValidationError('box JSON "p" entries must be numbers') from exc
    return BehaviorBox(values)
