"""Sequential composition of boxes (the multiplicative side of the algebra).

A two-stage wiring feeds the initial inputs (x, y) to the first box and
the first box's outputs to the second box; only the second box's outputs
are released.  There is no memory of the initial input, so this is the
memoryless chain, not the entanglement-distilling kind of wiring.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Mapping, Sequence

import numpy as np

from .boxmodel import (
    FACET_SLACK,
    LOCAL_BOUND,
    BehaviorBox,
    box_from_dict,
    box_to_dict,
    chsh_max,
    deterministic_box,
)
from .errors import ValidationError

BOX_EQUALITY_TOL = 1e-9


@dataclass(frozen=True)
class WiringChain:
    """An ordered, non-empty sequence of stages composed left to right."""

    stages: tuple[BehaviorBox, ...]

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if len(self.stages) < 1:
            raise ValidationError("a wiring chain needs at least one stage")


@dataclass(frozen=True)
class AuditEntry:
    strategy: tuple[int, int]
    chsh_max: float
    counterexample: bool


@dataclass(frozen=True)
class AbsorptionReport:
    """Per-strategy CHSH values of compositions with every deterministic box.

    ``counterexamples`` is the subset of ``results`` whose composition
    exceeds the local bound, i.e. the cases where inserting a local
    stage failed to collapse the correlations to local.
    """

    results: tuple[AuditEntry, ...]
    counterexamples: tuple[AuditEntry, ...]


def sequential_compose(first: BehaviorBox, second: BehaviorBox) -> BehaviorBox:
    """Chain two boxes: p(x,y,a,b) = sum_{a',b'} p1(x,y,a',b') p2(a',b',a,b)."""
    return BehaviorBox(np.einsum("xycd,cdab->xyab", first.p, second.p))


def compose_chain(chain: WiringChain | Sequence[BehaviorBox]) -> BehaviorBox:
    """Left-to-right fold of sequential_compose over the stages."""
    stages = chain.stages if isinstance(chain, WiringChain) else tuple(chain)
    if not stages:
        raise ValidationError("cannot compose an empty chain")
    return reduce(sequential_compose, stages)


def absorption_audit(box: BehaviorBox, position: str) -> AbsorptionReport:
    """Compose ``box`` with all 16 deterministic boxes and report CHSH values.

    ``position`` says where the deterministic stage goes: "first" means
    the chain [deterministic, box], "second" means [box, deterministic].
    Every composition whose chsh_max exceeds 2 + FACET_SLACK is listed
    as a counterexample to the claim that a local stage makes the chain
    local.  Results are ordered by strategy index 4*fa + fb.
    """
    if position not in ("first", "second"):
        raise ValidationError(f'position must be "first" or "second", got {position!r}')
    entries = []
    for fa in range(4):
        for fb in range(4):
            det = deterministic_box(fa, fb)
            if position == "first":
                composed = sequential_compose(det, box)
            else:
                composed = sequential_compose(box, det)
            value, _ = chsh_max(composed)
            entries.append(AuditEntry((fa, fb), value, value > LOCAL_BOUND + FACET_SLACK))
    results = tuple(entries)
    return AbsorptionReport(results, tuple(e for e in results if e.counterexample))


def cancellativity_probe(bx: BehaviorBox, by: BehaviorBox, bz: BehaviorBox) -> bool:
    """Check left-cancellation on one triple.

    True iff equal compositions bx*by = bx*bz (entrywise within
    BOX_EQUALITY_TOL) imply by = bz at the same tolerance.  A False
    result exhibits a concrete failure of cancellation; True is only
    evidence, not proof.
    """
    compositions_equal = sequential_compose(bx, by).approx_equal(
        sequential_compose(bx, bz), BOX_EQUALITY_TOL
    )
    if not compositions_equal:
        return True
    return by.approx_equal(bz, BOX_EQUALITY_TOL)


def chain_to_dict(chain: WiringChain) -> dict:
    """Chain as a JSON-ready mapping ``{"stages": [box, ...]}``."""
    return {"stages": [box_to_dict(b) for b in chain.stages]}


def chain_from_dict(data: Mapping) -> WiringChain:
    """Parse the ``{"stages": [box, ...]}`` format."""
    if not isinstance(data, Mapping) or "stages" not in data:
        raise ValidationError('chain JSON must be an object with a "stages" array')
    stages = data["stages"]
    if not isinstance(stages, Sequence) or isinstance(stages, (str, bytes)):
        raise ValidationError('chain JSON "stages" must be an array of boxes')
    return WiringChain(tuple(box_from_dict(s) for s in stages))
