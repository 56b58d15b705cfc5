"""Numerical tolerances shared by every module.

All rank decisions and membership verdicts read from a
:class:`Tolerances` instance so that reports can echo exactly what was used.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    spectral: float = 1e-9      # spectral comparisons
    rank: float = 1e-8          # relative singular-value cutoff
    grp: float = 1e-8           # group membership
    chamber: float = 1e-8       # closed Weyl chamber slack
    pos: float = 1e-10          # positivity of weight denominators
    contain: float = 1e-6       # containment residual for limit sets
    dedup: float = 1e-5         # limit-set deduplication radius
    model: float = 1e-8         # hypersurface residual for model spaces
    gap_min: float = math.log(10.0)
    m_max: int = 2 ** 10
    fd_step: float = 1e-5       # finite-difference step
    ambiguity_factor: float = 10.0

    def with_overrides(self, **kw) -> "Tolerances":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT = Tolerances()


class RankAmbiguityError(ArithmeticError):
    """A singular value sits too close to the rank cutoff to decide an integer dimension."""
