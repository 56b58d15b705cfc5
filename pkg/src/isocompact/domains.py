"""Membership predicates for limit-set-saturated sets and their complements.

The limit set is only known through a finite :class:`LimitSetSample`, so
every boolean comes with the minimal containment residual as a margin.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .anosov import LimitSetSample, RepSpec, evaluate, word_ball, word_to_str
from .compactify import stratum_index
from .forms import FormSpec
from .subspaces import Subspace, pi_project
from .tolerances import DEFAULT


@dataclass(frozen=True)
class Membership:
    value: bool
    margin: float          # smallest containment residual over the sample
    witness: int | None    # index of the closest sample point

    def __bool__(self):
        return self.value


def _residuals_in(W: Subspace, sample_points: list) -> np.ndarray:
    """Residual of each sample subspace inside W."""
    return np.array([W.residual(p.basis) for p in sample_points])


def in_K_xi(W: Subspace, sample: LimitSetSample, tol: float = DEFAULT.contain) -> Membership:
    """Whether some sampled line lies in W."""
    if not sample.points:
        return Membership(False, np.inf, None)
    if sample.d != 1:
        raise ValueError("in_K_xi expects a sample of lines")
    if sample.points[0].numeric_dim != W.numeric_dim:
        raise ValueError("sample and subspace live in different spaces")
    res = _residuals_in(W, sample.points)
    i = int(np.argmin(res))
    return Membership(bool(res[i] <= tol), float(res[i]), i)


def in_K_xi_dual(line: Subspace, sample: LimitSetSample, tol: float = DEFAULT.contain,
                 form: FormSpec | None = None) -> Membership:
    """Whether the line lies in some sampled d-plane.  Refused for split real orthogonal forms."""
    form = form if form is not None else line.form
    if form is not None and form.root_type == "D" and form.tag.value == "R":
        raise ValueError("the dual construction is not available for split orthogonal forms O(n,n)")
    if sample.d < 1:
        raise ValueError("sample dimension must be at least 1")
    if not sample.points:
        return Membership(False, np.inf, None)
    if sample.points[0].numeric_dim != line.numeric_dim:
        raise ValueError("sample and line live in different spaces")
    res = np.array([p.residual(line.basis) for p in sample.points])
    i = int(np.argmin(res))
    return Membership(bool(res[i] <= tol), float(res[i]), i)


@dataclass(frozen=True)
class StratumMembership:
    index: int
    in_omega: bool
    margin: float
    witness: int | None

    def as_dict(self) -> dict:
        return {"stratum": self.index, "in_omega": self.in_omega, "margin": self.margin,
                "witness": self.witness}


def stratum_membership_U_i_xi(W: Subspace, sample: LimitSetSample, tol: float = DEFAULT.contain,
                              tol_rank: float = DEFAULT.rank) -> StratumMembership:
    """Stratum index of W and whether no sampled line lies in W cap (V (+) 0)."""
    i = stratum_index(W, tol=tol_rank)
    F, _ = pi_project(W, tol_rank)
    if not sample.points:
        return StratumMembership(i, True, np.inf, None)
    if F.k == 0:
        return StratumMembership(i, True, 1.0, None)
    res = _residuals_in(F, sample.points)
    j = int(np.argmin(res))
    return StratumMembership(i, bool(res[j] > tol), float(res[j]), j)


@dataclass(frozen=True)
class ProbeReport:
    radius: int
    delta: float
    count: int
    max_length: int
    returners: list
    n_words: int

    def as_dict(self) -> dict:
        return {"radius": self.radius, "delta": self.delta, "count": self.count,
                "max_length": self.max_length, "returners": [word_to_str(w) for w in self.returners[:100]],
                "n_words": self.n_words}


def orbit_recurrence_probe(repL: RepSpec, repR: RepSpec, W0: Subspace, radius: int, delta: float,
                           workers: int = 1, sample: LimitSetSample | None = None) -> ProbeReport:
    """Count words w (including the empty word) with d((rho_L(w), rho_R(w)) . W0, W0) < delta."""
    if sample is not None and not stratum_membership_U_i_xi(W0, sample).in_omega:
        raise ValueError("W0 is not in the domain for the given sample")
    words = [()] + (word_ball(repL.rank_free, radius).words if radius >= 1 else [])

    def dist(w):
        B = block_diag(evaluate(repL, w), evaluate(repR, w)) @ W0.basis
        return Subspace.span(B, W0.tag).distance(W0)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            ds = list(ex.map(dist, words))
    else:
        ds = [dist(w) for w in words]
    ret = [w for w, d in zip(words, ds) if d < delta]
    return ProbeReport(radius, delta, len(ret), max((len(w) for w in ret), default=0), ret, len(words))
