"""Cartan and Lyapunov projections with the opposition involution.

Every Gram matrix used by :mod:`isocompact.forms` is unitary, so the standard
inner product is invariant under the maximal compact subgroup and mu can be
read off the singular values directly.  For Aut(b) the log singular values
come in pairs ``(t, -t)`` plus zeros and mu keeps the ``n`` largest.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .forms import FormSpec, GLSpec, RootData, eval_root
from .scalars import ScalarTag

Group = "FormSpec | GLSpec"


class PairingError(ArithmeticError):
    """Log singular values are not symmetric: the matrix has left the group."""


class CrossCheckError(ArithmeticError):
    """lambda and the power-limit estimate disagree beyond tolerance."""


@dataclass(frozen=True, eq=False)
class WeylVector:
    values: np.ndarray
    root_type: str

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __len__(self):
        return len(self.values)

    def in_chamber(self, rd: RootData, tol: float = 1e-8) -> bool:
        return all(eval_root(rd, i + 1, self.values) >= -tol for i in range(rd.simple_roots.shape[0]))

    def tolist(self) -> list:
        return [float(x) for x in self.values]


def _k_values(vals: np.ndarray, tag: ScalarTag) -> np.ndarray:
    """Collapse the duplicated pairs produced by a quaternionic adjoint."""
    return vals[..., 0::2] if tag is ScalarTag.H else vals


def log_singular_values(M: np.ndarray, tag: ScalarTag) -> np.ndarray:
    """Descending log singular values per K-dimension; works on stacks (..., M, M)."""
    s = np.linalg.svd(M, compute_uv=False)
    with np.errstate(divide="ignore"):
        return _k_values(np.log(s), tag)


def log_eigen_moduli(M: np.ndarray, tag: ScalarTag) -> np.ndarray:
    mods = -np.sort(-np.abs(np.linalg.eigvals(M)), axis=-1)
    with np.errstate(divide="ignore"):
        return _k_values(np.log(mods), tag)


def _truncate(logs: np.ndarray, b: Group) -> np.ndarray:
    if isinstance(b, GLSpec):
        return logs
    return np.maximum(logs[..., : b.n], 0.0)


def pairing_defect(logs: np.ndarray) -> float:
    return float(np.max(np.abs(logs + logs[..., ::-1]))) if logs.size else 0.0


def cartan_mu(g, b: Group, pair_tol: float = 1e-7) -> WeylVector:
    g = np.asarray(g)
    logs = log_singular_values(g, b.tag)
    if isinstance(b, FormSpec):
        d = pairing_defect(logs)
        if d > pair_tol * max(1.0, float(np.max(np.abs(logs)))):
            raise PairingError(f"log singular values not symmetric (defect {d:.2e})")
    return WeylVector(_truncate(logs, b), b.root_type)


def cartan_mu_batch(mats: np.ndarray, b: Group) -> np.ndarray:
    """mu for a stack of group elements (no pairing check)."""
    return _truncate(log_singular_values(mats, b.tag), b)


def lyapunov_batch(mats: np.ndarray, b: Group) -> np.ndarray:
    return _truncate(log_eigen_moduli(mats, b.tag), b)


def _compound(M: np.ndarray, k: int) -> np.ndarray:
    """k-th exterior power in the basis of sorted index subsets."""
    idx = list(combinations(range(M.shape[0]), k))
    out = np.empty((len(idx), len(idx)), dtype=M.dtype)
    for a, rows in enumerate(idx):
        sub = M[list(rows)]
        for c, cols in enumerate(idx):
            out[a, c] = np.linalg.det(sub[:, list(cols)])
    return out


def _log_norm_power(M: np.ndarray, squarings: int) -> float:
    """log ||M^(2^squarings)|| via normalized repeated squaring."""
    log_scale = 0.0
    for _ in range(squarings):
        M = M @ M
        s = np.linalg.norm(M, 2)
        M = M / s
        log_scale = 2 * log_scale + np.log(s)
    return log_scale + np.log(np.linalg.norm(M, 2)) if squarings == 0 else log_scale


def power_limit_estimate(g, b: Group, k: int = 64) -> np.ndarray:
    """(1/k) mu(g^k) for k a power of two, stable for large k.

    Partial sums of log singular values of ``g^k`` are top singular values
    of exterior powers, which avoids losing the smaller ones to rounding.
    """
    squarings = int(round(np.log2(k)))
    if 2 ** squarings != k:
        raise ValueError("k must be a power of two")
    g = np.asarray(g)
    f = b.tag.factor
    n = b.N if isinstance(b, GLSpec) else b.n
    sums = [0.0]
    for r in range(1, n + 1):
        C = _compound(g, f * r)
        s = np.linalg.norm(C, 2)
        sums.append((_log_norm_power(C / s, squarings) + k * np.log(s)) / f)
    est = np.diff(sums) / k
    return est if isinstance(b, GLSpec) else np.maximum(est, 0.0)


def lyapunov_lambda(g, b: Group, cross_check: bool = False, k: int = 64, tol: float = 1e-3) -> WeylVector:
    """lambda from eigenvalue moduli; optionally compared with (1/k) mu(g^k)."""
    lam = _truncate(log_eigen_moduli(np.asarray(g), b.tag), b)
    if cross_check:
        est = power_limit_estimate(g, b, k)
        err = float(np.max(np.abs(lam - est))) if lam.size else 0.0
        if err > tol:
            raise CrossCheckError(f"lambda and (1/{k}) mu(g^{k}) differ by {err:.3e} > {tol:g}")
    return WeylVector(lam, b.root_type)


def opposition_apply(rd: RootData, v) -> WeylVector:
    return WeylVector(rd.opposition(np.asarray(v, dtype=float)), rd.root_type)
