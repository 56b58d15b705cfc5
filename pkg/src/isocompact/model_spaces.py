"""Pseudo-hyperbolic spaces inside isotropic line spaces, and explicit orbit
representatives with stabilizer checks.

``b^{p+1,q+1}`` is realized with the extra positive coordinate first, so a
point ``x`` of the quadric ``b^{p,q+1}(x, x) = -1`` goes to the line
``[1 : x]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .forms import FormSpec, lie_algebra_basis, make_form, random_automorphism
from .scalars import ScalarTag, j_apply, psi, psi_inverse
from .subspaces import (
    Subspace,
    check_unambiguous,
    decide_rank,
    intersect,
    isotropy_residual,
)
from .tolerances import DEFAULT


def _kind(tag: ScalarTag) -> str:
    return "symmetric" if tag is ScalarTag.R else "hermitian"


def hypersurface_form(p: int, q: int, tag) -> FormSpec:
    """b^{p,q+1}, whose quadric {b = -1} is the model space."""
    tag = ScalarTag.parse(tag)
    return make_form(tag, _kind(tag), p, q + 1)


def ambient_form(p: int, q: int, tag) -> FormSpec:
    """b^{p+1,q+1} on K (+) K^{p+q+1}."""
    tag = ScalarTag.parse(tag)
    return make_form(tag, _kind(tag), p + 1, q + 1)


def _numeric_vector(x, tag: ScalarTag) -> np.ndarray:
    """K-vector -> numeric basis block (one column, or a quaternionic pair)."""
    if tag is ScalarTag.H:
        u = psi(np.asarray(x, dtype=float).reshape(-1, 4))[:, None]
        return np.hstack([u, -j_apply(u)])
    return np.asarray(x, dtype=tag.dtype).reshape(-1, 1)


def _kvector(u: np.ndarray, tag: ScalarTag) -> np.ndarray:
    if tag is ScalarTag.H:
        return psi_inverse(u[:, 0])
    return u[:, 0].real.copy() if tag is ScalarTag.R else u[:, 0].copy()


def hypersurface_residual(x, p: int, q: int, tag) -> float:
    tag = ScalarTag.parse(tag)
    b = hypersurface_form(p, q, tag)
    u = _numeric_vector(x, tag)
    return float(abs(np.real((b.star(u) @ b.gram @ u)[0, 0]) + 1.0))


def embed_hpq(x, p: int, q: int, tag, tol: float = DEFAULT.model) -> Subspace:
    tag = ScalarTag.parse(tag)
    u = _numeric_vector(x, tag)
    if u.shape[0] != (p + q + 1) * tag.factor:
        raise ValueError(f"point must have {p + q + 1} coordinates")
    r = hypersurface_residual(x, p, q, tag)
    if r > tol * max(1.0, float(np.linalg.norm(u)) ** 2):
        raise ValueError(f"point is off the hypersurface b(x, x) = -1 (residual {r:.2e})")
    f = tag.factor
    head = np.eye(f, dtype=tag.dtype)
    return Subspace.span(np.vstack([head, u]), tag, ambient_form(p, q, tag))


def base_point(p: int, q: int, tag) -> np.ndarray:
    tag = ScalarTag.parse(tag)
    n = p + q + 1
    if tag is ScalarTag.H:
        x = np.zeros((n, 4))
        x[-1, 0] = 1.0
        return x
    x = np.zeros(n, dtype=tag.dtype)
    x[-1] = 1.0
    return x


def extend_automorphism(g: np.ndarray, tag) -> np.ndarray:
    """g in Aut(b^{p,q+1}) acting on K (+) K^{p+q+1}, fixing the extra coordinate."""
    tag = ScalarTag.parse(tag)
    return block_diag(np.eye(tag.factor, dtype=g.dtype), g)


def random_hypersurface_point(p: int, q: int, tag, seed=None, scale: float = 1.5) -> np.ndarray:
    tag = ScalarTag.parse(tag)
    b = hypersurface_form(p, q, tag)
    g = random_automorphism(b, seed, scale)
    return _kvector(g @ _numeric_vector(base_point(p, q, tag), tag), tag)


def _first_coordinate(line: Subspace) -> float:
    f = line.tag.factor
    return float(np.linalg.norm(line.basis[:f, :f], 2))


def is_boundary(line: Subspace, tol: float = DEFAULT.rank) -> bool:
    if line.k != 1:
        raise ValueError("is_boundary expects a line")
    if line.form is not None and isotropy_residual(line, line.form) > max(tol, 1e-7):
        raise ValueError("is_boundary expects an isotropic line")
    return _first_coordinate(line) <= tol


def unembed_hpq(line: Subspace, tol: float = DEFAULT.rank) -> np.ndarray:
    if is_boundary(line, tol):
        raise ValueError("boundary line has no point in the model space")
    f = line.tag.factor
    B = line.basis[:, :f]
    B = B @ np.linalg.inv(B[:f, :f])
    return _kvector(B[f:], line.tag)


# ---------------------------------------------------------------- orbit representatives

def _stabilizer_dimension(L: np.ndarray, W: Subspace, tol: float):
    """Real dimension of {X in span L : X W subset W}."""
    Q = np.eye(W.numeric_dim) - W.projector()
    cols = []
    for X in L:
        v = (Q @ X @ W.basis).ravel()
        cols.append(np.concatenate([v.real, v.imag]))
    A = np.array(cols).T
    s = np.linalg.svd(A, compute_uv=False)
    s_full = np.zeros(L.shape[0])
    s_full[: s.size] = s
    rd = decide_rank(s_full, tol, scale=1.0)
    check_unambiguous(rd, tol, "stabilizer equation")
    return L.shape[0] - rd.rank, rd


@dataclass(frozen=True, eq=False)
class OrbitRepReport:
    case: str
    params: dict
    subspace: Subspace
    isotropy_residual: float
    real_intersection_dim: int
    stabilizer_dim: int
    expected_stabilizer_dim: int
    signature: tuple | None = None
    expected_signature: tuple | None = None
    margin: float = np.inf

    @property
    def ok(self) -> bool:
        sig_ok = self.signature == self.expected_signature
        return (self.isotropy_residual <= 1e-10 and self.real_intersection_dim == 0
                and self.stabilizer_dim == self.expected_stabilizer_dim and sig_ok)

    def as_dict(self) -> dict:
        return {
            "case": self.case, **self.params,
            "isotropy_residual": self.isotropy_residual,
            "real_intersection_dim": self.real_intersection_dim,
            "stabilizer_dim": self.stabilizer_dim,
            "expected_stabilizer_dim": self.expected_stabilizer_dim,
            "signature": list(self.signature) if self.signature else None,
            "expected_signature": list(self.expected_signature) if self.expected_signature else None,
            "margin": self.margin, "ok": self.ok,
        }


def _real_intersection_dim(W: Subspace) -> int:
    Wbar = Subspace(W.tag, np.conj(W.basis))
    return intersect(W, Wbar).k


def orbit_rep_case_iv(p: int, q: int, tol: float = DEFAULT.rank) -> OrbitRepReport:
    """W'_0 = {x + i I x} for the complex structure I of C^p (+) C^q on R^{2p+2q}."""
    if p < 1 or q < 1:
        raise ValueError("case (iv) needs p, q >= 1")
    bR = make_form("R", "symmetric", 2 * p, 2 * q)

    def J(k):
        Z, E = np.zeros((k, k)), np.eye(k)
        return np.block([[Z, -E], [E, Z]])

    I = block_diag(J(p), J(q))
    W = Subspace.span(np.eye(2 * (p + q)) + 1j * I, "C")
    G = bR.gram.astype(complex)
    iso = float(np.linalg.norm(W.basis.T @ G @ W.basis, 2))
    stab, rd = _stabilizer_dimension(lie_algebra_basis(bR), W, tol)
    return OrbitRepReport("iv", {"p": p, "q": q}, W, iso, _real_intersection_dim(W), stab,
                          (p + q) ** 2, margin=rd.margin)


def orbit_rep_case_vi(m: int, p: int, tol: float = DEFAULT.rank) -> OrbitRepReport:
    """Lagrangian span of e_k - i e_{m+k} (k <= p) and e_k + i e_{m+k} (k > p)."""
    if not 0 <= p <= m or m < 1:
        raise ValueError("case (vi) needs 0 <= p <= m, m >= 1")
    omega = make_form("C", "symplectic", m=m)
    E = np.eye(2 * m, dtype=complex)
    cols = [E[:, k] + (-1j if k < p else 1j) * E[:, m + k] for k in range(m)]
    W = Subspace.span(np.array(cols).T, "C", omega)
    G = omega.gram
    iso = float(np.linalg.norm(W.basis.T @ G @ W.basis, 2))
    h = 1j * (np.conj(W.basis.T) @ G @ W.basis)
    ev = np.linalg.eigvalsh((h + np.conj(h.T)) / 2)
    if np.min(np.abs(ev)) <= tol * max(1.0, np.max(np.abs(ev))):
        raise ArithmeticError("restricted Hermitian form has an eigenvalue at the rank cutoff")
    sig = (int(np.sum(ev > 0)), int(np.sum(ev < 0)))
    stab, rd = _stabilizer_dimension(lie_algebra_basis(make_form("R", "symplectic", m=m)), W, tol)
    return OrbitRepReport("vi", {"m": m, "p": p}, W, iso, _real_intersection_dim(W), stab, m * m,
                          sig, (p, m - p), margin=rd.margin)
