"""The compactification of Aut_K(b) (and of GL_N(K)) as a space of maximal
isotropic subspaces of V (+) V, with its (G x G)-orbit stratification.

A group element ``g`` is sent to its graph ``{(v, g v)}``; the left and right
factors act by ``(g1, g2) . W = blockdiag(g1, g2) W``.  Strata are indexed by
the dimension of ``W cap (V (+) 0)`` (and of ``W cap (0 (+) V)`` for GL).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag, expm

from .forms import (
    FormSpec,
    GLSpec,
    automorphism_defect,
    dim_aut,
    direct_sum_minus,
    is_automorphism,
    lie_algebra_basis,
    random_automorphism,
)
from .subspaces import (
    Subspace,
    check_unambiguous,
    decide_rank,
    hyperbolic_partner,
    induced_form,
    intersect,
    pi_project,
    standard_isotropic_basis,
)
from .tolerances import DEFAULT, RankAmbiguityError

Group = "FormSpec | GLSpec"


class NotInGroupError(ValueError):
    """Matrix fails the membership test for the group at the requested tolerance."""


def ambient_form(b: Group) -> FormSpec | None:
    return direct_sum_minus(b) if isinstance(b, FormSpec) else None


def _check_member(g: np.ndarray, b: Group, tol: float) -> None:
    if not is_automorphism(g, b, tol):
        what = "invertible" if isinstance(b, GLSpec) else f"an automorphism of {b.label}"
        raise NotInGroupError(f"matrix is not {what} at tolerance {tol:g}")


# ---------------------------------------------------------------- embedding

def embed_graph(g, b: Group, tol: float = DEFAULT.grp) -> Subspace:
    """Graph ``span [I; g]`` of a group element."""
    g = np.asarray(g)
    _check_member(g, b, tol)
    B = np.vstack([np.eye(g.shape[0], dtype=g.dtype), g])
    return Subspace.span(B, b.tag, ambient_form(b))


def diagonal(b: Group) -> Subspace:
    return embed_graph(np.eye(b.numeric_dim, dtype=b.tag.dtype), b)


def unembed(W: Subspace, b: Group, tol: float = DEFAULT.grp) -> np.ndarray:
    """The unique ``g`` with ``W = graph(g)``; fails off the open stratum."""
    M = b.numeric_dim
    if W.numeric_dim != 2 * M or W.basis.shape[1] != M:
        raise ValueError("unembed needs an N-dimensional subspace of V (+) V")
    T, S = W.basis[:M], W.basis[M:]
    s = np.linalg.svd(T, compute_uv=False)
    if s[-1] <= DEFAULT.rank:
        raise ValueError(f"top block is singular (smallest singular value {s[-1]:.2e}); W is not a graph")
    g = np.linalg.solve(T.T, S.T).T
    _check_member(g, b, tol)
    return g


def act(g1, g2, W: Subspace) -> Subspace:
    """(g1, g2) . W = span blockdiag(g1, g2) basis(W)."""
    return Subspace.span(block_diag(g1, g2) @ W.basis, W.tag, W.form)


# ---------------------------------------------------------------- strata

def stratum_index(W: Subspace, b: Group | None = None, tol: float = DEFAULT.rank):
    """Index of the stratum containing W: an int (Aut case) or a pair (GL case).

    Both the block null-space and the stacked-projector intersection are
    evaluated; disagreement or a singular value near the cutoff raises
    :class:`RankAmbiguityError`.
    """
    gl = isinstance(b, GLSpec) if b is not None else W.form is None
    (F1, F2), (d1, d2) = pi_project(W, tol, with_decisions=True)
    for dec, name in ((d1, "W cap (V+0)"), (d2, "W cap (0+V)")):
        check_unambiguous(dec.rank, tol, name)
    M = W.numeric_dim // 2
    Z = np.zeros((M, M), dtype=W.tag.dtype)
    I = np.eye(M, dtype=W.tag.dtype)
    top = Subspace(W.tag, np.vstack([I, Z]))
    bot = Subspace(W.tag, np.vstack([Z, I]))
    c1, c2 = intersect(W, top, tol).k, intersect(W, bot, tol).k
    i, j = F1.k, F2.k
    if (c1, c2) != (i, j):
        raise RankAmbiguityError(f"intersection methods disagree: ({i}, {j}) vs ({c1}, {c2})")
    if gl:
        return (i, j)
    if i != j:
        raise ArithmeticError(f"pi-components have different dimensions {i} != {j}; W is not maximal isotropic")
    return i


def stratum_dimension(b: Group, idx) -> int:
    """Closed-form dimension: real for Aut(b), over K for GL."""
    if isinstance(b, GLSpec):
        i, j = idx
        if i < 0 or j < 0 or i + j > b.N:
            raise ValueError("GL stratum needs i, j >= 0 with i + j <= N")
        return b.N * b.N - i * i - j * j
    if not 0 <= idx <= b.n:
        raise ValueError(f"stratum index {idx} outside 0..{b.n}")
    return dim_aut(b) - idx * idx * b.tag.dim_R


def stratum_count_gl(N: int) -> int:
    if N < 1:
        raise ValueError("N >= 1 required")
    return (N + 1) * (N + 2) // 2


def stratum_point(b: Group, idx, h: np.ndarray | None = None) -> Subspace:
    """Standard point of a stratum.

    Aut case: ``(V_i (+) V_i) + {(c, h c)}`` with ``c`` in a complement of the
    standard ``V_i`` inside its orthogonal and ``h`` an automorphism of the
    induced form (identity by default).  GL case:
    ``(V_i (+) 0) + (0 (+) V_j) + diag(V'_ij)`` with coordinate subspaces.
    """
    tag = b.tag
    if isinstance(b, GLSpec):
        i, j = idx
        if i < 0 or j < 0 or i + j > b.N:
            raise ValueError("GL stratum needs i + j <= N")
        f = tag.factor
        M = b.numeric_dim
        E = np.eye(M, dtype=tag.dtype)
        Z = np.zeros_like(E)
        top, bot = E[:, : f * i], E[:, M - f * j:]
        mid = E[:, f * i: M - f * j]
        B = np.hstack([np.vstack([top, Z[:, : f * i]]), np.vstack([Z[:, : f * j], bot]), np.vstack([mid, mid])])
        return Subspace.span(B, tag)
    U = standard_isotropic_basis(b, idx)
    _, C = induced_form(b, Subspace.span(U, tag, b))
    hC = C if h is None else C @ h
    Z = np.zeros_like(U)
    B = np.hstack([np.vstack([U, Z]), np.vstack([Z, U]), np.vstack([C, hC])])
    return Subspace.span(B, tag, ambient_form(b))


def random_stratum_point(b: Group, idx, seed=None) -> Subspace:
    rng = np.random.default_rng(seed)
    W = stratum_point(b, idx)
    return act(random_automorphism(b, rng), random_automorphism(b, rng), W)


# ---------------------------------------------------------------- transitivity

def _scalar_abs(c: np.ndarray) -> float:
    return float(np.sqrt(np.real((np.conj(c.T) @ c)[0, 0])))


def transport_line(b: FormSpec, u: np.ndarray, u1: np.ndarray, seed=0) -> np.ndarray:
    """Automorphism sending the isotropic K-line spanned by ``u`` to the one spanned by ``u1``.

    ``u`` and ``u1`` are numeric bases (one column, or a quaternionic column
    pair).  Uses a transvection for symplectic forms and a K-line reflection
    otherwise, passing through an auxiliary isotropic line when the two lines
    are b-orthogonal.
    """
    G = b.gram
    c = b.star(u) @ G @ u1
    scale = np.linalg.norm(u) * np.linalg.norm(u1) * np.linalg.norm(G, 2)
    if _scalar_abs(c) < 1e-3 * scale:
        rng = np.random.default_rng(seed)
        for _ in range(50):
            w = random_automorphism(b, rng) @ u
            wn = np.linalg.norm(w)
            if min(_scalar_abs(b.star(u) @ G @ w), _scalar_abs(b.star(w) @ G @ u1)) > 1e-2 * wn * scale:
                return transport_line(b, w, u1) @ transport_line(b, u, w)
        raise ArithmeticError("no auxiliary isotropic line found")
    M = G.shape[0]
    if b.kind == "symplectic":
        v = u1 - u
        kappa = 1.0 / (b.star(u1) @ G @ u)[0, 0]
        return np.eye(M, dtype=G.dtype) + kappa * v @ (b.star(v) @ G)
    f = u.shape[1]
    if not b.sesquilinear or b.tag.value == "R":
        s = np.eye(f, dtype=G.dtype)
    else:
        s = np.conj(c.T) / _scalar_abs(c)
        if b.kind == "antihermitian":
            s = s @ np.array([[0, 1], [-1, 0]], dtype=complex)
    v = u - u1 @ s
    return np.eye(M, dtype=G.dtype) - 2 * v @ np.linalg.solve(b.star(v) @ G @ v, b.star(v) @ G)


def _orientation(b: FormSpec, W: Subspace):
    """(g1, g2) with (g1, g2) . stratum_point(b, i) = W for i in {0, 1}."""
    i = stratum_index(W, b)
    M = b.numeric_dim
    if i == 0:
        return np.eye(M, dtype=b.tag.dtype), unembed(W, b)
    if i != 1:
        raise NotImplementedError("constructive witness implemented for strata 0 and 1")
    A, B = pi_project(W)
    l0 = standard_isotropic_basis(b, 1)
    h1 = transport_line(b, l0, A.basis)
    h2 = transport_line(b, l0, B.basis)
    Wt = act(np.linalg.inv(h1), np.linalg.inv(h2), W)
    _, C = induced_form(b, Subspace.span(l0, b.tag, b))
    Z = np.zeros_like(C)
    CC = Subspace.span(np.block([[C, Z], [Z, C]]), b.tag)
    X = intersect(Wt, CC).basis
    x, y = np.conj(C.T) @ X[:M], np.conj(C.T) @ X[M:]
    Mh = y @ np.linalg.inv(x)
    G = b.gram
    GC = b.star(C) @ G @ C
    proj = C @ np.linalg.solve(GC, b.star(C) @ G)
    hhat = np.eye(M, dtype=G.dtype) - proj + C @ Mh @ np.linalg.solve(GC, b.star(C) @ G)
    return h1, h2 @ hhat


def transitivity_witness(b: FormSpec, W1: Subspace, W2: Subspace):
    """Pair (g1, g2) of automorphisms with (g1, g2) . W1 = W2 (strata 0 and 1)."""
    a1, b1 = _orientation(b, W1)
    a2, b2 = _orientation(b, W2)
    return a2 @ np.linalg.inv(a1), b2 @ np.linalg.inv(b1)


# ---------------------------------------------------------------- degeneration

def hyperbolic_element(b: FormSpec, t: float, conj: np.ndarray | None = None) -> np.ndarray:
    """g_t = e^t on an isotropic line u, e^-t on a partner line, identity on the rest."""
    u = standard_isotropic_basis(b, 1)
    up = hyperbolic_partner(b, u)
    G = b.gram
    Pu = b.eps * u @ (b.star(up) @ G)
    Pup = up @ (b.star(u) @ G)
    g = np.eye(b.numeric_dim, dtype=G.dtype) + (np.exp(t) - 1) * Pu + (np.exp(-t) - 1) * Pup
    return g if conj is None else conj @ g @ np.linalg.inv(conj)


def hyperbolic_limit(b: FormSpec, conj: np.ndarray | None = None) -> Subspace:
    """Limit of graph(g_t) as t -> infinity: (l' (+) 0) + (0 (+) l) + diag(complement)."""
    u = standard_isotropic_basis(b, 1)
    up = hyperbolic_partner(b, u)
    _, C = induced_form(b, Subspace.span(u, b.tag, b))
    Zu, Zc = np.zeros_like(u), np.zeros_like(C)
    B = np.hstack([np.vstack([up, Zu]), np.vstack([Zu, u]), np.vstack([C, C])])
    W = Subspace.span(B, b.tag, ambient_form(b))
    return W if conj is None else act(conj, conj, W)


# ---------------------------------------------------------------- orbit dimension

@dataclass(frozen=True)
class StratumDimensionReport:
    group: str
    index: object
    expected: int
    numeric_rank: int
    analytic_rank: int
    retained: float
    discarded: float
    tol_rank: float

    @property
    def gap(self) -> float:
        return self.retained / max(self.discarded, 1e-300)

    @property
    def agrees(self) -> bool:
        return self.numeric_rank == self.expected == self.analytic_rank

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["index"] = list(self.index) if isinstance(self.index, tuple) else self.index
        d.update(gap=self.gap, agrees=self.agrees)
        return d


def _vec(P: np.ndarray) -> np.ndarray:
    v = P.ravel()
    return np.concatenate([v.real, v.imag]) if np.iscomplexobj(v) else v


def verify_stratum_dimension(b: Group, idx, seed=0, tol: float = DEFAULT.rank, h: float = DEFAULT.fd_step) -> StratumDimensionReport:
    """Numerical rank of the orbit map's differential at a random point of the stratum."""
    expected = stratum_dimension(b, idx)
    W = random_stratum_point(b, idx, seed)
    L = lie_algebra_basis(b)
    Z = np.zeros_like(L[0])
    cols, analytic = [], []
    P0 = W.projector()
    Q0 = np.eye(P0.shape[0]) - P0
    for X in L:
        for pair in ((X, Z), (Z, X)):
            Pp = act(expm(h * pair[0]), expm(h * pair[1]), W).projector()
            Pm = act(expm(-h * pair[0]), expm(-h * pair[1]), W).projector()
            cols.append(_vec((Pp - Pm) / (2 * h)))
            analytic.append(_vec(Q0 @ block_diag(*pair) @ W.basis))
    # Lie basis elements have unit coefficient norm, so singular values are
    # measured against 1 rather than the largest one (which may be pure noise).
    s = np.linalg.svd(np.array(cols).T, compute_uv=False)
    rd = decide_rank(s, tol, scale=1.0)
    check_unambiguous(rd, tol, "orbit differential")
    ra = decide_rank(np.linalg.svd(np.array(analytic).T, compute_uv=False), tol, scale=1.0)
    scale = b.tag.dim_R if isinstance(b, GLSpec) else 1
    return StratumDimensionReport(
        b.label, idx, expected, rd.rank // scale, ra.rank // scale, rd.retained, rd.discarded, tol
    )


def group_defect(g: np.ndarray, b: Group) -> float:
    return automorphism_defect(g, b) if isinstance(b, FormSpec) else 0.0
