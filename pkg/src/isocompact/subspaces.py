"""Numerical subspaces of K^N with intersection and projection primitives.

A :class:`Subspace` stores an orthonormal numeric basis.  Quaternionic
subspaces are stored in interleaved complex-adjoint form: the basis is
``chi(Q)`` for a quaternionic matrix ``Q`` with orthonormal columns, so the
numeric span is invariant under :func:`~isocompact.scalars.j_apply`.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .forms import FormSpec, form_from_gram, parse_form, random_automorphism
from .scalars import MatK, ScalarTag, j_apply
from .tolerances import DEFAULT, RankAmbiguityError


# ---------------------------------------------------------------- kernels

@dataclass(frozen=True)
class RankDecision:
    """Integer rank together with the singular values on either side of the cut."""

    rank: int
    retained: float   # smallest kept relative singular value (inf if none)
    discarded: float  # largest dropped relative singular value (0 if none)

    @property
    def margin(self) -> float:
        return self.retained / max(self.discarded, 1e-300)

    def ambiguous(self, tol: float, factor: float = DEFAULT.ambiguity_factor) -> bool:
        return tol < self.retained <= factor * tol


def decide_rank(s: np.ndarray, tol: float, scale: float | None = None) -> RankDecision:
    """Count singular values above ``tol * scale`` (``scale`` defaults to the largest)."""
    s = np.asarray(s, dtype=float)
    if s.size == 0:
        return RankDecision(0, np.inf, 0.0)
    scale = s[0] if scale is None else scale
    if scale <= 0:
        return RankDecision(0, np.inf, 0.0)
    rel = s / scale
    r = int(np.sum(rel > tol))
    return RankDecision(r, float(rel[r - 1]) if r else np.inf, float(rel[r]) if r < rel.size else 0.0)


def check_unambiguous(rd: RankDecision, tol: float, what: str, factor: float = DEFAULT.ambiguity_factor) -> None:
    if rd.ambiguous(tol, factor):
        raise RankAmbiguityError(
            f"{what}: relative singular value {rd.retained:.3e} lies within {factor:g}x of the cutoff {tol:.1e}"
        )


def j_canonical(U: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis ``[u1, -J u1, u2, -J u2, ...]`` of a J-invariant span."""
    P = U @ np.conj(U.T)
    if np.linalg.norm(j_apply(U) - P @ j_apply(U)) > 1e3 * tol * max(1.0, np.sqrt(U.shape[1])):
        raise ArithmeticError("span is not invariant under right multiplication by j")
    cols = []
    for _ in range(U.shape[1] // 2):
        norms = np.linalg.norm(P, axis=0)
        v = P[:, int(np.argmax(norms))]
        v = v / np.linalg.norm(v)
        w = -j_apply(v[:, None])[:, 0]
        cols += [v, w]
        P = P - np.outer(v, np.conj(v)) - np.outer(w, np.conj(w))
    return np.array(cols).T if cols else np.zeros((U.shape[0], 0), dtype=complex)


def orthonormal_columns(B: np.ndarray, tag: ScalarTag, tol: float = DEFAULT.rank, scale: float | None = None):
    """Orthonormal basis of the column span of ``B`` with its rank decision."""
    B = np.asarray(B)
    if B.shape[1] == 0:
        return np.zeros((B.shape[0], 0), dtype=tag.dtype), RankDecision(0, np.inf, 0.0)
    U, s, _ = np.linalg.svd(B, full_matrices=False)
    rd = decide_rank(s, tol, scale)
    U = U[:, : rd.rank]
    if tag is ScalarTag.H:
        if rd.rank % 2:
            raise RankAmbiguityError("odd numeric rank for a quaternionic span")
        U = j_canonical(U, tol)
    elif tag is ScalarTag.R:
        U = U.real
    return U, rd


def null_space_decision(A: np.ndarray, tag: ScalarTag, tol: float = DEFAULT.rank, scale: float | None = None):
    """Orthonormal basis of ker A with the rank decision on A."""
    A = np.asarray(A)
    M = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(M, dtype=tag.dtype), RankDecision(0, np.inf, 0.0)
    _, s, Vh = np.linalg.svd(A, full_matrices=True)
    s_full = np.zeros(M)
    s_full[: s.size] = s
    rd = decide_rank(s_full, tol, scale if scale is not None else (s[0] if s.size else 0.0))
    N = np.conj(Vh[rd.rank:].T)
    if tag is ScalarTag.H:
        if N.shape[1] % 2:
            raise RankAmbiguityError("odd numeric nullity for a quaternionic map")
        N = j_canonical(N, tol)
    elif tag is ScalarTag.R:
        N = N.real
    return N, rd


# ---------------------------------------------------------------- Subspace

@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of K^N with an orthonormal numeric basis."""

    tag: ScalarTag
    basis: np.ndarray
    form: FormSpec | None = field(default=None, repr=False)
    margin: float = np.inf

    @classmethod
    def span(cls, B, tag, form: FormSpec | None = None, tol: float = DEFAULT.rank) -> "Subspace":
        tag = ScalarTag.parse(tag)
        U, rd = orthonormal_columns(np.asarray(B, dtype=tag.dtype), tag, tol)
        return cls(tag, U, form, rd.margin)

    @classmethod
    def zero(cls, tag, numeric_dim: int, form: FormSpec | None = None) -> "Subspace":
        tag = ScalarTag.parse(tag)
        return cls(tag, np.zeros((numeric_dim, 0), dtype=tag.dtype), form)

    @property
    def numeric_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0] // self.tag.factor

    @property
    def k(self) -> int:
        return self.basis.shape[1] // self.tag.factor

    dim = k

    def projector(self) -> np.ndarray:
        return self.basis @ np.conj(self.basis.T)

    def distance(self, other: "Subspace") -> float:
        """Operator-norm distance between orthogonal projectors."""
        _same_ambient(self, other)
        if self.k != other.k:
            return 1.0
        if self.k == 0:
            return 0.0
        return self.residual(other.basis)

    def equals(self, other: "Subspace", tol: float = DEFAULT.rank) -> bool:
        return self.distance(other) <= tol

    def residual(self, U: np.ndarray) -> float:
        """Containment residual ||(I - P) U|| for orthonormal columns U."""
        if U.shape[1] == 0:
            return 0.0
        return float(np.linalg.norm(U - self.basis @ (np.conj(self.basis.T) @ U), 2))

    def contains(self, other: "Subspace", tol: float = DEFAULT.contain) -> bool:
        return self.residual(other.basis) <= tol

    def quaternionic_basis(self) -> MatK:
        return MatK.from_numeric(self.tag, self.basis)

    def transform(self, g: np.ndarray) -> "Subspace":
        return Subspace.span(g @ self.basis, self.tag, self.form)


def _same_ambient(a: Subspace, b: Subspace) -> None:
    if a.numeric_dim != b.numeric_dim or a.tag is not b.tag:
        raise ValueError("subspaces live in different ambient spaces")


@dataclass(frozen=True)
class FlagPoint:
    parts: tuple

    def __post_init__(self):
        for a, b in zip(self.parts, self.parts[1:]):
            if a.k > b.k or b.residual(a.basis) > DEFAULT.rank * 10:
                raise ValueError("flag parts are not nested")


# ---------------------------------------------------------------- operations

def is_isotropic(W: Subspace, b: FormSpec, tol: float = DEFAULT.rank) -> bool:
    return isotropy_residual(W, b) <= tol


def isotropy_residual(W: Subspace, b: FormSpec) -> float:
    if W.numeric_dim != b.numeric_dim:
        raise ValueError("dimension mismatch between subspace and form")
    if W.k == 0:
        return 0.0
    B = W.basis
    return float(np.linalg.norm(b.star(B) @ b.gram @ B, 2) / np.linalg.norm(b.gram, 2))


def intersect(W1: Subspace, W2: Subspace, tol: float = DEFAULT.rank, with_decision: bool = False):
    """Intersection as the kernel of the stacked complement projectors."""
    _same_ambient(W1, W2)
    I = np.eye(W1.numeric_dim)
    A = np.vstack([I - W1.projector(), I - W2.projector()])
    N, rd = null_space_decision(A, W1.tag, tol, scale=1.0)
    out = Subspace(W1.tag, N, W1.form, rd.margin)
    return (out, rd) if with_decision else out


def pi_project(W: Subspace, tol: float = DEFAULT.rank, with_decisions: bool = False):
    """(W cap (V+0), W cap (0+V)) as subspaces of V."""
    M2 = W.numeric_dim
    if M2 % 2:
        raise ValueError("pi_project needs an ambient space V (+) V")
    M = M2 // 2
    T, S = W.basis[:M], W.basis[M:]
    n_top, rd_top = null_space_decision(S, W.tag, tol, scale=1.0)
    n_bot, rd_bot = null_space_decision(T, W.tag, tol, scale=1.0)
    base = W.form.base if W.form is not None else None
    F1 = Subspace.span(T @ n_top, W.tag, base) if n_top.shape[1] else Subspace.zero(W.tag, M, base)
    F2 = Subspace.span(S @ n_bot, W.tag, base) if n_bot.shape[1] else Subspace.zero(W.tag, M, base)
    if with_decisions:
        return (F1, F2), (_nullity(rd_top, W.basis.shape[1]), _nullity(rd_bot, W.basis.shape[1]))
    return F1, F2


@dataclass(frozen=True)
class NullityDecision:
    nullity: int
    rank: RankDecision


def _nullity(rd: RankDecision, cols: int) -> NullityDecision:
    return NullityDecision(cols - rd.rank, rd)


def standard_isotropic_basis(b: FormSpec, i: int) -> np.ndarray:
    """Numeric basis of the standard i-dimensional isotropic subspace."""
    if not 0 <= i <= b.n:
        raise ValueError(f"isotropic dimension {i} outside 0..{b.n}")
    N, tag = b.N, b.tag
    Q = np.zeros((N, i, 4)) if tag is ScalarTag.H else np.zeros((N, i), dtype=tag.dtype)

    def put(row, col, val):
        if tag is ScalarTag.H:
            Q[row, col] = val if np.ndim(val) else [val, 0, 0, 0]
        else:
            Q[row, col] = val

    for k in range(i):
        if b.base is not None:
            put(k, k, 1.0)
            put(b.base.N + k, k, 1.0)
        elif b.p is not None:
            put(k, k, 1.0)
            put(b.p + k, k, 1.0)
        elif b.kind == "symplectic":
            put(k, k, 1.0)
        elif b.kind == "symmetric":  # complex orthogonal, gram I
            put(2 * k, k, 1.0)
            put(2 * k + 1, k, 1j)
        elif b.kind == "antihermitian":  # gram j*I
            put(2 * k, k, 1.0)
            put(2 * k + 1, k, np.array([0.0, 1.0, 0.0, 0.0]))
        else:
            raise ValueError(f"no standard isotropic subspace for {b.label}")
    B = MatK(tag, Q).numeric() if i else np.zeros((b.numeric_dim, 0), dtype=tag.dtype)
    return B / np.sqrt(2.0) if b.kind != "symplectic" or b.base is not None else B


def standard_isotropic(b: FormSpec, i: int) -> Subspace:
    return Subspace.span(standard_isotropic_basis(b, i), b.tag, b)


def random_isotropic(b: FormSpec, i: int, seed=None) -> Subspace:
    """Random automorphism applied to the standard isotropic i-plane."""
    if not 0 <= i <= b.n:
        raise ValueError(f"isotropic dimension {i} outside 0..{b.n}")
    if i == 0:
        return Subspace.zero(b.tag, b.numeric_dim, b)
    g = random_automorphism(b, seed)
    return Subspace.span(g @ standard_isotropic_basis(b, i), b.tag, b)


def hyperbolic_partner(b: FormSpec, U: np.ndarray) -> np.ndarray:
    """Isotropic ``U'`` with ``b(U, U') = I`` for an isotropic basis ``U``."""
    A = b.star(U) @ b.gram
    V = np.linalg.pinv(A)
    S = b.eps * (b.star(V) @ b.gram @ V) / 2
    return V - U @ S


def induced_form(b: FormSpec, V: Subspace, tol: float = DEFAULT.rank):
    """Form induced on V^perp / V, realized on a complement of V inside V^perp.

    Returns ``(form, C)`` where the columns of ``C`` (orthonormal, numeric)
    span the complement and ``form.gram = C^* G C``.
    """
    if isotropy_residual(V, b) > tol * 1e2:
        raise ValueError("induced_form needs an isotropic subspace")
    if V.k == 0:
        return b, np.eye(b.numeric_dim, dtype=b.tag.dtype)
    U = V.basis
    Up = hyperbolic_partner(b, U)
    C, _ = null_space_decision(b.star(np.hstack([U, Up])) @ b.gram, b.tag, tol)
    gram = b.star(C) @ b.gram @ C
    p = q = None
    if b.p is not None:
        ev = np.linalg.eigvalsh((gram + np.conj(gram.T)) / 2)
        f = b.tag.factor
        p, q = int(np.sum(ev > 0)) // f, int(np.sum(ev < 0)) // f
    return form_from_gram(b.tag, b.kind, gram, p, q), C


# ---------------------------------------------------------------- serialization

def encode_matrix(tag: ScalarTag, M: np.ndarray) -> list:
    """Row-major K-matrix as nested lists (complex -> [re, im], quaternion -> [a, b, c, d])."""
    tag = ScalarTag.parse(tag)
    if tag is ScalarTag.H:
        return MatK.from_numeric(tag, M).entries.tolist()
    if tag is ScalarTag.C:
        return np.stack([M.real, M.imag], axis=-1).tolist()
    return np.asarray(M.real, dtype=float).tolist()


def decode_matrix(tag: ScalarTag, data) -> np.ndarray:
    """Inverse of :func:`encode_matrix`; returns the numeric realization."""
    tag = ScalarTag.parse(tag)
    arr = np.asarray(data, dtype=float)
    if tag is ScalarTag.H:
        if arr.ndim != 3 or arr.shape[-1] != 4:
            raise ValueError("quaternionic matrix entries must be [a, b, c, d]")
        return MatK(tag, arr).numeric()
    if tag is ScalarTag.C:
        if arr.ndim == 3 and arr.shape[-1] == 2:
            return arr[..., 0] + 1j * arr[..., 1]
        if arr.ndim == 2:
            return arr.astype(complex)
        raise ValueError("complex matrix entries must be [re, im]")
    if arr.ndim != 2:
        raise ValueError("real matrix must be a 2-d array")
    return arr


def subspace_to_json(W: Subspace) -> dict:
    ambient = W.form.to_json() if W.form is not None else {"scalar": W.tag.value, "dim": W.ambient_dim}
    return {"ambient": ambient, "basis": encode_matrix(W.tag, W.basis) if W.k else []}


def subspace_from_json(data: dict, tol: float = DEFAULT.rank) -> Subspace:
    if not isinstance(data, dict) or "ambient" not in data or "basis" not in data:
        raise ValueError("subspace JSON needs 'ambient' and 'basis'")
    amb = data["ambient"]
    form = None
    if "dim" in amb:
        tag, dim = ScalarTag.parse(amb.get("scalar", "R")), int(amb["dim"])
    else:
        form = parse_form(amb)
        tag, dim = form.tag, form.N
    if not data["basis"]:
        return Subspace.zero(tag, dim * tag.factor, form)
    B = decode_matrix(tag, data["basis"])
    if B.shape[0] != dim * tag.factor:
        raise ValueError(f"basis has {B.shape[0] // tag.factor} rows, ambient dimension is {dim}")
    return Subspace.span(B, tag, form, tol)


def projector_csv(W: Subspace) -> str:
    """Projector matrix as CSV (real parts, then imaginary parts for complex data)."""
    P = W.projector()
    buf = io.StringIO()
    np.savetxt(buf, P.real, delimiter=",", fmt="%.17g")
    if np.iscomplexobj(P):
        buf.write("\n")
        np.savetxt(buf, P.imag, delimiter=",", fmt="%.17g")
    return buf.getvalue()
