"""Nondegenerate forms, their automorphism groups and restricted-root data.

A form is stored through its numeric Gram matrix ``G`` (interleaved complex
adjoint for quaternions).  The value of the form is ``x^* G y`` where ``*`` is
the conjugate transpose for sesquilinear forms (and for real forms) and the
plain transpose for complex bilinear ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm, null_space

from .scalars import MatK, ScalarTag, interleaved_adjoint

KINDS = ("symmetric", "hermitian", "antihermitian", "symplectic")
ROOT_TYPES = ("A", "B", "C", "BC", "D")


# ---------------------------------------------------------------- root data

@dataclass(frozen=True, eq=False)
class RootData:
    """Simple roots and fundamental weights in epsilon coordinates.

    Rows of ``simple_roots`` and ``fundamental_weights`` are coefficient
    vectors; evaluation on a Weyl vector is a dot product.
    """

    root_type: str
    n: int
    simple_roots: np.ndarray
    fundamental_weights: np.ndarray

    def opposition(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if self.root_type == "A":
            return -v[::-1]
        if self.root_type == "D" and self.n % 2 == 1:
            out = v.copy()
            out[-1] = -out[-1]
            return out
        return v.copy()


def root_data(root_type: str, n: int) -> RootData:
    """Closed-form root data.  For type ``A`` the argument is the matrix size N."""
    if root_type not in ROOT_TYPES:
        raise ValueError(f"unknown root type {root_type!r}")
    eye = np.eye(n)
    if root_type == "A":
        roots = np.array([eye[i] - eye[i + 1] for i in range(n - 1)]).reshape(-1, n)
        weights = np.array([eye[: i + 1].sum(0) - (i + 1) / n for i in range(n - 1)]).reshape(-1, n)
        return RootData("A", n, roots, weights)
    roots = [eye[i] - eye[i + 1] for i in range(n - 1)]
    weights = [eye[: i + 1].sum(0) for i in range(n)]
    if n == 0:
        return RootData(root_type, 0, np.zeros((0, 0)), np.zeros((0, 0)))
    if root_type in ("B", "BC"):
        roots.append(eye[n - 1])
        weights[n - 1] = 0.5 * np.ones(n)
    elif root_type == "C":
        roots.append(2 * eye[n - 1])
    elif root_type == "D":
        if n == 1:
            # O(1,1) and O(2,C): abelian, no roots.
            return RootData("D", 1, np.zeros((0, 1)), np.zeros((0, 1)))
        roots.append(eye[n - 2] + eye[n - 1])
        weights[n - 2] = 0.5 * (np.ones(n) - 2 * eye[n - 1])
        weights[n - 1] = 0.5 * np.ones(n)
    return RootData(root_type, n, np.array(roots), np.array(weights))


def _functional(table: np.ndarray, index: int, v, what: str) -> float:
    v = np.asarray(v, dtype=float)
    if not 1 <= index <= table.shape[0]:
        raise IndexError(f"{what} index {index} out of range 1..{table.shape[0]}")
    if v.shape != (table.shape[1],):
        raise ValueError(f"Weyl vector must have length {table.shape[1]}")
    return float(table[index - 1] @ v)


def eval_root(rd: RootData, index: int, v) -> float:
    return _functional(rd.simple_roots, index, v, "root")


def eval_weight(rd: RootData, index: int, v) -> float:
    return _functional(rd.fundamental_weights, index, v, "weight")


# ---------------------------------------------------------------- forms

@dataclass(frozen=True, eq=False)
class FormSpec:
    tag: ScalarTag
    kind: str
    gram: np.ndarray  # numeric Gram matrix
    N: int
    n: int
    root_type: str
    p: int | None = None
    q: int | None = None
    m: int | None = None
    base: "FormSpec | None" = field(default=None, repr=False)

    @property
    def sesquilinear(self) -> bool:
        return self.kind in ("hermitian", "antihermitian") or self.tag is ScalarTag.R

    @property
    def eps(self) -> int:
        """+1 for (Hermitian-)symmetric forms, -1 for (anti-)symplectic ones."""
        return 1 if self.kind in ("symmetric", "hermitian") else -1

    @property
    def numeric_dim(self) -> int:
        return self.gram.shape[0]

    @property
    def roots(self) -> RootData:
        return root_data(self.root_type, self.n)

    @property
    def key(self) -> tuple:
        return (self.tag.value, self.kind, self.gram.shape, self.gram.tobytes())

    def star(self, X: np.ndarray) -> np.ndarray:
        """Adjoint used by the form: conjugate transpose or transpose."""
        return np.conj(X.T) if self.sesquilinear else X.T

    def value(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Numeric value ``x^* G y`` (a 2x2 block per quaternionic column pair)."""
        return self.star(np.atleast_2d(x.T).T) @ self.gram @ np.atleast_2d(y.T).T

    @property
    def label(self) -> str:
        t = self.tag.value
        if self.base is not None:
            return f"{self.base.label}+(-)"
        if self.kind == "symplectic":
            return f"Sp({self.N},{t})"
        if self.kind == "symmetric" and t == "C":
            return f"O({self.N},C)"
        if self.kind == "antihermitian":
            return f"O*({2 * self.N})"
        name = {"R": "O", "C": "U", "H": "Sp"}[t]
        return f"{name}({self.p},{self.q})"

    def to_json(self) -> dict:
        if self.base is not None:
            return {"direct_sum_minus": self.base.to_json()}
        d = {"scalar": self.tag.value, "kind": self.kind}
        if self.p is not None and self.kind in ("symmetric", "hermitian") and not (self.tag is ScalarTag.C and self.kind == "symmetric"):
            d.update(p=self.p, q=self.q)
        else:
            d["m"] = self.m
        return d


@dataclass(frozen=True)
class GLSpec:
    """The general linear group GL_N(K), root type A."""

    tag: ScalarTag
    N: int

    root_type = "A"
    kind = "gl"
    base = None

    @property
    def n(self) -> int:
        return self.N

    @property
    def roots(self) -> RootData:
        return root_data("A", self.N)

    @property
    def numeric_dim(self) -> int:
        return self.N * self.tag.factor

    @property
    def key(self) -> tuple:
        return (self.tag.value, "gl", self.N)

    @property
    def label(self) -> str:
        return f"GL{self.N}({self.tag.value})"

    def to_json(self) -> dict:
        return {"scalar": self.tag.value, "kind": "gl", "N": self.N}


def _signature_root_type(tag: ScalarTag, p: int, q: int) -> tuple[int, str]:
    n = min(p, q)
    if tag is ScalarTag.R:
        return n, "D" if p == q else "B"
    return n, "C" if p == q else "BC"


def _quat_scalar_matrix(n: int, unit: int) -> np.ndarray:
    e = np.zeros((n, n, 4))
    e[np.arange(n), np.arange(n), unit] = 1.0
    return e


def make_form(tag, kind: str, p: int | None = None, q: int | None = None, m: int | None = None) -> FormSpec:
    """Standard form of the given kind.

    Signature forms ``b^{p,q}`` (real symmetric or Hermitian) take ``p, q``.
    Every other kind takes ``m``: symplectic forms live on K^{2m}, the
    remaining kinds on K^m.
    """
    tag = ScalarTag.parse(tag)
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")
    signature = (tag is ScalarTag.R and kind == "symmetric") or kind == "hermitian"
    if signature:
        if tag is ScalarTag.R and kind == "hermitian":
            raise ValueError("real forms are 'symmetric'")
        if p is None or q is None or p < 0 or q < 0 or p + q < 1:
            raise ValueError("signature forms need p, q >= 0 with p + q >= 1")
        d = np.concatenate([np.ones(p), -np.ones(q)])
        if tag is ScalarTag.H:
            gram = interleaved_adjoint(np.diag(d)[..., None] * np.array([1.0, 0, 0, 0]))
        else:
            gram = np.diag(d).astype(tag.dtype)
        n, rt = _signature_root_type(tag, p, q)
        return FormSpec(tag, kind, gram, p + q, n, rt, p=p, q=q)
    if m is None or m < 1:
        raise ValueError(f"{kind} forms over {tag.value} need m >= 1")
    if kind == "symplectic":
        if tag is ScalarTag.H:
            raise ValueError("quaternionic symplectic kind is not supported; use kind='antihermitian' for O*(2m)")
        gram = np.block([[np.zeros((m, m)), np.eye(m)], [-np.eye(m), np.zeros((m, m))]]).astype(tag.dtype)
        return FormSpec(tag, kind, gram, 2 * m, m, "C", m=m)
    if kind == "symmetric" and tag is ScalarTag.C:
        return FormSpec(tag, kind, np.eye(m, dtype=complex), m, m // 2, "D" if m % 2 == 0 else "B", m=m)
    if kind == "antihermitian" and tag is ScalarTag.H:
        gram = interleaved_adjoint(_quat_scalar_matrix(m, 2))
        return FormSpec(tag, kind, gram, m, m // 2, "C" if m % 2 == 0 else "BC", m=m)
    raise ValueError(f"kind {kind!r} is not available over {tag.value}")


def make_gl(tag, N: int) -> GLSpec:
    if N < 1:
        raise ValueError("GL needs N >= 1")
    return GLSpec(ScalarTag.parse(tag), N)


def _root_type_for(tag: ScalarTag, kind: str, N: int, p=None, q=None) -> tuple[int, str]:
    if p is not None:
        return _signature_root_type(tag, p, q)
    if kind == "symplectic":
        return N // 2, "C"
    if kind == "symmetric":  # complex orthogonal
        return N // 2, "D" if N % 2 == 0 else "B"
    return N // 2, "C" if N % 2 == 0 else "BC"


def form_from_gram(tag, kind: str, gram: np.ndarray, p=None, q=None) -> FormSpec:
    """Internal constructor for non-standard Gram matrices (induced forms)."""
    tag = ScalarTag.parse(tag)
    N = gram.shape[0] // tag.factor
    n, rt = _root_type_for(tag, kind, N, p, q)
    m = None if p is not None else (N // 2 if kind == "symplectic" else N)
    return FormSpec(tag, kind, np.array(gram), N, n, rt, p=p, q=q, m=m)


def direct_sum_minus(b: FormSpec) -> FormSpec:
    """The form ``b (+) -b`` on V (+) V."""
    G = b.gram
    Z = np.zeros_like(G)
    gram = np.block([[G, Z], [Z, -G]])
    if b.p is not None:
        p2 = q2 = b.p + b.q
        n, rt = _signature_root_type(b.tag, p2, q2)
        return FormSpec(b.tag, b.kind, gram, 2 * b.N, n, rt, p=p2, q=q2, base=b)
    n, rt = _root_type_for(b.tag, b.kind, 2 * b.N)
    m = b.N if b.kind == "symplectic" else 2 * b.N
    return FormSpec(b.tag, b.kind, gram, 2 * b.N, n, rt, m=m, base=b)


def parse_form(desc: dict) -> "FormSpec | GLSpec":
    """Build a form from its JSON description."""
    if not isinstance(desc, dict):
        raise ValueError("form must be a JSON object")
    if "direct_sum_minus" in desc:
        return direct_sum_minus(parse_form(desc["direct_sum_minus"]))
    tag = ScalarTag.parse(desc.get("scalar", "R"))
    kind = desc.get("kind")
    if kind == "gl":
        return make_gl(tag, int(desc["N"]))
    if kind is None:
        raise ValueError("form needs a 'kind'")
    if tag is ScalarTag.C and kind == "symmetric":
        return make_form(tag, kind, m=int(desc["m"]))
    if kind in ("symplectic", "antihermitian"):
        return make_form(tag, kind, m=int(desc["m"]))
    return make_form(tag, kind, p=int(desc["p"]), q=int(desc["q"]))


# ---------------------------------------------------------------- groups

def is_automorphism(g, b: "FormSpec | GLSpec", tol: float = 1e-8) -> bool:
    M = g.numeric() if isinstance(g, MatK) else np.asarray(g)
    if M.shape != (b.numeric_dim, b.numeric_dim):
        raise ValueError(f"matrix of shape {M.shape} does not act on a space of numeric dimension {b.numeric_dim}")
    if isinstance(b, GLSpec):
        s = np.linalg.svd(M, compute_uv=False)
        return bool(s[-1] > tol * s[0])
    G = b.gram
    return bool(np.linalg.norm(b.star(M) @ G @ M - G, 2) <= tol * np.linalg.norm(G, 2))


def automorphism_defect(M: np.ndarray, b: FormSpec) -> float:
    G = b.gram
    return float(np.linalg.norm(b.star(M) @ G @ M - G, 2) / np.linalg.norm(G, 2))


def dim_aut(b: "FormSpec | GLSpec") -> int:
    """Real dimension of the group from closed-form family formulas."""
    N = b.N
    if isinstance(b, GLSpec):
        return b.tag.dim_R * N * N
    t = b.tag.value
    table = {
        ("R", "symmetric"): N * (N - 1) // 2,
        ("R", "symplectic"): N * (N + 1) // 2,
        ("C", "hermitian"): N * N,
        ("C", "symmetric"): N * (N - 1),
        ("C", "symplectic"): N * (N + 1),
        ("H", "hermitian"): N * (2 * N + 1),
        ("H", "antihermitian"): N * (2 * N - 1),
    }
    return table[(t, b.kind)]


def _param_basis(tag: ScalarTag, N: int) -> np.ndarray:
    """Real basis of all numeric matrices representing N x N K-matrices."""
    out = []
    if tag is ScalarTag.H:
        for a in range(N):
            for c in range(N):
                for u in range(4):
                    e = np.zeros((N, N, 4))
                    e[a, c, u] = 1.0
                    out.append(interleaved_adjoint(e))
        return np.array(out)
    for a in range(N):
        for c in range(N):
            E = np.zeros((N, N), dtype=tag.dtype)
            E[a, c] = 1.0
            out.append(E)
            if tag is ScalarTag.C:
                out.append(1j * E)
    return np.array(out)


def _realify(stack: np.ndarray) -> np.ndarray:
    """(d, M, M) complex stack -> real (2 M^2, d) column matrix."""
    flat = stack.reshape(stack.shape[0], -1).T
    return np.vstack([flat.real, flat.imag])


_LIE_CACHE: dict = {}
_COMPACT_CACHE: dict = {}


def lie_algebra_basis(b: "FormSpec | GLSpec") -> np.ndarray:
    """Real basis (d, M, M) of the Lie algebra of Aut(b) (or gl_N), cached per form."""
    cached = _LIE_CACHE.get(b.key)
    if cached is not None:
        return cached
    P = _param_basis(b.tag, b.N)
    if isinstance(b, GLSpec):
        basis = P
    else:
        G = b.gram
        imgs = np.array([b.star(X) @ G + G @ X for X in P])
        coeffs = null_space(_realify(imgs), rcond=1e-10)
        basis = np.tensordot(coeffs.T, P, axes=1)
        if basis.shape[0] != dim_aut(b):
            raise ArithmeticError(f"Lie algebra of {b.label}: numerical dimension {basis.shape[0]} != {dim_aut(b)}")
    basis.setflags(write=False)
    _LIE_CACHE[b.key] = basis
    return basis


def compact_algebra_basis(b: "FormSpec | GLSpec") -> np.ndarray:
    """Skew-Hermitian part of the Lie algebra (Lie algebra of the maximal compact)."""
    cached = _COMPACT_CACHE.get(b.key)
    if cached is None:
        L = lie_algebra_basis(b)
        imgs = np.array([X + np.conj(X.T) for X in L])
        coeffs = null_space(_realify(imgs), rcond=1e-10)
        cached = np.tensordot(coeffs.T, L, axes=1)
        _COMPACT_CACHE[b.key] = cached
    return cached


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_lie_element(b, seed=None, scale: float = 1.5, basis: np.ndarray | None = None) -> np.ndarray:
    rng = _rng(seed)
    L = lie_algebra_basis(b) if basis is None else basis
    X = np.tensordot(rng.uniform(-1.0, 1.0, L.shape[0]), L, axes=1)
    nrm = np.linalg.norm(X)
    return X if nrm == 0 else X * (scale / nrm)


def random_automorphism(b: "FormSpec | GLSpec", seed=None, scale: float = 1.5) -> np.ndarray:
    """exp of a random Lie algebra element with Frobenius norm ``scale``."""
    return expm(random_lie_element(b, seed, scale))


def random_compact(b: "FormSpec | GLSpec", seed=None, scale: float = 3.0) -> np.ndarray:
    """Random element of the maximal compact subgroup (unitary automorphisms)."""
    return expm(random_lie_element(b, seed, scale, basis=compact_algebra_basis(b)))
