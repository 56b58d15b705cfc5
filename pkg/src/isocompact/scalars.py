"""Scalars and dense matrices over a field K in {R, C, H}.

Quaternionic matrices are handled numerically through their complex adjoint.
Two layouts are used:

* the *block* layout ``[[A1, A2], [-conj(A2), conj(A1)]]`` returned by
  :func:`complex_adjoint`, and
* the *interleaved* layout used internally, where each quaternion entry
  ``z + w j`` becomes the 2x2 block ``[[z, w], [-conj(w), conj(z)]]``.

The interleaved layout keeps the K-coordinates of a vector adjacent, so
restricting to "the first K-coordinate" is a slice of two numeric rows.  A
quaternionic column vector ``q = z + w j`` is represented by the complex
vector ``psi(q)`` with entries ``(z_k, -conj(w_k))`` and the right
multiplication by ``j`` becomes the antilinear map :func:`j_apply`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class ScalarTag(Enum):
    R = "R"
    C = "C"
    H = "H"

    @property
    def dim_R(self) -> int:
        return {"R": 1, "C": 2, "H": 4}[self.value]

    @property
    def factor(self) -> int:
        """Numeric rows per K-coordinate (2 for quaternions, else 1)."""
        return 2 if self is ScalarTag.H else 1

    @property
    def dtype(self):
        return np.float64 if self is ScalarTag.R else np.complex128

    @classmethod
    def parse(cls, value: "ScalarTag | str") -> "ScalarTag":
        if isinstance(value, ScalarTag):
            return value
        try:
            return cls(str(value).upper())
        except ValueError as exc:
            raise ValueError(f"unknown scalar field {value!r}; expected R, C or H") from exc


# ---------------------------------------------------------------- quaternions

def quaternion_mul(a, b) -> np.ndarray:
    """Hamilton product of quaternions stored as (..., 4) arrays (1, i, j, k)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def quaternion_conj(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def _split(q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """q = z + w j with z = a + b i, w = c + d i."""
    return q[..., 0] + 1j * q[..., 1], q[..., 2] + 1j * q[..., 3]


def _join(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.stack([z.real, z.imag, w.real, w.imag], axis=-1)


def quaternion_matmul(A, B) -> np.ndarray:
    """Product of quaternionic matrices stored as (n, m, 4) and (m, r, 4) arrays."""
    return _from_interleaved(_to_interleaved(np.asarray(A, float)) @ _to_interleaved(np.asarray(B, float)))


def _to_interleaved(Q: np.ndarray) -> np.ndarray:
    z, w = _split(Q)
    n, m = z.shape
    out = np.empty((2 * n, 2 * m), dtype=complex)
    out[0::2, 0::2] = z
    out[0::2, 1::2] = w
    out[1::2, 0::2] = -np.conj(w)
    out[1::2, 1::2] = np.conj(z)
    return out


def _from_interleaved(M: np.ndarray) -> np.ndarray:
    return _join(M[0::2, 0::2], M[0::2, 1::2])


def complex_adjoint(A: "MatK | np.ndarray") -> np.ndarray:
    """Block complex adjoint ``[[A1, A2], [-conj(A2), conj(A1)]]`` of a quaternionic matrix."""
    if isinstance(A, MatK):
        if A.tag is not ScalarTag.H:
            raise ValueError("complex_adjoint requires a quaternionic matrix")
        Q = A.entries
    else:
        Q = np.asarray(A, dtype=float)
        if Q.ndim != 3 or Q.shape[-1] != 4:
            raise ValueError("complex_adjoint requires a quaternionic (n, m, 4) array")
    A1, A2 = _split(Q)
    return np.block([[A1, A2], [-np.conj(A2), np.conj(A1)]])


def interleaved_adjoint(Q) -> np.ndarray:
    """Interleaved complex adjoint (the working representation of H-matrices)."""
    return _to_interleaved(np.asarray(Q, dtype=float))


def quaternion_from_interleaved(M) -> np.ndarray:
    """Inverse of :func:`interleaved_adjoint` (reads the even rows)."""
    M = np.asarray(M)
    if M.shape[0] % 2 or M.shape[1] % 2:
        raise ValueError("interleaved quaternionic matrix must have even shape")
    return _from_interleaved(M)


def j_apply(U: np.ndarray) -> np.ndarray:
    """Right multiplication by the quaternion j on interleaved column vectors.

    Antilinear: ``(a, b) -> (conj(b), -conj(a))`` on each coordinate pair.
    """
    out = np.empty_like(U, dtype=complex)
    out[0::2] = np.conj(U[1::2])
    out[1::2] = -np.conj(U[0::2])
    return out


def psi(q) -> np.ndarray:
    """Quaternionic column vector (n, 4) -> interleaved complex vector of length 2n."""
    z, w = _split(np.asarray(q, dtype=float))
    out = np.empty(2 * z.shape[0], dtype=complex)
    out[0::2] = z
    out[1::2] = -np.conj(w)
    return out


def psi_inverse(u) -> np.ndarray:
    u = np.asarray(u)
    return _join(u[0::2], -np.conj(u[1::2]))


# ---------------------------------------------------------------- matrices

@dataclass(frozen=True, eq=False)
class MatK:
    """Dense matrix over R, C or H.

    ``entries`` has shape (rows, cols) for R and C and (rows, cols, 4) for H.
    """

    tag: ScalarTag
    entries: np.ndarray

    def __post_init__(self):
        tag = ScalarTag.parse(self.tag)
        object.__setattr__(self, "tag", tag)
        e = np.asarray(self.entries)
        if tag is ScalarTag.H:
            e = np.asarray(e, dtype=float)
            if e.ndim != 3 or e.shape[-1] != 4:
                raise ValueError("quaternionic entries must have shape (rows, cols, 4)")
        elif tag is ScalarTag.R:
            if np.iscomplexobj(e):
                if np.any(np.abs(e.imag) > 0):
                    raise ValueError("real matrix has complex entries")
                e = e.real
            e = np.atleast_2d(np.asarray(e, dtype=float))
        else:
            e = np.atleast_2d(np.asarray(e, dtype=complex))
        if e.shape[0] < 1 or e.shape[1] < 1:
            raise ValueError("matrix must have positive shape")
        object.__setattr__(self, "entries", e)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def numeric(self) -> np.ndarray:
        """Working real/complex realization (interleaved adjoint for H)."""
        if self.tag is ScalarTag.H:
            return _to_interleaved(self.entries)
        return self.entries.copy()

    @classmethod
    def from_numeric(cls, tag, M: np.ndarray) -> "MatK":
        tag = ScalarTag.parse(tag)
        if tag is ScalarTag.H:
            return cls(tag, _from_interleaved(np.asarray(M)))
        if tag is ScalarTag.R:
            return cls(tag, np.real_if_close(np.asarray(M), tol=1e6).real)
        return cls(tag, np.asarray(M, dtype=complex))

    @classmethod
    def identity(cls, tag, n: int) -> "MatK":
        tag = ScalarTag.parse(tag)
        if tag is ScalarTag.H:
            e = np.zeros((n, n, 4))
            e[np.arange(n), np.arange(n), 0] = 1.0
            return cls(tag, e)
        return cls(tag, np.eye(n, dtype=tag.dtype))

    def __matmul__(self, other: "MatK") -> "MatK":
        if self.tag is not other.tag:
            raise ValueError("field mismatch in matrix product")
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matrix product")
        return MatK.from_numeric(self.tag, self.numeric() @ other.numeric())

    def conj_transpose(self) -> "MatK":
        if self.tag is ScalarTag.H:
            return MatK(self.tag, quaternion_conj(np.swapaxes(self.entries, 0, 1)))
        return MatK(self.tag, np.conj(self.entries.T))


def spectrum(A: "MatK | np.ndarray", tag=None) -> np.ndarray:
    """Eigenvalue moduli sorted in descending order, one per K-dimension.

    ``A`` is a :class:`MatK` or a numeric matrix together with ``tag``.  For
    quaternionic input the moduli of the complex adjoint come in equal pairs
    and each pair is reported once.
    """
    if isinstance(A, MatK):
        tag, M = A.tag, A.numeric()
    else:
        tag = ScalarTag.parse(tag or "C")
        M = np.asarray(A)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("spectrum requires a square matrix")
    mods = np.sort(np.abs(np.linalg.eigvals(M)))[::-1]
    if tag is ScalarTag.H:
        mods = mods[0::2]
    return mods
