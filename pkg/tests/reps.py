"""Test representations of the free group F_2 (and Z)."""

import numpy as np
from scipy.linalg import sqrtm

from isocompact.anosov import RepSpec
from isocompact.forms import make_form

SL2 = make_form("R", "symplectic", m=1)


def rot(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def fuchsian_generators():
    a = np.diag([3.0, 1 / 3])
    r = rot(np.pi / 4)
    return [a, r @ a @ r.T]


def fuchsian():
    return RepSpec(SL2, fuchsian_generators())


def trivial(k=2):
    return RepSpec(SL2, [np.eye(2)] * k)


def half_speed():
    return RepSpec(SL2, [np.real(sqrtm(g)) for g in fuchsian_generators()])


def elliptic():
    h = np.array([[1.0, 2.0], [0.0, 1.0]])
    return RepSpec(SL2, [h @ rot(1.0) @ np.linalg.inv(h)])


def cyclic():
    return RepSpec(SL2, [fuchsian_generators()[0]])


# Adjoint action of SL_2(R) on sl_2 with trace form: a copy in O(2,1).
_SL2_BASIS = [np.diag([1.0, -1.0]), np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([[0.0, 1.0], [-1.0, 0.0]])]
O21 = make_form("R", "symmetric", 2, 1)


def adjoint(g):
    ginv = np.linalg.inv(g)
    cols = []
    for X in _SL2_BASIS:
        Y = g @ X @ ginv
        cols.append([np.trace(Y @ Z) / 2 * s for Z, s in zip(_SL2_BASIS, (1, 1, -1))])
    return np.array(cols).T


def fuchsian_o21():
    return RepSpec(O21, [adjoint(g) for g in fuchsian_generators()])
