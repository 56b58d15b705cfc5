import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isocompact.compactify import diagonal
from isocompact.forms import direct_sum_minus, make_form
from isocompact.subspaces import (
    Subspace,
    decide_rank,
    decode_matrix,
    encode_matrix,
    hyperbolic_partner,
    induced_form,
    intersect,
    is_isotropic,
    pi_project,
    projector_csv,
    random_isotropic,
    standard_isotropic_basis,
    subspace_from_json,
    subspace_to_json,
)
from isocompact.tolerances import RankAmbiguityError
from isocompact.subspaces import check_unambiguous

E = np.eye(3)
B21 = make_form("R", "symmetric", 2, 1)
FORMS = [
    B21,
    make_form("R", "symmetric", 2, 2),
    make_form("C", "hermitian", 2, 1),
    make_form("H", "hermitian", 1, 1),
    make_form("R", "symplectic", m=2),
    make_form("C", "symmetric", m=4),
    make_form("H", "antihermitian", m=2),
]
IDS = [b.label for b in FORMS]


def test_isotropy_examples():
    assert is_isotropic(Subspace.span((E[0] + E[2])[:, None], "R"), B21)
    assert not is_isotropic(Subspace.span(E[:, :1], "R"), B21)
    assert is_isotropic(diagonal(B21), direct_sum_minus(B21))


def test_intersect_examples():
    W1 = Subspace.span(E[:, :2], "R")
    W2 = Subspace.span(E[:, 1:], "R")
    assert intersect(W1, W1).distance(W1) <= 1e-8
    assert intersect(W1, W2).distance(Subspace.span(E[:, 1:2], "R")) <= 1e-8


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31), st.integers(1, 4), st.integers(1, 4))
def test_intersect_commutative_and_monotone(seed, k1, k2):
    rng = np.random.default_rng(seed)
    common = rng.normal(size=(5, 1))
    W1 = Subspace.span(np.hstack([common, rng.normal(size=(5, k1 - 1))]), "R")
    W2 = Subspace.span(np.hstack([common, rng.normal(size=(5, k2 - 1))]), "R")
    A, B = intersect(W1, W2), intersect(W2, W1)
    assert A.k == B.k and A.distance(B) <= 1e-8
    assert 1 <= A.k <= min(W1.k, W2.k)


def test_pi_project_examples():
    F1, F2 = pi_project(diagonal(B21))
    assert F1.k == F2.k == 0
    # (l + l) plus the graph of the identity over the induced complement
    U = standard_isotropic_basis(B21, 1)
    _, C = induced_form(B21, Subspace.span(U, "R", B21))
    Z = np.zeros_like(U)
    W = Subspace.span(np.hstack([np.vstack([U, Z]), np.vstack([Z, U]), np.vstack([C, C])]), "R")
    F1, F2 = pi_project(W)
    line = Subspace.span(U, "R")
    assert F1.distance(line) <= 1e-8 and F2.distance(line) <= 1e-8


@pytest.mark.parametrize("b", FORMS, ids=IDS)
def test_random_isotropic(b):
    assert random_isotropic(b, 0, 1).k == 0
    W = random_isotropic(b, b.n, 5)
    assert W.k == b.n and is_isotropic(W, b)
    assert np.array_equal(random_isotropic(b, b.n, 5).basis, W.basis)


@pytest.mark.parametrize("b", FORMS, ids=IDS)
def test_hyperbolic_partner(b):
    U = random_isotropic(b, 1, 2).basis
    Up = hyperbolic_partner(b, U)
    G = b.gram
    assert np.allclose(b.star(Up) @ G @ Up, 0, atol=1e-10)
    assert np.allclose(b.star(U) @ G @ Up, np.eye(U.shape[1]), atol=1e-10)


def test_induced_form_examples():
    f, _ = induced_form(B21, Subspace.span(standard_isotropic_basis(B21, 1), "R", B21))
    assert (f.p, f.q) == (1, 0)
    f0, _ = induced_form(B21, Subspace.zero("R", 3, B21))
    assert f0 is B21
    sp = make_form("R", "symplectic", m=2)
    f, C = induced_form(sp, Subspace.span(standard_isotropic_basis(sp, 1), "R", sp))
    assert f.gram.shape == (2, 2)
    assert np.allclose(f.gram, -f.gram.T) and abs(np.linalg.det(f.gram)) > 1e-6


@pytest.mark.parametrize("tag", ["R", "C", "H"])
def test_induced_signature_arithmetic(tag):
    for p in range(1, 5):
        for q in range(1, 7 - p):
            b = make_form(tag, "hermitian" if tag != "R" else "symmetric", p, q)
            for i in range(b.n + 1):
                V = random_isotropic(b, i, i)
                f, _ = induced_form(b, V)
                assert (f.p, f.q) == (p - i, q - i)


def test_projector_equality_is_an_equivalence():
    rng = np.random.default_rng(0)
    W = Subspace.span(rng.normal(size=(5, 2)), "R")
    tiny = [W.transform(np.eye(5) + 1e-10 * rng.normal(size=(5, 5))) for _ in range(3)]
    assert W.equals(W)
    assert tiny[0].equals(tiny[1]) and tiny[1].equals(tiny[0])
    assert tiny[0].distance(tiny[2]) <= 3e-8


def test_rank_decision_and_ambiguity():
    rd = decide_rank(np.array([1.0, 0.5, 1e-12]), 1e-8)
    assert rd.rank == 2 and rd.margin > 1e10
    with pytest.raises(RankAmbiguityError):
        check_unambiguous(decide_rank(np.array([1.0, 2e-8]), 1e-8), 1e-8, "test")


@pytest.mark.parametrize("b", FORMS, ids=IDS)
def test_json_round_trip(b):
    W = random_isotropic(b, b.n, 3)
    V = subspace_from_json(subspace_to_json(W))
    assert V.distance(W) <= 1e-12 and V.form.key == b.key


@pytest.mark.parametrize("tag", ["R", "C", "H"])
def test_matrix_codec(tag):
    from isocompact.forms import random_automorphism, make_gl
    g = random_automorphism(make_gl(tag, 3), 0)
    assert np.allclose(decode_matrix(tag, encode_matrix(tag, g)), g)


def test_projector_csv_shape():
    text = projector_csv(Subspace.span(np.eye(3)[:, :1], "R"))
    assert len(text.strip().splitlines()) == 3
