import numpy as np
import pytest

from isocompact.compactify import (
    NotInGroupError,
    act,
    diagonal,
    embed_graph,
    hyperbolic_element,
    hyperbolic_limit,
    random_stratum_point,
    stratum_count_gl,
    stratum_dimension,
    stratum_index,
    stratum_point,
    transitivity_witness,
    unembed,
    verify_stratum_dimension,
)
from isocompact.forms import direct_sum_minus, is_automorphism, make_form, make_gl, random_automorphism
from isocompact.subspaces import Subspace, is_isotropic, pi_project

FORMS = [
    make_form("R", "symmetric", 2, 1),
    make_form("R", "symmetric", 2, 2),
    make_form("C", "hermitian", 2, 1),
    make_form("H", "hermitian", 1, 1),
    make_form("R", "symplectic", m=2),
    make_form("C", "symmetric", m=4),
    make_form("C", "symplectic", m=1),
    make_form("H", "antihermitian", m=2),
]
IDS = [b.label for b in FORMS]


def test_embed_identity_is_diagonal():
    b = FORMS[0]
    W = embed_graph(np.eye(3), b)
    assert W.distance(diagonal(b)) <= 1e-12
    assert stratum_index(W, b) == 0
    assert np.allclose(unembed(diagonal(b), b), np.eye(3))


def test_boost_graph_isotropic():
    b = make_form("R", "symmetric", 1, 1)
    t = 0.4
    g = np.array([[np.cosh(t), np.sinh(t)], [np.sinh(t), np.cosh(t)]])
    W = embed_graph(g, b)
    assert W.k == 2 and is_isotropic(W, direct_sum_minus(b))


def test_embed_injective_and_validates():
    b = FORMS[0]
    g, h = random_automorphism(b, 1), random_automorphism(b, 2)
    assert embed_graph(g, b).distance(embed_graph(h, b)) > 1e-3
    with pytest.raises(NotInGroupError):
        embed_graph(np.diag([2.0, 1.0, 1.0]), b)


def test_unembed_rejects_boundary_points():
    b = FORMS[0]
    with pytest.raises(ValueError):
        unembed(stratum_point(b, 1), b)


def test_stratum_index_gl_example():
    b = make_gl("R", 2)
    W = Subspace.span(np.array([[1.0, 0], [0, 0], [0, 0], [0, 1.0]]), "R")
    assert stratum_index(W, b) == (1, 1)
    assert stratum_index(embed_graph(random_automorphism(b, 0), b), b) == (0, 0)


@pytest.mark.parametrize("b", FORMS, ids=IDS)
def test_act_on_graphs(b):
    rng = np.random.default_rng(0)
    g, g1, g2 = (random_automorphism(b, rng) for _ in range(3))
    lhs = act(g1, g2, embed_graph(g, b))
    rhs = embed_graph(g2 @ g @ np.linalg.inv(g1), b)
    assert lhs.distance(rhs) <= 1e-9
    W = random_stratum_point(b, b.n, rng)
    I = np.eye(b.numeric_dim)
    assert act(I, I, W).distance(W) <= 1e-12


@pytest.mark.parametrize("b", FORMS, ids=IDS)
def test_strata_are_invariant(b):
    rng = np.random.default_rng(1)
    for i in range(b.n + 1):
        W = stratum_point(b, i)
        assert stratum_index(W, b) == i
        assert is_isotropic(W, direct_sum_minus(b))
        for _ in range(100 if b.N <= 3 else 25):
            V = act(random_automorphism(b, rng), random_automorphism(b, rng), W)
            assert stratum_index(V, b) == i


@pytest.mark.parametrize("N", [1, 2, 3])
def test_gl_strata(N):
    b = make_gl("R", N)
    idx = [(i, j) for i in range(N + 1) for j in range(N + 1 - i)]
    assert len(idx) == stratum_count_gl(N)
    rng = np.random.default_rng(2)
    for ij in idx:
        for _ in range(10):
            assert stratum_index(random_stratum_point(b, ij, rng), b) == ij


def test_stratum_dimension_examples():
    assert stratum_dimension(make_form("R", "symmetric", 2, 1), 1) == 2
    assert stratum_dimension(make_form("C", "hermitian", 2, 1), 0) == 9
    assert stratum_dimension(make_gl("R", 2), (1, 1)) == 2
    assert [stratum_count_gl(N) for N in (1, 2, 3)] == [3, 6, 10]
    with pytest.raises(ValueError):
        stratum_dimension(make_form("R", "symmetric", 2, 1), 2)
    with pytest.raises(ValueError):
        stratum_count_gl(0)


@pytest.mark.parametrize("b, idx, expected", [
    (make_form("R", "symmetric", 2, 1), 1, 2),
    (make_form("R", "symmetric", 2, 2), 2, 2),
    (make_form("C", "hermitian", 1, 1), 1, 2),
    (make_form("C", "symmetric", m=4), 2, 4),
    (make_form("H", "antihermitian", m=2), 1, 2),
    (make_gl("H", 2), (1, 0), 3),
])
def test_verify_stratum_dimension_examples(b, idx, expected):
    r = verify_stratum_dimension(b, idx, seed=3)
    assert r.numeric_rank == r.analytic_rank == expected
    assert r.agrees and r.gap > 1e3


@pytest.mark.parametrize("b", FORMS, ids=IDS)
@pytest.mark.parametrize("i", [0, 1])
def test_transitivity_witness(b, i):
    rng = np.random.default_rng(4 + i)
    for _ in range(5):
        W1, W2 = random_stratum_point(b, i, rng), random_stratum_point(b, i, rng)
        g1, g2 = transitivity_witness(b, W1, W2)
        assert is_automorphism(g1, b, 1e-7) and is_automorphism(g2, b, 1e-7)
        assert act(g1, g2, W1).distance(W2) <= 1e-7


@pytest.mark.parametrize("b", FORMS, ids=IDS)
def test_degeneration_raises_index_by_one(b):
    """graph(g_t) stays in stratum 0 and converges to a stratum-1 limit."""
    conj = random_automorphism(b, 7, scale=0.5)
    W_inf = hyperbolic_limit(b, conj)
    assert stratum_index(W_inf, b) == 1
    dists = []
    ts = (1.0, 2.0, 4.0, 6.0, 8.0)
    for t in ts:
        W_t = embed_graph(hyperbolic_element(b, t, conj), b, tol=1e-6)
        assert stratum_index(W_t, b) == 0
        dists.append(W_t.distance(W_inf))
    assert all(b2 < a for a, b2 in zip(dists, dists[1:]))
    assert dists[-1] < 1e-3
    # distance decays like e^-t
    assert 0.5 < (dists[-1] / dists[2]) / np.exp(-4.0) < 2.0


def test_pi_components_of_limit_are_the_isotropic_lines():
    b = FORMS[0]
    F1, F2 = pi_project(hyperbolic_limit(b))
    assert F1.k == F2.k == 1
    assert is_isotropic(F1, b) and is_isotropic(F2, b)
