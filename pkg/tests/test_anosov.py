import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isocompact.anosov import (
    GapError,
    RepSpec,
    ball_size,
    boundary_point,
    canonical_rotation,
    class_representatives,
    divergence_profile,
    domination_constant,
    evaluate,
    free_reduce,
    inverse_word,
    is_cyclically_reduced,
    is_primitive,
    limit_set,
    product_rep,
    word_ball,
    word_from_str,
    word_to_str,
)
from isocompact.cartan import cartan_mu
from isocompact.forms import automorphism_defect

import reps

letters = st.sampled_from([1, -1, 2, -2])
words = st.lists(letters, max_size=12).map(tuple)


def test_word_ball_examples():
    assert len(word_ball(2, 1)) == 4
    assert len(word_ball(2, 2)) == 16
    assert word_ball(1, 3).words == [(1,), (-1,), (1, 1), (-1, -1), (1, 1, 1), (-1, -1, -1)]
    assert ball_size(2, 8) == len(word_ball(2, 8)) == 4 * (3 ** 8 - 1) // 2
    with pytest.raises(ValueError):
        word_ball(2, 20, cap=1000)


@given(words)
def test_word_helpers(w):
    r = free_reduce(w)
    assert free_reduce(r + inverse_word(r)) == ()
    assert word_from_str(word_to_str(r)) == r
    if is_cyclically_reduced(r):
        c = canonical_rotation(r)
        assert len(c) == len(r) and c in [r[i:] + r[:i] for i in range(len(r))]


def test_primitive_and_classes():
    assert is_primitive((1, 2)) and not is_primitive((1, 2, 1, 2))
    reps_ = class_representatives(2, 2)
    assert set(map(word_to_str, reps_)) == {"a", "A", "b", "B", "aa", "AA", "bb", "BB", "ab", "aB", "Ab", "AB"}


def test_evaluate_examples():
    F = reps.fuchsian()
    assert np.allclose(evaluate(F, ()), np.eye(2))
    assert np.allclose(evaluate(F, (1, -1)), np.eye(2), atol=1e-10)
    # length-20 reduced word: Gram drift measured relative to |g|^2
    w = (1, 2, -1, -2) * 5
    Fo = reps.fuchsian_o21()
    g = evaluate(Fo, w)
    assert automorphism_defect(g, Fo.form) / np.linalg.norm(g, 2) ** 2 <= 1e-8
    with pytest.raises(ValueError):
        evaluate(F, (3,))


def test_rep_validation():
    with pytest.raises(ValueError):
        RepSpec(reps.SL2, [np.diag([2.0, 1.0])])
    with pytest.raises(ValueError):
        RepSpec(reps.SL2, [])


def test_divergence_examples():
    prof = divergence_profile(reps.fuchsian(), 1, 6)
    assert prof.verdict and "consistent at radius 6" in prof.label
    triv = divergence_profile(reps.trivial(), 1, 6)
    assert np.allclose(triv.minima, 0) and not triv.verdict
    ell = divergence_profile(reps.elliptic(), 1, 8)
    assert not ell.verdict and max(ell.minima) < 5
    with pytest.raises(IndexError):
        divergence_profile(reps.fuchsian(), 2, 3)


def test_divergence_workers_deterministic():
    a = divergence_profile(reps.fuchsian(), 1, 7, workers=1).as_dict()
    b = divergence_profile(reps.fuchsian(), 1, 7, workers=4).as_dict()
    assert a == b


def test_divergence_conjugation_sanity():
    """Profiles of rho and h rho h^-1 agree within 2 |mu(h)| per length."""
    h = np.array([[2.0, 1.0], [1.0, 1.0]])
    F = reps.fuchsian()
    Fh = RepSpec(F.form, [h @ g @ np.linalg.inv(h) for g in F.generators])
    bound = 2 * np.linalg.norm(np.asarray(cartan_mu(h, F.form)))
    # alpha_1 = 2 eps_1 for type C_1
    p, q = divergence_profile(F, 1, 6), divergence_profile(Fh, 1, 6)
    assert np.all(np.abs(np.array(p.minima) - np.array(q.minima)) <= 2 * bound + 1e-9)


def test_domination_examples():
    F = reps.fuchsian()
    r = domination_constant(F, reps.trivial(), 1, 4)
    assert r.c_hat == 0.0 and r.as_dict()["verdict"] == "dominates"
    r = domination_constant(F, F, 1, 4)
    assert r.c_hat == pytest.approx(1.0, abs=1e-9) and not r.verdict
    r = domination_constant(F, reps.half_speed(), 1, 4)
    assert r.c_hat == pytest.approx(0.5, abs=0.05)


def test_domination_reports_violations():
    r = domination_constant(reps.trivial(), reps.fuchsian(), 1, 3)
    assert r.violations and not r.verdict
    with pytest.raises(ValueError):
        domination_constant(reps.fuchsian(), reps.cyclic(), 1, 3)


def test_boundary_point_examples():
    bp = boundary_point(reps.cyclic(), (1,))
    assert bp.subspace.distance(type(bp.subspace).span(np.array([[1.0], [0.0]]), "R")) <= 1e-12
    assert bp.isotropic and bp.gap == pytest.approx(2 * np.log(3))
    shear = RepSpec(reps.SL2, [np.array([[1.0, 1.0], [0.0, 1.0]])])
    with pytest.raises(GapError):
        boundary_point(shear, (1,))
    with pytest.raises(ValueError):
        boundary_point(reps.fuchsian(), (1, -1))


def test_boundary_point_equivariance_o21():
    F = reps.fuchsian_o21()
    for w in class_representatives(2, 3):
        if not is_primitive(w):
            continue
        for u in ((1,), (2, 1), (-2,)):
            lhs = boundary_point(F, u + w + inverse_word(u)).subspace
            rhs = boundary_point(F, w).subspace.transform(evaluate(F, u))
            assert lhs.distance(rhs) <= 1e-6


def test_limit_set_examples():
    assert len(limit_set(reps.cyclic(), 5)) == 2
    with pytest.warns(RuntimeWarning):
        S = limit_set(reps.trivial(), 3)
    assert len(S) == 0 and S.warnings
    F = limit_set(reps.fuchsian(), 4, workers=3)
    G = limit_set(reps.fuchsian(), 4)
    assert [word_to_str(w) for w in F.source_words] == [word_to_str(w) for w in G.source_words]


def test_product_rep():
    P = product_rep(reps.fuchsian(), reps.half_speed())
    assert P.form.N == 4
    assert divergence_profile(P, 1, 5).verdict
    with pytest.raises(ValueError):
        product_rep(reps.fuchsian(), reps.fuchsian_o21())
