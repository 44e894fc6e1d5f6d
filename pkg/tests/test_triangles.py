import pytest
from hypothesis import given, settings, strategies as st

from kbcat.complexes import (
    Triangle,
    compose,
    cone,
    direct_sum_complex,
    hom_kb,
    identity_map,
    is_iso_kb,
    shift,
    stalk,
    zero_complex,
    zero_map,
)
from kbcat.examples import Cyclic, DualNumbers, build_cyc, build_dn, dn_window, dual_numbers, window_objects
from kbcat.exactlin import GF, QQ
from kbcat.triangles import (
    NO,
    UNDETERMINED,
    YES,
    HypothesisViolated,
    NotIndecomposable,
    end_analysis,
    is_almost_vanishing,
    is_exact_triangle,
    is_retraction,
    is_section,
    non_retraction_basis,
    non_section_basis,
    rotate,
    scaling_test,
)

DN = DualNumbers()


def test_exactness_examples():
    assert is_exact_triangle(DN.triangle((0, 2))).ok
    x = build_dn(0, 1)
    t = Triangle(identity_map(x), zero_map(x, zero_complex(x.pres)), zero_map(zero_complex(x.pres), shift(x, 1)))
    assert is_exact_triangle(t).ok
    bad = Triangle(zero_map(x, x), zero_map(x, x), zero_map(x, shift(x, 1)))
    assert not is_exact_triangle(bad).ok


def test_exactness_certificate_is_iso():
    res = is_exact_triangle(DN.triangle((-1, 1)))
    assert res.ok and is_iso_kb(res.certificate)
    c, _ = cone(DN.triangle((-1, 1)).u)
    assert res.certificate.tgt == c


def test_isomorphic_but_wrong_maps_not_exact():
    # correct objects, third map replaced by zero
    t = DN.triangle((0, 1))
    bad = Triangle(t.u, t.v, zero_map(t.w.src, t.w.tgt))
    assert not is_exact_triangle(bad).ok


def test_section_retraction_examples():
    x = build_dn(0, 1)
    assert is_section(identity_map(x)) and is_retraction(identity_map(x))
    assert not is_section(DN.i((0, 1)))
    assert not is_retraction(DN.pi((0, 1)))


def test_end_analysis_examples():
    ea = end_analysis(build_dn(0, 1))
    assert ea.dim == 2 and ea.is_local == YES
    (rad,) = ea.radical_basis
    h = hom_kb(rad.src, rad.tgt)
    assert h.is_null(compose(rad, rad))
    assert not h.is_null(rad)
    cy = end_analysis(build_cyc(0, 0, 1, 3))
    assert cy.dim == 1 and cy.is_local == YES
    p = dual_numbers()
    aa = end_analysis(stalk(p, ["A", "A"]))
    assert aa.dim == 8 and aa.is_local in (NO, UNDETERMINED)
    assert aa.is_local == NO


@pytest.mark.parametrize("field", [QQ, GF(2), GF(3)])
def test_end_analysis_radical_nilpotent(field):
    ex = DualNumbers(field)
    for idx in [(0, 0), (0, 1), (-1, 1)]:
        ea = end_analysis(ex.X(idx))
        assert ea.is_local == YES
        for r in ea.radical_basis:
            assert hom_kb(r.src, r.tgt).is_null(compose(r, r))


def test_end_of_two_summands_not_local():
    x = direct_sum_complex(build_dn(0, 1), build_dn(0, 1))
    assert end_analysis(x).is_local == NO


def test_almost_vanishing_examples():
    win = dn_window(3)
    assert is_almost_vanishing(DN.delta((0, 1)), win).ok
    assert is_almost_vanishing(DN.delta((0, 0)), win).ok
    assert not is_almost_vanishing(identity_map(build_dn(0, 1)), win).ok
    assert not is_almost_vanishing(DN.i((0, 1)), win).ok
    assert not is_almost_vanishing(DN.pi((0, 1)), win).ok


def test_almost_vanishing_needs_indecomposables():
    x = direct_sum_complex(build_dn(0, 1), build_dn(0, 1))
    f = identity_map(x)
    with pytest.raises(NotIndecomposable):
        is_almost_vanishing(f, [x])


@given(st.sampled_from([(0, 1), (-1, 1), (0, 0), (1, 2)]), st.data())
def test_almost_vanishing_linear_in_non_splits(idx, data):
    """Random combinations of non-split basis maps are killed by Delta, not just basis maps."""
    delta = DN.delta(idx)
    x = DN.X(idx)
    objs = window_objects(DN, 2)
    b = data.draw(st.sampled_from(objs))
    ea = end_analysis(x)
    gs = non_retraction_basis(b, x, ea)
    fs = non_section_basis(x, b, ea)
    co = data.draw(st.lists(st.integers(-3, 3), min_size=6, max_size=6))
    g = zero_map(b, x)
    for c, m in zip(co, gs):
        g = g + m.scale(c)
    f = zero_map(x, b)
    for c, m in zip(co[::-1], fs):
        f = f + m.scale(c)
    assert not is_retraction(g) or not gs
    assert hom_kb(b, x).is_null(compose(delta, g))
    assert hom_kb(x, b).is_null(compose(f, delta))


def test_scaling_examples():
    t = DN.triangle((0, 1))
    assert scaling_test(t, 1)
    assert not scaling_test(t, 2)
    cy = Cyclic(3)
    t3 = cy.triangle((0, 0, 2))
    assert is_exact_triangle(t3).ok
    assert not scaling_test(t3, -1)


def test_scaling_hypothesis_violation():
    x = build_dn(0, 1)
    t = Triangle(zero_map(x, x), zero_map(x, x), zero_map(x, shift(x, 1)))
    with pytest.raises(HypothesisViolated):
        scaling_test(t, 2)


@pytest.mark.parametrize("idx", [(0, 1), (-1, 1), (0, 2), (1, 2)])
def test_rotation_preserves_exactness(idx):
    t = DN.triangle(idx)
    r = rotate(t)
    assert is_exact_triangle(t).ok and is_exact_triangle(r).ok
    assert is_exact_triangle(rotate(r)).ok


@given(st.sampled_from([(0, 1), (-1, 1), (0, 2)]), st.integers(-4, 4))
def test_scaling_iff_one_over_q(idx, lam):
    t = DN.triangle(idx)
    if lam == 0:
        return
    assert scaling_test(t, lam) == (lam == 1)


@settings(max_examples=10)
@given(st.sampled_from([(0, 1), (0, 2), (1, 1)]), st.sampled_from([(0, 1), (0, 0), (-1, 1)]), st.data())
def test_every_cone_triangle_exact(a, b, data):
    x, y = build_dn(*a), build_dn(*b)
    h = hom_kb(x, y)
    co = data.draw(st.lists(st.integers(-2, 2), min_size=len(h.chain_basis), max_size=len(h.chain_basis)))
    f = zero_map(x, y)
    for c, g in zip(co, h.chain_basis):
        f = f + g.scale(c)
    _, t = cone(f)
    assert is_exact_triangle(t).ok


def test_rotation_of_cone_triangle_in_f7():
    ex = DualNumbers(GF(7))
    t = ex.triangle((0, 2))
    assert is_exact_triangle(rotate(t)).ok
    assert not scaling_test(rotate(t), 3)
