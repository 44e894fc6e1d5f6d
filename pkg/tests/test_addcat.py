import numpy as np
import pytest
from hypothesis import given, strategies as st

from kbcat.addcat import (
    CategoryPresentation,
    HomBasisElement,
    Mor,
    ShapeMismatch,
    UnknownLabel,
    compose,
    direct_sum,
    hom_dim,
    hom_space,
    identity,
    presentation_from_json,
    presentation_to_json,
    validate_presentation,
    zero_mor,
)
from kbcat.examples import cyc_label, cyclic, dual_numbers
from kbcat.exactlin import GF, QQ, Mat, rank


def eps_mor(p):
    a = p.obj("A")
    return Mor(a, a, p.basis("A", "A")[1].real)


def arrow(p, s, d):
    """The basis map P_s -> P_(s-1) (zero-based residue s)."""
    src, tgt = cyc_label(s, d), cyc_label(s - 1, d)
    (b,) = p.basis(src, tgt)
    return Mor(p.obj(src), p.obj(tgt), b.real)


@pytest.mark.parametrize("pres", [dual_numbers(), dual_numbers(GF(2)), cyclic(2), cyclic(3), cyclic(3, GF(7))])
def test_builtin_presentations_validate(pres):
    rep = validate_presentation(pres)
    assert rep.ok, rep.failures()


def test_missing_identity_is_reported():
    field = QQ
    eps = Mat(field, [[0, 0], [1, 0]])
    p = CategoryPresentation(field, [("A", 2)], {("A", "A"): [HomBasisElement("eps", eps)]})
    rep = validate_presentation(p)
    assert not rep.ok
    assert any(c.name.startswith("identity") and not c.ok for c in rep.checks)


def test_unfaithful_basis_is_reported():
    one = Mat.identity(QQ, 1)
    p = CategoryPresentation(QQ, [("A", 1)], {("A", "A"): [HomBasisElement("a", one), HomBasisElement("b", one)]})
    rep = validate_presentation(p)
    assert any(c.name.startswith("faithful") and not c.ok for c in rep.checks)


def test_epsilon_squares_to_zero():
    p = dual_numbers()
    e = eps_mor(p)
    assert compose(e, e).is_zero()
    assert compose(identity(e.src), e) == e


def test_cyclic_radical_square_zero():
    d = 3
    p = cyclic(d)
    for s in range(d):
        assert compose(arrow(p, s, d), arrow(p, s + 1, d)).is_zero()


def test_hom_space_examples():
    p = dual_numbers()
    assert hom_dim(p, p.obj("A"), p.obj("A")) == 2
    assert len(hom_space(p, p.obj("A"), p.zero_obj())) == 0
    c = cyclic(3)
    for s in range(3):
        assert hom_dim(c, c.obj(cyc_label(s, 3)), c.obj(cyc_label(s - 2, 3))) == 0
    assert hom_dim(c, c.obj("P1"), c.obj("P3")) == 1
    assert hom_dim(c, c.obj("P1"), c.obj("P2")) == 0
    c2 = cyclic(2)
    assert all(hom_dim(c2, c2.obj(l), c2.obj(l)) == 1 for l in c2.labels)
    with pytest.raises(UnknownLabel):
        p.obj("B")


def test_direct_sum_examples():
    p = dual_numbers()
    a = p.obj("A")
    s = direct_sum(identity(a), identity(a))
    assert s == identity(a + a)
    e = eps_mor(p)
    z = direct_sum(e, zero_mor(a, a))
    assert rank(z.real) == rank(e.real)
    assert rank(direct_sum(e, identity(a)).real) == rank(e.real) + 2


def test_compose_shape_mismatch():
    p = dual_numbers()
    a = p.obj("A")
    with pytest.raises(ShapeMismatch):
        compose(identity(a + a), identity(a))


def test_json_roundtrip():
    for p in (dual_numbers(), cyclic(3, GF(5))):
        q = presentation_from_json(presentation_to_json(p))
        assert q.labels == p.labels and q.field == p.field
        assert {k: [b.real for b in v] for k, v in q.homs.items()} == {k: [b.real for b in v] for k, v in p.homs.items()}


def random_mor(p, x, y, coeffs):
    basis = hom_space(p, x, y)
    out = zero_mor(x, y)
    for c, b in zip(coeffs, basis):
        out = out + b.scale(p.field(c))
    return out


summands = st.lists(st.sampled_from(["P1", "P2", "P3"]), min_size=0, max_size=3)
coeffs = st.lists(st.integers(-3, 3), min_size=12, max_size=12)


@given(summands, summands, summands, summands, coeffs, coeffs, coeffs)
def test_composition_associative_unital(s1, s2, s3, s4, c1, c2, c3):
    p = cyclic(3)
    x, y, z, w = (p.obj(*s) for s in (s1, s2, s3, s4))
    f, g, h = random_mor(p, x, y, c1), random_mor(p, y, z, c2), random_mor(p, z, w, c3)
    assert compose(h, compose(g, f)) == compose(compose(h, g), f)
    assert compose(identity(y), f) == f and compose(f, identity(x)) == f
    for m in (f, g, h, compose(g, f)):
        assert m.in_span()


@given(summands, summands, coeffs)
def test_coordinates_recovered_uniquely(s1, s2, c):
    p = cyclic(3)
    x, y = p.obj(*s1), p.obj(*s2)
    f = random_mor(p, x, y, c)
    for _, _, s, t, block in f.blocks():
        co = p.coords(s, t, block)
        basis = p.basis(s, t)
        rebuilt = np.zeros(block.shape, dtype=object)
        for k, b in zip(co, basis):
            rebuilt = rebuilt + k * b.real.a
        assert Mat(p.field, rebuilt) == block


@given(summands, summands, summands)
def test_hom_dim_additive(s1, s2, s3):
    p = cyclic(3)
    x, y, z = p.obj(*s1), p.obj(*s2), p.obj(*s3)
    assert hom_dim(p, x + y, z) == hom_dim(p, x, z) + hom_dim(p, y, z)
    assert hom_dim(p, z, x + y) == hom_dim(p, z, x) + hom_dim(p, z, y)
