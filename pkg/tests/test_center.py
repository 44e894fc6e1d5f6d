import pytest

from kbcat.center import (
    Window,
    block_connectivity,
    family_from_components,
    in_span,
    induce,
    kernel_nilpotency_check,
    lemma_ric_family,
    naturality_violations,
    presentation_center,
    res_ind_check,
    solve_center,
    solve_triangle_center,
)
from kbcat.complexes import homotopic, identity_map, is_iso_kb, stalk
from kbcat.examples import DualNumbers, cyc_window, cyclic, dn_window, dual_numbers
from kbcat.exactlin import GF, QQ


@pytest.fixture(scope="module")
def dn2():
    w = dn_window(2)
    return w, solve_center(w), solve_triangle_center(w)


@pytest.fixture(scope="module")
def cyc2():
    w = cyc_window(3, 2)
    return w, solve_center(w), solve_triangle_center(w)


def diagonals(w):
    ex = DualNumbers()
    return sorted({m - n for (n, m) in ex.indices(w.descriptor["W"])})


def test_stalk_window_center():
    p = dual_numbers()
    a = stalk(p, "A")
    end = [(0, 0, identity_map(a).scale(c)) for c in (1,)]
    eps = DualNumbers().delta((0, 0))
    w = Window([a], end + [(0, 0, eps)])
    assert len(solve_center(w)) == 2
    assert len(solve_triangle_center(w)) == 2


def test_dual_numbers_center_dims(dn2):
    w, z, zt = dn2
    assert len(w) == 15
    assert len(z) == 1 + len(w)
    assert len(zt) == 1 + len(diagonals(w))
    assert 1 < len(zt) < len(z)


def test_triangle_center_inside_center(dn2):
    w, z, zt = dn2
    for fam in zt:
        assert in_span(z, fam)


def test_families_are_natural(dn2, cyc2):
    for w, z, zt in (dn2, cyc2):
        for fam in z:
            assert naturality_violations(fam) == []
        for fam in zt:
            assert naturality_violations(fam, with_sigma=True) == []


def test_cyclic_center_dims(cyc2):
    w, z, zt = cyc2
    assert len(w) == 45
    assert len(z) == 1 and len(zt) == 1


def test_sigma_pairs_are_isos(dn2):
    w, _, _ = dn2
    assert w.check_sigma_pairs() == []


def test_res_ind_dual_numbers(dn2):
    w, _, zt = dn2
    r = res_ind_check(w, dual_numbers())
    assert r.report.ok
    assert r.surjective and not r.injective
    assert len(r.kernel) == len(zt) - r.presentation_center_dim
    assert r.presentation_center_dim == 2


def test_res_ind_cyclic(cyc2):
    w, _, _ = cyc2
    r = res_ind_check(w, cyclic(3))
    assert r.report.ok and r.surjective and r.injective
    assert r.center_dim == r.presentation_center_dim == 1


def test_ind_of_identity_is_identity(dn2):
    w, _, _ = dn2
    p = dual_numbers()
    zp = presentation_center(p)
    one = {"A": p.coords("A", "A", identity_map(stalk(p, "A")).part(0))}
    fam = induce(w, p, one)
    for i, x in enumerate(w.objects):
        assert homotopic(fam.component(i), identity_map(x))
    assert len(zp) == 2


def test_nilpotency(dn2):
    w, _, _ = dn2
    p = dual_numbers()
    r = res_ind_check(w, p)
    assert kernel_nilpotency_check(r.kernel, 2, w, p).ok
    longest = max(len(x.degrees) for x in w.objects)
    assert kernel_nilpotency_check(r.kernel, longest, w, p).ok
    one = kernel_nilpotency_check(r.kernel, 1, w, p)
    assert not one.ok


def test_nilpotency_empty_kernel():
    assert kernel_nilpotency_check([], 1).ok


def test_lemma_family_examples(dn2):
    w, z, zt = dn2
    ex = DualNumbers()
    idxs = ex.indices(2)
    zero = lemma_ric_family(w, {k: (ex.delta(idx), 0) for k, idx in enumerate(idxs)})
    ident = family_from_components(w, {})
    assert zero.vector().tolist() == ident.vector().tolist()
    diag = lemma_ric_family(w, {k: (ex.delta(idx), 1) for k, idx in enumerate(idxs) if idx[1] - idx[0] == 1})
    assert in_span(zt, diag)
    p = dual_numbers()
    stalk_i = w.index(stalk(p, "A", 0))
    assert homotopic(diag.component(stalk_i), identity_map(w.objects[stalk_i]))
    full = lemma_ric_family(w, {k: (ex.delta(idx), 1) for k, idx in enumerate(idxs)})
    assert all(is_iso_kb(full.component(i)) for i in range(len(w)))
    assert in_span(z, full)


def test_center_matches_lemma_family_oracle(dn2):
    """The solver's center equals the span of Id and single-object Id + Delta families."""
    w, z, zt = dn2
    ex = DualNumbers()
    idxs = ex.indices(2)
    ident = family_from_components(w, {})
    fams = [ident] + [lemma_ric_family(w, {k: (ex.delta(idx), 1)}) for k, idx in enumerate(idxs)]
    for f in fams:
        assert in_span(z, f)
    from kbcat.exactlin import EchelonSpan

    span = EchelonSpan(QQ, len(ident.vector()))
    for f in fams:
        span.add(f.vector())
    assert len(span) == len(z)
    # triangle center: Id and one family per diagonal
    diag = [lemma_ric_family(w, {k: (ex.delta(idx), 1) for k, idx in enumerate(idxs) if idx[1] - idx[0] == dd})
            for dd in diagonals(w)]
    span = EchelonSpan(QQ, len(ident.vector()))
    for f in [ident] + diag:
        assert in_span(zt, f)
        span.add(f.vector())
    assert len(span) == len(zt)


def test_block_connectivity(dn2, cyc2):
    for w, _, _ in (dn2, cyc2):
        c = block_connectivity(w)
        assert c.connected and c.non_degenerate
    p = dual_numbers()
    far = Window([stalk(p, "A", 0), stalk(p, "A", 5)])
    c = block_connectivity(far)
    assert not c.connected and len(c.components) == 2


def test_center_over_f7():
    w = dn_window(1, GF(7))
    assert len(solve_center(w)) == 1 + len(w)
    assert len(solve_triangle_center(w)) == 1 + 3
