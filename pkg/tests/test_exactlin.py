import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kbcat import _kernels
from kbcat.exactlin import (
    GF,
    QQ,
    EchelonSpan,
    Field,
    LinearSolver,
    Mat,
    SubspaceNotContained,
    kernel_basis,
    quotient_basis,
    rank,
    solve,
)


def oracle_rank(rows, p=None):
    """Plain Gaussian elimination on lists, written independently of the library."""
    m = [[Fraction(x) if p is None else x % p for x in r] for r in rows]
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c] if p is None else pow(m[r][c], -1, p)
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [a - f * b if p is None else (a - f * b) % p for a, b in zip(m[i], m[r])]
        r += 1
    return r


def brute_rank_f2(rows):
    """Rank over F2 from the size of the row space."""
    if not rows:
        return 0
    vecs = {tuple(x % 2 for x in r) for r in rows}
    span = {tuple([0] * len(rows[0]))}
    for v in vecs:
        span |= {tuple((a + b) % 2 for a, b in zip(s, v)) for s in span}
    return len(span).bit_length() - 1


small_int = st.integers(-4, 4)


def matrices(max_r=5, max_c=5):
    return st.integers(1, max_r).flatmap(
        lambda r: st.integers(1, max_c).flatmap(
            lambda c: st.lists(st.lists(small_int, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


fields = st.sampled_from([QQ, GF(2), GF(7), GF(101)])


def test_rank_examples():
    assert rank(Mat(QQ, [[0, 0], [1, 0]])) == 1
    assert rank(Mat.identity(QQ, 2)) == 2
    assert rank(Mat.zeros(QQ, 3, 5)) == 0


def test_kernel_examples():
    assert kernel_basis(Mat.identity(QQ, 2)) == []
    (v,) = kernel_basis(Mat(QQ, [[0, 0], [1, 0]]))
    assert list(v) == [0, 1]
    ks = kernel_basis(Mat.zeros(QQ, 2, 2))
    assert [list(k) for k in ks] == [[1, 0], [0, 1]]


def test_solve_examples():
    assert list(solve(Mat(QQ, [[1, 1], [0, 0]]), [1, 0])) == [1, 0]
    b = [Fraction(3, 2), Fraction(-5)]
    assert list(solve(Mat.identity(QQ, 2), b)) == b
    assert solve(Mat(QQ, [[0]]), [1]) is None


def test_quotient_basis_examples():
    e = [np.array([Fraction(int(i == j)) for j in range(3)], dtype=object) for i in range(3)]
    got = quotient_basis(QQ, 3, [e[0]], e)
    assert [list(v) for v in got] == [list(e[1]), list(e[2])]
    assert quotient_basis(QQ, 3, e, e) == []
    f2 = GF(2)
    e1, e2 = f2.array([1, 0]), f2.array([0, 1])
    got = quotient_basis(f2, 2, [e2], [e1, f2.array([1, 1])])
    assert len(got) == 1 and list(got[0]) == [1, 0]


def test_quotient_basis_rejects_outside_subspace():
    e1, e2 = QQ.array([1, 0]), QQ.array([0, 1])
    with pytest.raises(SubspaceNotContained):
        quotient_basis(QQ, 2, [e2], [e1])


def test_field_parsing_and_format():
    assert Field.parse("q") == QQ
    assert Field.parse("fp:7") == GF(7)
    with pytest.raises(ValueError):
        Field.parse("fp:8")
    assert QQ.format(Fraction(-1, 2)) == "-1/2"
    assert GF(7).format(-1) == "6"
    assert QQ.format(Fraction(6, 2)) == "3"


@given(fields, matrices())
def test_rank_nullity(field, rows):
    m = Mat(field, rows)
    ker = kernel_basis(m)
    assert rank(m) + len(ker) == m.cols
    for v in ker:
        assert not np.any(field.norm(m.a @ v) != 0)


@given(fields, matrices())
def test_rank_matches_oracle(field, rows):
    p = None if field.kind == "Q" else field.p
    assert rank(Mat(field, rows)) == oracle_rank(rows, p)


@given(matrices(4, 4))
def test_rank_f2_brute_force(rows):
    assert rank(Mat(GF(2), rows)) == brute_rank_f2(rows)


@given(fields, matrices(), st.data())
def test_solve_by_substitution(field, rows, data):
    m = Mat(field, rows)
    x0 = field.array(data.draw(st.lists(small_int, min_size=m.cols, max_size=m.cols)))
    b = field.norm(m.a @ x0)
    x = solve(m, b)
    assert x is not None
    assert np.array_equal(field.norm(m.a @ x), b)
    x2 = LinearSolver(m).solve(b)
    assert np.array_equal(x, x2)


@given(fields, matrices(), st.lists(small_int, min_size=5, max_size=5))
def test_solve_detects_inconsistency(field, rows, rhs):
    m = Mat(field, rows)
    b = field.array(rhs[: m.rows])
    x = solve(m, b)
    aug = Mat(field, [list(r) + [v] for r, v in zip(rows, rhs)])
    consistent = rank(aug) == rank(m)
    assert (x is not None) == consistent


@given(fields, st.lists(st.lists(small_int, min_size=4, max_size=4), max_size=6))
def test_echelon_span_dimension(field, vecs):
    span = EchelonSpan(field, 4)
    for v in vecs:
        span.add(field.array(v))
    expected = oracle_rank(vecs, None if field.kind == "Q" else field.p) if vecs else 0
    assert len(span) == expected
    for v in vecs:
        assert span.contains(field.array(v))


@pytest.mark.parametrize("backend", ["numba", "numpy"])
@given(st.sampled_from([GF(2), GF(7), GF(101)]), matrices(6, 6))
def test_backends_agree(backend, field, rows):
    if backend == "numba" and not _kernels.HAVE_NUMBA:
        pytest.skip("numba not importable")
    prev = _kernels.set_backend(backend)
    try:
        m = Mat(field, rows)
        r1 = rank(m)
        k1 = [list(v) for v in kernel_basis(m)]
    finally:
        _kernels.set_backend(prev)
    other = "numpy" if backend == "numba" else prev
    prev = _kernels.set_backend(other)
    try:
        assert rank(m) == r1
        assert [list(v) for v in kernel_basis(m)] == k1
    finally:
        _kernels.set_backend(prev)


def test_outputs_are_deterministic():
    rows = [[1, 2, 3], [2, 4, 6], [0, 1, 5]]
    outs = {tuple(tuple(v) for v in kernel_basis(Mat(QQ, rows))) for _ in range(3)}
    assert len(outs) == 1


def test_exhaustive_f2_3x3():
    # every 3x3 matrix over F2
    for bits in itertools.product([0, 1], repeat=9):
        rows = [list(bits[0:3]), list(bits[3:6]), list(bits[6:9])]
        assert rank(Mat(GF(2), rows)) == brute_rank_f2(rows)
