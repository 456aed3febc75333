from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triples.errors import CompositionNotZero, DimensionMismatch, ValidationError
from triples.linalg import GF, Q, SparseMatrix, compose, kernel_basis, rank, subquotient_dim

F2 = GF(2)
F5 = GF(5)


def dense(field, lists):
    return SparseMatrix.from_dense(field, lists)


def test_rank_empty_matrix():
    assert rank(SparseMatrix.zero(Q, 0, 0)) == 0


def test_rank_identity():
    assert rank(SparseMatrix.identity(Q, 3)) == 3


def test_rank_proportional_rows():
    assert rank(dense(Q, [[1, 2], [2, 4]])) == 1


def test_kernel_identity_empty():
    assert kernel_basis(SparseMatrix.identity(Q, 2)) == []


def test_kernel_zero_matrix():
    ker = kernel_basis(SparseMatrix.zero(Q, 2, 3))
    assert len(ker) == 3


def test_kernel_f2_forced_by_rank_nullity():
    m = dense(F2, [[1, 1]])
    ker = kernel_basis(m)
    assert len(ker) == 1
    assert ker[0] == {0: 1, 1: 1}


def test_compose_identity_and_zero():
    m = dense(Q, [[1, 2], [3, 4]])
    assert compose(SparseMatrix.identity(Q, 2), m) == m
    assert compose(m, SparseMatrix.zero(Q, 2, 5)).is_zero()


def test_compose_hand_computation():
    m = dense(Q, [[1, 1], [0, 1]])
    assert compose(m, m) == dense(Q, [[1, 2], [0, 1]])


def test_compose_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        compose(dense(Q, [[1]]), dense(Q, [[1, 2], [3, 4]]))


def test_subquotient_zero_maps():
    d_in = SparseMatrix.zero(Q, 3, 0)
    d_out = SparseMatrix.zero(Q, 0, 3)
    assert subquotient_dim(d_in, d_out) == 3


def test_subquotient_identity_in():
    d_in = SparseMatrix.identity(Q, 2)
    d_out = SparseMatrix.zero(Q, 0, 2)
    assert subquotient_dim(d_in, d_out) == 0


def test_subquotient_rank_nullity():
    d_in = SparseMatrix.zero(Q, 2, 0)
    d_out = dense(Q, [[1, 1]])
    assert subquotient_dim(d_in, d_out) == 1


def test_subquotient_rejects_nonzero_composition():
    d_in = SparseMatrix.identity(Q, 2)
    d_out = SparseMatrix.identity(Q, 2)
    with pytest.raises(CompositionNotZero):
        subquotient_dim(d_in, d_out)


def test_duplicate_entries_rejected():
    with pytest.raises(ValidationError):
        SparseMatrix.from_entries(Q, 2, 2, [(0, 0, 1), (0, 0, 2)])


def test_out_of_range_entries_rejected():
    with pytest.raises(DimensionMismatch):
        SparseMatrix.from_entries(Q, 2, 2, [(2, 0, 1)])


def test_no_stored_zeros():
    m = SparseMatrix.from_entries(Q, 2, 2, [(0, 0, 0), (1, 1, 3)])
    assert m.nnz == 1


def test_fraction_entries():
    m = dense(Q, [[Fraction(1, 2), Fraction(1, 3)], [Fraction(3, 2), 1]])
    assert rank(m) == 1


small_scalars = st.integers(min_value=-4, max_value=4)


def matrices(field, max_dim=5):
    return st.integers(min_value=0, max_value=max_dim).flatmap(
        lambda n: st.integers(min_value=0, max_value=max_dim).flatmap(
            lambda m: st.lists(
                st.lists(small_scalars, min_size=m, max_size=m),
                min_size=n,
                max_size=n,
            ).map(lambda rows: SparseMatrix.from_dense(field, rows))
        )
    )


@settings(max_examples=60, deadline=None)
@given(matrices(Q))
def test_rank_equals_rank_of_transpose(m):
    assert rank(m) == rank(m.transpose())


@settings(max_examples=60, deadline=None)
@given(matrices(Q, 4), matrices(Q, 4))
def test_rank_of_product_bounded(a, b):
    if a.ncols != b.nrows:
        b = SparseMatrix.from_dense(
            Q, [[0] * 3 for _ in range(a.ncols)]
        )
    ab = compose(a, b)
    assert rank(ab) <= min(rank(a), rank(b))


@settings(max_examples=60, deadline=None)
@given(matrices(Q))
def test_kernel_vectors_annihilated_and_counted(m):
    ker = kernel_basis(m)
    assert len(ker) == m.ncols - rank(m)
    for v in ker:
        assert m.apply(v) == {}
    if ker:
        mat = SparseMatrix.from_columns(Q, m.ncols, ker)
        assert rank(mat) == len(ker)


@settings(max_examples=60, deadline=None)
@given(matrices(F5))
def test_kernel_over_prime_field(m):
    ker = kernel_basis(m)
    assert len(ker) == m.ncols - rank(m)
    for v in ker:
        assert m.apply(v) == {}


@settings(max_examples=60, deadline=None)
@given(matrices(Q))
def test_rational_kernel_reduces_mod_p(m):
    """Q-kernel vectors with p-free denominators reduce into the F_p kernel."""
    p = 7
    fp = GF(p)
    mp = SparseMatrix.from_dense(fp, [[fp.coerce(v) for v in row] for row in m.to_dense()])
    for v in kernel_basis(m):
        if any(x.denominator % p == 0 for x in v.values()):
            continue
        vp = {j: fp.coerce(x) for j, x in v.items()}
        vp = {j: x for j, x in vp.items() if x != 0}
        assert mp.apply(vp) == {}


def test_field_parse_and_fmt():
    assert Q.parse("3/4") == Fraction(3, 4)
    assert Q.fmt(Fraction(-5, 1)) == "-5"
    assert F5.parse("12") == 2
    assert F5.fmt(7) == "2"


def test_gf_requires_prime():
    with pytest.raises(ValidationError):
        GF(6)
