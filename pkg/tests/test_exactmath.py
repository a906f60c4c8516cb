import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from k0silting.exactmath import (
    QQ,
    FieldMatrix,
    IntMatrix,
    PrimeField,
    format_scalar,
    int_determinant,
    make_field,
    parse_scalar,
    rank_kernel,
    smith_normal_form,
    solve,
)

small_ints = st.integers(-6, 6)


def int_matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small_ints, min_size=c, max_size=c), min_size=r, max_size=r)))


def _det(rows):
    # Laplace expansion, independent of the Bareiss routine under test
    if not rows:
        return 1
    return sum((-1) ** j * rows[0][j] * _det([r[:j] + r[j + 1:] for r in rows[1:]]) for j in range(len(rows)))


def invariant_factors_by_minors(rows):
    """Invariant factors as ratios of gcds of k x k minors."""
    r, c = len(rows), len(rows[0])
    divisors = [1]
    for k in range(1, min(r, c) + 1):
        g = 0
        for ri in itertools.combinations(range(r), k):
            for ci in itertools.combinations(range(c), k):
                g = math.gcd(g, _det([[rows[i][j] for j in ci] for i in ri]))
        if g == 0:
            break
        divisors.append(g)
    return [divisors[k] // divisors[k - 1] for k in range(1, len(divisors))]


def test_diag_2_3_smith_form():
    snf = smith_normal_form(IntMatrix.from_rows([[2, 0], [0, 3]]))
    assert snf.diagonal == (1, 6)
    assert invariant_factors_by_minors([[2, 0], [0, 3]]) == [1, 6]


def test_smith_of_zero_and_empty_rows():
    assert smith_normal_form(IntMatrix.from_rows([[0, 0]])).diagonal == ()
    assert smith_normal_form(IntMatrix.from_rows([], cols=3)).diagonal == ()


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_smith_matches_minor_oracle(rows):
    a = IntMatrix.from_rows(rows)
    snf = smith_normal_form(a)
    assert list(snf.diagonal) == invariant_factors_by_minors(rows)
    assert snf.U @ a @ snf.V == snf.diagonal_matrix()
    assert abs(int_determinant(snf.U)) == 1 and abs(int_determinant(snf.V)) == 1
    for d, e in zip(snf.diagonal, snf.diagonal[1:]):
        assert e % d == 0
    assert all(d > 0 for d in snf.diagonal)


@settings(max_examples=40, deadline=None)
@given(int_matrices(), st.randoms(use_true_random=False))
def test_smith_permutation_invariance(rows, rnd):
    perm_rows = rows[:]
    rnd.shuffle(perm_rows)
    cols = list(range(len(rows[0])))
    rnd.shuffle(cols)
    permuted = [[r[j] for j in cols] for r in perm_rows]
    assert smith_normal_form(IntMatrix.from_rows(permuted)).diagonal == smith_normal_form(IntMatrix.from_rows(rows)).diagonal


@settings(max_examples=40, deadline=None)
@given(int_matrices(3, 3))
def test_bareiss_matches_laplace(rows):
    n = min(len(rows), len(rows[0]))
    sq = [r[:n] for r in rows[:n]]
    assert int_determinant(IntMatrix.from_rows(sq)) == _det(sq)


@settings(max_examples=60, deadline=None)
@given(int_matrices(5, 5))
def test_kernel_is_annihilated_and_rank_nullity(rows):
    m = FieldMatrix.from_rows(rows, QQ)
    rank, kernel = rank_kernel(m)
    assert rank + kernel.cols == m.cols
    assert (m @ kernel).is_zero()


@settings(max_examples=60, deadline=None)
@given(int_matrices(4, 4), st.data())
def test_solve_consistent_systems(rows, data):
    m = FieldMatrix.from_rows(rows, QQ)
    x = data.draw(st.lists(small_ints, min_size=m.cols, max_size=m.cols))
    b = m @ FieldMatrix.from_rows([[v] for v in x], QQ)
    sol = solve(m, b)
    assert sol is not None and m @ sol == b


def test_solve_inconsistent_and_shape_error():
    m = FieldMatrix.from_rows([[1, 1], [2, 2]], QQ)
    assert solve(m, FieldMatrix.from_rows([[1], [3]], QQ)) is None
    with pytest.raises(ValueError):
        solve(m, FieldMatrix.from_rows([[1]], QQ))


@given(st.fractions())
def test_rational_round_trip(q):
    assert parse_scalar(format_scalar(q)) == q
    assert isinstance(parse_scalar(format_scalar(q)), Fraction)


def test_prime_field_arithmetic():
    f = make_field("Fp:7")
    assert f == PrimeField(7)
    assert f(3) * f(5) == f(1)
    assert f(3) / f(5) * f(5) == f(3)
    assert f("1/2") * f(2) == f.one
    with pytest.raises(ValueError):
        make_field("Fp:9")
    with pytest.raises(ValueError):
        make_field("R")


@settings(max_examples=40, deadline=None)
@given(int_matrices(4, 4))
def test_mod_p_kernel(rows):
    f = PrimeField(5)
    m = FieldMatrix.from_rows([[f(v) for v in r] for r in rows], f)
    rank, kernel = rank_kernel(m)
    assert rank + kernel.cols == m.cols
    assert (m @ kernel).is_zero()
