import itertools

import pytest
from hypothesis import given, settings, strategies as st

from stmodent.linalg import (
    FMatrix, PrimeField, FieldMismatch, Echelon, rref, rank, kernel_basis,
    solve, kernel_of_columns,
)


def brute_kernel(rows, p):
    n = len(rows[0]) if rows else 0
    out = []
    for v in itertools.product(range(p), repeat=n):
        if all(sum(a * b for a, b in zip(r, v)) % p == 0 for r in rows):
            out.append(v)
    return out


def matmul_vec(rows, x, p):
    return tuple(sum(a * b for a, b in zip(r, x)) % p for r in rows)


def test_prime_field_rejects_composites():
    with pytest.raises(ValueError):
        PrimeField(4)
    with pytest.raises(ValueError):
        PrimeField(1)
    assert PrimeField(7).inv(3) == 5


def test_rref_identity_and_zero():
    i3 = FMatrix.identity(2, 3)
    r, piv, rk = rref(i3)
    assert r == i3 and piv == [0, 1, 2] and rk == 3
    z = FMatrix.zeros(2, 2, 3)
    r, piv, rk = rref(z)
    assert r == z and piv == [] and rk == 0


def test_rank_two_rows_sum_to_zero():
    m = FMatrix.from_rows(2, [[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    # oracle: kernel has 2 elements (0 and 111) so rank 3 - 1 = 2
    assert len(brute_kernel(m.to_lists(), 2)) == 2
    assert rank(m) == 2
    assert rref(m)[2] == 2
    ker = kernel_basis(m)
    assert ker == [(1, 1, 1)]
    assert matmul_vec(m.to_lists(), ker[0], 2) == (0, 0, 0)


def test_kernel_small_cases():
    assert kernel_basis(FMatrix.identity(2, 4)) == []
    assert kernel_basis(FMatrix.from_rows(2, [[1, 1]])) == [(1, 1)]


def test_solve_cases():
    assert solve(FMatrix.identity(2, 3), [1, 0, 1]) == (1, 0, 1)
    assert solve(FMatrix.zeros(2, 2, 2), [1, 0]) is None
    assert solve(FMatrix.from_rows(2, [[1, 1], [0, 1]]), [0, 1]) == (1, 1)


def test_solve_odd_prime():
    m = FMatrix.from_rows(3, [[1, 2], [2, 2]])
    x = solve(m, [1, 0])
    assert matmul_vec(m.to_lists(), x, 3) == (1, 0)


def test_mixed_characteristic_rejected():
    with pytest.raises(FieldMismatch):
        FMatrix.identity(2, 2) @ FMatrix.identity(3, 2)


def test_matmul_transpose():
    a = FMatrix.from_rows(2, [[1, 0, 1], [0, 1, 1]])
    b = FMatrix.from_rows(2, [[1, 1], [0, 1], [1, 0]])
    assert (a @ b).to_lists() == [[0, 1], [1, 1]]
    assert a.transpose().transpose() == a
    assert a.transpose().to_lists() == [[1, 0], [0, 1], [1, 1]]


def matrices(p, max_r=8, max_c=8):
    return st.integers(0, max_r).flatmap(lambda r: st.integers(0, max_c).flatmap(
        lambda c: st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c),
                           min_size=r, max_size=r).map(lambda rows: (rows, c))))


@given(matrices(2, 6, 6))
@settings(max_examples=60, deadline=None)
def test_kernel_matches_brute_force_gf2(data):
    rows, c = data
    m = FMatrix.from_rows(2, rows, ncols=c)
    ker = kernel_basis(m)
    assert 2 ** len(ker) == len(brute_kernel(rows, 2)) if rows else True
    for v in ker:
        assert not any(matmul_vec(rows, v, 2))
    assert rank(m) + len(ker) == c


@given(matrices(3, 5, 5))
@settings(max_examples=60, deadline=None)
def test_kernel_matches_brute_force_gf3(data):
    rows, c = data
    m = FMatrix.from_rows(3, rows, ncols=c)
    ker = kernel_basis(m)
    if rows:
        assert 3 ** len(ker) == len(brute_kernel(rows, 3))
    for v in ker:
        assert not any(matmul_vec(rows, v, 3))


@given(st.integers(1, 64), st.integers(1, 64), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_rank_nullity_and_idempotence(r, c, rnd):
    rows = [[rnd.randrange(2) for _ in range(c)] for _ in range(r)]
    m = FMatrix.from_rows(2, rows)
    red, piv, rk = rref(m)
    assert rk + len(kernel_basis(m)) == c
    assert rref(red)[0] == red
    assert piv == sorted(piv) and len(set(piv)) == len(piv)


@given(matrices(2, 6, 6), st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_solve_consistency(data, rnd):
    rows, c = data
    if not rows:
        return
    m = FMatrix.from_rows(2, rows, ncols=c)
    b = [rnd.randrange(2) for _ in rows]
    x = solve(m, b)
    if x is None:
        aug = FMatrix.from_rows(2, [r + [bi] for r, bi in zip(rows, b)])
        assert rank(aug) > rank(m)
    else:
        assert matmul_vec(rows, x, 2) == tuple(b)


def test_echelon_express_and_tagged_kernel():
    f = PrimeField(3)
    vecs = [f.pack(v) for v in ([1, 2, 0], [0, 1, 1], [1, 0, 2])]
    ech = Echelon(f)
    for i, v in enumerate(vecs):
        ech.add(v, f.unit(i))
    target = f.pack([2, 1, 1])
    combo = ech.express(target)
    acc = f.zero()
    for i, c in f.items(combo):
        acc = f.axpy(acc, c, vecs[i])
    assert acc == target
    # kernel of the 3 columns: v0 + v1 = (1,0,1); v2 - v0 - v1 ... check directly
    ker = kernel_of_columns(f, vecs)
    for k in ker:
        acc = f.zero()
        for i, c in f.items(k):
            acc = f.axpy(acc, c, vecs[i])
        assert not acc
