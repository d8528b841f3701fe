"""Elimination, kernels and saturation against Fraction-Gauss oracles."""

import random
from fractions import Fraction

import pytest

from paramodular.errors import Inconsistent, Underdetermined
from paramodular.fields import GF, QQ
from paramodular.linalg import (bareiss_echelon, integer_kernel, kernel,
                                kernel_mod_p, rank, rank_mod_p, saturate,
                                solve)


def gauss_rank_oracle(rows):
    """Plain Fraction Gaussian elimination, independent of the package path."""
    M = [[Fraction(x) for x in r] for r in rows]
    rk = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[rk], M[piv] = M[piv], M[rk]
        for i in range(len(M)):
            if i != rk and M[i][c]:
                f = M[i][c] / M[rk][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[rk])]
        rk += 1
    return rk


def rand_matrix(rng, m, n, lo=-9, hi=9, frac=False):
    def entry():
        if frac and rng.random() < 0.3:
            return Fraction(rng.randrange(lo, hi + 1), rng.randrange(1, 7))
        return rng.randrange(lo, hi + 1)
    return [[entry() for _ in range(n)] for _ in range(m)]


def test_rank_matches_gauss_oracle():
    rng = random.Random(7)
    for _ in range(60):
        m, n = rng.randrange(1, 7), rng.randrange(1, 7)
        M = rand_matrix(rng, m, n, frac=True)
        assert rank(M) == gauss_rank_oracle(M)


def test_bareiss_stays_integral():
    rng = random.Random(19)
    M = rand_matrix(rng, 6, 6, lo=-50, hi=50)
    E, piv = bareiss_echelon(M)
    for r in E:
        assert all(isinstance(x, int) for x in r)
    assert len(piv) == gauss_rank_oracle(M)


def test_kernel_annihilates_and_counts():
    rng = random.Random(31)
    for field in (QQ, GF(12347)):
        for _ in range(25):
            m, n = rng.randrange(1, 6), rng.randrange(1, 6)
            M = rand_matrix(rng, m, n)
            basis = kernel(M, n, field)
            assert len(basis) == n - rank(M, field)
            for v in basis:
                for row in M:
                    s = sum(field.coerce(a) * field.coerce(b)
                            for a, b in zip(row, v))
                    assert field.coerce(s) == field.zero


def test_kernel_vectors_primitive_over_q():
    basis = kernel([[2, 4, 6]], 3, QQ)
    for v in basis:
        from math import gcd
        assert gcd(*v) == 1
        assert next(x for x in v if x) > 0


def test_solve_roundtrip_and_failures():
    rng = random.Random(43)
    for field in (QQ, GF(101)):
        for _ in range(20):
            n = rng.randrange(1, 5)
            m = n + rng.randrange(0, 3)
            while True:
                A = rand_matrix(rng, m, n)
                if rank(A, field) == n:
                    break
            x = [rng.randrange(-5, 6) for _ in range(n)]
            y = [sum(a * b for a, b in zip(row, x)) for row in A]
            got = solve(A, y, n, field)
            assert [field.normalize(field.coerce(g)) for g in got] == \
                   [field.normalize(field.coerce(v)) for v in x]
    with pytest.raises(Underdetermined):
        solve([[1, 2]], [3], 2)
    with pytest.raises(Inconsistent):
        solve([[1, 0], [1, 0], [0, 1]], [1, 2, 0], 2)


def test_integer_kernel_basic():
    # kernel of (x + y + z = 0, x - z = 0) over Z
    ker = integer_kernel([[1, 1, 1], [1, 0, -1]], 3)
    assert len(ker) == 1
    v = ker[0]
    assert v == [1, -2, 1]


def test_integer_kernel_is_saturated():
    rng = random.Random(57)
    for _ in range(30):
        m, n = rng.randrange(1, 5), rng.randrange(2, 7)
        M = rand_matrix(rng, m, n, lo=-20, hi=20)
        ker = integer_kernel(M, n)
        for row in M:
            for v in ker:
                assert sum(a * b for a, b in zip(row, v)) == 0
        assert len(ker) == n - gauss_rank_oracle(M)
        # saturated: mod-p rank equals rank for several p
        if ker:
            rk = gauss_rank_oracle(ker)
            for p in (2, 3, 12347):
                assert rank_mod_p(ker, p) == rk


def test_saturate_index_two_example():
    # span{(2,0),(0,1)} has index 2 in Z^2; mod 2 it drops rank
    L = [[2, 0], [0, 1]]
    assert rank_mod_p(L, 2) == 1
    S = saturate(L, 2)
    assert gauss_rank_oracle(S) == 2
    assert rank_mod_p(S, 2) == 2


def test_saturate_properties_random():
    rng = random.Random(71)
    for _ in range(40):
        m, n = rng.randrange(1, 6), rng.randrange(1, 8)
        M = rand_matrix(rng, m, n, lo=-10 ** 6, hi=10 ** 6)
        S = saturate(M, n)
        rk = gauss_rank_oracle(M)
        assert gauss_rank_oracle(S) == rk
        # idempotent up to span: saturating again keeps rank and mod-p ranks
        S2 = saturate(S, n)
        assert gauss_rank_oracle(S2) == rk
        for p in (2, 3, 12347):
            assert rank_mod_p(S, p) == rk
        # original rows lie in the span of S over Q
        if S:
            stacked = S + M
            assert gauss_rank_oracle(stacked) == rk


def test_kernel_mod_p_annihilates():
    rng = random.Random(83)
    p = 101
    for _ in range(20):
        m, n = rng.randrange(1, 6), rng.randrange(1, 6)
        M = rand_matrix(rng, m, n)
        for v in kernel_mod_p(M, n, p):
            for row in M:
                assert sum(a * b for a, b in zip(row, v)) % p == 0
