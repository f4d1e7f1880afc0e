import random

from parahn.gf import field_make
from parahn.linalg import (
    intersect_dim,
    kernel_basis,
    matmul,
    rank,
    rref,
    subspace_leq,
)


def test_rref_identity_fixed():
    F = field_make(3, 1)
    ident = ((1, 0), (0, 1))
    red, rk, piv = rref(F, ident)
    assert red == ident and rk == 2 and piv == (0, 1)


def test_rref_rank_one_over_f5():
    F = field_make(5, 1)
    red, rk, piv = rref(F, ((1, 2), (2, 4)))
    assert red == ((1, 2), (0, 0))
    assert rk == 1 and piv == (0,)


def test_rref_empty_matrix():
    F = field_make(3, 1)
    red, rk, piv = rref(F, ())
    assert red == () and rk == 0 and piv == ()


def test_rref_idempotent_and_row_space_preserved():
    F = field_make(3, 1)
    rng = random.Random(42)
    for _ in range(100):
        n, m = rng.randint(1, 4), rng.randint(1, 4)
        mat = tuple(
            tuple(rng.randrange(3) for _ in range(m)) for _ in range(n)
        )
        red, rk, _ = rref(F, mat)
        again, rk2, _ = rref(F, red)
        assert again == red and rk2 == rk
        # mutual containment of row spaces
        assert subspace_leq(F, mat, red) and subspace_leq(F, red, mat)


def test_kernel_basis_annihilates():
    F = field_make(3, 1)
    rng = random.Random(5)
    for _ in range(100):
        n, m = rng.randint(1, 4), rng.randint(1, 5)
        mat = tuple(
            tuple(rng.randrange(3) for _ in range(m)) for _ in range(n)
        )
        ker = kernel_basis(F, mat, ncols=m)
        assert len(ker) == m - rank(F, mat)
        for v in ker:
            prod = matmul(F, mat, tuple((x,) for x in v))
            assert all(row == (0,) for row in prod)


def test_intersect_dim_lines_in_plane():
    F = field_make(3, 1)
    a = ((1, 0),)
    b = ((0, 1),)
    assert intersect_dim(F, a, b) == 0
    assert intersect_dim(F, a, a) == 1
    assert intersect_dim(F, a + b, a) == 1
