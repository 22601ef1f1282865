import random
from fractions import Fraction

import pytest

from swb.lattice import (
    LatticeError,
    QuadLattice,
    change_of_basis,
    delta_lattice,
    diagonal_lattice,
    direct_sum,
    gross_keating,
    hyperbolic_lattice,
    invariants,
    jordan_form,
    parse_lattice,
    plane_lattice,
    space_det,
    twisted_hyperbolic,
    zero_lattice,
)
from swb.padic import hilbert_symbol, quad_residue_symbol, valuation


def random_unimodular(rng, m, bound=3):
    """Random integer matrix with determinant +-1 (product of elementaries)."""
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    for _ in range(4 * m):
        i, j = rng.randrange(m), rng.randrange(m)
        if i == j:
            continue
        c = rng.randint(-bound, bound)
        for k in range(m):
            U[i][k] += c * U[j][k]
    if rng.random() < 0.5:
        U[0] = [-x for x in U[0]]
    return U


def test_delta_lattice_invariants():
    for p in (3, 5, 7):
        for N in (1, 2, 3, 4, 6, 9, 10, 45):
            inv = invariants(delta_lattice(N, p))
            assert inv.rank == 3
            assert inv.chi == quad_residue_symbol(Fraction(-N), p)
            assert inv.hasse == hilbert_symbol(N, -1, p)


def test_delta_dual_index():
    # det of the bilinear Gram is 2N, so the dual quotient has order p^v(2N)
    for p in (2, 3, 5):
        for N in (1, 2, 4, 6, 9, 12, 54):
            L = delta_lattice(N, p)
            assert valuation(L.det_bilinear(), p) == valuation(2 * N, p)


def test_plane_and_sums():
    for p in (2, 3):
        H = plane_lattice(p)
        assert H.q_value(0) == 0 and H.q_value(1) == 0 and H.gram[0][1] == 1
        L = diagonal_lattice([1], 3)
        assert direct_sum(L, zero_lattice(3)) == L
        assert direct_sum(diagonal_lattice([1], 3), diagonal_lattice([3], 3)) == diagonal_lattice([1, 3], 3)
    assert direct_sum(hyperbolic_lattice(2, 1, 5), delta_lattice(10, 5)).rank == 5


def test_hyperbolic_invariants():
    for p in (3, 5):
        for k in (1, 2, 3, 4, 5, 6):
            for eps in (1, -1):
                L = hyperbolic_lattice(k, eps, p)
                inv = invariants(L)
                assert inv.rank == k
                assert inv.chi == eps
                assert inv.val == 0  # self-dual
    # p=2 restrictions
    assert hyperbolic_lattice(4, 1, 2).rank == 4
    with pytest.raises(LatticeError):
        hyperbolic_lattice(3, 1, 2)
    with pytest.raises(LatticeError):
        hyperbolic_lattice(4, -1, 2)


def test_val_examples():
    for p in (3, 5):
        L = diagonal_lattice([1, p, p * p], p)
        # bilinear Gram is 2*diag(1, p, p^2)
        assert L.val() == 3
    assert diagonal_lattice([1], 3).val() == 0
    assert diagonal_lattice([1], 2).val() == 1  # v_2(2)


def test_invariants_unimodular_invariance():
    rng = random.Random(3)
    for p in (3, 5):
        for base in (
            diagonal_lattice([1, p, 2], p),
            delta_lattice(p * p, p),
            hyperbolic_lattice(4, -1, p),
        ):
            inv0 = invariants(base)
            for _ in range(20):
                U = random_unimodular(rng, base.rank)
                inv = invariants(change_of_basis(base, U))
                assert inv == inv0


def test_hasse_product_rule():
    rng = random.Random(5)
    pool = [1, 2, 3, 5, 6, 9, 10, 18, 45, 50]
    for p in (2, 3, 5):
        for _ in range(50):
            a = [Fraction(rng.choice(pool)) * rng.choice([1, -1]) for _ in range(rng.randint(1, 2))]
            b = [Fraction(rng.choice(pool)) * rng.choice([1, -1]) for _ in range(rng.randint(1, 2))]
            L, M = diagonal_lattice(a, p), diagonal_lattice(b, p)
            s = direct_sum(L, M)
            lhs = invariants(s).hasse
            rhs = (
                invariants(L).hasse
                * invariants(M).hasse
                * hilbert_symbol(space_det(L), space_det(M), p)
            )
            assert lhs == rhs, (a, b, p)


def test_jordan_form_roundtrip():
    rng = random.Random(9)
    for p in (3, 5):
        for _ in range(25):
            vals = [
                Fraction(rng.choice([1, 2, -1, -2])) * p ** rng.randint(0, 2)
                for _ in range(rng.randint(1, 3))
            ]
            L0 = diagonal_lattice(vals, p)
            L = change_of_basis(L0, random_unimodular(rng, L0.rank))
            jf = jordan_form(L)
            back = diagonal_lattice([u * Fraction(p) ** e for u, e in jf], p)
            assert invariants(back) == invariants(L0)


def test_gross_keating():
    assert gross_keating(diagonal_lattice([Fraction(25, 1), 3], 5)).a == 0
    assert gross_keating(diagonal_lattice([25, 3], 5)).b == 2
    gk = gross_keating(diagonal_lattice([1, 1], 5))
    assert (gk.a, gk.b) == (0, 0)
    # bilinear Gram [[2,1],[1,2]] at p=3: q-values 1 on the diagonal, pairing 1
    L = QuadLattice(3, [[1, 1], [1, 1]])
    gk = gross_keating(L)
    assert (gk.a, gk.b) == (0, 1)
    with pytest.raises(LatticeError):
        gross_keating(diagonal_lattice([1, 1], 2))


def test_twisted_hyperbolic():
    L = twisted_hyperbolic(4, 1, 12, 0, 3)
    assert L.diagonal_values() if L.is_diagonal() else True
    assert L.rank == 3 and L.q_value(0) == -12
    assert twisted_hyperbolic(2, 1, 12, 0, 3) == diagonal_lattice([-12], 3)
    assert twisted_hyperbolic(4, 1, 9, 1, 3).q_value(0) == -1
    with pytest.raises(LatticeError):
        twisted_hyperbolic(4, 1, 3, 1, 3)


def test_parse_lattice():
    assert parse_lattice("diag:1,3", 3) == diagonal_lattice([1, 3], 3)
    assert parse_lattice("hyp:4:+", 3) == hyperbolic_lattice(4, 1, 3)
    assert parse_lattice("delta:6", 3) == delta_lattice(6, 3)
    s = parse_lattice("sum:hyp:2:++diag:1/2,5", 5)
    assert s.rank == 4 and s.q_value(2) == Fraction(1, 2)
    with pytest.raises(LatticeError):
        parse_lattice("spam:1", 3)
