import math
import itertools

import pytest
from hypothesis import given, settings, strategies as st

from flowcat import linalg


# ---------------------------------------------------------------------------
# oracles
#
# Invariant-factor oracle: the product d_1 ... d_k equals the gcd of all
# k x k minors.  Computed independently of the elimination code (minor
# determinants by Laplace expansion) so the two can disagree.


def _minor_det(a, rows, cols):
    if len(rows) == 1:
        return a[rows[0]][cols[0]]
    total = 0
    r0 = rows[0]
    rest = rows[1:]
    for pos, c in enumerate(cols):
        sub = _minor_det(a, rest, cols[:pos] + cols[pos + 1 :])
        term = a[r0][c] * sub
        total += -term if pos % 2 else term
    return total


def minors_gcd_factors(a):
    m = len(a)
    n = len(a[0]) if a else 0
    gcds = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = math.gcd(g, _minor_det(a, rows, cols))
        if g == 0:
            break
        gcds.append(g)
    factors = []
    prev = 1
    for g in gcds:
        factors.append(g // prev)
        prev = g
    return factors


def conjugate_orbit_similar(a, b):
    # brute-force similarity oracle over the full group of invertible
    # GF(2) matrices; only for tiny sizes
    n = len(a)
    if len(b) != n:
        return False
    for g in linalg.gl2_enumerate(n):
        if linalg.f2_mul(g, a) == linalg.f2_mul(b, g):
            return True
    return False


small_entries = st.integers(min_value=-20, max_value=20)


def matrices(max_dim=5, entries=small_entries):
    return st.integers(min_value=1, max_value=max_dim).flatmap(
        lambda m: st.integers(min_value=1, max_value=max_dim).flatmap(
            lambda n: st.lists(
                st.lists(entries, min_size=n, max_size=n),
                min_size=m,
                max_size=m,
            )
        )
    )


def f2_matrices(max_dim=4):
    return st.integers(min_value=1, max_value=max_dim).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(0, 1), min_size=n, max_size=n),
            min_size=n,
            max_size=n,
        )
    )


# ---------------------------------------------------------------------------
# Smith normal form


def test_smith_worked_example():
    # oracle: gcd of entries = 2, gcd of 2x2 minors = |2*8 - 4*6| = 8,
    # so the invariant factors are (2, 8/2) = (2, 4); frozen
    dec = linalg.smith_normal_form([[2, 4], [6, 8]])
    assert dec.invariant_factors() == [2, 4]
    assert dec.d == linalg.mat_mul(linalg.mat_mul(dec.u, [[2, 4], [6, 8]]), dec.v)


def test_smith_zero_and_empty():
    assert linalg.smith_normal_form([[0, 0], [0, 0]]).invariant_factors() == []
    assert linalg.smith_normal_form([]).d == []


def test_smith_single_negative_entry():
    dec = linalg.smith_normal_form([[-7]])
    assert dec.d == [[7]]
    assert dec.u in ([[1]], [[-1]])


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_smith_reconstruction_and_chain(a):
    dec = linalg.smith_normal_form(a)
    assert dec.d == linalg.mat_mul(linalg.mat_mul(dec.u, a), dec.v)
    assert abs(linalg.det_bareiss(dec.u)) == 1
    assert abs(linalg.det_bareiss(dec.v)) == 1
    diag = dec.diagonal()
    for i in range(len(diag)):
        assert diag[i] >= 0
        for j in range(len(dec.d[i])):
            if j != i:
                assert dec.d[i][j] == 0
        if i + 1 < len(diag) and diag[i + 1] != 0:
            assert diag[i] != 0 and diag[i + 1] % diag[i] == 0


@settings(max_examples=100, deadline=None)
@given(matrices(max_dim=4, entries=st.integers(-9, 9)))
def test_smith_matches_minors_oracle(a):
    assert linalg.smith_normal_form(a).invariant_factors() == minors_gcd_factors(a)


def test_smith_is_deterministic():
    a = [[4, 6, 2], [6, 4, 8], [2, 8, 4]]
    first = linalg.smith_normal_form(a)
    second = linalg.smith_normal_form(a)
    assert first.u == second.u and first.v == second.v and first.d == second.d


def test_prime_power_refine():
    assert linalg.prime_power_refine(1) == []
    assert linalg.prime_power_refine(2) == [2]
    assert linalg.prime_power_refine(12) == [3, 4]
    assert linalg.prime_power_refine(360) == [5, 8, 9]
    assert linalg.prime_power_refine(97) == [97]


def test_det_bareiss_known_values():
    assert linalg.det_bareiss([[2, 0], [0, 3]]) == 6
    assert linalg.det_bareiss([[0, 1], [1, 0]]) == -1
    assert linalg.det_bareiss([[1, 2, 3], [4, 5, 6], [7, 8, 9]]) == 0


# ---------------------------------------------------------------------------
# GF(2) canonical form


def test_f2_block_shapes():
    one = linalg.f2_canonical_form([[1]])
    assert one.blocks == (linalg.F2Block(size=1, column=(1,)),)

    # x^2 + x + 1 is irreducible over GF(2): a single invertible block
    irr = linalg.f2_canonical_form([[1, 1], [1, 0]])
    assert irr.blocks == (linalg.F2Block(size=2, column=(1, 1)),)

    nil = linalg.f2_canonical_form([[0, 1], [0, 0]])
    assert nil.blocks == (linalg.F2Block(size=2, column=(0, 0)),)

    ident = linalg.f2_canonical_form([[1, 0], [0, 1]])
    assert ident.blocks == (
        linalg.F2Block(size=1, column=(1,)),
        linalg.F2Block(size=1, column=(1,)),
    )


def test_f2_identity_vs_irreducible_companion_distinct():
    assert not linalg.f2_similar([[1, 0], [0, 1]], [[1, 1], [1, 0]])


@settings(max_examples=80, deadline=None)
@given(f2_matrices())
def test_f2_basis_conjugates_to_canonical(a):
    form = linalg.f2_canonical_form(a)
    n = len(a)
    assert linalg.f2_is_invertible(form.basis) or n == 0
    assert linalg.f2_mul(a, form.basis) == linalg.f2_mul(form.basis, form.matrix())
    assert sum(b.size for b in form.blocks) == n


@settings(max_examples=60, deadline=None)
@given(f2_matrices(max_dim=3), st.integers(min_value=0, max_value=10 ** 6))
def test_f2_conjugation_invariance(a, pick):
    n = len(a)
    group = linalg.gl2_enumerate(n)
    g = group[pick % len(group)]
    inv = next(h for h in group if linalg.f2_mul(g, h) == linalg.identity(n))
    conj = linalg.f2_mul(linalg.f2_mul(g, a), inv)
    assert linalg.f2_canonical_form(conj).blocks == linalg.f2_canonical_form(a).blocks


@settings(max_examples=40, deadline=None)
@given(f2_matrices(max_dim=3), f2_matrices(max_dim=3))
def test_f2_similar_matches_orbit_search(a, b):
    assert linalg.f2_similar(a, b) == conjugate_orbit_similar(a, b)


def test_f2_canonical_idempotent():
    a = [[1, 1, 0], [0, 1, 1], [0, 0, 1]]
    form = linalg.f2_canonical_form(a)
    again = linalg.f2_canonical_form(form.matrix())
    assert again.blocks == form.blocks


def test_gl2_sizes():
    # |GL(n, 2)| = prod (2^n - 2^i); frozen: 1, 6, 168
    assert len(linalg.gl2_enumerate(1)) == 1
    assert len(linalg.gl2_enumerate(2)) == 6
    assert len(linalg.gl2_enumerate(3)) == 168
