from fractions import Fraction
from itertools import combinations
from math import gcd

import pytest
import sympy
from hypothesis import given, strategies as st

from tok.algebra.exterior import ExtElement, ext_mul, left_mult
from tok.algebra.linalg import Matrix, rank_q, smith_normal_form
from tok.algebra.poly import Poly

x1, x2, x3 = Poly.var("x1"), Poly.var("x2"), Poly.var("x3")


def perm_sign(seq):
    """Sign of the permutation sorting ``seq`` by counting inversions directly."""
    inv = sum(1 for i, j in combinations(range(len(seq)), 2) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


# -- exterior algebra ----------------------------------------------------------


def test_square_zero_and_anticommute():
    a1, a2 = ExtElement.gen(2, 1), ExtElement.gen(2, 2)
    assert not ext_mul(a1, a1)
    assert ext_mul(a1, a2) == ExtElement.monomial(2, [1, 2])
    assert ext_mul(a2, a1) == -ExtElement.monomial(2, [1, 2])


def test_product_sign_matches_permutation_oracle():
    lhs = ext_mul(ExtElement.gen(3, 2, x1), ExtElement.monomial(3, [1, 3]))
    assert lhs == ExtElement.monomial(3, [1, 2, 3], x1 * perm_sign([2, 1, 3]))
    assert lhs == ExtElement.monomial(3, [1, 2, 3], -x1)


def test_left_mult_examples():
    one = ExtElement.one(2)
    assert left_mult(x1, 1, one) == ExtElement.gen(2, 1, x1)
    assert not left_mult(x1, 1, ExtElement.gen(2, 1))
    assert left_mult(x1, 2, ExtElement.gen(2, 1)) == ExtElement.monomial(2, [1, 2], -x1)
    with pytest.raises(IndexError):
        left_mult(x1, 3, one)


def ext_elements(k):
    coeff = st.integers(-3, 3)
    return st.dictionaries(st.integers(0, (1 << k) - 1), coeff, max_size=5).map(lambda t: ExtElement(k, t))


@given(st.lists(st.integers(1, 5), min_size=1, max_size=5))
def test_monomial_sign_is_permutation_sign(idx):
    e = ExtElement.monomial(5, idx)
    if len(set(idx)) < len(idx):
        assert not e
    else:
        assert e == ExtElement.monomial(5, sorted(idx), perm_sign(idx))


@given(ext_elements(4), ext_elements(4), ext_elements(4))
def test_product_associative(u, v, w):
    assert ext_mul(ext_mul(u, v), w) == ext_mul(u, ext_mul(v, w))


@given(ext_elements(4), ext_elements(4), ext_elements(4))
def test_product_distributes(u, v, w):
    assert ext_mul(u, v + w) == ext_mul(u, v) + ext_mul(u, w)


@given(ext_elements(4), st.integers(1, 4), st.integers(-3, 3))
def test_left_mult_is_product_and_squares_to_zero(v, i, c):
    w = x1 * c
    assert left_mult(w, i, v) == ext_mul(ExtElement.gen(4, i, w), v)
    assert not left_mult(w, i, left_mult(w, i, v))


# -- polynomials -----------------------------------------------------------------


def test_eval_examples():
    assert (x1 + x2).evaluate({"x1": 1, "x2": 2}) == 3
    assert Poly().evaluate({"x1": 5}) == 0
    assert ((x1 + x2) * (x1 - x2)).evaluate({"x1": 2, "x2": 3}) == -5


polys = st.dictionaries(
    st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)), st.integers(-4, 4), max_size=5
).map(
    lambda t: sum(
        (Poly.const(c) * _power(x1, a) * _power(x2, b) * _power(x3, e) for (a, b, e), c in t.items()),
        Poly(),
    )
)


def _power(p, n):
    out = Poly.const(1)
    for _ in range(n):
        out = out * p
    return out


def _to_sympy(p):
    s = {n: sympy.Symbol(n) for n in ("x1", "x2", "x3")}
    return sum((c * sympy.Mul(*[s[v] ** e for v, e in mono]) for mono, c in p.terms.items()), sympy.Integer(0))


assignments = st.fixed_dictionaries({n: st.fractions(-5, 5, max_denominator=4) for n in ("x1", "x2", "x3")})


@given(polys, polys, assignments)
def test_eval_is_ring_homomorphism(p, q, a):
    assert (p + q).evaluate(a) == p.evaluate(a) + q.evaluate(a)
    assert (p * q).evaluate(a) == p.evaluate(a) * q.evaluate(a)


@given(polys, polys)
def test_arithmetic_against_sympy(p, q):
    assert sympy.expand(_to_sympy(p * q) - _to_sympy(p) * _to_sympy(q)) == 0
    assert sympy.expand(_to_sympy(p - q) - _to_sympy(p) + _to_sympy(q)) == 0


def test_mod_reduces_coefficients():
    assert (x1 * 3 + x2 * 2).mod(2) == x1


# -- linear algebra ----------------------------------------------------------------


def test_smith_examples():
    assert smith_normal_form([[2]]) == (1, [2])
    assert smith_normal_form(Matrix.identity(3)) == (3, [1, 1, 1])
    assert smith_normal_form([[2, 4], [4, 8]]) == (1, [2])
    assert smith_normal_form([[0, 0], [0, 0]]) == (0, [])


def test_rank_q_examples():
    assert rank_q([[0, 0], [0, 0]]) == 0
    assert rank_q(Matrix.identity(4)) == 4
    assert rank_q([[1, 2], [2, 4]]) == 1
    assert rank_q([[Fraction(1, 2), 1], [1, 2]]) == 1


def determinantal_divisors(rows):
    """d_i = gcd of all i x i minors; the elementary divisors are ratios of consecutive d_i."""
    m, n = len(rows), len(rows[0])
    out = [1]
    for size in range(1, min(m, n) + 1):
        g = 0
        for rs in combinations(range(m), size):
            for cs in combinations(range(n), size):
                g = gcd(g, int(sympy.Matrix([[rows[r][c] for c in cs] for r in rs]).det()))
        if g == 0:
            break
        out.append(g)
    return [out[i + 1] // out[i] for i in range(len(out) - 1)]


int_matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


@given(int_matrices)
def test_smith_matches_determinantal_divisors(rows):
    rank, divs = smith_normal_form(rows)
    assert divs == determinantal_divisors(rows)
    assert rank == len(divs) == sympy.Matrix(rows).rank()
    assert all(b % a == 0 for a, b in zip(divs, divs[1:]))


@given(int_matrices)
def test_rank_q_matches_sympy(rows):
    assert rank_q(rows) == sympy.Matrix(rows).rank()


@given(st.lists(st.lists(st.fractions(-3, 3, max_denominator=5), min_size=3, max_size=3), min_size=1, max_size=5))
def test_rank_q_rational(rows):
    assert rank_q(rows) == sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in r] for r in rows]).rank()


def test_smith_rejects_fractions():
    with pytest.raises(ValueError):
        smith_normal_form([[Fraction(1, 2)]])
