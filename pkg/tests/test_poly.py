from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from georeg import poly as P
from georeg.numlin import numerical_rank


def coeffs(max_degree=12):
    unit = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)
    return st.integers(0, max_degree).flatmap(lambda n: arrays(complex, n + 1, elements=unit))


# ---- parse / format -------------------------------------------------------


def test_parse_listing_polynomial():
    p = P.parse("1-.333*x+0.667*x^3+x^10-0.333*x^11+0.666*x^13")
    expected = np.zeros(14)
    expected[[0, 1, 3, 10, 11, 13]] = [1, -0.333, 0.667, 1, -0.333, 0.666]
    assert p.nominal_degree == 13
    assert np.array_equal(p.coeffs, expected)


def test_parse_zero_and_monomial():
    z = P.parse("0")
    assert z.nominal_degree == 0 and z.is_zero()
    assert np.array_equal(P.parse("x^2").coeffs, [0, 0, 1])


def test_parse_complex_literal_and_repeated_powers():
    p = P.parse("(1.5-2i)*x + x - 3 + 2*x")
    assert np.allclose(p.coeffs, [-3, 4.5 - 2j])


def test_parse_nominal_degree_pads():
    p = P.parse("1+x", nominal_degree=4)
    assert p.nominal_degree == 4 and p.exact_degree == 1
    with pytest.raises(ValueError):
        P.parse("x^3", nominal_degree=2)


def test_parse_other_variable_name():
    assert np.array_equal(P.parse("2*t^2 - t").coeffs, [0, -1, 2])
    with pytest.raises(P.PolynomialParseError):
        P.parse("x + y")


@pytest.mark.parametrize("text, pos", [("1 + x^-2", 6), ("1 + $x", 4), ("x^", 2), ("1 2", 2), ("", 0)])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(P.PolynomialParseError) as exc:
        P.parse(text)
    assert exc.value.pos == pos


def test_negative_exponent_message():
    with pytest.raises(P.PolynomialParseError, match="negative exponent"):
        P.parse("x^-1")


def test_format_canonical():
    assert P.format_poly(P.parse("-1.2-3*x^10")) == "-1.2 - 3*x^10"
    assert P.format_poly(P.Polynomial([0, 1])) == "x"
    assert P.format_poly(P.Polynomial([0.0])) == "0"
    assert P.format_poly(P.Polynomial([1j, 2 - 1j])) == "(0+1i) + (2-1i)*x"


@given(coeffs())
def test_format_parse_roundtrip(c):
    p = P.Polynomial(c)
    q = P.parse(P.format_poly(p), nominal_degree=p.nominal_degree)
    assert np.allclose(q.coeffs, p.coeffs, rtol=1e-14, atol=1e-15)
    assert np.isclose(q.norm(), p.norm(), rtol=1e-14)
    assert P.format_poly(q) == P.format_poly(p)


# ---- arithmetic -------------------------------------------------------------


def test_multiply_examples():
    assert np.array_equal(P.multiply(P.parse("1+x"), P.parse("1-x")).coeffs, [1, 0, -1])
    p = P.parse("3-x+2*x^4")
    assert P.multiply(p, P.Polynomial([1.0])) == p
    exact = P.multiply(P.parse("1+x^10"), P.Polynomial([1, -1 / 3, 0, 2 / 3]))
    expected = np.zeros(14)
    expected[[0, 1, 3, 10, 11, 13]] = [1, -1 / 3, 2 / 3, 1, -1 / 3, 2 / 3]
    assert np.allclose(exact.coeffs, expected, atol=1e-15)


def test_multiply_nominal_degree_adds():
    p = P.Polynomial([1, 0, 0])
    assert (p * P.Polynomial([1, 1])).nominal_degree == 3


@given(coeffs(), coeffs(), coeffs(6))
def test_multiply_commutative_associative(a, b, c):
    p, q, r = P.Polynomial(a), P.Polynomial(b), P.Polynomial(c)
    pq, qp = (p * q).coeffs, (q * p).coeffs
    scale = p.norm() * q.norm() + 1e-300
    assert np.linalg.norm(pq - qp) <= 1e-14 * scale
    lhs, rhs = ((p * q) * r).coeffs, (p * (q * r)).coeffs
    assert np.linalg.norm(lhs - rhs) <= 1e-14 * (scale * r.norm() * len(c) + 1e-300)


def test_dot_examples():
    assert P.dot(P.parse("1+2*x"), P.parse("3+4*x")) == 11
    assert P.dot(P.parse("1+x"), P.Polynomial([0.0])) == 0
    assert P.dot(P.parse("x^2"), P.parse("1+x")) == 0


def test_dot_is_bilinear_not_sesquilinear():
    p = P.Polynomial([1j])
    assert P.dot(p, p) == -1


def test_convolution_matrix_examples():
    M = P.convolution_matrix(P.parse("1+x"), 1)
    assert np.array_equal(M, [[1, 0], [1, 1], [0, 1]])
    assert np.array_equal(P.convolution_matrix(P.Polynomial([1.0]), 4), np.eye(5))
    with pytest.raises(ValueError):
        P.convolution_matrix(P.Polynomial([1.0]), -1)


@given(coeffs(), coeffs())
def test_convolution_matrix_matches_multiply(a, b):
    p, q = P.Polynomial(a), P.Polynomial(b)
    M = P.convolution_matrix(p, q.nominal_degree)
    assert M.shape == (p.nominal_degree + q.nominal_degree + 1, q.nominal_degree + 1)
    assert np.allclose(M @ q.coeffs, (p * q).coeffs, rtol=0, atol=1e-14)


# ---- Sylvester --------------------------------------------------------------


def test_sylvester_small_examples():
    S = P.sylvester_matrix(P.parse("x-1"), P.parse("x+1"))
    assert S.shape == (2, 2) and abs(np.linalg.det(S)) > 0.5
    S = P.sylvester_matrix(P.parse("x-1"), P.parse("x-1"))
    assert numerical_rank(S, 1e-12) == 1


def test_sylvester_shape_and_errors():
    p, q = P.Polynomial(np.ones(6)), P.Polynomial(np.ones(4))
    for k in (1, 2, 3):
        assert P.sylvester_matrix(p, q, k).shape == (5 + 3 - k + 1, 5 + 3 - 2 * k + 2)
    with pytest.raises(ValueError):
        P.sylvester_matrix(p, q, 4)
    with pytest.raises(ValueError):
        P.sylvester_matrix(p, P.Polynomial([0.0]))
    with pytest.raises(ValueError):
        P.sylvester_matrix(p, P.Polynomial([2.0]))


def test_sylvester_null_vector_gives_cofactors():
    u, v, w = P.parse("1+x^2"), P.parse("2-x"), P.parse("3+x+x^2")
    p, q = u * v, u * w
    S = P.sylvester_matrix(p, q, 2)
    _, s, Vh = np.linalg.svd(S)
    x = Vh[-1].conj()
    m = p.nominal_degree
    v0, w0 = P.Polynomial(x[: m - 1]), P.Polynomial(-x[m - 1:])
    assert np.allclose((q * v0).coeffs, (p * w0).coeffs, atol=1e-12)


def test_example_pair_nullity_exact():
    u = P.parse("1+x^10")
    p = u * P.Polynomial([1, -1 / 3, 0, 2 / 3])
    q = u * P.Polynomial([-10 / 7, -25 / 7])
    S = P.sylvester_matrix(p, q)
    assert S.shape[1] - numerical_rank(S, 1e-10) == 10


def test_subresultant_nullity_oracle():
    rng = np.random.default_rng(0)

    def disc(n):
        r = np.sqrt(rng.uniform(0, 1, n))
        return r * np.exp(2j * np.pi * rng.uniform(0, 1, n))

    for _ in range(120):
        k, dv, dw = (int(x) for x in rng.integers(1, 5, 3))
        u = P.Polynomial(np.append(disc(k), 1.0))
        v = P.Polynomial(np.append(disc(dv), 1.0))
        w = P.Polynomial(np.append(disc(dw), 1.0))
        if np.min(np.abs(np.roots(v.coeffs[::-1])[:, None] - np.roots(w.coeffs[::-1])[None, :])) < 1e-2:
            continue
        S = P.sylvester_matrix(u * v, u * w)
        assert S.shape[1] - numerical_rank(S, 1e-8) == k


# ---- calculus ---------------------------------------------------------------


def test_derivative_and_evaluate():
    assert np.array_equal(P.derivative(P.parse("x^3")).coeffs, [0, 0, 3])
    assert P.derivative(P.Polynomial([5.0])).nominal_degree == 0
    assert abs(P.evaluate(P.parse("1+x^2"), 1j)) == 0
    p = P.parse("7-2*x+x^5")
    assert p(0) == 7
    assert np.allclose(p(np.array([1.0, 2.0])), [6, 35])


@given(coeffs(), st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False))
def test_evaluate_matches_numpy(c, x):
    p = P.Polynomial(c)
    assert np.isclose(p(x), np.polyval(c[::-1], x), rtol=1e-12, atol=1e-12)


def test_trimmed_and_exact_degree():
    p = P.Polynomial([1, 2, 0, 0])
    assert p.nominal_degree == 3 and p.exact_degree == 1
    assert p.trimmed().nominal_degree == 1
    # tiny trailing coefficients are not dropped
    assert P.Polynomial([1, 1e-300]).exact_degree == 1
    with pytest.raises(ValueError):
        P.Polynomial([1, 2, 3], nominal_degree=1)


def test_polynomial_is_immutable():
    p = P.Polynomial([1.0, 2.0])
    with pytest.raises(ValueError):
        p.coeffs[0] = 5
