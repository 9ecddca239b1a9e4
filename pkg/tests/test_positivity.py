import random

import pytest
from gmpy2 import mpq

from starrep.errors import NonPositiveCoefficient, UncertifiedFunctional
from starrep.positivity import (LinearFunctional, algebraically_positive, cauchy_schwarz_check,
                                certify_gram, check_reality, deform_functional,
                                evaluation_at_origin, gram_matrix, in_positive_cone,
                                is_positive_functional, trace_functional)
from starrep.scalars import Sign, is_positive
from starrep.scalars import FormalScalar, GaussRational
from starrep.staralg import MoyalAlgebra, WickAlgebra, twisted_matrix, undeformed

lam = FormalScalar.lam
I = GaussRational(0, 1)


def test_wick_vacuum_gram_is_diagonal():
    W = WickAlgebra()
    basis = [W.unit(), W.z(), W.monomial((2, 0))]
    G = gram_matrix(evaluation_at_origin(W), basis)
    # <z^r, z^s> = delta_rs r! lam^r, hand-computed from zbar^r * z^r
    expected = [[FormalScalar.one(), 0, 0], [0, lam(), 0], [0, 0, lam(2, 2)]]
    for i in range(3):
        for j in range(3):
            assert G[i][j] == FormalScalar.coerce(expected[i][j])
    cert = is_positive_functional(evaluation_at_origin(W), basis)
    assert cert.kind == "graded_diagonal" and cert.verify()


def test_negative_witness_for_coefficient_of_x():
    M = MoyalAlgebra()
    omega = LinearFunctional(M, {(1, 0): 1}, "coeff_x")
    cert = is_positive_functional(omega, [M.unit(), M.x()])
    assert cert.kind == "witness_negative" and cert.verify()
    a = cert.data["element"]
    # a = 1 - x (up to normalisation): omega(a* a) = -2 omega(x) = -2
    value = omega(a.involution() * a)
    assert value < 0


def test_trace_on_twisted_matrices_factorizes():
    T = twisted_matrix(2)
    basis = [T.monomial(k) for k in T.keys()]
    cert = is_positive_functional(trace_functional(T), basis)
    assert cert.kind == "gram_factorization"
    assert cert.verify()
    assert all(w.re > 0 for w in cert.data["weights"])


def test_certificate_on_hand_matrix():
    one, l = FormalScalar.one(), lam()
    assert certify_gram([[one, l], [l, one]]).positive
    cert = certify_gram([[lam(2), l], [l, lam(2)]])
    assert cert.kind == "witness_negative" and cert.verify()


def test_moyal_delta0_deformed_is_unknown():
    M = MoyalAlgebra()
    omega0 = evaluation_at_origin(undeformed(M))
    omega, cert = deform_functional(omega0, M, [M.unit(), M.x(), M.p()])
    assert cert.status == "unknown"
    assert "note" in cert.data
    # (x + i p)* (x + i p) = x^2 + p^2 + i[x, p] = x^2 + p^2 - lam
    v = M.x() + M.p().scale(FormalScalar.constant(I))
    assert omega(v.involution() * v) == lam(1, -1)


def test_cauchy_schwarz_on_random_pairs():
    W = WickAlgebra(degree_cap=12)
    omega = evaluation_at_origin(W)
    rng = random.Random(0)
    for _ in range(30):
        a, b = W.random_element(rng), W.random_element(rng)
        assert cauchy_schwarz_check(omega, a, b)


def test_cauchy_schwarz_requires_certificate():
    M = MoyalAlgebra()
    omega = LinearFunctional(M, {(1, 0): 1}, "coeff_x")
    with pytest.raises(UncertifiedFunctional):
        cauchy_schwarz_check(omega, M.unit(), M.x())


def test_reality():
    T = twisted_matrix(2)
    assert check_reality(trace_functional(T), [T.monomial(k) for k in T.keys()]).passed


def test_algebraic_positivity():
    W = WickAlgebra()
    element, cert, report = algebraically_positive(
        [(1, W.z()), (lam(), W.unit())], [evaluation_at_origin(W)])
    assert cert.verify(element) and report.passed
    # zbar z + lam = z zbar + 2 lam, evaluated at 0: 2 lam
    assert evaluation_at_origin(W)(element) == lam(1, 2)
    with pytest.raises(NonPositiveCoefficient):
        algebraically_positive([(mpq(-1), W.z())])


def test_zero_functional_has_zero_gram():
    M = MoyalAlgebra()
    G = gram_matrix(LinearFunctional(M, {}, "zero"), [M.unit(), M.x()])
    assert all(x.is_zero() for row in G for x in row)


def test_cauchy_schwarz_equality_and_strict_case():
    W = WickAlgebra()
    omega = evaluation_at_origin(W)
    z, z2 = W.z(), W.monomial((2, 0))
    assert cauchy_schwarz_check(omega, z, z)
    # |omega(zbar z^2)|^2 = 0 < omega(zbar z) omega(zbar^2 z^2) = lam * 2 lam^2
    ab = omega(z.involution() * z2)
    rhs = omega(z.involution() * z) * omega(z2.involution() * z2)
    assert ab.is_zero() and rhs == lam(3, 2)
    assert is_positive(rhs - ab * ab.conj()) is Sign.POSITIVE


def test_moyal_square_of_real_generator():
    M = MoyalAlgebra()
    element, cert, _ = algebraically_positive([(1, M.x())])
    assert element == M.monomial((2, 0)) and len(cert.terms) == 1


def test_positive_cone_is_not_decided():
    M = MoyalAlgebra()
    with pytest.raises(NotImplementedError):
        in_positive_cone(M.unit())
