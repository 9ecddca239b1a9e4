import pytest

from starrep.errors import NotAdjointable
from starrep.fixtures import twisted_trace, wick_delta0
from starrep.gns import gns_representation
from starrep.prehilbert import (Operator, PreHilbertModule, adjoint, classical_limit_operator,
                                classical_limit_representation, classical_limit_space,
                                classify_isometry, is_positive_module, theta_operator,
                                verify_intertwiner, verify_representation)
from starrep.scalars import FormalScalar

lam = FormalScalar.lam
ONE, ZERO = FormalScalar.one(), FormalScalar.zero()


def diag_module(*entries):
    n = len(entries)
    return PreHilbertModule([[FormalScalar.coerce(entries[i]) if i == j else ZERO
                              for j in range(n)] for i in range(n)])


def test_adjoint_against_hand_solution():
    # G = diag(1, lam), A e1 = e2: <A e1, e2> = lam, so A* e2 = lam e1
    H = diag_module(1, lam())
    A = Operator([[ZERO, ZERO], [ONE, ZERO]], H, H)
    expected = Operator([[ZERO, lam()], [ZERO, ZERO]], H, H)
    assert adjoint(A) == expected
    assert adjoint(adjoint(A)) == A


def test_adjoint_defining_identity():
    H = PreHilbertModule([[FormalScalar.constant(2), lam(), ZERO],
                          [lam(), ONE, lam(2)],
                          [ZERO, lam(2), FormalScalar.series([3, 1])]])
    A = Operator([[FormalScalar.series([i + j, 1, -j]) for j in range(3)] for i in range(3)],
                 H, H)
    As = adjoint(A)
    for i in range(3):
        for j in range(3):
            ei, ej = H.basis_vector(i), H.basis_vector(j)
            assert H.inner(A.apply(ei), ej) == H.inner(ei, As.apply(ej))


def test_lambda_degenerate_gram_blocks_some_adjoints():
    # G = diag(1, lam): A e2 = e1 would need lam A* e1 = e2, impossible
    H = diag_module(1, lam())
    A = Operator([[ZERO, ONE], [ZERO, ZERO]], H, H)
    with pytest.raises(NotAdjointable):
        adjoint(A)


def test_degenerate_domain_not_adjointable():
    H = diag_module(1, 0)
    K = PreHilbertModule.standard(2)
    A = Operator([[ONE, ZERO], [ZERO, ONE]], H, K)
    with pytest.raises(NotAdjointable):
        adjoint(A)


def test_isometry_classes():
    C1, C2 = PreHilbertModule.standard(1), PreHilbertModule.standard(2)
    inc = Operator([[ONE], [ZERO]], C1, C2)
    assert classify_isometry(inc) == "isometric"
    swap = Operator([[ZERO, ONE], [ONE, ZERO]], C2, C2)
    assert classify_isometry(swap) == "unitary"
    assert classify_isometry(swap * 2) == "neither"


def test_theta_operator():
    H = diag_module(1, lam())
    phi, psi = H.vector([1, 2]), H.vector([0, 1])
    T = theta_operator(H, phi, psi)
    chi = H.vector([3, 5])
    # Theta(chi) = phi <psi, chi> = phi * 5 lam
    assert T.apply(chi) == [lam(1, 5), lam(1, 10)]
    assert adjoint(T) == theta_operator(H, psi, phi)


def test_zero_module():
    Z = PreHilbertModule.zero_module()
    assert Z.dim == 0 and Z.identity() == Z.identity()
    assert is_positive_module(Z)


def test_classical_limit_drops_lambda_null_vectors():
    H = diag_module(1, lam(), 2)
    cH, c = classical_limit_space(H)
    assert cH.dim == 2 and cH.ring == "C"
    assert c.apply(H.basis_vector(1)) == [FormalScalar.zero(0)] * 2
    A = Operator([[ZERO, ZERO, ONE], [ZERO, ZERO, ZERO], [ONE, ZERO, ZERO]], H, H)
    cA = classical_limit_operator(A)
    assert cA.apply(c.apply(H.basis_vector(0))) == c.apply(A.apply(H.basis_vector(0)))


def test_wick_gns_classical_limit_is_one_dimensional():
    W, omega, basis, spanning = wick_delta0()
    data = gns_representation(omega, basis, spanning)
    assert verify_representation(data.representation, W.generators()).passed
    c = classical_limit_representation(data.representation)
    assert c.carrier.dim == 1
    low = [a for a in c.spanning if all(W.degree(k) <= 2 for k in a.terms)]
    assert verify_representation(c, low).passed


def test_identity_intertwiner():
    T, omega, basis, spanning = twisted_trace(2)
    pi = gns_representation(omega, basis, spanning).representation
    rep = verify_intertwiner(pi.carrier.identity(), pi, pi)
    assert rep.passed and rep.details["class"] == "unitary"
    assert is_positive_module(pi.carrier)
