"""The thirteen acceptance criteria, each replayed exactly (modulo lambda^(N+1)).

Every test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary under "acceptance criteria".
"""

import random

from gmpy2 import mpq

from starrep.cover import (CechClassData, LogValue, cech_relative_class, picard_action,
                           serre_swan, verify_serre_swan)
from starrep.errors import NonInvertibleClassicalPart
from starrep.fixtures import (FUNDAMENTAL_CYCLE, coboundary_class, flat_two_chart,
                              positive_functionals, tetra_sphere, tetra_sphere_model,
                              three_chart_disk, twisted_corner, twisted_trace, wick_delta0)
from starrep.gns import gns_representation, verify_gns
from starrep.morita import (FunctionalBimodule, ProjectionBimodule, deform_projection,
                            double_induction, gns_intertwiner, rieffel_induce,
                            scalar_representation, star_square_root)
from starrep.positivity import cauchy_schwarz_check, is_positive_functional
from starrep.prehilbert import (Operator, PreHilbertModule, adjoint, classical_limit_operator,
                                classical_limit_representation, classical_limit_space,
                                verify_intertwiner, verify_representation)
from starrep.scalars import FormalScalar, GaussRational, Sign, get_order, is_positive
from starrep.staralg import (MoyalAlgebra, WickAlgebra, check_associativity, check_hermitian,
                             random_hermitian_projection, twisted_matrix)

lam = FormalScalar.lam
I = GaussRational(0, 1)


def random_series(rng, depth=None):
    depth = get_order() if depth is None else depth
    lead = rng.randint(0, 2)
    return FormalScalar.series([0] * lead + [mpq(rng.randint(-9, 9), rng.randint(1, 5))
                                             for _ in range(depth + 1 - lead)])


def test_c01_star_product_axioms(criterion):
    with criterion(1, "Moyal/Wick associativity and Hermiticity on 100+ samples"):
        for A in (MoyalAlgebra(), WickAlgebra()):
            for check in (check_associativity, check_hermitian):
                report = check(A, 120, seed=11, max_degree=3)
                assert report.samples >= 100 and report.passed, report.failures[:1]


def test_c02_canonical_commutators(criterion):
    with criterion(2, "x*p - p*x = i lam, zbar*z - z*zbar = lam"):
        M, W = MoyalAlgebra(), WickAlgebra()
        assert M.x() * M.p() - M.p() * M.x() == M.unit().scale(lam(1, I))
        assert W.zbar() * W.z() - W.z() * W.zbar() == W.unit().scale(lam())


def test_c03_ordered_ring(criterion):
    with criterion(3, "trichotomy, cone closure, non-Archimedean witness"):
        rng = random.Random(3)
        values = [random_series(rng) for _ in range(300)]
        for a in values:
            assert [a > 0, a.is_zero(), a < 0].count(True) == 1
        for a, b in zip(values, values[1:]):
            if a > 0 and b > 0:
                assert a + b > 0 and a * b > 0
        for n in (1, 10, 100, 10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6):
            assert lam().scale(n) < 1
            assert is_positive(1 - lam().scale(n)) is Sign.POSITIVE


def test_c04_gns_reproduction(criterion):
    with criterion(4, "omega(A) = <psi_1, pi(A) psi_1>; Fock ladder"):
        W, omega, basis, spanning = wick_delta0()
        data = gns_representation(omega, basis, spanning)
        assert verify_gns(data, spanning).passed
        T, tr, tbasis, tspan = twisted_trace(2)
        tdata = gns_representation(tr, tbasis, tspan)
        assert verify_gns(tdata, tspan).passed
        H = data.carrier
        pi_zb = data.representation(W.zbar())
        for r in range(H.dim):
            expected = [FormalScalar.zero()] * H.dim
            if r:
                expected[r - 1] = lam(1, r)
            diff = [x - y for x, y in zip(pi_zb.apply(H.basis_vector(r)), expected)]
            assert all(H.inner(H.basis_vector(i), diff).is_zero() for i in range(H.dim))


def test_c05_cauchy_schwarz(criterion):
    with criterion(5, "Cauchy-Schwarz on 500 pairs per certified functional"):
        for name, (A, omega, basis, _) in sorted(positive_functionals().items()):
            cert = is_positive_functional(omega, basis)
            assert cert.positive, name
            rng = random.Random(5)
            for _ in range(500):
                a, b = A.random_element(rng), A.random_element(rng)
                assert cauchy_schwarz_check(omega, a, b, cert), name


def test_c06_square_root_round_trip(criterion):
    with criterion(6, "B'* B' = B* B with B'|0 = B|0 (50 samples each in twisted M2, M3)"):
        for k in (2, 3):
            T = twisted_matrix(k)
            rng = random.Random(60 + k)
            done = 0
            while done < 50:
                B = T.random_element(rng)
                try:
                    B.classical_inverse()
                except NonInvertibleClassicalPart:
                    continue
                A = B.involution() * B
                root = star_square_root(A, B.classical())
                assert root.involution() * root == A
                assert root.classical() == B.classical()
                done += 1


def test_c07_projection_deformation(criterion):
    with criterion(7, "P*P = P = P*, P|0 = P0 (50 samples each in twisted M2, M3)"):
        for k in (2, 3):
            T = twisted_matrix(k)
            rng = random.Random(70 + k)
            for _ in range(50):
                P0 = T.from_rows(random_hermitian_projection(rng, k, rng.randint(1, k - 1)))
                P = deform_projection(P0)
                assert P * P == P and P.involution() == P and P.classical() == P0


def _low_degree(A, elements, degree=2):
    if not hasattr(A, "degree"):
        return elements
    return [a for a in elements if all(A.degree(k) <= degree for k in a.terms)]


def test_c08_rieffel_generalizes_gns(criterion):
    with criterion(8, "induction through E = A is unitarily equivalent to GNS"):
        for name, (A, omega, basis, spanning) in sorted(positive_functionals().items()):
            gns = gns_representation(omega, basis, spanning)
            ind = rieffel_induce(FunctionalBimodule(omega, basis), scalar_representation())
            U = gns_intertwiner(gns, ind)
            probe = _low_degree(A, spanning)
            report = verify_intertwiner(U, gns.representation, ind.representation, probe)
            assert report.passed and report.details["class"] == "unitary", name


def test_c09_double_induction(criterion):
    with criterion(9, "R_Ebar R_E on the twisted corner is unitarily equivalent"):
        T, omega, basis, _ = twisted_trace(2)
        pi = gns_representation(omega, basis).representation
        _, P0 = twisted_corner(T=T)
        E = ProjectionBimodule(T, deform_projection(P0))
        second, U, report = double_induction(E, pi, basis)
        assert report.passed and report.details["class"] == "unitary"
        assert verify_representation(second.representation, basis).passed


def test_c10_serre_swan(criterion):
    with criterion(10, "pi o epsilon = id, P idempotent, classical limit (2 fixtures)"):
        flat = flat_two_chart()[1]
        disk = three_chart_disk()[2]
        for trans in (flat, disk):
            S = serre_swan(trans)
            report = verify_serre_swan(S, samples=3, seed=10, classical=serre_swan(trans.classical()))
            assert report.passed, report.failures[:1]


def test_c11_cech_integrality(criterion):
    with criterion(11, "tetra-sphere c1 = 1, coboundaries give 0, tails cancel"):
        model, logs, trans = tetra_sphere()
        assert trans.check_cocycle().passed
        c = cech_relative_class(model, logs)
        assert c.is_integral and c.pairing(FUNDAMENTAL_CYCLE) == 1
        assert all(t.is_zero() for t in c.tails.values())
        assert any(not logs[key].tail.is_zero() for key in logs)
        zero = cech_relative_class(model, coboundary_class(model))
        assert zero == CechClassData.zero(model.triples)


def test_c12_picard_action(criterion):
    with criterion(12, "Picard action laws and integrality-verdict shifts"):
        model = tetra_sphere_model()
        line = cech_relative_class(model, tetra_sphere()[1])
        zero = CechClassData.zero(model.triples)
        # a non-integral class: a quarter winding on one overlap
        logs = coboundary_class(model)
        key = sorted(logs, key=str)[0]
        t = logs[key]
        alg = t.tail.algebra
        quarter = alg.function({p: mpq(1, 4) for p in alg.points})
        logs[key] = LogValue(quarter if t.winding is None else t.winding + quarter, t.tail)
        frac = cech_relative_class(model, logs, strict=False)
        assert not frac.is_integral
        for c in (line, zero, frac):
            assert picard_action(zero, c) == c
            assert picard_action(line, picard_action(line, c)) == picard_action(line + line, c)
            shifted = picard_action(line, c)
            assert shifted.is_integral == c.is_integral
            assert shifted.pairing(FUNDAMENTAL_CYCLE) == c.pairing(FUNDAMENTAL_CYCLE) + 1


def test_c13_classical_limit(criterion):
    with criterion(13, "classical-limit functor on operators and representations"):
        n = 3
        H = PreHilbertModule.standard(n)
        cH, c = classical_limit_space(H)
        assert cH.dim == n and cH.gram == PreHilbertModule.standard(n, "C").gram
        rng = random.Random(13)
        G = PreHilbertModule([[FormalScalar.one() if i == j else FormalScalar.zero()
                               for j in range(n)] for i in range(n - 1)] +
                             [[FormalScalar.zero()] * (n - 1) + [lam()]])
        mats = [Operator([[random_series(rng, 2) for _ in range(n)] for _ in range(n)], H, H)
                for _ in range(3)]
        cmap = classical_limit_space(H)[1]
        for A in mats:
            for B in mats:
                assert classical_limit_operator(A * B) == \
                    classical_limit_operator(A) * classical_limit_operator(B)
            assert classical_limit_operator(adjoint(A)) == adjoint(classical_limit_operator(A))
        assert classical_limit_operator(H.identity()) == cH.identity()
        assert classical_limit_space(G)[0].dim == n - 1
        assert cmap.apply(H.basis_vector(0)) == cH.basis_vector(0)
        W, omega, basis, spanning = wick_delta0()
        rep = classical_limit_representation(gns_representation(omega, basis, spanning)
                                             .representation)
        assert rep.carrier.dim == 1
        assert verify_representation(rep, _low_degree(W, rep.spanning)).passed
        T, tr, tbasis, _ = twisted_trace(2)
        rep2 = classical_limit_representation(gns_representation(tr, tbasis).representation)
        assert rep2.carrier.dim == 4
        assert verify_representation(rep2, rep2.spanning).passed
