import random

import pytest
import sympy as sp
from gmpy2 import mpq

from oracles import cech_numbers
from starrep.cover import (CechClassData, CoverModel, GluedModule, LogValue, TransitionData,
                           cech_relative_class, check_compatible, coboundary_transitions,
                           endo_transport, expand_in_frame, logs_to_transitions,
                           module_from_transitions, orthonormalize_frame, picard_action,
                           probe_center_closure, random_section, repair_partition, serre_swan,
                           stereographic_weights, transfer, transition_logs,
                           verify_endo_transport, verify_glued_module, verify_serre_swan)
from starrep.errors import (ClassicalNotOrthonormal, CocycleViolation, DegenerateFrame,
                            NerveMismatch, NonUnitaryTransitions, NotConstant, NotIntegral,
                            PartitionRepairFailure)
from starrep.fixtures import (FACES, FUNDAMENTAL_CYCLE, coboundary_class, flat_two_chart,
                              tetra_sphere, tetra_sphere_model, three_chart_disk)
from starrep.scalars import FormalScalar, GaussRational
from starrep.staralg import MatrixOverAlgebra

lam = FormalScalar.lam


@pytest.fixture(scope="module")
def disk():
    return three_chart_disk()


def test_cover_model_structure():
    model, _ = flat_two_chart()
    assert model.overlaps[(0, 1)] == ("p0", "p2") == model.overlaps[(1, 0)]
    assert model.triples == []
    with pytest.raises(ValueError):
        CoverModel(["a", "b"], {0: ["a"]})


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_stereographic_weights_square_sum(m):
    assert sum(w * w for w in stereographic_weights(m)) == 1


def test_partitions(disk):
    model = disk[0]
    A = model.algebra
    lin = sum((model.partition[a] for a in model.chart_names), A.zero())
    quad = sum((model.quadratic[a].involution() * model.quadratic[a]
                for a in model.chart_names), A.zero())
    assert lin == A.unit() and quad == A.unit()


def test_repair_partition():
    model, _ = flat_two_chart()
    doubled = {a: c.scale(2) for a, c in model.quadratic.items()}
    chi, V = repair_partition(model, doubled)
    assert V == model.algebra.unit().scale(2)
    assert chi == model.quadratic
    # the linear partition has sum |chi|^2 = 1/2 on overlaps: no rational root
    with pytest.raises(PartitionRepairFailure):
        repair_partition(model, model.partition)


def test_cocycle_checks(disk):
    model, phi, phihat = disk
    assert phi.check_cocycle().passed and phihat.check_cocycle().passed
    assert phihat.is_unitary()
    broken = dict(phihat.phi)
    broken[(0, 1)] = broken[(0, 1)].scale(2)
    with pytest.raises(CocycleViolation):
        TransitionData(model, 2, broken).check_cocycle()
    assert not TransitionData(model, 2, broken).check_cocycle(strict=False).passed
    del broken[(0, 1)]
    with pytest.raises(CocycleViolation):
        TransitionData(model, 2, broken)


def test_frames():
    model, _ = flat_two_chart()
    alg = model.chart_algebra(0)
    one, zero = alg.unit(), alg.zero()
    frame = MatrixOverAlgebra(alg, [[one, one], [zero, one]])
    s = MatrixOverAlgebra(alg, [[one.scale(3)], [one]])
    c = expand_in_frame(s, frame)
    assert frame * c == s
    with pytest.raises(DegenerateFrame):
        expand_in_frame(s, MatrixOverAlgebra(alg, [[one, one], [one, one]]))
    near = MatrixOverAlgebra(alg, [[one, one.scale(lam())], [zero, one]])
    on, V = orthonormalize_frame(near)
    assert on.involution() * on == on.one()
    with pytest.raises(ClassicalNotOrthonormal):
        orthonormalize_frame(frame)


def test_flat_glued_module():
    model, phi = flat_two_chart()
    G = module_from_transitions(phi)
    assert verify_glued_module(G, samples=3, seed=1).passed


def test_three_chart_glued_module(disk):
    model, phi, phihat = disk
    G = module_from_transitions(phihat)
    assert verify_glued_module(G, samples=2, seed=2).passed
    s = random_section(phi, random.Random(0))
    assert check_compatible(phihat, G.glue(s))


def test_non_unitary_transitions_have_no_inner_product():
    model, _ = flat_two_chart()
    u = {0: [[GaussRational(2)]], 1: [[GaussRational(1)]]}
    trans = coboundary_transitions(model, 1, lambda a, p: u[a])
    G = GluedModule(trans)
    s = random_section(trans, random.Random(1))
    with pytest.raises(NonUnitaryTransitions):
        G.inner(s, s)


def test_endo_transport_flat():
    model, phi = flat_two_chart()
    E = endo_transport(phi)
    assert verify_endo_transport(E, samples=2, seed=0).passed


def test_endo_transport_three_chart(disk):
    E = endo_transport(disk[2])
    assert verify_endo_transport(E, samples=1, seed=0).passed


def test_center_probe_is_evidence_only():
    model, phi = flat_two_chart()
    rep = probe_center_closure(endo_transport(phi), samples=2)
    assert {"closed", "agrees_with_star", "note"} <= set(rep.details)


@pytest.mark.parametrize("which", ["flat", "disk"])
def test_serre_swan(which, disk):
    trans = flat_two_chart()[1] if which == "flat" else disk[2]
    S = serre_swan(trans)
    classical = serre_swan(trans.classical())
    assert verify_serre_swan(S, samples=2, seed=3, classical=classical).passed


def test_chern_number_of_tetra_sphere():
    model, logs, trans = tetra_sphere()
    assert trans.check_cocycle().passed
    c = cech_relative_class(model, logs)
    expected = cech_numbers({(0, 1): {(0, 1, 2): sp.Rational(1, 2)},
                             (1, 2): {(0, 1, 2): sp.Rational(1, 4)},
                             (0, 2): {(0, 1, 2): sp.Rational(-1, 4)}}, FACES)
    assert {t: sp.Rational(int(q.numerator), int(q.denominator)) for t, q in c.n.items()} \
        == expected
    assert c.pairing(FUNDAMENTAL_CYCLE) == 1
    assert c.is_integral and all(t.is_zero() for t in c.tails.values())


def test_logs_round_trip():
    model, logs, trans = tetra_sphere(tails=False)
    back = transition_logs(trans)
    assert cech_relative_class(model, back) == cech_relative_class(model, logs)


def test_coboundary_class_is_zero():
    model = tetra_sphere_model()
    c = cech_relative_class(model, coboundary_class(model))
    assert c == CechClassData.zero(model.triples)


def test_non_integral_and_non_constant_rejected():
    model = tetra_sphere_model()
    logs = coboundary_class(model)
    (a, b), t = next(iter(logs.items()))
    alg = t.tail.algebra
    quarter = LogValue(alg.function({p: mpq(1, 4) for p in alg.points}), t.tail)
    bad = dict(logs)
    bad[(a, b)] = LogValue(_add(t.winding, quarter.winding), t.tail)
    with pytest.raises(NotIntegral):
        cech_relative_class(model, bad)
    loose = cech_relative_class(model, bad, strict=False)
    assert not loose.is_integral
    tailed = dict(logs)
    tailed[(a, b)] = LogValue(t.winding, t.tail + alg.unit().scale(lam()))
    with pytest.raises(NotConstant):
        cech_relative_class(model, tailed)


def _add(w1, w2):
    return w2 if w1 is None else w1 + w2


def test_picard_action_group_laws(disk):
    model, logs, _ = tetra_sphere()
    c = cech_relative_class(model, logs)
    z = CechClassData.zero(model.triples)
    assert picard_action(z, c) == c
    assert picard_action(c, c).pairing(FUNDAMENTAL_CYCLE) == 2
    assert (c + c) + z == c + (c + z)
    other = CechClassData.zero(disk[0].triples + [("x", "y", "z")])
    with pytest.raises(NerveMismatch):
        c + other


def test_transfer_restricts_and_extends():
    model, _ = flat_two_chart()
    f = model.algebra.function({"p0": 1, "p1": 2, "p2": 3, "p3": 4})
    r = transfer(f, model.overlap_algebra(0, 1))
    assert r == model.overlap_algebra(0, 1).function({"p0": 1, "p2": 3})
    back = transfer(r, model.algebra)
    assert back == model.algebra.function({"p0": 1, "p2": 3})


def test_exp_log_transitions():
    model, logs, trans = tetra_sphere()
    again = logs_to_transitions(model, logs)
    assert all(again(a, b) == trans(a, b) for (a, b) in model.overlaps)
