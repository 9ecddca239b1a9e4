"""Shipped example models used by the CLI and the test-suite."""

import random

from gmpy2 import mpq

from .cover import (CoverModel, LogValue, TransitionData, cayley_unitary,
                    coboundary_logs, coboundary_transitions, gauge_exponentials,
                    logs_to_transitions, random_qi_hermitian)
from .positivity import LinearFunctional, evaluation_at_origin, point_evaluation, trace_functional
from .scalars import I, ONE, FormalScalar, get_order
from .staralg import (DiscreteAlgebra, MatrixOverAlgebra, WickAlgebra,
                      twisted_matrix)


# ---------------------------------------------------------------------------
# functionals
# ---------------------------------------------------------------------------

def wick_delta0(order=None):
    """Evaluation at 0 on Wick.  Returns (algebra, omega, gram basis, spanning set).

    The Gram basis must contain z-monomials up to degree N+1 so that every
    norm lambda^r r! (r <= N) is resolved; products then reach degree 2N+2.
    """
    N = get_order() if order is None else order
    W = WickAlgebra(degree_cap=2 * N + 4)
    basis = W.monomial_basis(N + 1)
    spanning = W.monomial_basis(4)
    return W, evaluation_at_origin(W), basis, spanning


def twisted_trace(k=2):
    T = twisted_matrix(k)
    basis = [T.monomial(key) for key in T.keys()]
    return T, trace_functional(T), basis, basis


def discrete_evaluation(n=3, point=0):
    D = DiscreteAlgebra(range(n))
    basis = [D.monomial(p) for p in D.keys()]
    return D, point_evaluation(D, point), basis, basis


def discrete_weighted(n=3):
    D = DiscreteAlgebra(range(n))
    omega = LinearFunctional(D, {p: mpq(p + 1, 2) for p in range(n)}, "weighted_sum")
    basis = [D.monomial(p) for p in D.keys()]
    return D, omega, basis, basis


def positive_functionals():
    """Every shipped functional that comes with a positivity certificate."""
    return {
        "wick-delta0": wick_delta0(),
        "twisted-M2-trace": twisted_trace(2),
        "twisted-M3-trace": twisted_trace(3),
        "discrete-eval": discrete_evaluation(),
        "discrete-weighted": discrete_weighted(),
    }


def twisted_corner(k=2, T=None):
    """P0 = diag(1, 0, ..., 0) in twisted M_k, as a 1 x 1 matrix."""
    T = twisted_matrix(k) if T is None else T
    P0 = MatrixOverAlgebra(T, [[T.monomial((0, 0))]])
    return T, P0


def twisted_rank_one(T=None):
    """P0 = 1/2 [[1, u], [u*, 1]] in M_2(twisted M_2) with u = e12 + e21.

    Classically a rank-one projection with tr P0 = 1, hence strongly full.
    """
    T = twisted_matrix(2) if T is None else T
    half = mpq(1, 2)
    one = T.unit().scale(half)
    u = (T.monomial((0, 1)) + T.monomial((1, 0))).scale(half)
    return T, MatrixOverAlgebra(T, [[one, u], [u.involution(), one]])


# ---------------------------------------------------------------------------
# covers
# ---------------------------------------------------------------------------

def flat_two_chart():
    """Circle with four points and two charts; phi_01 = 1 at p2 and i at p0."""
    pts = ["p0", "p1", "p2", "p3"]
    model = CoverModel(pts, {0: ["p0", "p1", "p2"], 1: ["p2", "p3", "p0"]}, name="flat-2chart")
    vals = {"p2": ONE, "p0": I}

    def fn(a, b, p):
        v = vals[p]
        return [[v if (a, b) == (0, 1) else v.conj()]]

    return model, TransitionData.from_pointwise(model, 1, fn, name="flat")


def three_chart_disk(k=2, seed=7):
    """Six boundary points and a centre shared by three charts.

    Classical transitions are exact Q(i) unitaries (Cayley transforms);
    lambda-corrections come from the gauge Exp(i lambda H_alpha).
    Returns (model, classical transitions, deformed transitions).
    """
    pts = [0, 1, 2, 3, 4, 5, "c"]
    charts = {0: [0, 1, 2, "c"], 1: [2, 3, 4, "c"], 2: [4, 5, 0, "c"]}
    model = CoverModel(pts, charts, name="3-chart")
    rng = random.Random(seed)
    frames = {(a, p): cayley_unitary(random_qi_hermitian(rng, k))
              for a in model.chart_names for p in model.charts[a]}
    phi = coboundary_transitions(model, k, lambda a, p: frames[(a, p)], name="phi")
    phihat = phi.gauge(gauge_exponentials(model, k, rng))
    return model, phi, phihat


FACES = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
# oriented fundamental cycle of the tetrahedral sphere
FUNDAMENTAL_CYCLE = [(1, (0, 1, 2)), (-1, (0, 1, 3)), (1, (0, 2, 3)), (-1, (1, 2, 3))]


def tetra_sphere_model():
    verts = [f"v{i}" for i in range(4)]
    edges = [f"e{i}{j}" for i in range(4) for j in range(i + 1, 4)]
    faces = ["f" + "".join(map(str, f)) for f in FACES]
    charts = {}
    for i in range(4):
        charts[i] = ([f"v{i}"] + [e for e in edges if str(i) in e[1:]]
                     + [f for f in faces if str(i) in f[1:]])
    return CoverModel(verts + edges + faces, charts, name="tetra-sphere")


def tetra_sphere(seed=3, tails=True):
    """Line bundle of Chern number 1: windings 1/2, 1/4, 1/4 around face 012.

    The lambda-tails are coboundaries of random chart functions, so they
    must cancel in every triple product.  Returns (model, logs, transitions).
    """
    model = tetra_sphere_model()
    windings = {(0, 1): mpq(1, 2), (1, 2): mpq(1, 4), (0, 2): mpq(-1, 4)}
    rng = random.Random(seed)
    lam = FormalScalar.lam()
    if tails:
        s = {a: model.chart_algebra(a).random_element(rng, depth=2).scale(lam)
             for a in model.chart_names}
    else:
        s = {a: model.chart_algebra(a).zero() for a in model.chart_names}
    logs = coboundary_logs(model, s)
    for (a, b), t in list(logs.items()):
        q = windings.get((a, b))
        if q is not None:
            alg = model.overlap_algebra(a, b)
            w = alg.function({"f012": q})
            logs[(a, b)] = LogValue(w, t.tail)
    return model, logs, logs_to_transitions(model, logs)


def coboundary_class(model, seed=5):
    """Logs t_ab = s_a - s_b with quarter-integer windings: the zero class."""
    rng = random.Random(seed)
    lam = FormalScalar.lam()
    s = {}
    for a in model.chart_names:
        alg = model.chart_algebra(a)
        w = alg.function({p: mpq(rng.randint(-2, 2), 4) for p in alg.points})
        s[a] = LogValue(w, alg.random_element(rng, depth=2).scale(lam))
    return coboundary_logs(model, s)
