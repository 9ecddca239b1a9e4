"""Inner-product bimodules, Rieffel induction and deformed projective modules.

Bimodules are given by a generator presentation: generators x_1..x_m of a
B-A bimodule E with

* ``inner(g, h)``            = <x_g, x_h>_A,
* ``inner_action(g, b, h)``  = <x_g, b . x_h>_A,
* ``left_inner(g, h)``       = Theta_{x_g, x_h} in B,
* ``left_inner_action(g, a, h)`` = Theta_{x_g, x_h . a*}.

Rieffel induction of a representation (H, pi) of A uses the generators
x_g (x) e_j with Gram (G_H pi(<x_g, x_h>))_{jl}, quotients by null vectors
with graded pivots, and lets b act through pi(<x_g, b x_h>).  Nothing ever
needs to be re-expanded in the generators, which keeps the construction
finite even when E is not finitely generated as a vector space.

Deformed projections follow 1/2 + (P0 - 1/2)(1 + 4(P0 P0 - P0))^{-1/2}; the
module and endomorphism isomorphisms x -> P x and B -> P B P are inverted by
a fixed-point iteration that gains one power of lambda per step.
"""

from dataclasses import dataclass, field

from gmpy2 import mpq

from .errors import (ClassicalMismatch, NonInvertibleClassicalPart,
                     NotClassicalProjection, PositivityFailure, SolveFailure)
from .linalg import fs_matmul, fs_zero_matrix, graded_ldl, graded_solve
from .prehilbert import (Operator, PreHilbertModule, Representation,
                         verify_intertwiner)
from .report import CheckReport
from .scalars import FormalScalar, get_order, rational_sqrt
from .staralg import (DiscreteAlgebra, Element, MatrixOverAlgebra,
                      ScalarAlgebra, binomial, binomial_invsqrt, binomial_sqrt,
                      star_inverse)

HALF = mpq(1, 2)


# ---------------------------------------------------------------------------
# square roots and projections
# ---------------------------------------------------------------------------

def star_square_root(A, B0):
    """B = (B0*^{-1} A B0^{-1})^{1/2} B0, so that B* B = A and B|_0 = B0."""
    if A != A.involution():
        raise ClassicalMismatch("A must be Hermitian")
    B0 = B0.classical()
    if B0.involution().classical_mul(B0) != A.classical():
        raise ClassicalMismatch("classical part of A differs from B0* B0")
    inv = star_inverse(None, B0)
    middle = inv.involution() * A * inv
    Y = binomial_sqrt(None, middle - middle.one())
    return Y * B0


def _is_classical(x):
    if isinstance(x, Element):
        return x.is_constant_series()
    return all(e.is_constant_series() for row in x.entries for e in row)


def check_classical_projection(P0):
    if not _is_classical(P0):
        raise NotClassicalProjection("P0 has lambda-dependent entries")
    if P0.classical_mul(P0) != P0 or P0.involution() != P0:
        raise NotClassicalProjection("P0 is not a Hermitian idempotent for the undeformed product")


def deform_projection(P0, A_deformed=None):
    """The star-idempotent lift of a classical Hermitian projection."""
    check_classical_projection(P0)
    X = (P0 * P0 - P0).scale(4)
    half = P0.one().scale(HALF)
    return half + (P0 - half) * binomial_invsqrt(None, X)


def corner_power(C, unit, alpha):
    """(C)^alpha in the corner algebra with unit ``unit`` (C - unit = O(lambda))."""
    X = C - unit
    if X.valuation() == 0:
        raise ClassicalMismatch("corner element must reduce to the corner unit")
    acc = unit
    term = unit
    for k in range(1, get_order() + 1):
        term = term * X
        if term.is_zero():
            break
        acc = acc + term.scale(binomial(alpha, k))
    return acc


# ---------------------------------------------------------------------------
# deformed modules
# ---------------------------------------------------------------------------

def _as_matrix(x):
    if isinstance(x, Element):
        return MatrixOverAlgebra(x.algebra, [[x]])
    return x


class DeformedModule:
    """E = P0 A^n with right action, inner product and endomorphisms deformed by P.

    ``K`` is an optional Hermitian metric (classical part 1 on the image of P0)
    giving h(x, y) = (P x)* K (P y).
    """

    def __init__(self, P0, P=None, K=None):
        self.P0 = _as_matrix(P0)
        self.P = _as_matrix(P) if P is not None else _as_matrix(deform_projection(self.P0))
        self.K = None if K is None else _as_matrix(K)
        self.algebra = self.P0.algebra
        self.n = self.P0.rows

    # classical projections applied with the undeformed product
    def _p0(self, x):
        return self.P0.classical_mul(x)

    def _p0_both(self, B):
        return self.P0.classical_mul(B).classical_mul(self.P0)

    def embed(self, x):
        """I(x) = P x."""
        return self.P * x

    def unembed(self, y):
        """I^{-1}(y) for y in P A^n: the unique x in P0 A^n[[lambda]] with P x = y."""
        x = self._p0(y)
        for _ in range(get_order() + 1):
            r = y - self.P * x
            if r.is_zero():
                return x
            x = x + self._p0(r)
        if not (y - self.P * x).is_zero():
            raise SolveFailure("vector is not in the image of the deformed projection")
        return x

    def act(self, x, f):
        """x . f = I^{-1}(I(x) f)."""
        return self.unembed(self.embed(x) * f)

    def inner(self, x, y):
        ix, iy = self.embed(x), self.embed(y)
        mid = iy if self.K is None else self.K * iy
        return (ix.involution() * mid).entries[0][0]

    def J(self, B):
        return self.P * B * self.P

    def J_inverse(self, C):
        B = self._p0_both(C)
        for _ in range(get_order() + 1):
            r = C - self.J(B)
            if r.is_zero():
                return B
            B = B + self._p0_both(r)
        if not (C - self.J(B)).is_zero():
            raise SolveFailure("matrix is not in the deformed corner")
        return B

    def endo_product(self, B, C):
        """B *' C = J^{-1}(J(B) J(C))."""
        return self.J_inverse(self.J(B) * self.J(C))

    def endo_unit(self):
        return self.J_inverse(self.P)

    def left_act(self, B, x):
        return self.unembed(self.J(B) * self.embed(x))

    def random_vector(self, rng, **kw):
        A = self.algebra
        r = MatrixOverAlgebra(A, [[A.random_element(rng, **kw)] for _ in range(self.n)])
        return self._p0(r)

    def random_endo(self, rng, **kw):
        A = self.algebra
        r = MatrixOverAlgebra(A, [[A.random_element(rng, **kw) for _ in range(self.n)]
                                  for _ in range(self.n)])
        return self._p0_both(r)

    def to_json(self):
        return {"P0": self.P0.to_json(), "P": self.P.to_json(),
                "K": None if self.K is None else self.K.to_json()}


def deform_module(P0, A_deformed=None, K=None):
    return DeformedModule(P0, K=K)


def verify_deformed_module(D, samples=5, seed=0, **kw):
    """Replay the projection, right-module, inner-product and endomorphism axioms."""
    import random
    rng = random.Random(seed)
    report = CheckReport("deformed_module")
    P = D.P
    report.samples += 1
    if P * P != P or P.involution() != P or P.classical() != D.P0:
        report.fail(check="projection")
    A = D.algebra
    unit = D.endo_unit()
    for s in range(samples):
        x, y = D.random_vector(rng, **kw), D.random_vector(rng, **kw)
        f, g = A.random_element(rng, **kw), A.random_element(rng, **kw)
        B, C, E = (D.random_endo(rng, **kw) for _ in range(3))
        report.samples += 1
        checks = {
            "right_action": D.act(D.act(x, f), g) == D.act(x, f * g),
            "right_unit": D.act(x, A.unit()) == x,
            "hermitian": D.inner(x, y).involution() == D.inner(y, x),
            "right_linear": D.inner(x, D.act(y, f)) == D.inner(x, y) * f,
            "endo_associative": D.endo_product(D.endo_product(B, C), E)
            == D.endo_product(B, D.endo_product(C, E)),
            "endo_unit": D.endo_product(unit, B) == B and D.endo_product(B, unit) == B,
            "endo_hermitian": D.endo_product(B, C).involution()
            == D.endo_product(C.involution(), B.involution()),
            "left_module": D.left_act(D.endo_product(B, C), x) == D.left_act(B, D.left_act(C, x)),
            "bimodule": D.act(D.left_act(B, x), f) == D.left_act(B, D.act(x, f)),
            "left_classical": D.left_act(B, x).classical() == B.classical().classical_mul(x.classical()),
        }
        if D.K is None:
            checks["adjoint"] = D.inner(D.left_act(B, x), y) == D.inner(x, D.left_act(B.involution(), y))
        for name, ok in checks.items():
            if not ok:
                report.fail(sample=s, check=name)
    return report


@dataclass
class ModuleIsomorphism:
    source: DeformedModule
    target: DeformedModule
    U: MatrixOverAlgebra
    V: MatrixOverAlgebra

    def __call__(self, x):
        return self.target.unembed(self.V * (self.U * self.source.embed(x)))

    def to_json(self):
        return {"U": self.U.to_json(), "V": self.V.to_json()}


def equivalence_of_deformations(D1, D2, samples=3, seed=0, **kw):
    """S = id + O(lambda) intertwining the right actions and the inner products.

    U = (P2 P1 + (1-P2)(1-P1)) (1 - (P1-P2)^2)^{-1/2} conjugates P1 to P2;
    V = C2^{-1/2} C1^{1/2} in the corner P2 M_n P2 matches the metrics.
    """
    import random
    if D1.P0 != D2.P0:
        raise SolveFailure("deformations of different classical projections")
    P1, P2 = D1.P, D2.P
    one = P1.one()
    diff = P1 - P2
    U = (P2 * P1 + (one - P2) * (one - P1)) * binomial_invsqrt(None, -(diff * diff))
    K1 = D1.K if D1.K is not None else one
    K2 = D2.K if D2.K is not None else one
    C1 = P2 * (U * K1 * U.involution()) * P2
    C2 = P2 * K2 * P2
    V = corner_power(C2, P2, mpq(-1, 2)) * corner_power(C1, P2, HALF)
    S = ModuleIsomorphism(D1, D2, U, V)
    rng = random.Random(seed)
    A = D1.algebra
    for _ in range(samples):
        x, y = D1.random_vector(rng, **kw), D1.random_vector(rng, **kw)
        f = A.random_element(rng, **kw)
        if S(D1.act(x, f)) != D2.act(S(x), f):
            raise SolveFailure("S does not intertwine the right actions")
        if D2.inner(S(x), S(y)) != D1.inner(x, y):
            raise SolveFailure("S is not isometric")
        if S(x).classical() != x.classical():
            raise SolveFailure("S is not the identity at lambda = 0")
    return S


# ---------------------------------------------------------------------------
# strong fullness
# ---------------------------------------------------------------------------

@dataclass
class FullnessVerdict:
    status: str
    tau: object = None
    note: str = ""

    def to_json(self):
        return {"status": self.status, "tau": None if self.tau is None else self.tau.to_json(),
                "note": self.note}


def _trace(P):
    return P.trace() if isinstance(P, MatrixOverAlgebra) else P


def is_strongly_full(P0, tau=None):
    """tr P0 = tau* tau with tau invertible (classical products)."""
    tr = _trace(P0).classical()
    A = tr.algebra
    try:
        A.classical_inverse(tr)
    except NonInvertibleClassicalPart:
        return FullnessVerdict("not_full", note="trace is not invertible")
    if tau is not None:
        tau = tau.classical()
        try:
            tau.classical_inverse()
        except NonInvertibleClassicalPart:
            return FullnessVerdict("unknown", note="supplied witness is not invertible")
        if tau.involution().classical_mul(tau) == tr:
            return FullnessVerdict("full", tau, "witness verified")
        return FullnessVerdict("unknown", note="supplied witness does not reproduce the trace")
    if isinstance(A, DiscreteAlgebra):
        roots = {}
        for p in A.points:
            c = tr.terms[p].coeffs[0]
            r = rational_sqrt(c.re) if c.is_real() else None
            if r is None:
                return FullnessVerdict("unknown", note=f"no rational square root at {p!r}")
            roots[p] = r
        return FullnessVerdict("full", A.function(roots), "pointwise rational roots")
    c = A.unit_multiple(tr)
    if c is not None and c.is_real():
        r = rational_sqrt(c.re)
        if r is not None:
            return FullnessVerdict("full", A.scalar(r), "constant rational root")
    return FullnessVerdict("unknown", note="no rational square root found")


def deform_fullness_witness(tau0, P, A_deformed=None):
    """tau with tau* tau = tr P and tau|_0 = tau0."""
    return star_square_root(_trace(P), tau0)


# ---------------------------------------------------------------------------
# bimodules
# ---------------------------------------------------------------------------

class MatrixAlgebra:
    """M_n(A) viewed as an algebra whose elements are MatrixOverAlgebra."""

    def __init__(self, A, n):
        self.base = A
        self.n = n

    @property
    def name(self):
        return f"M{self.n}({self.base.name})"

    def unit(self):
        return MatrixOverAlgebra.identity(self.base, self.n)

    def zero(self):
        return MatrixOverAlgebra.zeros(self.base, self.n, self.n)

    def unit_matrix(self, i, j, a=None):
        A = self.base
        a = A.unit() if a is None else a
        return MatrixOverAlgebra(A, [[a if (r, c) == (i, j) else A.zero()
                                      for c in range(self.n)] for r in range(self.n)])

    def spanning(self):
        return [self.unit_matrix(i, j, self.base.monomial(k))
                for i in range(self.n) for j in range(self.n) for k in self.base.keys()]


class InnerProductBimodule:
    left_algebra = None
    right_algebra = None
    m = 0

    def inner(self, g, h):
        raise NotImplementedError

    def inner_action(self, g, b, h):
        raise NotImplementedError

    def left_inner(self, g, h):
        raise NotImplementedError

    def left_inner_action(self, g, a, h):
        raise NotImplementedError


class FunctionalBimodule(InnerProductBimodule):
    """A as an A-C bimodule with <a, b> = omega(a* b), generated by ``basis``."""

    def __init__(self, omega, basis):
        self.omega = omega
        self.basis = list(basis)
        self.m = len(self.basis)
        self.left_algebra = omega.algebra
        self.right_algebra = ScalarAlgebra()
        self._stars = [b.involution() for b in self.basis]

    def _scalar(self, c):
        return Element(self.right_algebra, {(): c})

    def inner(self, g, h):
        return self._scalar(self.omega(self._stars[g] * self.basis[h]))

    def inner_action(self, g, a, h):
        return self._scalar(self.omega(self._stars[g] * a * self.basis[h]))


class ProjectionBimodule(InnerProductBimodule):
    """E = P A^n, a (P M_n(A) P)-A bimodule generated by the columns P e_g."""

    def __init__(self, A, P):
        self.P = _as_matrix(P)
        self.right_algebra = A
        self.m = self.P.rows
        self.left_algebra = MatrixAlgebra(A, self.m)

    def inner(self, g, h):
        return self.P.entries[g][h]

    def inner_action(self, g, B, h):
        B = _as_matrix(B)
        return (self.P * B * self.P).entries[g][h]

    def left_inner(self, g, h):
        return self.P * self.left_algebra.unit_matrix(g, h) * self.P

    def left_inner_action(self, g, a, h):
        return self.P * self.left_algebra.unit_matrix(g, h, a) * self.P


class ConjugateBimodule(InnerProductBimodule):
    """The complex-conjugate module: a . xbar = conj(x . a*), inner products swap sides.

    E need not be generated by the x_g as a left module over its left algebra,
    so the conjugate uses the generators conj(x_g . c) for c in ``multipliers``
    (a spanning list of E's right algebra; default: just the unit).
    """

    def __init__(self, E, multipliers=None):
        self.E = E
        self.left_algebra = E.right_algebra
        self.right_algebra = E.left_algebra
        if multipliers is None:
            multipliers = [E.right_algebra.unit()]
        self.multipliers = list(multipliers)
        self.labels = [(g, c) for g in range(E.m) for c in range(len(self.multipliers))]
        self.m = len(self.labels)

    def _split(self, G):
        g, c = self.labels[G]
        return g, self.multipliers[c]

    def inner(self, G, H):
        (g, a), (h, b) = self._split(G), self._split(H)
        return self.E.left_inner_action(g, a * b.involution(), h)

    def inner_action(self, G, c, H):
        (g, a), (h, b) = self._split(G), self._split(H)
        return self.E.left_inner_action(g, a * c * b.involution(), h)

    def left_inner(self, G, H):
        (g, a), (h, b) = self._split(G), self._split(H)
        return a.involution() * self.E.inner(g, h) * b

    def left_inner_action(self, G, B, H):
        (g, a), (h, b) = self._split(G), self._split(H)
        return a.involution() * self.E.inner_action(g, B, h) * b


def conjugate_bimodule(E, multipliers=None):
    if isinstance(E, ConjugateBimodule) and multipliers is None:
        return E.E
    return ConjugateBimodule(E, multipliers)


def verify_bimodule(E, left_samples, right_samples=()):
    """Hermitian symmetry, action compatibility and (when available) Theta x = x <, >."""
    report = CheckReport("bimodule")
    m = E.m
    for g in range(m):
        for h in range(m):
            report.samples += 1
            if E.inner(g, h).involution() != E.inner(h, g):
                report.fail(check="hermitian", pair=[g, h])
            for b in left_samples:
                report.samples += 1
                if E.inner_action(g, b.involution(), h) != E.inner_action(h, b, g).involution():
                    report.fail(check="compatibility", pair=[g, h])
    try:
        for f in range(m):
            for g in range(m):
                theta = E.left_inner(f, g)
                for h in range(m):
                    for k in range(m):
                        report.samples += 1
                        if E.inner_action(h, theta, k) != E.inner(h, f) * E.inner(g, k):
                            report.fail(check="theta_compatibility", index=[f, g, h, k])
    except NotImplementedError:
        report.details["theta"] = "not available"
    return report


# ---------------------------------------------------------------------------
# Rieffel induction
# ---------------------------------------------------------------------------

@dataclass
class InducedRepresentation:
    bimodule: InnerProductBimodule
    source: Representation
    labels: list                 # (g, j) for every tensor generator
    pivots: list                 # indices into labels
    full_gram: list
    carrier: PreHilbertModule
    representation: Representation = None
    _ldl: object = field(default=None, repr=False)

    def project(self, vectors):
        """Quotient coordinates of full tensor-generator vectors (columns)."""
        if not self.pivots:
            return []
        rows = [self.full_gram[p] for p in self.pivots]
        return graded_solve(self.carrier.gram, fs_matmul(rows, vectors), self._ldl)

    def to_json(self):
        return {"labels": [list(x) for x in self.labels],
                "pivots": [list(self.labels[p]) for p in self.pivots],
                "gram": [[x.to_json() for x in row] for row in self.carrier.gram]}


def _pairing_block(H, op):
    """G_H pi(a) as a matrix over C[[lambda]]."""
    return fs_matmul(H.gram, op.matrix) if H.dim else []


def rieffel_induce(E, pi, spanning=None):
    """Induced representation of E's left algebra on E (x)_A H."""
    H = pi.carrier
    d = H.dim
    labels = [(g, j) for g in range(E.m) for j in range(d)]
    n = len(labels)
    full = fs_zero_matrix(n, n)
    for g in range(E.m):
        for h in range(E.m):
            block = _pairing_block(H, pi(E.inner(g, h)))
            for j in range(d):
                for l in range(d):
                    full[g * d + j][h * d + l] = block[j][l]
    ldl = graded_ldl(full)
    if ldl.status == "negative":
        raise PositivityFailure("induced inner product has a negative direction",
                                witness=ldl.witness)
    if ldl.status != "positive":
        raise PositivityFailure("induced Gram matrix is not Hermitian")
    pivots = sorted(ldl.pivot_indices)
    gram = [[full[i][j] for j in pivots] for i in pivots]
    carrier = PreHilbertModule(gram, name=f"ind({H.name})")
    data = InducedRepresentation(E, pi, labels, pivots, full, carrier,
                                 _ldl=graded_ldl(gram) if pivots else None)

    def act(b):
        if not pivots:
            return Operator([], carrier, carrier)
        blocks = {}
        pairing = fs_zero_matrix(len(pivots), len(pivots))
        for r, p in enumerate(pivots):
            g, j = labels[p]
            for c, q in enumerate(pivots):
                h, l = labels[q]
                key = (g, h)
                if key not in blocks:
                    blocks[key] = _pairing_block(H, pi(E.inner_action(g, b, h)))
                pairing[r][c] = blocks[key][j][l]
        return Operator(graded_solve(gram, pairing, data._ldl), carrier, carrier)

    data.representation = Representation(E.left_algebra, carrier, act, spanning,
                                         name=f"R({pi.name})")
    return data


def rieffel_on_morphism(ind1, ind2, U):
    """V(x_g (x) phi) = x_g (x) U phi between two induced representations."""
    d2 = U.codomain.dim
    n2 = len(ind2.labels)
    cols = fs_zero_matrix(n2, len(ind1.pivots))
    for c, p in enumerate(ind1.pivots):
        g, j = ind1.labels[p]
        for l in range(d2):
            cols[g * d2 + l][c] = U.matrix[l][j]
    mat = ind2.project(cols) if ind2.pivots else []
    return Operator(mat, ind1.carrier, ind2.carrier)


def scalar_representation():
    """The canonical representation of C[[lambda]] on itself."""
    C = ScalarAlgebra()
    H = PreHilbertModule.standard(1, name="C[[λ]]")

    def act(c):
        return Operator([[c.terms.get((), FormalScalar.zero())]], H, H)

    return Representation(C, H, act, [C.unit()], name="canonical")


def gns_intertwiner(gns_data, induced):
    """U: GNS carrier -> induced carrier, psi_{b_p} -> [x_{b_p} (x) 1]."""
    n = len(induced.labels)
    cols = fs_zero_matrix(n, len(gns_data.pivots))
    for c, p in enumerate(gns_data.pivots):
        cols[p][c] = FormalScalar.one()
    mat = induced.project(cols)
    return Operator(mat, gns_data.carrier, induced.carrier)


def double_induction_intertwiner(E, pi, first, second):
    """U: R_Ebar R_E(H) -> H, conj(x_g c) (x) (x_h (x) e_l) -> pi(c* <x_g, x_h>) e_l."""
    H = pi.carrier
    Ebar = second.bimodule
    cols = []
    for p in second.pivots:
        G, k = second.labels[p]
        g, c = Ebar._split(G)
        h, l = first.labels[first.pivots[k]]
        op = pi(c.involution() * E.inner(g, h))
        cols.append([op.matrix[i][l] for i in range(H.dim)])
    mat = [[cols[c][i] for c in range(len(cols))] for i in range(H.dim)]
    return Operator(mat, second.carrier, H)


def double_induction(E, pi, spanning, multipliers=None):
    """Induce through E, then through its conjugate; return (second, U, report)."""
    first = rieffel_induce(E, pi)
    Ebar = conjugate_bimodule(E, spanning if multipliers is None else multipliers)
    second = rieffel_induce(Ebar, first.representation, spanning)
    U = double_induction_intertwiner(E, pi, first, second)
    report = verify_intertwiner(U, second.representation, pi, spanning)
    return second, U, report
