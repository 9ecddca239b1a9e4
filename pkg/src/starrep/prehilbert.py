"""Finitely generated pre-Hilbert modules, adjointable operators, representations.

A module is presented by generators e_1..e_m and a Hermitian Gram matrix
G_ij = <e_i, e_j> (conjugate-linear in the first slot).  Vectors are
coefficient lists, operators are matrices acting on coefficients.

Over C[[lambda]] the coefficients of a vector are only determined modulo the
lambda-power of the corresponding pivot (a vector of norm lambda^k r! is
"seen" only through orders <= N - k).  Operators are therefore compared
through the Gram matrix: A == B iff <phi, A psi> = <phi, B psi> for all
generators, which is exact modulo lambda^(N+1).

The classical-limit functor quotients by the vectors whose norm vanishes at
lambda = 0 and keeps the lambda^0 part of the inner product; classical
modules are stored with order-0 series so the same code serves both rings.
"""

from dataclasses import dataclass

from .errors import NotAdjointable, SingularSystem
from .linalg import (fs_add, fs_classical, fs_dagger, fs_equal, fs_from_qi,
                     fs_identity, fs_is_zero, fs_matmul, fs_scale, fs_sub,
                     fs_zero_matrix, graded_ldl, graded_solve, qi_inverse,
                     qi_matmul, qi_rref)
from .report import CheckReport
from .scalars import FormalScalar, Sign, get_order, is_positive


class PreHilbertModule:
    def __init__(self, gram, ring="C[[λ]]", name="H"):
        self.gram = [list(row) for row in gram]
        self.ring = ring
        self.name = name

    @classmethod
    def standard(cls, n, ring="C[[λ]]", name="H"):
        order = 0 if ring == "C" else None
        return cls(fs_identity(n, order), ring, name)

    @classmethod
    def zero_module(cls, ring="C[[λ]]"):
        return cls([], ring, "0")

    @property
    def dim(self):
        return len(self.gram)

    @property
    def order(self):
        return 0 if self.ring == "C" else get_order()

    def scalar_zero(self):
        return FormalScalar.zero(self.order)

    def vector(self, coeffs):
        return [FormalScalar.coerce(c, self.order) for c in coeffs]

    def basis_vector(self, i):
        v = [FormalScalar.zero(self.order)] * self.dim
        v[i] = FormalScalar.one(self.order)
        return v

    def inner(self, u, v):
        acc = self.scalar_zero()
        for i, ui in enumerate(u):
            if ui.is_zero():
                continue
            uc = ui.conj()
            for j, vj in enumerate(v):
                g = self.gram[i][j]
                if not vj.is_zero() and not g.is_zero():
                    acc = acc + uc * g * vj
        return acc

    def is_nondegenerate(self):
        ldl = graded_ldl(self.gram)
        return ldl.status == "positive" and ldl.pivots == self.dim

    def identity(self):
        return Operator(fs_identity(self.dim, self.order), self, self)

    def to_json(self):
        return {"ring": self.ring, "gram": [[x.to_json() for x in row] for row in self.gram],
                "relations": []}

    def __repr__(self):
        return f"PreHilbertModule({self.name}, dim={self.dim}, ring={self.ring})"


class Operator:
    """Matrix (codomain.dim x domain.dim) acting on generator coefficients."""

    def __init__(self, matrix, domain, codomain):
        self.matrix = [list(row) for row in matrix]
        self.domain = domain
        self.codomain = codomain

    def apply(self, v):
        return [sum((a * x for a, x in zip(row, v)), self.codomain.scalar_zero())
                for row in self.matrix]

    def __mul__(self, other):
        if isinstance(other, Operator):
            if other.codomain is not self.domain:
                raise ValueError("operators are not composable")
            if self.domain.dim == 0:
                return Operator(fs_zero_matrix(self.codomain.dim, other.domain.dim,
                                               self.codomain.order), other.domain, self.codomain)
            return Operator(fs_matmul(self.matrix, other.matrix), other.domain, self.codomain)
        c = FormalScalar.coerce(other, self.codomain.order)
        return Operator(fs_scale(self.matrix, c), self.domain, self.codomain)

    def __rmul__(self, other):
        return self * other

    def __add__(self, other):
        return Operator(fs_add(self.matrix, other.matrix), self.domain, self.codomain)

    def __sub__(self, other):
        return Operator(fs_sub(self.matrix, other.matrix), self.domain, self.codomain)

    def __neg__(self):
        return self * -1

    def __eq__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        if (self.domain.dim, self.codomain.dim) != (other.domain.dim, other.codomain.dim):
            return False
        if self.codomain.dim == 0 or self.domain.dim == 0:
            return True
        diff = fs_sub(self.matrix, other.matrix)
        return fs_is_zero(fs_matmul(self.codomain.gram, diff))

    __hash__ = None

    def is_identity(self):
        return self.domain is self.codomain and self == self.domain.identity()

    def to_json(self):
        return [[x.to_json() for x in row] for row in self.matrix]

    def __repr__(self):
        return f"Operator({self.domain.name} -> {self.codomain.name})"


def adjoint(A):
    """A* = G_H^{-1} A^dagger G_K, solved with graded pivots."""
    H, K = A.domain, A.codomain
    if H.dim == 0 or K.dim == 0:
        return Operator(fs_zero_matrix(H.dim, K.dim, H.order), K, H)
    rhs = fs_matmul(fs_dagger(A.matrix), K.gram)
    try:
        sol = graded_solve(H.gram, rhs)
    except SingularSystem as exc:
        raise NotAdjointable(f"domain Gram of {H.name} is degenerate") from exc
    adj = Operator(sol, K, H)
    # consistency: <A phi, psi> = <phi, A* psi> exactly
    if not fs_equal(fs_matmul(H.gram, sol), rhs):
        raise NotAdjointable("adjoint equation inconsistent at some lambda-order")
    return adj


def classify_isometry(U):
    Ustar = adjoint(U)
    if not (Ustar * U) == U.domain.identity():
        return "neither"
    if (U * Ustar) == U.codomain.identity():
        return "unitary"
    return "isometric"


def theta_operator(H, phi, psi):
    """Theta_{phi,psi}(chi) = phi <psi, chi>."""
    row = [H.inner(psi, H.basis_vector(j)) for j in range(H.dim)]
    return Operator([[p * r for r in row] for p in phi], H, H)


# ---------------------------------------------------------------------------
# classical limit
# ---------------------------------------------------------------------------

@dataclass
class ClassicalQuotient:
    """The map c: H -> cH, phi -> coordinates of phi|_{lambda=0} mod H_0."""

    source: PreHilbertModule
    target: PreHilbertModule
    pivots: list
    matrix: list  # rank x dim over Q(i)

    def apply(self, v):
        v0 = [[x.coeffs[0]] for x in v]
        return [FormalScalar.constant(r[0], 0) for r in qi_matmul(self.matrix, v0)]


def classical_limit_space(H):
    """(cH, c) with cH = H / H_0 and <c phi, c psi> = <phi, psi>|_{lambda=0}.

    The quotient is cached on H so that limits of composable operators compose.
    """
    cached = H.__dict__.get("_classical_limit")
    if cached is None:
        cached = H._classical_limit = _classical_limit_space(H)
    return cached


def _classical_limit_space(H):
    if H.dim == 0:
        Z = PreHilbertModule.zero_module("C")
        return Z, ClassicalQuotient(H, Z, [], [])
    G0 = fs_classical(H.gram)
    _, pivots = qi_rref(G0)
    Gpp = [[G0[i][j] for j in pivots] for i in pivots]
    target = PreHilbertModule(fs_from_qi(Gpp, 0), "C", name=f"c({H.name})")
    if not pivots:
        return target, ClassicalQuotient(H, target, [], [])
    mat = qi_matmul(qi_inverse(Gpp), [G0[i] for i in pivots])
    return target, ClassicalQuotient(H, target, pivots, mat)


def classical_limit_operator(A, cdom=None, ccod=None):
    """cA(c phi) = c(A phi)."""
    cdom = cdom or classical_limit_space(A.domain)[1]
    ccod = ccod or classical_limit_space(A.codomain)[1]
    if not ccod.pivots or not cdom.pivots:
        return Operator(fs_zero_matrix(len(ccod.pivots), len(cdom.pivots), 0),
                        cdom.target, ccod.target)
    A0 = fs_classical(A.matrix)
    cols = [[A0[i][p] for p in cdom.pivots] for i in range(len(A0))]
    return Operator(fs_from_qi(qi_matmul(ccod.matrix, cols), 0), cdom.target, ccod.target)


class Representation:
    """A *-representation on a pre-Hilbert module: act(a) -> Operator."""

    def __init__(self, algebra, carrier, act, spanning=None, name="pi"):
        self.algebra = algebra
        self.carrier = carrier
        self._act = act
        self.spanning = list(spanning) if spanning is not None else None
        self.name = name

    def __call__(self, a):
        return self._act(a)

    def with_action(self, act, name=None):
        return Representation(self.algebra, self.carrier, act, self.spanning, name or self.name)

    def to_json(self):
        out = {"name": self.name, "algebra": self.algebra.name, "carrier": self.carrier.to_json()}
        if self.spanning is not None:
            out["action"] = [{"element": a.to_json(), "matrix": self(a).to_json()}
                             for a in self.spanning]
        return out


def verify_representation(pi, spanning=None, pairs=True):
    """Replay pi(1) = id, pi(a b) = pi(a) pi(b) and pi(a*) = pi(a)*."""
    spanning = spanning if spanning is not None else pi.spanning
    report = CheckReport(f"representation[{pi.name}]")
    report.samples += 1
    if not pi(pi.algebra.unit()) == pi.carrier.identity():
        report.fail(check="unit")
    for a in spanning:
        report.samples += 1
        if not pi(a.involution()) == adjoint(pi(a)):
            report.fail(check="star", element=a.to_json())
    if pairs:
        for a in spanning:
            for b in spanning:
                report.samples += 1
                if not pi(a * b) == pi(a) * pi(b):
                    report.fail(check="product", a=a.to_json(), b=b.to_json())
    return report


def classical_limit_representation(pi, classical_algebra=None):
    """(c pi)(a) = c(pi(a)) as a representation of the undeformed algebra."""
    from .staralg import undeformed
    A0 = classical_algebra or undeformed(pi.algebra)
    cH, cmap = classical_limit_space(pi.carrier)

    def act(a):
        lifted = A0.lift(a)
        return classical_limit_operator(pi(lifted), cmap, cmap)

    spanning = [A0.lower(a.classical()) for a in pi.spanning] if pi.spanning else None
    return Representation(A0, cH, act, spanning, name=f"c({pi.name})")


def verify_intertwiner(U, pi, rho, spanning=None):
    """Check U pi(a) = rho(a) U on a spanning set and classify U."""
    spanning = spanning if spanning is not None else pi.spanning
    report = CheckReport("intertwiner")
    for a in spanning:
        report.samples += 1
        if not U * pi(a) == rho(a) * U:
            report.fail(element=a.to_json())
    try:
        report.details["class"] = classify_isometry(U)
    except NotAdjointable as exc:
        report.details["class"] = "not_adjointable"
        report.details["error"] = str(exc)
    return report


def is_positive_module(H):
    """Every diagonal pivot of the graded Gram factorization is positive."""
    ldl = graded_ldl(H.gram)
    return ldl.status == "positive" and all(is_positive(d) is Sign.POSITIVE for d in ldl.diag)
