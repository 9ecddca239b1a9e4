"""Finite-cover models of deformed vector bundles.

The base is a finite point set; every chart, overlap and triple overlap gets
its own pointwise algebra, and restriction/extension-by-zero moves elements
between them.  Because the product of functions is pointwise, all
noncommutativity sits in the k x k transition matrices and their
lambda-corrections.

Sections are families {s_alpha} of k-columns on the charts.  A classical
family satisfies s_alpha = phi_ab s_beta, a deformed one uses phihat instead.
Gluing with a partition of unity maps the first kind bijectively onto the
second; the inverse is recovered by fixed-point iteration (each round fixes
one more power of lambda).  Endomorphisms, the Serre-Swan projection and the
Cech classes are built on the same pattern.
"""

from dataclasses import dataclass, field
from itertools import combinations

from gmpy2 import mpq

from .errors import (ClassicalNotOrthonormal, CocycleViolation, DegenerateFrame,
                     NerveMismatch, NonInvertibleClassicalPart, NonUnitaryTransitions,
                     NotCentral, NotConstant, NotIntegral, PartitionRepairFailure)
from .linalg import qi_identity, qi_inverse, qi_matmul
from .report import CheckReport
from .scalars import FormalScalar, GaussRational, I, get_order, rational_sqrt, rational_str
from .staralg import (DiscreteAlgebra, Element, LogValue, MatrixOverAlgebra,
                      binomial_invsqrt, bch_compose, star_exp, star_inverse, star_log)
from .morita import star_square_root


# ---------------------------------------------------------------------------
# moving data between point sets
# ---------------------------------------------------------------------------

def transfer(x, alg):
    """Restrict to (or extend by zero into) the point set of ``alg``."""
    if x is None:
        return None
    if isinstance(x, LogValue):
        w = transfer(x.winding, alg)
        return LogValue(w, transfer(x.tail, alg))
    if isinstance(x, Element):
        idx = alg._index
        return Element(alg, {p: c for p, c in x.terms.items() if p in idx})
    return MatrixOverAlgebra(alg, [[transfer(e, alg) for e in row] for row in x.entries])


def _scalar_matrix(alg, rows):
    """k x k matrix over ``alg`` from per-point rows: rows(p) -> Gauss grid or series grid."""
    pts = alg.points
    first = rows(pts[0]) if pts else [[]]
    k = len(first)
    grids = {p: rows(p) for p in pts}
    out = []
    for i in range(k):
        out.append([])
        for j in range(len(first[i])):
            out[-1].append(Element(alg, {p: FormalScalar.coerce(grids[p][i][j]) for p in pts}))
    return MatrixOverAlgebra(alg, out)


def value_at(x, p):
    """Entries of a matrix (or an element) at a point, as FormalScalars."""
    if isinstance(x, Element):
        return x.algebra.value(x, p)
    return [[e.algebra.value(e, p) for e in row] for row in x.entries]


def stereographic_weights(m):
    """Rational a_1..a_m >= 0 with sum a_i^2 = 1 (3-4-5 recursion)."""
    if m == 1:
        return [mpq(1)]
    return [mpq(3, 5)] + [mpq(4, 5) * a for a in stereographic_weights(m - 1)]


def cayley_unitary(H):
    """(1 - iH)(1 + iH)^{-1} for a Hermitian Q(i) matrix H: an exact unitary."""
    k = len(H)
    Id = qi_identity(k)
    iH = [[I * h for h in row] for row in H]
    minus = [[Id[a][b] - iH[a][b] for b in range(k)] for a in range(k)]
    plus = [[Id[a][b] + iH[a][b] for b in range(k)] for a in range(k)]
    return qi_matmul(minus, qi_inverse(plus))


def random_qi_hermitian(rng, k, size=2):
    H = [[None] * k for _ in range(k)]
    for a in range(k):
        H[a][a] = GaussRational(mpq(rng.randint(-size, size), rng.randint(1, 3)))
        for b in range(a + 1, k):
            z = GaussRational(mpq(rng.randint(-size, size), rng.randint(1, 3)),
                              mpq(rng.randint(-size, size), rng.randint(1, 3)))
            H[a][b], H[b][a] = z, z.conj()
    return H


# ---------------------------------------------------------------------------
# cover models
# ---------------------------------------------------------------------------

class CoverModel:
    def __init__(self, points, charts, partition=None, quadratic=None, name="cover"):
        self.name = name
        self.algebra = DiscreteAlgebra(points)
        order = {p: i for i, p in enumerate(self.algebra.points)}
        self.chart_names = list(charts)
        self.charts = {a: tuple(sorted(set(pts), key=order.__getitem__)) for a, pts in charts.items()}
        covered = set().union(*map(set, self.charts.values())) if charts else set()
        if covered != set(self.algebra.points):
            raise ValueError("charts do not cover every point")
        self._algs = {}
        self.overlaps = {}
        for a, b in combinations(self.chart_names, 2):
            common = tuple(p for p in self.charts[a] if p in set(self.charts[b]))
            if common:
                self.overlaps[(a, b)] = common
                self.overlaps[(b, a)] = common
        self.triples = []
        for a, b, c in combinations(self.chart_names, 3):
            common = set(self.charts[a]) & set(self.charts[b]) & set(self.charts[c])
            if common:
                self.triples.append((a, b, c))
        self.partition = partition if partition is not None else self.linear_partition()
        self.quadratic = quadratic if quadratic is not None else self.quadratic_partition()

    def local(self, pts):
        key = tuple(pts)
        if key not in self._algs:
            self._algs[key] = DiscreteAlgebra(key)
        return self._algs[key]

    def chart_algebra(self, a):
        return self.local(self.charts[a])

    def overlap_algebra(self, a, b):
        if a == b:
            return self.chart_algebra(a)
        return self.local(self.overlaps[(a, b)])

    def triple_points(self, a, b, c):
        s = set(self.charts[a]) & set(self.charts[b]) & set(self.charts[c])
        return tuple(p for p in self.algebra.points if p in s)

    def triple_algebra(self, a, b, c):
        return self.local(self.triple_points(a, b, c))

    def charts_at(self, p):
        return [a for a in self.chart_names if p in set(self.charts[a])]

    def quadratic_partition(self):
        """chi_alpha with sum |chi_alpha|^2 = 1 pointwise, supported in the charts."""
        vals = {a: {} for a in self.chart_names}
        for p in self.algebra.points:
            here = self.charts_at(p)
            for a, w in zip(here, stereographic_weights(len(here))):
                vals[a][p] = w
        return {a: self.algebra.function(vals[a]) for a in self.chart_names}

    def linear_partition(self):
        vals = {a: {} for a in self.chart_names}
        for p in self.algebra.points:
            here = self.charts_at(p)
            for a in here:
                vals[a][p] = mpq(1, len(here))
        return {a: self.algebra.function(vals[a]) for a in self.chart_names}

    def nerve(self):
        return {"charts": list(self.chart_names),
                "pairs": sorted({tuple(sorted(k, key=self.chart_names.index)) for k in self.overlaps},
                                key=str),
                "triples": list(self.triples)}

    def to_json(self):
        pairs = sorted({tuple(sorted(k, key=self.chart_names.index)) for k in self.overlaps}, key=str)
        return {
            "charts": {str(a): [str(p) for p in self.charts[a]] for a in self.chart_names},
            "overlaps": {f"{a},{b}": [str(p) for p in self.overlaps[(a, b)]] for a, b in pairs},
            "triples": [[str(x) for x in t] for t in self.triples],
            "partition": {str(a): self.partition[a].to_json() for a in self.chart_names},
            "quadratic_partition": {str(a): self.quadratic[a].to_json() for a in self.chart_names},
        }


def repair_partition(model, chi=None):
    """Return (chi', V) with sum chi'* chi' = 1, chi' = chi V^{-1}, V* V = sum chi* chi."""
    chi = chi if chi is not None else model.quadratic
    A = model.algebra
    M = A.zero()
    for a in model.chart_names:
        M = M + chi[a].involution() * chi[a]
    roots = {}
    for p in A.points:
        c = A.value(M, p).coeffs[0]
        r = rational_sqrt(c.re) if c.is_real() and c.re > 0 else None
        if r is None:
            raise PartitionRepairFailure(f"sum of |chi|^2 at {p!r} has no rational square root")
        roots[p] = r
    V = star_square_root(M, A.function(roots))
    Vinv = star_inverse(None, V)
    return {a: chi[a] * Vinv for a in model.chart_names}, V


# ---------------------------------------------------------------------------
# transitions
# ---------------------------------------------------------------------------

class TransitionData:
    """phi[(a, b)]: k x k matrices over the overlap algebra of a and b."""

    def __init__(self, model, k, phi, name="phi"):
        self.model = model
        self.k = k
        self.phi = dict(phi)
        self.name = name
        for (a, b) in model.overlaps:
            if (a, b) not in self.phi:
                raise CocycleViolation(f"missing transition for overlap {a!r},{b!r}")

    def __call__(self, a, b):
        if a == b:
            return MatrixOverAlgebra.identity(self.model.chart_algebra(a), self.k)
        return self.phi[(a, b)]

    @classmethod
    def from_pointwise(cls, model, k, fn, name="phi"):
        """fn(a, b, p) -> k x k grid of scalars."""
        phi = {}
        for (a, b) in model.overlaps:
            alg = model.overlap_algebra(a, b)
            phi[(a, b)] = _scalar_matrix(alg, lambda p, a=a, b=b: fn(a, b, p))
        return cls(model, k, phi, name)

    def classical(self):
        return TransitionData(self.model, self.k, {key: m.classical() for key, m in self.phi.items()},
                              name=f"{self.name}_0")

    def gauge(self, g):
        """phihat_ab = g_a phi_ab g_b^{-1} for chart-wise invertible matrices g."""
        model = self.model
        ginv = {a: star_inverse(None, g[a]) for a in g}
        phi = {}
        for (a, b), m in self.phi.items():
            alg = model.overlap_algebra(a, b)
            phi[(a, b)] = transfer(g[a], alg) * m * transfer(ginv[b], alg)
        return TransitionData(model, self.k, phi, name=f"{self.name}^g")

    def check_cocycle(self, strict=True):
        model = self.model
        report = CheckReport(f"cocycle[{self.name}]")
        for (a, b) in model.overlaps:
            report.samples += 1
            prod = self(a, b) * self(b, a)
            if prod != prod.one():
                report.fail(check="inverse", pair=[str(a), str(b)])
        for (a, b, c) in model.triples:
            alg = model.triple_algebra(a, b, c)
            report.samples += 1
            prod = transfer(self(a, b), alg) * transfer(self(b, c), alg) * transfer(self(c, a), alg)
            if prod != prod.one():
                report.fail(check="triple", triple=[str(a), str(b), str(c)])
        if strict and not report.passed:
            raise CocycleViolation(f"cocycle condition fails: {report.failures[0]}")
        return report

    def is_unitary(self):
        return all(m.involution() == self(b, a) for (a, b), m in self.phi.items())

    def to_json(self):
        return {f"{a},{b}": m.to_json() for (a, b), m in sorted(self.phi.items(), key=str)}


def coboundary_transitions(model, k, u, name="phi"):
    """phi_ab(p) = u(a, p) u(b, p)^{-1} from per-chart Q(i) matrices u(a, p)."""
    def fn(a, b, p):
        return qi_matmul(u(a, p), qi_inverse(u(b, p)))
    return TransitionData.from_pointwise(model, k, fn, name)


def gauge_exponentials(model, k, rng, size=2):
    """g_a = Exp(i lambda H_a) for random Hermitian H_a, chart by chart (unitary)."""
    g = {}
    lam = FormalScalar.lam()
    for a in model.chart_names:
        alg = model.chart_algebra(a)
        H = _scalar_matrix(alg, lambda p: random_qi_hermitian(rng, k, size))
        g[a] = star_exp(None, LogValue(None, H.scale(lam * FormalScalar.constant(I))))
    return g


# ---------------------------------------------------------------------------
# families of sections and endomorphisms
# ---------------------------------------------------------------------------

def compatible_family(trans, values, columns=1):
    """The family s_a(p) = phi_{a, a0(p)}(p) v(p), a0(p) the first chart at p.

    ``values(p)`` gives a k x columns grid (classical or series).
    """
    model = trans.model
    first = {p: model.charts_at(p)[0] for p in model.algebra.points}
    vals = {p: values(p) for p in model.algebra.points}
    fam = {}
    for a in model.chart_names:
        alg = model.chart_algebra(a)
        local = _scalar_matrix(alg, lambda p: vals[p])
        fam[a] = _apply_pointwise(trans, a, first, local)
    return fam


def _apply_pointwise(trans, a, first, local, right=False):
    alg = local.algebra
    out = MatrixOverAlgebra.zeros(alg, local.rows, local.cols)
    groups = {}
    for p in alg.points:
        groups.setdefault(first[p], []).append(p)
    for b, pts in groups.items():
        mask = alg.indicator(pts)
        piece = local.map(lambda e: e * mask)
        if b == a:
            out = out + piece
            continue
        phi = transfer(trans(a, b), alg)
        if right:
            out = out + phi * piece * transfer(trans(b, a), alg)
        else:
            out = out + phi * piece
    return out


def covariant_family(trans, values):
    """Endomorphism family A_a(p) = phi_{a,a0}(p) Y(p) phi_{a0,a}(p)."""
    model = trans.model
    first = {p: model.charts_at(p)[0] for p in model.algebra.points}
    vals = {p: values(p) for p in model.algebra.points}
    fam = {}
    for a in model.chart_names:
        alg = model.chart_algebra(a)
        local = _scalar_matrix(alg, lambda p: vals[p])
        fam[a] = _apply_pointwise(trans, a, first, local, right=True)
    return fam


def _random_grid(rng, rows, cols, depth=0):
    def entry():
        c = [GaussRational(mpq(rng.randint(-3, 3), rng.randint(1, 3)),
                           mpq(rng.randint(-3, 3), rng.randint(1, 3)))]
        c += [GaussRational(mpq(rng.randint(-2, 2), rng.randint(1, 2))) for _ in range(depth)]
        return FormalScalar.series(c)
    return [[entry() for _ in range(cols)] for _ in range(rows)]


def random_section(trans, rng, depth=0):
    k = trans.k
    return compatible_family(trans, lambda p: _random_grid(rng, k, 1, depth))


def random_endomorphism(trans, rng, depth=0):
    k = trans.k
    return covariant_family(trans, lambda p: _random_grid(rng, k, k, depth))


def families_equal(f, g):
    return all(f[a] == g[a] for a in f)


def _fam_add(f, g):
    return {a: f[a] + g[a] for a in f}


def _fam_sub(f, g):
    return {a: f[a] - g[a] for a in f}


def _fam_zero(f):
    return all(x.is_zero() for x in f.values())


def check_compatible(trans, fam, endo=False):
    model = trans.model
    for (a, b) in model.overlaps:
        alg = model.overlap_algebra(a, b)
        lhs = transfer(fam[a], alg)
        rhs = trans(a, b) * transfer(fam[b], alg)
        if endo:
            rhs = rhs * trans(b, a)
        if lhs != rhs:
            return False
    return True


# ---------------------------------------------------------------------------
# frames
# ---------------------------------------------------------------------------

def expand_in_frame(s, frame):
    """Coefficients c with frame * c = s (columns of ``frame`` form the frame)."""
    try:
        inv = star_inverse(None, frame)
    except NonInvertibleClassicalPart as exc:
        raise DegenerateFrame(str(exc)) from exc
    c = inv * s
    if frame * c != s:
        raise DegenerateFrame("frame expansion does not reassemble the section")
    return c


def orthonormalize_frame(frame, metric=None):
    """frame * V with V = G^{-1/2}, G = frame* K frame, so that h(e_i, e_j) = delta_ij."""
    K = metric
    G = frame.involution() * (frame if K is None else K * frame)
    X = G - G.one()
    if X.valuation() == 0:
        raise ClassicalNotOrthonormal("classical frame is not orthonormal")
    V = binomial_invsqrt(None, X)
    return frame * V, V


# ---------------------------------------------------------------------------
# gluing and the glued module
# ---------------------------------------------------------------------------

class GluedModule:
    """Deformed module from phihat-compatible families, glued with chi."""

    def __init__(self, trans, partition=None, classical=None):
        self.trans = trans
        self.model = trans.model
        self.partition = partition if partition is not None else self.model.partition
        self.classical_trans = classical if classical is not None else trans.classical()
        self._chi = {a: {b: transfer(self.partition[b], self.model.overlap_algebra(a, b))
                         for b in self.model.chart_names if a == b or (a, b) in self.model.overlaps}
                     for a in self.model.chart_names}

    def _glue_with(self, trans, s):
        model = self.model
        out = {}
        for a in model.chart_names:
            alg = model.chart_algebra(a)
            acc = None
            for b, chi in self._chi[a].items():
                oalg = chi.algebra
                term = trans(a, b) * (transfer(s[b], oalg) * chi)
                term = transfer(term, alg)
                acc = term if acc is None else acc + term
            out[a] = acc
        return out

    def glue(self, s):
        """s_hat_a = sum_b phihat_ab chi_b s_b."""
        return self._glue_with(self.trans, s)

    def unglue(self, t):
        """Inverse of :meth:`glue` on phihat-compatible families."""
        s = self._glue_with(self.classical_trans, t)
        for _ in range(get_order() + 1):
            r = _fam_sub(t, self.glue(s))
            if _fam_zero(r):
                return s
            s = _fam_add(s, self._glue_with(self.classical_trans, r))
        if not _fam_zero(_fam_sub(t, self.glue(s))):
            raise CocycleViolation("family is not compatible with the deformed transitions")
        return s

    def act(self, s, f):
        """(s . f) = glue^{-1}(glue(s) f) for a global function f."""
        t = self.glue(s)
        model = self.model
        return self.unglue({a: t[a].map(lambda e, a=a: e * transfer(f, model.chart_algebra(a)))
                            for a in model.chart_names})

    def deformed_inner(self, t, u):
        """Global function with value t_a* u_a on chart a; overlap-independent for unitary phihat."""
        if not self.trans.is_unitary():
            raise NonUnitaryTransitions("deformed inner product requires unitary transitions")
        model = self.model
        local = {a: (t[a].involution() * u[a]).entries[0][0] for a in model.chart_names}
        values = {}
        for p in model.algebra.points:
            here = model.charts_at(p)
            vals = [local[a].algebra.value(local[a], p) for a in here]
            if any(v != vals[0] for v in vals[1:]):
                raise NonUnitaryTransitions(f"inner product depends on the chart at {p!r}")
            values[p] = vals[0]
        return model.algebra.function(values)

    def inner(self, s, t):
        return self.deformed_inner(self.glue(s), self.glue(t))


def glue_section(local, trans, partition=None):
    trans.check_cocycle()
    return GluedModule(trans, partition).glue(local)


def module_from_transitions(trans, partition=None):
    trans.check_cocycle()
    return GluedModule(trans, partition)


def verify_glued_module(G, samples=5, seed=0):
    import random
    rng = random.Random(seed)
    report = CheckReport("glued_module")
    A = G.model.algebra
    unitary = G.trans.is_unitary()
    for s_ in range(samples):
        s = random_section(G.classical_trans, rng, depth=1)
        t = random_section(G.classical_trans, rng, depth=1)
        f, g = A.random_element(rng), A.random_element(rng)
        report.samples += 1
        glued = G.glue(s)
        checks = {
            "compatible": check_compatible(G.trans, glued),
            "classical": all(glued[a].classical() == s[a].classical() for a in glued),
            "bijective": families_equal(G.unglue(glued), s),
            "action": families_equal(G.act(G.act(s, f), g), G.act(s, f * g)),
        }
        if unitary:
            h = G.inner(s, t)
            checks["hermitian"] = h.involution() == G.inner(t, s)
            checks["right_linear"] = G.inner(s, G.act(t, f)) == h * f
        for name, ok in checks.items():
            if not ok:
                report.fail(sample=s_, check=name)
    return report


# ---------------------------------------------------------------------------
# endomorphisms
# ---------------------------------------------------------------------------

class EndoTransport:
    """T(A)_a = R_a (sum_c phihat_ac chibar_c A_c chi_c phihat_ca) R_a with R = T~(1)^{-1/2}."""

    def __init__(self, trans, quadratic=None):
        self.trans = trans
        self.model = trans.model
        self.classical_trans = trans.classical()
        self.quadratic = quadratic if quadratic is not None else self.model.quadratic
        M = self._tilde(self.trans, self._unit_family())
        self.R = {}
        for a, m in M.items():
            X = m - m.one()
            if X.valuation() == 0:
                raise PartitionRepairFailure("T~(1) does not reduce to 1; partition is not quadratic")
            self.R[a] = binomial_invsqrt(None, X)

    def _unit_family(self):
        return {a: MatrixOverAlgebra.identity(self.model.chart_algebra(a), self.trans.k)
                for a in self.model.chart_names}

    def unit(self):
        return self._unit_family()

    def _tilde(self, trans, A):
        model = self.model
        out = {}
        for a in model.chart_names:
            alg = model.chart_algebra(a)
            acc = None
            for c in model.chart_names:
                if c != a and (a, c) not in model.overlaps:
                    continue
                oalg = model.overlap_algebra(a, c)
                chi = transfer(self.quadratic[c], oalg)
                mid = transfer(A[c], oalg).map(lambda e, chi=chi: chi.involution() * e * chi)
                term = transfer(trans(a, c) * mid * trans(c, a), alg)
                acc = term if acc is None else acc + term
            out[a] = acc
        return out

    def T(self, A):
        Tt = self._tilde(self.trans, A)
        return {a: self.R[a] * Tt[a] * self.R[a] for a in Tt}

    def T_inverse(self, C):
        back = lambda F: self._tilde(self.classical_trans, F)  # noqa: E731
        A = back(C)
        for _ in range(get_order() + 1):
            r = _fam_sub(C, self.T(A))
            if _fam_zero(r):
                return A
            A = _fam_add(A, back(r))
        if not _fam_zero(_fam_sub(C, self.T(A))):
            raise PartitionRepairFailure("family is not covariant for the deformed transitions")
        return A

    def product(self, A, B):
        TA, TB = self.T(A), self.T(B)
        return self.T_inverse({a: TA[a] * TB[a] for a in TA})

    def involution(self, A):
        return {a: m.involution() for a, m in A.items()}


def endo_transport(trans, quadratic=None):
    trans.check_cocycle()
    return EndoTransport(trans, quadratic)


def verify_endo_transport(E, samples=3, seed=0):
    import random
    rng = random.Random(seed)
    report = CheckReport("endo_transport")
    one = E.unit()
    report.samples += 1
    if not families_equal(E.T(one), one):
        report.fail(check="unit_repair")
    for s in range(samples):
        A, B, C = (random_endomorphism(E.classical_trans, rng) for _ in range(3))
        report.samples += 1
        TA = E.T(A)
        checks = {
            "covariant": check_compatible(E.trans, TA, endo=True),
            "associative": families_equal(E.product(E.product(A, B), C),
                                          E.product(A, E.product(B, C))),
            "unital": families_equal(E.product(one, A), A) and families_equal(E.product(A, one), A),
            "hermitian": families_equal(E.involution(E.product(A, B)),
                                        E.product(E.involution(B), E.involution(A))),
            "classical": all(E.product(A, B)[a].classical() == (A[a] * B[a]).classical() for a in A),
        }
        for name, ok in checks.items():
            if not ok:
                report.fail(sample=s, check=name)
    return report


def probe_center_closure(E, samples=3, seed=0):
    """Evidence only: do scalar families stay scalar under *' and agree with *?"""
    import random
    rng = random.Random(seed)
    model = E.model
    A = model.algebra
    report = CheckReport("center_closure")
    closed = agrees = True
    for _ in range(samples):
        f, g = A.random_element(rng, depth=1), A.random_element(rng, depth=1)
        F = {a: MatrixOverAlgebra.identity(model.chart_algebra(a), E.trans.k).map(
            lambda e, a=a: e * transfer(f, model.chart_algebra(a))) for a in model.chart_names}
        G = {a: MatrixOverAlgebra.identity(model.chart_algebra(a), E.trans.k).map(
            lambda e, a=a: e * transfer(g, model.chart_algebra(a))) for a in model.chart_names}
        prod = E.product(F, G)
        report.samples += 1
        fg = f * g
        for a, m in prod.items():
            k = m.rows
            diag = m.entries[0][0]
            scalar = all((m.entries[i][j] == (diag if i == j else diag.zero()))
                         for i in range(k) for j in range(k))
            if not scalar:
                closed = False
            elif diag != transfer(fg, diag.algebra):
                agrees = False
    report.details.update({"closed": closed, "agrees_with_star": agrees,
                           "note": "empirical evidence only; no theorem asserted"})
    return report


# ---------------------------------------------------------------------------
# quantum Serre-Swan
# ---------------------------------------------------------------------------

class SerreSwan:
    """epsilon: E -> A^{mk}, pi: A^{mk} -> E, P = epsilon o pi."""

    def __init__(self, trans, partition=None):
        self.trans = trans
        self.model = trans.model
        self.chi, self.V = repair_partition(self.model, partition)
        model, k = self.model, trans.k
        A = model.algebra
        self.m = len(model.chart_names)
        blocks = []
        for a in model.chart_names:
            row = []
            for c in model.chart_names:
                if a != c and (a, c) not in model.overlaps:
                    row.append(MatrixOverAlgebra.zeros(A, k, k))
                    continue
                oalg = model.overlap_algebra(a, c)
                ca = transfer(self.chi[a], oalg)
                cc = transfer(self.chi[c], oalg).involution()
                blk = trans(a, c).map(lambda e, ca=ca, cc=cc: ca * e * cc)
                row.append(transfer(blk, A))
            blocks.append(row)
        self.P = MatrixOverAlgebra.block(A, blocks)

    def epsilon(self, t):
        """(chi_a t_a)_a stacked into one column over the global algebra."""
        A = self.model.algebra
        rows = []
        for a in self.model.chart_names:
            col = transfer(t[a], A).map(lambda e, a=a: self.chi[a] * e)
            rows.extend(r[0] for r in col.entries)
        return MatrixOverAlgebra(A, [[e] for e in rows])

    def pi(self, v):
        model, k = self.model, self.trans.k
        out = {}
        for a in model.chart_names:
            alg = model.chart_algebra(a)
            acc = MatrixOverAlgebra.zeros(alg, k, 1)
            for ci, c in enumerate(model.chart_names):
                if a != c and (a, c) not in model.overlaps:
                    continue
                oalg = model.overlap_algebra(a, c)
                chibar = transfer(self.chi[c], oalg).involution()
                vc = MatrixOverAlgebra(oalg, [[transfer(v.entries[ci * k + i][0], oalg) * chibar]
                                              for i in range(k)])
                acc = acc + transfer(self.trans(a, c) * vc, alg)
            out[a] = acc
        return out

    def to_json(self):
        return {"P": self.P.to_json(), "V": self.V.to_json()}


def serre_swan(trans, partition=None):
    trans.check_cocycle()
    return SerreSwan(trans, partition)


def verify_serre_swan(S, samples=3, seed=0, classical=None):
    import random
    rng = random.Random(seed)
    report = CheckReport("serre_swan")
    P = S.P
    report.samples += 1
    if P * P != P:
        report.fail(check="idempotent")
    if S.trans.is_unitary() and P.involution() != P:
        report.fail(check="hermitian")
    G = GluedModule(S.trans)
    A = S.model.algebra
    for s in range(samples):
        t = G.glue(random_section(G.classical_trans, rng, depth=1))
        report.samples += 1
        if not families_equal(S.pi(S.epsilon(t)), t):
            report.fail(sample=s, check="pi_epsilon")
        v = MatrixOverAlgebra(A, [[A.random_element(rng)] for _ in range(P.rows)])
        if S.epsilon(S.pi(v)) != P * v:
            report.fail(sample=s, check="epsilon_pi")
        if not check_compatible(S.trans, S.pi(v)):
            report.fail(sample=s, check="pi_lands_in_E")
    if classical is not None:
        report.samples += 1
        if P.classical() != classical.P:
            report.fail(check="classical_limit")
    report.details["rank_matrix_size"] = P.rows
    return report


# ---------------------------------------------------------------------------
# Cech classes and the Picard action
# ---------------------------------------------------------------------------

def _ordered_log(logs, a, b):
    if (a, b) in logs:
        return logs[(a, b)]
    return -logs[(b, a)]


def _winding_values(w, pts):
    out = {}
    for p in pts:
        c = w.algebra.value(w, p).coeffs[0] if w is not None else GaussRational(0)
        out[p] = c
    return out


@dataclass
class CechClassData:
    triples: list
    n: dict                      # triple -> mpq
    logs: dict = field(default=None, repr=False)
    tails: dict = field(default=None, repr=False)

    @property
    def is_integral(self):
        return all(q.denominator == 1 for q in self.n.values())

    def verdict(self):
        return {"integral": self.is_integral,
                "note": "2 pi i-integral relative class for the identity identification; "
                        "diffeomorphism freedom is not explored"}

    def pairing(self, cycle):
        """Sum of n over a signed list of triples, e.g. a fundamental cycle."""
        return sum((sign * self.n[t] for sign, t in cycle), mpq(0))

    def __add__(self, other):
        if sorted(self.triples, key=str) != sorted(other.triples, key=str):
            raise NerveMismatch("classes live on different nerves")
        return CechClassData(list(self.triples), {t: self.n[t] + other.n[t] for t in self.triples})

    def __eq__(self, other):
        return isinstance(other, CechClassData) and self.n == other.n

    @classmethod
    def zero(cls, triples):
        return cls(list(triples), {t: mpq(0) for t in triples})

    def to_json(self):
        return {"n": {",".join(map(str, t)): rational_str(q) for t, q in self.n.items()},
                "t": None if self.logs is None else
                {f"{a},{b}": v.to_json() for (a, b), v in sorted(self.logs.items(), key=str)},
                "verdict": self.verdict()}


def cech_relative_class(model, logs, strict=True):
    """t_abc = t_ab o t_bc o t_ca (BCH) on each triple; n_abc = t_abc / 2 pi i."""
    n, tails = {}, {}
    for (a, b, c) in model.triples:
        alg = model.triple_algebra(a, b, c)
        tab, tbc, tca = (transfer(_ordered_log(logs, x, y), alg) for x, y in ((a, b), (b, c), (c, a)))
        t = bch_compose(None, bch_compose(None, tab, tbc), tca)
        if not getattr(alg, "commutative", False) and t.winding is not None:
            for gen in alg.generators():
                if t.winding * gen != gen * t.winding:
                    raise NotCentral("triple logarithm is not central", triple=(a, b, c))
        if not t.tail.is_zero():
            raise NotConstant("lambda-corrections do not cancel on the triple", triple=(a, b, c))
        vals = set(_winding_values(t.winding, alg.points).values())
        if len(vals) != 1:
            raise NotConstant("triple logarithm varies over the triple overlap", triple=(a, b, c))
        q = vals.pop()
        if not q.is_real():
            raise NotIntegral("triple logarithm is not real", triple=(a, b, c))
        if strict and q.re.denominator != 1:
            raise NotIntegral(f"n = {rational_str(q.re)} is not an integer", triple=(a, b, c))
        n[(a, b, c)] = q.re
        tails[(a, b, c)] = t.tail
    return CechClassData(list(model.triples), n, dict(logs), tails)


def transition_logs(trans):
    """Principal logarithms of rank-one transitions, one per unordered overlap."""
    model = trans.model
    logs = {}
    for (a, b) in model.overlaps:
        if model.chart_names.index(a) < model.chart_names.index(b):
            logs[(a, b)] = star_log(None, trans(a, b).entries[0][0])
    return logs


def logs_to_transitions(model, logs):
    phi = {}
    for (a, b), t in logs.items():
        u = star_exp(None, t)
        phi[(a, b)] = MatrixOverAlgebra(u.algebra, [[u]])
        phi[(b, a)] = MatrixOverAlgebra(u.algebra, [[star_exp(None, -t)]])
    return TransitionData(model, 1, phi, name="exp(t)")


def coboundary_logs(model, s):
    """t_ab = s_a - s_b restricted to the overlaps (s: chart -> LogValue or element)."""
    logs = {}
    for (a, b) in model.overlaps:
        if model.chart_names.index(a) < model.chart_names.index(b):
            alg = model.overlap_algebra(a, b)
            sa, sb = transfer(_as_log(s[a]), alg), transfer(_as_log(s[b]), alg)
            w = _sub_winding(sa.winding, sb.winding, alg)
            logs[(a, b)] = LogValue(w, sa.tail - sb.tail)
    return logs


def _as_log(x):
    return x if isinstance(x, LogValue) else LogValue(None, x)


def _sub_winding(wa, wb, alg):
    if wa is None and wb is None:
        return None
    wa = wa if wa is not None else alg.zero()
    wb = wb if wb is not None else alg.zero()
    return wa - wb


def picard_action(c, line):
    """c -> c + c1(line) at the cocycle level."""
    return line + c
