"""Hermitian star-product algebras with exact structure constants.

An algebra is described by a basis (hashable keys) together with

* ``basis_product(a, b)``: the star product of two basis elements as a list
  of ``(key, FormalScalar)`` pairs at the current truncation order;
* ``classical_basis_product(a, b)``: the undeformed (lambda = 0) product;
* ``basis_involution(a)``: ``(key, GaussRational)`` pairs;
* a unit.

Elements (:class:`Element`) and matrices over an algebra
(:class:`MatrixOverAlgebra`) share a small ring protocol (``*``, ``+``,
``involution``, ``classical``, ``classical_inverse``, ``one`` ...) on which the
star calculus at the bottom of the module is written: inverses, binomial
series, exponentials and logarithms.

Conventions
-----------
Moyal on R^{2n} (coordinates x_1..x_n, p_1..p_n)::

    f * g = sum_{alpha, beta} (i lambda / 2)^{|alpha|+|beta|} (-1)^{|beta|}
            / (alpha! beta!)  (d_x^alpha d_p^beta f)(d_p^alpha d_x^beta g)

so that x * p - p * x = i lambda.  Wick on C::

    f * g = sum_r lambda^r / r!  (d_zbar^r f)(d_z^r g)

so that zbar * z - z * zbar = lambda and evaluation at 0 is positive.
"""

import itertools
import math
import random
from collections import defaultdict

from gmpy2 import mpq

from .errors import (AlgebraMismatch, DegreeOverflow, DomainRestriction,
                     NonInvertibleClassicalPart, NonNilpotentInput,
                     NotStarCompatible, OrderMismatch, SingularSystem)
from .linalg import qi_solve
from .report import CheckReport
from .scalars import (I, ONE, ZERO, FormalScalar, GaussRational, binomial,
                      get_order, rational, rational_str)

DEFAULT_DEGREE_CAP = 10

_MPQ = type(mpq())
_Q0 = mpq(0)


def _nonzero(s):
    return [(i, c.re, c.im) for i, c in enumerate(s.coeffs) if c.re or c.im]


def _falling(n, k):
    out = 1
    for j in range(k):
        out *= n - j
    return out


def _as_scalar(c):
    """Coerce a ring scalar (int, mpq, GaussRational, FormalScalar)."""
    if isinstance(c, FormalScalar):
        return c
    if isinstance(c, (int, _MPQ, GaussRational)) and not isinstance(c, bool):
        return FormalScalar.constant(c)
    return None


def _random_gauss(rng, size=3, complex_=True):
    re = mpq(rng.randint(-size, size), rng.choice((1, 1, 2)))
    im = mpq(rng.randint(-size, size), rng.choice((1, 1, 2))) if complex_ else 0
    return GaussRational(re, im)


def _random_series(rng, depth=2, complex_=True, order=None):
    order = get_order() if order is None else order
    cs = [_random_gauss(rng, complex_=complex_) if rng.random() < 0.7 else ZERO
          for _ in range(min(depth, order) + 1)]
    return FormalScalar(cs, order)


# ---------------------------------------------------------------------------
# algebras
# ---------------------------------------------------------------------------

class Algebra:
    """Base class: subclasses supply structure constants on basis keys."""

    kind = "abstract"
    finite = False
    commutative = False

    def __init__(self, degree_cap=DEFAULT_DEGREE_CAP):
        self.degree_cap = degree_cap
        self._products = {}

    # -- structure -----------------------------------------------------------
    def _product(self, a, b):
        raise NotImplementedError

    def basis_product(self, a, b):
        key = (get_order(), a, b)
        hit = self._products.get(key)
        if hit is None:
            hit = self._product(a, b)
            self._products[key] = hit
        return hit

    def _basis_product_sparse(self, a, b):
        """basis_product with each series reduced to its nonzero (r, re, im) list."""
        key = (get_order(), a, b)
        sparse = self.__dict__.setdefault("_sparse_products", {})
        hit = sparse.get(key)
        if hit is None:
            hit = [(k, _nonzero(s)) for k, s in self.basis_product(a, b)]
            sparse[key] = hit
        return hit

    def classical_basis_product(self, a, b):
        raise NotImplementedError

    def basis_involution(self, a):
        raise NotImplementedError

    def unit_terms(self):
        raise NotImplementedError

    def keys(self):
        raise TypeError(f"{self.name} has no finite basis")

    @property
    def name(self):
        return self.kind

    def descriptor(self):
        return {"kind": self.kind, "id": self.name, "order": get_order(),
                "degree_cap": self.degree_cap}

    def key_to_json(self, key):
        return list(key)

    def key_from_json(self, data):
        return tuple(data)

    # -- elements ------------------------------------------------------------
    def element(self, terms=None):
        return Element(self, terms or {})

    def monomial(self, key, coeff=1):
        return Element(self, {key: FormalScalar.coerce(coeff)})

    def unit(self):
        return Element(self, self.unit_terms())

    def one(self):
        return self.unit()

    def zero(self):
        return Element(self, {})

    def scalar(self, c):
        return self.unit().scale(c)

    def multiply(self, f, g):
        self._check(f)
        self._check(g)
        n = get_order() + 1
        # accumulate sum_{a,b} c_a c_b s_ab^k on plain rationals (hot path)
        acc = {}
        for ka, ca in f.terms.items():
            for kb, cb in g.terms.items():
                c = ca * cb
                if len(c.coeffs) != n:
                    raise OrderMismatch(f"coefficients have order {c.order}, context {n - 1}")
                cz = _nonzero(c)
                if not cz:
                    continue
                for k, sz in self._basis_product_sparse(ka, kb):
                    slot = acc.get(k)
                    if slot is None:
                        slot = acc[k] = ([_Q0] * n, [_Q0] * n)
                    re, im = slot
                    for i, ar, ai in cz:
                        for j, br, bi in sz:
                            m = i + j
                            if m >= n:
                                break
                            if ai or bi:
                                re[m] += ar * br - ai * bi
                                im[m] += ar * bi + ai * br
                            else:
                                re[m] += ar * br
        return Element(self, {k: FormalScalar._raw(GaussRational(r, m) for r, m in zip(*slot))
                              for k, slot in acc.items()})

    def classical_multiply(self, f, g):
        self._check(f)
        self._check(g)
        acc = {}
        for ka, ca in f.terms.items():
            for kb, cb in g.terms.items():
                c = ca * cb
                if c.is_zero():
                    continue
                for k, s in self.classical_basis_product(ka, kb):
                    term = c.scale(s)
                    prev = acc.get(k)
                    acc[k] = term if prev is None else prev + term
        return Element(self, acc)

    def involution(self, f):
        self._check(f)
        acc = {}
        for k, c in f.terms.items():
            cc = c.conj()
            for k2, s in self.basis_involution(k):
                term = cc.scale(s)
                prev = acc.get(k2)
                acc[k2] = term if prev is None else prev + term
        return Element(self, acc)

    def classical_inverse(self, u):
        """Inverse of the classical part of u in the undeformed algebra."""
        u0 = u.classical()
        if self.finite:
            return self._finite_classical_inverse(u0)
        c = self.unit_multiple(u0)
        if c is None or c.is_zero():
            raise NonInvertibleClassicalPart(
                f"classical part of {u} is not an invertible constant")
        return self.scalar(c.inverse())

    def _finite_classical_inverse(self, u0):
        keys = self.keys()
        index = {k: i for i, k in enumerate(keys)}
        n = len(keys)
        mat = [[ZERO] * n for _ in range(n)]
        for j, kj in enumerate(keys):
            col = self.classical_multiply(u0, self.monomial(kj))
            for k, c in col.terms.items():
                mat[index[k]][j] = c.coeffs[0]
        unit = self.unit().classical()
        rhs = [[unit.terms[k].coeffs[0] if k in unit.terms else ZERO] for k in keys]
        try:
            sol = qi_solve(mat, rhs)
        except SingularSystem as exc:
            raise NonInvertibleClassicalPart(
                "classical part is not invertible") from exc
        return Element(self, {k: FormalScalar.constant(sol[i][0])
                              for i, k in enumerate(keys)})

    def unit_multiple(self, f0):
        """c if the classical element f0 equals c * 1, else None."""
        unit = self.unit().classical()
        k, u = next(iter(unit.terms.items()))
        c = (f0.terms[k].coeffs[0] if k in f0.terms else ZERO) / u.coeffs[0]
        if f0.classical() == unit.scale(c):
            return c
        return None

    # -- 2 pi i windings ----------------------------------------------------
    def exp_two_pi_i(self, w):
        """exp(2 pi i w) for a classical, rational-valued central element w."""
        q = self.unit_multiple(w.classical()) if w is not None else GaussRational(0)
        if q is None or not q.is_real():
            raise DomainRestriction("winding must be a rational multiple of 1")
        return self.scalar(_root_of_unity(q.re))

    def log_two_pi_i(self, u0):
        """Principal winding w with exp(2 pi i w) = u0 (u0 a 4th root of unity)."""
        c = self.unit_multiple(u0)
        if c is None:
            raise DomainRestriction("classical part is not a constant multiple of 1")
        return self.scalar(_principal_winding(c))

    # -- misc ----------------------------------------------------------------
    def _check(self, f):
        if f.algebra is not self:
            raise AlgebraMismatch(f"element of {f.algebra.name} used in {self.name}")

    def random_element(self, rng, **kw):
        raise NotImplementedError

    def generators(self):
        """Elements generating the algebra (used for ideal closure checks)."""
        return [self.monomial(k) for k in self.keys()]

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


def _root_of_unity(q):
    k = 4 * rational(q)
    if k.denominator != 1:
        raise DomainRestriction(
            f"exp(2 pi i * {rational_str(q)}) is not in Q(i)")
    return (ONE, I, -ONE, -I)[int(k.numerator) % 4]


_WINDINGS = {(1, 0): mpq(0), (0, 1): mpq(1, 4), (-1, 0): mpq(1, 2), (0, -1): mpq(-1, 4)}


def _principal_winding(c):
    q = _WINDINGS.get((int(c.re), int(c.im))) if c.re.denominator == 1 and c.im.denominator == 1 else None
    if q is None:
        raise DomainRestriction(f"{c} is not a fourth root of unity")
    return q


class PolynomialAlgebra(Algebra):
    """Shared machinery for Moyal and Wick polynomial algebras."""

    def degree(self, key):
        return sum(key)

    def classical_basis_product(self, a, b):
        self._check_degree(a, b)
        return [(tuple(x + y for x, y in zip(a, b)), ONE)]

    def _check_degree(self, a, b):
        if self.degree(a) + self.degree(b) > self.degree_cap:
            raise DegreeOverflow(
                f"product degree {self.degree(a) + self.degree(b)} exceeds cap {self.degree_cap}")

    def monomials(self, max_degree):
        n = self.nvars
        out = []
        for d in range(max_degree + 1):
            for combo in itertools.combinations_with_replacement(range(n), d):
                key = [0] * n
                for c in combo:
                    key[c] += 1
                out.append(tuple(key))
        return out

    def monomial_basis(self, max_degree):
        return [self.monomial(k) for k in self.monomials(max_degree)]

    def random_element(self, rng, max_degree=3, max_terms=4, depth=2, hermitian=False):
        pool = self.monomials(max_degree)
        f = Element(self, {k: _random_series(rng, depth)
                           for k in rng.sample(pool, min(len(pool), rng.randint(1, max_terms)))})
        if hermitian:
            f = (f + f.involution()).scale(mpq(1, 2))
        return f

    def unit_terms(self):
        return {tuple([0] * self.nvars): FormalScalar.one()}

    def generators(self):
        out = []
        for j in range(self.nvars):
            key = [0] * self.nvars
            key[j] = 1
            out.append(self.monomial(tuple(key)))
        return out


class MoyalAlgebra(PolynomialAlgebra):
    """Weyl-Moyal product on polynomials in x_1..x_n, p_1..p_n."""

    kind = "moyal"

    def __init__(self, n=1, degree_cap=DEFAULT_DEGREE_CAP, corrupt_c2=None):
        super().__init__(degree_cap)
        self.n = n
        self.nvars = 2 * n
        self.corrupt_c2 = None if corrupt_c2 is None else GaussRational.coerce(corrupt_c2)

    @property
    def name(self):
        tag = f"moyal(n={self.n})"
        return tag + "[corrupted]" if self.corrupt_c2 is not None else tag

    def x(self, j=0):
        key = [0] * self.nvars
        key[j] = 1
        return self.monomial(tuple(key))

    def p(self, j=0):
        key = [0] * self.nvars
        key[self.n + j] = 1
        return self.monomial(tuple(key))

    def basis_involution(self, a):
        return [(a, ONE)]

    def _product(self, a, b):
        self._check_degree(a, b)
        n, order = self.n, get_order()
        xa, pa, xb, pb = a[:n], a[n:], b[:n], b[n:]
        half_i = GaussRational(0, mpq(1, 2))
        alpha_ranges = [range(min(xa[j], pb[j]) + 1) for j in range(n)]
        beta_ranges = [range(min(pa[j], xb[j]) + 1) for j in range(n)]
        acc = defaultdict(lambda: [ZERO] * (order + 1))
        for alpha in itertools.product(*alpha_ranges):
            sa = sum(alpha)
            if sa > order:
                continue
            for beta in itertools.product(*beta_ranges):
                r = sa + sum(beta)
                if r > order:
                    continue
                num = 1
                den = 1
                for j in range(n):
                    num *= (_falling(xa[j], alpha[j]) * _falling(pb[j], alpha[j])
                            * _falling(pa[j], beta[j]) * _falling(xb[j], beta[j]))
                    den *= math.factorial(alpha[j]) * math.factorial(beta[j])
                coeff = GaussRational(mpq((-1) ** sum(beta) * num, den))
                for _ in range(r):
                    coeff = coeff * half_i
                if r == 2 and self.corrupt_c2 is not None:
                    coeff = coeff * self.corrupt_c2
                key = tuple(xa[j] - alpha[j] + xb[j] - beta[j] for j in range(n)) + \
                    tuple(pa[j] - beta[j] + pb[j] - alpha[j] for j in range(n))
                acc[key][r] = acc[key][r] + coeff
        return [(k, FormalScalar._raw(cs)) for k, cs in acc.items()
                if any(not c.is_zero() for c in cs)]

    def poisson_bracket(self, f, g):
        """{f, g} = sum_j d_xj f d_pj g - d_pj f d_xj g (classical)."""
        out = self.zero()
        for j in range(self.n):
            out = out + _derive(f, j).classical_mul(_derive(g, self.n + j))
            out = out - _derive(f, self.n + j).classical_mul(_derive(g, j))
        return out


class WickAlgebra(PolynomialAlgebra):
    """Wick product on polynomials in z, zbar; key (a, b) is z^a zbar^b."""

    kind = "wick"
    nvars = 2

    @property
    def name(self):
        return "wick"

    def z(self):
        return self.monomial((1, 0))

    def zbar(self):
        return self.monomial((0, 1))

    def basis_involution(self, a):
        return [((a[1], a[0]), ONE)]

    def _product(self, a, b):
        self._check_degree(a, b)
        order = get_order()
        za, zba = a
        zb, zbb = b
        acc = {}
        for r in range(min(zba, zb, order) + 1):
            c = mpq(_falling(zba, r) * _falling(zb, r), math.factorial(r))
            cs = [ZERO] * (order + 1)
            cs[r] = GaussRational(c)
            acc[(za + zb - r, zba + zbb - r)] = FormalScalar._raw(cs)
        return list(acc.items())

    def poisson_bracket(self, f, g):
        """{f, g} normalised so that C_1(f,g) - C_1(g,f) = i {f, g}."""
        d = _derive(f, 1).classical_mul(_derive(g, 0)) - _derive(f, 0).classical_mul(_derive(g, 1))
        return d.scale(-I)


def _derive(f, var):
    """Partial derivative of a polynomial element in variable index var."""
    acc = {}
    for k, c in f.terms.items():
        if k[var] == 0:
            continue
        k2 = list(k)
        k2[var] -= 1
        acc[tuple(k2)] = c.scale(k[var])
    return Element(f.algebra, acc)


class DiscreteAlgebra(Algebra):
    """Pointwise product of functions on a finite point set (commutative)."""

    kind = "discrete"
    finite = True
    commutative = True

    def __init__(self, points, degree_cap=DEFAULT_DEGREE_CAP):
        super().__init__(degree_cap)
        self.points = tuple(points)
        self._index = {p: i for i, p in enumerate(self.points)}
        if len(self._index) != len(self.points):
            raise ValueError("duplicate points")

    @property
    def name(self):
        return f"discrete({len(self.points)})"

    def descriptor(self):
        d = super().descriptor()
        d["points"] = [str(p) for p in self.points]
        return d

    def keys(self):
        return list(self.points)

    def key_to_json(self, key):
        return [key]

    def key_from_json(self, data):
        return data[0]

    def _product(self, a, b):
        return [(a, FormalScalar.one())] if a == b else []

    def classical_basis_product(self, a, b):
        return [(a, ONE)] if a == b else []

    def basis_involution(self, a):
        return [(a, ONE)]

    def unit_terms(self):
        one = FormalScalar.one()
        return {p: one for p in self.points}

    def function(self, values):
        """Element from a mapping point -> scalar (missing points are 0)."""
        return Element(self, {p: FormalScalar.coerce(v) for p, v in values.items()})

    def indicator(self, points):
        one = FormalScalar.one()
        return Element(self, {p: one for p in points})

    def multiply(self, f, g):
        self._check(f)
        self._check(g)
        small, large = (f, g) if len(f.terms) <= len(g.terms) else (g, f)
        return Element(self, {p: c * large.terms[p] for p, c in small.terms.items()
                              if p in large.terms})

    def classical_multiply(self, f, g):
        self._check(f)
        self._check(g)
        return Element(self, {p: FormalScalar.constant(c.coeffs[0] * g.terms[p].coeffs[0])
                              for p, c in f.terms.items() if p in g.terms})

    def classical_inverse(self, u):
        out = {}
        for p in self.points:
            c = u.terms.get(p)
            if c is None or c.coeffs[0].is_zero():
                raise NonInvertibleClassicalPart(f"function vanishes at point {p!r}")
            out[p] = FormalScalar.constant(c.coeffs[0].inverse())
        return Element(self, out)

    def unit_multiple(self, f0):
        vals = {f0.terms[p].coeffs[0] if p in f0.terms else ZERO for p in self.points}
        if len(vals) == 1 and f0.is_constant_series():
            return vals.pop()
        return None

    def exp_two_pi_i(self, w):
        if w is None:
            return self.unit()
        return Element(self, {p: FormalScalar.constant(_root_of_unity(_real_value(w, p)))
                              for p in self.points})

    def log_two_pi_i(self, u0):
        out = {}
        for p in self.points:
            c = u0.terms.get(p)
            if c is None:
                raise DomainRestriction(f"classical part vanishes at {p!r}")
            out[p] = FormalScalar.constant(_principal_winding(c.coeffs[0]))
        return Element(self, out)

    def random_element(self, rng, depth=2, hermitian=False, support=None):
        pts = self.points if support is None else support
        f = Element(self, {p: _random_series(rng, depth, complex_=not hermitian) for p in pts})
        return f

    def value(self, f, p):
        self._check(f)
        return f.terms.get(p, FormalScalar.zero())


def _real_value(w, p):
    c = w.terms.get(p)
    if c is None:
        return mpq(0)
    if not c.is_constant() or not c.coeffs[0].is_real():
        raise DomainRestriction("winding must be a classical real function")
    return c.coeffs[0].re


class MatrixUnits(Algebra):
    """The full matrix algebra M_k(C) (undeformed) with basis e_ij."""

    kind = "matrix"
    finite = True

    def __init__(self, k=2, degree_cap=DEFAULT_DEGREE_CAP):
        super().__init__(degree_cap)
        self.k = k

    @property
    def name(self):
        return f"matrix(k={self.k})"

    def keys(self):
        return [(i, j) for i in range(self.k) for j in range(self.k)]

    def _product(self, a, b):
        return [((a[0], b[1]), FormalScalar.one())] if a[1] == b[0] else []

    def classical_basis_product(self, a, b):
        return [((a[0], b[1]), ONE)] if a[1] == b[0] else []

    def basis_involution(self, a):
        return [((a[1], a[0]), ONE)]

    def unit_terms(self):
        one = FormalScalar.one()
        return {(i, i): one for i in range(self.k)}

    def from_rows(self, rows):
        """Element from a k x k grid of scalars."""
        return Element(self, {(i, j): FormalScalar.coerce(_coerce_entry(v))
                              for i, row in enumerate(rows) for j, v in enumerate(row)})

    def random_element(self, rng, depth=2, hermitian=False):
        f = Element(self, {k: _random_series(rng, depth) for k in self.keys()})
        if hermitian:
            f = (f + f.involution()).scale(mpq(1, 2))
        return f


def _coerce_entry(v):
    if isinstance(v, (FormalScalar, GaussRational)):
        return v
    return GaussRational.coerce(v)


class ScalarAlgebra(Algebra):
    """C[[lambda]] itself, as a one-dimensional algebra."""

    kind = "scalar"
    finite = True
    commutative = True
    KEY = ()

    @property
    def name(self):
        return "scalar"

    def keys(self):
        return [()]

    def _product(self, a, b):
        return [((), FormalScalar.one())]

    def classical_basis_product(self, a, b):
        return [((), ONE)]

    def basis_involution(self, a):
        return [((), ONE)]

    def unit_terms(self):
        return {(): FormalScalar.one()}

    def value(self, f):
        return f.terms.get((), FormalScalar.zero())

    def random_element(self, rng, depth=2, hermitian=False):
        return Element(self, {(): _random_series(rng, depth, complex_=not hermitian)})


class EquivalenceTransform:
    """T = id + sum_r lambda^r T_r with each T_r a C-linear map on the basis.

    ``maps`` is a dict r -> callable(key) -> list of (key, GaussRational).
    """

    def __init__(self, algebra, maps, name="T"):
        self.algebra = algebra
        self.maps = {r: m for r, m in maps.items() if r >= 1}
        self.name = name
        self._images = {}

    def _image(self, r, key):
        hit = self._images.get((r, key))
        if hit is None:
            hit = list(self.maps[r](key))
            self._images[(r, key)] = hit
        return hit

    def deviation(self, f):
        """D(f) = (T - id)(f)."""
        acc = {}
        order = get_order()
        for r in self.maps:
            if r > order:
                continue
            for k, c in f.terms.items():
                cr = c.shift(r)
                if cr.is_zero():
                    continue
                for k2, s in self._image(r, k):
                    term = cr.scale(s)
                    prev = acc.get(k2)
                    acc[k2] = term if prev is None else prev + term
        return Element(f.algebra, acc)

    def apply(self, f):
        return f + self.deviation(f)

    def inverse(self, f):
        term, acc = f, f
        for _ in range(get_order()):
            term = -self.deviation(term)
            if term.is_zero():
                break
            acc = acc + term
        return acc

    def is_star_compatible(self):
        """Check T(a*) = T(a)* on the basis of the underlying algebra."""
        for k in self.algebra.keys():
            e = self.algebra.monomial(k)
            for c in (ONE, I):
                a = e.scale(c)
                if self.apply(a.involution()) != self.apply(a).involution():
                    return False
        return True

    @classmethod
    def identity(cls, algebra):
        return cls(algebra, {}, name="id")


def sandwich_twist(k, h, base=None):
    """T = id + lambda (a -> h a h) on M_k; h a k x k grid of Q(i) entries."""
    base = base or MatrixUnits(k)
    hm = [[GaussRational.coerce(x) for x in row] for row in h]

    def t1(key):
        i, j = key
        out = []
        for a in range(k):
            for b in range(k):
                c = hm[a][i] * hm[j][b]
                if not c.is_zero():
                    out.append(((a, b), c))
        return out

    return EquivalenceTransform(base, {1: t1}, name="sandwich")


def lindblad_twist(k, h, base=None):
    """T = id + lambda (a -> h a h - {h^2, a}/2): unit preserving on M_k."""
    base = base or MatrixUnits(k)
    hm = [[GaussRational.coerce(x) for x in row] for row in h]
    h2 = [[sum((hm[i][m] * hm[m][j] for m in range(k)), ZERO) for j in range(k)]
          for i in range(k)]
    half = mpq(1, 2)

    def t1(key):
        i, j = key
        acc = defaultdict(lambda: ZERO)
        for a in range(k):
            for b in range(k):
                acc[(a, b)] += hm[a][i] * hm[j][b]
        for a in range(k):
            acc[(a, j)] -= h2[a][i] * half
        for b in range(k):
            acc[(i, b)] -= h2[j][b] * half
        return [(key2, c) for key2, c in acc.items() if not c.is_zero()]

    return EquivalenceTransform(base, {1: t1}, name="lindblad")


class TwistedAlgebra(Algebra):
    """a *' b = T^{-1}(T(a) * T(b)) for an equivalence transform T of base."""

    kind = "twisted"

    def __init__(self, base, transform, degree_cap=None):
        super().__init__(base.degree_cap if degree_cap is None else degree_cap)
        if transform.algebra is not base:
            raise AlgebraMismatch("transform acts on a different algebra")
        self.base = base
        self.transform = transform
        self.finite = base.finite
        self.commutative = False
        self.star_compatible = transform.is_star_compatible() if base.finite else True
        self._units = {}

    @property
    def name(self):
        return f"twisted({self.base.name},{self.transform.name})"

    def descriptor(self):
        d = super().descriptor()
        d["base"] = self.base.descriptor()
        d["star_compatible"] = self.star_compatible
        return d

    def keys(self):
        return self.base.keys()

    def key_to_json(self, key):
        return self.base.key_to_json(key)

    def key_from_json(self, data):
        return self.base.key_from_json(data)

    def to_base(self, f):
        self._check(f)
        return Element(self.base, f.terms)

    def from_base(self, f):
        return Element(self, f.terms)

    def _product(self, a, b):
        T = self.transform
        prod = T.apply(self.base.monomial(a)) * T.apply(self.base.monomial(b))
        return list(T.inverse(prod).terms.items())

    def classical_basis_product(self, a, b):
        return self.base.classical_basis_product(a, b)

    def basis_involution(self, a):
        return self.base.basis_involution(a)

    def unit_terms(self):
        order = get_order()
        hit = self._units.get(order)
        if hit is None:
            hit = self.transform.inverse(self.base.unit()).terms
            self._units[order] = hit
        return dict(hit)

    def random_element(self, rng, **kw):
        return self.from_base(self.base.random_element(rng, **kw))

    def from_rows(self, rows):
        return self.from_base(self.base.from_rows(rows))


def twist_algebra(base, T):
    """The algebra with product T^{-1}(T a * T b); warns via flag if not *-compatible."""
    A = TwistedAlgebra(base, T)
    if not A.star_compatible:
        import warnings
        warnings.warn(NotStarCompatible("T(a*) != T(a)* on the spanning set"))
    return A


def twisted_matrix(k=2, h=None, kind="lindblad"):
    """Shipped twisted matrix algebra: a nontrivial Hermitian deformation of M_k."""
    if h is None:
        h = [[1 if i == j or abs(i - j) == 1 else 0 for j in range(k)] for i in range(k)]
        h[k - 1][k - 1] = 0
    factory = lindblad_twist if kind == "lindblad" else sandwich_twist
    base = MatrixUnits(k)
    return TwistedAlgebra(base, factory(k, h, base))


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------

class Element:
    """Finite linear combination of basis keys with C[[lambda]] coefficients."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra, terms):
        self.algebra = algebra
        self.terms = {k: c for k, c in terms.items() if c is not None and not c.is_zero()}

    # -- ring protocol -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Element):
            s = _as_scalar(other)
            if s is None:
                return NotImplemented
            other = self.algebra.scalar(s)
        self.algebra._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            prev = out.get(k)
            out[k] = c if prev is None else prev + c
        return Element(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.algebra, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Element):
            s = _as_scalar(other)
            if s is None:
                return NotImplemented
            other = self.algebra.scalar(s)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Element):
            return self.algebra.multiply(self, other)
        s = _as_scalar(other)
        if s is None:
            return NotImplemented
        return self.scale(s)

    def __rmul__(self, other):
        s = _as_scalar(other)
        if s is None:
            return NotImplemented
        return self.scale(s)

    def scale(self, c):
        if isinstance(c, FormalScalar):
            return Element(self.algebra, {k: v * c for k, v in self.terms.items()})
        c = GaussRational.coerce(c)
        return Element(self.algebra, {k: v.scale(c) for k, v in self.terms.items()})

    def involution(self):
        return self.algebra.involution(self)

    def classical(self):
        """Element keeping only the lambda^0 coefficients."""
        return self.layer(0)

    def layer(self, r):
        """The coefficient of lambda^r, as a classical element."""
        return Element(self.algebra, {k: FormalScalar.constant(c.coeffs[r])
                                      for k, c in self.terms.items()
                                      if r < len(c.coeffs)})

    def classical_mul(self, other):
        return self.algebra.classical_multiply(self, other)

    def classical_inverse(self):
        return self.algebra.classical_inverse(self)

    def one(self):
        return self.algebra.unit()

    def zero(self):
        return self.algebra.zero()

    def is_zero(self):
        return not self.terms

    def valuation(self):
        vals = [c.valuation() for c in self.terms.values()]
        return min(vals) if vals else None

    def is_constant_series(self):
        return all(c.is_constant() for c in self.terms.values())

    def coefficient(self, key):
        return self.terms.get(key, FormalScalar.zero())

    def is_hermitian(self):
        return self == self.involution()

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.algebra is other.algebra and self.terms == other.terms
        s = _as_scalar(other)
        if s is None:
            return NotImplemented
        return self == self.algebra.scalar(s)

    __hash__ = None

    def first_difference(self, other):
        """Least lambda-order at which self and other differ (None if equal)."""
        return (self - other).valuation()

    def to_json(self):
        A = self.algebra
        return {"algebra": A.name,
                "terms": [{"monomial": A.key_to_json(k), "coeff": c.to_json()}
                          for k, c in sorted(self.terms.items(), key=lambda kc: repr(kc[0]))]}

    def __repr__(self):
        if not self.terms:
            return f"Element({self.algebra.name}: 0)"
        parts = [f"({c})·{k}" for k, c in sorted(self.terms.items(), key=lambda kc: repr(kc[0]))]
        return f"Element({self.algebra.name}: {' + '.join(parts)})"


def element_from_json(algebra, data):
    terms = {}
    for t in data["terms"]:
        terms[algebra.key_from_json(t["monomial"])] = FormalScalar.from_json(t["coeff"])
    return Element(algebra, terms)


# ---------------------------------------------------------------------------
# matrices over an algebra
# ---------------------------------------------------------------------------

class MatrixOverAlgebra:
    """rows x cols grid of elements of one algebra; product uses the star product."""

    __slots__ = ("algebra", "rows", "cols", "entries")

    def __init__(self, algebra, entries):
        self.algebra = algebra
        grid = [[_to_element(algebra, x) for x in row] for row in entries]
        self.rows = len(grid)
        self.cols = len(grid[0]) if grid else 0
        if any(len(row) != self.cols for row in grid):
            raise ValueError("ragged matrix")
        self.entries = tuple(tuple(row) for row in grid)

    @classmethod
    def identity(cls, algebra, n):
        one, zero = algebra.unit(), algebra.zero()
        return cls(algebra, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, algebra, rows, cols):
        z = algebra.zero()
        return cls(algebra, [[z] * cols for _ in range(rows)])

    @classmethod
    def from_scalars(cls, algebra, rows):
        """Matrix of scalar multiples of the unit."""
        return cls(algebra, [[algebra.scalar(_coerce_entry(x)) for x in row] for row in rows])

    @classmethod
    def block(cls, algebra, blocks):
        """Assemble a block matrix from a grid of MatrixOverAlgebra."""
        rows = []
        for brow in blocks:
            height = brow[0].rows
            for i in range(height):
                rows.append([x for b in brow for x in b.entries[i]])
        return cls(algebra, rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def submatrix(self, rows, cols):
        return MatrixOverAlgebra(self.algebra, [[self.entries[i][j] for j in cols] for i in rows])

    def _same_shape(self, other):
        if not isinstance(other, MatrixOverAlgebra) or other.algebra is not self.algebra:
            raise AlgebraMismatch("matrices over different algebras")
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def _square_scalar(self, s):
        if self.rows != self.cols:
            raise ValueError("scalar shift of a non-square matrix")
        return MatrixOverAlgebra.identity(self.algebra, self.rows).scale(s)

    def __add__(self, other):
        if not isinstance(other, MatrixOverAlgebra):
            s = _as_scalar(other)
            if s is None:
                return NotImplemented
            other = self._square_scalar(s)
        self._same_shape(other)
        return MatrixOverAlgebra(self.algebra, [[a + b for a, b in zip(ra, rb)]
                                                for ra, rb in zip(self.entries, other.entries)])

    __radd__ = __add__

    def __neg__(self):
        return MatrixOverAlgebra(self.algebra, [[-a for a in row] for row in self.entries])

    def __sub__(self, other):
        if not isinstance(other, MatrixOverAlgebra):
            s = _as_scalar(other)
            if s is None:
                return NotImplemented
            other = self._square_scalar(s)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _matmul(self, other, mul):
        if other.algebra is not self.algebra:
            raise AlgebraMismatch("matrices over different algebras")
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        zero = self.algebra.zero()
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if a.terms and b.terms:
                        acc = acc + mul(a, b)
                row.append(acc)
            out.append(row)
        return MatrixOverAlgebra(self.algebra, out)

    def __mul__(self, other):
        if isinstance(other, MatrixOverAlgebra):
            return self._matmul(other, self.algebra.multiply)
        if isinstance(other, Element):
            return self.map(lambda a: a * other)
        s = _as_scalar(other)
        if s is None:
            return NotImplemented
        return self.scale(s)

    def __rmul__(self, other):
        if isinstance(other, Element):
            return self.map(lambda a: other * a)
        s = _as_scalar(other)
        if s is None:
            return NotImplemented
        return self.scale(s)

    def map(self, fn):
        return MatrixOverAlgebra(self.algebra, [[fn(a) for a in row] for row in self.entries])

    def scale(self, c):
        return self.map(lambda a: a.scale(c))

    def involution(self):
        return MatrixOverAlgebra(self.algebra, [[self.entries[i][j].involution()
                                                 for i in range(self.rows)]
                                                for j in range(self.cols)])

    def transpose(self):
        return MatrixOverAlgebra(self.algebra, [[self.entries[i][j] for i in range(self.rows)]
                                                for j in range(self.cols)])

    def classical(self):
        return self.map(lambda a: a.classical())

    def layer(self, r):
        return self.map(lambda a: a.layer(r))

    def classical_mul(self, other):
        return self._matmul(other, self.algebra.classical_multiply)

    def classical_inverse(self):
        if self.rows != self.cols:
            raise NonInvertibleClassicalPart("non-square matrix")
        A = self.algebra
        n = self.rows
        if isinstance(A, DiscreteAlgebra):
            return self._pointwise_inverse()
        if A.finite:
            return self._flattened_inverse()
        consts = [[A.unit_multiple(e.classical()) for e in row] for row in self.entries]
        if any(c is None for row in consts for c in row):
            raise NonInvertibleClassicalPart("entries are not constant multiples of 1")
        from .linalg import qi_inverse
        try:
            inv = qi_inverse(consts)
        except SingularSystem as exc:
            raise NonInvertibleClassicalPart("constant matrix is singular") from exc
        return MatrixOverAlgebra.from_scalars(A, inv) if n else self

    def _pointwise_inverse(self):
        from .linalg import qi_inverse
        A, n = self.algebra, self.rows
        out = [[{} for _ in range(n)] for _ in range(n)]
        for p in A.points:
            m = [[self.entries[i][j].terms.get(p, FormalScalar.zero()).coeffs[0]
                  for j in range(n)] for i in range(n)]
            try:
                inv = qi_inverse(m)
            except SingularSystem as exc:
                raise NonInvertibleClassicalPart(f"matrix singular at point {p!r}") from exc
            for i in range(n):
                for j in range(n):
                    if not inv[i][j].is_zero():
                        out[i][j][p] = FormalScalar.constant(inv[i][j])
        return MatrixOverAlgebra(A, [[Element(A, out[i][j]) for j in range(n)] for i in range(n)])

    def _flattened_inverse(self):
        A, n = self.algebra, self.rows
        keys = A.keys()
        d = len(keys)
        index = {(i, j, k): (i * n + j) * d + t for i in range(n) for j in range(n)
                 for t, k in enumerate(keys)}
        size = n * n * d
        mat = [[ZERO] * size for _ in range(size)]
        c0 = self.classical()
        # column for unknown X_{mj} basis key kb: (M X)_{ij} gets M_{im} * e_kb
        for m in range(n):
            for j in range(n):
                for kb in keys:
                    col = index[(m, j, kb)]
                    eb = A.monomial(kb)
                    for i in range(n):
                        prod = A.classical_multiply(c0.entries[i][m], eb)
                        for k, c in prod.terms.items():
                            row = index[(i, j, k)]
                            mat[row][col] = mat[row][col] + c.coeffs[0]
        unit = A.unit().classical()
        rhs = [[ZERO] for _ in range(size)]
        for i in range(n):
            for k, c in unit.terms.items():
                rhs[index[(i, i, k)]][0] = c.coeffs[0]
        try:
            sol = qi_solve(mat, rhs)
        except SingularSystem as exc:
            raise NonInvertibleClassicalPart("matrix is classically singular") from exc
        out = [[Element(A, {k: FormalScalar.constant(sol[index[(i, j, k)]][0]) for k in keys})
                for j in range(n)] for i in range(n)]
        return MatrixOverAlgebra(A, out)

    def one(self):
        return MatrixOverAlgebra.identity(self.algebra, self.rows)

    def zero(self):
        return MatrixOverAlgebra.zeros(self.algebra, self.rows, self.cols)

    def is_zero(self):
        return all(e.is_zero() for row in self.entries for e in row)

    def valuation(self):
        vals = [e.valuation() for row in self.entries for e in row]
        vals = [v for v in vals if v is not None]
        return min(vals) if vals else None

    def trace(self):
        acc = self.algebra.zero()
        for i in range(min(self.rows, self.cols)):
            acc = acc + self.entries[i][i]
        return acc

    def is_hermitian(self):
        return self == self.involution()

    def __eq__(self, other):
        if not isinstance(other, MatrixOverAlgebra):
            return NotImplemented
        return (self.algebra is other.algebra and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    __hash__ = None

    def to_json(self):
        return {"algebra": self.algebra.name, "rows": self.rows, "cols": self.cols,
                "entries": [[e.to_json() for e in row] for row in self.entries]}

    def __repr__(self):
        return f"MatrixOverAlgebra({self.rows}x{self.cols} over {self.algebra.name})"


def _to_element(algebra, x):
    if isinstance(x, Element):
        algebra._check(x)
        return x
    s = _as_scalar(x)
    if s is None:
        raise TypeError(f"cannot use {x!r} as a matrix entry")
    return algebra.scalar(s)


def matrix_from_json(algebra, data):
    return MatrixOverAlgebra(algebra, [[element_from_json(algebra, e) for e in row]
                                       for row in data["entries"]])


# ---------------------------------------------------------------------------
# star calculus
# ---------------------------------------------------------------------------

def _algebra_of(x):
    return x.algebra


def star_product(A, f, g):
    """f * g in the algebra A (A may be None to infer it)."""
    if A is not None and f.algebra is not A:
        raise AlgebraMismatch("first factor lives in another algebra")
    return f * g


def involution(A, f):
    if A is not None and f.algebra is not A:
        raise AlgebraMismatch("element lives in another algebra")
    return f.involution()


def _sample(A, rng, hermitian=False, **kw):
    return A.random_element(rng, hermitian=hermitian, **kw)


def check_associativity(A, sample_count=100, seed=0, **kw):
    """Replay (f*g)*h = f*(g*h) on random triples."""
    rng = random.Random(seed)
    report = CheckReport(f"associativity[{A.name}]")
    for s in range(sample_count):
        f, g, h = (_sample(A, rng, **kw) for _ in range(3))
        lhs, rhs = (f * g) * h, f * (g * h)
        report.samples += 1
        if lhs != rhs:
            report.fail(sample=s, first_order=lhs.first_difference(rhs),
                        f=f.to_json(), g=g.to_json(), h=h.to_json())
            break
    return report


def check_hermitian(A, sample_count=100, seed=0, **kw):
    """Replay (f*g)* = g* * f* on random pairs."""
    rng = random.Random(seed)
    report = CheckReport(f"hermitian[{A.name}]")
    for s in range(sample_count):
        f, g = _sample(A, rng, **kw), _sample(A, rng, **kw)
        lhs, rhs = (f * g).involution(), g.involution() * f.involution()
        report.samples += 1
        if lhs != rhs:
            report.fail(sample=s, first_order=lhs.first_difference(rhs),
                        f=f.to_json(), g=g.to_json())
            break
    return report


def check_unit(A, sample_count=20, seed=0, **kw):
    rng = random.Random(seed)
    one = A.unit()
    report = CheckReport(f"unit[{A.name}]")
    for s in range(sample_count):
        f = _sample(A, rng, **kw)
        report.samples += 1
        if one * f != f or f * one != f:
            report.fail(sample=s, f=f.to_json())
            break
    return report


def power_series(x, coeffs):
    """sum_k coeffs(k) x^k for x = O(lambda); terminates at the truncation order."""
    if x.valuation() is not None and x.valuation() == 0:
        raise NonNilpotentInput("series argument has a nonzero classical part")
    acc = x.one().scale(coeffs(0))
    term = x.one()
    for k in range(1, get_order() + 1):
        term = term * x
        if term.is_zero():
            break
        c = coeffs(k)
        if c != 0:
            acc = acc + term.scale(c)
    return acc


def star_inverse(A, u):
    """Two-sided star inverse by inverting the classical part and a Neumann series."""
    if A is not None and _algebra_of(u) is not A:
        raise AlgebraMismatch("element lives in another algebra")
    v0 = u.classical_inverse()
    e = u.one() - u * v0
    return v0 * power_series(e, lambda k: 1)


def binomial_series(X, alpha):
    """(1 + X)^alpha for X = O(lambda)."""
    alpha = rational(alpha)
    if X.valuation() == 0:
        raise NonNilpotentInput("X must vanish at lambda = 0")
    return power_series(X, lambda k: binomial(alpha, k))


def binomial_invsqrt(A, X):
    """(1 + X)^{-1/2} = sum_k binom(-1/2, k) X^k for X = O(lambda)."""
    if A is not None and _algebra_of(X) is not A:
        raise AlgebraMismatch("element lives in another algebra")
    return binomial_series(X, mpq(-1, 2))


def binomial_sqrt(A, X):
    return binomial_series(X, mpq(1, 2))


def _exp_tail(t):
    fact = [1]
    for k in range(1, get_order() + 1):
        fact.append(fact[-1] * k)
    return power_series(t, lambda k: mpq(1, fact[k]))


def _log_one_plus(x):
    return power_series(x, lambda k: 0 if k == 0 else mpq((-1) ** (k + 1), k))


class LogValue:
    """Logarithm 2 pi i * winding + tail.

    ``winding`` is a classical central element with rational values (or None
    for 0); ``tail`` vanishes at lambda = 0.  exp(2 pi i q) is exact in Q(i)
    exactly when 4q is an integer.
    """

    __slots__ = ("winding", "tail")

    def __init__(self, winding, tail):
        if tail.valuation() == 0:
            raise DomainRestriction("logarithm tail must vanish at lambda = 0")
        self.winding = None if winding is None or winding.is_zero() else winding
        self.tail = tail

    def __neg__(self):
        return LogValue(None if self.winding is None else -self.winding, -self.tail)

    def winding_or_zero(self):
        w = self.winding
        if w is not None:
            return w
        A = self.tail.algebra
        return A.zero()

    def __eq__(self, other):
        if not isinstance(other, LogValue):
            return NotImplemented
        return self.winding_or_zero() == other.winding_or_zero() and self.tail == other.tail

    __hash__ = None

    def to_json(self):
        return {"winding": None if self.winding is None else self.winding.to_json(),
                "tail": self.tail.to_json()}

    def __repr__(self):
        return f"LogValue(winding={self.winding!r}, tail={self.tail!r})"


def _as_log(t):
    if isinstance(t, LogValue):
        return t
    if t.valuation() == 0:
        raise DomainRestriction(
            "classical part must be 2 pi i times a rational central element")
    return LogValue(None, t)


def star_exp(A, t):
    """Exp(t) = exp(2 pi i w) * sum_k t'^k / k!."""
    t = _as_log(t)
    out = _exp_tail(t.tail)
    if t.winding is not None:
        if not isinstance(t.tail, Element):
            raise DomainRestriction("windings are supported for algebra elements only")
        out = t.tail.algebra.exp_two_pi_i(t.winding) * out
    return out


def star_log(A, u):
    """Principal logarithm: winding in (-1/2, 1/2] plus a lambda-tail."""
    if isinstance(u, Element):
        alg = u.algebra
        w = alg.log_two_pi_i(u.classical())
        v = alg.exp_two_pi_i(-w) * u
        return LogValue(w, _log_one_plus(v - v.one()))
    x = u - u.one()
    if x.valuation() == 0:
        raise DomainRestriction("classical part of a matrix argument must be 1")
    return LogValue(None, _log_one_plus(x))


def bch_compose(A, s, t):
    """A logarithm of Exp(s) * Exp(t); windings (central) add."""
    s, t = _as_log(s), _as_log(t)
    prod = _exp_tail(s.tail) * _exp_tail(t.tail)
    tail = _log_one_plus(prod - prod.one())
    if s.winding is None:
        w = t.winding
    elif t.winding is None:
        w = s.winding
    else:
        w = s.winding + t.winding
    return LogValue(w, tail)


def random_hermitian_projection(rng, k, rank=1):
    """Classical Hermitian projection onto the span of random Q(i) vectors.

    Returned as a k x k grid of GaussRationals (Gram-Schmidt over Q(i)).
    """
    vecs = []
    while len(vecs) < rank:
        v = [_random_gauss(rng) for _ in range(k)]
        for u in vecs:
            nu = sum((a.conj() * a for a in u), ZERO)
            c = sum((a.conj() * b for a, b in zip(u, v)), ZERO) / nu
            v = [b - c * a for a, b in zip(u, v)]
        if sum((a.conj() * a for a in v), ZERO).is_zero():
            continue
        vecs.append(v)
    P = [[ZERO] * k for _ in range(k)]
    for u in vecs:
        nu = sum((a.conj() * a for a in u), ZERO)
        for i in range(k):
            for j in range(k):
                P[i][j] = P[i][j] + u[i] * u[j].conj() / nu
    return P


class UndeformedAlgebra(Algebra):
    """The lambda = 0 product of an algebra, on the same basis keys."""

    kind = "undeformed"

    def __init__(self, deformed):
        super().__init__(deformed.degree_cap)
        self.deformed = deformed
        self.finite = deformed.finite
        self.commutative = deformed.commutative
        if hasattr(deformed, "nvars"):
            self.nvars = deformed.nvars

    @property
    def name(self):
        return f"classical({self.deformed.name})"

    def keys(self):
        return self.deformed.keys()

    def key_to_json(self, key):
        return self.deformed.key_to_json(key)

    def key_from_json(self, data):
        return self.deformed.key_from_json(data)

    def _product(self, a, b):
        return [(k, FormalScalar.constant(c)) for k, c in
                self.deformed.classical_basis_product(a, b)]

    def classical_basis_product(self, a, b):
        return self.deformed.classical_basis_product(a, b)

    def basis_involution(self, a):
        return self.deformed.basis_involution(a)

    def unit_terms(self):
        return self.deformed.unit().classical().terms

    def lift(self, a):
        return Element(self.deformed, a.terms)

    def lower(self, a):
        return Element(self, a.terms)

    def random_element(self, rng, **kw):
        return self.lower(self.deformed.random_element(rng, **kw).classical())


_UNDEFORMED = {}


def undeformed(A):
    hit = _UNDEFORMED.get(id(A))
    if hit is None or hit.deformed is not A:
        hit = UndeformedAlgebra(A)
        _UNDEFORMED[id(A)] = hit
    return hit
