"""Positive functionals, Gram matrices and positivity certificates.

A functional is stored by its values on basis keys and extended
C[[lambda]]-linearly.  Positivity on a finite test subspace is decided by the
graded LDL* factorization of the Gram matrix (see :mod:`starrep.linalg`),
which yields one of four certificates:

``graded_diagonal``
    P G P^T = L D L* with D = diag(lambda^{k_i} u_i), u_i positive units, or 0.
``gram_factorization``
    G = B* W B with W a diagonal of positive rationals; only available when
    every pivot is a unit (classically positive definite Gram).
``witness_negative``
    a vector v with sign(v* G v) = negative.
``unknown``
    no decision (non-Hermitian data, or a deformation that was not corrected).
"""

from dataclasses import dataclass, field

from .errors import NonPositiveCoefficient, UncertifiedFunctional
from .linalg import (fs_dagger, fs_equal, fs_matmul, fs_zero_matrix,
                     graded_ldl, ldl_reconstruct)
from .report import CheckReport
from .scalars import (FormalScalar, GaussRational, Sign, is_positive,
                      rational_str, series_sqrt)
from .staralg import Element


class LinearFunctional:
    """omega(sum_k c_k e_k) = sum_k c_k omega(e_k), values on basis keys."""

    def __init__(self, algebra, values, name="omega"):
        self.algebra = algebra
        self.values = {k: FormalScalar.coerce(v) for k, v in values.items()}
        self.values = {k: v for k, v in self.values.items() if not v.is_zero()}
        self.name = name

    def __call__(self, a):
        if a.algebra is not self.algebra:
            self.algebra._check(a)
        acc = FormalScalar.zero()
        for k, c in a.terms.items():
            v = self.values.get(k)
            if v is not None:
                acc = acc + c * v
        return acc

    @property
    def basis(self):
        return [self.algebra.monomial(k) for k in self.values]

    def rebase(self, algebra):
        """The same values, read as a functional on another algebra with the same keys."""
        return LinearFunctional(algebra, self.values, self.name)

    def to_json(self):
        return {"name": self.name,
                "basis": [b.to_json() for b in self.basis],
                "values": [self.values[k].to_json() for k in self.values]}

    def __repr__(self):
        return f"LinearFunctional({self.name} on {self.algebra.name})"


def evaluation_at_origin(algebra, name="delta0"):
    """Polynomial evaluation at 0: the coefficient of the constant monomial."""
    return LinearFunctional(algebra, {tuple([0] * algebra.nvars): 1}, name)


def trace_functional(algebra, normalize=False, name="trace"):
    """Classical trace sum_i e_ii on a (twisted) matrix algebra."""
    k = getattr(algebra, "k", None) or getattr(algebra.base, "k")
    c = GaussRational(1) / k if normalize else GaussRational(1)
    return LinearFunctional(algebra, {(i, i): c for i in range(k)}, name)


def point_evaluation(algebra, point, name=None):
    return LinearFunctional(algebra, {point: 1}, name or f"eval[{point}]")


def gram_matrix(omega, basis):
    """G_jk = omega(b_j* b_k)."""
    stars = [b.involution() for b in basis]
    n = len(basis)
    G = fs_zero_matrix(n, n)
    for j in range(n):
        for k in range(n):
            G[j][k] = omega(stars[j] * basis[k])
    return G


@dataclass
class PositivityCertificate:
    kind: str
    gram: list
    data: dict = field(default_factory=dict)

    @property
    def status(self):
        return {"graded_diagonal": "positive", "gram_factorization": "positive",
                "witness_negative": "negative"}.get(self.kind, "unknown")

    @property
    def positive(self):
        return self.status == "positive"

    def verify(self):
        """Replay the certificate against the stored Gram matrix."""
        G = self.gram
        if self.kind == "graded_diagonal":
            return fs_equal(ldl_reconstruct(self.data["ldl"], len(G)), G) and all(
                is_positive(d) is Sign.POSITIVE for d in self.data["ldl"].diag)
        if self.kind == "gram_factorization":
            B, w = self.data["B"], self.data["weights"]
            W = fs_zero_matrix(len(w), len(w))
            for i, x in enumerate(w):
                W[i][i] = FormalScalar.constant(x)
            return all(x.re > 0 for x in w) and fs_equal(
                fs_matmul(fs_matmul(fs_dagger(B), W), B), G)
        if self.kind == "witness_negative":
            v = self.data["vector"]
            col = [[x] for x in v]
            norm = fs_matmul(fs_matmul(fs_dagger(col), G), col)[0][0]
            return is_positive(norm) is Sign.NEGATIVE
        return False

    def to_json(self):
        out = {"kind": self.kind, "status": self.status,
               "gram": [[x.to_json() for x in row] for row in self.gram]}
        if self.kind == "graded_diagonal":
            ldl = self.data["ldl"]
            out["perm"] = ldl.perm
            out["diag"] = [d.to_json() for d in ldl.diag]
            out["lower"] = [[x.to_json() for x in row] for row in ldl.lower]
        elif self.kind == "gram_factorization":
            out["B"] = [[x.to_json() for x in row] for row in self.data["B"]]
            out["weights"] = [rational_str(x.re) for x in self.data["weights"]]
        elif self.kind == "witness_negative":
            out["vector"] = [x.to_json() for x in self.data["vector"]]
            out["norm"] = self.data["norm"].to_json()
        if "note" in self.data:
            out["note"] = self.data["note"]
        return out


def _factorization(G, ldl):
    """G = B* W B from a graded LDL* whose pivots are all units."""
    n = len(G)
    B = fs_zero_matrix(n, n)
    weights = []
    # P G P^T = L D L*  =>  G = (L^T-rows permuted back)...; build B = S L* P
    for k in range(n):
        d = ldl.diag[k]
        w = d.coeffs[0]
        s = series_sqrt(d.scale(w.inverse()))
        weights.append(w)
        for a in range(n):
            # row k of L* is conj of column k of L
            entry = ldl.lower[a][k].conj()
            if not entry.is_zero():
                B[k][ldl.perm[a]] = s * entry
    return B, weights


def certify_gram(G, allow_factorization=True):
    """Certificate trichotomy for a Hermitian Gram matrix over C[[lambda]]."""
    ldl = graded_ldl(G)
    if ldl.status == "non_hermitian":
        return PositivityCertificate("unknown", G, {"note": "Gram matrix is not Hermitian"})
    if ldl.status == "negative":
        return PositivityCertificate("witness_negative", G,
                                     {"vector": ldl.witness, "norm": ldl.witness_norm})
    n = len(G)
    if allow_factorization and ldl.pivots == n and all(
            d.valuation() == 0 for d in ldl.diag):
        B, w = _factorization(G, ldl)
        return PositivityCertificate("gram_factorization", G,
                                     {"B": B, "weights": w, "ldl": ldl})
    return PositivityCertificate("graded_diagonal", G, {"ldl": ldl})


def is_positive_functional(omega, basis, allow_factorization=True):
    """Decide positivity of omega on span(basis) via its Gram matrix."""
    cert = certify_gram(gram_matrix(omega, basis), allow_factorization)
    cert.data["basis"] = basis
    if cert.kind == "witness_negative":
        a = omega.algebra.zero()
        for c, b in zip(cert.data["vector"], basis):
            a = a + b.scale(c)
        cert.data["element"] = a
    return cert


def witness_element(cert):
    return cert.data.get("element")


def cauchy_schwarz_check(omega, a, b, certificate=None):
    """|omega(a* b)|^2 <= omega(a* a) omega(b* b) in the order of R[[lambda]]."""
    if certificate is None:
        certificate = is_positive_functional(omega, [a, b])
    if not certificate.positive:
        raise UncertifiedFunctional(f"{omega.name} is not certified positive on span(a, b)")
    ab = omega(a.involution() * b)
    lhs = ab * ab.conj()
    rhs = omega(a.involution() * a) * omega(b.involution() * b)
    return is_positive(rhs - lhs) is not Sign.NEGATIVE


def check_reality(omega, basis):
    """omega(a*) = conj(omega(a)) on the given spanning set."""
    report = CheckReport(f"reality[{omega.name}]")
    for b in basis:
        report.samples += 1
        if omega(b.involution()) != omega(b).conj():
            report.fail(element=b.to_json())
    return report


def in_positive_cone(a):
    """Membership in A^+ (omega(a) >= 0 for *every* positive functional).

    Not finitely decidable in this generality; only A^{++} membership by
    certificate (:func:`algebraically_positive`) is supported.
    """
    raise NotImplementedError("A^+ membership quantifies over all positive functionals; "
                              "use algebraically_positive for certified A^{++} membership")


@dataclass
class AlgebraicPositivity:
    """A = sum_i b_i B_i* B_i with each b_i > 0; replayable."""

    terms: list

    def assemble(self):
        A = self.terms[0][1].algebra
        acc = A.zero()
        for b, B in self.terms:
            acc = acc + (B.involution() * B).scale(b)
        return acc

    def verify(self, element):
        return all(is_positive(b) is Sign.POSITIVE for b, _ in self.terms) and \
            self.assemble() == element

    def to_json(self):
        return {"terms": [{"coeff": b.to_json(), "element": B.to_json()} for b, B in self.terms]}


def algebraically_positive(terms, functionals=()):
    """Assemble sum b_i B_i* B_i; evaluate against registered functionals.

    Returns (element, certificate, report).  The report lists the sign of
    every registered functional on the element.
    """
    terms = [(FormalScalar.coerce(b), B) for b, B in terms]
    if not terms:
        raise ValueError("at least one term is required")
    for b, _ in terms:
        if not b.is_real() or is_positive(b) is not Sign.POSITIVE:
            raise NonPositiveCoefficient(f"coefficient {b} is not positive")
    cert = AlgebraicPositivity(terms)
    element = cert.assemble()
    report = CheckReport("algebraically_positive")
    for omega in functionals:
        report.samples += 1
        value = omega(element)
        if not value.is_real() or is_positive(value) is Sign.NEGATIVE:
            report.fail(functional=omega.name, value=value.to_json())
    return element, cert, report


def deform_functional(omega0, deformed, basis):
    """lambda-linear extension of a classical functional, with a certificate.

    No higher corrections omega_r are searched: if the extension is not
    certified positive the outcome is ``unknown`` (the negative witness, if
    any, is kept in the certificate data).
    """
    omega = LinearFunctional(deformed, {k: FormalScalar.constant(v.coeffs[0])
                                        for k, v in omega0.values.items()},
                             name=omega0.name)
    basis = [Element(deformed, b.terms) if b.algebra is not deformed else b for b in basis]
    cert = is_positive_functional(omega, basis)
    if cert.kind == "witness_negative":
        data = dict(cert.data)
        data["note"] = "lambda-linear extension has a negative direction; corrections not searched"
        cert = PositivityCertificate("unknown", cert.gram, data)
    return omega, cert
