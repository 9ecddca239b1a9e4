"""The GNS construction for a positive functional on a finitely spanned subspace.

Given omega and a spanning list b_1..b_m, the Gram matrix G_jk = omega(b_j* b_k)
is factored with graded pivots.  The pivot elements b_p give the carrier basis
psi_{b_p}; every other b_n is reduced to its coordinates

    Q(a) = G_pp^{-1} [omega(b_p* a)]_p

and the null combinations b_n - sum_p Q(b_n)_p b_p span the Gel'fand ideal.
The action is pi(a) psi_{b_q} = Q(a b_q), computed straight from omega, so the
products a b_q never have to be re-expanded in the spanning list.  This
presupposes that the pivot vectors span the whole quotient A / J, which holds
for the shipped fixtures (for Wick: the pure-z monomials of degree <= N).

Membership in J is decided by the graded pivot rule, which is valid modulo
lambda^(N+1) and stable under raising N.
"""

from dataclasses import dataclass, field

from .errors import DegenerateGrading
from .linalg import (fs_kernel, fs_matmul, graded_ldl, graded_solve)
from .positivity import gram_matrix
from .prehilbert import Operator, PreHilbertModule, Representation
from .report import CheckReport
from .scalars import FormalScalar


@dataclass
class GNSData:
    functional: object
    basis: list
    gram: list
    pivots: list
    ideal: list
    carrier: PreHilbertModule
    representation: Representation = None
    cyclic: list = None
    _ldl: object = field(default=None, repr=False)

    @property
    def algebra(self):
        return self.functional.algebra

    def _pairing_row(self, key):
        """[omega(b_p* e_key)]_p, cached: a -> omega(b_p* a) is C[[lambda]]-linear."""
        cache = self.__dict__.setdefault("_pairing_cache", {})
        row = cache.get(key)
        if row is None:
            omega, A = self.functional, self.algebra
            e = A.monomial(key)
            row = [omega(self.basis[p].involution() * e) for p in self.pivots]
            cache[key] = row
        return row

    def pairings(self, elements):
        """[omega(b_p* a)]_p for each a, as a (pivots x len(elements)) matrix."""
        zero = FormalScalar.zero()
        out = [[zero] * len(elements) for _ in self.pivots]
        for col, a in enumerate(elements):
            for key, c in a.terms.items():
                for row, v in enumerate(self._pairing_row(key)):
                    if not v.is_zero():
                        out[row][col] = out[row][col] + c * v
        return out

    def coordinates(self, elements):
        """Q(a) for a list of elements, as columns of a matrix."""
        if not self.pivots:
            return []
        return graded_solve(self.carrier.gram, self.pairings(elements), self._ldl)

    def vector(self, a):
        return [row[0] for row in self.coordinates([a])] if self.pivots else []

    def action(self, a):
        prods = [a * self.basis[q] for q in self.pivots]
        mat = self.coordinates(prods)
        return Operator(mat, self.carrier, self.carrier)

    def to_json(self):
        rep = self.representation
        return {
            "functional": self.functional.to_json(),
            "basis": [b.to_json() for b in self.basis],
            "pivots": [self.basis[p].to_json() for p in self.pivots],
            "ideal": [j.to_json() for j in self.ideal],
            "gram": [[x.to_json() for x in row] for row in self.carrier.gram],
            "cyclic": None if self.cyclic is None else [x.to_json() for x in self.cyclic],
            "action": [] if rep is None or rep.spanning is None else
            [{"element": a.to_json(), "matrix": rep(a).to_json()} for a in rep.spanning],
        }


def _factor(omega, basis):
    G = gram_matrix(omega, basis)
    ldl = graded_ldl(G)
    if ldl.status != "positive":
        raise DegenerateGrading(
            f"graded pivoting failed ({ldl.status}); {omega.name} is not certified positive")
    return G, ldl


def _ideal(omega, basis, G, ldl):
    pivots = sorted(ldl.pivot_indices)
    if not pivots:
        return pivots, list(basis), None
    Gpp = [[G[i][j] for j in pivots] for i in pivots]
    sub = graded_ldl(Gpp)
    nulls = [n for n in range(len(basis)) if n not in pivots]
    coords = graded_solve(Gpp, [[G[p][n] for n in nulls] for p in pivots], sub) if nulls else []
    ideal = []
    for col, n in enumerate(nulls):
        j = basis[n]
        for row, p in enumerate(pivots):
            c = coords[row][col]
            if not c.is_zero():
                j = j - basis[p].scale(c)
        ideal.append(j)
    return pivots, ideal, sub


def gelfand_ideal(omega, basis, check_generators=None):
    """Basis of J_omega within span(basis), plus a left-ideal closure report."""
    G, ldl = _factor(omega, basis)
    pivots, ideal, _ = _ideal(omega, basis, G, ldl)
    report = CheckReport(f"left_ideal[{omega.name}]")
    gens = check_generators if check_generators is not None else []
    stars = [basis[p].involution() for p in pivots]
    for g in gens:
        for j in ideal:
            gj = g * j
            report.samples += 1
            if any(not omega(s * gj).is_zero() for s in stars):
                report.fail(generator=g.to_json(), ideal_element=j.to_json())
    return ideal, report


def gns_representation(omega, basis, spanning=None):
    """GNS data: carrier on the pivot elements, pi(a) psi_b = psi_{a b}."""
    G, ldl = _factor(omega, basis)
    pivots, ideal, sub = _ideal(omega, basis, G, ldl)
    gram = [[G[i][j] for j in pivots] for i in pivots]
    carrier = PreHilbertModule(gram, name=f"H[{omega.name}]")
    data = GNSData(omega, list(basis), G, pivots, ideal, carrier, _ldl=sub)
    A = omega.algebra
    spanning = list(spanning) if spanning is not None else list(basis)
    data.representation = Representation(A, carrier, data.action, spanning,
                                         name=f"pi[{omega.name}]")
    try:
        one = A.unit()
    except NotImplementedError:
        one = None
    if one is not None:
        data.cyclic = data.vector(one)
    return data


def verify_gns(data, spanning=None):
    """Replay omega(a) = <psi_1, pi(a) psi_1> and cyclicity of psi_1."""
    pi = data.representation
    spanning = spanning if spanning is not None else pi.spanning
    H = data.carrier
    report = CheckReport(f"gns[{data.functional.name}]")
    psi = data.cyclic
    for a in spanning:
        report.samples += 1
        image = pi(a).apply(psi)
        if H.inner(psi, image) != data.functional(a):
            report.fail(check="expectation", element=a.to_json())
    # cyclicity: pi(b_p) psi_1 = psi_{b_p} reproduces every carrier generator
    one = data.algebra.unit()
    for k, p in enumerate(data.pivots):
        report.samples += 1
        v = data.vector(data.basis[p] * one)
        e = H.basis_vector(k)
        diff = [x - y for x, y in zip(v, e)]
        if any(not H.inner(H.basis_vector(i), diff).is_zero() for i in range(H.dim)):
            report.fail(check="cyclic", element=data.basis[p].to_json())
    return report


def well_defined_check(data, samples=None):
    """omega(B* C) is unchanged when B, C are perturbed by ideal elements."""
    omega = data.functional
    report = CheckReport(f"well_defined[{omega.name}]")
    basis = samples if samples is not None else [data.basis[p] for p in data.pivots]
    for b in basis:
        for c in basis:
            base = omega(b.involution() * c)
            for j in data.ideal:
                report.samples += 1
                if omega((b + j).involution() * (c + j)) != base:
                    report.fail(b=b.to_json(), c=c.to_json(), ideal_element=j.to_json())
    return report


def kernel_intersection(datas, spanning):
    """Upper bound for J_min: the common kernel of the listed GNS representations.

    Returns (kernel elements, verdict).  An empty list of representations
    yields the whole span (empty intersection convention).
    """
    m = len(spanning)
    if not datas:
        return list(spanning), "whole_span"
    rows = []
    for data in datas:
        H = data.carrier
        if H.dim == 0:
            continue
        ops = [data.representation(a) for a in spanning]
        mats = [fs_matmul(H.gram, op.matrix) for op in ops]
        for p in range(H.dim):
            for q in range(H.dim):
                rows.append([mats[i][p][q] for i in range(m)])
    kernel = fs_kernel(rows, m) if rows else [
        [FormalScalar.one() if i == j else FormalScalar.zero() for i in range(m)]
        for j in range(m)]
    A = spanning[0].algebra
    elements = []
    for vec in kernel:
        acc = A.zero()
        for c, b in zip(vec, spanning):
            acc = acc + b.scale(c)
        elements.append(acc)
    verdict = "sufficiently_many_witnessed" if not elements else "nontrivial_kernel"
    return elements, verdict
