"""Exact linear algebra over Q(i) and over C[[lambda]] (truncated).

Matrices are plain lists of rows.  Over Q(i) entries are
:class:`~starrep.scalars.GaussRational`; over C[[lambda]] they are
:class:`~starrep.scalars.FormalScalar`.

The central routine is :func:`graded_ldl`, a Hermitian LDL* factorization
with lambda-graded pivoting: at each step the remaining diagonal entry of
least lambda-valuation is used as pivot, so the elimination never divides by
more powers of lambda than the pivot column carries.  The factorization is
exact modulo ``lambda**(N+1)``.
"""

from dataclasses import dataclass

from .errors import NotAdjointable, NotDivisible, SingularSystem
from .scalars import (ONE, ZERO, FormalScalar, GaussRational, Sign,
                      get_order, is_positive, series_invert)

# ---------------------------------------------------------------------------
# Q(i)
# ---------------------------------------------------------------------------


def qi_identity(n):
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def qi_matmul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = [[ZERO] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            x = ai[k]
            if x.is_zero():
                continue
            bk = b[k]
            for j in range(cols):
                y = bk[j]
                if not y.is_zero():
                    oi[j] = oi[j] + x * y
    return out


def qi_dagger(a):
    if not a:
        return []
    return [[a[i][j].conj() for i in range(len(a))] for j in range(len(a[0]))]


def qi_rref(a):
    """Reduced row echelon form; returns (rref, pivot_columns)."""
    m = [list(row) for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if not m[i][c].is_zero()), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def qi_rank(a):
    return len(qi_rref(a)[1])


def qi_solve(a, b):
    """Solve a x = b exactly (a square or tall with full column rank).

    ``b`` is a matrix (list of rows).  Raises SingularSystem if there is no
    solution or the solution is not unique.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    nb = len(b[0]) if b else 0
    aug = [list(a[i]) + list(b[i]) for i in range(rows)]
    red, pivots = qi_rref(aug)
    if any(p >= cols for p in pivots):
        raise SingularSystem("inconsistent linear system over Q(i)")
    if len(pivots) < cols:
        raise SingularSystem("linear system over Q(i) is not uniquely solvable")
    return [red[i][cols:cols + nb] for i in range(cols)]


def qi_inverse(a):
    return qi_solve(a, qi_identity(len(a)))


def qi_nullspace(a):
    """Basis of {x : a x = 0} as a list of column vectors (lists)."""
    cols = len(a[0]) if a else 0
    red, pivots = qi_rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * cols
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -red[i][f]
        basis.append(v)
    return basis


def qi_left_inverse(a):
    """A left inverse L (L a = 1) of a matrix with full column rank."""
    ah = qi_dagger(a)
    gram = qi_matmul(ah, a)
    return qi_matmul(qi_inverse(gram), ah)


# ---------------------------------------------------------------------------
# C[[lambda]]
# ---------------------------------------------------------------------------


def fs_zero_matrix(rows, cols, order=None):
    z = FormalScalar.zero(order)
    return [[z] * cols for _ in range(rows)]


def fs_identity(n, order=None):
    z, o = FormalScalar.zero(order), FormalScalar.one(order)
    return [[o if i == j else z for j in range(n)] for i in range(n)]


def fs_matmul(a, b):
    rows = len(a)
    inner = len(b)
    cols = len(b[0]) if b else 0
    if rows == 0 or cols == 0:
        return [[] for _ in range(rows)]
    z = FormalScalar.zero(a[0][0].order if a and a[0] else None) if inner else FormalScalar.zero()
    out = [[z] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            x = ai[k]
            if x.is_zero():
                continue
            bk = b[k]
            for j in range(cols):
                y = bk[j]
                if not y.is_zero():
                    oi[j] = oi[j] + x * y
    return out


def fs_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def fs_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def fs_scale(a, c):
    return [[x * c for x in row] for row in a]


def fs_dagger(a):
    if not a:
        return []
    return [[a[i][j].conj() for i in range(len(a))] for j in range(len(a[0]))]


def fs_equal(a, b):
    return len(a) == len(b) and all(
        len(ra) == len(rb) and all(x == y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def fs_is_zero(a):
    return all(x.is_zero() for row in a for x in row)


def fs_classical(a):
    return [[x.coeffs[0] for x in row] for row in a]


def fs_from_qi(a, order=None):
    return [[FormalScalar.constant(x, order) for x in row] for row in a]


def fs_column(vec):
    return [[x] for x in vec]


def fs_flatten_column(col):
    return [row[0] for row in col]


def fs_is_hermitian(a):
    n = len(a)
    return all(a[i][j] == a[j][i].conj() for i in range(n) for j in range(n))


def fs_solve_series(a, b):
    """Solve a x = b over C[[lambda]] when a has classically full column rank.

    Order-by-order: x_r = L0 (b_r - sum_{s>=1} a_s x_{r-s}) with L0 a left
    inverse of the classical part.  Raises SingularSystem if the system is
    inconsistent at some order.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    nb = len(b[0]) if b else 0
    order = a[0][0].order if rows and cols else (b[0][0].order if rows and nb else 0)
    a0 = fs_classical(a)
    if qi_rank(a0) < cols:
        raise SingularSystem("classical part does not have full column rank")
    left = qi_left_inverse(a0)
    x_layers = []
    for r in range(order + 1):
        rhs = [[b[i][j].coeffs[r] for j in range(nb)] for i in range(rows)]
        for s in range(1, r + 1):
            a_s = [[a[i][k].coeffs[s] for k in range(cols)] for i in range(rows)]
            contrib = qi_matmul(a_s, x_layers[r - s])
            rhs = [[u - v for u, v in zip(ru, rv)] for ru, rv in zip(rhs, contrib)]
        xr = qi_matmul(left, rhs)
        resid = qi_matmul(a0, xr)
        if any(not (u - v).is_zero() for ru, rv in zip(resid, rhs) for u, v in zip(ru, rv)):
            raise SingularSystem(f"inconsistent system at lambda-order {r}")
        x_layers.append(xr)
    return [[FormalScalar._raw([x_layers[r][i][j] for r in range(order + 1)])
             for j in range(nb)] for i in range(cols)]


@dataclass
class GradedLDL:
    """P G P^T = L D L* with L unit lower triangular, D diagonal.

    ``perm`` lists original indices in pivot order; ``pivots`` is the number
    of non-zero pivots (the first ``pivots`` entries of ``perm``).  ``status``
    is ``"positive"``, ``"negative"`` or ``"non_hermitian"``; for
    ``"negative"``, ``witness`` is a coefficient vector (original indexing)
    with negative norm.
    """

    perm: list
    lower: list
    diag: list
    pivots: int
    status: str
    witness: list = None
    witness_norm: FormalScalar = None

    @property
    def pivot_indices(self):
        return self.perm[:self.pivots]

    @property
    def null_indices(self):
        return self.perm[self.pivots:]


def _hermitian_form(g, v):
    n = len(g)
    acc = FormalScalar.zero(g[0][0].order)
    for i in range(n):
        if v[i].is_zero():
            continue
        vi = v[i].conj()
        for j in range(n):
            if not v[j].is_zero() and not g[i][j].is_zero():
                acc = acc + vi * g[i][j] * v[j]
    return acc


def graded_ldl(gram):
    """Graded LDL* of a Hermitian matrix over C[[lambda]].

    Stops with status ``"negative"`` and a witness vector as soon as the
    remaining block cannot be positive semi-definite.
    """
    n = len(gram)
    if n == 0:
        return GradedLDL([], [], [], 0, "positive")
    order = gram[0][0].order
    zero = FormalScalar.zero(order)
    one = FormalScalar.one(order)
    if not fs_is_hermitian(gram):
        return GradedLDL(list(range(n)), fs_identity(n, order), [], 0, "non_hermitian")
    work = [list(row) for row in gram]
    # transform[i] = coefficient vector (original basis) of the i-th working vector
    transform = [[one if i == j else zero for j in range(n)] for i in range(n)]
    remaining = list(range(n))
    perm = []
    diag = []
    cols = {}  # original index -> column of L (dict: index -> scalar)

    def witness(vec):
        return GradedLDL(list(range(n)), None, diag, len(perm), "negative",
                         witness=vec, witness_norm=_hermitian_form(gram, vec))

    while remaining:
        best_diag = None
        best_v = None
        min_all = None
        min_pair = None
        for i in remaining:
            for j in remaining:
                v = work[i][j].valuation()
                if v is None:
                    continue
                if min_all is None or v < min_all:
                    min_all = v
                    min_pair = (i, j)
            v = work[i][i].valuation()
            if v is not None and (best_v is None or v < best_v):
                best_v, best_diag = v, i
        if min_all is None:
            break
        if best_v is None or best_v > min_all:
            i, j = min_pair
            g = work[i][j].coeffs[min_all]
            mu = FormalScalar.constant(-g.conj(), order)
            vec = [transform[i][k] + mu * transform[j][k] for k in range(n)]
            return witness(vec)
        p = best_diag
        d = work[p][p]
        if d.leading().re < 0:
            return witness(list(transform[p]))
        v = best_v
        unit_inv = series_invert(d.divide_lambda(v))
        col = {}
        for i in remaining:
            if i == p:
                continue
            if work[i][p].is_zero():
                continue
            col[i] = work[i][p].divide_lambda(v) * unit_inv
        rest = [i for i in remaining if i != p]
        for i in rest:
            li = col.get(i)
            if li is None:
                continue
            for j in rest:
                gpj = work[p][j]
                if gpj.is_zero():
                    continue
                work[i][j] = work[i][j] - li * gpj
            transform[i] = [transform[i][k] - li.conj() * transform[p][k] for k in range(n)]
        # note: transform rows above are for the conjugate-linear bookkeeping below
        cols[p] = col
        perm.append(p)
        diag.append(d)
        remaining = rest
    pivots = len(perm)
    perm.extend(remaining)
    pos = {idx: k for k, idx in enumerate(perm)}
    lower = [[zero] * n for _ in range(n)]
    for k, idx in enumerate(perm):
        lower[k][k] = one
    for k, idx in enumerate(perm[:pivots]):
        for i, val in cols[idx].items():
            lower[pos[i]][k] = val
    return GradedLDL(perm, lower, diag, pivots, "positive")


def ldl_reconstruct(ldl, n):
    """Rebuild P^T L D L* P to replay a factorization certificate."""
    order = ldl.diag[0].order if ldl.diag else None
    d_full = fs_zero_matrix(n, n, order)
    for k, dk in enumerate(ldl.diag):
        d_full[k][k] = dk
    ldl_mat = fs_matmul(fs_matmul(ldl.lower, d_full), fs_dagger(ldl.lower))
    out = fs_zero_matrix(n, n, order)
    for a, ia in enumerate(ldl.perm):
        for b, ib in enumerate(ldl.perm):
            out[ia][ib] = ldl_mat[a][b]
    return out


def graded_solve(gram, rhs, ldl=None):
    """Solve gram x = rhs with gram Hermitian positive and graded non-degenerate.

    Each pivot divides by lambda**v; a right-hand side lacking that divisibility
    is inconsistent and raises NotAdjointable.  Components of x are determined
    modulo lambda**(N+1-v_k) and returned truncated.
    """
    n = len(gram)
    if n == 0:
        return []
    ldl = ldl or graded_ldl(gram)
    if ldl.status != "positive" or ldl.pivots != n:
        raise SingularSystem("Gram matrix is not graded non-degenerate")
    order = gram[0][0].order
    zero = FormalScalar.zero(order)
    perm = ldl.perm
    nb = len(rhs[0])
    # permuted rhs
    y = [[rhs[perm[k]][j] for j in range(nb)] for k in range(n)]
    # forward: L z = y
    for k in range(n):
        for i in range(k + 1, n):
            lik = ldl.lower[i][k]
            if lik.is_zero():
                continue
            y[i] = [yi - lik * yk for yi, yk in zip(y[i], y[k])]
    # diagonal
    for k in range(n):
        d = ldl.diag[k]
        v = d.valuation()
        uinv = series_invert(d.divide_lambda(v))
        row = []
        for val in y[k]:
            try:
                row.append(val.divide_lambda(v) * uinv)
            except NotDivisible as exc:
                raise NotAdjointable(
                    f"right-hand side not divisible by pivot lambda^{v}") from exc
        y[k] = row
    # backward: L* x = z
    for k in range(n - 1, -1, -1):
        for i in range(k + 1, n):
            lik = ldl.lower[i][k].conj()
            if lik.is_zero():
                continue
            y[k] = [yk - lik * yi for yk, yi in zip(y[k], y[i])]
    out = [[zero] * nb for _ in range(n)]
    for k in range(n):
        out[perm[k]] = y[k]
    return out


def fs_kernel(mat, ncols=None):
    """Basis of {c : mat c = 0} over C[[lambda]] by graded column reduction.

    Pivots are entries of least valuation; every other column is cleared
    against the pivot column, which is exact because the pivot valuation is
    minimal.  Columns that end up identically zero give the kernel vectors.
    """
    rows = len(mat)
    n = ncols if ncols is not None else (len(mat[0]) if rows else 0)
    order = get_order()
    zero, one = FormalScalar.zero(order), FormalScalar.one(order)
    cols = [[mat[i][j] for i in range(rows)] for j in range(n)]
    trans = [[one if i == j else zero for i in range(n)] for j in range(n)]
    active = list(range(n))
    while True:
        best = None
        for j in active:
            for i, x in enumerate(cols[j]):
                v = x.valuation()
                if v is not None and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        v, r, p = best
        uinv = series_invert(cols[p][r].divide_lambda(v))
        for j in active:
            if j == p or cols[j][r].is_zero():
                continue
            f = cols[j][r].divide_lambda(v) * uinv
            cols[j] = [a - f * b for a, b in zip(cols[j], cols[p])]
            trans[j] = [a - f * b for a, b in zip(trans[j], trans[p])]
        active.remove(p)
    return [trans[j] for j in active]


def sign_of(x):
    return is_positive(x)


__all__ = [name for name in dir() if not name.startswith("_")] + ["Sign", "GaussRational"]
