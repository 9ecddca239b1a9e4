"""Independent reference computations (sympy) used as test oracles.

These re-derive the star products from their bidifferential formulas with
symbolic derivatives, without touching the library's structure constants.
"""

import sympy as sp

x, p, z, zb, lam = sp.symbols("x p z zb lam")


def gauss_to_sympy(c):
    return sp.Rational(int(c.re.numerator), int(c.re.denominator)) + \
        sp.I * sp.Rational(int(c.im.numerator), int(c.im.denominator))


def series_to_sympy(s):
    return sum(gauss_to_sympy(c) * lam ** r for r, c in enumerate(s.coeffs))


def element_to_sympy(f, variables):
    out = 0
    for key, c in f.terms.items():
        mono = 1
        for v, e in zip(variables, key):
            mono *= v ** e
        out += series_to_sympy(c) * mono
    return sp.expand(out)


def truncate(expr, order):
    expr = sp.expand(expr)
    return sp.expand(sum(expr.coeff(lam, r) * lam ** r for r in range(order + 1)))


def moyal(f, g, order):
    """sum_r (i lam/2)^r / r! sum_k binom(r,k) (-1)^k d_x^{r-k} d_p^k f  d_p^{r-k} d_x^k g."""
    total = 0
    for r in range(order + 1):
        inner = 0
        for k in range(r + 1):
            df = sp.diff(f, x, r - k, p, k) if r else f
            dg = sp.diff(g, p, r - k, x, k) if r else g
            inner += sp.binomial(r, k) * (-1) ** k * df * dg
        total += (sp.I * lam / 2) ** r / sp.factorial(r) * inner
    return truncate(total, order)


def wick(f, g, order):
    """sum_r lam^r / r! d_zb^r f d_z^r g."""
    total = 0
    for r in range(order + 1):
        df = sp.diff(f, zb, r) if r else f
        dg = sp.diff(g, z, r) if r else g
        total += lam ** r / sp.factorial(r) * df * dg
    return truncate(total, order)


def cech_numbers(windings, faces):
    """n_abc = w_ab + w_bc + w_ca from per-face windings (classical Cech arithmetic)."""
    out = {}
    for (a, b, c) in faces:
        def w(i, j):
            if (i, j) in windings:
                return windings[(i, j)].get((a, b, c), 0)
            return -windings.get((j, i), {}).get((a, b, c), 0)
        out[(a, b, c)] = sp.Rational(w(a, b) + w(b, c) + w(c, a))
    return out
