"""Weight-r polynomial modules, their duals, and mod-p special L-values.

W_r is homogeneous degree-r polynomials in X, Y over F_p with the
right action (F|s)(X,Y) = F((X,Y)s') through the adjugate s' of s.
V_r is its dual, coordinatized in the basis {lambda_i} dual to
{(-1)^i X^{r-i} Y^i}.  The L-value of a boundary symbol attached to
an invariant functional, and the L-values attached to a functional
rho on the cyclotomic symbol module, are both plain finite sums here.
"""

import numpy as np

from .cyclok2 import rho_basis, xi_class
from .exactlin import kernel_mod, omega_pow
from .reports import CheckReport

S = (0, -1, 1, 0)     # order-4 rotation
T = (1, 1, 0, 1)      # upper unipotent generator of Gamma_infty


def adjugate(sigma):
    a, b, c, d = sigma
    return (d, -b, -c, a)


def binom_table(n, p):
    """Pascal triangle mod p, shape (n+1, n+1); no factorials."""
    c = np.zeros((n + 1, n + 1), dtype=np.int64)
    c[:, 0] = 1
    for i in range(1, n + 1):
        c[i, 1:i + 1] = (c[i - 1, :i] + c[i - 1, 1:i + 1]) % p
    return c


def poly_act_matrix(sigma, r, p):
    """Matrix A with coeffs(F|sigma) = A @ coeffs(F).

    Coordinates are coefficients of X^j Y^(r-j), j = 0..r.  The image
    of X^j Y^(r-j) under (X,Y) -> (X,Y)sigma' is (dX-cY)^j (-bX+aY)^(r-j).
    """
    a, b, c, d = (v % p for v in sigma)
    cols = np.zeros((r + 1, r + 1), dtype=np.int64)
    bt = binom_table(r, p)
    for j in range(r + 1):
        # (dX - cY)^j: coefficient of X^u Y^(j-u)
        u = np.arange(j + 1)
        first = bt[j, u] * pow_arr(d, u, p) % p * pow_arr(-c, j - u, p) % p
        # (-bX + aY)^(r-j): coefficient of X^v Y^(r-j-v)
        v = np.arange(r - j + 1)
        second = bt[r - j, v] * pow_arr(-b, v, p) % p * pow_arr(a, r - j - v, p) % p
        cols[:, j] = np.convolve(first, second) % p
    return cols % p


def pow_arr_each(bases, e, p):
    """bases**e mod p elementwise over an array of bases."""
    out = np.ones_like(np.asarray(bases, dtype=np.int64))
    val = np.asarray(bases, dtype=np.int64) % p
    e = int(e)
    while e > 0:
        if e & 1:
            out = out * val % p
        e >>= 1
        val = val * val % p
    return out


def pow_arr(base, exps, p):
    """base**exps mod p elementwise; 0**0 = 1."""
    base = base % p
    exps = np.asarray(exps)
    out = np.ones(exps.shape, dtype=np.int64)
    val = base
    e = exps.copy()
    # square-and-multiply over the whole array (max exponent is ~2p)
    while np.any(e > 0):
        out = np.where(e & 1, out * val % p, out)
        e >>= 1
        val = val * val % p
    return out


class PolyVec:
    """Element of W_r: coefficients of X^i Y^(r-i), i = 0..r."""

    def __init__(self, r, coeffs, p):
        coeffs = np.asarray(coeffs, dtype=np.int64) % p
        assert coeffs.shape == (r + 1,)
        self.r = r
        self.p = p
        self.coeffs = coeffs

    def act(self, sigma):
        mat = poly_act_matrix(sigma, self.r, self.p)
        return PolyVec(self.r, mat @ self.coeffs % self.p, self.p)

    def __eq__(self, other):
        return (self.r == other.r and self.p == other.p
                and np.array_equal(self.coeffs, other.coeffs))


def dual_act_matrix(sigma, r, p):
    """Matrix B with coords(lam|sigma) = B @ coords(lam) in the lambda basis.

    (lam|sigma)(m) = lam(m|sigma'), so B is the lambda-basis transpose
    of the W_r action of sigma'.
    """
    amat = poly_act_matrix(adjugate(sigma), r, p)
    i = np.arange(r + 1)
    signs = np.where((i[:, None] + i[None, :]) % 2, p - 1, 1)
    return signs * amat[np.ix_(r - i, r - i)].T % p


class DualVec:
    """Element of V_r in the basis {lambda_i} dual to {(-1)^i X^(r-i) Y^i}."""

    def __init__(self, r, coords, p):
        coords = np.asarray(coords, dtype=np.int64) % p
        assert coords.shape == (r + 1,)
        self.r = r
        self.p = p
        self.coords = coords

    def act(self, sigma):
        mat = dual_act_matrix(sigma, self.r, self.p)
        return DualVec(self.r, mat @ self.coords % self.p, self.p)

    def __eq__(self, other):
        return (self.r == other.r and self.p == other.p
                and np.array_equal(self.coords, other.coords))


def lambda_basis_vec(r, i, p):
    coords = np.zeros(r + 1, dtype=np.int64)
    coords[i] = 1
    return DualVec(r, coords, p)


def pairing(lam, f):
    """Canonical pairing V_r x W_r -> F_p."""
    assert lam.r == f.r and lam.p == f.p
    r, p = lam.r, lam.p
    i = np.arange(r + 1)
    signs = np.where(i % 2, p - 1, 1)
    return int((lam.coords * signs * f.coeffs[r - i]).sum() % p)


def perfect_pairing(f, g):
    """The M_2^+(Z)-equivariant pairing on W_r; needs r! invertible (r < p)."""
    assert f.r == g.r and f.p == g.p
    r, p = f.r, f.p
    if r >= p:
        raise ValueError("perfect pairing needs r < p (r! invertible)")
    bt = binom_table(r, p)
    i = np.arange(r + 1)
    signs = np.where(i % 2, p - 1, 1)
    inv_binom = np.array([pow(int(bt[r, j]), p - 2, p) for j in range(r + 1)],
                         dtype=np.int64)
    return int((f.coeffs * inv_binom * signs * g.coeffs[r - i]).sum() % p)


def gamma_infty_invariants(r, p):
    """Basis of V_r^{Gamma_infty}: the fixed space of the dual T-action.

    Dimension 1 (spanned by lambda_r) for r < p, and 2 (lambda_r and
    lambda_{p-1}) for p <= r < 2p.
    """
    if r >= 2 * p:
        raise ValueError("invariants computed only for r < 2p")
    mat = dual_act_matrix(T, r, p)
    mat[np.arange(r + 1), np.arange(r + 1)] -= 1
    basis = kernel_mod(mat % p, p)
    return [DualVec(r, row, p) for row in basis]


def boundary_lambda(lam):
    """Universal L-value of the boundary symbol attached to invariant lam.

    Lambda(phi) = lam - lam|S; its lambda_i coordinate is L(phi, i+1).
    """
    if not lam == lam.act(T):
        raise ValueError("lam is not Gamma_infty-invariant")
    out = (lam.coords - lam.act(S).coords) % lam.p
    return DualVec(lam.r, out, lam.p)


def tp_fixed_point(r, p):
    """Check lambda_r | ((p,0;0,1) + sum_j (1,j;0,p)) = lambda_r in V_r(F_p).

    This is the fixed-point equation a boundary symbol with phi|T_p = phi
    satisfies; over F_p it forces L-values to vanish at all 0 < i < r.
    """
    lam = lambda_basis_vec(r, r, p)
    total = lam.act((p, 0, 0, 1)).coords.copy()
    for j in range(p):
        total = (total + lam.act((1, j, 0, p)).coords) % p
    return np.array_equal(total, lam.coords)


class LValueVector:
    """Special L-values L(psi, j) for j = 1..k-1, with excluded markers.

    values[j] is the scalar (-1)^(j-1) * sum y^(j-1) x^(k-1-j) rho(class(x,y));
    arguments with (j-1) = 0 or k-2 mod p-1 are not well-defined on the
    parabolic quotient and land in excluded instead.
    """

    def __init__(self, k, p, values, excluded):
        self.k = k
        self.p = p
        self.values = values
        self.excluded = excluded
        assert set(values) | excluded == set(range(1, k))
        assert not set(values) & excluded

    def to_dict(self):
        out = {str(j): ("excluded" if j in self.excluded else int(self.values[j]))
               for j in range(1, self.k)}
        return out


def l_values_from_rho(module, rho, k):
    """L-values of the weight-k symbol obtained from rho on the module.

    rho is a functional on the quotient (a row of rho_basis).  The value
    at argument i+1 is (-1)^i sum_{x,y units} y^i x^(k-2-i) rho(class(x,y)).
    """
    p = module.p
    if module.n != 1:
        raise ValueError("L-value sums are defined at level one")
    if k % 2 or not 2 <= k < 2 * p:
        raise ValueError("need even k with 2 <= k < 2p")
    rho = np.asarray(rho, dtype=np.int64) % p
    assert rho.shape == (module.dim,)
    # rho(class(x,y)) over the unit grid, via the generator reducer
    grid = module.reduce_matrix @ rho % p            # one scalar per generator
    units = np.arange(1, p)
    xs = np.repeat(units, p - 1)
    ys = np.tile(units, p - 1)
    vals = {}
    excluded = set()
    for i in range(k - 1):
        j = i + 1
        if i % (p - 1) == 0 or i % (p - 1) == (k - 2) % (p - 1):
            excluded.add(j)
            continue
        weights = pow_arr_each(ys, i, p) * pow_arr_each(xs, k - 2 - i, p) % p
        total = int((weights * grid).sum() % p)
        if i % 2:
            total = (p - total) % p
        vals[j] = total
    return LValueVector(k, p, vals, excluded)


def twist_eigenvalue_identity(q, k, p):
    """q^(k-2) (q + q^(2-k)) = 1 + q^(k-1) in F_p."""
    lhs = pow(q, k - 2, p) * (q + pow(q, (2 - k) % (p - 1), p)) % p
    rhs = (1 + pow(q, k - 1, p)) % p
    return lhs == rhs


def lvalue_identity_report(p, k, module=None):
    """Check L(psi,i) = rho(xi_i) for odd i and 0 for even i, per functional.

    Runs over every rho in rho_basis of the symbol module at (p, 1); also
    re-derives the twist bookkeeping q^(k-2)(q+q^(2-k)) = 1+q^(k-1).
    """
    from .cyclok2 import build_cyclo_module
    if p <= 3:
        raise ValueError("need p > 3")
    if k % 2 or not 2 <= k < 2 * p:
        raise ValueError("need even k with 2 <= k < 2p")
    if module is None:
        module = build_cyclo_module(p, 1)
    report = CheckReport("verify-lvalues", {"p": p, "k": k})
    rhos = rho_basis(module, k)
    report.add("functional-count", True, {"count": int(rhos.shape[0])})
    for idx, rho in enumerate(rhos):
        lv = l_values_from_rho(module, rho, k)
        table = {}
        ok_odd = True
        for i in range(3, k - 2, 2):
            if i in lv.excluded:
                table[i] = "excluded"
                continue
            want = int(xi_class(module, i, k).coords @ rho % p)
            got = lv.values[i]
            table[i] = got
            ok_odd = ok_odd and got == want
        report.add("odd-values-match-xi[rho%d]" % idx, ok_odd,
                   {str(i): v for i, v in table.items()})
        evens = {i: lv.values[i] for i in range(2, k - 1, 2)
                 if i not in lv.excluded}
        report.add("even-values-zero[rho%d]" % idx,
                   all(v == 0 for v in evens.values()),
                   {str(i): v for i, v in evens.items()})
    for q in (2, 3):
        report.add("twist-eigenvalue-q%d" % q,
                   twist_eigenvalue_identity(q, k, p), {})
    return report
