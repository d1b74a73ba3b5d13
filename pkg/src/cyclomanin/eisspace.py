"""Level-one weight-k mod-p modular symbols and Eisenstein eigenspaces.

A level-one symbol with V_{k-2} coefficients is a single dual vector v
killed by 1+S and 1+U+U^2 (S order 4, U order 3).  Boundary symbols come
from Gamma_infty-invariant functionals; the parabolic quotient carries
conjugation and Hecke operators, whose simultaneous eigenspace with
T_q-eigenvalue 1+q^(k-1) detects the Eisenstein congruences of irregular
pairs.
"""

import numpy as np

from .exactlin import (bernoulli_over_k_mod, coords_in_rowspace, inv_mod,
                       kernel_mod, rref_mod)
from .hecke import merel_set
from .lvalues import S, dual_act_matrix, gamma_infty_invariants
from .reports import CheckReport

U = (0, -1, 1, -1)    # order-3 generator; S*U = T


def level1_space(k, p):
    """Basis rows of {v in V_{k-2} : v + v|S = 0, v + v|U + v|U^2 = 0}."""
    if k % 2 or not 2 <= k < 2 * p:
        raise ValueError("need even k with 2 <= k < 2p")
    r = k - 2
    eye = np.eye(r + 1, dtype=np.int64)
    bs = dual_act_matrix(S, r, p)
    bu = dual_act_matrix(U, r, p)
    stacked = np.vstack([(bs + eye) % p, (bu @ bu % p + bu + eye) % p])
    return kernel_mod(stacked, p)


def hecke_matrix_dual(m, r, p):
    """Matrix of T_m on V_r coordinates: v -> sum over H_m of v|delta^T.

    The coset family H_m is stated for the row-vector symbol action; the
    dual action here reads polynomials through the adjugate, which is the
    S-conjugated presentation, and S delta S^-1 = adj(delta^T).  Summing
    dual_act_matrix over the transposes is exactly that conjugated family,
    the one that preserves the level-one relations.
    """
    total = np.zeros((r + 1, r + 1), dtype=np.int64)
    for a, b, c, d in merel_set(m):
        total = (total + dual_act_matrix((a, c, b, d), r, p)) % p
    return total


def conj_matrix(r, p):
    """Complex conjugation on V_r, realized by iota = (-1 0; 0 1)."""
    return dual_act_matrix((-1, 0, 0, 1), r, p)


def boundary_space(k, p):
    """Basis rows of the boundary subspace of level1_space.

    Spanned by lam - lam|S over the Gamma_infty-invariant lam, then
    intersected with the level-one relation space.
    """
    r = k - 2
    rows = []
    for lam in gamma_infty_invariants(r, p):
        rows.append((lam.coords - lam.act(S).coords) % p)
    if not rows:
        return np.zeros((0, r + 1), dtype=np.int64)
    span, _ = rref_mod(np.array(rows, dtype=np.int64), p)
    level = level1_space(k, p)
    lref, lpiv = rref_mod(level, p)
    _, inside = coords_in_rowspace(lref, lpiv, span, p)
    assert inside.all(), "boundary symbols must satisfy the level-one relations"
    return span


def _quotient_setup(k, p):
    """Shared scaffolding: level coords, boundary rows inside them, quotient map.

    Returns (level_rref, level_pivots, quot, free, dims).  For a level
    coordinate column vector xi, the parabolic-quotient coordinates are
    quot.T @ xi; `free` lists the level coordinates acting as the section.
    """
    level = level1_space(k, p)
    lref, lpiv = rref_mod(level, p)
    nl = lref.shape[0]
    bnd = boundary_space(k, p)
    bcoords, ok = coords_in_rowspace(lref, lpiv, bnd, p)
    assert ok.all()
    bref, bpiv = rref_mod(bcoords, p) if len(bcoords) else (np.zeros((0, nl), dtype=np.int64), [])
    free = [c for c in range(nl) if c not in set(bpiv)]
    # quotient coordinates: free coordinates after eliminating boundary pivots
    quot = np.zeros((nl, len(free)), dtype=np.int64)
    for row_i, c in enumerate(free):
        quot[c, row_i] = 1
    for i, c in enumerate(bpiv):
        quot[c] = (-bref[i][free]) % p
    return lref, lpiv, quot, free, (nl, len(bpiv), len(free))


def _op_on_level(mat, lref, lpiv, p):
    """Restrict an operator matrix on V_r to level coordinates (rows act)."""
    image = lref @ mat.T % p
    coords, ok = coords_in_rowspace(lref, lpiv, image, p)
    assert ok.all(), "operator must preserve the level-one relation space"
    return coords


class EisReport:
    """Dimension report for one (p, k, S) Eisenstein eigenspace computation."""

    def __init__(self, p, k, primes, dim_total, dim_boundary, dim_parabolic,
                 dim_plus_eisenstein, eigenvalues):
        assert dim_parabolic == dim_total - dim_boundary
        self.p = p
        self.k = k
        self.primes = tuple(primes)
        self.dim_total = dim_total
        self.dim_boundary = dim_boundary
        self.dim_parabolic = dim_parabolic
        self.dim_plus_eisenstein = dim_plus_eisenstein
        self.eigenvalues = eigenvalues

    def to_dict(self):
        return {
            "p": self.p, "k": self.k, "S": list(self.primes),
            "dims": {
                "total": self.dim_total,
                "boundary": self.dim_boundary,
                "parabolic": self.dim_parabolic,
                "plus_eisenstein": self.dim_plus_eisenstein,
            },
            "eigenvalues": {str(q): int(v) for q, v in self.eigenvalues.items()},
        }


def eis_eigenspace(p, k, primes=(2,)):
    """Dimensions of H+_{k,eis,S}: conjugation-fixed parabolic classes with
    T_q eigenvalue 1 + q^(k-1) for q in S."""
    for q in primes:
        if q % p == 0:
            raise ValueError("Hecke primes must be away from p")
    r = k - 2
    lref, lpiv, quot, free, (nl, nb, nq) = _quotient_setup(k, p)
    # operators on the parabolic quotient
    conj_q = _quotient_op(conj_matrix(r, p), lref, lpiv, quot, free, p)
    assert np.array_equal(conj_q @ conj_q % p, np.eye(nq, dtype=np.int64)), \
        "conjugation must be an involution on the quotient"
    space = np.eye(nq, dtype=np.int64)
    space = _intersect_eigen(space, conj_q, 1, p)
    eigenvalues = {}
    for q in primes:
        ev = (1 + pow(q, k - 1, p)) % p
        eigenvalues[q] = ev
        tq = _quotient_op(hecke_matrix_dual(q, r, p), lref, lpiv, quot, free, p)
        space = _intersect_eigen(space, tq, ev, p)
    return EisReport(p, k, primes, nl, nb, nq, space.shape[0], eigenvalues)


def _quotient_op(mat, lref, lpiv, quot, free, p):
    """Push an operator on V_r down to the parabolic quotient coordinates.

    Level coordinates transform by on_level.T (column form); the section
    embeds quotient coordinates at the free positions; quot.T projects back.
    """
    on_level = _op_on_level(mat, lref, lpiv, p)
    a_level = on_level.T % p
    return quot.T @ a_level[:, free] % p


def _intersect_eigen(space_rows, op, ev, p):
    """Rows spanning {v in row space : op v = ev v}."""
    if space_rows.shape[0] == 0:
        return space_rows
    n = op.shape[0]
    image = space_rows @ op.T % p
    diff = (image - ev * space_rows) % p
    coeff = kernel_mod(diff.T, p)     # combinations of the rows that die
    return coeff @ space_rows % p


def eis_eigenvector(p, k, primes=(2,)):
    """A basis of the Eisenstein eigenspace in parabolic coordinates, with
    the quotient Hecke matrices for eigenvalue verification."""
    r = k - 2
    lref, lpiv, quot, free, dims = _quotient_setup(k, p)
    conj_q = _quotient_op(conj_matrix(r, p), lref, lpiv, quot, free, p)
    space = _intersect_eigen(np.eye(dims[2], dtype=np.int64), conj_q, 1, p)
    tmats = {}
    for q in primes:
        ev = (1 + pow(q, k - 1, p)) % p
        tq = _quotient_op(hecke_matrix_dual(q, r, p), lref, lpiv, quot, free, p)
        tmats[q] = tq
        space = _intersect_eigen(space, tq, ev, p)
    return space, tmats


def eisenstein_q_coeffs(k, p, nmax):
    """First coefficients of G_k and s_{2, omega^(2-k)} mod p.

    Returns (g, s): g[0] = -B_k/(2k), g[n] = sigma_{k-1}(n); s[0] = 0,
    s[n] = sum_{d | n} omega^(2-k)(n/d) * d, with omega vanishing at
    multiples of p.
    """
    g = np.zeros(nmax + 1, dtype=np.int64)
    s = np.zeros(nmax + 1, dtype=np.int64)
    if k % (p - 1) == 0:
        raise ValueError("constant term has a Bernoulli pole at this weight")
    g[0] = (-bernoulli_over_k_mod(k, p) * inv_mod(2, p)) % p
    e = (2 - k) % (p - 1)
    for nn in range(1, nmax + 1):
        tg = ts = 0
        for d in range(1, nn + 1):
            if nn % d == 0:
                tg += pow(d, k - 1, p)
                m = nn // d
                if m % p:
                    ts += pow(m, e, p) * d
        g[nn] = tg % p
        s[nn] = ts % p
    return g, s
