"""Exact linear algebra over F_p and Bernoulli numbers mod p.

Matrices are plain numpy int64 arrays with entries reduced to [0, p);
the modulus travels as an explicit argument.  Row reduction scales every
pivot to 1 with modular inverses, so the output is the canonical reduced
row echelon form of the row space and does not depend on the order the
input rows were given in.
"""

import math

import numpy as np

_F64_EXACT = 2**53


def inv_mod(x, p):
    return pow(int(x) % p, -1, p)


def as_fp(a, p):
    """Coerce to an int64 matrix with entries in [0, p)."""
    a = np.atleast_2d(np.asarray(a, dtype=np.int64))
    return np.mod(a, p)


def matmul_mod(a, b, p):
    """Exact a @ b mod p.

    Routes through float64 BLAS when the dot products fit below 2^53,
    which covers every modulus this package uses; otherwise falls back
    to int64 (exact below 2^63).
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1]
    if inner * (p - 1) ** 2 < _F64_EXACT:
        prod = a.astype(np.float64) @ b.astype(np.float64)
        return prod.astype(np.int64) % p
    assert inner * (p - 1) ** 2 < 2**62
    return (a @ b) % p


def _eliminate_dense(rows, p):
    # in-place rref of a modest block; returns (reduced rows, pivot cols)
    m, n = rows.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(rows[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            rows[[r, i]] = rows[[i, r]]
        rows[r] = rows[r] * inv_mod(rows[r, c], p) % p
        hit = np.nonzero(rows[:, c])[0]
        hit = hit[hit != r]
        if hit.size:
            rows[hit] = (rows[hit] - np.outer(rows[hit, c], rows[r])) % p
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rref_mod(a, p, block=1024):
    """Canonical RREF over F_p.  Returns (R, pivot_cols).

    R has one row per pivot; pivot columns carry a single 1.  Input rows
    are folded in blockwise: each block is first reduced against the
    pivots found so far (one exact matmul), then eliminated locally.
    """
    a = as_fp(a, p)
    nrows, ncols = a.shape
    basis = np.zeros((0, ncols), dtype=np.int64)
    pivots = []
    for start in range(0, nrows, block):
        chunk = a[start:start + block].copy()
        if pivots:
            coeff = chunk[:, pivots]
            if coeff.any():
                chunk = (chunk - matmul_mod(coeff, basis, p)) % p
        chunk = chunk[chunk.any(axis=1)]
        if chunk.size == 0:
            continue
        new_rows, new_pivots = _eliminate_dense(chunk, p)
        if not new_pivots:
            continue
        coeff = basis[:, new_pivots]
        if coeff.size and coeff.any():
            basis = (basis - matmul_mod(coeff, new_rows, p)) % p
        basis = np.vstack([basis, new_rows])
        pivots.extend(new_pivots)
        order = np.argsort(pivots, kind="stable")
        basis = basis[order]
        pivots = [pivots[i] for i in order]
    return basis, pivots


def row_reduce(a, p):
    """Return (rref, rank, kernel_basis) of `a` over F_p."""
    a = as_fp(a, p)
    rref, pivots = rref_mod(a, p)
    return rref, len(pivots), kernel_from_rref(rref, pivots, a.shape[1], p)


def kernel_from_rref(rref, pivots, ncols, p):
    """Right-kernel basis rows, each scaled so its first nonzero entry is 1."""
    piv_set = set(pivots)
    free = [c for c in range(ncols) if c not in piv_set]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for row, f in enumerate(free):
        basis[row, f] = 1
        for i, c in enumerate(pivots):
            basis[row, c] = (-int(rref[i, f])) % p
    for row in range(len(free)):
        nz = np.nonzero(basis[row])[0]
        lead = int(basis[row, nz[0]])
        if lead != 1:
            basis[row] = basis[row] * inv_mod(lead, p) % p
    return basis


def kernel_mod(a, p):
    a = as_fp(a, p)
    rref, pivots = rref_mod(a, p)
    return kernel_from_rref(rref, pivots, a.shape[1], p)


def coords_in_rowspace(rref, pivots, v, p):
    """Coefficients expressing v over the rref rows, or None if outside.

    Works on a single vector or a stack of row vectors; for stacks the
    return is (coeff_matrix, in_space_mask).
    """
    v = np.mod(np.asarray(v, dtype=np.int64), p)
    single = v.ndim == 1
    vv = np.atleast_2d(v)
    if len(pivots) == 0:
        ok = ~vv.any(axis=1)
        coeff = np.zeros((vv.shape[0], 0), dtype=np.int64)
    else:
        coeff = vv[:, pivots]
        ok = ((vv - matmul_mod(coeff, rref, p)) % p == 0).all(axis=1)
    if single:
        return (coeff[0], bool(ok[0]))
    return coeff, ok


def unit_group(m):
    """Units of Z/mZ in increasing order."""
    xs = np.arange(1, m)
    return xs[np.frompyfunc(math.gcd, 2, 1)(xs, m).astype(np.int64) == 1]


def primitive_root(p):
    """Smallest primitive root mod an odd prime p."""
    fac = []
    q, t = p - 1, 2
    while t * t <= q:
        if q % t == 0:
            fac.append(t)
            while q % t == 0:
                q //= t
        t += 1
    if q > 1:
        fac.append(q)
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in fac):
            return g
    raise ValueError(f"no primitive root mod {p}")


def omega_pow(a, j, p):
    """j-th power of the mod-p cyclotomic character at a: a^j mod p.

    Depends only on j mod (p-1); a must be prime to p.
    """
    a = int(a) % p
    if a == 0:
        raise ValueError("omega_pow needs a prime to p")
    return pow(a, j % (p - 1), p)


class BernoulliValue:
    """B_k reduced mod p, or the marker value at a pole of omega^k's L-factor.

    `residue` is an int in [0, p) when defined and None when
    k = 0 (mod p-1), where B_k is not p-integral.
    """

    __slots__ = ("k", "p", "residue")

    def __init__(self, k, p, residue):
        self.k = k
        self.p = p
        self.residue = residue

    @property
    def is_pole(self):
        return self.residue is None

    def __eq__(self, other):
        return (self.k, self.p, self.residue) == (other.k, other.p, other.residue)

    def __repr__(self):
        val = "pole" if self.is_pole else self.residue
        return f"BernoulliValue(k={self.k}, p={self.p}, {val})"

    def to_json(self):
        return "pole" if self.is_pole else int(self.residue)


def _bernoulli_table_mod(k, p):
    # B_0..B_k mod p by the cleared-denominator recursion; valid for k < p-1
    assert k < p - 1
    tab = [0] * (k + 1)
    tab[0] = 1
    if k >= 1:
        tab[1] = (p - inv_mod(2, p)) % p
    for m in range(2, k + 1):
        if m % 2 == 1:
            continue
        s = sum(math.comb(m + 1, j) * tab[j] for j in range(m)) % p
        tab[m] = (-s * inv_mod(m + 1, p)) % p
    return tab


def bernoulli_over_k_mod(k, p):
    """B_k / k mod p for even k >= 2 with k != 0 (mod p-1).

    Kummer's congruence reduces the index mod p-1, so any such k is
    accepted; the value depends only on k mod (p-1).
    """
    if p <= 3:
        raise ValueError("p must be a prime > 3")
    if k < 2 or k % 2 == 1:
        raise ValueError("k must be an even integer >= 2")
    if k % (p - 1) == 0:
        raise ValueError(f"B_{k}/{k} has a pole mod {p}")
    k0 = k % (p - 1)
    tab = _bernoulli_table_mod(k0, p)
    return tab[k0] * inv_mod(k0, p) % p


def bernoulli_mod(k, p):
    """B_k mod p as a BernoulliValue; the pole marker when (p-1) | k."""
    if p <= 3:
        raise ValueError("p must be a prime > 3")
    if k < 2 or k % 2 == 1:
        raise ValueError("k must be an even integer >= 2")
    if k % (p - 1) == 0:
        return BernoulliValue(k, p, None)
    return BernoulliValue(k, p, k * bernoulli_over_k_mod(k, p) % p)


def is_irregular_pair(p, k):
    """True when p divides the numerator of B_k/k (an irregular pair).

    At k = 0 (mod p-1) the answer is False: von Staudt-Clausen puts p in
    the denominator of B_k, so p never divides the numerator there.
    """
    if k % (p - 1) == 0:
        return False
    return bernoulli_over_k_mod(k, p) == 0
