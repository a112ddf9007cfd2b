"""Characteristic polynomials, Perron data and the projection onto the contracting space."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .numberfield import FieldElement, SpecialPisotRecord, beta_of, sign_at_dominant_root
from .substitution import Correspondence, Substitution, incidence_matrix

# -----------------------------------------------------------------------------
# polynomial helpers (ascending coefficient lists)


def poly_trim(p: list) -> list:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def poly_mul(p: Sequence, q: Sequence) -> list:
    out = [0 * p[0]] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                if b:
                    out[i + j] = out[i + j] + a * b
    return out


def poly_divmod(p: Sequence, q: Sequence) -> tuple[list, list]:
    p = [Fraction(x) for x in poly_trim(list(p))]
    q = [Fraction(x) for x in poly_trim(list(q))]
    if q == [0]:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [Fraction(0)] * max(1, len(p) - len(q) + 1)
    rem = p[:]
    while len(rem) >= len(q) and rem != [0]:
        c = rem[-1] / q[-1]
        shift = len(rem) - len(q)
        quot[shift] = c
        for i, b in enumerate(q):
            rem[shift + i] -= c * b
        rem = poly_trim(rem[:-1]) if len(rem) > 1 else [Fraction(0)]
        if not rem:
            rem = [Fraction(0)]
    return poly_trim(quot), poly_trim(rem)


def poly_gcd(p: Sequence, q: Sequence) -> list:
    a = [Fraction(x) for x in poly_trim(list(p))]
    b = [Fraction(x) for x in poly_trim(list(q))]
    while b != [0]:
        _, r = poly_divmod(a, b)
        a, b = b, r
    lead = a[-1]
    return [x / lead for x in a]


def poly_derivative(p: Sequence) -> list:
    if len(p) == 1:
        return [0 * p[0]]
    return [k * p[k] for k in range(1, len(p))]


def poly_squarefree_part(p: Sequence) -> list:
    g = poly_gcd(p, poly_derivative(list(p)))
    q, r = poly_divmod(p, g)
    assert r == [0]
    lead = q[-1]
    return [x / lead for x in q]


def poly_eval(p: Sequence, x):
    acc = 0 * x
    for c in reversed(p):
        acc = acc * x + c
    return acc


# -----------------------------------------------------------------------------
# characteristic polynomials


@dataclass(frozen=True)
class CharPoly:
    coeffs: tuple[int, ...]  # ascending, monic

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return poly_eval(self.coeffs, x)


def charpoly_rational(mat: Sequence[Sequence]) -> list[Fraction]:
    """det(tI - M) over the rationals by the Faddeev-LeVerrier recursion (exact divisions)."""
    n = len(mat)
    a = [[Fraction(x) for x in row] for row in mat]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = [[Fraction(0)] * n for _ in range(n)]
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        prev = [[mk[i][j] + coeffs[n - k + 1] * ident[i][j] for j in range(n)] for i in range(n)]
        mk = [[sum(a[i][l] * prev[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        tr = sum(mk[i][i] for i in range(n))
        coeffs[n - k] = -tr / k
    return coeffs


_PRIMES: list[int] = []


def _primes_below(limit: int, count: int) -> list[int]:
    global _PRIMES
    if len(_PRIMES) >= count:
        return _PRIMES[:count]
    out = list(_PRIMES)
    cand = out[-1] - 2 if out else limit - 1
    if cand % 2 == 0:
        cand -= 1
    while len(out) < count:
        if _is_prime(cand):
            out.append(cand)
        cand -= 2
    _PRIMES = out
    return out[:count]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _charpoly_mod_p(mat: np.ndarray, p: int) -> list[int]:
    """Characteristic polynomial mod p via similarity reduction to Hessenberg form."""
    h = np.mod(mat.astype(np.int64), p)
    n = h.shape[0]
    for m in range(1, n - 1):
        col = h[m:, m - 1]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        i = m + int(nz[0])
        if i != m:
            h[[i, m], :] = h[[m, i], :]
            h[:, [i, m]] = h[:, [m, i]]
        inv = pow(int(h[m, m - 1]), p - 2, p)
        factors = (h[m + 1:, m - 1] * inv) % p
        if not factors.any():
            continue
        h[m + 1:, :] = (h[m + 1:, :] - np.outer(factors, h[m, :]) % p) % p
        h[:, m] = (h[:, m] + (h[:, m + 1:] @ factors) % p) % p
    # recurrence on leading principal submatrices of the Hessenberg matrix
    polys = [np.array([1], dtype=np.int64)]
    for k in range(1, n + 1):
        hk = h[k - 1, k - 1]
        prev = polys[k - 1]
        cur = np.zeros(k + 1, dtype=np.int64)
        cur[1:] = prev
        cur[:k] = (cur[:k] - hk * prev) % p
        prod = 1
        for i in range(1, k):
            prod = prod * int(h[k - i, k - i - 1]) % p
            if prod == 0:
                break
            coef = prod * int(h[k - i - 1, k - 1]) % p
            if coef:
                q = polys[k - i - 1]
                cur[: len(q)] = (cur[: len(q)] - coef * q) % p
        polys.append(cur % p)
    return [int(c) for c in polys[n]]


def char_poly(mat) -> CharPoly:
    """Exact integer characteristic polynomial det(tI - M), ascending coefficients.

    Computed modulo enough word-sized primes to exceed the coefficient bound
    (1 + max absolute row sum)^n, then lifted by Chinese remaindering.
    """
    m = np.asarray(mat, dtype=object)
    n = m.shape[0]
    if m.ndim != 2 or m.shape[1] != n:
        raise ValueError("square matrix expected")
    if n == 0:
        return CharPoly((1,))
    mi = np.array([[int(x) for x in row] for row in m], dtype=object)
    row_bound = max(sum(abs(int(x)) for x in row) for row in mi)
    bound = (1 + row_bound) ** n
    primes = []
    prod = 1
    limit = 1 << 26
    k = 0
    while prod <= 2 * bound:
        k += 1
        primes = _primes_below(limit, k)
        prod *= primes[-1]
    mat64 = None
    if row_bound < (1 << 62):
        mat64 = np.array([[int(x) for x in row] for row in mi], dtype=object)
    residues = []
    for p in primes:
        red = np.array([[int(x) % p for x in row] for row in mat64], dtype=np.int64)
        residues.append(_charpoly_mod_p(red, p))
    coeffs = []
    for j in range(n + 1):
        x = 0
        modulus = 1
        for p, res in zip(primes, residues):
            r = res[j]
            # combine x mod modulus with r mod p
            t = ((r - x) * pow(modulus, -1, p)) % p
            x += modulus * t
            modulus *= p
        if x > modulus // 2:
            x -= modulus
        coeffs.append(x)
    return CharPoly(tuple(coeffs))


# -----------------------------------------------------------------------------
# Perron data


@dataclass(frozen=True)
class PerronData:
    lambda0: FieldElement
    u: tuple[FieldElement, ...]
    eigen: str  # alpha | beta | beta2
    record_index: int
    reducible: bool
    d: int
    supplementary_dim: int

    @property
    def field(self):
        return self.lambda0.field

    def pi_exact(self, x: Sequence[int]) -> FieldElement:
        """z = <x, u> representing pi(x) exactly."""
        z = self.lambda0.field.zero
        for c, ui in zip(x, self.u):
            if c:
                z = z + ui * int(c)
        return z

    def h_apply(self, z: FieldElement) -> FieldElement:
        return self.lambda0 * z


def perron_data(sigma: Substitution, record: SpecialPisotRecord, corr: Correspondence, scale: int = 1) -> PerronData:
    """Dominant eigenvalue and explicit left eigenvector, verified exactly."""
    a = record.alpha
    b = beta_of(record)
    lam = {"alpha": a, "beta": b, "beta2": b * b}[corr.eigen]
    u = tuple(x * scale for x in corr.eigenvector(a, b))
    m = incidence_matrix(sigma)
    n = sigma.size
    if len(u) != n:
        raise AssertionError("eigenvector length does not match alphabet")
    for j in range(n):
        lhs = a.field.zero
        for i in range(n):
            if m[i, j]:
                lhs = lhs + u[i] * int(m[i, j])
        if lhs != lam * u[j]:
            raise AssertionError(f"u M != lambda u at column {j}")
    for x in u:
        if sign_at_dominant_root(x) <= 0:
            raise AssertionError("eigenvector entries must be positive")
    d = record.d
    return PerronData(lam, u, corr.eigen, record.index, n > d + 1, d, n - d - 1)


def pi_numeric(z: FieldElement, emb) -> np.ndarray:
    """Coordinates of pi in the contracting space: -Psi(z)."""
    return -emb.psi(z)


def h_matrix(perron: PerronData, emb) -> np.ndarray:
    """Matrix of h in the contracting-space coordinates."""
    return emb.mult_matrix(perron.lambda0)
