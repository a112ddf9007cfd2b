"""Exact arithmetic in the fields Q(alpha) of the special Pisot numbers.

Elements are rational coefficient vectors in the power basis 1, a, ..., a^(n-1)
reduced modulo the minimal polynomial. Sign decisions at the dominant real
root are certified by rational interval refinement.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
import math
from typing import Iterable, Sequence

import mpmath

__all__ = [
    "MinimalPolynomial",
    "NumberField",
    "FieldElement",
    "SpecialPisotRecord",
    "RootIsolation",
    "registry_lookup",
    "all_records",
    "unit_indices",
    "beta_of",
    "verify_dependency",
    "sign_at_dominant_root",
    "conjugates",
    "minimal_polynomial_of",
    "FieldMismatch",
]


class FieldMismatch(ValueError):
    """Raised when operands live in different fields."""


@dataclass(frozen=True)
class MinimalPolynomial:
    """Monic integer polynomial, coefficients in ascending degree order."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) < 2 or self.coeffs[-1] != 1:
            raise ValueError("minimal polynomial must be monic of degree >= 1")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def pretty(self, var: str = "t") -> str:
        return format_poly(self.coeffs, var)


def format_poly(coeffs: Sequence[int], var: str = "t") -> str:
    """Human-readable polynomial from ascending coefficients."""
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if mag == 1 else f"{mag}{mono}"
        terms.append((sign, body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


class NumberField:
    """Q(alpha) for a monic irreducible integer polynomial with a dominant real root > 0."""

    def __init__(self, minpoly: MinimalPolynomial, field_id: int, approx_root: float):
        self.minpoly = minpoly
        self.field_id = field_id
        self.degree = minpoly.degree
        self.approx_root = float(approx_root)
        n = self.degree
        # reduction table: a^(n+j) expressed in the power basis, j = 0..n-2
        red = []
        top = [Fraction(-c) for c in minpoly.coeffs[:-1]]
        cur = top[:]
        for _ in range(max(n - 1, 0)):
            red.append(cur[:])
            # multiply cur by a
            carry = cur[-1]
            cur = [Fraction(0)] + cur[:-1]
            cur = [cur[i] + carry * top[i] for i in range(n)]
        self._reduction = red
        self._interval_cache: dict[int, tuple[Fraction, Fraction]] = {}
        self._root_float = self._polish_float_root(approx_root)

    def __repr__(self):
        return f"NumberField({self.minpoly.pretty()}, id={self.field_id})"

    # -- construction helpers -------------------------------------------------
    def element(self, coeffs: Iterable) -> "FieldElement":
        cs = [Fraction(c) for c in coeffs]
        if len(cs) > self.degree:
            return self._reduce_long(cs)
        cs += [Fraction(0)] * (self.degree - len(cs))
        return FieldElement(tuple(cs), self)

    def from_int(self, k) -> "FieldElement":
        return self.element([k])

    @cached_property
    def zero(self) -> "FieldElement":
        return self.from_int(0)

    @cached_property
    def one(self) -> "FieldElement":
        return self.from_int(1)

    @cached_property
    def gen(self) -> "FieldElement":
        if self.degree == 1:
            return self.element([-self.minpoly.coeffs[0]])
        return self.element([0, 1])

    def _reduce_long(self, cs: list) -> "FieldElement":
        n = self.degree
        if n == 1:
            root = Fraction(-self.minpoly.coeffs[0])
            acc = Fraction(0)
            for c in reversed(cs):
                acc = acc * root + c
            return FieldElement((acc,), self)
        out = list(cs[:n]) + [Fraction(0)] * max(0, n - len(cs))
        for j, c in enumerate(cs[n:]):
            if c:
                row = self._reduction_row(j)
                for i in range(n):
                    out[i] += c * row[i]
        return FieldElement(tuple(out), self)

    def _reduction_row(self, j: int) -> list:
        while j >= len(self._reduction):
            prev = self._reduction[-1] if self._reduction else None
            top = [Fraction(-c) for c in self.minpoly.coeffs[:-1]]
            if prev is None:
                self._reduction.append(top)
                continue
            carry = prev[-1]
            cur = [Fraction(0)] + prev[:-1]
            self._reduction.append([cur[i] + carry * top[i] for i in range(self.degree)])
        return self._reduction[j]

    # -- dominant root -------------------------------------------------------
    def _polish_float_root(self, x: float) -> float:
        mp = self.minpoly
        for _ in range(60):
            p = mp(x)
            dp = sum(k * c * x ** (k - 1) for k, c in enumerate(mp.coeffs) if k)
            if dp == 0:
                break
            step = p / dp
            x -= step
            if abs(step) < 1e-16 * max(1.0, abs(x)):
                break
        return x

    @property
    def root_float(self) -> float:
        return self._root_float

    def dominant_interval(self, bits: int) -> tuple[Fraction, Fraction]:
        """Rational interval of width <= 2^-bits containing the dominant real root."""
        if self.degree == 1:
            r = Fraction(-self.minpoly.coeffs[0])
            return (r, r)
        if bits in self._interval_cache:
            return self._interval_cache[bits]
        best = None
        for b in sorted(self._interval_cache):
            if b <= bits:
                best = self._interval_cache[b]
        if best is None:
            best = self._initial_interval()
        lo, hi = best
        mp = self.minpoly
        s_lo = _sgn(mp(lo))
        width = Fraction(1, 2 ** bits)
        while hi - lo > width:
            mid = (lo + hi) / 2
            s_mid = _sgn(mp(mid))
            if s_mid == 0:
                lo = hi = mid
                break
            if s_mid == s_lo:
                lo = mid
            else:
                hi = mid
        self._interval_cache[bits] = (lo, hi)
        return lo, hi

    def _initial_interval(self) -> tuple[Fraction, Fraction]:
        x = self._root_float
        mp = self.minpoly
        eps = 1e-9
        while True:
            lo = Fraction(x - eps).limit_denominator(2 ** 60)
            hi = Fraction(x + eps).limit_denominator(2 ** 60)
            if _sgn(mp(lo)) * _sgn(mp(hi)) < 0:
                return lo, hi
            eps *= 16
            if eps > 1:
                raise RuntimeError("cannot bracket dominant root")

    # -- conjugates ----------------------------------------------------------
    def embeddings(self, precision: int = 64) -> list:
        """Non-dominant roots of the minimal polynomial as mpmath complex numbers.

        Ordered by descending modulus; ties broken with positive imaginary part first.
        """
        return list(self._embeddings(precision)[0])

    def embedding_error(self, precision: int = 64) -> float:
        return self._embeddings(precision)[1]

    def _embeddings(self, precision: int):
        key = ("_emb", precision)
        cache = self.__dict__.setdefault("_emb_cache", {})
        if key in cache:
            return cache[key]
        dps = int(precision * math.log10(2)) + 15
        with mpmath.workdps(dps):
            coeffs = [mpmath.mpf(c) for c in reversed(self.minpoly.coeffs)]
            roots, err = mpmath.polyroots(coeffs, maxsteps=400, extraprec=4 * dps, error=True)
            dom = min(roots, key=lambda r: abs(r - self._root_float))
            rest = [r for r in roots if r is not dom]
            rest.sort(key=lambda r: (-float(abs(r)), -float(mpmath.im(r))))
            # snap tiny imaginary parts of real roots
            cleaned = []
            for r in rest:
                if abs(mpmath.im(r)) < mpmath.mpf(2) ** (-(precision + 8)):
                    r = mpmath.mpc(mpmath.re(r), 0)
                cleaned.append(r)
            err = float(err)
        if err > 2.0 ** (-precision):
            raise RuntimeError("conjugate approximation failed to reach requested precision")
        cache[key] = (tuple(cleaned), err)
        return cache[key]


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True, eq=False)
class FieldElement:
    """Exact element of Q(alpha), coefficients in the power basis."""

    coeffs: tuple
    field: NumberField = field(repr=False)

    # -- structural ---------------------------------------------------------
    @property
    def field_id(self) -> int:
        return self.field.field_id

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        return NotImplemented

    def __hash__(self):
        return hash((self.field.field_id, self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise FieldMismatch("operands belong to different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_int(other)
        raise TypeError(f"cannot combine FieldElement with {type(other).__name__}")

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(tuple(a + b for a, b in zip(self.coeffs, o.coeffs)), self.field)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(tuple(-a for a in self.coeffs), self.field)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement(tuple(a * other for a in self.coeffs), self.field)
        o = self._coerce(other)
        n = self.field.degree
        prod = [Fraction(0)] * (2 * n - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[i + j] += a * b
        if n == 1:
            return FieldElement((prod[0],), self.field)
        return self.field._reduce_long(prod)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        # solve M x = e_0 where M is multiplication by self
        n = self.field.degree
        cols = []
        basis = self.field.one
        g = self.field.gen
        for _ in range(n):
            cols.append((self * basis).coeffs)
            basis = basis * g
        mat = [[cols[j][i] for j in range(n)] for i in range(n)]
        rhs = [Fraction(1)] + [Fraction(0)] * (n - 1)
        sol = solve_rational(mat, rhs)
        return FieldElement(tuple(sol), self.field)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return FieldElement(tuple(a / other for a in self.coeffs), self.field)
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- evaluation ---------------------------------------------------------
    def value(self) -> float:
        """Float approximation at the dominant root."""
        x = self.field.root_float
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def at(self, root):
        """Evaluate the coefficient polynomial at an arbitrary (mpmath) root."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * root + mpmath.mpf(c.numerator) / c.denominator
        return acc

    def sign(self) -> int:
        return sign_at_dominant_root(self)

    def multiplication_matrix(self) -> list[list[Fraction]]:
        """Matrix of y -> self*y in the power basis (columns are images of basis vectors)."""
        n = self.field.degree
        cols = []
        basis = self.field.one
        g = self.field.gen
        for _ in range(n):
            cols.append((self * basis).coeffs)
            basis = basis * g
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def __repr__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if c:
                parts.append(f"{c}" + ("" if k == 0 else ("*a" if k == 1 else f"*a^{k}")))
        return "FieldElement(" + (" + ".join(parts) or "0") + ")"


def solve_rational(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan elimination over the rationals for a square nonsingular system."""
    n = len(mat)
    a = [list(map(Fraction, row)) + [Fraction(r)] for row, r in zip(mat, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


# -----------------------------------------------------------------------------
# sign determination

_FAST_MARGIN = 2.0 ** -40


def sign_at_dominant_root(z: FieldElement, start_bits: int = 64, max_bits: int = 1 << 14) -> int:
    """Certified sign of z evaluated at the dominant real root."""
    if z.is_zero():
        return 0
    fld = z.field
    # float path with a generous rounding bound
    x = fld.root_float
    acc = 0.0
    mag = 0.0
    for c in reversed(z.coeffs):
        fc = float(c)
        acc = acc * x + fc
        mag = mag * abs(x) + abs(fc)
    if math.isfinite(acc) and abs(acc) > _FAST_MARGIN * mag:
        return 1 if acc > 0 else -1
    bits = start_bits
    while bits <= max_bits:
        lo, hi = fld.dominant_interval(bits)
        ilo, ihi = _interval_eval(z.coeffs, lo, hi)
        if ilo > 0:
            return 1
        if ihi < 0:
            return -1
        bits *= 2
    raise RuntimeError("sign refinement did not terminate")


def _interval_eval(coeffs, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    # lo > 0 for all registry fields, so powers are monotone
    s_lo = Fraction(0)
    s_hi = Fraction(0)
    p_lo = Fraction(1)
    p_hi = Fraction(1)
    for c in coeffs:
        if c > 0:
            s_lo += c * p_lo
            s_hi += c * p_hi
        elif c < 0:
            s_lo += c * p_hi
            s_hi += c * p_lo
        p_lo *= lo
        p_hi *= hi
    return s_lo, s_hi


def compare(a: FieldElement, b: FieldElement) -> int:
    return sign_at_dominant_root(a - b)


# -----------------------------------------------------------------------------
# conjugates


def conjugates(z: FieldElement, precision: int = 64) -> list[tuple[complex, float]]:
    """Values of z at the non-dominant embeddings, with an absolute error bound.

    The embedding order is that of the field (descending modulus of the
    conjugate roots, positive imaginary part first), so it is stable for all z.
    """
    if precision < 32:
        raise ValueError("precision must be at least 32 bits")
    fld = z.field
    roots = fld._embeddings(precision)[0]
    err_root = fld._embeddings(precision)[1]
    out = []
    dps = int(precision * math.log10(2)) + 15
    with mpmath.workdps(dps):
        for r in roots:
            v = z.at(r)
            # derivative bound times root error
            deriv = sum(abs(float(c)) * k * float(abs(r)) ** (k - 1) for k, c in enumerate(z.coeffs) if k)
            bound = deriv * err_root + 2.0 ** (-precision - 4)
            out.append((complex(v), min(bound, 2.0 ** (-precision))))
    return out


def minimal_polynomial_of(z: FieldElement) -> tuple:
    """Minimal polynomial of z over Q, ascending and monic (integers when integral)."""
    from .spectral import charpoly_rational, poly_squarefree_part

    cp = charpoly_rational(z.multiplication_matrix())
    # the characteristic polynomial is a power of the irreducible minimal polynomial
    mp = poly_squarefree_part(cp)
    if all(c.denominator == 1 for c in mp):
        return tuple(int(c) for c in mp)
    return tuple(mp)


# -----------------------------------------------------------------------------
# registry

_TABLE = {
    # index: (minpoly ascending, approx value, exponent m_i)
    -5: ((-1, 4, -5, 1), "4.0796", 1),
    -4: ((1, -4, 6, -5, 1), "3.62966", 1),
    -3: ((-1, 3, -4, 1), "3.1479", 1),
    -2: ((1, -3, 1), "2.61803", 1),
    -1: ((-1, 2, -3, 1), "2.32472", 2),
    0: ((-2, 1), "2", 1),
    1: ((-1, 1, -2, 1), "1.75488", 3),
    2: ((-1, -1, 1), "1.61803", 2),
    3: ((-1, 0, -1, 1), "1.46557", 3),
    4: ((-1, 0, 0, -1, 1), "1.38028", 4),
    5: ((-1, -1, 0, 1), "1.32472", 5),
}


@dataclass(frozen=True)
class SpecialPisotRecord:
    index: int
    minpoly: MinimalPolynomial
    approx_value: str
    partner: int
    exponent: int
    field: NumberField = field(repr=False, compare=False)

    @property
    def degree(self) -> int:
        return self.minpoly.degree

    @property
    def d(self) -> int:
        """Dimension of the contracting space."""
        return self.minpoly.degree - 1

    @property
    def is_unit(self) -> bool:
        return abs(self.minpoly.coeffs[0]) == 1

    @property
    def has_tent_tile(self) -> bool:
        return self.index != 0

    @property
    def alpha(self) -> FieldElement:
        return self.field.gen

    @property
    def partner_exponent(self) -> int:
        return _TABLE[-self.index][2]


_FIELDS: dict[int, NumberField] = {}
_RECORDS: dict[int, SpecialPisotRecord] = {}


def registry_lookup(i: int) -> SpecialPisotRecord:
    """Row i of the table of special Pisot numbers."""
    if i not in _TABLE:
        raise KeyError(f"index {i} out of range -5..5")
    if i not in _RECORDS:
        coeffs, approx, m = _TABLE[i]
        mp = MinimalPolynomial(tuple(coeffs))
        fld = NumberField(mp, i, float(approx))
        _FIELDS[i] = fld
        _RECORDS[i] = SpecialPisotRecord(i, mp, approx, -i, m, fld)
    return _RECORDS[i]


def all_records() -> list[SpecialPisotRecord]:
    return [registry_lookup(i) for i in range(-5, 6)]


def unit_indices() -> list[int]:
    return [i for i in range(-5, 6) if i != 0]


def beta_of(record_or_alpha) -> FieldElement:
    """beta = alpha / (alpha - 1) in the field of the record (or of the given element)."""
    if isinstance(record_or_alpha, SpecialPisotRecord):
        if record_or_alpha.index == 0:
            raise ValueError("index 0 has no tent-tile partner")
        a = record_or_alpha.alpha
    else:
        a = record_or_alpha
    return a / (a - 1)


def verify_dependency(record: SpecialPisotRecord) -> bool:
    """Check alpha^{m_i} == beta^{m_{-i}} exactly."""
    if record.index == 0:
        raise ValueError("index 0 is not a unit")
    a = record.alpha
    b = beta_of(record)
    return a ** record.exponent == b ** record.partner_exponent


@dataclass(frozen=True)
class RootIsolation:
    """Disjoint rational boxes, one per root of the minimal polynomial."""

    field_id: int
    bits: int
    dominant: tuple[Fraction, Fraction]
    others: tuple[tuple[Fraction, Fraction, Fraction, Fraction], ...]  # re_lo, re_hi, im_lo, im_hi


def isolate_roots(fld: NumberField, bits: int = 64) -> RootIsolation:
    dom = fld.dominant_interval(bits)
    rad = Fraction(1, 2 ** bits)
    boxes = []
    for r in fld.embeddings(max(bits, 32)):
        re = Fraction(str(mpmath.nstr(mpmath.re(r), 40)))
        im = Fraction(str(mpmath.nstr(mpmath.im(r), 40)))
        boxes.append((re - rad, re + rad, im - rad, im + rad))
    iso = RootIsolation(fld.field_id, bits, dom, tuple(boxes))
    allb = [(dom[0], dom[1], Fraction(0), Fraction(0))] + boxes
    for i in range(len(allb)):
        for j in range(i + 1, len(allb)):
            a, b = allb[i], allb[j]
            overlap = a[0] <= b[1] and b[0] <= a[1] and a[2] <= b[3] and b[2] <= a[3]
            if overlap:
                raise RuntimeError("root boxes not disjoint at this precision")
    return iso
