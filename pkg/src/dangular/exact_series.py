"""Exact truncated power series over the rationals.

Coefficients are ``int`` whenever the value is integral and ``Fraction``
otherwise, so integer-valued counting series never pay for rational
arithmetic.  Series are immutable; every operation returns a new object.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple, Union

Rat = Union[int, Fraction]
Monomial = Tuple[int, ...]
Poly = Dict[Monomial, Rat]


class ContractViolation(ValueError):
    """Raised when an operation is called outside its precondition."""


def norm(c) -> Rat:
    """Return ``c`` as an int if it is integral, else as a reduced Fraction."""
    if isinstance(c, int):
        return c
    c = Fraction(c)
    if c.denominator == 1:
        return c.numerator
    return c


class TruncSeries:
    """Power series known up to and including ``z**order``."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable, order: int | None = None):
        cs = [norm(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ContractViolation("truncation order must be >= 0")
        if len(cs) > order + 1:
            cs = cs[: order + 1]
        else:
            cs.extend([0] * (order + 1 - len(cs)))
        self.coeffs: List[Rat] = cs
        self.order = order

    @classmethod
    def _raw(cls, coeffs: List[Rat], order: int) -> "TruncSeries":
        # trusted constructor: coefficients already normalised, right length
        s = object.__new__(cls)
        s.coeffs = coeffs
        s.order = order
        return s

    @classmethod
    def zero(cls, order: int) -> "TruncSeries":
        return cls._raw([0] * (order + 1), order)

    @classmethod
    def one(cls, order: int) -> "TruncSeries":
        return cls.monomial(0, order)

    @classmethod
    def monomial(cls, k: int, order: int, c: Rat = 1) -> "TruncSeries":
        cs = [0] * (order + 1)
        if 0 <= k <= order:
            cs[k] = norm(c)
        return cls._raw(cs, order)

    def __getitem__(self, n: int) -> Rat:
        if n < 0:
            return 0
        if n > self.order:
            raise ContractViolation(f"coefficient {n} beyond truncation order {self.order}")
        return self.coeffs[n]

    def __len__(self) -> int:
        return self.order + 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, tuple(self.coeffs)))

    def __repr__(self) -> str:
        terms = [f"{c}*z^{i}" for i, c in enumerate(self.coeffs) if c]
        body = " + ".join(terms) if terms else "0"
        return f"TruncSeries({body} + O(z^{self.order + 1}))"

    def valuation(self) -> int | None:
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return None

    def truncate(self, order: int) -> "TruncSeries":
        if order > self.order:
            raise ContractViolation("cannot extend a truncated series")
        return TruncSeries._raw(self.coeffs[: order + 1], order)

    def __add__(self, other):
        return ts_add(self, _coerce(other, self.order))

    __radd__ = __add__

    def __sub__(self, other):
        return ts_sub(self, _coerce(other, self.order))

    def __rsub__(self, other):
        return ts_sub(_coerce(other, self.order), self)

    def __neg__(self):
        return ts_scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return ts_mul(self, other)
        return ts_scale(self, other)

    __rmul__ = __mul__

    def __pow__(self, m: int):
        return ts_pow(self, m)


def _coerce(x, order: int) -> TruncSeries:
    if isinstance(x, TruncSeries):
        return x
    return TruncSeries.monomial(0, order, x)


def _check_orders(a: TruncSeries, b: TruncSeries) -> int:
    if a.order != b.order:
        raise ContractViolation(f"order mismatch: {a.order} vs {b.order}")
    return a.order


def ts_add(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    _check_orders(a, b)
    return TruncSeries._raw([norm(x + y) for x, y in zip(a.coeffs, b.coeffs)], a.order)


def ts_sub(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    _check_orders(a, b)
    return TruncSeries._raw([norm(x - y) for x, y in zip(a.coeffs, b.coeffs)], a.order)


def ts_scale(a: TruncSeries, c) -> TruncSeries:
    c = norm(c)
    return TruncSeries._raw([norm(c * x) for x in a.coeffs], a.order)


def ts_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Cauchy product truncated at the common order."""
    N = _check_orders(a, b)
    ac, bc = a.coeffs, b.coeffs
    va, vb = a.valuation(), b.valuation()
    if va is None or vb is None:
        return TruncSeries.zero(N)
    out: List[Rat] = [0] * (N + 1)
    # skip leading zeros on both sides
    for i in range(va, N + 1 - vb):
        x = ac[i]
        if not x:
            continue
        for j in range(vb, N + 1 - i):
            y = bc[j]
            if y:
                out[i + j] += x * y
    return TruncSeries._raw([norm(c) for c in out], N)


def ts_pow(a: TruncSeries, m: int) -> TruncSeries:
    """``a**m`` by repeated squaring."""
    if m < 0:
        raise ContractViolation("ts_pow needs a nonnegative exponent; use ts_inv")
    result = TruncSeries.one(a.order)
    base = a
    while m:
        if m & 1:
            result = ts_mul(result, base)
        m >>= 1
        if m:
            base = ts_mul(base, base)
    return result


def ts_derive(a: TruncSeries) -> TruncSeries:
    """Term-by-term derivative; the result has order N-1."""
    if a.order == 0:
        raise ContractViolation("cannot differentiate an order-0 series")
    return TruncSeries._raw([norm(i * a.coeffs[i]) for i in range(1, a.order + 1)], a.order - 1)


def ts_inv(a: TruncSeries) -> TruncSeries:
    """Multiplicative inverse; requires a nonzero constant term."""
    a0 = a.coeffs[0]
    if not a0:
        raise ContractViolation("series with zero constant term is not invertible")
    N = a.order
    ac = a.coeffs
    inv0 = norm(Fraction(1) / a0) if a0 not in (1, -1) else a0
    out: List[Rat] = [inv0]
    for n in range(1, N + 1):
        s = 0
        for i in range(1, n + 1):
            if ac[i]:
                s += ac[i] * out[n - i]
        out.append(norm(-s * inv0))
    return TruncSeries._raw(out, N)


def ts_binomial(alpha_num: int, alpha_den: int, c, N: int) -> TruncSeries:
    """Expansion of ``(1 - c z)**(alpha_num/alpha_den)`` to order N.

    Uses coeff[n+1] = coeff[n] * c * (n - alpha) / (n + 1).
    """
    if alpha_den not in (1, 2):
        raise ContractViolation("exponent must be an integer or a half-integer")
    alpha = Fraction(alpha_num, alpha_den)
    c = Fraction(c)
    out: List[Rat] = [1]
    cur = Fraction(1)
    for n in range(N):
        cur = cur * c * (n - alpha) / (n + 1)
        out.append(norm(cur))
    return TruncSeries._raw(out, N)


def ts_subst_power(a: TruncSeries, p: int, N: int | None = None) -> TruncSeries:
    """Return ``z * a(z**p)`` truncated at order N (default ``p*a.order + 1``)."""
    if p < 1:
        raise ContractViolation("p must be >= 1")
    if N is None:
        N = p * a.order + 1
    if (N - 1) // p > a.order:
        raise ContractViolation("input series too short for requested order")
    out: List[Rat] = [0] * (N + 1)
    for k, c in enumerate(a.coeffs):
        idx = k * p + 1
        if idx > N:
            break
        out[idx] = c
    return TruncSeries._raw(out, N)


def power_online(y: Sequence[Rat], w: List[Rat], m: int, n: int) -> Rat:
    """Coefficient ``n`` of ``y**m`` given ``y[0..n]`` and ``w[0..n-1]``.

    Euler's recurrence for powers, valid when ``y[0] == 1``; this lets
    implicit equations such as ``Y = 1 + t Y**k`` be solved one order at
    a time without recomputing whole products.
    """
    if n == 0:
        return 1
    s = 0
    for i in range(1, n + 1):
        yi = y[i]
        if yi:
            s += (m * i - n + i) * yi * w[n - i]
    q, r = divmod(s, n) if isinstance(s, int) else (None, 1)
    return q if r == 0 else norm(Fraction(s, n))


# --------------------------------------------------------------------------
# Multivariate polynomials in x, x_1, ..., x_k and z-series of them.
# A monomial is the exponent tuple (deg_x, deg_x1, ..., deg_xk).


class SchemePoly:
    """z-series whose coefficients are sparse polynomials in x, x_1..x_k."""

    __slots__ = ("zcoeffs", "var_count")

    def __init__(self, zcoeffs: List[Poly], var_count: int):
        for poly in zcoeffs:
            for m in poly:
                if len(m) != var_count + 1:
                    raise ContractViolation("monomial arity does not match var_count")
        self.zcoeffs = zcoeffs
        self.var_count = var_count

    @property
    def order(self) -> int:
        return len(self.zcoeffs) - 1

    def coeff(self, e: int, monomial: Monomial) -> Rat:
        if e < 0 or e > self.order:
            raise ContractViolation(f"z-order {e} outside 0..{self.order}")
        return self.zcoeffs[e].get(tuple(monomial), 0)

    def __repr__(self) -> str:
        return f"SchemePoly(order={self.order}, vars={self.var_count})"


def poly_add(a: Poly, b: Poly, scale=1) -> Poly:
    out = dict(a)
    for m, v in b.items():
        out[m] = out.get(m, 0) + scale * v
    return {m: norm(v) for m, v in out.items() if v}


def poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for m1, v1 in a.items():
        for m2, v2 in b.items():
            m = tuple(i + j for i, j in zip(m1, m2))
            out[m] = out.get(m, 0) + v1 * v2
    return {m: norm(v) for m, v in out.items() if v}


def poly_divided_difference(a: Poly, j: int) -> Poly:
    """``(x a(x,..) - x_j a(x_j,..)) / (x - x_j)`` with x_j inserted at slot j.

    ``a`` must not involve x_j; the output has one more variable than the
    input, placed at position j (1-based, 1 <= j <= k+1).
    """
    out: Poly = {}
    for m, v in a.items():
        if j < 1 or j > len(m):
            raise ContractViolation(f"variable index {j} out of range")
        d = m[0]
        before, after = m[1:j], m[j:]
        for i in range(d + 1):
            nm = (i,) + before + (d - i,) + after
            out[nm] = out.get(nm, 0) + v
    return {m: norm(v) for m, v in out.items() if v}


def poly_subst_chain(a: Poly, j: int) -> Poly:
    """Differentiate in x_j, set x_j := x, and shift x_i := x_{i-1} for i > j."""
    out: Poly = {}
    for m, v in a.items():
        if j < 1 or j >= len(m):
            raise ContractViolation(f"variable index {j} out of range")
        dj = m[j]
        if dj == 0:
            continue
        nm = (m[0] + dj - 1,) + m[1:j] + m[j + 1:]
        out[nm] = out.get(nm, 0) + dj * v
    return {m: norm(v) for m, v in out.items() if v}


def sp_divided_difference(A: SchemePoly, j: int) -> SchemePoly:
    if j < 1 or j > A.var_count + 1:
        raise ContractViolation(f"variable index {j} out of range")
    return SchemePoly([poly_divided_difference(p, j) for p in A.zcoeffs], A.var_count + 1)


def sp_subst_chain(A: SchemePoly, j: int) -> SchemePoly:
    if j < 1 or j > A.var_count:
        raise ContractViolation(f"variable index {j} out of range")
    return SchemePoly([poly_subst_chain(p, j) for p in A.zcoeffs], A.var_count - 1)


def poly_eval(a: Poly, values: Sequence) -> Rat:
    """Evaluate at a point given as (x, x_1, ..., x_k)."""
    total = 0
    for m, v in a.items():
        term = v
        for base, e in zip(values, m):
            if e:
                term *= base ** e
        total += term
    return norm(total)
