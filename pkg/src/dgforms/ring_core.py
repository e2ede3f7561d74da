"""Exact arithmetic in F_p, A = F_p[θ] and K = F_p(θ).

Polynomials are dense tuples of residues in ``{0, ..., p-1}``, lowest degree
first, with the leading coefficient nonzero; the zero polynomial is the empty
tuple.  Rational functions are kept reduced with a monic denominator, so
equality is structural.

All values are immutable.  Only ``q = p`` prime is supported.
"""

from dataclasses import dataclass
from functools import lru_cache
import itertools

import gmpy2
import numpy as np

from .errors import PreconditionError, ZeroDivisorError

THETA = "θ"

_degree_bound = 10**6


def set_degree_bound(bound):
    """Set the global cap on polynomial degrees (default 10**6)."""
    global _degree_bound
    if bound < 1:
        raise ValueError("degree bound must be positive")
    _degree_bound = int(bound)


def degree_bound():
    return _degree_bound


def _check_degree(d):
    if d > _degree_bound:
        raise PreconditionError(f"degree overflow: {d} exceeds bound {_degree_bound}")


def check_prime(p):
    """Validate the characteristic; prime powers are rejected."""
    if not isinstance(p, int) or p < 2 or not gmpy2.is_prime(p):
        raise PreconditionError(f"q must be a prime, got {p!r}")
    return p


def _trim(c):
    n = len(c)
    while n and not c[n - 1]:
        n -= 1
    return c[:n]


def _array_to_coeffs(arr, p):
    """Reduce an integer numpy vector mod p and return trimmed coefficients."""
    arr = np.mod(arr, p)
    nz = np.flatnonzero(arr)
    if not len(nz):
        return ()
    return tuple(arr[: nz[-1] + 1].tolist())


def _mul_coeffs(a, b, p):
    if not a or not b:
        return ()
    la, lb = len(a), len(b)
    _check_degree(la + lb - 2)
    if la == 1:
        c = a[0]
        return tuple(c * x % p for x in b)
    if lb == 1:
        c = b[0]
        return tuple(c * x % p for x in a)
    if la * lb <= 400:
        out = [0] * (la + lb - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return tuple(v % p for v in out)
    conv = np.convolve(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
    return _array_to_coeffs(conv, p)


class PolyA:
    """Element of A = F_p[θ]."""

    __slots__ = ("p", "coeffs", "_hash")

    def __init__(self, p, coeffs=()):
        self.p = p
        self.coeffs = _trim(tuple(int(c) % p for c in coeffs))
        self._hash = None

    @classmethod
    def _raw(cls, p, coeffs):
        obj = object.__new__(cls)
        obj.p = p
        obj.coeffs = coeffs
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, p):
        return cls._raw(p, ())

    @classmethod
    def one(cls, p):
        return cls._raw(p, (1,))

    @classmethod
    def constant(cls, p, c):
        c %= p
        return cls._raw(p, (c,) if c else ())

    @classmethod
    def theta(cls, p):
        return cls._raw(p, (0, 1))

    @classmethod
    def monomial(cls, p, e, c=1):
        c %= p
        if not c:
            return cls._raw(p, ())
        _check_degree(e)
        return cls._raw(p, (0,) * e + (c,))

    # -- structure -------------------------------------------------------

    @property
    def degree(self):
        """Degree, or None for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self):
        return not self.coeffs

    def is_one(self):
        return self.coeffs == (1,)

    def is_monic(self):
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def is_constant(self):
        return len(self.coeffs) <= 1

    def __bool__(self):
        return bool(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def __eq__(self, other):
        if isinstance(other, PolyA):
            return self.p == other.p and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == PolyA.constant(self.p, other).coeffs
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.coeffs))
        return self._hash

    def __repr__(self):
        return f"PolyA({self.p}, {self.to_str('T')!r})"

    def __str__(self):
        return self.to_str()

    def to_str(self, symbol=THETA):
        """Canonical text: descending degree, e.g. ``2*θ^12 + θ^10 + 2``."""
        if not self.coeffs:
            return "0"
        parts = []
        for e in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[e]
            if not c:
                continue
            if e == 0:
                parts.append(str(c))
                continue
            mono = symbol if e == 1 else f"{symbol}^{e}"
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PolyA):
            if other.p != self.p:
                raise TypeError(f"mixing characteristics {self.p} and {other.p}")
            return other
        if isinstance(other, int):
            return PolyA.constant(self.p, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, p = self.coeffs, other.coeffs, self.p
        if len(a) < len(b):
            a, b = b, a
        out = [(x + y) % p for x, y in zip(a, b)]
        out.extend(a[len(b):])
        return PolyA._raw(p, _trim(tuple(out)))

    __radd__ = __add__

    def __neg__(self):
        p = self.p
        return PolyA._raw(p, tuple(-c % p for c in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return PolyA._raw(self.p, _mul_coeffs(self.coeffs, other.coeffs, self.p))

    __rmul__ = __mul__

    def shift(self, e):
        """Multiply by θ^e."""
        if not self.coeffs or e == 0:
            return self
        _check_degree(len(self.coeffs) - 1 + e)
        return PolyA._raw(self.p, (0,) * e + self.coeffs)

    def scale(self, c):
        c %= self.p
        if c == 1:
            return self
        return PolyA._raw(self.p, tuple(c * x % self.p for x in self.coeffs) if c else ())

    def monic(self):
        if not self.coeffs or self.coeffs[-1] == 1:
            return self
        return self.scale(pow(self.coeffs[-1], -1, self.p))

    def __divmod__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        b = other.coeffs
        if not b:
            raise ZeroDivisorError()
        p = self.p
        a = self.coeffs
        db = len(b) - 1
        if len(a) <= db:
            return PolyA.zero(p), self
        inv = pow(b[-1], -1, p)
        r = list(a)
        quo = [0] * (len(a) - db)
        lower = b[:db]
        for i in range(len(a) - 1 - db, -1, -1):
            c = r[i + db] * inv % p
            if c:
                quo[i] = c
                for j, y in enumerate(lower):
                    if y:
                        r[i + j] = (r[i + j] - c * y) % p
        return PolyA._raw(p, _trim(tuple(quo))), PolyA._raw(p, _trim(tuple(r[:db])))

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exquo(self, other):
        """Exact quotient; raises if ``other`` does not divide ``self``."""
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def gcd(self, other):
        """Monic gcd (zero when both inputs are zero)."""
        a, b = self, self._coerce(other)
        while b:
            a, b = b, a % b
        return a.monic()

    def frobenius(self, k=1):
        """Return self**(p**k); coefficients are fixed, exponents scale."""
        if k == 0 or len(self.coeffs) <= 1:
            return self
        step = self.p**k
        _check_degree((len(self.coeffs) - 1) * step)
        out = [0] * ((len(self.coeffs) - 1) * step + 1)
        for i, c in enumerate(self.coeffs):
            out[i * step] = c
        return PolyA._raw(self.p, tuple(out))

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a nonnegative integer")
        if e == 0:
            return PolyA.one(self.p)
        if len(self.coeffs) <= 1:
            return PolyA.constant(self.p, pow(self.lead, e, self.p))
        if self.coeffs[:-1] == (0,) * (len(self.coeffs) - 1):
            return PolyA.monomial(self.p, (len(self.coeffs) - 1) * e, pow(self.lead, e, self.p))
        _check_degree((len(self.coeffs) - 1) * e)
        p = self.p
        high, low = divmod(e, p)
        result = (self**high).frobenius() if high else PolyA.one(p)
        base = self
        while low:
            if low & 1:
                result = result * base
            low >>= 1
            if low:
                base = base * base
        return result

    def __call__(self, x):
        """Horner evaluation at an int, PolyA, or anything supporting + and *."""
        acc = 0 if isinstance(x, int) else x * 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        if isinstance(x, int):
            return acc % self.p
        return acc

    def translate(self, c):
        """Return f(θ + c)."""
        return self(PolyA._raw(self.p, ((c % self.p), 1) if c % self.p else (0, 1)))


class RatK:
    """Element of K = F_p(θ), reduced with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, int):
            raise TypeError("use RatK.constant(p, c) for integer values")
        p = num.p
        if den is None:
            den = PolyA.one(p)
        elif isinstance(den, int):
            den = PolyA.constant(p, den)
        if den.p != p:
            raise TypeError("mixing characteristics")
        if den.is_zero():
            raise ZeroDivisorError()
        if num.is_zero():
            num, den = num, PolyA.one(p)
        elif not den.is_one():
            g = num.gcd(den)
            if not g.is_one():
                num, den = num.exquo(g), den.exquo(g)
            if den.lead != 1:
                inv = pow(den.lead, -1, p)
                num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den

    @classmethod
    def _raw(cls, num, den):
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def from_poly(cls, a):
        return cls._raw(a, PolyA.one(a.p))

    @classmethod
    def constant(cls, p, c):
        return cls._raw(PolyA.constant(p, c), PolyA.one(p))

    @classmethod
    def zero(cls, p):
        return cls._raw(PolyA.zero(p), PolyA.one(p))

    @classmethod
    def one(cls, p):
        return cls._raw(PolyA.one(p), PolyA.one(p))

    @property
    def p(self):
        return self.num.p

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.num.is_one() and self.den.is_one()

    def is_integral(self):
        return self.den.is_one()

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, RatK):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (PolyA, int)):
            return self.den.is_one() and self.num == other
        return NotImplemented

    def __hash__(self):
        if self.den.is_one():
            return hash(self.num)
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatK({self.p}, {self.to_str('T')!r})"

    def __str__(self):
        return self.to_str()

    def to_str(self, symbol=THETA):
        """``num`` when the denominator is 1, else ``(num)/(den)``."""
        if self.den.is_one():
            return self.num.to_str(symbol)
        return f"({self.num.to_str(symbol)})/({self.den.to_str(symbol)})"

    def _coerce(self, other):
        if isinstance(other, RatK):
            if other.p != self.p:
                raise TypeError("mixing characteristics")
            return other
        if isinstance(other, PolyA):
            if other.p != self.p:
                raise TypeError("mixing characteristics")
            return RatK.from_poly(other)
        if isinstance(other, int):
            return RatK.constant(self.p, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den.is_one() and other.den.is_one():
            return RatK._raw(self.num + other.num, self.den)
        if self.den == other.den:
            return RatK(self.num + other.num, self.den)
        return RatK(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatK._raw(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den.is_one() and other.den.is_one():
            return RatK._raw(self.num * other.num, self.den)
        return RatK(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        if self.num.is_zero():
            raise ZeroDivisorError()
        return RatK(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return RatK._raw(self.num**e, self.den**e)

    def frobenius(self, k=1):
        return RatK._raw(self.num.frobenius(k), self.den.frobenius(k))

    def translate(self, c):
        return RatK(self.num.translate(c), self.den.translate(c))


def as_rat(x, p):
    """Coerce an int, PolyA or RatK to RatK."""
    if isinstance(x, RatK):
        return x
    if isinstance(x, PolyA):
        return RatK.from_poly(x)
    if isinstance(x, int):
        return RatK.constant(p, x)
    raise TypeError(f"cannot interpret {x!r} as an element of K")


def poly_sum(polys, p):
    """Sum of many PolyA values with a single reduction mod p."""
    polys = [a.coeffs for a in polys if a.coeffs]
    if not polys:
        return PolyA.zero(p)
    if len(polys) == 1:
        return PolyA._raw(p, polys[0])
    acc = np.zeros(max(len(c) for c in polys), dtype=np.int64)
    for c in polys:
        acc[: len(c)] += c
    return PolyA._raw(p, _array_to_coeffs(acc, p))


def rat_sum(values, p):
    """Sum of RatK values; integral inputs take a fast path."""
    values = [v for v in values if not v.is_zero()]
    if all(v.den.is_one() for v in values):
        return RatK.from_poly(poly_sum([v.num for v in values], p))
    total = RatK.zero(p)
    for v in values:
        total = total + v
    return total


def poly_lcm(polys, p):
    out = PolyA.one(p)
    for a in polys:
        if not a.is_one():
            out = (out * a).exquo(out.gcd(a))
    return out


# -- combinatorics -----------------------------------------------------------


def base_digits(n, p):
    digits = []
    while n:
        n, r = divmod(n, p)
        digits.append(r)
    return digits


def binom_mod_p(n, k, p):
    """C(n, k) mod p via Lucas' theorem; zero when k > n or k < 0."""
    if k < 0 or n < 0 or k > n:
        return 0
    result = 1
    while k:
        n, ni = divmod(n, p)
        k, ki = divmod(k, p)
        if ki > ni:
            return 0
        result = result * _small_binom(ni, ki, p) % p
    return result


@lru_cache(maxsize=None)
def _small_binom(n, k, p):
    num = den = 1
    for i in range(k):
        num = num * (n - i) % p
        den = den * (i + 1) % p
    return num * pow(den, -1, p) % p


@lru_cache(maxsize=4096)
def binom_support(n, p):
    """All (k, C(n,k) mod p) with nonzero binomial, k ascending.

    By Lucas, these are exactly the k whose base-p digits are bounded by those
    of n.
    """
    digits = base_digits(n, p) or [0]
    out = [(0, 1)]
    place = 1
    for d in digits:
        nxt = []
        for ki in range(d + 1):
            c = _small_binom(d, ki, p)
            for k, v in out:
                nxt.append((k + ki * place, v * c % p))
        out = nxt
        place *= p
    return tuple(sorted(out))


def enumerate_monic(p, d):
    """All p**d monic polynomials of exact degree d.

    Ordered lexicographically by the coefficient tuple read from θ^(d-1) down
    to θ^0, so for d = 1 the order is θ, θ+1, ..., θ+(p-1).
    """
    out = []
    for digits in itertools.product(range(p), repeat=d):
        out.append(PolyA._raw(p, tuple(reversed(digits)) + (1,)))
    return out


def frob_power(p, n):
    """θ^(p^n) as a monomial; guarded by the global degree bound."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    e = p**n
    if e > _degree_bound:
        raise PreconditionError(f"degree overflow: θ^{p}^{n} exceeds bound {_degree_bound}")
    return PolyA.monomial(p, e)


@dataclass(frozen=True)
class FqContext:
    """Characteristic carrier; validates that q is prime."""

    p: int

    def __post_init__(self):
        check_prime(self.p)

    @property
    def q(self):
        return self.p

    @property
    def theta(self):
        return PolyA.theta(self.p)

    def poly(self, coeffs):
        return PolyA(self.p, coeffs)

    def const(self, c):
        return RatK.constant(self.p, c)

    def rat(self, num, den=None):
        if isinstance(num, int):
            num = PolyA.constant(self.p, num)
        return RatK(num, den)

    def parse(self, text):
        from .parsing import parse_rat

        return parse_rat(text, self.p)

    def parse_poly(self, text):
        value = self.parse(text)
        if not value.is_integral():
            raise PreconditionError(f"{text!r} is not a polynomial")
        return value.num
