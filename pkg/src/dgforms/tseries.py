"""Truncated power series in the cusp parameter t with coefficients in K.

A TSeries stores its nonzero coefficients sparsely and a precision ``prec``:
coefficients of t^n are certified exactly for n < prec and unknown beyond.
Reading a coefficient at or past ``prec`` raises PrecisionError.

Products of series whose coefficients all lie in A are computed by Kronecker
substitution: the bivariate (t, θ) array is packed into one big integer and
multiplied with gmpy2, which is much faster than pairwise convolution at the
precisions used here.
"""

import json
import math

import gmpy2
import numpy as np

from .errors import PrecisionError, PreconditionError
from .ring_core import THETA, PolyA, RatK, _array_to_coeffs, as_rat, poly_lcm


# -- integral kernels ----------------------------------------------------------
#
# An "integral block" is a dict exponent -> PolyA (nonzero).  The helpers below
# work on those blocks and never see RatK.


def _to_array(block, lo, rows):
    """Dense (rows x width) int64 array of block entries with lo <= n < lo+rows."""
    width = 1
    for n, a in block.items():
        if lo <= n < lo + rows and len(a.coeffs) > width:
            width = len(a.coeffs)
    arr = np.zeros((rows, width), dtype=np.int64)
    for n, a in block.items():
        if lo <= n < lo + rows:
            arr[n - lo, : len(a.coeffs)] = a.coeffs
    return arr


def _from_array(arr, lo, p):
    out = {}
    arr = np.mod(arr, p)
    for r in np.flatnonzero(arr.any(axis=1)):
        row = arr[r]
        last = np.flatnonzero(row)[-1]
        out[int(r) + lo] = PolyA._raw(p, tuple(row[: last + 1].tolist()))
    return out


def _kronecker_mul(A, B, p):
    """2-D polynomial product of nonnegative int arrays via one big-int multiply."""
    ra, da = A.shape
    rb, db = B.shape
    width = da + db - 1
    bound = (p - 1) ** 2 * min(ra, rb) * min(da, db)
    dtype = np.uint32 if bound < 2**32 else np.uint64
    itemsize = np.dtype(dtype).itemsize

    def pack(M):
        Z = np.zeros((M.shape[0], width), dtype=dtype)
        Z[:, : M.shape[1]] = M
        return gmpy2.mpz(int.from_bytes(Z.tobytes(), "little"))

    prod = pack(A) * pack(B)
    rows = ra + rb - 1
    nbytes = rows * width * itemsize
    raw = int(prod).to_bytes(nbytes, "little")
    C = np.frombuffer(raw, dtype=dtype).reshape(rows, width)
    return C.astype(np.int64) % p


def _row_gcd(block, lo):
    g = 0
    for n in block:
        g = math.gcd(g, n - lo)
        if g == 1:
            break
    return g


def _block_mul(fa, ga, prec, p):
    """Product of two integral blocks, truncated below ``prec``."""
    if not fa or not ga:
        return {}
    vf, vg = min(fa), min(ga)
    rows = prec - vf - vg
    if rows <= 0:
        return {}
    fa = {n: a for n, a in fa.items() if n - vf < rows}
    ga = {n: a for n, a in ga.items() if n - vg < rows}
    if len(fa) * len(ga) <= 48:
        acc = {}
        for i, a in fa.items():
            for j, b in ga.items():
                k = i + j
                if k < prec:
                    acc.setdefault(k, []).append(a * b)
        out = {}
        for k, terms in acc.items():
            s = terms[0] if len(terms) == 1 else _sum_polys(terms, p)
            if s:
                out[k] = s
        return out
    if len(fa) > len(ga):
        fa, ga, vf, vg = ga, fa, vg, vf
    # all exponents in t^v * F[t^g]: work in the compressed variable t^g
    g = math.gcd(_row_gcd(fa, vf), _row_gcd(ga, vg)) or 1
    rrows = (rows - 1) // g + 1
    cf = {(n - vf) // g: a for n, a in fa.items()}
    cg = {(n - vg) // g: a for n, a in ga.items()}
    B = _to_array(cg, 0, max(cg) + 1)
    if len(cf) <= 8:
        # sparse times dense: one thin Kronecker product per sparse term
        C = None
        for k, a in cf.items():
            if k >= rrows:
                continue
            part = _kronecker_mul(np.asarray([a.coeffs], dtype=np.int64), B, p)[: rrows - k]
            if C is None:
                C = np.zeros((rrows, B.shape[1] + _max_len(cf) - 1), dtype=np.int64)
            C[k : k + part.shape[0], : part.shape[1]] += part
        if C is None:
            return {}
    else:
        A = _to_array(cf, 0, max(cf) + 1)
        C = _kronecker_mul(A, B, p)[:rrows]
    out = _from_array(C, 0, p)
    lo = vf + vg
    return {lo + g * r: a for r, a in out.items()}


def _max_len(block):
    return max(len(a.coeffs) for a in block.values())


def _sum_polys(terms, p):
    acc = np.zeros(max(len(a.coeffs) for a in terms), dtype=np.int64)
    for a in terms:
        acc[: len(a.coeffs)] += a.coeffs
    return PolyA._raw(p, _array_to_coeffs(acc, p))


def _block_inverse_sparse(fa, prec, p):
    """Inverse of an integral block with constant term 1, by the sparse recurrence."""
    terms = [(k, np.asarray(a.coeffs, dtype=np.int64)) for k, a in sorted(fa.items()) if k > 0 and k < prec]
    vals = [None] * prec
    vals[0] = np.ones(1, dtype=np.int64)
    for n in range(1, prec):
        acc = None
        for k, a in terms:
            if k > n:
                break
            v = vals[n - k]
            if v is None:
                continue
            c = np.convolve(a, v)
            if acc is None:
                acc = c
            elif len(acc) >= len(c):
                acc[: len(c)] += c
            else:
                c[: len(acc)] += acc
                acc = c
        if acc is not None:
            acc = np.mod(-acc, p)
            nz = np.flatnonzero(acc)
            if len(nz):
                vals[n] = acc[: nz[-1] + 1]
    return {n: PolyA._raw(p, tuple(v.tolist())) for n, v in enumerate(vals) if v is not None}


def _block_inverse_newton(fa, prec, p):
    """Inverse of an integral block with constant term 1, by Newton iteration."""
    g = {0: PolyA.one(p)}
    m = 1
    while m < prec:
        m = min(2 * m, prec)
        fm = {n: a for n, a in fa.items() if n < m}
        fg = _block_mul(fm, g, m, p)
        # g * (2 - f g), with f g = 1 + O(t^(m/2)) so only the tail matters
        corr = {n: -a for n, a in fg.items() if n > 0}
        delta = _block_mul(g, corr, m, p)
        for n, a in delta.items():
            s = g.get(n, PolyA.zero(p)) + a
            if s:
                g[n] = s
            else:
                g.pop(n, None)
    return g


# -- the series type ---------------------------------------------------------------


class TSeries:
    """Truncated series sum a_n t^n, exact for n < prec.

    ``weight`` and ``type`` are advisory metadata recorded for modular forms.
    """

    __slots__ = ("p", "prec", "coeffs", "weight", "type")

    def __init__(self, p, coeffs, prec, weight=None, type=None):
        if prec < 0:
            raise ValueError("precision must be nonnegative")
        clean = {}
        for n in sorted(coeffs):
            if n < 0:
                raise ValueError("negative exponent")
            if n >= prec:
                continue
            c = as_rat(coeffs[n], p)
            if c.p != p:
                raise TypeError("mixing characteristics")
            if not c.is_zero():
                clean[n] = c
        self.p = p
        self.prec = prec
        self.coeffs = clean
        self.weight = weight
        self.type = type

    @classmethod
    def _raw(cls, p, coeffs, prec, weight=None, type=None):
        obj = object.__new__(cls)
        obj.p = p
        obj.prec = prec
        obj.coeffs = dict(sorted(coeffs.items()))
        obj.weight = weight
        obj.type = type
        return obj

    @classmethod
    def _from_block(cls, p, block, prec, weight=None, type=None):
        return cls._raw(p, {n: RatK.from_poly(a) for n, a in block.items() if n < prec}, prec, weight, type)

    @classmethod
    def zero(cls, p, prec):
        return cls._raw(p, {}, prec)

    @classmethod
    def one(cls, p, prec):
        return cls._raw(p, {0: RatK.one(p)} if prec > 0 else {}, prec)

    @classmethod
    def monomial(cls, p, n, prec, c=1):
        return cls(p, {n: c}, prec)

    # -- inspection ------------------------------------------------------------

    @property
    def ord(self):
        """Lowest exponent with nonzero coefficient; ``prec`` for the zero series."""
        return next(iter(self.coeffs), self.prec)

    def is_zero(self):
        return not self.coeffs

    def is_integral(self):
        return all(c.den.is_one() for c in self.coeffs.values())

    def coeff(self, n):
        if n < 0:
            raise ValueError("negative exponent")
        if n >= self.prec:
            raise PrecisionError(f"insufficient precision: t^{n} requested, series known below t^{self.prec}")
        return self.coeffs.get(n) or RatK.zero(self.p)

    __getitem__ = coeff

    def items(self):
        return self.coeffs.items()

    def with_meta(self, weight, type):
        return TSeries._raw(self.p, self.coeffs, self.prec, weight, type)

    def truncate(self, prec):
        if prec >= self.prec:
            return self
        return TSeries._raw(self.p, {n: c for n, c in self.coeffs.items() if n < prec}, prec, self.weight, self.type)

    def _meta_with(self, other):
        if isinstance(other, TSeries) and (self.weight, self.type) != (other.weight, other.type):
            return None, None
        return self.weight, self.type

    def __eq__(self, other):
        if not isinstance(other, TSeries):
            return NotImplemented
        return self.p == other.p and self.prec == other.prec and self.coeffs == other.coeffs

    def agrees_with(self, other, prec=None):
        """Coefficientwise equality below ``prec`` (default: the common precision)."""
        if prec is None:
            prec = min(self.prec, other.prec)
        if prec > self.prec or prec > other.prec:
            raise PrecisionError()
        return self.truncate(prec).coeffs == other.truncate(prec).coeffs

    def first_difference(self, other, prec=None):
        """Least exponent below ``prec`` where the coefficients differ, or None."""
        if prec is None:
            prec = min(self.prec, other.prec)
        for n in sorted(set(self.coeffs) | set(other.coeffs)):
            if n >= prec:
                break
            if self.coeffs.get(n) != other.coeffs.get(n):
                return n
        return None

    def __repr__(self):
        return f"TSeries({self.format(symbol='T')} + O(t^{self.prec}))"

    def __str__(self):
        return self.format()

    def format(self, symbol=THETA, big_oh=False):
        parts = []
        for n, c in self.coeffs.items():
            mono = "" if n == 0 else ("t" if n == 1 else f"t^{n}")
            cs = c.to_str(symbol)
            if not mono:
                parts.append(cs if (" " not in cs and "/" not in cs) else f"({cs})")
            elif c.is_one():
                parts.append(mono)
            elif " " in cs or "/" in cs:
                parts.append(f"({cs})*{mono}")
            else:
                parts.append(f"{cs}*{mono}")
        text = " + ".join(parts) if parts else "0"
        if big_oh:
            text += f" + O(t^{self.prec})"
        return text

    # -- serialization -------------------------------------------------------

    def to_json_obj(self):
        return {
            "q": self.p,
            "prec": self.prec,
            "weight": self.weight,
            "type": self.type,
            "terms": [[n, c.to_str("T")] for n, c in self.coeffs.items()],
        }

    def to_json(self):
        return json.dumps(self.to_json_obj(), ensure_ascii=False)

    @classmethod
    def from_json_obj(cls, obj):
        from .parsing import parse_rat

        p = obj["q"]
        coeffs = {int(n): parse_rat(s, p) for n, s in obj["terms"]}
        if len(coeffs) != len(obj["terms"]):
            raise ValueError("duplicate exponents in series JSON")
        return cls(p, coeffs, obj["prec"], obj.get("weight"), obj.get("type"))

    @classmethod
    def from_json(cls, text):
        return cls.from_json_obj(json.loads(text))

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other):
        if other.p != self.p:
            raise TypeError("mixing characteristics")

    def _as_series(self, other):
        if isinstance(other, TSeries):
            self._check(other)
            return other
        if isinstance(other, (int, PolyA, RatK)):
            return TSeries(self.p, {0: other}, self.prec)
        return None

    def __add__(self, other):
        other = self._as_series(other)
        if other is None:
            return NotImplemented
        prec = min(self.prec, other.prec)
        out = {n: c for n, c in self.coeffs.items() if n < prec}
        for n, c in other.coeffs.items():
            if n >= prec:
                break
            s = out[n] + c if n in out else c
            if s.is_zero():
                out.pop(n, None)
            else:
                out[n] = s
        w, m = self._meta_with(other)
        return TSeries._raw(self.p, out, prec, w, m)

    __radd__ = __add__

    def __neg__(self):
        return TSeries._raw(self.p, {n: -c for n, c in self.coeffs.items()}, self.prec, self.weight, self.type)

    def __sub__(self, other):
        other = self._as_series(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._as_series(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, c):
        """Multiply every coefficient by a scalar of K."""
        c = as_rat(c, self.p)
        if c.is_zero():
            return TSeries._raw(self.p, {}, self.prec, self.weight, self.type)
        if c.is_one():
            return self
        if c.den.is_one() and self.is_integral():
            out = {n: RatK._raw(a.num * c.num, a.den) for n, a in self.coeffs.items()}
        else:
            out = {n: a * c for n, a in self.coeffs.items()}
        return TSeries._raw(self.p, out, self.prec, self.weight, self.type)

    def shift(self, e):
        """Multiply by t^e (precision moves up by e)."""
        return TSeries._raw(
            self.p, {n + e: c for n, c in self.coeffs.items()}, self.prec + e, self.weight, self.type
        )

    def _cleared(self):
        """(D, block) with self = block / D, block integral, D monic."""
        if self.is_integral():
            return PolyA.one(self.p), {n: c.num for n, c in self.coeffs.items()}
        D = poly_lcm([c.den for c in self.coeffs.values()], self.p)
        return D, {n: c.num * D.exquo(c.den) for n, c in self.coeffs.items()}

    def __mul__(self, other):
        if isinstance(other, (int, PolyA, RatK)):
            return self.scale(other)
        if not isinstance(other, TSeries):
            return NotImplemented
        self._check(other)
        prec = min(self.prec + other.ord, other.prec + self.ord)
        Df, fa = self._cleared()
        Dg, ga = other._cleared()
        block = _block_mul(fa, ga, prec, self.p)
        D = Df * Dg
        w = m = None
        if self.weight is not None and other.weight is not None:
            w = self.weight + other.weight
            if self.type is not None and other.type is not None:
                m = self.type + other.type
                if self.p > 2:
                    m %= self.p - 1
                else:
                    m = 0
        if D.is_one():
            return TSeries._from_block(self.p, block, prec, w, m)
        out = {n: RatK(a, D) for n, a in block.items()}
        return TSeries._raw(self.p, out, prec, w, m)

    __rmul__ = __mul__

    def frobenius(self):
        """self**p, computed exactly as sum a_n^p t^(np).

        In characteristic p the unknown tail O(t^prec) contributes only
        O(t^(p*prec)), so the result is certified to p*prec.
        """
        p = self.p
        out = {n * p: c.frobenius() for n, c in self.coeffs.items()}
        w = self.weight * p if self.weight is not None else None
        m = (self.type * p) % (p - 1) if (self.type is not None and p > 2) else (0 if self.type is not None else None)
        return TSeries._raw(p, out, self.prec * p, w, m)

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a nonnegative integer")
        if e == 0:
            return TSeries.one(self.p, self.prec)
        if e == 1:
            return self
        high, low = divmod(e, self.p)
        result = (self**high).frobenius() if high else None
        base = self
        while low:
            if low & 1:
                result = base if result is None else result * base
            low >>= 1
            if low:
                base = base * base
        return result

    def inverse(self):
        """Multiplicative inverse; requires a nonzero constant term."""
        if self.prec == 0:
            return self
        c0 = self.coeffs.get(0)
        if c0 is None:
            raise PreconditionError("not a unit: constant term is zero")
        p = self.prec
        unit = self.scale(c0.inverse())
        if unit.is_integral():
            block = {n: c.num for n, c in unit.coeffs.items()}
            if len(block) <= 24:
                inv = _block_inverse_sparse(block, p, self.p)
            else:
                inv = _block_inverse_newton(block, p, self.p)
            res = TSeries._from_block(self.p, inv, p)
        else:
            res = TSeries._raw(self.p, _rat_inverse(unit.coeffs, p, self.p), p)
        return res.scale(c0.inverse())

    def substitute_monomial(self, c, e, prec=None):
        """Replace t by c*t^e."""
        if e < 1:
            raise ValueError("e must be positive")
        c = as_rat(c, self.p)
        new_prec = e * (self.prec - 1) + 1 if self.prec > 0 else 0
        if prec is not None:
            new_prec = min(new_prec, prec)
        out = {}
        cp = RatK.one(self.p)
        last = 0
        for n, a in self.coeffs.items():
            if n * e >= new_prec:
                break
            cp = cp * c ** (n - last)
            last = n
            v = a * cp
            if not v.is_zero():
                out[n * e] = v
        return TSeries._raw(self.p, out, new_prec)


def _rat_inverse(coeffs, prec, p):
    # coeffs has constant term 1
    terms = [(k, c) for k, c in coeffs.items() if k > 0]
    vals = {0: RatK.one(p)}
    for n in range(1, prec):
        s = RatK.zero(p)
        for k, c in terms:
            if k > n:
                break
            v = vals.get(n - k)
            if v is not None:
                s = s + c * v
        if not s.is_zero():
            vals[n] = -s
    return vals


# -- functional aliases -------------------------------------------------------


def ts_arith(f, g, op):
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown operation {op!r}")


def ts_pow(f, e):
    return f**e


def ts_inv(f):
    return f.inverse()


def ts_substitute_monomial(f, c, e, prec=None):
    return f.substitute_monomial(c, e, prec)


def ts_coeff(f, n):
    return f.coeff(n)


def series_sum(series, p, prec=None):
    """Sum of many series with one reduction per coefficient."""
    series = list(series)
    if prec is None:
        prec = min(s.prec for s in series)
    if all(s.is_integral() for s in series):
        acc = {}
        for s in series:
            for n, c in s.coeffs.items():
                if n >= prec:
                    break
                acc.setdefault(n, []).append(c.num)
        out = {}
        for n, terms in acc.items():
            v = terms[0] if len(terms) == 1 else _sum_polys(terms, p)
            if v:
                out[n] = RatK.from_poly(v)
        return TSeries._raw(p, out, prec)
    total = TSeries.zero(p, prec)
    for s in series:
        total = total + s.truncate(prec)
    return total

