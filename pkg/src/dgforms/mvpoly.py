"""Sparse polynomials in F_p[x_1, ..., x_l, θ].

Exponent vectors have length l + 1; the last slot is the θ exponent.  Terms
are kept in a dict with no zero coefficients, so equality is structural.
Text output lists terms in graded-lexicographic order, largest first, with
variables named x1..xl and theta.
"""

from itertools import product

from .ring_core import PolyA, binom_support


class MVPoly:
    __slots__ = ("p", "nvars", "terms", "_hash")

    def __init__(self, p, nvars, terms=None):
        self.p = p
        self.nvars = nvars
        clean = {}
        for e, c in (terms or {}).items():
            if len(e) != nvars + 1:
                raise ValueError("exponent vector of wrong length")
            c %= p
            if c:
                clean[tuple(e)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, p, nvars, terms):
        obj = object.__new__(cls)
        obj.p = p
        obj.nvars = nvars
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, p, nvars):
        return cls._raw(p, nvars, {})

    @classmethod
    def constant(cls, p, nvars, c):
        return cls(p, nvars, {(0,) * (nvars + 1): c})

    @classmethod
    def one(cls, p, nvars):
        return cls.constant(p, nvars, 1)

    @classmethod
    def var(cls, p, nvars, i):
        """x_(i+1) for 0 <= i < nvars; i == nvars gives θ."""
        e = [0] * (nvars + 1)
        e[i] = 1
        return cls._raw(p, nvars, {tuple(e): 1})

    @classmethod
    def theta_power(cls, p, nvars, n):
        e = [0] * nvars + [n]
        return cls._raw(p, nvars, {tuple(e): 1})

    @classmethod
    def from_poly(cls, a, nvars):
        """Embed an element of A = F_p[θ]."""
        return cls._raw(a.p, nvars, {(0,) * nvars + (i,): c for i, c in enumerate(a.coeffs) if c})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = MVPoly.constant(self.p, self.nvars, other)
        if not isinstance(other, MVPoly):
            return NotImplemented
        return self.p == other.p and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.nvars, frozenset(self.terms.items())))
        return self._hash

    def _coerce(self, other):
        if isinstance(other, MVPoly):
            if other.p != self.p or other.nvars != self.nvars:
                raise TypeError("incompatible polynomial rings")
            return other
        if isinstance(other, int):
            return MVPoly.constant(self.p, self.nvars, other)
        if isinstance(other, PolyA):
            return MVPoly.from_poly(other, self.nvars)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        p = self.p
        for e, c in other.terms.items():
            v = (out.get(e, 0) + c) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MVPoly._raw(p, self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MVPoly._raw(self.p, self.nvars, {e: self.p - c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        p = self.p
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = (out.get(e, 0) + c1 * c2) % p
        return MVPoly._raw(p, self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def scale(self, c):
        c %= self.p
        if not c:
            return MVPoly.zero(self.p, self.nvars)
        return MVPoly._raw(self.p, self.nvars, {e: v * c % self.p for e, v in self.terms.items()})

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative exponent")
        result = MVPoly.one(self.p, self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    @property
    def total_degree(self):
        return max((sum(e) for e in self.terms), default=None)

    def permute(self, sigma):
        """Apply x_i -> x_sigma(i) (0-based sigma); θ is fixed."""
        n = self.nvars
        out = {}
        for e, c in self.terms.items():
            f = [0] * (n + 1)
            for i in range(n):
                f[sigma[i]] = e[i]
            f[n] = e[n]
            out[tuple(f)] = c
        return MVPoly._raw(self.p, n, out)

    def translate(self, c=1):
        """f(x_1 + c, ..., x_l + c, θ + c)."""
        p = self.p
        c %= p
        if not c:
            return self
        out = {}
        for e, coeff in self.terms.items():
            # (y + c)^m = sum_k C(m, k) c^(m-k) y^k, with Lucas supports
            expansions = [[(k, b * pow(c, m - k, p) % p) for k, b in binom_support(m, p)] for m in e]
            for choice in product(*expansions):
                v = coeff
                for _, b in choice:
                    v = v * b % p
                key = tuple(k for k, _ in choice)
                out[key] = (out.get(key, 0) + v) % p
        return MVPoly._raw(p, self.nvars, {e: v for e, v in out.items() if v})

    def specialize(self, values):
        """Substitute x_i = values[i] (elements of A); returns an element of A."""
        p = self.p
        if len(values) != self.nvars:
            raise ValueError("need one value per variable")
        cache = [{} for _ in values]
        total = PolyA.zero(p)
        for e, c in self.terms.items():
            term = PolyA.monomial(p, e[-1], c)
            for i, m in enumerate(e[:-1]):
                if m:
                    pw = cache[i].get(m)
                    if pw is None:
                        pw = cache[i][m] = values[i] ** m
                    term = term * pw
            total = total + term
        return total

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda ec: (sum(ec[0]), ec[0]), reverse=True)

    def names(self):
        return [f"x{i + 1}" for i in range(self.nvars)] + ["theta"]

    def __str__(self):
        names = self.names()
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for name, m in zip(names, e):
                if m == 1:
                    factors.append(name)
                elif m:
                    factors.append(f"{name}^{m}")
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts) or "0"

    def __repr__(self):
        return f"MVPoly({self})"

    def to_json_obj(self):
        return {"p": self.p, "vars": self.names(), "terms": [[list(e), c] for e, c in self.sorted_terms()]}
