"""Carlitz module, Carlitz factorial sequence, Goss polynomials and A-expansions.

Conventions: ρ_θ(x) = θx + x^q, the cusp parameter satisfies
t(az) = 1/ρ_a(1/t(z)), and the Goss polynomials are those of the Carlitz
period lattice, whose exponential has coefficients 1/d_i.
"""

from functools import lru_cache
import json

from .errors import PreconditionError
from .ring_core import THETA, PolyA, RatK, as_rat, check_prime, enumerate_monic, frob_power
from .tseries import TSeries, _block_inverse_sparse, _block_mul, series_sum


class AddPoly:
    """F_q-linear polynomial sum_i c_i x^(q^i) with coefficients in K."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p, coeffs):
        coeffs = [as_rat(c, p) for c in coeffs]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.p = p
        self.coeffs = tuple(coeffs)

    @property
    def frobenius_degree(self):
        return len(self.coeffs) - 1

    def __eq__(self, other):
        if not isinstance(other, AddPoly):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __repr__(self):
        return f"AddPoly({self})"

    def __str__(self):
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            mono = "x" if i == 0 else f"x^{self.p ** i}"
            cs = c.to_str()
            if c.is_one():
                parts.append(mono)
            else:
                parts.append(f"({cs})*{mono}" if " " in cs or "/" in cs else f"{cs}*{mono}")
        return " + ".join(parts) or "0"

    def compose(self, other):
        """(self ∘ other)(x) = self(other(x))."""
        out = [RatK.zero(self.p)] * (len(self.coeffs) + len(other.coeffs) - 1 or 1)
        for i, c in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + c * b.frobenius(i)
        return AddPoly(self.p, out)

    def __call__(self, x):
        """Evaluate at an element of K or at a series."""
        total = x * 0
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                total = total + (x ** (self.p**i)) * c
        return total


def carlitz_rho(a):
    """The Carlitz action ρ_a as an additive polynomial."""
    if a.is_zero():
        raise PreconditionError("zero argument")
    return AddPoly(a.p, _rho_coeffs(a.p, a.coeffs))


@lru_cache(maxsize=4096)
def _rho_coeffs(p, acoeffs):
    # ρ_a = sum_k a_k ρ_{θ^k}; ρ_{θ^(k+1)} = (θ + τ) ρ_{θ^k}
    theta = PolyA.theta(p)
    power = [PolyA.one(p)]
    total = [PolyA.zero(p)] * len(acoeffs)
    for k, ak in enumerate(acoeffs):
        if k:
            nxt = [PolyA.zero(p)] * (len(power) + 1)
            for j, b in enumerate(power):
                nxt[j] = nxt[j] + theta * b
                nxt[j + 1] = nxt[j + 1] + b.frobenius()
            power = nxt
        if ak:
            for j, b in enumerate(power):
                total[j] = total[j] + b.scale(ak)
    return tuple(total)


@lru_cache(maxsize=None)
def carlitz_d(q, i):
    """d_0 = 1, d_i = (θ^(q^i) - θ) d_(i-1)^q."""
    check_prime(q)
    if i < 0:
        raise ValueError("i must be nonnegative")
    if i == 0:
        return PolyA.one(q)
    return (frob_power(q, i) - PolyA.theta(q)) * carlitz_d(q, i - 1).frobenius()


class GossPoly:
    """Goss polynomial G_n of the Carlitz lattice: exponent -> coefficient in K."""

    __slots__ = ("p", "n", "coeffs")

    def __init__(self, p, n, coeffs):
        self.p = p
        self.n = n
        self.coeffs = {j: c for j, c in sorted(coeffs.items()) if not c.is_zero()}

    @property
    def degree(self):
        return max(self.coeffs) if self.coeffs else None

    def __eq__(self, other):
        if not isinstance(other, GossPoly):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __repr__(self):
        return f"GossPoly(n={self.n}, {self})"

    def __str__(self):
        return self.format()

    def format(self, symbol=THETA):
        parts = []
        for j in sorted(self.coeffs, reverse=True):
            c = self.coeffs[j]
            mono = "X" if j == 1 else f"X^{j}"
            cs = c.to_str(symbol)
            if c.is_one():
                parts.append(mono)
            else:
                parts.append(f"({cs})*{mono}" if " " in cs or "/" in cs else f"{cs}*{mono}")
        return " + ".join(parts) or "0"

    def to_json_obj(self):
        return {"n": self.n, "terms": [[j, c.to_str("T")] for j, c in self.coeffs.items()]}

    def to_json(self):
        return json.dumps(self.to_json_obj())

    def power(self, e):
        """Coefficients of G_n(X)^e as an exponent -> RatK dict."""
        result = {0: RatK.one(self.p)}
        for _ in range(e):
            nxt = {}
            for i, a in result.items():
                for j, b in self.coeffs.items():
                    nxt[i + j] = nxt.get(i + j, RatK.zero(self.p)) + a * b
            result = {k: v for k, v in nxt.items() if not v.is_zero()}
        return result

    def evaluate(self, x):
        """G_n(x) for a TSeries (or any ring element supporting ** and +)."""
        total = None
        for j, c in self.coeffs.items():
            term = (x**j) * c
            total = term if total is None else total + term
        return total


@lru_cache(maxsize=None)
def goss_poly(q, n):
    """G_n with G_n = X^n for n <= q and
    G_n = X (G_(n-1) + sum_(i>=1) G_(n-q^i) / d_i) otherwise."""
    check_prime(q)
    if n < 1:
        raise ValueError("n must be positive")
    if n <= q:
        return GossPoly(q, n, {n: RatK.one(q)})
    acc = dict(goss_poly(q, n - 1).coeffs)
    i = 1
    while q**i < n:
        inv = RatK(PolyA.one(q), carlitz_d(q, i))
        for j, c in goss_poly(q, n - q**i).coeffs.items():
            acc[j] = acc.get(j, RatK.zero(q)) + c * inv
        i += 1
    return GossPoly(q, n, {j + 1: c for j, c in acc.items()})


def _ta_unit(a, prec):
    """(Q, u, v) with t_a = t^Q * v, v = 1/u, u = t^Q ρ_a(1/t), as integral blocks.

    v is computed to relative precision prec - Q.
    """
    q = a.p
    Q = q**a.degree
    rho = _rho_coeffs(q, a.coeffs)
    u = {Q - q**i: c for i, c in enumerate(rho) if c}
    r = prec - Q
    v = _block_inverse_sparse(u, r, q) if r > 0 else {}
    return Q, u, v


def _frob_block(block, k, q, prec):
    step = q**k
    return {n * step: a.frobenius(k) for n, a in block.items() if n * step < prec}


def _ta_power_block(Q, u, v, j, prec, q):
    """Block of t_a^j below t^prec.

    Uses v^(q^k) = Frobenius twists of v (free in characteristic q) and, for a
    base-q digit c > 1, v^c = v^q * u^(q-c) with u a sparse polynomial.
    """
    r = prec - j * Q
    if r <= 0:
        return {}
    result = None
    k = 0
    jj = j
    while jj:
        jj, c = divmod(jj, q)
        if c == 1:
            piece = _frob_block(v, k, q, r)
        elif c > 1:
            upow = {0: PolyA.one(q)}
            for _ in range(q - c):
                upow = _block_mul(upow, u, r, q)
            piece = _block_mul(_frob_block(v, k + 1, q, r), _frob_block(upow, k, q, r), r, q)
        else:
            k += 1
            continue
        result = piece if result is None else _block_mul(result, piece, r, q)
        k += 1
    return {n + j * Q: x for n, x in result.items()}


def t_a_series(a, prec):
    """Expansion of t(az) in t; lowest term t^(q^deg a), coefficients in A."""
    if a.is_zero():
        raise PreconditionError("zero argument")
    if not a.is_monic():
        raise PreconditionError("monic required")
    q = a.p
    Q, u, v = _ta_unit(a, prec)
    if prec <= Q:
        return TSeries.zero(q, prec)
    return TSeries._from_block(q, {n + Q: x for n, x in v.items()}, prec)


def _max_degree(q, n, prec):
    d = -1
    while n * q ** (d + 1) < prec:
        d += 1
    return d


def a_expansion(q, n, weight_exp, prec, max_degree=None):
    """sum over monic a of a^weight_exp * G_n(t_a), truncated below t^prec.

    Monic a of degree d contribute from t^(n q^d) on, so only degrees with
    n q^d < prec are summed unless ``max_degree`` forces more.
    """
    check_prime(q)
    if n < 1:
        raise ValueError("n must be positive")
    G = goss_poly(q, n)
    D = _max_degree(q, n, prec) if max_degree is None else max_degree
    # sum_a a^w t_a^j for each j in the support of G_n; all integral
    sums = {j: [] for j in G.coeffs}
    for d in range(D + 1):
        for a in enumerate_monic(q, d):
            Q, u, v = _ta_unit(a, prec)
            if Q >= prec:
                continue
            aw = a**weight_exp
            for j in G.coeffs:
                blk = _ta_power_block(Q, u, v, j, prec, q)
                if blk and not aw.is_one():
                    blk = _block_mul(blk, {0: aw}, prec, q)
                if blk:
                    sums[j].append(TSeries._from_block(q, blk, prec))
    total = TSeries.zero(q, prec)
    for j, c in G.coeffs.items():
        if sums[j]:
            total = total + series_sum(sums[j], q, prec).scale(c)
    return total.with_meta(weight_exp + n, n % (q - 1) if q > 2 else 0)
