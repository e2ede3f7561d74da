"""The Hecke operator T_p for monic primes p = θ + c of degree one.

On t-expansions f = sum a_n t^n the operator acts by

    a_n(T f) = p^k sum_{jq + s(q-1) = n} (-1)^s C(j+s-1, s) p^s a_j
             + sum_{i=0}^{n-1} C(n-1, i) p^(n-i) a_(n + i(q-1)),

so a_n(T f) reads coefficients up to index n + (n-1)(q-1).  The operator
therefore shrinks precision: see ``hecke_required_prec`` and
``hecke_certified_prec``.  At n = 0 only the term j = s = 0 survives, giving
a_0(T f) = p^k a_0; this lets the operator act on the Eisenstein series g.
"""

from dataclasses import dataclass
from functools import lru_cache

from .errors import PrecisionError, PreconditionError
from .ring_core import PolyA, RatK, as_rat, binom_mod_p, binom_support, check_prime, poly_sum
from .tseries import TSeries


@dataclass(frozen=True)
class DegOnePrime:
    """The monic degree-one prime θ + c of F_q[θ]."""

    q: int
    c: int = 0

    def __post_init__(self):
        check_prime(self.q)
        object.__setattr__(self, "c", self.c % self.q)

    @property
    def poly(self):
        return PolyA(self.q, (self.c, 1))

    @classmethod
    def coerce(cls, prime, q):
        if isinstance(prime, DegOnePrime):
            return prime
        if isinstance(prime, int):
            return cls(q, prime)
        if isinstance(prime, PolyA):
            if prime.degree != 1:
                raise PreconditionError("unsupported prime degree")
            if not prime.is_monic():
                raise PreconditionError("prime must be monic")
            return cls(q, prime[0])
        raise TypeError(f"cannot interpret {prime!r} as a prime")

    def __str__(self):
        return self.poly.to_str()


def hecke_required_prec(out_prec, q):
    """Input precision needed to certify T f below t^out_prec."""
    if out_prec < 1:
        raise ValueError("out_prec must be positive")
    top = out_prec - 1
    return max(1, top + (top - 1) * (q - 1) + 1)


def hecke_certified_prec(in_prec, q):
    """Largest out_prec with hecke_required_prec(out_prec) <= in_prec."""
    if in_prec < 1:
        return 0
    return (in_prec + 2 * q - 2) // q


class _Powers:
    def __init__(self, prime):
        self.base = prime.poly
        self.shift = prime.c == 0
        self.cache = [PolyA.one(prime.q)]

    def __getitem__(self, e):
        if self.shift:
            return None
        while len(self.cache) <= e:
            self.cache.append(self.cache[-1] * self.base)
        return self.cache[e]

    def times(self, e, a):
        if self.shift:
            return a.shift(e)
        return self[e] * a


@lru_cache(maxsize=None)
def _first_sum_terms(n, q):
    """(j, s, sign * C(j+s-1, s) mod q) for jq + s(q-1) = n, nonzero only."""
    out = []
    for s in range(n // (q - 1) + 1):
        rest = n - s * (q - 1)
        if rest % q:
            continue
        j = rest // q
        if j == 0:
            c = 1 if s == 0 else 0
        else:
            c = binom_mod_p(j + s - 1, s, q)
        if s % 2:
            c = -c % q
        if c:
            out.append((j, s, c))
    return out


def _hecke_block(block, prime, k, out_prec, q):
    pw = _Powers(prime)
    out = {}
    for n in range(out_prec):
        first = []
        for j, s, c in _first_sum_terms(n, q):
            a = block.get(j)
            if a is not None:
                first.append(pw.times(s, a).scale(c))
        terms = []
        if first:
            terms.append(pw.times(k, poly_sum(first, q)))
        if n:
            for i, c in binom_support(n - 1, q):
                a = block.get(n + i * (q - 1))
                if a is not None:
                    terms.append(pw.times(n - i, a).scale(c))
        if terms:
            v = poly_sum(terms, q)
            if v:
                out[n] = v
    return out


def hecke_apply(f, prime=0, k=None, out_prec=None):
    """T_{p,k} f for p = θ + c, certified below the returned precision."""
    q = f.p
    prime = DegOnePrime.coerce(prime, q)
    if prime.q != q:
        raise PreconditionError("prime and series live over different fields")
    if k is None:
        k = f.weight
        if k is None:
            raise PreconditionError("weight unknown: pass k explicitly")
    elif f.weight is not None and f.weight != k:
        raise PreconditionError(f"weight mismatch: series has weight {f.weight}, operator weight {k}")
    best = hecke_certified_prec(f.prec, q)
    if out_prec is None:
        out_prec = best
    elif out_prec > best:
        need = hecke_required_prec(out_prec, q)
        raise PrecisionError(f"insufficient precision: T f below t^{out_prec} needs input precision {need}, have {f.prec}")
    D, block = f._cleared()
    res = _hecke_block(block, prime, k, out_prec, q)
    if D.is_one():
        return TSeries._from_block(q, res, out_prec, f.weight, f.type)
    return TSeries._raw(q, {n: RatK(a, D) for n, a in res.items()}, out_prec, f.weight, f.type)


@dataclass(frozen=True)
class EigenReport:
    ok: bool
    prec: int
    exponent: int | None = None
    lhs: RatK | None = None
    rhs: RatK | None = None

    def __bool__(self):
        return self.ok


def eigen_check(f, prime, k, lam, out_prec=None):
    """Compare T_{p,k} f with lam * f below the certified precision."""
    Tf = hecke_apply(f, prime, k, out_prec)
    lam = as_rat(lam, f.p)
    rhs = f.truncate(Tf.prec).scale(lam)
    n = Tf.first_difference(rhs)
    if n is None:
        return EigenReport(True, Tf.prec)
    return EigenReport(False, Tf.prec, n, Tf.coeff(n), rhs.coeff(n))


def _theta_power(q, e):
    return RatK.from_poly(PolyA.monomial(q, e))


def lemma_recurrence_check(f, nu, lam_exponents):
    """Check the degree-one recurrence for the family a_(1+q^nu) of an eigenform.

    With λ = θ^(1 + sum q^N_i) the eigenvalue of T_θ on f, verifies

        λ a_(1+q^nu) = sum_i C(q^nu, i) θ^(1+q^nu-i) a_(1+q^nu+i(q-1))
                     = sum_I θ^(1 + q^(nu hat(I))) a_(1 + q^(nu+(I)))

    exactly, with I running over all subsets of positions of nu.
    """
    from .eigencoeff import Multiset, nu_hat, nu_plus, q_power_sum

    q = f.p
    nu = Multiset(nu)
    ell = len(nu)
    if ell > q - 1:
        raise PreconditionError("length exceeds q−1")
    top = 1 + q_power_sum(nu_plus(nu, (1 << ell) - 1), q)
    if top >= f.prec:
        raise PrecisionError(f"insufficient precision: need t^{top}, series known below t^{f.prec}")
    Q = q_power_sum(nu, q)
    lam = _theta_power(q, 1 + sum(q**N for N in lam_exponents))
    lhs = lam * f.coeff(1 + Q)
    middle = RatK.zero(q)
    for i, c in binom_support(Q, q):
        a = f.coeff(1 + Q + i * (q - 1))
        if not a.is_zero():
            middle = middle + a * _theta_power(q, 1 + Q - i) * c
    right = RatK.zero(q)
    for mask in range(1 << ell):
        a = f.coeff(1 + q_power_sum(nu_plus(nu, mask), q))
        if not a.is_zero():
            right = right + a * _theta_power(q, 1 + q_power_sum(nu_hat(nu, mask), q))
    return lhs == middle == right
