"""Modular forms for GL_2(F_q[θ]) as t-expansions.

Generators:
    h = sum_(a monic) a^q t_a                  weight q+1, type 1
    g = 1 - (θ^q - θ) sum_(a monic) t_a^(q-1)  weight q-1, type 0
    Δ = h^(q-1)                                 weight q^2-1, type 0
and the A-expansions f_(k,n) = sum_a a^(k-n) G_n(t_a).

Series are cached per (name, q) at the largest precision computed so far;
smaller requests are served by truncation.
"""

import threading
from dataclasses import dataclass, field

from .carlitz import a_expansion, carlitz_d
from .errors import ParseError, PrecisionError, PreconditionError
from .hecke import hecke_apply, hecke_certified_prec
from .linalg import kernel
from .parsing import THETA_NAMES, evaluate
from .ring_core import PolyA, RatK, as_rat, check_prime
from .tseries import TSeries

_cache = {}
_lock = threading.Lock()


def _cached(key, prec, build):
    with _lock:
        hit = _cache.get(key)
    if hit is not None and hit.prec >= prec:
        return hit.truncate(prec)
    series = build(prec)
    with _lock:
        old = _cache.get(key)
        if old is None or old.prec < series.prec:
            _cache[key] = series
    return series.truncate(prec)


def clear_cache():
    with _lock:
        _cache.clear()


def form_h(q, prec):
    check_prime(q)
    return _cached(("h", q), prec, lambda P: a_expansion(q, 1, q, P).with_meta(q + 1, 1 % (q - 1) if q > 2 else 0))


def form_g(q, prec):
    check_prime(q)

    def build(P):
        s = a_expansion(q, q - 1, 0, P)
        return (TSeries.one(q, P) - s.scale(carlitz_d(q, 1))).with_meta(q - 1, 0)

    return _cached(("g", q), prec, build)


def form_delta(q, prec):
    check_prime(q)
    return _cached(("Delta", q), prec, lambda P: (form_h(q, P) ** (q - 1)).with_meta(q * q - 1, 0))


def form_f(q, k, n, prec):
    """The A-expansion f_(k,n); needs k >= n."""
    check_prime(q)
    if n < 1 or k < n:
        raise PreconditionError(f"f_{{{k},{n}}} needs 1 <= n <= k")
    return _cached((f"f_{k},{n}", q), prec, lambda P: a_expansion(q, n, k - n, P))


# -- expressions -----------------------------------------------------------


def _type_mod(q, m):
    return m % (q - 1) if q > 2 else 0


@dataclass(frozen=True)
class Generator:
    name: str
    weight: int
    type: int
    args: tuple = ()


def generator(name, q):
    if name == "g":
        return Generator("g", q - 1, 0)
    if name == "h":
        return Generator("h", q + 1, _type_mod(q, 1))
    if name in ("Delta", "Δ"):
        return Generator("Delta", q * q - 1, 0)
    if name.startswith("f_"):
        k, n = (int(x) for x in name[2:].strip("{}").split(","))
        if n < 1 or k < n:
            raise PreconditionError(f"f_{{{k},{n}}} needs 1 <= n <= k")
        return Generator(f"f_{{{k},{n}}}", k, _type_mod(q, n), (k, n))
    if name == "phi20":
        if q != 3:
            raise PreconditionError("phi20 is only defined for q = 3")
        return Generator("phi20", 20, 0)
    raise KeyError(name)


# named forms given by expressions in g and h
MACROS = {
    "phi12": (3, "h^2 g^2"),
    "phi22": (3, "h^2 g^7 - (θ^3 - θ) h^4 g^3"),
}


class FormExpr:
    """Formal K-linear combination of monomials in named generators.

    ``terms`` maps a monomial (sorted tuple of (Generator, exponent)) to its
    coefficient.  The empty monomial is the constant 1.
    """

    __slots__ = ("q", "terms")

    def __init__(self, q, terms=None):
        self.q = q
        self.terms = {m: c for m, c in (terms or {}).items() if not c.is_zero()}

    @classmethod
    def scalar(cls, q, c):
        return cls(q, {(): as_rat(c, q)})

    @classmethod
    def gen(cls, q, g):
        return cls(q, {((g, 1),): RatK.one(q)})

    def _coerce(self, other):
        if isinstance(other, FormExpr):
            return other
        if isinstance(other, (int, PolyA, RatK)):
            return FormExpr.scalar(self.q, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return FormExpr(self.q, out)

    __radd__ = __add__

    def __neg__(self):
        return FormExpr(self.q, {m: -c for m, c in self.terms.items()})

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

    @staticmethod
    def _mono_mul(m1, m2):
        acc = dict(m1)
        for g, e in m2:
            acc[g] = acc.get(g, 0) + e
        return tuple(sorted(acc.items(), key=lambda ge: ge[0].name))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = self._mono_mul(m1, m2)
                out[m] = out[m] + c1 * c2 if m in out else c1 * c2
        return FormExpr(self.q, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if set(other.terms) - {()}:
            raise PreconditionError("division by a form is not supported")
        c = other.terms.get(())
        if c is None:
            raise PreconditionError("zero divisor")
        return self * FormExpr.scalar(self.q, c.inverse())

    def __pow__(self, e):
        out = FormExpr.scalar(self.q, 1)
        for _ in range(e):
            out = out * self
        return out

    def grading(self):
        """(weight, type) shared by all terms; None for the zero expression."""
        grades = set()
        for m in self.terms:
            w = sum(g.weight * e for g, e in m)
            t = _type_mod(self.q, sum(g.type * e for g, e in m))
            grades.add((w, t))
        if len(grades) > 1:
            raise PreconditionError("graded inconsistency: " + ", ".join(f"(k={w}, m={t})" for w, t in sorted(grades)))
        return grades.pop() if grades else None

    def __str__(self):
        parts = []
        for m, c in self.terms.items():
            mono = " ".join(g.name if e == 1 else f"{g.name}^{e}" for g, e in m)
            if not mono:
                parts.append(c.to_str())
            elif c.is_one():
                parts.append(mono)
            else:
                parts.append(f"({c.to_str()}) {mono}")
        return " + ".join(parts) or "0"


def parse_form_expr(text, q):
    """Parse a form expression such as ``"h^2 g^7 - (θ^3+2θ) h^4 g^3"``."""
    check_prime(q)
    theta = FormExpr.scalar(q, PolyA.theta(q))

    def atom(name, pos):
        if name in THETA_NAMES:
            return theta
        if name in MACROS:
            mq, body = MACROS[name]
            if mq != q:
                raise PreconditionError(f"{name} is only defined for q = {mq}")
            return parse_form_expr(body, q)
        try:
            return FormExpr.gen(q, generator(name, q))
        except KeyError:
            raise ParseError(f"unknown form {name!r}", pos) from None

    return evaluate(text, atom, lambda n: FormExpr.scalar(q, n))


def generator_series(g, q, prec):
    if g.name == "g":
        return form_g(q, prec)
    if g.name == "h":
        return form_h(q, prec)
    if g.name == "Delta":
        return form_delta(q, prec)
    if g.name == "phi20":
        return form_phi20(prec)
    if g.args:
        return form_f(q, *g.args, prec)
    raise KeyError(g.name)


def eval_form_expr(e, prec, q=None):
    """Expansion of a FormExpr (or expression text) below t^prec."""
    if isinstance(e, str):
        e = parse_form_expr(e, q)
    q = e.q
    grading = e.grading()
    weight, type_ = grading if grading else (None, None)
    powers = {}

    def power(g, n):
        key = (g, n)
        if key not in powers:
            powers[key] = generator_series(g, q, prec) ** n
        return powers[key]

    total = TSeries.zero(q, prec)
    for m, c in e.terms.items():
        s = TSeries.one(q, prec)
        for g, n in m:
            s = s * power(g, n)
        total = total + s.truncate(prec).scale(c)
    return total.truncate(prec).with_meta(weight, type_)


# -- graded pieces and eigenforms ------------------------------------------


@dataclass
class GradedBasis:
    q: int
    weight: int
    type: int
    labels: list = field(default_factory=list)
    basis: list = field(default_factory=list)

    def __len__(self):
        return len(self.basis)

    @property
    def prec(self):
        return min((b.prec for b in self.basis), default=None)


def double_cuspidal_monomials(q, k, m):
    """(i, j) with i(q-1) + j(q+1) = k, j = m mod (q-1), j >= 2, sorted by j."""
    out = []
    j = 2
    while j * (q + 1) <= k:
        rest = k - j * (q + 1)
        if rest % (q - 1) == 0 and _type_mod(q, j - m) == 0:
            out.append((rest // (q - 1), j))
        j += 1
    return out


def double_cuspidal_basis(q, k, m, prec):
    """Monomials g^i h^j spanning the double-cuspidal forms of weight k, type m."""
    check_prime(q)
    if k < 1:
        raise ValueError("weight must be positive")
    if not 0 <= m < max(q - 1, 1):
        raise ValueError("type must lie in [0, q-2]")
    labels = double_cuspidal_monomials(q, k, m)
    basis = []
    if labels:
        g = form_g(q, prec)
        h = form_h(q, prec)
        for i, j in labels:
            basis.append(((g**i) * (h**j)).truncate(prec).with_meta(k, m))
    return GradedBasis(q, k, m, labels, basis)


def _normalize(series):
    lead = series.coeffs[series.ord]
    return series.scale(lead.inverse())


def _echelon_series(forms):
    """Reduced echelon form of a list of series by lowest exponent."""
    forms = [f for f in forms if not f.is_zero()]
    done = []
    while forms:
        forms.sort(key=lambda f: f.ord)
        piv = _normalize(forms.pop(0))
        n = piv.ord
        forms = [f - piv.scale(f.coeff(n)) if n in f.coeffs else f for f in forms]
        forms = [f for f in forms if not f.is_zero()]
        done = [d - piv.scale(d.coeff(n)) if n in d.coeffs else d for d in done]
        done.append(piv)
    return sorted(done, key=lambda f: f.ord)


def eigenform_search(B, eigenvalue, prime=0):
    """Normalized basis of {f in span(B) : T f = eigenvalue f} below the certified precision."""
    q = B.q
    if not B.basis:
        return []
    lam = as_rat(eigenvalue, q)
    P = B.prec
    W = hecke_certified_prec(P, q)
    if W < len(B) + 2:
        raise PrecisionError(f"insufficient precision: {W} certified coefficients for a {len(B)}-dimensional space")
    cols = []
    for b in B.basis:
        Tb = hecke_apply(b.truncate(P), prime, B.weight, W)
        cols.append(Tb - b.truncate(W).scale(lam))
    rows = [[c.coeff(n) for c in cols] for n in range(W)]
    vecs = kernel(rows, len(B), q)
    forms = []
    for v in vecs:
        s = TSeries.zero(q, P)
        for c, b in zip(v, B.basis):
            if not c.is_zero():
                s = s + b.truncate(P).scale(c)
        forms.append(s)
    return [f.with_meta(B.weight, B.type) for f in _echelon_series(forms)]


def form_phi20(prec):
    """The normalized weight-20 double-cuspidal eigenform over F_3 with eigenvalue θ^4."""

    def build(P):
        found = eigenform_search(double_cuspidal_basis(3, 20, 0, P), PolyA.monomial(3, 4))
        if len(found) != 1:
            raise PreconditionError(f"expected one eigenform in weight 20, found {len(found)}")
        return found[0]

    return _cached(("phi20", 3), prec, build)
