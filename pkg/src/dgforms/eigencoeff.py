"""Coefficient families a_(1+q^nu) of power eigenforms.

A multiset nu = {nu_1 >= ... >= nu_l} indexes n = 1 + q^nu_1 + ... + q^nu_l.
For an eigenform with T_θ f = θ^(1 + q^N_1 + ... + q^N_l) f the closed form is

    l! a_(1+q^nu) = a_(1+l) sum_σ B^σ(nu),
    B^σ(nu) = prod_i prod_(j < nu_i) (θ^(q^N_σ(i)) - θ^(q^j)).

The second half of the module works with the generic version of the
recurrence in F_p[x_1..x_l, θ], its symmetrized solution and the translation
operators D_e used to show that solution is unique.
"""

from functools import lru_cache
from itertools import combinations_with_replacement, permutations, product
from math import comb, factorial, prod

from .errors import PreconditionError, VerificationError
from .mvpoly import MVPoly
from .parsing import parse_int_list
from .ring_core import PolyA, RatK, as_rat, base_digits, frob_power, poly_sum


class Multiset(tuple):
    """Nonnegative integers in canonical non-ascending order."""

    def __new__(cls, entries=()):
        entries = tuple(entries)
        for v in entries:
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"multiset entries must be nonnegative integers, got {v!r}")
        return super().__new__(cls, sorted(entries, reverse=True))

    def __repr__(self):
        return "{" + ",".join(map(str, self)) + "}"

    __str__ = __repr__


def parse_multiset(text):
    return Multiset(parse_int_list(text))


def q_power_sum(nu, q):
    return sum(q**v for v in nu)


def index_of(nu, q):
    """n = 1 + sum q^nu_i."""
    return 1 + q_power_sum(nu, q)


def multiset_of(n, q, ell=None):
    """Inverse of index_of: the base-q digits of n - 1 give the multiplicities."""
    if n <= 1:
        raise PreconditionError(f"no multiset for index {n}")
    entries = []
    for pos, d in enumerate(base_digits(n - 1, q)):
        entries.extend([pos] * d)
    if ell is not None and len(entries) != ell:
        raise PreconditionError(f"index {n} has no representation of length {ell}")
    return Multiset(entries)


def eigen_exponents(n, q):
    """N with θ^n = θ^(1 + sum q^N_i); n = 1 gives the empty multiset."""
    if n == 1:
        return Multiset()
    return multiset_of(n, q)


def _positions(I, ell):
    if isinstance(I, int):
        if I < 0 or I >> ell:
            raise ValueError("subset mask out of range")
        return {i for i in range(ell) if I >> i & 1}
    pos = {i - 1 for i in I}
    if any(i < 0 or i >= ell for i in pos):
        raise ValueError("subset index out of range")
    return pos


def nu_plus(nu, I):
    """Entries at positions in I (1-based, or a bitmask) raised by one."""
    pos = _positions(I, len(nu))
    return Multiset(v + 1 if i in pos else v for i, v in enumerate(nu))


def nu_hat(nu, I):
    """Entries of nu at positions outside I."""
    pos = _positions(I, len(nu))
    return Multiset(v for i, v in enumerate(nu) if i not in pos)


def all_multisets(ell, max_entry):
    """Every length-ell multiset with entries <= max_entry, lexicographically increasing."""
    out = [Multiset(c) for c in combinations_with_replacement(range(max_entry + 1), ell)]
    return sorted(out)


def _check_pair(nu, N):
    nu, N = Multiset(nu), Multiset(N)
    if len(nu) != len(N):
        raise PreconditionError(f"length mismatch: |nu| = {len(nu)}, |N| = {len(N)}")
    return nu, N


@lru_cache(maxsize=None)
def _block(q, top, m):
    # prod_(j < m) (θ^(q^top) - θ^(q^j))
    x = frob_power(q, top)
    out = PolyA.one(q)
    for j in range(m):
        out = out * (x - frob_power(q, j))
    return out


def B_sigma(nu, N, sigma=None, q=3):
    """B^σ(nu); sigma is a 0-based permutation tuple, identity by default."""
    nu, N = _check_pair(nu, N)
    ell = len(nu)
    if sigma is None:
        sigma = tuple(range(ell))
    if sorted(sigma) != list(range(ell)):
        raise ValueError("sigma is not a permutation")
    out = PolyA.one(q)
    for i in range(ell):
        if nu[i]:
            if N[sigma[i]] < nu[i]:
                return PolyA.zero(q)
            out = out * _block(q, N[sigma[i]], nu[i])
    return out


def sigma_sum(nu, N, q):
    """sum over S_l of B^σ(nu)."""
    nu, N = _check_pair(nu, N)
    return poly_sum([B_sigma(nu, N, s, q) for s in permutations(range(len(nu)))], q)


def _check_factorial(ell, q):
    if ell >= q:
        raise PreconditionError("factorial vanishes mod p")


def closed_form_coeff(nu, N, a_base, q):
    """a_(1+q^nu) = a_(1+l) / l! * sum_σ B^σ(nu)."""
    nu, N = _check_pair(nu, N)
    _check_factorial(len(nu), q)
    inv = pow(factorial(len(nu)) % q, -1, q)
    return as_rat(a_base, q) * RatK.from_poly(sigma_sum(nu, N, q).scale(inv))


def vanishing_predicate(nu, N):
    """True iff N_i < nu_i for some i under the sorted pairing."""
    nu, N = _check_pair(nu, N)
    return any(n < v for v, n in zip(nu, N))


def u_set_count(nu, N):
    """|U| = prod_(j=2..l) (j - i_j + 1), i_j = min{i : N_j >= nu_i}."""
    nu, N = _check_pair(nu, N)
    if vanishing_predicate(nu, N):
        raise PreconditionError("u_set_count needs nu_i <= N_i for all i")
    total = 1
    for j in range(2, len(nu) + 1):
        i_j = next(i for i in range(1, len(nu) + 1) if N[j - 1] >= nu[i - 1])
        total *= j - i_j + 1
    return total


def u_set_count_brute(nu, N):
    """#{σ : nu_i <= N_σ(i) for all i}, i.e. the σ with B^σ(nu) != 0."""
    nu, N = _check_pair(nu, N)
    return sum(all(v <= N[s[i]] for i, v in enumerate(nu)) for s in permutations(range(len(nu))))


def lowest_term_check(nu, N, q):
    """(w, c): the lowest term of sum_σ B^σ(nu) is c θ^w.

    Raises VerificationError unless w = sum (q^nu_i - 1)/(q - 1) and
    c = |U| (-1)^w mod p.
    """
    nu, N = _check_pair(nu, N)
    count = u_set_count(nu, N)
    w = sum((q**v - 1) // (q - 1) for v in nu)
    s = sigma_sum(nu, N, q)
    low = next(i for i, c in enumerate(s.coeffs) if c)
    lead = s.coeffs[low]
    expected = count * (-1) ** w % q
    if low != w or lead != expected:
        raise VerificationError(f"lowest term {lead}*θ^{low}, expected {expected}*θ^{w}")
    return w, lead


# -- generic recurrence ----------------------------------------------------


def universal_P(nu, q):
    """P(nu) = prod_i prod_(j < nu_i) (x_i - θ^(q^j))."""
    nu = Multiset(nu)
    ell = len(nu)
    if not ell:
        raise PreconditionError("empty multiset")
    out = MVPoly.one(q, ell)
    for i, v in enumerate(nu):
        x = MVPoly.var(q, ell, i)
        for j in range(v):
            out = out * (x - MVPoly.theta_power(q, ell, q**j))
    return out


@lru_cache(maxsize=None)
def _universal_solution(nu, q):
    ell = len(nu)
    _check_factorial(ell, q)
    P = universal_P(nu, q)
    total = MVPoly.zero(q, ell)
    for s in permutations(range(ell)):
        total = total + P.permute(s)
    return total.scale(pow(factorial(ell) % q, -1, q))


def universal_solution(nu, q):
    """b_(q^nu) = (1/l!) sum_σ σ(P(nu)); symmetric in the x_i."""
    return _universal_solution(Multiset(nu), q)


def _theta_product(values, q, ell):
    return MVPoly.theta_power(q, ell, sum(q**v for v in values))


def recurrence_check(b, nu, q):
    """b_nu prod x_i == sum_I b_(nu+(I)) prod_(j not in I) θ^(q^nu_j)."""
    nu = Multiset(nu)
    ell = len(nu)

    def get(m):
        try:
            return b(m) if callable(b) else b[m]
        except KeyError:
            raise PreconditionError(f"no value for multiset {m}") from None

    lhs = get(nu) * prod((MVPoly.var(q, ell, i) for i in range(ell)), start=MVPoly.one(q, ell))
    rhs = MVPoly.zero(q, ell)
    for mask in range(1 << ell):
        rhs = rhs + get(nu_plus(nu, mask)) * _theta_product(nu_hat(nu, mask), q, ell)
    return lhs == rhs


def translation_operator(f, e):
    """D_e = D_1^e with D_1 f = f(x + 1, θ + 1) - f."""
    if e < 0 or e > f.p - 1:
        raise PreconditionError("translation order must lie in [0, q−1]")
    for _ in range(e):
        f = f.translate(1) - f
    return f


def xt_identity_check(ell, q=3):
    """prod x_i == sum_I prod_(i in I) (x_i - t_i) prod_(j not in I) t_j, as polynomials."""
    n = 2 * ell
    x = [MVPoly.var(q, n, i) for i in range(ell)]
    t = [MVPoly.var(q, n, ell + i) for i in range(ell)]
    lhs = prod(x, start=MVPoly.one(q, n))
    rhs = MVPoly.zero(q, n)
    for inside in product((False, True), repeat=ell):
        term = MVPoly.one(q, n)
        for i in range(ell):
            term = term * (x[i] - t[i] if inside[i] else t[i])
        rhs = rhs + term
    return lhs == rhs


def reconstruct_by_translation(ell, max_entry, q):
    """Rebuild b_nu for all nu with entries <= max_entry from b_(0..0) = 1.

    For nu != 0 let mu_j = max(nu_j - 1, 0), e and e' the numbers of zeros of
    nu and mu.  Applying D_e to the recurrence at mu leaves

        C(e', e) e! b_nu = b_mu D_e(prod x_i)
                          - sum_(|I| <= l-e, mu+(I) != nu) b_(mu+(I)) D_e(prod_(j not in I) θ^(q^mu_j)),

    where every b on the right belongs to a lexicographically smaller multiset.
    """
    _check_factorial(ell, q)
    xs = prod((MVPoly.var(q, ell, i) for i in range(ell)), start=MVPoly.one(q, ell))
    b = {}
    for nu in all_multisets(ell, max_entry):
        if not any(nu):
            b[nu] = MVPoly.one(q, ell)
            continue
        mu = Multiset(max(v - 1, 0) for v in nu)
        e = nu.count(0)
        e2 = mu.count(0)
        acc = b[mu] * translation_operator(xs, e)
        for mask in range(1 << ell):
            if bin(mask).count("1") > ell - e:
                continue
            m = nu_plus(mu, mask)
            if m == nu:
                continue
            if m not in b:
                raise VerificationError(f"back-substitution for {nu} needs {m}, which is not yet known")
            acc = acc - b[m] * translation_operator(_theta_product(nu_hat(mu, mask), q, ell), e)
        scale = comb(e2, e) * factorial(e) % q
        if not scale:
            raise VerificationError("vanishing normalizing constant")
        b[nu] = acc.scale(pow(scale, -1, q))
    return b


def uniqueness_probe(ell, max_entry, q):
    """The symmetrized solution is translation invariant, solves the recurrence,
    and agrees with the back-substitution reconstruction."""
    family = all_multisets(ell, max_entry)
    for nu in family:
        b = universal_solution(nu, q)
        if translation_operator(b, 1):
            return False
        if not recurrence_check(lambda m: universal_solution(m, q), nu, q):
            return False
    rebuilt = reconstruct_by_translation(ell, max_entry, q)
    return all(rebuilt[nu] == universal_solution(nu, q) for nu in family)


def specialize_solution(nu, N, q):
    """universal_solution(nu) at x_i = θ^(q^N_i)."""
    nu, N = _check_pair(nu, N)
    return universal_solution(nu, q).specialize([frob_power(q, n) for n in N])

