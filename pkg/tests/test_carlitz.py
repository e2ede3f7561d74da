import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dgforms.carlitz import AddPoly, _max_degree, a_expansion, carlitz_d, carlitz_rho, goss_poly, t_a_series
from dgforms.errors import PreconditionError
from dgforms.parsing import parse_rat
from dgforms.ring_core import FqContext, PolyA, RatK, enumerate_monic
from dgforms.tseries import TSeries


def P(text, q=3):
    return FqContext(q).parse_poly(text)


def naive_t_a(a, prec):
    # t_a = t^Q / u(t) with u = t^Q ρ_a(1/t), inverted by schoolbook recursion
    q = a.p
    rho = carlitz_rho(a).coeffs
    Q = q**a.degree
    u = {Q - q**i: c for i, c in enumerate(rho) if not c.is_zero()}
    inv = [RatK.one(q)]
    for n in range(1, max(prec - Q, 0)):
        acc = RatK.zero(q)
        for i, c in u.items():
            if 0 < i <= n:
                acc = acc + c * inv[n - i]
        inv.append(-acc)
    return TSeries(q, {n + Q: c for n, c in enumerate(inv) if n + Q < prec}, prec)


def compose(f, g, prec):
    total = TSeries.zero(f.p, prec)
    for n, c in f.coeffs.items():
        total = total + (g**n).truncate(prec) * c
    return total.truncate(prec)


def test_rho_examples():
    assert carlitz_rho(PolyA.one(3)) == AddPoly(3, [1])
    assert carlitz_rho(PolyA.theta(3)) == AddPoly(3, [PolyA.theta(3), 1])
    assert carlitz_rho(P("θ^2")) == AddPoly(3, [P("θ^2"), P("θ^3 + θ"), 1])
    assert str(carlitz_rho(P("θ^2"))) == "x^9 + (θ^3 + θ)*x^3 + θ^2*x"


def test_rho_zero_rejected():
    with pytest.raises(PreconditionError, match="zero argument"):
        carlitz_rho(PolyA.zero(3))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.data())
def test_rho_is_monoid_action(p, data):
    coeffs = st.lists(st.integers(0, p - 1), min_size=1, max_size=4)
    a = PolyA(p, data.draw(coeffs))
    b = PolyA(p, data.draw(coeffs))
    if a.is_zero() or b.is_zero():
        return
    ra, rb = carlitz_rho(a), carlitz_rho(b)
    assert carlitz_rho(a * b) == ra.compose(rb)
    assert carlitz_rho(a).frobenius_degree == a.degree
    assert carlitz_rho(a).coeffs[0] == RatK.from_poly(a)
    if not (a + b).is_zero():
        n = max(len(ra.coeffs), len(rb.coeffs))
        pad = lambda f: list(f.coeffs) + [RatK.zero(p)] * (n - len(f.coeffs))
        assert carlitz_rho(a + b) == AddPoly(p, [x + y for x, y in zip(pad(ra), pad(rb))])


def test_carlitz_d():
    assert carlitz_d(3, 0).is_one()
    assert carlitz_d(3, 1) == P("θ^3 - θ")
    assert carlitz_d(3, 2) == P("θ^9 - θ") * P("θ^3 - θ") ** 3
    assert carlitz_d(5, 1) == P("θ^5 - θ", 5)


def test_carlitz_d_is_product_of_monics():
    # d_i is the product of all monic polynomials of degree i
    for q in (2, 3):
        for i in range(3):
            prod = PolyA.one(q)
            for a in enumerate_monic(q, i):
                prod = prod * a
            assert carlitz_d(q, i) == prod


def test_goss_examples():
    assert goss_poly(3, 2).coeffs == {2: RatK.one(3)}
    G4 = goss_poly(3, 4)
    assert G4.coeffs == {2: RatK(PolyA.one(3), P("θ^3 - θ")), 4: RatK.one(3)}
    assert G4.format() == "X^4 + ((1)/(θ^3 + 2*θ))*X^2"
    assert goss_poly(3, 12).coeffs == G4.power(3)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_goss_invariants(q):
    for n in range(1, 31):
        G = goss_poly(q, n)
        assert 0 not in G.coeffs
        assert G.degree == n and G.coeffs[n].is_one()
        assert all((j - n) % (q - 1) == 0 for j in G.coeffs)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_goss_p_power(q):
    for n in range(1, 11):
        lhs = goss_poly(q, q * n).coeffs
        rhs = goss_poly(q, n).power(q)
        assert lhs == rhs
        # and independently: p-th power only moves exponents and twists coefficients
        assert lhs == {q * j: c.frobenius() for j, c in goss_poly(q, n).coeffs.items()}


def test_goss_json():
    obj = goss_poly(3, 4).to_json_obj()
    assert obj == {"n": 4, "terms": [[2, "(1)/(T^3 + 2*T)"], [4, "1"]]}


def test_t_a_examples():
    assert t_a_series(PolyA.one(3), 10) == TSeries(3, {1: RatK.one(3)}, 10)
    th = parse_rat("θ", 3)
    expected = TSeries(3, {3 + 2 * i: (-th) ** i for i in range(12)}, 26)
    assert t_a_series(PolyA.theta(3), 26) == expected
    a1 = parse_rat("θ + 1", 3)
    expected = TSeries(3, {3 + 2 * i: (-a1) ** i for i in range(12)}, 26)
    assert t_a_series(P("θ + 1"), 26) == expected


def test_t_a_errors():
    with pytest.raises(PreconditionError, match="monic required"):
        t_a_series(P("2θ"), 10)
    with pytest.raises(PreconditionError, match="zero argument"):
        t_a_series(PolyA.zero(3), 10)


@pytest.mark.parametrize("q,a", [(3, "θ^2 + 1"), (3, "θ^2 + 2θ + 2"), (5, "θ^2 + 3"), (2, "θ^3 + θ + 1")])
def test_t_a_against_naive_inversion(q, a):
    a = P(a, q)
    got = t_a_series(a, 60)
    assert got == naive_t_a(a, 60)
    assert all(c.is_integral() for c in got.coeffs.values())
    assert got.ord == q**a.degree


def test_t_a_composition():
    # t_(ab) = t_a(t_b)
    prec = 40
    th = PolyA.theta(3)
    a1 = P("θ + 1")
    assert t_a_series(th * a1, prec) == compose(t_a_series(th, prec), t_a_series(a1, prec), prec)


def test_a_expansion_h_squares_to_delta_head():
    h = a_expansion(3, 1, 3, 32)
    assert (h.weight, h.type) == (4, 1)
    assert h.coeff(0).is_zero() and h.coeff(1).is_one()
    d = (h * h).truncate(9)
    assert d == TSeries(3, {2: RatK.one(3), 6: RatK(PolyA(3, (2,))), 8: parse_rat("θ^3 + 2θ", 3)}, 9)


def test_a_expansion_zero_below_order():
    assert a_expansion(3, 2, 0, 2).is_zero()
    assert a_expansion(3, 2, 0, 2).prec == 2


@pytest.mark.parametrize("q,n,w,prec", [(3, 1, 3, 60), (3, 2, 0, 60), (3, 4, 18, 40), (5, 1, 5, 60), (2, 3, 1, 40)])
def test_a_expansion_truncation_safety(q, n, w, prec):
    base = a_expansion(q, n, w, prec)
    more = a_expansion(q, n, w, prec, max_degree=_max_degree(q, n, prec) + 1)
    assert base == more


def test_a_expansion_by_direct_sum():
    # f_{6,2} at q=3 as a literal sum over monic a of degree <= 2 of a^4 G_2(t_a)
    prec = 30
    G = goss_poly(3, 2)
    total = TSeries.zero(3, prec)
    for d in range(3):
        for a in enumerate_monic(3, d):
            total = total + G.evaluate(naive_t_a(a, prec)).truncate(prec).scale(RatK.from_poly(a**4))
    assert a_expansion(3, 2, 4, prec) == total
