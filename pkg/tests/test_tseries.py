import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dgforms.errors import PrecisionError, PreconditionError
from dgforms.forms import eval_form_expr, form_g
from dgforms.parsing import parse_rat
from dgforms.ring_core import PolyA, RatK
from dgforms.tseries import TSeries, ts_arith, ts_coeff, ts_inv, ts_pow, ts_substitute_monomial


def S(p, terms, prec):
    return TSeries(p, {n: parse_rat(c, p) if isinstance(c, str) else c for n, c in terms.items()}, prec)


def naive_mul(f, g, prec):
    out = {}
    for i, a in f.coeffs.items():
        for j, b in g.coeffs.items():
            if i + j < prec:
                out[i + j] = out.get(i + j, RatK.zero(f.p)) + a * b
    return TSeries(f.p, out, prec)


@st.composite
def series(draw, p=None, prec=50, integral=False, density=0.4):
    p = p or draw(st.sampled_from([3, 5]))
    coeffs = {}
    for n in range(prec):
        if draw(st.floats(0, 1)) < density:
            num = PolyA(p, draw(st.lists(st.integers(0, p - 1), max_size=4)))
            den = PolyA.one(p)
            if not integral and draw(st.booleans()):
                den = PolyA(p, draw(st.lists(st.integers(0, p - 1), min_size=1, max_size=3)) + [1])
            coeffs[n] = RatK(num, den)
    return TSeries(p, coeffs, prec)


def test_square_drops_beyond_precision():
    f = S(3, {1: 1, 5: 1}, 10)
    # f known mod t^10 with ord 1, so f^2 is known mod t^11
    assert f * f == S(3, {2: 1, 6: 2, 10: 1}, 11)
    assert (f * f).truncate(10) == S(3, {2: 1, 6: 2}, 10)


def test_product_precision_rule():
    f = S(3, {1: 1, 5: 1}, 10)
    g = S(3, {3: 1}, 7)
    assert (f * g).prec == min(10 + 3, 7 + 1)


def test_additive_inverse():
    f = S(3, {0: "θ", 4: "θ^2 + 1"}, 12)
    assert (f + (-f)).is_zero()
    assert ts_arith(f, f, "sub").is_zero()


def test_associativity_on_forms():
    g = form_g(3, 60)
    delta = eval_form_expr("Delta", 60, 3)
    h = eval_form_expr("h", 60, 3)
    assert (delta * (g * g)).truncate(60) == ((h * h) * g * g).truncate(60)


def test_pow_examples():
    h = eval_form_expr("h", 32, 3)
    assert ts_pow(h, 2).ord == 2 and ts_pow(h, 2).coeff(2).is_one()
    assert ts_pow(h, 1) == h
    for p in (3, 5):
        one_t = S(p, {0: 1, 1: 1}, 20)
        assert one_t**p == S(p, {0: 1, p: 1}, 20 * p).truncate(20 * p)


def test_frobenius_precision_is_p_times():
    f = S(3, {0: 1, 1: "θ", 2: 1}, 10)
    assert f.frobenius().prec == 30
    assert f.frobenius().truncate(10) == naive_mul(naive_mul(f, f, 10), f, 10)


def test_inverse_geometric():
    f = S(3, {0: 1, 2: "2*θ"}, 15)  # 1 - θ t^2
    inv = ts_inv(f)
    expected = S(3, {2 * i: parse_rat("θ", 3) ** i for i in range(8)}, 15)
    assert inv == expected


def test_inverse_round_trip():
    f = S(3, {0: 1, 2: "θ"}, 30)
    assert (ts_inv(f) * f).truncate(30) == TSeries.one(3, 30)


def test_inverse_matches_long_division():
    # t_θ = t^3 / (1 + θ t^2) for q = 3, by explicit long division
    prec = 40
    th = parse_rat("θ", 3)
    quotient = {}
    rem = {0: RatK.one(3)}
    for n in range(prec):
        c = rem.get(n)
        if c is None or c.is_zero():
            continue
        quotient[n] = c
        rem[n + 2] = rem.get(n + 2, RatK.zero(3)) - c * th
    expected = TSeries(3, {n + 3: c for n, c in quotient.items()}, prec)
    got = ts_inv(S(3, {0: 1, 2: "θ"}, prec - 3)).shift(3)
    assert got == expected


def test_not_a_unit():
    with pytest.raises(PreconditionError, match="not a unit"):
        S(3, {1: 1}, 10).inverse()


def test_substitute_monomial():
    assert ts_substitute_monomial(S(3, {2: 1}, 10), 1, 3) == S(3, {6: 1}, 28)
    assert ts_substitute_monomial(S(3, {1: 1}, 10), parse_rat("θ", 3), 1) == S(3, {1: "θ"}, 10)
    assert ts_substitute_monomial(S(3, {1: 1}, 10), 1, 2, prec=7).prec == 7


def test_goss_g4_at_t():
    from dgforms.carlitz import goss_poly

    t = S(3, {1: 1}, 20)
    expected = S(3, {4: 1, 2: "1/(θ^3 - θ)"}, 20)
    assert goss_poly(3, 4).evaluate(t).truncate(20) == expected


def test_coefficients_and_precision_contract():
    delta = eval_form_expr("Delta", 32, 3)
    assert ts_coeff(delta, 8) == parse_rat("θ^3 + 2θ", 3)
    assert ts_coeff(delta, 3).is_zero()
    assert ts_coeff(delta, 0).is_zero()
    with pytest.raises(PrecisionError, match="insufficient precision"):
        ts_coeff(delta, 32)
    with pytest.raises(PrecisionError):
        delta[40]


def test_json_round_trip():
    f = S(3, {0: "1/(θ^3-θ)", 4: "2θ^2 + 1", 9: 2}, 12).with_meta(4, 1)
    back = TSeries.from_json(f.to_json())
    assert back == f and back.weight == 4 and back.type == 1
    obj = f.to_json_obj()
    assert obj["terms"][0] == [0, "(1)/(T^3 + 2*T)"]
    assert [n for n, _ in obj["terms"]] == sorted(n for n, _ in obj["terms"])


def test_meta_propagation():
    h = eval_form_expr("h", 20, 3)
    g = form_g(3, 20)
    prod = h * h * g
    assert (prod.weight, prod.type) == (10, 0)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_ring_axioms(data):
    p = data.draw(st.sampled_from([3, 5]))
    f, g, k = (data.draw(series(p=p)) for _ in range(3))
    assert (f + g) + k == f + (g + k)
    assert f + g == g + f
    assert f * g == g * f
    lhs = f * (g + k)
    rhs = f * g + f * k
    assert lhs.agrees_with(rhs, min(lhs.prec, rhs.prec))
    assert (f * g).agrees_with(naive_mul(f, g, (f * g).prec))


@settings(max_examples=50, deadline=None)
@given(series(integral=True, prec=60, density=0.6))
def test_square_matches_pow(f):
    assert f * f == ts_pow(f, 2)
    assert (f * f).agrees_with(naive_mul(f, f, (f * f).prec))


@settings(max_examples=50, deadline=None)
@given(series(prec=40))
def test_precision_honesty(f):
    for n in range(f.prec):
        f.coeff(n)
    with pytest.raises(PrecisionError):
        f.coeff(f.prec)
    g = f * f
    with pytest.raises(PrecisionError):
        g.coeff(g.prec)
    assert all(n < g.prec for n in g.coeffs)


@settings(max_examples=50, deadline=None)
@given(series(prec=30, density=0.5))
def test_inverse_property(f):
    unit = f + (RatK.one(f.p) - f.coeff(0))
    assert (unit * unit.inverse()).agrees_with(TSeries.one(unit.p, unit.prec))
