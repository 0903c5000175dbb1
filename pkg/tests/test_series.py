import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dgw.errors import NonUnitDenominator, NotIntegral, SingularConstantTerm
from dgw.fields import build_extension, small_field
from dgw.funcfield import Poly, RatFunc, place_from_poly
from dgw.series import (BivarEntry, BivarPoly, TruncSeries, TruncSeriesMatrix, apply_phi,
                        expand_at_place, invert, parse_bivar, series_charpoly, series_matmul)

F5 = small_field(5)


def _naive_series_matmul(ctx, a, b):
    n, N = a.shape[0], a.shape[2]
    out = ctx.zeros((n, n, N))
    for i in range(n):
        for j in range(n):
            for l in range(n):
                for u in range(N):
                    for v in range(N - u):
                        out[i, j, u + v] = ctx.add(out[i, j, u + v], ctx.mul(a[i, l, u], b[l, j, v]))
    return out


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 3), st.integers(1, 5))
def test_series_matmul_matches_convolution(seed, n, N):
    ctx = build_extension(3, 1, 3)
    rng = np.random.default_rng(seed)
    a, b = rng.integers(0, 3, (2, n, n, N, 3))
    assert np.array_equal(series_matmul(ctx, a, b), _naive_series_matmul(ctx, a, b))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_inverse_and_det(seed):
    ctx = build_extension(5, 1, 3)
    rng = np.random.default_rng(seed)
    m = TruncSeriesMatrix(ctx, rng.integers(0, 5, (2, 2, 6, 3)))
    if not m.is_invertible():
        with pytest.raises(SingularConstantTerm):
            invert(m)
        return
    inv = m.inverse()
    one = TruncSeriesMatrix.identity(ctx, 2, 6)
    assert m @ inv == one and inv @ m == one
    assert (m @ inv).det() == TruncSeries(ctx, one.data[0, 0])
    other = TruncSeriesMatrix(ctx, rng.integers(0, 5, (2, 2, 6, 3)))
    assert (m @ other).det() == m.det() * other.det()


def test_phi_is_a_ring_map_and_fixes_base_coefficients():
    ctx = build_extension(5, 1, 4)
    rng = np.random.default_rng(1)
    a = TruncSeriesMatrix(ctx, rng.integers(0, 5, (2, 2, 4, 4)))
    b = TruncSeriesMatrix(ctx, rng.integers(0, 5, (2, 2, 4, 4)))
    assert apply_phi(a @ b) == apply_phi(a) @ apply_phi(b)
    assert apply_phi(a, 4) == a
    const = TruncSeriesMatrix(ctx, ctx.smul(rng.integers(0, 5, (2, 2, 4)), ctx.ones()))
    assert const.is_phi_fixed()


def test_charpoly_of_series_matrix():
    ctx = build_extension(5, 1, 1)
    data = ctx.zeros((2, 2, 3))
    data[0, 0, 0] = 2
    data[1, 1, 0] = 3
    data[0, 1, 1] = 1
    cp = series_charpoly(TruncSeriesMatrix(ctx, data))
    # (X - 2)(X - 3) = X^2 - 5X + 6 = X^2 + 1 over F_5
    assert [int(c.coeffs[0, 0]) for c in cp] == [1, 0, 1]
    assert not any(c.coeffs[1:].any() for c in cp)


def test_parse_and_print_round_trip():
    F9 = small_field(3, 2)
    text = "[1,2]*s^2*t+2*s+1+t^3"
    p = parse_bivar(F9, text)
    assert parse_bivar(F9, p.to_str()) == p
    th = parse_bivar(F5, "3*theta^2*t+1", var="theta")
    assert th.var == "theta" and th.coeff(1) == Poly(F5, [0, 0, 3], "theta")
    for bad in ["", "s+", "x*t", "2*s^"]:
        with pytest.raises(ValueError):
            parse_bivar(F5, bad)


def test_t_expansion_of_geometric_series():
    # 1/(1 - s t) = sum s^l t^l
    e = BivarEntry(BivarPoly.const(F5, 1), parse_bivar(F5, "1+4*s*t"))
    s = RatFunc(Poly.x(F5))
    assert e.t_expansion(5) == [s ** l for l in range(5)]
    pl = place_from_poly(F5, [3, 1])  # s = 2
    series = expand_at_place(e, pl, 5)
    assert [int(series.coeffs[l, 0]) for l in range(5)] == [pow(2, l, 5) for l in range(5)]


def test_expansion_errors():
    with pytest.raises(NonUnitDenominator):
        BivarEntry(BivarPoly.const(F5, 1), parse_bivar(F5, "t")).t_expansion(3)
    e = BivarEntry(BivarPoly.const(F5, 1), parse_bivar(F5, "s+s*t"))
    with pytest.raises(NotIntegral):
        expand_at_place(e, place_from_poly(F5, [0, 1]), 3)


def test_entry_arithmetic_agrees_with_expansion():
    a = BivarEntry(parse_bivar(F5, "s+t"), parse_bivar(F5, "1+s*t"))
    b = BivarEntry(parse_bivar(F5, "2+s^2*t^2"), parse_bivar(F5, "s+1"))
    pl = place_from_poly(F5, [2, 0, 1])
    ea, eb = expand_at_place(a, pl, 6), expand_at_place(b, pl, 6)
    assert expand_at_place(a * b, pl, 6) == ea * eb
    assert expand_at_place(a + b, pl, 6) == ea + eb
    assert expand_at_place(a.phi(), pl, 6) == ea.phi()
    assert expand_at_place(a * a.inverse(), pl, 6) == TruncSeries(pl.ctx, _one(pl.ctx, 6))


def _one(ctx, N):
    out = ctx.zeros((N,))
    out[0] = ctx.ones()
    return out


def test_json_round_trip():
    e = BivarEntry(parse_bivar(F5, "s+2*t"), parse_bivar(F5, "1+s*t^2"))
    back = BivarEntry.from_json(F5, e.to_json())
    assert back.num == e.num and back.den == e.den
    assert BivarEntry.from_json(F5, "s").num == parse_bivar(F5, "s")


def test_spectral_series_product_matches_entrywise_products():
    ctx = build_extension(5, 1, 40)
    rng = np.random.default_rng(9)
    a, b = rng.integers(0, 5, (2, 2, 2, 3, 40))
    want = ctx.zeros((2, 2, 3))
    for i in range(2):
        for j in range(2):
            for l in range(2):
                for u in range(3):
                    for v in range(3 - u):
                        want[i, j, u + v] = ctx.add(want[i, j, u + v], ctx.mul(a[i, l, u], b[l, j, v]))
    assert np.array_equal(series_matmul(ctx, a, b), want)
