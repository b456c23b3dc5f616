"""Truncated Laurent series: the arithmetic and precision contracts."""

from fractions import Fraction

import pytest

from nahmkit.errors import PrecisionExhausted
from nahmkit.field import FieldContext
from nahmkit.series import TruncatedLaurent as TL, series_arith


@pytest.fixture(scope="module")
def ctx():
    return FieldContext(M=12, symbols=("a",))


def test_geometric_series(ctx):
    s = TL(ctx, 0, (ctx.one, ctx.rational(-1)), exact=True)  # 1 - z
    inv = series_arith(s, None, "invert", prec=4)
    assert inv.val == 0 and inv.prec == 4
    assert [c.as_fraction() for c in inv.coeffs] == [1, 1, 1, 1]


def test_monomial_product_exact(ctx):
    a = TL.monomial(ctx, ctx.one, -1)
    b = TL.monomial(ctx, ctx.one, 1)
    prod = series_arith(a, b, "mul")
    assert prod.exact and prod.val == 0 and len(prod.coeffs) == 1
    assert prod.coeffs[0] == ctx.one


def test_invert_two_plus_z(ctx):
    # long-division oracle by hand: 1/2 - z/4 + z^2/8
    s = TL(ctx, 0, (ctx.rational(2), ctx.one), exact=True)
    inv = s.invert(prec=3)
    expected = [Fraction(1, 2), Fraction(-1, 4), Fraction(1, 8)]
    assert [c.as_fraction() for c in inv.coeffs] == expected
    assert inv.prec == 3
    # and it really is an inverse to the certified precision
    assert (inv * s).agrees_with(TL.from_scalar(ctx.one), prec=3)


def test_invert_tracks_relative_precision(ctx):
    s = TL(ctx, 2, (ctx.rational(3), ctx.one), prec=6)  # val 2, prec 6
    inv = s.invert()
    assert inv.val == -2 and inv.prec == 6 - 2 * 2


def test_mul_precision_rule(ctx):
    a = TL(ctx, 0, (ctx.one,), prec=3)
    b = TL.monomial(ctx, ctx.one, -2)
    p = a * b
    assert p.val == -2 and p.prec == 1


def test_zero_distinction(ctx):
    exact0 = TL.zero(ctx)
    prec0 = TL.zero(ctx, prec=5, exact=False)
    assert exact0.is_exact_zero() and not prec0.is_exact_zero()
    assert prec0.is_zero()
    with pytest.raises(ZeroDivisionError):
        prec0.invert()


def test_coeff_beyond_precision_raises(ctx):
    s = TL(ctx, 0, (ctx.one,), prec=2)
    assert s.coeff(1).is_zero()
    with pytest.raises(PrecisionExhausted):
        s.coeff(2)


def test_substitute_power_and_twist(ctx):
    s = TL(ctx, -1, (ctx.one, ctx.rational(5)), prec=2)
    t = s.substitute_power(3)
    assert t.val == -3 and t.prec == 6
    assert t.coeff(0).as_fraction() == 5
    tw = s.galois_twist(ctx.rational(-1))
    assert tw.coeff(-1).as_fraction() == -1
    assert tw.coeff(0).as_fraction() == 5


def test_addition_cancellation_shifts_valuation(ctx):
    a = TL(ctx, 0, (ctx.one, ctx.one), exact=True)
    b = TL(ctx, 0, (ctx.rational(-1), ctx.one), exact=True)
    s = a + b
    assert s.val == 1 and s.coeffs[0].as_fraction() == 2


def test_series_ring_laws_randomized(ctx):
    import random

    rng = random.Random(17)

    def rand_series():
        val = rng.randint(-2, 2)
        coeffs = [ctx.rational(rng.randint(-3, 3)) for _ in range(rng.randint(1, 4))]
        if rng.random() < 0.5:
            return TL(ctx, val, coeffs, exact=True)
        return TL(ctx, val, coeffs, prec=val + rng.randint(2, 5))

    for _ in range(60):
        a, b, c = rand_series(), rand_series(), rand_series()
        assert ((a + b) + c).agrees_with(a + (b + c))
        assert ((a * b) * c).agrees_with(a * (b * c))
        assert (a * (b + c)).agrees_with(a * b + a * c)
