"""Session field: canonical forms, cyclotomic arithmetic, exact roots."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from nahmkit.errors import FieldExtensionRequired, InputError
from nahmkit.field import FieldContext, cyclotomic_polynomial, scalar_sqrt


@pytest.fixture(scope="module")
def ctx():
    return FieldContext(M=12, symbols=("x", "y"))


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == [-1, 1]
    assert cyclotomic_polynomial(4) == [1, 0, 1]
    assert cyclotomic_polynomial(12) == [1, 0, -1, 0, 1]


def test_roots_of_unity(ctx):
    z = ctx.zeta(12)
    assert z ** 12 == ctx.one
    assert z ** 6 == ctx.rational(-1)
    assert all(z ** k != ctx.one for k in range(1, 12))
    i = ctx.zeta(4)
    assert i * i == ctx.rational(-1)


def test_field_never_silently_enlarged(ctx):
    with pytest.raises(FieldExtensionRequired):
        ctx.zeta(5)
    assert ctx.has_root_of_unity(3)
    assert not ctx.has_root_of_unity(8)


def test_canonical_fraction_reduction(ctx):
    x, y = ctx.sym("x"), ctx.sym("y")
    q = (x * x - y * y) / (x - y)
    assert q == x + y
    r = (x * x * y + 2 * x * y + y) / (x + 1)
    assert r == (x + 1) * y


def test_equality_is_structural(ctx):
    x, y = ctx.sym("x"), ctx.sym("y")
    a = (x + y) / (ctx.one + x)
    b = (y + x) / (x + ctx.one)
    assert a == b and hash(a) == hash(b)


def test_sort_key_total_and_stable(ctx):
    x, y = ctx.sym("x"), ctx.sym("y")
    vals = [x, y, x + y, ctx.rational(Fraction(3, 7)), x * y]
    keys = [v.sort_key() for v in vals]
    assert len(set(keys)) == len(keys)
    assert sorted(keys) == sorted(keys)  # comparable without error


def test_scalar_sqrt(ctx):
    x = ctx.sym("x")
    v = (x + 1) * (x + 1) * ctx.rational(Fraction(9, 4))
    s = scalar_sqrt(v)
    assert s is not None and s * s == v
    assert scalar_sqrt(x) is None
    d = (x - ctx.sym("y")) ** 2
    s2 = scalar_sqrt(d)
    assert s2 is not None and s2 * s2 == d


def test_mixing_sessions_rejected(ctx):
    other = FieldContext(M=12, symbols=("x", "y"))
    with pytest.raises(InputError):
        ctx.sym("x") + other.sym("x")


def test_undeclared_symbol(ctx):
    with pytest.raises(InputError):
        ctx.sym("zz")


small_rats = st.builds(
    Fraction, st.integers(-6, 6), st.integers(1, 4)
)


@st.composite
def scalars(draw):
    ctx = scalars.ctx
    x, y = ctx.sym("x"), ctx.sym("y")
    q = ctx.rational(draw(small_rats))
    parts = [q]
    if draw(st.booleans()):
        parts.append(x * ctx.rational(draw(small_rats)))
    if draw(st.booleans()):
        parts.append(y * ctx.rational(draw(small_rats)))
    if draw(st.booleans()):
        parts.append(ctx.zeta(12) * ctx.rational(draw(small_rats)))
    num = sum(parts[1:], parts[0])
    if draw(st.booleans()):
        den = x + ctx.rational(draw(st.integers(1, 3)))
        return num / den
    return num


scalars.ctx = FieldContext(M=12, symbols=("x", "y"))


@settings(max_examples=60, deadline=None)
@given(scalars(), scalars(), scalars())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a


@settings(max_examples=40, deadline=None)
@given(scalars())
def test_inverse_when_nonzero(a):
    if not a.is_zero():
        assert a * a.inverse() == scalars.ctx.one
