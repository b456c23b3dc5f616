"""Global data: degree, stability, vanishing-condition detectors."""

from fractions import Fraction as F

import pytest

from nahmkit.errors import InputError
from nahmkit.field import FieldContext
from nahmkit.higgs import ElementaryBlock, HiggsGerm
from nahmkit.torus import TorusPoint
from nahmkit.elliptic import (
    AdmissibleHiggsData,
    FilteredBundleData,
    SingularPoint,
    a0_check,
    a1a2_check,
    a3_check,
    dual_data,
    global_parabolic_degree,
    good_check,
    stability_check,
)


@pytest.fixture(scope="module")
def ctx():
    return FieldContext(M=12, symbols=("a", "b", "s1", "s2", "nu1", "nu2"))


def hpoint(ctx, blocks, q=(0, 0), sym=None, coord="finite"):
    pt = TorusPoint("T_dual", q[0], q[1], sym=sym or {}, is_lift=True)
    return SingularPoint(pt, HiggsGerm.from_blocks(ctx, blocks, coord))


def tame(ctx, alpha=None, weight=F(-1, 4), degree=0):
    alpha = ctx.sym("a") if alpha is None else alpha
    return ElementaryBlock.make(ctx, 1, 0, alpha=alpha, weights=(weight,), degrees=(degree,))


def test_divisor_reduced(ctx):
    p1 = hpoint(ctx, [tame(ctx)], q=(F(1, 2), 0))
    p2 = hpoint(ctx, [tame(ctx)], q=(F(3, 2), 1))  # same class mod lattice
    with pytest.raises(InputError):
        AdmissibleHiggsData(ctx, [p1, p2])


def test_parabolic_degree_examples(ctx):
    d0 = AdmissibleHiggsData(ctx, [hpoint(ctx, [tame(ctx, weight=F(0))])])
    assert global_parabolic_degree(d0) == 0
    a = F(-1, 3)
    d1 = AdmissibleHiggsData(ctx, [hpoint(ctx, [tame(ctx, weight=a)])])
    assert global_parabolic_degree(d1) == -a
    d2 = AdmissibleHiggsData(
        ctx, [hpoint(ctx, [tame(ctx, weight=F(0)), tame(ctx, weight=a)])]
    )
    assert global_parabolic_degree(d2) == -a  # additivity


def test_degree_dual_negation(ctx):
    d = AdmissibleHiggsData(
        ctx,
        [
            hpoint(ctx, [ElementaryBlock.make(ctx, 2, 1, lead=ctx.sym("a"),
                                              weights=(F(-1, 3),), degrees=(1,))],
                   q=(F(1, 2), 0)),
            hpoint(ctx, [tame(ctx, weight=F(-5, 6), degree=-1)], sym={"s1": 1}),
        ],
    )
    dd = dual_data(d)
    assert global_parabolic_degree(dd) == -global_parabolic_degree(d)
    assert dual_data(dd).table_keys() == d.table_keys()


def test_stability_examples(ctx):
    a = ctx.sym("a")
    uns = AdmissibleHiggsData(
        ctx,
        [hpoint(ctx, [ElementaryBlock.make(ctx, 1, 0, alpha=a,
                                           weights=(F(-1, 4), F(-3, 4)))])],
    )
    assert stability_check(uns).verdict == "unstable"
    poly = AdmissibleHiggsData(
        ctx,
        [hpoint(ctx, [ElementaryBlock.make(ctx, 1, 0, alpha=a,
                                           weights=(F(-1, 4), F(-1, 4)))])],
    )
    assert stability_check(poly).verdict == "polystable"
    rank1 = AdmissibleHiggsData(ctx, [hpoint(ctx, [tame(ctx)])])
    assert stability_check(rank1).verdict == "stable"


def test_stability_explicit_candidates(ctx):
    a = ctx.sym("a")
    parent = AdmissibleHiggsData(
        ctx,
        [hpoint(ctx, [ElementaryBlock.make(ctx, 1, 0, alpha=a,
                                           weights=(F(-1, 4), F(-3, 4)))])],
    )
    sub = AdmissibleHiggsData(
        ctx, [hpoint(ctx, [tame(ctx, alpha=a, weight=F(-3, 4))])]
    )
    rep = stability_check(parent, candidates=[sub])
    assert rep.verdict == "unstable"
    alien = AdmissibleHiggsData(
        ctx, [hpoint(ctx, [tame(ctx, alpha=a, weight=F(-1, 6))])]
    )
    with pytest.raises(InputError):
        stability_check(parent, candidates=[alien])


def test_a0_trivial_higgs_fails_at_origin(ctx):
    triv = AdmissibleHiggsData(
        ctx, [hpoint(ctx, [ElementaryBlock.make(ctx, 1, 0, weights=(F(0),))])]
    )
    rep = a0_check(triv)
    assert not rep.ok and len(rep.failing) == 1
    w, cls, side = rep.failing[0]
    assert w.is_zero() and cls.is_zero_class()


def test_a0_generic_pass(ctx):
    a = ctx.sym("a")
    for blocks in (
        [ElementaryBlock.make(ctx, 2, 1, lead=a, weights=(F(0),))],
        [tame(ctx)],
    ):
        d = AdmissibleHiggsData(ctx, [hpoint(ctx, blocks, sym={"s1": 1})])
        assert a0_check(d).ok


def test_a0_nilpotent_kernel_line(ctx):
    # tame nilpotent block with a kernel line of degree 0 fails once;
    # with negative degree the first-cohomology side passes but the dual
    # scan (second cohomology) catches it
    nil = ElementaryBlock.make(
        ctx, 1, 0, weights=(F(0), F(0)),
        nilp=((ctx.zero, ctx.one), (ctx.zero, ctx.zero)),
    )
    d = AdmissibleHiggsData(ctx, [hpoint(ctx, [nil])])
    rep = a0_check(d)
    assert not rep.ok
    neg = ElementaryBlock.make(ctx, 1, 0, weights=(F(-1, 4),), degrees=(-1,))
    d2 = AdmissibleHiggsData(ctx, [hpoint(ctx, [neg])])
    rep2 = a0_check(d2)
    assert not rep2.ok and rep2.failing[0][2] == "H2"


def test_a3_line_bundle_fails_at_inverse_class(ctx):
    P = TorusPoint("T_dual", F(1, 3), F(1, 5), is_lift=True)
    lb = FilteredBundleData(
        ctx,
        [SingularPoint(P, HiggsGerm.from_blocks(
            ctx, [ElementaryBlock.make(ctx, 1, 0, weights=(F(-1, 4),))], "infinity"))],
    )
    rep = a3_check(lb)
    assert not rep.ok and len(rep.failing) == 1
    _, cls, _ = rep.failing[0]
    assert cls == (-P).reduce()


def test_a3_generic_pass_and_dual_symmetry(ctx):
    a = ctx.sym("a")
    good_data = FilteredBundleData(
        ctx,
        [hpoint(ctx, [ElementaryBlock.make(ctx, 3, 1, lead=a, weights=(F(-1, 2),)),
                      tame(ctx)],
                sym={"s1": 1}, coord="infinity")],
    )
    assert a3_check(good_data).ok
    assert a3_check(dual_data(good_data)).ok
    # failing classes negate under duality
    P = TorusPoint("T_dual", F(1, 3), F(1, 5), is_lift=True)
    lb = FilteredBundleData(
        ctx,
        [SingularPoint(P, HiggsGerm.from_blocks(
            ctx, [ElementaryBlock.make(ctx, 1, 0, weights=(F(-1, 4),))], "infinity"))],
    )
    f1 = {c.class_key() for _, c, _ in a3_check(lb).failing if c is not None}
    f2 = {(-c).reduce().class_key() for _, c, _ in a3_check(dual_data(lb)).failing if c is not None}
    assert f1 == f2


def test_a1a2_and_slope_one_note(ctx):
    a = ctx.sym("a")
    d = FilteredBundleData(
        ctx,
        [hpoint(ctx, [ElementaryBlock.make(ctx, 1, 1, lead=a, weights=(F(0),))],
                coord="infinity")],
    )
    rep = a1a2_check(d)
    assert rep.ok and any("slope 1" in n for n in rep.notes)
    d2 = FilteredBundleData(
        ctx,
        [hpoint(ctx, [ElementaryBlock.make(ctx, 3, 2, lead=a, weights=(F(0),))],
                coord="infinity")],
    )
    rep2 = a1a2_check(d2)
    assert rep2.ok and not rep2.notes


def test_a1a2_failing_germ_reports_certificate(ctx):
    # a wrapped constant nilpotent endomorphism never splits against any
    # lattice: admissibility fails with a named obstruction
    from nahmkit.higgs import endo_germ_wrap
    from nahmkit.filtered import FilteredLattice
    from nahmkit.lmatrix import LaurentMatrix
    from nahmkit.series import TruncatedLaurent as TL

    g = endo_germ_wrap(
        FilteredLattice(ctx, [F(0), F(0)]),
        LaurentMatrix(ctx, [[TL.zero(ctx), TL.from_scalar(ctx.one)],
                            [TL.zero(ctx), TL.zero(ctx)]]),
    )
    pt = TorusPoint("T_dual", F(1, 7), 0, is_lift=True)
    d = FilteredBundleData(ctx, [SingularPoint(pt, g)])
    rep = a1a2_check(d)
    assert not rep.ok and rep.notes


def test_good_check(ctx):
    a = ctx.sym("a")
    d = AdmissibleHiggsData(
        ctx,
        [hpoint(ctx, [ElementaryBlock.make(ctx, 2, 1, lead=a, weights=(F(0),)),
                      tame(ctx)])],
    )
    assert good_check(d).ok
