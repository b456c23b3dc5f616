"""The global algebraic Nahm transforms and their verification reports.

The global objects are carried by invariants plus local data: the rank of
the transform is the Euler-characteristic bookkeeping sum of the local
complex indices (first and second cohomology vanish once the concentration
condition holds), the divisor is exchanged with the spectrum at infinity,
and the per-point filtered structure is transported by the local
transforms.  The transforms preserve the parabolic degree exactly and are
mutually inverse on data whose exceptional part vanishes, which the
concentration conditions force; the exceptional tame-nilpotent part, when
present in hand-built bundle data, is transported verbatim through its
injection slot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InputError, VerdictFailure
from .elliptic import (
    AdmissibleHiggsData,
    ConditionReport,
    FilteredBundleData,
    SingularPoint,
    a0_check,
    a1a2_check,
    a3_check,
    global_parabolic_degree,
    good_check,
)
from .higgs import ElementaryBlock, HiggsGerm
from .localnahm import (
    block_index,
    local_nahm_0_inf,
    local_nahm_inf_0,
    transform_block_0_inf,
    transform_block_inf_0,
)

# ----------------------------------------------------------------------
# report object
# ----------------------------------------------------------------------


@dataclass
class NahmReport:
    """Structured record of one transform/verification run."""

    direction: str = ""
    input_rank: int = 0
    output_rank: int = 0
    input_degree: Fraction = Fraction(0)
    output_degree: Fraction = Fraction(0)
    input_table: list = field(default_factory=list)
    output_table: list = field(default_factory=list)
    conditions: dict = field(default_factory=dict)
    degree_preserved: bool = None
    roundtrip: str = None  # "pass" | "fail" | None
    goodness_preserved: bool = None
    c2: object = None  # reserved; no combinatorial formula is pinned yet
    notes: list = field(default_factory=list)

    def to_dict(self):
        def frac(x):
            if isinstance(x, Fraction):
                return {"num": x.numerator, "den": x.denominator}
            return x

        cond = {}
        for k, v in sorted(self.conditions.items()):
            if isinstance(v, ConditionReport):
                cond[k] = {
                    "ok": v.ok,
                    "failing": [
                        {
                            "w": None if w is None else str(w),
                            "class": None if c is None else repr(c),
                            "side": side,
                        }
                        for (w, c, side) in v.failing
                    ],
                    "notes": list(v.notes),
                }
            else:
                cond[k] = v
        return {
            "direction": self.direction,
            "input": {
                "rank": self.input_rank,
                "parabolic_degree": frac(self.input_degree),
                "table": self.input_table,
            },
            "output": {
                "rank": self.output_rank,
                "parabolic_degree": frac(self.output_degree),
                "table": self.output_table,
            },
            "conditions": cond,
            "degree_preserved": self.degree_preserved,
            "roundtrip": self.roundtrip,
            "goodness_preserved": self.goodness_preserved,
            "c2": self.c2,
            "notes": list(self.notes),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def to_text(self):
        d = self.to_dict()
        lines = [f"direction: {d['direction'] or '(none)'}"]
        for side in ("input", "output"):
            s = d[side]
            pd = s["parabolic_degree"]
            pd_s = f"{pd['num']}/{pd['den']}" if isinstance(pd, dict) else str(pd)
            lines.append(f"{side}: rank {s['rank']}, parabolic degree {pd_s}")
            for pt, blk in s["table"]:
                lines.append(
                    f"  {pt}: (p,m)=({blk['p']},{blk['m']}) orbit {blk['orbit']} "
                    f"weights {blk['weights']} degrees {blk['degrees']}"
                )
        for name, c in d["conditions"].items():
            if isinstance(c, dict):
                status = "pass" if c["ok"] else "FAIL"
                lines.append(f"condition {name}: {status}")
                for f in c["failing"]:
                    lines.append(f"  fails at w={f['w']} class={f['class']} ({f['side']})")
                for n in c["notes"]:
                    lines.append(f"  note: {n}")
            else:
                lines.append(f"condition {name}: {c}")
        if self.degree_preserved is not None:
            lines.append(f"degree preserved: {self.degree_preserved}")
        if self.roundtrip is not None:
            lines.append(f"roundtrip: {self.roundtrip}")
        if self.goodness_preserved is not None:
            lines.append(f"goodness preserved: {self.goodness_preserved}")
        lines.append(f"c2: {self.c2 if self.c2 is not None else 'not computed'}")
        for n in self.notes:
            lines.append(f"note: {n}")
        return "\n".join(lines)


# ----------------------------------------------------------------------
# forward: Higgs data on the dual torus -> filtered bundle data
# ----------------------------------------------------------------------


def nahm_forward(data, skip_checks=False):
    """Global forward transform; returns (FilteredBundleData, NahmReport).

    Rank by exact degree bookkeeping (sum of local indices), spectrum at
    infinity equal to the divisor, per-point germs by the forward local
    transform; the parabolic degree is preserved exactly (asserted)."""
    if not isinstance(data, AdmissibleHiggsData):
        raise InputError("forward transform expects admissible Higgs data")
    data = data.canonical()
    report = NahmReport(direction="forward")
    report.input_rank = data.rank
    report.input_degree = global_parabolic_degree(data)
    report.input_table = data.table()
    cond = a0_check(data)
    report.conditions["A0"] = cond
    if not cond.ok and not skip_checks:
        raise VerdictFailure("input fails the concentration condition (A0)", report)
    out_points = []
    out_rank = 0
    for sp in data.points:
        out_rank += sum(block_index(b) for b in sp.blocks())
        out_points.append(
            SingularPoint(point=sp.point, germ=local_nahm_0_inf(sp.germ))
        )
    out = FilteredBundleData(data.ctx, out_points)
    if out.rank != out_rank:
        raise VerdictFailure(
            "blockwise ranks disagree with the index bookkeeping", report
        )
    report.output_rank = out.rank
    report.output_degree = global_parabolic_degree(out)
    report.output_table = out.table()
    report.degree_preserved = report.output_degree == report.input_degree
    if not report.degree_preserved:
        raise VerdictFailure("parabolic degree not preserved (internal error)", report)
    g_in = good_check(data)
    g_out = good_check(out)
    report.conditions["Good(in)"] = g_in
    report.conditions["Good(out)"] = g_out
    report.goodness_preserved = (not g_in.ok) or g_out.ok
    return out, report


# ----------------------------------------------------------------------
# backward: filtered bundle data -> Higgs data on the dual torus
# ----------------------------------------------------------------------


def nahm_backward(data, skip_checks=False):
    """Global backward transform; returns (AdmissibleHiggsData, NahmReport).

    The divisor is the spectrum at infinity; non-exceptional blocks go
    through the backward local transform, the exceptional part needs its
    injection slot (and is carried verbatim).  The Higgs field is the
    translation action recorded on the block data."""
    if not isinstance(data, FilteredBundleData):
        raise InputError("backward transform expects filtered-bundle data")
    data = data.canonical()
    report = NahmReport(direction="backward")
    report.input_rank = data.rank
    report.input_degree = global_parabolic_degree(data)
    report.input_table = data.table()
    c12 = a1a2_check(data)
    c3 = a3_check(data)
    report.conditions["A1A2"] = c12
    report.conditions["A3"] = c3
    if not skip_checks and not (c12.ok and c3.ok):
        raise VerdictFailure("input fails (A1)(A2)/(A3)", report)
    out_points = []
    for sp in data.points:
        blocks = []
        for b in sp.blocks():
            if b.is_exceptional():
                if b.injection is None:
                    raise VerdictFailure(
                        "nonzero exceptional part without injection data", report
                    )
                carried = b.injection if isinstance(b.injection, ElementaryBlock) else b
                if carried.rank != b.rank or carried.pardeg() != b.pardeg():
                    raise VerdictFailure(
                        "injection data inconsistent with its host block "
                        "(rank or degree mismatch)", report
                    )
                blocks.append(carried)
            else:
                blocks.append(transform_block_inf_0(b))
        out_points.append(
            SingularPoint(
                point=sp.point,
                germ=HiggsGerm.from_blocks(data.ctx, blocks, coord="finite"),
            )
        )
    out = AdmissibleHiggsData(data.ctx, out_points)
    report.output_rank = out.rank
    report.output_degree = global_parabolic_degree(out)
    report.output_table = out.table()
    report.degree_preserved = report.output_degree == report.input_degree
    if not report.degree_preserved:
        raise VerdictFailure("parabolic degree not preserved (internal error)", report)
    g_in = good_check(data)
    g_out = good_check(out)
    report.conditions["Good(in)"] = g_in
    report.conditions["Good(out)"] = g_out
    report.goodness_preserved = (not g_in.ok) or g_out.ok
    return out, report


# ----------------------------------------------------------------------
# roundtrip and invariants
# ----------------------------------------------------------------------


def roundtrip_report(data):
    """Forward then backward; pass iff the full block tables, divisor,
    rank, and parabolic degree are restored exactly."""
    fwd, rep_f = nahm_forward(data)
    back, rep_b = nahm_backward(fwd)
    report = NahmReport(direction="roundtrip")
    report.input_rank = data.rank
    report.input_degree = global_parabolic_degree(data)
    report.input_table = data.table()
    report.output_rank = back.rank
    report.output_degree = global_parabolic_degree(back)
    report.output_table = back.table()
    report.conditions.update(rep_f.conditions)
    report.degree_preserved = (
        rep_f.degree_preserved
        and rep_b.degree_preserved
        and report.output_degree == report.input_degree
    )
    same = (
        data.table_keys() == back.table_keys()
        and data.rank == back.rank
        and report.degree_preserved
    )
    report.roundtrip = "pass" if same else "fail"
    g_in = good_check(data)
    g_back = good_check(back)
    report.goodness_preserved = (not g_in.ok) or g_back.ok
    return report


def invariants(data):
    """Rank, parabolic degree, and per-point singularity tables."""
    data = data.canonical()
    report = NahmReport(direction="invariants")
    report.input_rank = data.rank
    report.input_degree = global_parabolic_degree(data)
    report.input_table = data.table()
    report.output_rank = report.input_rank
    report.output_degree = report.input_degree
    report.output_table = report.input_table
    if isinstance(data, AdmissibleHiggsData):
        report.conditions["A0"] = a0_check(data)
    else:
        report.conditions["A1A2"] = a1a2_check(data)
        report.conditions["A3"] = a3_check(data)
    report.conditions["Good"] = good_check(data)
    report.c2 = None  # reserved: no pinned combinatorial second Chern number
    return report
