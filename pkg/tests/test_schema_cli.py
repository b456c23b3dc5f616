"""Document schema roundtrips and the CLI surface (verdicts, exit codes)."""

import json
from fractions import Fraction as F

import pytest

from nahmkit import schema
from nahmkit.cli import cli_run
from nahmkit.errors import InputError
from nahmkit.examples import catalog_names, generate_examples
from nahmkit.elliptic import a0_check, a3_check
from nahmkit.field import FieldContext
from nahmkit.filtered import FilteredLattice
from nahmkit.lmatrix import LaurentMatrix
from nahmkit.series import TruncatedLaurent as TL


def test_scalar_series_lattice_roundtrip():
    ctx = FieldContext(M=12, symbols=("x", "y"))
    x, y = ctx.sym("x"), ctx.sym("y")
    s = (x + 2 * y) / (x + ctx.rational(F(1, 3))) * ctx.zeta(12)
    back = schema.scalar_from_json(ctx, schema.scalar_to_json(s))
    assert back == s
    t = TL(ctx, -2, (s, ctx.one, x), prec=4)
    assert schema.series_from_json(ctx, schema.series_to_json(t)) == t
    lat = FilteredLattice(
        ctx, [F(-1, 4), F(-2, 3)], level=0,
        frame=LaurentMatrix.identity(ctx, 2),
    )
    lat2 = schema.lattice_from_json(ctx, schema.lattice_to_json(lat))
    assert lat2 == lat


@pytest.mark.parametrize("name", catalog_names())
def test_document_roundtrip(name):
    ex = generate_examples(name)
    text = schema.dumps(ex)
    doc = schema.loads(text)
    assert doc["kind"] == ex["kind"]
    assert doc["data"].table_keys() == ex["data"].table_keys()
    assert schema.dumps(doc) == text  # canonical re-emission


def test_unknown_example():
    with pytest.raises(InputError):
        generate_examples("nope")


def test_document_rejects_garbage():
    with pytest.raises(InputError):
        schema.loads("{]")
    with pytest.raises(InputError):
        schema.loads(json.dumps({"kind": "higgs"}))


@pytest.fixture()
def doc_path(tmp_path):
    def write(name):
        ex = generate_examples(name)
        path = tmp_path / f"{name}.json"
        path.write_text(schema.dumps(ex))
        return str(path)

    return write


def test_cli_check_matches_library(doc_path, capsys):
    # generic datum passes, exit 0
    assert cli_run(["check", doc_path("pushforward-2-1")]) == 0
    capsys.readouterr()
    # the A0-failing datum exits 1 and the library agrees
    rc = cli_run(["check", doc_path("tame-rank1-degenerate")])
    capsys.readouterr()
    assert rc == 1
    ex = generate_examples("tame-rank1-degenerate")
    assert not a0_check(ex["data"]).ok
    # the A3-failing bundle datum exits 1, failing class reported
    rc = cli_run(["--format", "json", "check", doc_path("line-bundle")])
    out = json.loads(capsys.readouterr().out)
    assert rc == 1
    assert not a3_check(generate_examples("line-bundle")["data"]).ok
    assert out["conditions"]["A3"]["failing"]


def test_cli_transform_and_roundtrip(doc_path, capsys):
    assert cli_run(["roundtrip", doc_path("pushforward-2-1")]) == 0
    capsys.readouterr()
    rc = cli_run(["--format", "json", "transform", "--direction", "forward",
                  doc_path("tame-rank1")])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["report"]["output"]["rank"] == 1
    assert payload["document"]["kind"] == "bundle"
    # and the emitted document parses back
    doc = schema.document_from_json(payload["document"])
    assert doc["data"].rank == 1


def test_cli_transform_direction_mismatch(doc_path):
    assert cli_run(["transform", "--direction", "backward",
                    doc_path("tame-rank1")]) == 2


def test_cli_oracle(doc_path, capsys):
    assert cli_run(["oracle", doc_path("pushforward-3-2")]) == 0
    capsys.readouterr()


def test_cli_examples_listing(capsys):
    assert cli_run(["examples"]) == 0
    out = capsys.readouterr().out
    for name in catalog_names():
        assert name in out
    assert cli_run(["examples", "pushforward-2-3"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["slope_criterion_ok"] is False
    assert cli_run(["examples", "pushforward-2-1"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["slope_criterion_ok"] is True


def test_cli_malformed_input(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert cli_run(["check", str(bad)]) == 2
    assert cli_run(["check", str(tmp_path / "missing.json")]) == 2


def test_cli_stdin_input(doc_path, capsys, monkeypatch):
    import io

    text = open(doc_path("tame-rank1")).read()
    monkeypatch.setattr("sys.stdin", io.StringIO(text))
    assert cli_run(["invariants", "-"]) == 0
    assert "rank 1" in capsys.readouterr().out


def test_cli_invariants(doc_path, capsys):
    assert cli_run(["invariants", doc_path("mixed-suite")]) == 0
    out = capsys.readouterr().out
    assert "parabolic degree" in out


def test_cli_file_level_roundtrip(doc_path, capsys):
    # forward then backward through emitted documents restores the payload
    src = doc_path("pushforward-2-1")
    assert cli_run(["--format", "json", "transform", "--direction", "forward", src]) == 0
    fwd = json.loads(capsys.readouterr().out)["document"]
    import tempfile, os

    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(fwd, fh)
        fwd_path = fh.name
    try:
        assert cli_run(["--format", "json", "transform", "--direction", "backward",
                        fwd_path]) == 0
        back = json.loads(capsys.readouterr().out)["document"]
        orig = json.loads(open(src).read())
        assert json.dumps(orig["payload"], sort_keys=True) == json.dumps(
            back["payload"], sort_keys=True
        )
    finally:
        os.unlink(fwd_path)


def test_documents_contain_no_floats():
    def scan(obj):
        if isinstance(obj, float):
            raise AssertionError("float leaked into a document")
        if isinstance(obj, dict):
            for v in obj.values():
                scan(v)
        elif isinstance(obj, list):
            for v in obj:
                scan(v)

    for name in catalog_names():
        scan(schema.document_to_json(generate_examples(name)))


def test_cli_precision_env(doc_path, capsys, monkeypatch):
    monkeypatch.setenv("NAHMKIT_PRECISION", "12")
    assert cli_run(["--format", "json", "oracle", doc_path("pushforward-2-1")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["precision"] == 12
    # explicit flag wins over the environment
    assert cli_run(["--precision", "16", "--format", "json", "oracle",
                    doc_path("pushforward-2-1")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["precision"] == 16


def test_complex_lattice_views():
    from nahmkit.localnahm import build_local_complex
    from nahmkit.higgs import ElementaryBlock, HiggsGerm

    ctx = FieldContext(M=12, symbols=("a",))
    b = ElementaryBlock.make(ctx, 2, 1, lead=ctx.sym("a"), weights=(F(0),))
    part = build_local_complex(HiggsGerm.from_blocks(ctx, [b])).parts[0]
    c0 = part.c0_lattice(ctx)
    c1 = part.c1_lattice(ctx)
    assert c0.level == F(-1) and c1.level == F(1, 2)
    assert part.index == 3
