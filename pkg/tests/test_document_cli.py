import json
import os

import pytest

from conftest import FIXTURES, fixture_path
from chowlift.cli import main
from chowlift.document import load_document, parse_document, serialize_document
from chowlift.errors import DocumentError
from chowlift.motive import TateShape
from chowlift.render import render_parts, render_shape, twist_ruler

ALL_FIXTURES = sorted(f for f in os.listdir(FIXTURES) if f.endswith(".json"))


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_round_trip(name):
    ws = load_document(fixture_path(name))
    text = serialize_document(ws)
    assert parse_document(text) == ws
    assert serialize_document(parse_document(text)) == text


def test_json_error_position():
    with pytest.raises(DocumentError) as info:
        parse_document('{\n "space": {"codims": [0,1], "dim": 1,}\n}')
    assert info.value.line == 2 and info.value.column is not None


def test_empty_document():
    with pytest.raises(DocumentError) as info:
        parse_document("  \n")
    assert (info.value.line, info.value.column) == (1, 1)


def test_unknown_key_position():
    text = '{\n "space": {"codims": [0], "dim": 0},\n "spaec": 1\n}'
    with pytest.raises(DocumentError) as info:
        parse_document(text)
    assert (info.value.line, info.value.column) == (3, 2)
    assert "spaec" in str(info.value)


def test_dangling_reference():
    doc = {"space": {"codims": [0], "dim": 0},
           "decompositions": {"x": {"modulus": 2, "parts": [["nope"]]}}}
    with pytest.raises(DocumentError):
        parse_document(json.dumps(doc))


def test_typed_views():
    ws = load_document(fixture_path("f4.json"))
    assert ws.motive_space().rank == 24
    assert ws.rational_structure().transfer_degree == 36
    assert sorted(ws.partitions) == ["L1", "L2"]
    assert [c.prime for c in ws.prime_catalogs()] == [2, 3]
    assert len(load_document(fixture_path("severi_brauer.json")).sb_instances()) == 4


# ---------------------------------------------------------------------------
# rendering


def test_render_small_shape():
    assert render_shape(TateShape.of([0, 1, 1])) == "[X][X]\n   [X]"
    assert render_shape(TateShape()) == ""
    assert twist_ruler(TateShape()) == ""


def test_render_f4_total():
    total = TateShape.from_counts({t: 2 if 4 <= t <= 11 else 1 for t in range(16)})
    lines = render_shape(total).splitlines()
    assert len(lines) == 2
    assert lines[0] == "[X]" * 16
    assert lines[1] == "   " * 4 + "[X]" * 8
    assert twist_ruler(total).split() == [str(t % 10) for t in range(16)]


def test_render_parts_letters():
    text = render_parts([TateShape.of([0, 1]), TateShape.of([1])])
    assert text == "[A][A]\n   [B]"


# ---------------------------------------------------------------------------
# command line


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_render_golden(capsys):
    code, out, _ = run(capsys, "render", "--shape", "0,1,1")
    assert code == 0 and out == "[X][X]\n   [X]\n"


def test_cli_lift_f4(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "--input", fixture_path("f4.json"), "lift", "--grouping", "L2",
                       "--output", str(report))
    assert code == 0
    assert "[L2] outcome: Lifted" in out
    assert "part 0: {0,1,2,3,4,5,6,7,8,9,10,11}" in out
    data = json.loads(report.read_text())
    assert data["L2"]["outcome"] == "Lifted"


def test_cli_lift_precision(capsys):
    code, out, _ = run(capsys, "lift", "-i", fixture_path("f4.json"), "-g", "L1", "--precision", "2")
    assert code == 0
    assert "tower modulo 2^2: coherent" in out and "tower modulo 3^2: coherent" in out


def test_cli_mismatch_exit_code(capsys):
    code, out, _ = run(capsys, "lift", "-i", fixture_path("mismatch.json"))
    assert code == 3 and "ShapeMismatch" in out


def test_cli_enumerate_f4(capsys):
    code, out, _ = run(capsys, "enumerate", "-i", fixture_path("f4.json"))
    assert code == 0
    assert "relative Krull-Schmidt: fails" in out


def test_cli_enumerate_trivial(capsys):
    code, out, _ = run(capsys, "enumerate", "-i", fixture_path("trivial.json"))
    assert code == 0 and "relative Krull-Schmidt: holds" in out


def test_cli_classify(capsys):
    code, out, _ = run(capsys, "classify-sb", "--degree", "6", "--index", "6", "--k", "2")
    assert code == 0 and "Decomposable (mixed-index)" in out
    code, out, _ = run(capsys, "classify-sb", "-i", fixture_path("severi_brauer.json"))
    assert code == 0 and len(out.splitlines()) == 4
    code, out, _ = run(capsys, "classify-sb", "--sweep", "20")
    assert code == 0 and out.startswith("0 violations")


@pytest.mark.parametrize("argv,code", [
    (["classify-sb", "--degree", "6", "--index", "4", "--k", "1"], 5),
    (["classify-sb", "--sweep", "2"], 5),
    (["lift"], 2),
    (["factor", "--rows", "[[1,2],"], 2),
    (["factor", "--rows", "[[2,0],[0,2]]", "--modulus", "6"], 1),
])
def test_cli_error_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_cli_bad_document(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"space": 1, "extra": 2}')
    code, _, err = run(capsys, "lift", "-i", str(bad))
    assert code == 2 and "line 1" in err


def test_cli_factor(capsys):
    code, out, _ = run(capsys, "factor", "--rows", "[[5,0],[0,5]]", "--modulus", "6")
    assert code == 0
    lift = json.loads(out.splitlines()[-1].split(": ", 1)[1])
    assert lift[0][0] * lift[1][1] - lift[0][1] * lift[1][0] == 1
    assert [[x % 6 for x in r] for r in lift] == [[5, 0], [0, 5]]


def test_cli_selfcheck(capsys):
    code, out, _ = run(capsys, "--seed", "3", "lift", "--selfcheck", "10")
    assert code == 0 and out.startswith("round trip: 10/10")
