import json
from pathlib import Path

import numpy as np
import pytest

from gerbechar.cli import main
from gerbechar.io import gerbe_to_json, cocycle_to_json
from gerbechar import coboundary_of, coset_gset, make_cochain, trivial_cocycle, trivial_gerbe

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_every_shipped_fixture_validates(capsys):
    files = sorted(FIXTURES.glob("*.json"))
    assert files, "no fixtures shipped"
    for f in files:
        code, report = run(capsys, "validate", str(f))
        assert code == 0, f
        assert report["valid"] is True


def test_validate_reports_witness_on_bad_file(tmp_path, capsys):
    bad = tmp_path / "bad_group.json"
    bad.write_text(json.dumps({"order": 2, "mul": [[0, 0], [0, 0]]}))
    code, report = run(capsys, "validate", str(bad))
    assert code == 1
    assert report["valid"] is False
    assert report["witness"]["axiom"] == "identity"


def test_validate_structural_error_exit_2(tmp_path, capsys):
    junk = tmp_path / "junk.json"
    junk.write_text("{oops")
    code, report = run(capsys, "validate", str(junk))
    assert code == 2


def test_resource_guard_exit_3(tmp_path, capsys):
    from gerbechar import build_group, trivial_gset

    big = trivial_gerbe(trivial_gset(build_group("dihedral(4)"), 12))
    p = tmp_path / "big.json"
    p.write_text(json.dumps(gerbe_to_json(big)))
    code, report = run(capsys, "equiv", str(p), str(p))
    assert code == 3


def test_dims_bilinear(capsys):
    code, report = run(capsys, "dims", str(FIXTURES / "z22_bilinear.json"))
    assert code == 0
    assert report["flat_dim"] == 4
    assert report["center_dim"] == 4
    assert report["end_plain"] == 4
    assert report["end_weighted"] == [4.0, 0.0]
    assert report["homG"] == 4


def test_dims_s3_coset(capsys):
    code, report = run(capsys, "dims", str(FIXTURES / "s3_coset_gerbe.json"))
    assert code == 0
    assert report["flat_dim"] == report["center_dim"] == report["homG"] == 3
    assert report["end_plain"] == 3


def test_cohomology_command(capsys, tmp_path, S3):
    code, report = run(capsys, "cohomology",
                       str(FIXTURES / "s3_coset_trivial_cocycle.json"),
                       str(FIXTURES / "s3_coset_coboundary.json"))
    assert code == 0
    assert report["cohomologous"] is True
    # re-substitute the witness
    gs = coset_gset(S3, [1])
    lam = make_cochain(gs, report["witness"]["N"], np.array(report["witness"]["exp"]))
    ws_coc = json.loads((FIXTURES / "s3_coset_coboundary.json").read_text())
    assert np.array_equal(coboundary_of(lam).exp % 6, np.array(ws_coc["exp"]) % 6)

    gerbe = json.loads((FIXTURES / "z22_bilinear.json").read_text())
    bil = tmp_path / "bil_cocycle.json"
    bil.write_text(json.dumps({"gset": gerbe["gset"], "N": 2,
                               "exp": gerbe["cocycle"]["exp"]}))
    triv = tmp_path / "triv_cocycle.json"
    triv.write_text(json.dumps({"gset": gerbe["gset"], "N": 2,
                                "exp": (np.array(gerbe["cocycle"]["exp"]) * 0).tolist()}))
    code, report = run(capsys, "cohomology", str(triv), str(bil))
    assert code == 0
    assert report["cohomologous"] is False and report["witness"] is None


def test_transgress_command(capsys):
    code, report = run(capsys, "transgress", str(FIXTURES / "z22_bilinear.json"))
    assert code == 0
    assert report["flat_dim"] == 1
    assert report["loops"] == [[0, 0], [0, 1], [0, 2], [0, 3]]
    assert report["tau"]["1,2"] == [-1.0, 0.0]


def test_char_command(capsys):
    code, report = run(capsys, "char", str(FIXTURES / "pauli_bundle.json"))
    assert code == 0
    assert report["values"][0] == [2.0, 0.0]
    assert all(v == [0.0, 0.0] for v in report["values"][1:])


def test_ch_command(capsys):
    code, report = run(capsys, "ch", str(FIXTURES / "trivial_gerbe.json"))
    assert code == 0
    assert report["fibers"] == {str(x): 1 for x in range(6)}


def test_chmor_command(capsys):
    code, report = run(capsys, "chmor", str(FIXTURES / "pauli_kernel.json"))
    assert code == 0
    assert report["matrices"]["0"] == [[[2.0, 0.0]]]


def test_extension_command(capsys, tmp_path):
    code, report = run(capsys, "extension", str(FIXTURES / "q8_extension.json"))
    assert code == 0
    # emitted gerbe loads back and its sign point carries a nontrivial class
    p = tmp_path / "q8_gerbe.json"
    p.write_text(json.dumps(report))
    code, dims = run(capsys, "dims", str(p))
    assert code == 0
    assert dims["end_plain"] == 16
    assert dims["end_weighted"] == [pytest.approx(10.0), pytest.approx(0.0)]


def test_equiv_command(capsys):
    code, report = run(capsys, "equiv", str(FIXTURES / "s3_coset_gerbe.json"),
                       str(FIXTURES / "s3_coset_gerbe.json"))
    assert code == 0
    assert report["equivalent"] is True
    assert sorted(report["iso"]) == [0, 1, 2]


def test_reports_are_deterministic(capsys):
    code1 = main(["dims", str(FIXTURES / "z22_bilinear.json")])
    out1 = capsys.readouterr().out
    code2 = main(["dims", str(FIXTURES / "z22_bilinear.json")])
    out2 = capsys.readouterr().out
    assert code1 == code2 == 0
    assert out1 == out2
