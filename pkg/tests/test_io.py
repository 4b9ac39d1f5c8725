import json

import numpy as np
import pytest

from gerbechar import (
    StructuralError,
    Workspace,
    identity_kernel,
    pauli_bundle,
    regular_bundle,
    trivial_gerbe,
    trivial_gset,
)
from gerbechar.io import (
    bundle_to_json,
    cocycle_to_json,
    gerbe_to_json,
    group_to_json,
    gset_to_json,
    kernel_to_json,
    sniff_kind,
)
from gerbechar.gerbes import same_gerbe

from conftest import bilinear_point_gerbe


def test_group_round_trip(S3, tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps(group_to_json(S3)))
    ws = Workspace()
    G = ws.load(path)
    assert np.array_equal(G.mul, S3.mul)
    assert G.labels == S3.labels


def test_gset_round_trip(S3, tmp_path):
    from gerbechar import coset_gset

    X = coset_gset(S3, [1])
    path = tmp_path / "x.json"
    path.write_text(json.dumps(gset_to_json(X)))
    Y = Workspace().load(path)
    assert np.array_equal(X.act, Y.act)


def test_gerbe_round_trip(Z22, tmp_path):
    x = bilinear_point_gerbe(Z22)
    path = tmp_path / "gerbe.json"
    path.write_text(json.dumps(gerbe_to_json(x)))
    y = Workspace().load(path)
    assert same_gerbe(x, y)


def test_bundle_and_kernel_round_trip(Z22, tmp_path):
    x = bilinear_point_gerbe(Z22)
    E = pauli_bundle(x)
    pb = tmp_path / "bundle.json"
    pb.write_text(json.dumps(bundle_to_json(E)))
    F = Workspace().load(pb)
    for key in E.maps:
        assert np.allclose(E.maps[key], F.maps[key])

    K = identity_kernel(x)
    pk = tmp_path / "kernel.json"
    pk.write_text(json.dumps(kernel_to_json(K)))
    K2 = Workspace().load(pk)
    assert K2.bundle.dims == K.bundle.dims


def test_relative_references(S3, tmp_path):
    gpath = tmp_path / "group.json"
    gpath.write_text(json.dumps(group_to_json(S3)))
    xpath = tmp_path / "gset.json"
    xpath.write_text(json.dumps({
        "group": "group.json",
        "size": 1,
        "act": [[0]] * 6,
    }))
    X = Workspace().load(xpath)
    assert X.size == 1 and X.group.order == 6


def test_spec_string_references(tmp_path):
    path = tmp_path / "gerbe.json"
    path.write_text(json.dumps({
        "gset": "conjugation(symmetric(3))",
        "metric": [1] * 6,
        "cocycle": {"N": 1, "exp": np.zeros((6, 6, 6), dtype=int).tolist()},
    }))
    x = Workspace().load(path)
    assert x.gset.size == 6


def test_metric_fraction_strings(tmp_path, S3):
    path = tmp_path / "gerbe.json"
    path.write_text(json.dumps({
        "gset": "trivial(symmetric(3), 2)",
        "metric": ["3/2", "3/2"],
    }))
    x = Workspace().load(path)
    from fractions import Fraction

    assert x.metric == (Fraction(3, 2), Fraction(3, 2))


def test_sniffing():
    assert sniff_kind({"mul": []}) == "group"
    assert sniff_kind({"act": [], "group": {}}) == "gset"
    assert sniff_kind({"N": 2, "exp": [], "gset": {}}) == "cocycle"
    assert sniff_kind({"gset": {}, "metric": [], "cocycle": {}}) == "gerbe"
    assert sniff_kind({"gerbe": {}, "dims": [], "maps": {}}) == "bundle"
    assert sniff_kind({"target_gerbe": {}, "source_gerbe": {}, "dims": []}) == "kernel"
    assert sniff_kind({"G": {}, "K": {}, "phiK": []}) == "extension"
    with pytest.raises(StructuralError):
        sniff_kind({"stuff": 1})


def test_bad_file_errors(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(StructuralError):
        Workspace().load(missing)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(StructuralError):
        Workspace().load(bad)


def test_workspace_caches(tmp_path, S3):
    path = tmp_path / "g.json"
    path.write_text(json.dumps(group_to_json(S3)))
    ws = Workspace()
    assert ws.load(path) is ws.load(path)
