import json

import numpy as np
import pytest

from kaclattice.document import (
    InvalidDependency,
    WorkspaceDocument,
    jsonable,
    load_document,
    loads_document,
    validate_object,
)
from kaclattice.errors import DocumentError

BUILTINS = [
    "builtin:s3_group_algebra.json",
    "builtin:inclusion_c2_m2.json",
    "builtin:z2_diagonal.json",
    "builtin:nonintegral_matrix.json",
]


@pytest.mark.parametrize("name", BUILTINS)
def test_builtin_documents_build_clean(name):
    doc = load_document(name)
    assert doc.schema == 1
    objs, failures = doc.build_all()
    assert failures == {}
    assert set(objs) == set(doc.names())


def test_unknown_builtin():
    with pytest.raises(DocumentError):
        load_document("builtin:no_such_document.json")


def test_parse_error_carries_location():
    with pytest.raises(DocumentError) as exc:
        loads_document('{"schema": 1, "objects": {,}}')
    assert "line" in str(exc.value)


def test_duplicate_names_rejected():
    text = ('{"schema": 1, "objects": {'
            '"a": {"type": "group", "kind": "cyclic", "n": 2},'
            '"a": {"type": "group", "kind": "cyclic", "n": 3}}}')
    with pytest.raises(DocumentError):
        loads_document(text)


def test_wrong_schema_rejected():
    with pytest.raises(DocumentError):
        loads_document('{"schema": 2, "objects": {}}')


def test_unknown_type_is_structural():
    doc = loads_document(
        '{"schema": 1, "objects": {"x": {"type": "frobnicator"}}}')
    with pytest.raises(DocumentError):
        doc.build_all()


def test_unresolved_reference_is_structural():
    text = json.dumps({"schema": 1, "objects": {
        "g": {"type": "group", "kind": "cyclic", "n": 2},
        "k": {"type": "kac", "kind": "group_algebra", "group": "missing"},
    }})
    with pytest.raises(DocumentError):
        loads_document(text).build_all()


def test_nonpositive_group_order_is_structural():
    text = json.dumps({"schema": 1, "objects": {
        "g": {"type": "group", "kind": "cyclic", "n": 0},
    }})
    with pytest.raises(DocumentError):
        loads_document(text).build_all()


def test_invalid_object_fails_and_cascades():
    text = json.dumps({"schema": 1, "objects": {
        "a": {"type": "algebra", "kind": "raw", "dim": 1,
              "mult": [[[2.0]]], "unit": [1.0], "star": [[1.0]],
              "trace": [1.0]},
        "inc": {"type": "inclusion", "kind": "scalar", "big": "a"},
        "ok": {"type": "group", "kind": "cyclic", "n": 2},
    }})
    objs, failures = loads_document(text).build_all()
    assert "ok" in objs
    assert set(failures) == {"a", "inc"}
    assert "InvalidAlgebra" in failures["a"]
    assert "a" in failures["inc"]


def test_reference_cycle_detected():
    text = json.dumps({"schema": 1, "objects": {
        "k1": {"type": "kac", "kind": "group_algebra", "group": "k2"},
        "k2": {"type": "kac", "kind": "group_algebra", "group": "k1"},
    }})
    with pytest.raises(DocumentError) as exc:
        loads_document(text).build_all()
    assert "circular" in str(exc.value)


def test_raw_algebra_with_complex_and_sparse_entries():
    # C^2 given by sparse structure constants and a [re, im] trace entry
    text = json.dumps({"schema": 1, "objects": {
        "a": {"type": "algebra", "kind": "raw", "dim": 2,
              "mult": [[0, 0, 0, 1, 0], [1, 1, 1, 1, 0]],
              "unit": [1, 1],
              "star": [[1, 0], [0, 1]],
              "trace": [[0.5, 0.0], 0.5]},
    }})
    objs, failures = loads_document(text).build_all()
    assert failures == {}
    a = objs["a"]
    assert a.dim == 2
    assert np.allclose(a.trace, [0.5, 0.5])


def test_inclusion_matrix_document():
    doc = load_document("builtin:nonintegral_matrix.json")
    objs, _ = doc.build_all()
    mats = [v for v in objs.values() if isinstance(v, np.ndarray)]
    assert any(m.tolist() == [[1, 1], [0, 1]] for m in mats)


def test_validate_object_reports():
    objs, _ = load_document("builtin:z2_diagonal.json").build_all()
    for name in ("K", "M2", "v", "beta", "inc"):
        rep = validate_object(objs[name])
        assert rep["passed"], name


def test_document_path_recorded(tmp_path):
    p = tmp_path / "doc.json"
    p.write_text('{"schema": 1, "objects": {'
                 '"g": {"type": "group", "kind": "cyclic", "n": 4}}}')
    doc = load_document(str(p))
    assert doc.path == str(p)
    objs, failures = doc.build_all()
    assert failures == {}
    assert objs["g"].order == 4


def test_jsonable_round_trip():
    from fractions import Fraction

    x = {
        "frac": Fraction(3, 2),
        "cplx": 1 + 2j,
        "arr": np.array([[1.0, 0.5]]),
        "ints": np.array([1, 2]),
        "flag": True,
        "none": None,
        "nested": [Fraction(1, 3), {"y": np.float64(2.5)}],
    }
    out = jsonable(x)
    encoded = json.dumps(out, sort_keys=True)
    back = json.loads(encoded)
    assert back["frac"] == "3/2"
    assert back["cplx"] == [1.0, 2.0]
    assert back["arr"] == [[1.0, 0.5]]
    assert back["ints"] == [1, 2]
    assert back["flag"] is True
    assert back["none"] is None
    assert back["nested"][0] == "1/3"
