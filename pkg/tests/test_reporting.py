"""Serialization details that make reports byte-stable."""
import json
import xml.etree.ElementTree as ET

import numpy as np
from hypothesis import given, strategies as st

from hclab.reporting import dumps, plain, write_csv, write_svg


def test_float_formatting():
    text = dumps({"a": 1.0, "b": 0.1, "c": np.float64(2.5e-300), "d": np.int64(3)})
    assert '"a": 1.0' in text and '"b": 0.10000000000000001' in text
    assert f'"c": {"%.17g" % 2.5e-300}' in text and '"d": 3' in text


def test_non_finite_becomes_null():
    assert json.loads(dumps({"x": float("nan"), "y": [np.inf, 1.0]})) == {"x": None, "y": [None, 1.0]}


def test_key_order_is_insertion_order():
    text = dumps({"z": 1, "a": 2, "m": {"b": 1, "a": 2}})
    assert text.index('"z"') < text.index('"a"') < text.index('"m"')


def test_plain_converts_numpy_and_complex():
    assert plain({"v": np.arange(3), "c": 1 + 2j, "b": np.bool_(True)}) == {"v": [0, 1, 2], "c": [1.0, 2.0], "b": True}


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), max_size=20))
def test_floats_round_trip_exactly(values):
    assert json.loads(dumps({"v": values}))["v"] == values


def test_csv_uses_crlf_and_repr(tmp_path):
    path = tmp_path / "t.csv"
    write_csv(path, ["n", "x"], [(1, 0.1), (2, np.float64(1 / 3))])
    raw = path.read_bytes()
    assert raw == b"n,x\r\n1,0.1\r\n2,0.3333333333333333\r\n"


def test_svg_is_well_formed(tmp_path):
    path = tmp_path / "p.svg"
    x = np.linspace(1, 64, 7)
    write_svg(path, "band", {"h": (x, x ** 2), "G": (x, 3 * x)}, log_y=True, xlabel="y", ylabel="value")
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg") and root.get("version") == "1.1"
    assert len(root.findall("{http://www.w3.org/2000/svg}polyline")) == 2
