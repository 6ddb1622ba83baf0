"""
matchex/tests/test_report_generator.py
──────────────────────────────────────
JSON / CSV / text emission of reports, profiles and records.
"""

import io
import json

import pandas as pd
import pytest

from src.graph_loader import InvalidArgument
from src.homology_engine import reduced_homology
from src.report_generator import emit_notes, emit_profile, emit_record, emit_report
from src.theorem_checks import VerificationReport, verify_bound, verify_sharpness


def _failed():
    return VerificationReport(
        theorem="kn-wedge", params={"n": 4},
        expected={"betti": {"2": 3}}, observed={"betti": {"2": 2}}, passed=False,
    )


def test_empty_json_report():
    assert emit_report([], "json") == b"[]\n"


def test_json_report_schema():
    rows = json.loads(emit_report([verify_bound(5, 3)], "json"))
    assert rows[0]["theorem"] == "connectivity-bound"
    assert rows[0]["params"] == {"n": 5, "d": 3}
    assert rows[0]["pass"] is True
    assert rows[0]["millis"] is None


def test_json_report_is_byte_stable():
    assert emit_report([verify_bound(5, 3)]) == emit_report([verify_bound(5, 3)])


def test_csv_report_flattens_dicts():
    body = emit_report([verify_bound(5, 3), _failed()], "csv")
    df = pd.read_csv(io.BytesIO(body))
    assert list(df.columns) == ["theorem", "params", "pass", "millis", "expected", "observed"]
    assert json.loads(df.loc[0, "params"]) == {"d": 3, "n": 5}
    assert df["pass"].tolist() == [True, False]


def test_text_report_lists_failures():
    text = emit_report([verify_bound(5, 3), _failed()], "text").decode()
    assert "PASS" in text and "FAIL" in text
    assert "1/2 passed" in text
    assert 'expected {"betti":{"2":3}}' in text
    assert 'observed {"betti":{"2":2}}' in text


def test_text_report_with_timing():
    text = emit_report([verify_bound(5, 3)], "text", timing=True).decode()
    assert "1/1 passed" in text
    assert " - " not in text.splitlines()[1]


def test_unknown_format():
    with pytest.raises(InvalidArgument):
        emit_report([], "xml")


def test_notes():
    reports = [verify_bound(5, 3), verify_sharpness(30)]
    assert emit_notes(reports) == 'kn-sharpness {"n":30}: formula only'


def test_profile_json(square):
    doc = json.loads(emit_profile(reduced_homology(square), "json", f_vector=square.f_vector))
    assert doc == {
        "complex":  "square",
        "f_vector": [4, 4],
        "homology": [
            {"betti": 0, "dim": 0, "torsion": []},
            {"betti": 1, "dim": 1, "torsion": []},
        ],
    }


def test_profile_csv(square):
    body = emit_profile(reduced_homology(square), "csv")
    assert body == b"complex,dim,betti,torsion\nsquare,1,1,\n"


def test_profile_text(square):
    text = emit_profile(reduced_homology(square), "text").decode()
    assert text.endswith("H~_1 = Z\n")


def test_record_formats():
    record = {"acyclic": True, "critical_by_dim": {"0": 2}, "complex": "M_1(K_3)"}
    assert json.loads(emit_record(record)) == record
    csv = emit_record(record, "csv").decode().splitlines()
    assert csv[0] == "key,value"
    assert csv[1] == "acyclic,True"
    assert csv[3] == 'critical_by_dim,"{""0"":2}"'
    text = emit_record(record, "text").decode()
    assert "M_1(K_3)" in text
