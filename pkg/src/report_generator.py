"""
matchex/src/report_generator.py
───────────────────────────────
Turns verification reports, homology profiles and plain result
records into bytes for stdout or --out, in one of three formats:

  json   schema-stable, keys sorted, 2-space indent
  csv    flattened rows through pandas
  text   aligned table through pandas
"""

from __future__ import annotations
import json
from typing import Iterable

import pandas as pd

from src.graph_loader import InvalidArgument
from src.homology_engine import HomologyProfile
from src.settings import OUTPUT_FORMATS
from src.theorem_checks import VerificationReport

REPORT_COLUMNS = ["theorem", "params", "pass", "millis", "expected", "observed"]
PROFILE_COLUMNS = ["complex", "dim", "betti", "torsion"]


def _check_format(fmt: str) -> None:
    if fmt not in OUTPUT_FORMATS:
        raise InvalidArgument(f"format must be one of {', '.join(OUTPUT_FORMATS)}, got {fmt!r}")


def _compact(value) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def _finish(text: str) -> bytes:
    return (text if text.endswith("\n") else text + "\n").encode("utf-8")


# ══════════════════════════════════════════════════════════════════════════
#  VERIFICATION REPORTS
# ══════════════════════════════════════════════════════════════════════════

def emit_report(reports: Iterable[VerificationReport], fmt: str = "json", timing: bool = False) -> bytes:
    _check_format(fmt)
    rows = [r.to_dict(timing) for r in reports]

    if fmt == "json":
        return _finish(json.dumps(rows, sort_keys=True, indent=2))

    df = pd.DataFrame(
        [{**row, "params": _compact(row["params"]),
          "expected": _compact(row["expected"]), "observed": _compact(row["observed"])} for row in rows],
        columns=REPORT_COLUMNS,
    )
    if fmt == "csv":
        return _finish(df.to_csv(index=False))

    if df.empty:
        return _finish("no checks ran")
    table = df[["theorem", "params", "pass", "millis"]].copy()
    table["pass"]   = table["pass"].map({True: "PASS", False: "FAIL"})
    table["millis"] = table["millis"].map(lambda v: "-" if v is None or pd.isna(v) else f"{v:.1f}")
    failed = [r for r in rows if not r["pass"]]
    lines  = [table.to_string(index=False), "", f"{len(rows) - len(failed)}/{len(rows)} passed"]
    for r in failed:
        lines.append(f"  {r['theorem']} {_compact(r['params'])}")
        lines.append(f"    expected {_compact(r['expected'])}")
        lines.append(f"    observed {_compact(r['observed'])}")
    return _finish("\n".join(lines))


def emit_notes(reports: Iterable[VerificationReport]) -> str:
    """One line per report carrying a scope note, for the human-readable tail."""
    return "\n".join(f"{r.theorem} {_compact(r.params)}: {r.notes}" for r in reports if r.notes)


# ══════════════════════════════════════════════════════════════════════════
#  HOMOLOGY PROFILES
# ══════════════════════════════════════════════════════════════════════════

def emit_profile(profile: HomologyProfile, fmt: str = "json", f_vector: tuple[int, ...] = ()) -> bytes:
    _check_format(fmt)
    if fmt == "json":
        doc = {
            "complex":  profile.complex_name,
            "f_vector": list(f_vector),
            "homology": [
                {"dim": d, "betti": g.rank, "torsion": list(g.torsion)}
                for d, g in sorted(profile.groups.items())
            ],
        }
        return _finish(json.dumps(doc, sort_keys=True, indent=2))

    df = pd.DataFrame(profile.to_rows(), columns=PROFILE_COLUMNS)
    if fmt == "csv":
        return _finish(df.to_csv(index=False))
    if df.empty:
        return _finish(profile.describe())
    return _finish(df.to_string(index=False) + "\n\n" + profile.describe())


# ══════════════════════════════════════════════════════════════════════════
#  GENERIC RECORDS (build / morse / bound / domination summaries)
# ══════════════════════════════════════════════════════════════════════════

def emit_record(record: dict, fmt: str = "json") -> bytes:
    """A flat-ish dict: JSON as is, CSV/text as one key/value row per entry."""
    _check_format(fmt)
    if fmt == "json":
        return _finish(json.dumps(record, sort_keys=True, indent=2))
    df = pd.DataFrame(
        [{"key": k, "value": v if isinstance(v, (str, int, float, bool)) or v is None else _compact(v)}
         for k, v in sorted(record.items())],
        columns=["key", "value"],
    )
    if fmt == "csv":
        return _finish(df.to_csv(index=False))
    return _finish(df.to_string(index=False))
