"""
Census Reports
Per-dimension tables, exact mass breakdowns and report documents for the
cs-check and matroidal-check commands.
"""

import json
from collections import defaultdict
from fractions import Fraction
from typing import Dict, List, Sequence

import pandas as pd

from exact_arith import format_rational

REPORT_FORMAT = "isoedge-report"


def mass_breakdown(records) -> Dict[int, Fraction]:
    """
    Exact contribution of every dimension to the mass formula.

    Args:
        records: Cell records

    Returns:
        dict: dimension -> sum of (-1)^dim / |Stab| over PD orbits, highest dimension first
    """
    totals: Dict[int, Fraction] = defaultdict(Fraction)
    for record in records:
        totals[record.dimension] += record.mass_term
    return dict(sorted(totals.items(), reverse=True))


def census_table(records) -> pd.DataFrame:
    """
    Orbit counts per dimension.

    Returns:
        pd.DataFrame: Indexed by dimension (descending) with columns orbits,
        pd_orbits and mass_contribution (exact string)
    """
    rows = [{"dimension": r.dimension, "pd": int(r.contains_pd)} for r in records]
    if not rows:
        return pd.DataFrame(columns=["orbits", "pd_orbits", "mass_contribution"])
    frame = pd.DataFrame(rows)
    table = frame.groupby("dimension").agg(orbits=("pd", "size"), pd_orbits=("pd", "sum"))
    masses = mass_breakdown(records)
    table["mass_contribution"] = [format_rational(masses[d]) for d in table.index]
    return table.sort_index(ascending=False)


def missing_dimensions(n: int, complete_dims: Sequence[int]) -> List[int]:
    """Dimensions 1 .. n(n+1)/2 absent from a census."""
    present = set(complete_dims)
    return [d for d in range(n * (n + 1) // 2, 0, -1) if d not in present]


def export_report(kind: str, manifest: dict, report: dict) -> str:
    """
    Serialize a check report with its run manifest.

    Args:
        kind (str): "cs-check" or "matroidal-check"
        manifest (dict): RunManifest.to_dict()
        report (dict): Output of the corresponding check

    Returns:
        str: JSON text, keys sorted
    """
    body = {
        "format": REPORT_FORMAT,
        "kind": kind,
        "manifest": manifest,
        "verdict": "PASS" if report.get("passed") == report.get("total") else "FAIL",
        "report": report,
    }
    return json.dumps(body, indent=1, sort_keys=True, default=format_rational) + "\n"
