"""
Census Storage
Checkpoints and census files on local disk, CSV export and summary
statistics for cell censuses.
"""

import json
import logging
import os
from fractions import Fraction
from pathlib import Path
from typing import Optional

import pandas as pd

from errors import CensusError, InputFormatError
from exact_arith import format_rational, parse_rational

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "isoedge-checkpoint"
CENSUS_FORMAT = "isoedge-census"
FORMAT_VERSION = 1


def write_json_atomic(path, payload: dict) -> None:
    """Write ``path`` via a temporary sibling and os.replace."""
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.with_name(target.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=1)
        f.write("\n")
    os.replace(tmp, target)


def read_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path} is not valid JSON: {exc}") from exc


class CensusStore:
    """
    Persistent storage for a single enumeration run.

    The checkpoint file holds the whole traversal state so that a run can be
    resumed; census files hold finished results.
    """

    def __init__(self, checkpoint_path: Optional[str] = None):
        """
        Args:
            checkpoint_path (str): Checkpoint file, or None to disable checkpoints
        """
        self.checkpoint_path = Path(checkpoint_path) if checkpoint_path else None
        self.saves = 0

    def save_checkpoint(self, state: dict) -> bool:
        """
        Flush traversal state atomically.

        Args:
            state (dict): JSON-ready state from the enumerator

        Returns:
            bool: False when checkpointing is disabled
        """
        if self.checkpoint_path is None:
            return False
        payload = {"format": CHECKPOINT_FORMAT, "version": FORMAT_VERSION}
        payload.update(state)
        try:
            write_json_atomic(self.checkpoint_path, payload)
        except OSError as exc:
            raise CensusError(f"cannot write checkpoint {self.checkpoint_path}: {exc}") from exc
        self.saves += 1
        logger.info("checkpoint %d written to %s", self.saves, self.checkpoint_path)
        return True

    def load_checkpoint(self) -> Optional[dict]:
        """The saved state, or None if there is no checkpoint yet."""
        if self.checkpoint_path is None or not self.checkpoint_path.exists():
            return None
        payload = read_json(self.checkpoint_path)
        if payload.get("format") != CHECKPOINT_FORMAT or payload.get("version") != FORMAT_VERSION:
            raise CensusError(f"{self.checkpoint_path} is not a version {FORMAT_VERSION} checkpoint")
        logger.info("resuming from checkpoint %s", self.checkpoint_path)
        return payload

    def clear_checkpoint(self) -> None:
        if self.checkpoint_path is not None and self.checkpoint_path.exists():
            self.checkpoint_path.unlink()

    @staticmethod
    def save_census(path, payload: dict) -> None:
        body = {"format": CENSUS_FORMAT, "version": FORMAT_VERSION}
        body.update(payload)
        try:
            write_json_atomic(path, body)
        except OSError as exc:
            raise InputFormatError(f"cannot write {path}: {exc}") from exc

    @staticmethod
    def load_census(path) -> dict:
        if not Path(path).exists():
            raise InputFormatError(f"census file {path} does not exist")
        payload = read_json(path)
        if payload.get("format") != CENSUS_FORMAT:
            raise InputFormatError(f"{path} is not a census file")
        if payload.get("version") != FORMAT_VERSION:
            raise CensusError(f"{path} has census version {payload.get('version')}, "
                              f"expected {FORMAT_VERSION}")
        return payload

    @staticmethod
    def census_frame(payload: dict) -> pd.DataFrame:
        """One row per cell orbit."""
        rows = []
        for cell in payload.get("cells", []):
            stabilizer = cell.get("stabilizer")
            contribution = Fraction(0)
            if cell["contains_pd"]:
                contribution = Fraction((-1) ** cell["dimension"], stabilizer)
            rows.append({
                "key": cell["key"],
                "dimension": cell["dimension"],
                "rank": cell["system"]["rank"],
                "stabilizer": stabilizer,
                "contains_pd": cell["contains_pd"],
                "rays": len(cell["cone"]["rays"]),
                "mass_contribution": format_rational(contribution),
            })
        columns = ["key", "dimension", "rank", "stabilizer", "contains_pd", "rays", "mass_contribution"]
        return pd.DataFrame(rows, columns=columns)

    def export_to_csv(self, payload: dict, output_file) -> bool:
        """
        Export the cells of a census to CSV.

        Returns:
            bool: Success status
        """
        frame = self.census_frame(payload)
        if frame.empty:
            return False
        try:
            frame.to_csv(output_file, index=False)
        except OSError as exc:
            logger.error("CSV export error: %s", exc)
            return False
        return True

    def get_statistics_summary(self, payload: dict) -> dict:
        """
        Per-dimension orbit counts, PD counts and exact mass partial sums.

        Returns:
            dict: Summary keyed by dimension (as strings) plus totals
        """
        frame = self.census_frame(payload)
        if frame.empty:
            return {"status": "No cells available"}
        per_dim = {}
        for dim, group in frame.groupby("dimension", sort=True):
            mass = sum((parse_rational(x) for x in group["mass_contribution"]), Fraction(0))
            per_dim[str(int(dim))] = {
                "orbits": int(len(group)),
                "pd_orbits": int(group["contains_pd"].sum()),
                "mass": format_rational(mass),
            }
        total = sum((parse_rational(entry["mass"]) for entry in per_dim.values()), Fraction(0))
        return {
            "dimension": payload.get("dimension"),
            "total_orbits": int(len(frame)),
            "per_dimension": per_dim,
            "mass_total": format_rational(total),
        }
