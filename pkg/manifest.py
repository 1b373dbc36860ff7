"""
Run Manifest
Configuration of one CLI run, written as the header of every output file.
"""

import json
from datetime import datetime, timezone
from fractions import Fraction
from typing import Dict

from errors import InputFormatError
from exact_arith import format_rational, parse_rational

__version__ = "1.0.0"

MAX_DIMENSION = 5
VOLATILE_KEYS = ("generated_at", "workers", "checkpoint")


class RunManifest:
    """Run configuration manager"""

    def __init__(self, command: str = "enumerate"):
        self.config = {
            "command": command,
            "dimension": 3,
            "seed_perturbation": Fraction(1, 100),
            "checkpoint": None,
            "checkpoint_every": 50,
            "output": None,
            "workers": 1,
            "min_dim": None,
            "permutation_aware": False,
            "version": __version__,
        }
        self.generated_at = datetime.now(timezone.utc).isoformat(timespec="seconds")

    def __getitem__(self, key):
        return self.config[key]

    def set_config(self, config_dict: Dict) -> "RunManifest":
        """Update from a dict and validate"""
        for key, value in config_dict.items():
            if value is None and key not in ("checkpoint", "output", "min_dim"):
                continue
            if key == "seed_perturbation" and not isinstance(value, Fraction):
                value = parse_rational(str(value))
            self.config[key] = value
        self.validate()
        return self

    def validate(self) -> bool:
        """
        Check ranges.

        Raises:
            InputFormatError: a field is out of range
        """
        n = self.config["dimension"]
        low = 2 if self.config["command"] in ("enumerate", "cells") else 1
        if not isinstance(n, int) or not low <= n <= MAX_DIMENSION:
            raise InputFormatError(f"dimension must be an integer in {low}..{MAX_DIMENSION}, got {n}")
        if self.config["workers"] < 1:
            raise InputFormatError("workers must be at least 1")
        if self.config["checkpoint_every"] < 1:
            raise InputFormatError("checkpoint_every must be at least 1")
        if self.config["seed_perturbation"] <= 0:
            raise InputFormatError("seed perturbation must be positive")
        min_dim = self.config["min_dim"]
        if min_dim is not None and not 1 <= min_dim <= n * (n + 1) // 2:
            raise InputFormatError(f"min_dim must lie in 1..{n * (n + 1) // 2}")
        return True

    def load_from_json(self, json_path: str) -> "RunManifest":
        """Load configuration from a JSON file or from the manifest header of an output file"""
        try:
            with open(json_path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputFormatError(f"cannot read manifest {json_path}: {exc}") from exc
        data = data.get("manifest", data)
        return self.set_config({k: v for k, v in data.items() if k in self.config})

    def to_dict(self) -> dict:
        data = dict(self.config)
        data["seed_perturbation"] = format_rational(data["seed_perturbation"])
        data["generated_at"] = self.generated_at
        return data

    def comparable_dict(self) -> dict:
        """to_dict without the fields that may differ between equivalent runs"""
        return {k: v for k, v in self.to_dict().items() if k not in VOLATILE_KEYS}
