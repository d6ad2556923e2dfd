"""Run records and the on-disk result cache.

Rationals are stored as ``[numerator, denominator]`` integer pairs and
floats via their shortest round-trip repr, so a record read back compares
equal to the one written.  Wall time is only stored on request, which keeps
reruns byte-identical.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import __version__
from .lower import LowerBoundChain, RefinementStep
from .numerics import BoundResult

SCHEMA_VERSION = 1
CACHE_ENV = "CANTOR_BOUNDS_DIR"


def cache_dir(override: str | os.PathLike | None = None) -> Path:
    if override is not None:
        return Path(override)
    return Path(os.environ.get(CACHE_ENV, "results"))


def _q(x: Fraction) -> list[int]:
    x = Fraction(x)
    return [x.numerator, x.denominator]


def _unq(pair) -> Fraction:
    return Fraction(pair[0], pair[1])


def _witness_out(w: dict | None) -> dict | None:
    if w is None:
        return None
    return {key: _q(v) if isinstance(v, Fraction) else v for key, v in w.items()}


_RATIONAL_WITNESS = {"diameter_sq", "radius_sq", "mu_low", "final_L2", "seed_L2"}


def _witness_in(w: dict | None) -> dict | None:
    if w is None:
        return None
    return {key: _unq(v) if key in _RATIONAL_WITNESS else v for key, v in w.items()}


def _step_out(st: RefinementStep) -> dict:
    return {
        "label": st.label,
        "threshold": _q(st.threshold),
        "assumed_classes": [list(c) for c in st.assumed_classes],
        "matching_sizes": [{"class": list(c), "size": m} for c, m in st.matching_sizes.items()],
        "measure_cap": _q(st.measure_cap),
        "mu_min": st.mu_min,
        "conclusion": _q(st.conclusion),
        "notes": list(st.notes),
    }


def _step_in(obj: dict) -> RefinementStep:
    return RefinementStep(
        assumed_classes=[tuple(c) for c in obj["assumed_classes"]],
        threshold=_unq(obj["threshold"]),
        matching_sizes={tuple(e["class"]): e["size"] for e in obj["matching_sizes"]},
        measure_cap=_unq(obj["measure_cap"]),
        mu_min=obj["mu_min"],
        conclusion=_unq(obj["conclusion"]),
        label=obj["label"],
        notes=list(obj["notes"]),
    )


def encode_result(result) -> Any:
    if isinstance(result, BoundResult):
        return {
            "direction": result.direction,
            "value": result.value,
            "certified": result.certified,
            "rounding_budget": result.rounding_budget,
            "witness": _witness_out(result.witness),
            "chain": [_step_out(s) for s in result.chain],
            "notes": list(result.notes),
            "d": result.d,
            "k": result.k,
        }
    if isinstance(result, LowerBoundChain):
        return {
            "direction": "lower",
            "value": result.final_value,
            "certified": True,
            "witness": {"final_L2": _q(result.final_L2), "seed_L2": _q(result.seed), "H_used": result.H_used},
            "chain": [_step_out(s) for s in result.steps],
            "checks": [list(c) for c in result.checks],
            "notes": list(result.notes),
            "d": result.d,
            "k": result.k,
        }
    if isinstance(result, list):
        return {"direction": "upper", "rows": result}
    raise TypeError(f"cannot serialise {type(result).__name__}")


def decode_result(command: str, obj: dict):
    if command == "naive":
        return list(obj["rows"])
    if command == "lower":
        w = obj["witness"]
        return LowerBoundChain(
            d=obj["d"],
            k=obj["k"],
            steps=[_step_in(s) for s in obj["chain"]],
            H_used=w["H_used"],
            seed=_unq(w["seed_L2"]),
            final_L2=_unq(w["final_L2"]),
            final_value=obj["value"],
            checks=[tuple(c) for c in obj["checks"]],
            notes=list(obj["notes"]),
        )
    return BoundResult(
        direction=obj["direction"],
        value=obj["value"],
        d=obj["d"],
        k=obj["k"],
        witness=_witness_in(obj["witness"]),
        chain=[_step_in(s) for s in obj["chain"]],
        certified=obj["certified"],
        rounding_budget=obj["rounding_budget"],
        notes=list(obj["notes"]),
    )


@dataclass
class RunRecord:
    command: str
    d: int
    k: int
    result: Any
    flags: dict = field(default_factory=dict)
    enumeration_count: int = 0
    wall_time_ms: int | None = None
    tool_version: str = __version__
    schema_version: int = SCHEMA_VERSION

    @property
    def filename(self) -> str:
        return f"{self.command}-d{self.d}-k{self.k}.json"

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "params": {"d": self.d, "k": self.k, "flags": self.flags},
            "result": encode_result(self.result),
            "timing": {"enumeration_count": self.enumeration_count, "wall_time_ms": self.wall_time_ms},
            "tool_version": self.tool_version,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, obj: dict) -> "RunRecord":
        if obj.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {obj.get('schema_version')}")
        params = obj["params"]
        return cls(
            command=obj["command"],
            d=params["d"],
            k=params["k"],
            flags=dict(params["flags"]),
            result=decode_result(obj["command"], obj["result"]),
            enumeration_count=obj["timing"]["enumeration_count"],
            wall_time_ms=obj["timing"]["wall_time_ms"],
            tool_version=obj["tool_version"],
        )

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls.from_dict(json.loads(text))


def write_record(record: RunRecord, directory: str | os.PathLike | None = None) -> Path:
    """Atomically write the record into the cache directory."""
    target_dir = cache_dir(directory)
    target_dir.mkdir(parents=True, exist_ok=True)
    path = target_dir / record.filename
    fd, tmp = tempfile.mkstemp(dir=target_dir, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(record.to_json())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def load_records(directory: str | os.PathLike | None = None) -> list[RunRecord]:
    target_dir = cache_dir(directory)
    if not target_dir.is_dir():
        return []
    out = []
    for path in sorted(target_dir.glob("*.json")):
        try:
            out.append(RunRecord.from_json(path.read_text()))
        except (ValueError, KeyError, json.JSONDecodeError):
            continue
    return out
