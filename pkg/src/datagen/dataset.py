import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

import numpy as np

from src.errors import FormatError
from src.spmodel import ScenarioSet

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class DataRecord:
    """One training pair: a first-stage point, the scenario subset it was scored on, and the mean recourse"""
    x: np.ndarray
    scenario_ids: Tuple[str, ...]
    label: float

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "scenario_ids", tuple(self.scenario_ids))
        object.__setattr__(self, "label", float(self.label))
        if not self.scenario_ids:
            raise ValueError("a record needs at least one scenario id")
        if not math.isfinite(self.label):
            raise ValueError(f"record label {self.label!r} is not finite")

    def to_dict(self) -> Dict[str, Any]:
        return {"x": self.x.tolist(), "scenario_ids": list(self.scenario_ids), "label": self.label}


@dataclass
class SurrogateDataset:
    records: List[DataRecord]
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def x_dim(self) -> int:
        return int(self.records[0].x.size) if self.records else 0

    def x_matrix(self) -> np.ndarray:
        return np.vstack([r.x for r in self.records])

    def labels(self) -> np.ndarray:
        return np.array([r.label for r in self.records])

    def subset_sizes(self) -> np.ndarray:
        return np.array([len(r.scenario_ids) for r in self.records])

    def validate(self, pool: ScenarioSet, max_scenarios: int = None) -> None:
        """Every scenario id must resolve in the pool and every subset respects the size cap"""
        known = set(pool.ids)
        cap = max_scenarios or self.provenance.get("max_scenarios_per_sample")
        for i, r in enumerate(self.records):
            missing = [sid for sid in r.scenario_ids if sid not in known]
            if missing:
                raise ValueError(f"record {i}: scenario ids {missing} not in pool '{pool.set_id}'")
            if cap is not None and not 1 <= len(r.scenario_ids) <= cap:
                raise ValueError(f"record {i}: subset size {len(r.scenario_ids)} outside [1, {cap}]")

    def to_jsonl(self) -> str:
        lines = [json.dumps({"format_version": FORMAT_VERSION, "provenance": self.provenance}, sort_keys=True)]
        lines.extend(json.dumps(r.to_dict(), sort_keys=True) for r in self.records)
        return "\n".join(lines) + "\n"

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_jsonl())
        logger.info(f"Wrote {len(self.records)} records to {path}")
        return path

    @classmethod
    def from_jsonl(cls, text: str) -> "SurrogateDataset":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise FormatError("dataset file is empty")
        try:
            header = json.loads(lines[0])
            if header.get("format_version") != FORMAT_VERSION:
                raise FormatError(f"unsupported dataset format version {header.get('format_version')!r}")
            records = []
            for line in lines[1:]:
                raw = json.loads(line)
                records.append(DataRecord(x=raw["x"], scenario_ids=raw["scenario_ids"], label=raw["label"]))
        except (AttributeError, KeyError, TypeError, ValueError) as e:
            raise FormatError(f"malformed dataset file: {e}") from e
        return cls(records=records, provenance=header.get("provenance", {}))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "SurrogateDataset":
        return cls.from_jsonl(Path(path).read_text())
