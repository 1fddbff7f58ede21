"""Experiment records and dataset container.

One record holds the nine measured variables of a commissioning run.
The CSV interchange format is fixed: header ``T_TS,T_w,T_a,T_n,v_TS,LWC,
MVD,Q_a,Q_w``, plant units, UTF-8, ``.`` decimal separator.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .tables import VARIABLES, variable_range


class DatasetError(ValueError):
    """Malformed dataset content or schema."""


@dataclass(frozen=True)
class ExperimentRecord:
    t_ts: float
    t_w: float
    t_a: float
    t_n: float
    v_ts: float
    lwc: float
    mvd: float
    q_a: float
    q_w: float

    _FIELDS = ("t_ts", "t_w", "t_a", "t_n", "v_ts", "lwc", "mvd", "q_a", "q_w")

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, f) for f in self._FIELDS)

    def __getitem__(self, variable: str) -> float:
        return self.as_tuple()[VARIABLES.index(variable)]

    def validate(self) -> list[str]:
        bad = []
        for name, value in zip(VARIABLES, self.as_tuple()):
            if not math.isfinite(value):
                bad.append(f"{name} is not finite")
        return bad


class Dataset:
    """Ordered collection of records with a provenance tag."""

    def __init__(self, records: Iterable[ExperimentRecord],
                 provenance: str = "real"):
        if provenance not in ("real", "synthetic"):
            raise DatasetError("provenance must be 'real' or 'synthetic'")
        self.records = list(records)
        self.provenance = provenance

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[ExperimentRecord]:
        return iter(self.records)

    def validate(self) -> list[str]:
        """All violated record invariants.  Real data must additionally
        sit inside the commissioning min/max envelope."""
        bad = []
        for i, rec in enumerate(self.records):
            for msg in rec.validate():
                bad.append(f"record {i}: {msg}")
            if self.provenance == "real":
                for name, value in zip(VARIABLES, rec.as_tuple()):
                    lo, hi = variable_range(name)
                    if not (lo <= value <= hi):
                        bad.append(
                            f"record {i}: {name}={value:.4g} outside "
                            f"commissioning range [{lo:.4g}, {hi:.4g}]")
        return bad

    def to_matrix(self) -> np.ndarray:
        """(n, 9) float matrix in VARIABLES column order."""
        return np.array([rec.as_tuple() for rec in self.records], dtype=float)

    def column(self, variable: str) -> np.ndarray:
        return self.to_matrix()[:, VARIABLES.index(variable)]

    @classmethod
    def from_matrix(cls, x: np.ndarray, provenance: str = "synthetic") -> "Dataset":
        recs = [ExperimentRecord(*map(float, row)) for row in np.asarray(x, dtype=float)]
        return cls(recs, provenance)

    def save_csv(self, path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(VARIABLES)
            for rec in self.records:
                writer.writerow([repr(v) for v in rec.as_tuple()])

    @classmethod
    def load_csv(cls, path: str, provenance: str = "real") -> "Dataset":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DatasetError("dataset CSV is empty") from None
            if tuple(h.strip() for h in header) != VARIABLES:
                raise DatasetError(
                    f"dataset header must be {','.join(VARIABLES)}; "
                    f"got {','.join(header)}")
            records = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(VARIABLES):
                    raise DatasetError(f"line {lineno}: expected {len(VARIABLES)} fields")
                try:
                    records.append(ExperimentRecord(*(float(v) for v in row)))
                except ValueError as exc:
                    raise DatasetError(f"line {lineno}: {exc}") from None
        return cls(records, provenance)
